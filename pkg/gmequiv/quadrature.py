import logging

import numpy as np

log = logging.getLogger(__name__)

ORDER = 16
RTOL = 1e-9
MAX_LEVELS = 6

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(ORDER)


def _composite(func, edges, pieces):
    '''
    Gauss-Legendre rule with ``pieces`` equal subintervals in every cell.
    ``func(w, cell)`` receives points of shape (cells, pieces * ORDER) and the
    matching cell indices.
    '''
    lo = edges[:-1, None]
    width = (edges[1:] - edges[:-1])[:, None] / pieces
    starts = lo + width * np.arange(pieces)[None, :]
    points = starts[:, :, None] + 0.5 * width[:, :, None] * (_NODES + 1)
    points = points.reshape(len(lo), pieces * ORDER)
    cells = np.broadcast_to(np.arange(len(lo))[:, None], points.shape)
    values = np.asarray(func(points, cells)).reshape(len(lo), pieces, ORDER)
    return np.sum(values * _WEIGHTS, axis=(1, 2)) * 0.5 * width[:, 0]


def integrate_cells(func, edges, rtol=RTOL, max_levels=MAX_LEVELS):
    '''
    Integral of ``func`` over every cell [edges[j], edges[j+1]], doubling the
    number of subintervals until no cell changes by more than ``rtol``
    relative to the largest cell integral, or ``max_levels`` doublings.
    '''
    edges = np.asarray(edges, dtype=float)
    previous = _composite(func, edges, 1)
    for level in range(1, max_levels + 1):
        current = _composite(func, edges, 2 ** level)
        scale = max(float(np.max(np.abs(current))), 1e-300)
        change = float(np.max(np.abs(current - previous)))
        if change <= rtol * scale:
            return current
        previous = current
    log.warning('Cell quadrature did not reach rtol=%g after %d refinements (change %.3g)',
                rtol, max_levels, change / scale)
    return current
