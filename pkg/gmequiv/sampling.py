'''
Exact Gaussian simulation of a Gauss-Markov process on a finite grid.
'''

import logging

import numpy as np
import scipy.linalg

from gmequiv import rng as rngs
from gmequiv.exceptions import SingularCovariance

log = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-14


def sample_process(kernel, grid, size=None, rng=0):
    '''
    Draw Xi on ``grid``. Uses the time change Xi_t = v(t) W_{q(t)} when q is
    finite on the grid and the dense Cholesky factor of the kernel otherwise
    (bridge-type kernels). Points of zero variance are pinned to 0.

    Returns an array of shape (len(grid),) or (size, len(grid)).
    '''
    generator = rngs.as_generator(rng, rngs.PROCESS)
    grid = np.asarray(grid, dtype=float)
    shape = (1 if size is None else size, len(grid))

    q = np.asarray(kernel.q(grid))
    if np.all(np.isfinite(q)):
        variances = np.diff(np.concatenate([[0.0], q]))
        variances = np.maximum(variances, 0.0)
        normals = generator.standard_normal(shape)
        brownian = np.cumsum(np.sqrt(variances) * normals, axis=1)
        paths = np.asarray(kernel.v(grid)) * brownian
    else:
        paths = _sample_dense(kernel, grid, shape, generator)

    if size is None:
        return paths[0]
    return paths


def _sample_dense(kernel, grid, shape, generator):
    variance = np.asarray(kernel.covariance(grid, grid))
    free = variance > VARIANCE_FLOOR
    points = grid[free]
    if len(points) == 0:
        return np.zeros(shape)
    log.debug('Dense Cholesky sampling of %s on %d free points', kernel.name, len(points))
    try:
        factor = scipy.linalg.cholesky(kernel.gram(points), lower=True)
    except np.linalg.LinAlgError:
        raise SingularCovariance('Kernel covariance is not positive definite on the grid', kernel.name)

    normals = generator.standard_normal((shape[0], len(points)))
    paths = np.zeros(shape)
    paths[:, free] = normals @ factor.T
    return paths
