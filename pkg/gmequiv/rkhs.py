'''
The reproducing kernel Hilbert space of a triangular kernel.

The isometry psi sends K(., s) to v(s) 1_[0, q(s)], identifying the RKHS
with L^2([0, T]): every element is F(t) = v(t) int_0^q(t) g for a unique g,
and ||F|| = ||g||. Most computations here work with G = g o q on [0, 1],
which avoids inverting q.
'''

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.integrate
import scipy.linalg

from gmequiv import quadrature
from gmequiv import rng as rngs
from gmequiv.sampling import sample_process
from gmequiv.util import knots, path_grid
from gmequiv.exceptions import (
    KernelDegenerate, QuadratureFailure, SingularCovariance)

log = logging.getLogger(__name__)

NORM_RTOL = 1e-9
QUAD_LIMIT = 500
KRIGING_METHODS = ('closed_form', 'tridiagonal', 'dense')


def _require_positive_v(kernel, grid_size=1001):
    grid = np.linspace(0, 1, grid_size)[:-1]
    v = np.asarray(kernel.v(grid))
    if np.any(v <= 0):
        raise KernelDegenerate('v vanishes on [0, 1) at t=%.6g' % grid[np.argmin(v)], kernel.name)
    q_prime = np.asarray(kernel.q_prime(grid))
    if np.any(q_prime <= 0):
        raise KernelDegenerate('q\' vanishes at t=%.6g' % grid[np.argmin(q_prime)], kernel.name)


@dataclass(frozen=True, eq=False)
class RkhsElement:
    kernel: object
    representation: str
    G: Callable
    F: Callable
    g_function: Optional[Callable] = None
    integral: Optional[Callable] = None
    breakpoints: tuple = field(default_factory=tuple)

    def g(self, x):
        '''
        The psi-image on [0, T].
        '''
        if self.g_function is not None:
            return self.g_function(x)
        return self.G(self.kernel.q_inverse(x))

    @classmethod
    def from_g(cls, kernel, g, breakpoints=()):
        '''
        Element F(t) = v(t) int_0^q(t) g. ``g`` is a vectorised function on
        [0, T]; ``breakpoints`` lists its discontinuities.
        '''
        breakpoints = tuple(sorted(float(b) for b in breakpoints))

        def integral(t):
            t = np.atleast_1d(np.asarray(t, dtype=float))
            upper = np.asarray(kernel.q(t))
            result = np.empty_like(t)
            for i, x in enumerate(upper):
                result[i] = _quad(g, 0.0, x, [b for b in breakpoints if 0 < b < x], kernel)
            return result

        def F(t):
            value = np.asarray(kernel.v(t)) * integral(t)
            if np.ndim(t) == 0:
                return float(value[0])
            return value

        def G(w):
            return g(np.asarray(kernel.q(w)))

        return cls(kernel, 'from_g', G=G, F=F, g_function=g, integral=integral,
                   breakpoints=breakpoints)

    def f(self, t):
        '''
        F' = v' int_0^q g + v g(q) q', only for elements built from g.
        '''
        if self.representation != 'from_g':
            raise NotImplementedError('f is only reconstructed for elements built from g')
        t = np.asarray(t, dtype=float)
        value = (np.asarray(self.kernel.v_prime(t)) * self.integral(t)
                 + np.asarray(self.kernel.v(t)) * self.G(t) * np.asarray(self.kernel.q_prime(t)))
        if t.ndim == 0:
            return float(value[0])
        return value


def _quad(func, a, b, points, kernel=None):
    if b <= a:
        return 0.0
    kwargs = {'epsrel': NORM_RTOL, 'epsabs': 0.0, 'limit': QUAD_LIMIT, 'full_output': 1}
    if points:
        kwargs['points'] = points
    result = scipy.integrate.quad(lambda x: float(func(x)), a, b, **kwargs)
    value, error = result[0], result[1]
    if len(result) > 3:
        raise QuadratureFailure('Adaptive quadrature did not converge: %s' % result[3].split('\n')[0],
                                achieved=error / max(abs(value), 1e-300),
                                kernel_name=getattr(kernel, 'name', None))
    return value


def g_from_antiderivative(kernel, F, f):
    '''
    G(w) = g(q(w)) = (F/v)'(w) / q'(w) = [f v - v' F] / (v^2 q').
    '''
    _require_positive_v(kernel)

    def G(w):
        w = np.asarray(w, dtype=float)
        v = np.asarray(kernel.v(w))
        return (np.asarray(f(w)) * v - np.asarray(kernel.v_prime(w)) * np.asarray(F(w))) \
            / (v * v * np.asarray(kernel.q_prime(w)))

    return RkhsElement(kernel, 'from_f', G=G, F=F)


def g_from_f(kernel, f):
    return g_from_antiderivative(kernel, f.antiderivative, f.evaluate)


def rkhs_norm(element):
    '''
    ||F||_H = ||g||_{L^2[0,T]}. Elements built from g integrate g^2 on
    [0, T]; the others integrate G^2 q' on [0, 1], the same integral after
    substituting x = q(w).
    '''
    kernel = element.kernel
    if element.representation == 'from_g' and np.isfinite(kernel.horizon_T):
        T = kernel.horizon_T
        points = [b for b in element.breakpoints if 0 < b < T]
        value = _quad(lambda x: element.g(x) ** 2, 0.0, T, points, kernel)
    else:
        value = _quad(lambda w: element.G(w) ** 2 * kernel.q_prime(w), 0.0, 1.0, [], kernel)
    return float(np.sqrt(max(value, 0.0)))


def kernel_section_element(kernel, coefficients, points):
    '''
    psi-image of sum_i c_i K(., s_i), namely sum_i c_i v(s_i) 1_[0, q(s_i)].
    '''
    coefficients = np.asarray(coefficients, dtype=float)
    points = np.asarray(points, dtype=float)
    heights = coefficients * np.asarray(kernel.v(points))
    edges = np.asarray(kernel.q(points))

    def g(x):
        x = np.asarray(x, dtype=float)
        return np.sum(heights * (x[..., None] <= edges), axis=-1)

    return RkhsElement.from_g(kernel, g, breakpoints=edges)


def span_norm_sq(kernel, coefficients, points):
    '''
    Squared RKHS norm of sum_i c_i K(., s_i) from the Gram matrix.
    '''
    c = np.asarray(coefficients, dtype=float)
    return float(c @ kernel.gram(points) @ c)


def step_coefficients(kernel, F, n):
    '''
    Optimal step heights alpha_j: the q'-weighted cell means of G, which
    integrate exactly to the increments of F/v over the cells.
    '''
    t = knots(n)
    v = np.asarray(kernel.v(t))
    if np.any(v == 0) or not np.all(np.isfinite(np.asarray(kernel.q(t)))):
        raise KernelDegenerate('v vanishes at a design point', kernel.name)
    ratio = np.asarray(F(t)) / v
    ratio[0] = 0.0
    dq = np.diff(np.asarray(kernel.q(t)))
    return np.diff(ratio) / dq


def projection_distance(kernel, f, n):
    '''
    Squared RKHS distance from F_f to the span of K(., j/n), j = 1..n:

        D_n = sum_j int_{cell j} (G(w) - alpha_j)^2 q'(w) dw.
    '''
    if n < 1:
        raise ValueError('n must be at least 1')
    element = g_from_f(kernel, f)
    alpha = step_coefficients(kernel, element.F, n)

    def integrand(w, cells):
        return (element.G(w) - alpha[cells]) ** 2 * np.asarray(kernel.q_prime(w))

    cells = quadrature.integrate_cells(integrand, knots(n))
    return float(max(np.sum(cells), 0.0))


def projection_distance_gram(kernel, f, n):
    '''
    The same distance through the reproducing property:
    ||F||^2 - F_n^T C^{-1} F_n with F_n = (F_f(j/n))_j and C the Gram matrix.
    Loses accuracy to cancellation for large n; meant for cross-checks.
    '''
    element = g_from_f(kernel, f)
    t = knots(n)[1:]
    Fn = np.asarray(f.antiderivative(t))
    projected = float(Fn @ scipy.linalg.solve(kernel.gram(t), Fn, assume_a='pos'))
    return rkhs_norm(element) ** 2 - projected


class KrigingInterpolator(object):
    '''
    I(t | y) = k(t)^T C^{-1} y through values y_j at the knots j/n.

    Args:
        * kernel: kernel with v(1) != 0
        * n: number of knots
        * method: closed_form (linear interpolation of y/v in the q
          coordinate), tridiagonal (tridiagonal precision matrix) or dense
    '''

    def __init__(self, kernel, n, method='closed_form'):
        if method not in KRIGING_METHODS:
            raise ValueError('Unknown Kriging method: %s' % method)
        if not kernel.v1_nonzero:
            raise SingularCovariance(
                'Kriging needs v(1) != 0; the covariance of the knot values is singular',
                kernel.name)

        self.kernel = kernel
        self.n = n
        self.method = method
        self.t = knots(n)
        self.v = np.asarray(kernel.v(self.t))
        self.q = np.asarray(kernel.q(self.t))
        if np.any(self.v[1:] == 0) or not np.all(np.isfinite(self.q)):
            raise SingularCovariance('v vanishes at a knot', kernel.name)

    def precision_apply(self, y):
        '''
        C^{-1} y in O(n), with C = D M D, D = diag(v_j) and M = [min(q_i, q_j)]
        whose inverse is tridiagonal.
        '''
        dq = np.diff(self.q)
        z = y / self.v[1:]
        inv = 1.0 / dq
        diagonal = inv.copy()
        diagonal[:-1] += inv[1:]
        off = -inv[1:]

        w = diagonal * z
        w[..., :-1] += off * z[..., 1:]
        w[..., 1:] += off * z[..., :-1]
        return w / self.v[1:]

    def __call__(self, y, t):
        y = np.asarray(y, dtype=float)
        t = np.asarray(t, dtype=float)
        if y.shape[-1] != self.n:
            raise ValueError('Expected %d knot values, got %d' % (self.n, y.shape[-1]))

        if self.method == 'closed_form':
            value = self._closed_form(y, t.reshape(-1))
        else:
            if self.method == 'tridiagonal':
                w = self.precision_apply(y)
            else:
                w = scipy.linalg.solve(self.kernel.gram(self.t[1:]), y.T, assume_a='pos').T
            sections = self.kernel.covariance(t.reshape(-1)[:, None], self.t[None, 1:])
            value = w @ np.asarray(sections).T

        value = value.reshape(y.shape[:-1] + t.shape)
        if value.ndim == 0:
            return float(value)
        return value

    def _closed_form(self, y, t):
        z = np.concatenate([np.zeros(y.shape[:-1] + (1,)), y / self.v[1:]], axis=-1)
        j = np.clip(np.searchsorted(self.t, t, side='left'), 1, self.n)
        qt = np.asarray(self.kernel.q(t))
        weight = (qt - self.q[j - 1]) / (self.q[j] - self.q[j - 1])
        return np.asarray(self.kernel.v(t)) * ((1 - weight) * z[..., j - 1] + weight * z[..., j])


def kriging_interpolate(kernel, y, t, method='closed_form'):
    y = np.asarray(y, dtype=float)
    return KrigingInterpolator(kernel, y.shape[-1], method)(y, t)


@dataclass
class ResidualPath:
    grid: np.ndarray
    values: np.ndarray
    n: int
    kernel_name: str
    seed: int
    knot_values: Optional[np.ndarray] = None


def kriging_residual_process(kernel, n, seed, grid_density=20, size=None, method='closed_form'):
    '''
    R_t = Xi'_t - I(t | Xi'_n) for an independent copy Xi' on the path grid
    with grid_density * n + 1 points. Vanishes at every knot and is
    uncorrelated with the knot values Xi'_{t_j}, kept in knot_values.
    '''
    interpolator = KrigingInterpolator(kernel, n, method)
    grid = path_grid(grid_density * n + 1)
    paths = sample_process(kernel, grid, size, rngs.generator(seed, rngs.RESIDUAL))
    at_knots = paths[..., ::grid_density][..., 1:]
    residual = paths - interpolator(at_knots, grid)
    return ResidualPath(grid, residual, n, kernel.name, seed, at_knots)
