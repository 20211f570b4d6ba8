'''
The two observation schemes and the intermediate experiments between them:

* E1, discrete regression: Y_i = f(t_i) + sqrt(n) xi_i with xi_i the
  increments of the noise process over the design cells;
* E1', the same with f(t_i) replaced by the cell average n int_cell f;
* E2, the path Y_t = F_f(t) + Xi_t / sqrt(n) on a fine grid;
* the Kriging path, which interpolates F_f through the knots.

Each sample keeps its signal and noise parts, so couplings between
experiments that share a seed are exact.
'''

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from gmequiv import rng as rngs
from gmequiv.rkhs import KrigingInterpolator, kriging_residual_process
from gmequiv.sampling import sample_process
from gmequiv.util import knots, path_grid, knot_indices
from gmequiv.exceptions import GridMismatch

log = logging.getLogger(__name__)

VARIANTS = ('original', 'cell_averaged')
DEFAULT_GRID_DENSITY = 20


@dataclass
class DiscreteSample:
    n: int
    values: np.ndarray
    variant: str
    kernel_name: str
    function_name: str
    seed: Optional[int]
    signal: np.ndarray = None
    noise: np.ndarray = None

    @property
    def t(self):
        return knots(self.n)[1:]


@dataclass
class PathSample:
    n: int
    grid: np.ndarray
    values: np.ndarray
    kernel_name: str
    function_name: str
    seed: Optional[int]
    signal: np.ndarray = None
    noise: np.ndarray = None
    kind: str = 'path'

    @property
    def scale(self):
        return 1.0 / np.sqrt(self.n)


def default_grid_size(n, grid_density=DEFAULT_GRID_DENSITY):
    return grid_density * n + 1


def _check_grid_size(n, grid_size):
    if grid_size < n + 1:
        raise GridMismatch('Path grid of %d points cannot contain %d knots' % (grid_size, n + 1))
    if (grid_size - 1) % n != 0:
        raise GridMismatch('Path grid of %d points does not contain every knot j/%d '
                           '(grid_size - 1 must be a multiple of n)' % (grid_size, n))


def simulate_increments(kernel, n, seed, size=None):
    '''
    xi_i = Xi_{i/n} - Xi_{(i-1)/n}, simulated exactly on the knots.
    '''
    paths = sample_process(kernel, knots(n), size, rngs.generator(seed, rngs.PROCESS))
    return np.diff(paths, axis=-1)


def simulate_e1(kernel, f, n, seed, variant='original', size=None):
    '''
    Both variants draw the same noise for the same seed.
    '''
    if variant == 'original':
        signal = np.asarray(f.evaluate(knots(n)[1:]))
    elif variant == 'cell_averaged':
        signal = f.cell_averages(n)
    else:
        raise ValueError('Unknown E1 variant: %s' % variant)

    noise = np.sqrt(n) * simulate_increments(kernel, n, seed, size)
    return DiscreteSample(n=n, values=signal + noise, variant=variant, kernel_name=kernel.name,
                          function_name=f.name, seed=seed, signal=signal, noise=noise)


def simulate_e2(kernel, f, n, seed, grid_size=None, size=None):
    grid_size = grid_size or default_grid_size(n)
    _check_grid_size(n, grid_size)

    grid = path_grid(grid_size)
    signal = np.asarray(f.antiderivative(grid))
    noise = sample_process(kernel, grid, size, rngs.generator(seed, rngs.PROCESS)) / np.sqrt(n)
    values = signal + noise
    values[..., 0] = 0.0
    return PathSample(n=n, grid=grid, values=values, kernel_name=kernel.name,
                      function_name=f.name, seed=seed, signal=signal, noise=noise, kind='e2')


def kriging_path_experiment(kernel, f, n, seed, grid_size=None, size=None, method='closed_form'):
    '''
    Y~_t = I(t | F_f(t_1..t_n)) + Xi_t / sqrt(n).
    '''
    grid_size = grid_size or default_grid_size(n)
    _check_grid_size(n, grid_size)

    interpolator = KrigingInterpolator(kernel, n, method)
    grid = path_grid(grid_size)
    signal = interpolator(np.asarray(f.antiderivative(knots(n)[1:])), grid)
    noise = sample_process(kernel, grid, size, rngs.generator(seed, rngs.PROCESS)) / np.sqrt(n)
    return PathSample(n=n, grid=grid, values=signal + noise, kernel_name=kernel.name,
                      function_name=f.name, seed=seed, signal=signal, noise=noise,
                      kind='kriging')


def kriging_path_from_discrete(kernel, sample, grid_size=None, method='closed_form'):
    '''
    Turn Y' into a path: with partial sums S'_k = sum_{i<=k} Y'_i,

        Y~_t = (I(t | S') + sqrt(n) R_t) / n,

    R an independent Kriging residual. R vanishes at the knots and I
    reproduces its data there, so Y~_{t_k} = S'_k / n.
    '''
    n = sample.n
    grid_size = grid_size or default_grid_size(n)
    _check_grid_size(n, grid_size)
    density = (grid_size - 1) // n

    partial_sums = np.cumsum(sample.values, axis=-1)
    interpolator = KrigingInterpolator(kernel, n, method)
    grid = path_grid(grid_size)
    size = None if np.ndim(sample.values) == 1 else sample.values.shape[0]
    residual = kriging_residual_process(kernel, n, sample.seed, density, size, method)

    values = (interpolator(partial_sums, grid) + np.sqrt(n) * residual.values) / n
    return PathSample(n=n, grid=grid, values=values, kernel_name=kernel.name,
                      function_name=sample.function_name, seed=sample.seed, kind='kriging')


def reconstruct_discrete_from_path(path, n):
    '''
    Y'_i = n (Y~_{t_i} - Y~_{t_{i-1}}).
    '''
    idx = knot_indices(path.grid, n)
    if idx is None:
        raise GridMismatch('Path grid does not contain every knot j/%d' % n)
    values = n * np.diff(np.asarray(path.values)[..., idx], axis=-1)
    return DiscreteSample(n=n, values=values, variant='cell_averaged', kernel_name=path.kernel_name,
                          function_name=path.function_name, seed=path.seed)


def star_transform(kernel, sample):
    '''
    Increments of Y*_j = sum_{i<=j} Y_i / v(t_j). Their mean is mu_{j,n} and
    their noise variance sigma^2_{j,n} = n (q(t_j) - q(t_{j-1})).
    '''
    v = np.asarray(kernel.v(sample.t))
    transformed = np.cumsum(sample.values, axis=-1) / v
    return np.diff(transformed, axis=-1, prepend=0.0)
