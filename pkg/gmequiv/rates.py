'''
Empirical convergence rates: evaluate a statistic over a family of
functions on a doubling n grid, take the family maximum per n and fit the
log-log slope.
'''

import logging
import math
from dataclasses import dataclass, field
from multiprocessing.pool import ThreadPool
from typing import List, Optional

import numpy as np
import scipy.stats

from gmequiv.diagnostics import STATISTICS
from gmequiv.families import FIXED_FAMILIES
from gmequiv.util import env_int
from gmequiv.exceptions import ConfigException

log = logging.getLogger(__name__)

DEFAULT_N_GRID = (16, 32, 64, 128, 256, 512)
DEFAULT_MARGIN = 0.3
THREADS_VAR = 'GMEQUIV_THREADS'

# exponents for statistics that behave like squared discretisation errors,
# and for the square-root type condition (ii)
SQUARED_STATISTICS = ('condition_i', 'kl', 'kl_exact', 'appendix_b_terms', 'transformation')


@dataclass
class RateReport:
    statistic: str
    kernel: str
    family: str
    n_values: List[int]
    values: List[float]
    members: List[str]
    slope: Optional[float] = None
    intercept: Optional[float] = None
    stderr: Optional[float] = None
    fit_n: List[int] = field(default_factory=list)
    excluded: List[int] = field(default_factory=list)
    target: Optional[float] = None
    margin: float = DEFAULT_MARGIN
    degenerate: bool = False

    @property
    def passed(self):
        '''
        None when there is nothing to gate on.
        '''
        if self.target is None or self.degenerate or self.slope is None:
            return None
        return abs(self.slope - self.target) <= self.margin

    def rows(self):
        return [{'n': n, 'statistic': value, 'family_member': member}
                for n, value, member in zip(self.n_values, self.values, self.members)]

    def to_dict(self):
        return {
            'statistic': self.statistic,
            'kernel': self.kernel,
            'family': self.family,
            'n': list(self.n_values),
            'values': list(self.values),
            'members': list(self.members),
            'slope': self.slope,
            'intercept': self.intercept,
            'stderr': self.stderr,
            'fit_n': list(self.fit_n),
            'excluded': list(self.excluded),
            'target': self.target,
            'margin': self.margin,
            'degenerate': self.degenerate,
            'pass': self.passed,
        }


def default_target(statistic, family_name, beta=None):
    '''
    Expected log-log slope. Fixed smooth functions give squared
    discretisation errors of order 1/n; worst-case members of a Sobolev
    ellipsoid give max(1/n, n^(1 - 2 beta)). Random ellipsoid members decay
    0.1 faster than the ellipsoid boundary and accordingly gain 0.2 in the
    exponent of the squared statistics.
    '''
    if family_name in ('zero', 'constant'):
        return None
    if family_name in FIXED_FAMILIES or family_name == 'custom':
        exponent = -1.0
    else:
        if beta is None:
            raise ConfigException('Family "%s" needs beta for its target exponent' % family_name)
        excess = 0.2 if family_name == 'random' else 0.0
        exponent = max(-1.0, 1.0 - 2 * beta - excess)

    if statistic in SQUARED_STATISTICS:
        return exponent
    if statistic == 'condition_ii':
        return exponent / 2
    raise ConfigException('Unknown statistic: "%s"' % statistic)


def fit_slope(n_values, values):
    '''
    Least squares slope of log(value) on log(n) over the upper half of the
    usable points (at least two), skipping non-finite and non-positive
    values. Returns (slope, intercept, stderr, fit_n).
    '''
    pairs = [(n, v) for n, v in zip(n_values, values) if np.isfinite(v) and v > 0]
    if len(pairs) < 2:
        return None, None, None, [n for n, _ in pairs]
    start = min(len(pairs) // 2, len(pairs) - 2)
    pairs = pairs[start:]
    x = np.log([n for n, _ in pairs])
    y = np.log([v for _, v in pairs])
    fit = scipy.stats.linregress(x, y)
    return float(fit.slope), float(fit.intercept), float(fit.stderr), [n for n, _ in pairs]


def worker_count():
    return env_int(THREADS_VAR, 1)


def _map(func, cells, threads):
    if threads <= 1:
        return [func(cell) for cell in cells]
    pool = ThreadPool(threads)
    try:
        return pool.map(func, cells)
    finally:
        pool.close()
        pool.join()


def rate_sweep(statistic, kernel, family, n_values=DEFAULT_N_GRID, target=None,
               margin=DEFAULT_MARGIN, threads=None):
    '''
    Family maxima of ``statistic`` over ``n_values`` with a fitted slope.

    Args:
        * statistic: one of condition_i, condition_ii, kl, kl_exact, transformation,
          appendix_b_terms
        * kernel: GaussMarkovKernel
        * family: FunctionFamily
        * n_values: increasing n grid
        * target: expected slope, defaults to default_target()
        * margin: pass if |slope - target| <= margin
        * threads: worker threads, defaults to $GMEQUIV_THREADS or 1
    '''
    if statistic not in STATISTICS:
        raise ConfigException('Unknown statistic: "%s", valid statistics are %s'
                              % (statistic, ', '.join(sorted(STATISTICS))))
    n_values = [int(n) for n in n_values]
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ConfigException('n values must be strictly increasing: %s' % n_values)

    func = STATISTICS[statistic]
    cells = [(n, member) for n in n_values for member in family.members(n)]
    if not cells:
        raise ConfigException('Family %s is empty' % family)

    threads = threads or worker_count()
    results = _map(lambda cell: func(kernel, cell[1], cell[0]), cells, threads)

    values = []
    members = []
    excluded = []
    for n in n_values:
        best, best_member = -math.inf, ''
        finite = False
        for (cell_n, member), value in zip(cells, results):
            if cell_n != n:
                continue
            if not np.isfinite(value):
                log.warning('Excluding non-finite %s at n=%d for %s', statistic, n, member.name)
                continue
            finite = True
            if value > best:
                best, best_member = value, member.name
        if not finite:
            excluded.append(n)
            values.append(math.nan)
            members.append('')
        else:
            values.append(float(best))
            members.append(best_member)

    degenerate = all(v == 0 for v in values if np.isfinite(v))
    slope, intercept, stderr, fit_n = (None, None, None, [])
    if not degenerate:
        slope, intercept, stderr, fit_n = fit_slope(n_values, values)

    beta = family.spec.beta if family.spec is not None else None
    if target is None and not degenerate:
        target = default_target(statistic, family.name, beta)

    report = RateReport(statistic=statistic, kernel=kernel.name, family=str(family),
                        n_values=n_values, values=values, members=members, slope=slope,
                        intercept=intercept, stderr=stderr, fit_n=fit_n, excluded=excluded,
                        target=target, margin=margin, degenerate=degenerate)
    log.info('%s on %s over %s: slope %s (target %s)', statistic, kernel.name, family, slope, target)
    return report
