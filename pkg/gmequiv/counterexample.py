'''
Discrete and continuous observation are not equivalent under the Brownian
bridge.

For f_0 = 0 and f_n = c [1 - e_n / 2 - e_{-n} / 2], c = sqrt(2/3) L n^-beta,
both functions vanish at every design point, so E1 cannot tell them apart,
while the path rule rho_2(Y) = Y_1 - Y_0 recovers int f exactly because the
bridge is pinned at both ends. Under the 0/1 loss for estimating int f any
E1 rule errs with probability at least 1/2 under f_0 or f_n, which bounds
the deficiency from below by 1/4. That last step ranges over all decision
rules and is restated, not computed; what is computed are its premises.
'''

import math
import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from gmequiv import kernel as kernels
from gmequiv import rng as rngs
from gmequiv.experiments import simulate_e1, simulate_e2, default_grid_size
from gmequiv.fourier import FourierFunction
from gmequiv.sampling import sample_process
from gmequiv.util import path_grid
from gmequiv.exceptions import GridMissingEndpoints, ConfigException

log = logging.getLogger(__name__)

LOSS_TOLERANCE = 1e-10
GRID_TOLERANCE = 1e-12
DEFAULT_DRAWS = 200
DEFICIENCY_LOWER_BOUND = 0.25

CONCLUSION = (
    'f_0 and f_n induce the same law of the discrete observations, so every '
    'rule based on them returns the same action distribution under both. Since '
    'int f_0 != int f_n, the action is wrong under at least one of them with '
    'probability >= 1/2 (whichever of the two events carries mass >= 1/2; which '
    'one depends on the rule and has no computational counterpart). rho_2 has '
    'zero risk on the path for both functions, hence the deficiency of the '
    'discrete experiment with respect to the path experiment is at least 1/4.')


@dataclass(frozen=True)
class DecisionProblem:
    '''
    Estimate int_0^1 f under the loss 1{a != int f}, with equality up to
    LOSS_TOLERANCE.
    '''
    tolerance: float = LOSS_TOLERANCE

    def loss(self, integral, action):
        return np.where(np.abs(np.asarray(action) - integral) <= self.tolerance, 0.0, 1.0)

    def risk(self, integral, actions):
        return float(np.mean(self.loss(integral, actions)))


def build_fn(n, beta, L):
    if n < 1 or not beta > 0 or not L > 0:
        raise ConfigException('build_fn needs n >= 1, beta > 0 and L > 0')
    c = math.sqrt(2.0 / 3.0) * L * n ** (-beta)
    return FourierFunction({0: c, n: -c / 2, -n: -c / 2}, name='f_%d' % n)


def rho2(path):
    '''
    h(1) - h(0).
    '''
    grid = np.asarray(path.grid)
    if abs(grid[0]) > GRID_TOLERANCE or abs(grid[-1] - 1) > GRID_TOLERANCE:
        raise GridMissingEndpoints('rho_2 needs a path grid that includes 0 and 1')
    values = np.asarray(path.values)
    return values[..., -1] - values[..., 0]


E1_RULES = {
    'always zero': lambda sample, integral_fn: np.zeros(sample.values.shape[:-1]),
    'always int f_n': lambda sample, integral_fn: np.full(sample.values.shape[:-1], integral_fn),
    'sample mean': lambda sample, integral_fn: np.mean(sample.values, axis=-1),
}


@dataclass
class Premise:
    name: str
    passed: bool
    detail: str

@dataclass
class CounterexampleReport:
    n: int
    beta: float
    L: float
    premises: List[Premise]
    rule_risks: List[dict] = field(default_factory=list)
    conclusion: str = CONCLUSION

    @property
    def passed(self):
        return all(p.passed for p in self.premises)

    def verdict(self):
        return {
            'n': self.n,
            'beta': self.beta,
            'L': self.L,
            'premises': {p.name: p.passed for p in self.premises},
            'rule_risks': self.rule_risks,
            'passed': self.passed,
            'deficiency_lower_bound': DEFICIENCY_LOWER_BOUND if self.passed else None,
            'conclusion': self.conclusion,
        }


def indistinguishability_check(n, beta=1.0, L=1.0, seed=0, draws=DEFAULT_DRAWS, grid_density=20):
    bridge = kernels.brownian_bridge()
    problem = DecisionProblem()
    f0 = FourierFunction.zero()
    fn = build_fn(n, beta, L)
    integral_fn = fn.antiderivative(1.0)
    premises = []

    at_knots = np.asarray(fn.evaluate(np.arange(1, n + 1) / n))
    worst = float(np.max(np.abs(at_knots)))
    premises.append(Premise('f_n vanishes on the design', worst <= 1e-12,
                            'max |f_n(j/n)| = %.3g' % worst))

    expected = math.sqrt(2.0 / 3.0) * L * n ** (-beta)
    premises.append(Premise('int f_n = sqrt(2/3) L n^-beta',
                            abs(integral_fn - expected) <= 1e-12,
                            'int f_n = %.12g' % integral_fn))

    norm_sq = fn.sobolev_norm_sq(beta)
    premises.append(Premise('f_n in Sobolev(beta, L)', norm_sq <= L ** 2,
                            'norm^2 = %.6g, L^2 = %.6g' % (norm_sq, L ** 2)))

    e1_zero = simulate_e1(bridge, f0, n, seed, size=draws)
    e1_fn = simulate_e1(bridge, fn, n, seed, size=draws)
    gap = float(np.max(np.abs(e1_zero.signal - e1_fn.signal)))
    premises.append(Premise('E1 means agree', gap <= 1e-12,
                            'max |mean difference| = %.3g, identical noise law' % gap))

    grid_size = default_grid_size(n, grid_density)
    risks = []
    for f in (f0, fn):
        path = simulate_e2(bridge, f, n, seed, grid_size, size=draws)
        risks.append(problem.risk(f.antiderivative(1.0), rho2(path)))
    premises.append(Premise('rho_2 has zero E2 risk', risks == [0.0, 0.0],
                            'risk under f_0 = %g, under f_n = %g' % tuple(risks)))

    premises.append(Premise('targets differ', abs(integral_fn) > problem.tolerance,
                            '|int f_n - int f_0| = %.6g' % abs(integral_fn)))

    rule_risks = []
    for name, rule in sorted(E1_RULES.items()):
        risk_zero = problem.risk(0.0, rule(e1_zero, integral_fn))
        risk_fn = problem.risk(integral_fn, rule(e1_fn, integral_fn))
        rule_risks.append({'rule': name, 'risk_f0': risk_zero, 'risk_fn': risk_fn,
                           'max_risk': max(risk_zero, risk_fn)})

    return CounterexampleReport(n=n, beta=beta, L=L, premises=premises, rule_risks=rule_risks)


@dataclass
class VarianceCheck:
    variance: float
    expected: float
    stderr: float

    @property
    def within_band(self):
        return abs(self.variance - self.expected) <= 3 * self.stderr


def rho2_variance(kernel, n, seed=0, draws=100000):
    '''
    Monte Carlo variance of rho_2 on pure-noise paths. For the bridge it is 0,
    for Brownian motion 1/n. Only the endpoints matter, so the path is
    simulated on {0, 1}.
    '''
    grid = path_grid(2)
    noise = sample_process(kernel, grid, draws, rngs.generator(seed, rngs.COUNTEREXAMPLE)) / math.sqrt(n)
    values = noise[:, -1] - noise[:, 0]
    expected = float(kernel.covariance(1.0, 1.0)) / n
    variance = float(np.var(values, ddof=1))
    return VarianceCheck(variance=variance, expected=expected,
                         stderr=expected * math.sqrt(2.0 / (draws - 1)))
