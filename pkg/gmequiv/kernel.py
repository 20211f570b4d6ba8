'''
Gauss-Markov processes through their triangular covariance kernels
``K(s, t) = u(min(s, t)) v(max(s, t))`` on [0, 1].

A kernel carries the time change ``q = u / v``, the derivatives ``q'`` and
``v'`` (analytic for presets, central differences for custom expressions) and
a handful of flags describing which of the regularity conditions it meets.
Kernels are immutable and safe to share between workers.
'''

import logging
from dataclasses import dataclass, field
from functools import wraps
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from gmequiv.expression import KernelExpression
from gmequiv.exceptions import (
    AssumptionViolation, DivisionByZero, KernelException, ConfigException)

log = logging.getLogger(__name__)

PRESETS = ('bm', 'ou', 'bridge', 'slepian')

FD_STEP = 1e-6
VALIDATION_GRID = 1001
Q0_TOLERANCE = 1e-10
ZERO_TOLERANCE = 1e-12


def vectorized(func):
    '''
    Accept scalars or arrays, return a float for scalar input. Division by
    zero yields inf rather than a warning.
    '''
    @wraps(func)
    def wrapper(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            value = np.asarray(func(t), dtype=float) + np.zeros_like(t)
        if value.ndim == 0:
            return float(value)
        return value
    return wrapper


@dataclass(frozen=True, eq=False)
class GaussMarkovKernel:
    name: str
    u: Callable
    v: Callable
    q: Callable
    q_prime: Callable
    v_prime: Callable
    horizon_T: float
    v_positive_on_closed_interval: bool
    v1_nonzero: bool
    q_prime_bounded_away_from_zero: bool
    q_second: Optional[Callable] = None
    preset: Optional[str] = None
    params: dict = field(default_factory=dict)
    u_source: Optional[str] = None
    v_source: Optional[str] = None

    @property
    def analytic_derivatives(self):
        return self.preset is not None

    def covariance(self, s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        _check_domain(s, self.name)
        _check_domain(t, self.name)
        value = np.asarray(self.u(np.minimum(s, t))) * np.asarray(self.v(np.maximum(s, t)))
        if np.ndim(value) == 0:
            return float(value)
        return value

    def gram(self, points):
        points = np.asarray(points, dtype=float)
        s, t = np.meshgrid(points, points, indexing='ij')
        return self.covariance(s, t)

    def q_inverse(self, x, iterations=60):
        '''
        Inverse time change by bisection on [0, 1]. q is strictly increasing,
        so every x in [0, T] has exactly one preimage.
        '''
        x = np.asarray(x, dtype=float)
        lo = np.zeros_like(x)
        hi = np.ones_like(x)
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            below = np.asarray(self.q(mid)) < x
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        result = 0.5 * (lo + hi)
        if result.ndim == 0:
            return float(result)
        return result

    def require_v1_nonzero(self, operation):
        if not self.v1_nonzero:
            raise KernelException(
                '%s requires v(1) != 0, which this kernel does not satisfy' % operation,
                self.name)

    def to_spec(self):
        if self.preset:
            spec = {'preset': self.preset}
            if self.params:
                spec['params'] = dict(self.params)
            return spec
        return {'name': self.name, 'u': self.u_source, 'v': self.v_source}

    def __str__(self):
        return self.name


def _check_domain(t, kernel_name):
    if np.any(t < -ZERO_TOLERANCE) or np.any(t > 1 + ZERO_TOLERANCE):
        raise KernelException('Time outside [0, 1]', kernel_name)


def finite_difference(func, h=FD_STEP):
    '''
    Central differences in the interior and second order one-sided stencils
    within h of either endpoint. Stencil points never leave [0, 1].
    '''
    def derivative(t):
        forward = t < h
        backward = t > 1 - h
        clip = lambda x: np.clip(x, 0.0, 1.0)

        central = (func(clip(t + h)) - func(clip(t - h))) / (2 * h)
        ahead = (-3 * func(clip(t)) + 4 * func(clip(t + h)) - func(clip(t + 2 * h))) / (2 * h)
        behind = (3 * func(clip(t)) - 4 * func(clip(t - h)) + func(clip(t - 2 * h))) / (2 * h)
        return np.where(forward, ahead, np.where(backward, behind, central))
    return vectorized(derivative)


def _flags(u, v, q, q_prime, grid_size=VALIDATION_GRID):
    grid = np.linspace(0, 1, grid_size)
    v_values = np.asarray(v(grid))
    q_prime_values = np.asarray(q_prime(grid[:-1]))
    return dict(
        v_positive_on_closed_interval=bool(np.all(v_values > ZERO_TOLERANCE)),
        v1_nonzero=bool(abs(v_values[-1]) > ZERO_TOLERANCE),
        q_prime_bounded_away_from_zero=bool(np.all(q_prime_values > ZERO_TOLERANCE)),
    )


def _check_assumption(name, u, v, q, grid_size=VALIDATION_GRID):
    grid = np.linspace(0, 1, grid_size)
    uv = np.asarray(u(grid)) * np.asarray(v(grid))
    if np.any(uv < -ZERO_TOLERANCE):
        witness = grid[np.argmin(uv)]
        raise AssumptionViolation('u*v is negative at t=%.6g' % witness, name)
    if np.any(uv[1:-1] <= 0):
        witness = grid[1:-1][np.argmin(uv[1:-1])]
        raise AssumptionViolation('u*v vanishes in the interior at t=%.6g' % witness, name)

    q_values = np.asarray(q(grid))
    if not abs(q_values[0]) <= Q0_TOLERANCE:
        raise AssumptionViolation(
            'q(0) = %.6g, expected 0 (condition the process on zero first)' % q_values[0], name)
    increments = np.diff(q_values)
    bad = ~(increments > 0)
    if np.any(bad):
        witness = grid[1:][np.argmax(bad)]
        raise AssumptionViolation('q is not strictly increasing at t=%.6g' % witness, name)


def _build(name, u, v, q, q_prime, v_prime, q_second=None, preset=None, params=None,
           u_source=None, v_source=None, check=True):
    if check:
        _check_assumption(name, u, v, q)
    horizon_T = q(1.0)
    flags = _flags(u, v, q, q_prime)
    kernel = GaussMarkovKernel(
        name=name, u=u, v=v, q=q, q_prime=q_prime, v_prime=v_prime,
        horizon_T=horizon_T, q_second=q_second, preset=preset,
        params=params or {}, u_source=u_source, v_source=v_source, **flags)
    log.debug('Built kernel %s (T=%g, flags=%s)', name, horizon_T, flags)
    return kernel


def brownian_motion():
    return _build(
        'bm',
        u=vectorized(lambda t: t),
        v=vectorized(lambda t: np.ones_like(t)),
        q=vectorized(lambda t: t),
        q_prime=vectorized(lambda t: np.ones_like(t)),
        v_prime=vectorized(lambda t: np.zeros_like(t)),
        q_second=vectorized(lambda t: np.zeros_like(t)),
        preset='bm', u_source='t', v_source='1')


def ornstein_uhlenbeck(L=1.0):
    L = float(L)
    if not L > 0:
        raise ConfigException('Ornstein-Uhlenbeck rate L must be positive, got %s' % L)
    return _build(
        'ou(L=%g)' % L,
        u=vectorized(lambda t: np.exp(L * t) - np.exp(-L * t)),
        v=vectorized(lambda t: np.exp(-L * t)),
        q=vectorized(lambda t: np.expm1(2 * L * t)),
        q_prime=vectorized(lambda t: 2 * L * np.exp(2 * L * t)),
        v_prime=vectorized(lambda t: -L * np.exp(-L * t)),
        q_second=vectorized(lambda t: 4 * L * L * np.exp(2 * L * t)),
        preset='ou', params={'L': L},
        u_source='exp(%r*t) - exp(-%r*t)' % (L, L), v_source='exp(-%r*t)' % L)


def brownian_bridge():
    return _build(
        'bridge',
        u=vectorized(lambda t: t),
        v=vectorized(lambda t: 1 - t),
        q=vectorized(lambda t: t / (1 - t)),
        q_prime=vectorized(lambda t: 1 / (1 - t) ** 2),
        v_prime=vectorized(lambda t: -np.ones_like(t)),
        q_second=vectorized(lambda t: 2 / (1 - t) ** 3),
        preset='bridge', u_source='t', v_source='1 - t')


def slepian():
    return _build(
        'slepian',
        u=vectorized(lambda t: t),
        v=vectorized(lambda t: 2 - t),
        q=vectorized(lambda t: t / (2 - t)),
        q_prime=vectorized(lambda t: 2 / (2 - t) ** 2),
        v_prime=vectorized(lambda t: -np.ones_like(t)),
        q_second=vectorized(lambda t: 4 / (2 - t) ** 3),
        preset='slepian', u_source='t', v_source='2 - t')


def preset(name, **params):
    if name == 'bm':
        return brownian_motion()
    if name == 'ou':
        return ornstein_uhlenbeck(params.get('L', 1.0))
    if name == 'bridge':
        return brownian_bridge()
    if name == 'slepian':
        return slepian()
    raise ConfigException('Unknown preset: "%s", valid presets are %s' % (name, ', '.join(PRESETS)))


def _expression(source):
    if isinstance(source, KernelExpression):
        return source
    return KernelExpression.parse(source)


def make_kernel(u_src, v_src=None, name=None, check=True, **params):
    '''
    Build a kernel from two expressions in t, or from a preset name (in
    which case ``v_src`` is omitted and ``params`` go to the preset).
    With ``check=False`` a custom kernel that violates the assumption is
    built anyway, for validate_assumption() to report on.
    '''
    if v_src is None:
        return preset(u_src, **params)

    u_expr = _expression(u_src)
    v_expr = _expression(v_src)
    u = vectorized(u_expr)
    v = vectorized(v_expr)
    q = vectorized(lambda t: np.asarray(u_expr(t)) / np.asarray(v_expr(t)))
    log.debug('Custom kernel %s uses finite differences with h=%g', name or 'custom', FD_STEP)
    return _build(
        name or 'custom', u=u, v=v, q=q,
        q_prime=finite_difference(q), v_prime=finite_difference(v),
        u_source=str(u_expr), v_source=str(v_expr), check=check)


def condition_on_zero(U_src, V_src, name=None, check=True):
    '''
    Condition a Gauss-Markov process with kernel U(s)V(t) on starting at
    zero: u = U - Q(0) V with Q(0) = U(0) / V(0).
    '''
    U = _expression(U_src)
    V = _expression(V_src)
    V0 = V(0.0)
    if V0 == 0:
        raise DivisionByZero('V(0) = 0, so Q(0) = U(0) / V(0) is undefined', name)
    Q0 = U(0.0) / V0
    if Q0 == 0:
        u = U
    else:
        u = U - KernelExpression.constant(Q0) * V
    return make_kernel(u, V, name=name, check=check)


def kernel_from_spec(spec, check=True):
    '''
    Kernel from its JSON description, either
    ``{"preset": "ou", "params": {"L": 2}}``, ``{"name": .., "u": .., "v": ..}``
    or ``{"name": .., "U": .., "V": ..}`` (conditioned on zero).
    '''
    if not isinstance(spec, dict):
        raise ConfigException('Kernel spec is not an object: "%s"' % (spec,))

    if 'preset' in spec:
        invalid = set(spec) - {'preset', 'params'}
        if invalid:
            raise ConfigException('Invalid fields: %s' % ', '.join(sorted(invalid)), field='kernel')
        return preset(spec['preset'], **(spec.get('params') or {}))

    if 'U' in spec and 'V' in spec:
        return condition_on_zero(spec['U'], spec['V'], name=spec.get('name'), check=check)

    if 'u' in spec and 'v' in spec:
        invalid = set(spec) - {'name', 'u', 'v'}
        if invalid:
            raise ConfigException('Invalid fields: %s' % ', '.join(sorted(invalid)), field='kernel')
        return make_kernel(spec['u'], spec['v'], name=spec.get('name'), check=check)

    raise ConfigException('Kernel spec needs either "preset" or both "u" and "v"', field='kernel')


def parse_preset(value):
    '''
    Command line preset syntax: ``bm``, ``bridge``, ``slepian``, ``ou`` or
    ``ou:L``.
    '''
    name, _, param = value.partition(':')
    if name not in PRESETS:
        raise ConfigException('Unknown preset: "%s", valid presets are %s' % (name, ', '.join(sorted(PRESETS))))
    if not param:
        return {'preset': name}
    if name != 'ou':
        raise ConfigException('Preset "%s" takes no parameter' % name)
    try:
        L = float(param)
    except ValueError:
        raise ConfigException('Invalid Ornstein-Uhlenbeck rate: "%s"' % param)
    return {'preset': 'ou', 'params': {'L': L}}


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: str
    informational: bool = False

@dataclass
class ValidationReport:
    kernel_name: str
    grid_size: int
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks if not c.informational)

    def failures(self):
        return [c.name for c in self.checks if not c.passed and not c.informational]

    def to_dict(self):
        return {
            'kernel': self.kernel_name,
            'grid_size': self.grid_size,
            'passed': self.passed,
            'checks': [{'name': c.name, 'passed': c.passed, 'witness': c.witness,
                        'informational': c.informational} for c in self.checks],
        }


def hoelder_index(values, step):
    '''
    Estimate the Hoelder index of a sampled function from the slope of
    log-oscillation against log-lag over dyadic lags. Returns None when the
    function is constant on the grid.
    '''
    values = np.asarray(values, dtype=float)
    lags = []
    lag = 1
    while lag <= (len(values) - 1) // 4:
        lags.append(lag)
        lag *= 2
    if len(lags) < 2:
        return None

    oscillations = np.array([np.max(np.abs(values[m:] - values[:-m])) for m in lags])
    if np.all(oscillations <= ZERO_TOLERANCE * max(1.0, np.max(np.abs(values)))):
        return None
    positive = oscillations > 0
    slope, _ = np.polyfit(np.log(np.array(lags)[positive] * step), np.log(oscillations[positive]), 1)
    return float(min(max(slope, 0.0), 1.0))


def _finite_prefix(values):
    finite = np.isfinite(values)
    if np.all(finite):
        return values
    return values[:np.argmin(finite)]


def validate_assumption(kernel, grid_size=VALIDATION_GRID):
    if grid_size < 3:
        raise ConfigException('grid_size must be at least 3, got %d' % grid_size)

    grid = np.linspace(0, 1, grid_size)
    u = np.asarray(kernel.u(grid))
    v = np.asarray(kernel.v(grid))
    q = np.asarray(kernel.q(grid))
    q_prime = np.asarray(kernel.q_prime(grid))
    v_prime = np.asarray(kernel.v_prime(grid))
    uv = u * v
    checks = []

    i = int(np.argmin(uv))
    checks.append(CheckResult('u*v >= 0', bool(uv[i] >= -ZERO_TOLERANCE),
                              'min %.6g at t=%.6g' % (uv[i], grid[i])))

    interior = uv[1:-1]
    i = int(np.argmin(interior))
    checks.append(CheckResult('u*v > 0 on (0,1)', bool(interior[i] > 0),
                              'min %.6g at t=%.6g' % (interior[i], grid[i + 1])))

    checks.append(CheckResult('q(0) = 0', bool(abs(q[0]) <= Q0_TOLERANCE), 'q(0)=%.6g' % q[0]))

    with np.errstate(invalid='ignore'):
        increments = np.diff(q)
    bad = ~(increments > 0)
    if np.any(bad):
        witness = 'not increasing at t=%.6g' % grid[1:][np.argmax(bad)]
    else:
        witness = 'q(1)=%.6g' % q[-1]
    checks.append(CheckResult('q strictly increasing', not bool(np.any(bad)), witness))

    checks.append(CheckResult('v(1) != 0', bool(abs(v[-1]) > ZERO_TOLERANCE), 'v(1)=%.6g' % v[-1]))

    i = int(np.argmin(v))
    checks.append(CheckResult('inf v > 0', bool(v[i] > ZERO_TOLERANCE),
                              'min %.6g at t=%.6g' % (v[i], grid[i])))

    lower, upper = np.min(q_prime), np.max(q_prime)
    checks.append(CheckResult('q\' bounded in (0, inf)',
                              bool(lower > ZERO_TOLERANCE and np.isfinite(upper)),
                              '[%.6g, %.6g]' % (lower, upper)))

    step = grid[1] - grid[0]
    for label, values in (('v\'', v_prime), ('q\'', q_prime)):
        index = hoelder_index(_finite_prefix(values), step)
        if index is None:
            witness = 'constant on grid'
        else:
            witness = 'estimated index %.3f' % index
        checks.append(CheckResult('Hoelder index of %s' % label, True, witness, informational=True))

    return ValidationReport(kernel.name, grid_size, checks)


def gram_min_eigenvalue(kernel, points):
    return float(scipy.linalg.eigvalsh(kernel.gram(points))[0])
