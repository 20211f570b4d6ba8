'''
Real functions on [0, 1] as finite Fourier series

    f(t) = sum_{|k| <= K} theta_k e_k(t),   e_k(t) = exp(-2 pi i k t),

with Hermitian coefficients theta_{-k} = conj(theta_k), plus the two
smoothness classes the rate sweeps work with.
'''

import math
import logging
from dataclasses import dataclass

import numpy as np

from gmequiv import rng as rngs
from gmequiv.exceptions import HermitianViolation, ConfigException

log = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-12
ELLIPSOID_FILL = 0.95
ELLIPSOID_EXCESS = 0.1
# entries of the largest (points x frequencies) phase block
BLOCK_ENTRIES = 1 << 18


def _phases(t, ks):
    return np.exp(-2j * math.pi * np.outer(t, ks))


def _blocked(count, width, block):
    '''
    block(rows) over row slices of at most BLOCK_ENTRIES / width rows,
    concatenated.
    '''
    step = max(1, BLOCK_ENTRIES // max(1, width))
    parts = [block(slice(start, start + step)) for start in range(0, count, step)]
    if not parts:
        return np.zeros(0, dtype=complex)
    return np.concatenate(parts)


class FourierFunction(object):

    def __init__(self, coeffs, name=None):
        '''
        Args:
            * coeffs: mapping k -> theta_k. Missing negative frequencies are
              completed as conjugates of the positive ones.
            * name: label used in reports
        '''
        coeffs = {int(k): complex(v) for k, v in dict(coeffs).items()}
        for k, theta in list(coeffs.items()):
            if -k not in coeffs:
                coeffs[-k] = theta.conjugate()
            elif abs(coeffs[-k] - theta.conjugate()) > HERMITIAN_TOLERANCE * max(1.0, abs(theta)):
                raise HermitianViolation(
                    'theta_%d = %r is not the conjugate of theta_%d = %r' % (-k, coeffs[-k], k, theta))

        if 0 in coeffs:
            theta0 = coeffs[0]
            if abs(theta0.imag) > HERMITIAN_TOLERANCE * max(1.0, abs(theta0)):
                raise HermitianViolation('theta_0 = %r is not real' % theta0)
            coeffs[0] = complex(theta0.real, 0)

        self.K = max([abs(k) for k in coeffs] + [0])
        self.ks = np.arange(-self.K, self.K + 1)
        self.theta = np.zeros(2 * self.K + 1, dtype=complex)
        for k, theta in coeffs.items():
            self.theta[k + self.K] = theta
        # enforce exact symmetry after the tolerance check
        self.theta = 0.5 * (self.theta + np.conj(self.theta[::-1]))
        self.name = name or 'fourier(K=%d)' % self.K

    @classmethod
    def zero(cls):
        return cls({0: 0.0}, name='zero')

    @classmethod
    def constant(cls, c):
        return cls({0: c}, name='constant(%g)' % c)

    @classmethod
    def cosine(cls, k, amplitude=1.0, name=None):
        '''
        amplitude * cos(2 pi k x)
        '''
        k = abs(int(k))
        if k == 0:
            return cls({0: amplitude}, name=name)
        return cls({k: amplitude / 2.0, -k: amplitude / 2.0},
                   name=name or '%g*cos(2pi*%dx)' % (amplitude, k))

    @classmethod
    def sine(cls, k, amplitude=1.0, name=None):
        '''
        amplitude * sin(2 pi k x)
        '''
        k = abs(int(k))
        return cls({k: 0.5j * amplitude, -k: -0.5j * amplitude},
                   name=name or '%g*sin(2pi*%dx)' % (amplitude, k))

    def coefficient(self, k):
        if abs(k) > self.K:
            return 0j
        return complex(self.theta[k + self.K])

    def items(self):
        return [(int(k), complex(theta)) for k, theta in zip(self.ks, self.theta) if theta != 0]

    def __add__(self, other):
        coeffs = dict(self.items())
        for k, theta in other.items():
            coeffs[k] = coeffs.get(k, 0j) + theta
        return FourierFunction(coeffs or {0: 0.0}, name='%s + %s' % (self.name, other.name))

    def scaled(self, c, name=None):
        return FourierFunction({k: c * theta for k, theta in self.items()} or {0: 0.0},
                               name=name or '%g*%s' % (c, self.name))

    def truncate(self, K):
        '''
        Frequencies |k| <= K.
        '''
        coeffs = {k: theta for k, theta in self.items() if abs(k) <= K}
        return FourierFunction(coeffs or {0: 0.0}, name='%s|K<=%d' % (self.name, K))

    def tail(self, K):
        '''
        Frequencies |k| > K.
        '''
        coeffs = {k: theta for k, theta in self.items() if abs(k) > K}
        return FourierFunction(coeffs or {0: 0.0}, name='%s|K>%d' % (self.name, K))

    def _nonzero(self):
        mask = self.ks != 0
        return self.ks[mask], self.theta[mask]

    def _real(self, values):
        residue = np.max(np.abs(values.imag)) if values.size else 0.0
        scale = max(1.0, self.sup_norm_bound())
        if residue > HERMITIAN_TOLERANCE * scale:
            raise HermitianViolation('Imaginary residue %.3g in evaluation of %s' % (residue, self.name))
        return values.real

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        ks, theta = self._nonzero()
        value = np.full(flat.shape, self.coefficient(0))
        if len(ks):
            value = value + _blocked(len(flat), len(ks), lambda rows: _phases(flat[rows], ks) @ theta)
        value = self._real(value).reshape(t.shape)
        if value.ndim == 0:
            return float(value)
        return value

    __call__ = evaluate

    def antiderivative(self, t):
        '''
        F_f(t) = int_0^t f, in closed form.
        '''
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        ks, theta = self._nonzero()
        value = self.coefficient(0) * flat.astype(complex)
        if len(ks):
            weights = theta / (-2j * math.pi * ks)
            value = value + _blocked(len(flat), len(ks), lambda rows: (_phases(flat[rows], ks) - 1) @ weights)
        value = self._real(value).reshape(t.shape)
        if value.ndim == 0:
            return float(value)
        return value

    def cell_averages(self, n):
        '''
        n * int_{(i-1)/n}^{i/n} f for i = 1..n. The constant term passes
        through unchanged so constants have exact cell averages.
        '''
        edges = np.arange(n + 1) / n
        ks, theta = self._nonzero()
        value = np.full(n, self.coefficient(0))
        if len(ks):
            weights = theta / (-2j * math.pi * ks)
            upper, lower = edges[1:], edges[:-1]
            value = value + n * _blocked(n, len(ks), lambda rows: (
                _phases(upper[rows], ks) - _phases(lower[rows], ks)) @ weights)
        return self._real(value)

    def cell_average(self, i, n):
        if not 1 <= i <= n:
            raise ValueError('Cell index %d outside 1..%d' % (i, n))
        return float(self.cell_averages(n)[i - 1])

    def sobolev_norm_sq(self, beta):
        return float(np.sum((1.0 + np.abs(self.ks)) ** (2 * beta) * np.abs(self.theta) ** 2))

    def l2_norm_sq(self):
        return float(np.sum(np.abs(self.theta) ** 2))

    def sup_norm_bound(self):
        return float(np.sum(np.abs(self.theta)))

    def to_spec(self):
        return {'coeffs': [[k, theta.real, theta.imag] for k, theta in self.items() if k >= 0]}

    def __repr__(self):
        return 'FourierFunction(%s)' % self.name


def function_from_spec(spec, name=None):
    '''
    ``{"coeffs": [[k, re, im], ...]}``; negative frequencies not listed are
    completed by conjugation.
    '''
    if not isinstance(spec, dict) or 'coeffs' not in spec:
        raise ConfigException('Function spec needs a "coeffs" list', field='fn')
    invalid = set(spec) - {'coeffs', 'name'}
    if invalid:
        raise ConfigException('Invalid fields: %s' % ', '.join(sorted(invalid)), field='fn')

    coeffs = {}
    for entry in spec['coeffs']:
        try:
            k, re_part, im_part = entry
            coeffs[int(k)] = complex(float(re_part), float(im_part))
        except (TypeError, ValueError):
            raise ConfigException('Coefficient entries are [k, re, im], got %r' % (entry,), field='fn')
    return FourierFunction(coeffs or {0: 0.0}, name=name or spec.get('name'))


@dataclass(frozen=True)
class ClassSpec:
    kind: str
    L: float
    beta: float = None
    alpha: float = None
    M: float = math.inf

    def __post_init__(self):
        if self.kind not in ('sobolev', 'hoelder'):
            raise ConfigException('Unknown function class: "%s"' % self.kind)
        if not self.L > 0:
            raise ConfigException('L must be positive, got %s' % self.L)
        if self.kind == 'sobolev' and not (self.beta is not None and self.beta > 0):
            raise ConfigException('Sobolev classes need beta > 0')
        if self.kind == 'hoelder':
            if not (self.alpha is not None and self.alpha > 0):
                raise ConfigException('Hoelder classes need alpha > 0')
            if not self.M > 0:
                raise ConfigException('M must be positive, got %s' % self.M)

    @classmethod
    def sobolev(cls, beta, L):
        return cls('sobolev', L=float(L), beta=float(beta))

    @classmethod
    def hoelder(cls, alpha, L, M=math.inf):
        return cls('hoelder', L=float(L), alpha=float(alpha), M=float(M))

    @property
    def in_theory_regime(self):
        '''
        Whether the equivalence theorems cover these parameters.
        '''
        if self.kind == 'sobolev':
            return self.beta > 0.5
        return 0.5 < self.alpha <= 1

    def contains(self, f):
        if self.kind != 'sobolev':
            raise ConfigException('Exact membership is only decidable for Sobolev ellipsoids')
        return f.sobolev_norm_sq(self.beta) <= self.L ** 2

    def __str__(self):
        if self.kind == 'sobolev':
            return 'sobolev(beta=%g, L=%g)' % (self.beta, self.L)
        return 'hoelder(alpha=%g, L=%g, M=%g)' % (self.alpha, self.L, self.M)


def sample_ellipsoid(spec, K, seed, stream=0):
    '''
    Random member of the Sobolev ellipsoid with |theta_k| proportional to
    U * (1 + |k|)^(-beta - 1/2 - 0.1) and uniform phases, scaled to 95% of
    the ellipsoid radius. Coefficients are drawn frequency by frequency, so
    the first K' coefficients of a draw with K >= K' agree up to scaling.
    '''
    if spec.kind != 'sobolev':
        raise ConfigException('sample_ellipsoid needs a Sobolev class, got %s' % spec)

    rng = rngs.generator(seed, rngs.ELLIPSOID, stream)
    theta0 = rng.uniform(-1, 1)
    draws = rng.uniform(size=(K, 2))
    ks = np.arange(1, K + 1)
    amplitude = draws[:, 0] * (1.0 + ks) ** (-spec.beta - 0.5 - ELLIPSOID_EXCESS)
    phase = 2 * math.pi * draws[:, 1]

    coeffs = {0: theta0}
    coeffs.update({int(k): a * np.exp(1j * p) for k, a, p in zip(ks, amplitude, phase)})
    f = FourierFunction(coeffs, name='ellipsoid(seed=%d, stream=%d)' % (seed, stream))

    norm_sq = f.sobolev_norm_sq(spec.beta)
    scale = math.sqrt(ELLIPSOID_FILL * spec.L ** 2 / norm_sq)
    return f.scaled(scale, name=f.name)


@dataclass
class HoelderReport:
    alpha: float
    L: float
    M: float
    constant: float
    sup_norm: float
    grid: int
    lower_bound: bool = True

    @property
    def refuted(self):
        return self.constant > self.L or self.sup_norm > self.M

    @property
    def member(self):
        '''
        Not refuted on this grid. The estimates are lower bounds for the true
        suprema, so this never certifies membership.
        '''
        return not self.refuted

    def to_dict(self):
        return {'alpha': self.alpha, 'L': self.L, 'M': self.M, 'constant': self.constant,
                'sup_norm': self.sup_norm, 'grid': self.grid, 'lower_bound': self.lower_bound,
                'member': self.member}


def hoelder_check(f, spec, grid=10000):
    if spec.kind != 'hoelder':
        raise ConfigException('hoelder_check needs a Hoelder class, got %s' % spec)
    if grid < 2:
        raise ConfigException('Hoelder grid needs at least 2 points')

    x = np.linspace(0, 1, grid)
    values = np.asarray(f.evaluate(x))
    step = 1.0 / (grid - 1)
    constant = 0.0
    for lag in range(1, grid):
        increments = np.abs(values[lag:] - values[:-lag])
        constant = max(constant, float(np.max(increments)) / (lag * step) ** spec.alpha)

    return HoelderReport(alpha=spec.alpha, L=spec.L, M=spec.M, constant=constant,
                         sup_norm=float(np.max(np.abs(values))), grid=grid)
