'''
Finite function families standing in for the suprema over a smoothness
class. Every statistic reported "over a family" is the maximum over these
members, which is a lower bound for the supremum over the whole class.
'''

import logging

from gmequiv.fourier import FourierFunction, ClassSpec, sample_ellipsoid
from gmequiv.exceptions import ConfigException

log = logging.getLogger(__name__)

RANDOM_MEMBERS = 4

FIXED_FAMILIES = ('zero', 'constant', 'single-freq', 'smooth')
CLASS_FAMILIES = ('extremal', 'random', 'sobolev')
FAMILIES = FIXED_FAMILIES + CLASS_FAMILIES


def smooth_function():
    f = (FourierFunction.constant(0.5)
         + FourierFunction.cosine(1, 1.0)
         + FourierFunction.sine(2, 0.5)
         + FourierFunction.cosine(3, 0.25))
    f.name = 'smooth'
    return f


def extremal_frequencies(n):
    return sorted({1, max(1, n // 2), n, 2 * n})


class FunctionFamily(object):
    '''
    A named family whose members may depend on n.

    Args:
        * name: one of FAMILIES
        * spec: Sobolev class for the class-dependent families
        * seed: seed of the random members
    '''

    def __init__(self, name, spec=None, seed=0, functions=None):
        if functions is None and name not in FAMILIES:
            raise ConfigException('Unknown family: "%s", valid families are %s'
                                  % (name, ', '.join(FAMILIES)))
        if name in CLASS_FAMILIES and spec is None:
            raise ConfigException('Family "%s" needs a Sobolev class (beta, L)' % name)
        if spec is not None and not spec.in_theory_regime:
            log.warning('%s is outside the range covered by the equivalence theorems', spec)
        self.name = name
        self.spec = spec
        self.seed = seed
        self.functions = functions

    @classmethod
    def of(cls, functions, name='custom'):
        return cls(name, functions=list(functions))

    @property
    def degenerate(self):
        return self.name in ('zero', 'constant')

    def members(self, n):
        if self.functions is not None:
            return list(self.functions)
        if self.name == 'zero':
            return [FourierFunction.zero()]
        if self.name == 'constant':
            return [FourierFunction.constant(1.0)]
        if self.name == 'single-freq':
            return [FourierFunction.cosine(1, 1.0, name='cos(2pi x)')]
        if self.name == 'smooth':
            return [smooth_function()]
        if self.name == 'extremal':
            return self._extremal(n)
        if self.name == 'random':
            return self._random(n)
        return self._extremal(n) + self._random(n)

    def _extremal(self, n):
        beta, L = self.spec.beta, self.spec.L
        return [FourierFunction.cosine(k, L * (1.0 + k) ** (-beta), name='extremal(k=%d)' % k)
                for k in extremal_frequencies(n)]

    def _random(self, n):
        return [sample_ellipsoid(self.spec, n, self.seed, stream=j) for j in range(RANDOM_MEMBERS)]

    def __str__(self):
        if self.spec is not None:
            return '%s[%s]' % (self.name, self.spec)
        return self.name


def family(name, beta=None, L=1.0, seed=0):
    spec = None
    if name in CLASS_FAMILIES:
        spec = ClassSpec.sobolev(1.0 if beta is None else beta, L)
    return FunctionFamily(name, spec, seed)
