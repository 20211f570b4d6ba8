'''
Counter-based random streams.

Every random draw in the package comes from a Philox generator keyed by
``(seed, *stream)``. The same key gives bit-identical draws regardless of
how many workers a sweep uses or in which order cells are evaluated.
'''

import numpy as np

# stream ids, so that independent draws sharing a seed never overlap
PROCESS = 0
RESIDUAL = 1
ELLIPSOID = 2
COUNTEREXAMPLE = 3


def generator(seed, *stream):
    '''
    Philox generator for the given seed and stream path.
    '''
    if seed is None:
        raise ValueError('Simulations need an explicit seed')
    entropy = [int(seed)] + [int(s) for s in stream]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def as_generator(rng, *stream):
    if isinstance(rng, np.random.Generator):
        return rng
    return generator(rng, *stream)
