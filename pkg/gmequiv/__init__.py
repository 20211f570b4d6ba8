'''
Numerical laboratory for the asymptotic equivalence of discrete regression
and continuous observation under Gauss-Markov noise.
'''

__version__ = '0.1.0'
