import numpy as np

# Monte Carlo checks allow this many standard errors
BAND = 5


def covariance_standard_error(K, draws):
    '''
    Standard error of the sample covariance of a zero-mean Gaussian pair:
    sqrt((K_ss K_tt + K_st^2) / draws).
    '''
    diagonal = np.diag(K)
    return np.sqrt((np.outer(diagonal, diagonal) + K ** 2) / draws)


def variance_standard_error(variance, draws):
    return variance * np.sqrt(2.0 / (draws - 1))


def empirical_covariance(paths):
    '''
    Second moments of zero-mean paths, one path per row.
    '''
    return paths.T @ paths / paths.shape[0]


def within_band(estimate, expected, stderr):
    return np.all(np.abs(np.asarray(estimate) - expected) <= BAND * np.asarray(stderr))
