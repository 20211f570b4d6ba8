'''
Equivalence statistics: the two sufficient conditions, the exact KL
divergence between E1 and E1', the Fourier decomposition of the
discretisation error and the discrepancy of the transformed experiments.
All statistics are deterministic functions of (kernel, f, n).
'''

import math
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from gmequiv import rkhs
from gmequiv.util import knots
from gmequiv.exceptions import DegenerateCell, KernelDegenerate

log = logging.getLogger(__name__)

_warned_second_derivative = set()


def discretisation_errors(f, n):
    '''
    f(t_i) - n int_cell f for i = 1..n.
    '''
    return np.asarray(f.evaluate(knots(n)[1:])) - f.cell_averages(n)


def _cells(kernel, n):
    '''
    v(t_i) and q(t_i) - q(t_{i-1}) for i = 1..n.
    '''
    t = knots(n)
    v = np.asarray(kernel.v(t[1:]))
    q = np.asarray(kernel.q(t))
    if np.any(v == 0):
        raise KernelDegenerate('v(t_i) = 0 at t=%.6g' % t[1:][np.argmin(np.abs(v))], kernel.name)
    dq = np.diff(q)
    bad = ~(dq > 0) | ~np.isfinite(dq)
    if np.any(bad):
        i = int(np.argmax(bad)) + 1
        raise DegenerateCell('Cell %d has q(t_i) - q(t_{i-1}) = %r' % (i, dq[i - 1]), i, kernel.name)
    return v, dq


def _weighted_sum(kernel, f, n):
    '''
    sum_i (f(t_i) - n int_cell f)^2 / [v(t_i)^2 (q(t_i) - q(t_{i-1}))]
    '''
    v, dq = _cells(kernel, n)
    errors = discretisation_errors(f, n)
    return float(np.sum(errors ** 2 / (v ** 2 * dq)))


def condition_i_statistic(kernel, f, n):
    return _weighted_sum(kernel, f, n) / n


def kl_e1_vs_e1prime(kernel, f, n):
    '''
    KL divergence between E1 and E1' by the chain rule over the noise
    filtration: each observation contributes (mean gap)^2 over twice its
    conditional variance n v(t_i)^2 (q(t_i) - q(t_{i-1})). Equals kl_exact()
    when v is constant on the knots and differs from it otherwise.
    '''
    return _weighted_sum(kernel, f, n) / (2 * n)


def kl_exact(kernel, f, n):
    '''
    Exact KL divergence between E1 and E1' in O(n). With S_j the partial sums
    of the observations, S_j / v(t_j) - S_{j-1} / v(t_{j-1}) has independent
    noise of variance n (q(t_j) - q(t_{j-1})).
    '''
    v, dq = _cells(kernel, n)
    whitened = np.diff(np.cumsum(discretisation_errors(f, n)) / v, prepend=0.0)
    return float(np.sum(whitened ** 2 / dq)) / (2 * n)


def gaussian_kl(mean_a, mean_b, covariance):
    '''
    KL(N(a, C) || N(b, C)) = (a - b)^T C^{-1} (a - b) / 2.
    '''
    delta = np.atleast_1d(np.asarray(mean_a, dtype=float) - np.asarray(mean_b, dtype=float))
    covariance = np.atleast_2d(np.asarray(covariance, dtype=float))
    factor = scipy.linalg.cho_factor(covariance)
    return 0.5 * float(delta @ scipy.linalg.cho_solve(factor, delta))


def noise_covariance(kernel, n):
    '''
    Covariance of (sqrt(n) xi_i)_i: n D Sigma D^T with Sigma the Gram matrix
    on the knots and D the differencing matrix (Xi_0 = 0).
    '''
    sigma = kernel.gram(knots(n)[1:])
    D = np.eye(n) - np.eye(n, k=-1)
    return n * D @ sigma @ D.T


def kl_dense_oracle(kernel, f, n):
    return gaussian_kl(np.asarray(f.evaluate(knots(n)[1:])), f.cell_averages(n),
                       noise_covariance(kernel, n))


def condition_ii_statistic(kernel, f, n):
    return math.sqrt(n) * math.sqrt(rkhs.projection_distance(kernel, f, n))


def direct_dft(x):
    '''
    F_j = (1/n) sum_{k=1}^n x_k exp(-2 pi i k j / n) for j = 1..n, as a
    plain O(n^2) sum.
    '''
    x = np.asarray(x)
    n = len(x)
    k = np.arange(1, n + 1)
    return np.exp(-2j * math.pi * np.outer(k, k) / n) @ x / n


def aliased_spectrum(f, n):
    '''
    DFT of the discretisation errors of f (|k| <= n) in closed form:

        F_j = sum_{l = -j (mod n), 0 < |l| <= n} theta_l c_l,
        c_l = 1 + n (1 - exp(2 pi i l / n)) / (2 pi i l).
    '''
    result = np.zeros(n, dtype=complex)
    for j in range(1, n + 1):
        if j == n:
            aliases = (n, -n)
        else:
            aliases = (n - j, -j)
        for l in aliases:
            theta = f.coefficient(l)
            if l == 0 or theta == 0:
                continue
            c = 1 + n * (1 - np.exp(2j * math.pi * l / n)) / (2j * math.pi * l)
            result[j - 1] += theta * c
    return result


def hd4_bound(f, n, beta):
    '''
    2 pi^2 ||f||_beta^2 max(1/n, n^(1 - 2 beta)), an upper bound for the
    squared discretisation errors of any f with frequencies |k| <= n.
    '''
    return 2 * math.pi ** 2 * f.sobolev_norm_sq(beta) * max(1.0 / n, float(n) ** (1 - 2 * beta))


@dataclass
class ErrorDecomposition:
    n: int
    a_sum: float
    b_sum: float
    c_sum: float
    total: float
    parseval_residual: float
    spectral_residual: float
    hd4_bound: Optional[float] = None

    @property
    def terms(self):
        return self.a_sum + self.b_sum + self.c_sum

    @property
    def hd7_holds(self):
        return self.total <= 3 * self.terms * (1 + 1e-12) + 1e-300

    @property
    def hd4_holds(self):
        if self.hd4_bound is None:
            return None
        return self.a_sum <= self.hd4_bound * (1 + 1e-12)

    def to_dict(self):
        return {
            'n': self.n, 'a_sum': self.a_sum, 'b_sum': self.b_sum, 'c_sum': self.c_sum,
            'total': self.total, 'parseval_residual': self.parseval_residual,
            'spectral_residual': self.spectral_residual, 'hd7_holds': self.hd7_holds,
            'hd4_bound': self.hd4_bound, 'hd4_holds': self.hd4_holds,
        }


def appendix_b_decomposition(f, n, beta=None):
    '''
    Split the discretisation error at cutoff K = n:

    * A_i = f_K(t_i) - n int_cell f_K (frequencies |k| <= n),
    * B_i = tail(t_i), C_i = n int_cell tail (frequencies |k| > n),

    so that f(t_i) - n int_cell f = A_i + B_i - C_i. Also checks discrete
    Parseval for the A signal and compares its direct DFT with the closed
    form aliasing sum.
    '''
    head = f.truncate(n)
    tail = f.tail(n)
    t = knots(n)[1:]

    A = discretisation_errors(head, n)
    B = np.asarray(tail.evaluate(t))
    C = tail.cell_averages(n)
    total = float(np.sum(discretisation_errors(f, n) ** 2))

    spectrum = direct_dft(A)
    parseval_residual = float(np.sum(A ** 2) / n - np.sum(np.abs(spectrum) ** 2))
    spectral_residual = float(np.max(np.abs(spectrum - aliased_spectrum(head, n))))

    return ErrorDecomposition(
        n=n, a_sum=float(np.sum(A ** 2)), b_sum=float(np.sum(B ** 2)), c_sum=float(np.sum(C ** 2)),
        total=total, parseval_residual=parseval_residual, spectral_residual=spectral_residual,
        hd4_bound=None if beta is None else hd4_bound(head, n, beta))


def appendix_b_terms(kernel, f, n):
    return appendix_b_decomposition(f, n).terms


def hoelder_condition_i_bound(L, alpha, n):
    '''
    L^2 n^(1 - 2 alpha): the Brownian-motion condition (i) bound for a
    Hoelder(alpha, L) function.
    '''
    return L ** 2 * float(n) ** (1 - 2 * alpha)


def _warn_second_derivative(kernel):
    if kernel.q_second is None and kernel.name not in _warned_second_derivative:
        _warned_second_derivative.add(kernel.name)
        log.warning('Kernel %s has no analytic second derivative of q; the regularity '
                    'the transformed experiments rely on is not checked', kernel.name)


def transformation_means(kernel, f, n):
    '''
    mu_{j,n} = S_j / v(t_j) - S_{j-1} / v(t_{j-1}) with S_j = sum_{i<=j} f(t_i),
    and sigma^2_{j,n} = n (q(t_j) - q(t_{j-1})) as a difference quotient of q.
    '''
    t = knots(n)
    v = np.asarray(kernel.v(t[1:]))
    if np.any(v <= 0):
        raise KernelDegenerate('The transformed experiments need v > 0 on (0, 1]', kernel.name)

    partial = np.cumsum(np.asarray(f.evaluate(t[1:]))) / v
    mu = np.diff(partial, prepend=0.0)
    q = np.asarray(kernel.q(t))
    sigma_sq = np.diff(q) / np.diff(t)
    return mu, sigma_sq


def limit_mean(kernel, f, s):
    '''
    mu(s) = [f(s) v(s) - v'(s) F_f(s)] / v(s)^2
    '''
    v = np.asarray(kernel.v(s))
    return (np.asarray(f.evaluate(s)) * v - np.asarray(kernel.v_prime(s)) * np.asarray(f.antiderivative(s))) / v ** 2


def transformation_discrepancy(kernel, f, n):
    '''
    n max_j (mu(s_j) - mu_{j,n})^2 + n max_j (q'(s_j) - sigma^2_{j,n})^2
    at s_j = j / (n + 1).
    '''
    _warn_second_derivative(kernel)
    mu, sigma_sq = transformation_means(kernel, f, n)
    s = np.arange(1, n + 1) / (n + 1)
    if np.any(np.asarray(kernel.v(s)) <= 0):
        raise KernelDegenerate('The transformed experiments need v > 0 on (0, 1]', kernel.name)

    mean_gap = np.max((limit_mean(kernel, f, s) - mu) ** 2)
    variance_gap = np.max((np.asarray(kernel.q_prime(s)) - sigma_sq) ** 2)
    return float(n * mean_gap + n * variance_gap)


STATISTICS = {
    'condition_i': condition_i_statistic,
    'condition_ii': condition_ii_statistic,
    'kl': kl_e1_vs_e1prime,
    'kl_exact': kl_exact,
    'transformation': transformation_discrepancy,
    'appendix_b_terms': appendix_b_terms,
}
