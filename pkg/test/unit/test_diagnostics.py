import math
import unittest

import numpy as np

from gmequiv import diagnostics
from gmequiv.diagnostics import (
    condition_i_statistic, condition_ii_statistic, kl_e1_vs_e1prime, kl_exact, kl_dense_oracle, gaussian_kl,
    noise_covariance, direct_dft, aliased_spectrum, appendix_b_decomposition, hd4_bound,
    hoelder_condition_i_bound, transformation_means, transformation_discrepancy,
    discretisation_errors)
from gmequiv.kernel import make_kernel
from gmequiv.families import smooth_function, family
from gmequiv.fourier import FourierFunction, ClassSpec, sample_ellipsoid
from gmequiv.counterexample import build_fn
from gmequiv.exceptions import KernelDegenerate


class TestConditionI(unittest.TestCase):

    def test_constant_function(self):
        for name in ('bm', 'ou', 'slepian'):
            self.assertEqual(condition_i_statistic(make_kernel(name), FourierFunction.constant(2.0), 16), 0.0)

    def test_brownian_motion(self):
        f = smooth_function()
        n = 16
        expected = np.sum(discretisation_errors(f, n) ** 2)
        self.assertAlmostEqual(condition_i_statistic(make_kernel('bm'), f, n), expected, places=12)

    def test_blind_to_functions_without_discretisation_error(self):
        f = smooth_function()
        n = 16
        shifted = f + FourierFunction.constant(1.5) + FourierFunction.sine(n, 0.8)
        for name in ('bm', 'ou', 'slepian'):
            k = make_kernel(name)
            np.testing.assert_allclose(condition_i_statistic(k, shifted, n), condition_i_statistic(k, f, n),
                                       rtol=1e-8, err_msg=name)

    def test_bridge_is_degenerate(self):
        self.assertRaises(KernelDegenerate, condition_i_statistic, make_kernel('bridge'), smooth_function(), 8)

    def test_hoelder_bound(self):
        self.assertEqual(hoelder_condition_i_bound(2.0, 0.5, 64), 4.0)
        self.assertAlmostEqual(hoelder_condition_i_bound(1.0, 1.0, 16), 1.0 / 16)


class TestKullbackLeibler(unittest.TestCase):

    def test_half_of_condition_i(self):
        f = smooth_function()
        for name in ('bm', 'ou', 'slepian'):
            k = make_kernel(name)
            self.assertAlmostEqual(kl_e1_vs_e1prime(k, f, 32), condition_i_statistic(k, f, 32) / 2, places=14)

    def test_dense_oracle(self):
        functions = [smooth_function(), build_fn(4, 1.0, 1.0),
                     sample_ellipsoid(ClassSpec.sobolev(1.0, 1.0), 16, seed=2)]
        for name in ('bm', 'ou', 'slepian'):
            k = make_kernel(name)
            for f in functions:
                for n in range(2, 9):
                    oracle = kl_dense_oracle(k, f, n)
                    self.assertLessEqual(abs(kl_exact(k, f, n) - oracle), 1e-10 * max(1.0, oracle))

    def test_chain_rule_under_brownian_motion(self):
        k = make_kernel('bm')
        f = smooth_function()
        for n in range(2, 9):
            oracle = kl_dense_oracle(k, f, n)
            self.assertLessEqual(abs(kl_e1_vs_e1prime(k, f, n) - oracle), 1e-10 * max(1.0, oracle))

    def test_chain_rule_differs_for_varying_v(self):
        k = make_kernel('ou')
        f = smooth_function()
        self.assertGreater(abs(kl_e1_vs_e1prime(k, f, 4) - kl_exact(k, f, 4)), 1e-6)

    def test_brownian_noise_is_white(self):
        np.testing.assert_allclose(noise_covariance(make_kernel('bm'), 8), np.eye(8), atol=1e-12)

    def test_gaussian_kl(self):
        self.assertEqual(gaussian_kl([1.0, 2.0], [1.0, 2.0], np.eye(2)), 0.0)
        self.assertAlmostEqual(gaussian_kl([1.0], [0.0], [[4.0]]), 0.125)


class TestConditionII(unittest.TestCase):

    def test_scaling(self):
        k = make_kernel('ou')
        f = smooth_function()
        from gmequiv.rkhs import projection_distance
        self.assertAlmostEqual(condition_ii_statistic(k, f, 8), math.sqrt(8 * projection_distance(k, f, 8)))

    def test_zero(self):
        self.assertEqual(condition_ii_statistic(make_kernel('bm'), FourierFunction.zero(), 8), 0.0)


class TestFourierDecomposition(unittest.TestCase):

    def test_direct_dft(self):
        x = np.random.default_rng(0).standard_normal(12)
        k = np.arange(1, 13)
        expected = np.array([np.sum(x * np.exp(-2j * math.pi * k * j / 12)) / 12 for j in range(1, 13)])
        np.testing.assert_allclose(direct_dft(x), expected, atol=1e-13)
        # same as the FFT after shifting the summation index
        np.testing.assert_allclose(direct_dft(x), np.roll(np.fft.fft(np.roll(x, 1)), -1) / 12, atol=1e-13)

    def test_aliased_spectrum(self):
        for n in (1, 4, 7, 16):
            f = sample_ellipsoid(ClassSpec.sobolev(1.0, 1.0), n, seed=n).truncate(n)
            np.testing.assert_allclose(aliased_spectrum(f, n), direct_dft(discretisation_errors(f, n)),
                                       rtol=0, atol=1e-12)

    def test_decomposition(self):
        beta = 1.5
        f = sample_ellipsoid(ClassSpec.sobolev(beta, 1.0), 64, seed=3)
        for n in (4, 8, 16, 32):
            terms = appendix_b_decomposition(f, n, beta)
            self.assertLessEqual(abs(terms.parseval_residual), 1e-10)
            self.assertLessEqual(terms.spectral_residual, 1e-10)
            self.assertTrue(terms.hd7_holds)
            self.assertTrue(terms.hd4_holds)
            self.assertEqual(terms.to_dict()['n'], n)

    def test_errors_split(self):
        f = sample_ellipsoid(ClassSpec.sobolev(1.0, 1.0), 32, seed=1)
        n = 8
        head, tail = f.truncate(n), f.tail(n)
        t = np.arange(1, n + 1) / n
        combined = discretisation_errors(head, n) + np.asarray(tail.evaluate(t)) - tail.cell_averages(n)
        np.testing.assert_allclose(combined, discretisation_errors(f, n), atol=1e-13)

    def test_without_tail(self):
        f = smooth_function()
        terms = appendix_b_decomposition(f, 8)
        self.assertEqual(terms.b_sum, 0.0)
        self.assertEqual(terms.c_sum, 0.0)
        self.assertAlmostEqual(terms.a_sum, terms.total, places=13)
        self.assertIsNone(terms.hd4_holds)

    def test_hd4_bound(self):
        f = FourierFunction.cosine(1)
        self.assertAlmostEqual(hd4_bound(f, 4, 1.0), 2 * math.pi ** 2 * f.sobolev_norm_sq(1.0) / 4)
        for n in (2, 8, 32):
            for f in family('extremal', 1.0).members(n):
                head = f.truncate(n)
                self.assertLessEqual(np.sum(discretisation_errors(head, n) ** 2), hd4_bound(head, n, 1.0))


class TestTransformation(unittest.TestCase):

    def test_brownian_motion_zero_function(self):
        self.assertEqual(transformation_discrepancy(make_kernel('bm'), FourierFunction.zero(), 16), 0.0)

    def test_means(self):
        k = make_kernel('bm')
        f = smooth_function()
        mu, sigma_sq = transformation_means(k, f, 8)
        np.testing.assert_allclose(mu, f.evaluate(np.arange(1, 9) / 8), atol=1e-13)
        np.testing.assert_allclose(sigma_sq, np.ones(8), atol=1e-14)

    def test_ou_variances(self):
        k = make_kernel('ou')
        _, sigma_sq = transformation_means(k, FourierFunction.zero(), 64)
        s = (np.arange(1, 65) - 0.5) / 64
        np.testing.assert_allclose(sigma_sq, k.q_prime(s), rtol=1e-3)

    def test_decreases(self):
        k = make_kernel('slepian')
        f = smooth_function()
        values = [transformation_discrepancy(k, f, n) for n in (16, 64, 256)]
        self.assertGreater(values[0], values[-1])

    def test_bridge(self):
        self.assertRaises(KernelDegenerate, transformation_discrepancy, make_kernel('bridge'),
                          smooth_function(), 8)

    def test_registry(self):
        self.assertEqual(sorted(diagnostics.STATISTICS),
                         ['appendix_b_terms', 'condition_i', 'condition_ii', 'kl', 'kl_exact',
                          'transformation'])
