import math
import unittest
from unittest import mock

import numpy as np
import scipy.integrate

from gmequiv import fourier
from gmequiv.fourier import (
    FourierFunction, ClassSpec, function_from_spec, sample_ellipsoid, hoelder_check)
from gmequiv.families import smooth_function, family, extremal_frequencies, FunctionFamily
from gmequiv.counterexample import build_fn
from gmequiv.exceptions import HermitianViolation, ConfigException


def cosine():
    return FourierFunction({1: 0.5, -1: 0.5})


class TestEvaluate(unittest.TestCase):

    def test_constant(self):
        f = FourierFunction({0: 1.0})
        np.testing.assert_array_equal(f.evaluate(np.linspace(0, 1, 7)), np.ones(7))

    def test_cosine_at_zero(self):
        self.assertAlmostEqual(cosine().evaluate(0.0), 1.0, places=15)
        self.assertIsInstance(cosine()(0.25), float)

    def test_counterexample_vanishes_on_design(self):
        fn = build_fn(4, 1.0, 1.0)
        for j in range(1, 5):
            self.assertLessEqual(abs(fn.evaluate(j / 4.0)), 1e-12)

    def test_sine_and_cosine(self):
        t = np.linspace(0, 1, 11)
        np.testing.assert_allclose(FourierFunction.cosine(2, 3.0)(t), 3 * np.cos(4 * math.pi * t), atol=1e-12)
        np.testing.assert_allclose(FourierFunction.sine(1, 2.0)(t), 2 * np.sin(2 * math.pi * t), atol=1e-12)

    def test_hermitian_completion(self):
        f = FourierFunction({2: 1 + 1j})
        self.assertEqual(f.coefficient(-2), 1 - 1j)
        self.assertEqual(f.coefficient(7), 0)

    def test_hermitian_violation(self):
        self.assertRaises(HermitianViolation, FourierFunction, {1: 1.0, -1: 2.0})
        self.assertRaises(HermitianViolation, FourierFunction, {0: 1j})

    def test_blocks(self):
        f = sample_ellipsoid(ClassSpec.sobolev(1.0, 1.0), 64, seed=3)
        t = np.linspace(0, 1, 997)
        whole = (f.evaluate(t), f.antiderivative(t), f.cell_averages(50))
        with mock.patch.object(fourier, 'BLOCK_ENTRIES', 200):
            blocked = (f.evaluate(t), f.antiderivative(t), f.cell_averages(50))
        for a, b in zip(whole, blocked):
            np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)
        self.assertEqual(f.evaluate(np.zeros(0)).shape, (0,))

    def test_sup_norm_bound(self):
        f = FourierFunction({0: 0.5, 1: 0.25j, 3: -0.1})
        self.assertAlmostEqual(f.sup_norm_bound(), 0.5 + 2 * 0.25 + 2 * 0.1, places=15)
        self.assertLessEqual(np.max(np.abs(f(np.linspace(0, 1, 1001)))), f.sup_norm_bound())

    def test_scaled(self):
        f = cosine().scaled(3.0)
        self.assertAlmostEqual(f(0.0), 3.0, places=14)
        self.assertEqual(f.name, '3*fourier(K=1)')
        self.assertEqual(cosine().scaled(0.0).items(), [])
        self.assertEqual(cosine().scaled(2.0, name='c').name, 'c')


class TestIntegrals(unittest.TestCase):

    def test_antiderivative(self):
        c = FourierFunction.constant(2.5)
        self.assertEqual(c.antiderivative(0.4), 2.5 * 0.4)
        self.assertAlmostEqual(cosine().antiderivative(1.0), 0.0, places=15)
        self.assertEqual(cosine().antiderivative(0.0), 0.0)
        self.assertAlmostEqual(build_fn(8, 1.0, 1.0).antiderivative(1.0),
                               math.sqrt(2.0 / 3.0) * 8 ** -1.0, places=14)

    def test_antiderivative_differentiates_to_f(self):
        h = 1e-5
        t = np.linspace(h, 1 - h, 501)
        for f in (smooth_function(), build_fn(4, 1.0, 1.0),
                  sample_ellipsoid(ClassSpec.sobolev(1.0, 1.0), 8, seed=3)):
            derivative = (f.antiderivative(t + h) - f.antiderivative(t - h)) / (2 * h)
            np.testing.assert_allclose(derivative, f.evaluate(t), rtol=0, atol=1e-6)

    def test_cell_averages(self):
        np.testing.assert_array_equal(FourierFunction.constant(1.5).cell_averages(7), np.full(7, 1.5))
        self.assertAlmostEqual(cosine().cell_average(1, 1), 0.0, places=14)
        for n in (2, 5, 16):
            np.testing.assert_allclose(FourierFunction.cosine(n).cell_averages(n), np.zeros(n), atol=1e-12)
        self.assertRaises(ValueError, cosine().cell_average, 0, 4)

    def test_cell_averages_telescope(self):
        f = sample_ellipsoid(ClassSpec.sobolev(1.5, 2.0), 20, seed=1)
        for n in (1, 3, 16):
            self.assertAlmostEqual(np.mean(f.cell_averages(n)), f.antiderivative(1.0), places=13)

    def test_parseval(self):
        f = sample_ellipsoid(ClassSpec.sobolev(1.0, 1.0), 32, seed=7)
        x = np.linspace(0, 1, 10001)
        integral = scipy.integrate.trapezoid(f(x) ** 2, x)
        self.assertAlmostEqual(integral, f.l2_norm_sq(), delta=1e-8)


class TestNorms(unittest.TestCase):

    def test_sobolev_norm(self):
        self.assertEqual(FourierFunction.zero().sobolev_norm_sq(1.0), 0.0)
        self.assertEqual(FourierFunction.constant(2.0).sobolev_norm_sq(3.7), 4.0)
        self.assertAlmostEqual(build_fn(8, 1.0, 1.0).sobolev_norm_sq(1.0),
                               (2.0 / 3.0) / 64 * (1 + 0.5 * 81), places=12)
        self.assertTrue(ClassSpec.sobolev(1.0, 1.0).contains(build_fn(8, 1.0, 1.0)))

    def test_spec_round_trip(self):
        f = smooth_function()
        g = function_from_spec(f.to_spec())
        t = np.linspace(0, 1, 9)
        np.testing.assert_allclose(g(t), f(t), atol=1e-15)

    def test_bad_spec(self):
        self.assertRaises(ConfigException, function_from_spec, {'coeffs': [[1, 2]]})
        self.assertRaises(ConfigException, function_from_spec, {'coefs': []})
        self.assertRaises(ConfigException, function_from_spec, {'coeffs': [], 'extra': 1})


class TestEllipsoid(unittest.TestCase):

    def setUp(self):
        self.spec = ClassSpec.sobolev(1.0, 1.0)

    def test_scaled_inside(self):
        f = sample_ellipsoid(self.spec, 32, seed=11)
        self.assertAlmostEqual(f.sobolev_norm_sq(1.0), 0.95, delta=1e-12)
        self.assertTrue(self.spec.contains(f))

    def test_deterministic(self):
        a = sample_ellipsoid(self.spec, 16, seed=5)
        b = sample_ellipsoid(self.spec, 16, seed=5)
        c = sample_ellipsoid(self.spec, 16, seed=6)
        self.assertEqual(a.items(), b.items())
        self.assertNotEqual(a.items(), c.items())

    def test_prefix_stable(self):
        short = sample_ellipsoid(self.spec, 8, seed=2)
        long = sample_ellipsoid(self.spec, 32, seed=2)
        ratios = [long.coefficient(k) / short.coefficient(k) for k in range(0, 9)]
        for ratio in ratios[1:]:
            self.assertAlmostEqual(abs(ratio - ratios[0]), 0.0, places=12)

    def test_needs_sobolev(self):
        self.assertRaises(ConfigException, sample_ellipsoid, ClassSpec.hoelder(1.0, 1.0), 8, 0)


class TestHoelder(unittest.TestCase):

    def test_constant(self):
        report = hoelder_check(FourierFunction.constant(-0.5), ClassSpec.hoelder(1.0, 1.0, 1.0), grid=200)
        self.assertEqual(report.constant, 0.0)
        self.assertEqual(report.sup_norm, 0.5)
        self.assertTrue(report.member)

    def test_cosine_lipschitz_constant(self):
        report = hoelder_check(cosine(), ClassSpec.hoelder(1.0, 10.0), grid=10000)
        self.assertAlmostEqual(report.constant / (2 * math.pi), 1.0, delta=0.02)
        self.assertFalse(report.refuted)

    def test_refuted(self):
        report = hoelder_check(FourierFunction.cosine(3), ClassSpec.hoelder(1.0, 1.0), grid=500)
        self.assertTrue(report.refuted)
        self.assertTrue(report.to_dict()['lower_bound'])

    def test_zero_is_member(self):
        self.assertTrue(hoelder_check(FourierFunction.zero(), ClassSpec.hoelder(0.7, 0.1, 0.1), 100).member)

    def test_class_spec(self):
        self.assertRaises(ConfigException, ClassSpec.sobolev, -1.0, 1.0)
        self.assertRaises(ConfigException, ClassSpec.hoelder, 0.5, 0.0)
        self.assertTrue(ClassSpec.sobolev(0.75, 1.0).in_theory_regime)
        self.assertFalse(ClassSpec.sobolev(0.5, 1.0).in_theory_regime)
        self.assertFalse(ClassSpec.hoelder(0.4, 1.0).in_theory_regime)


class TestFamilies(unittest.TestCase):

    def test_extremal_frequencies(self):
        self.assertEqual(extremal_frequencies(16), [1, 8, 16, 32])
        self.assertEqual(extremal_frequencies(1), [1, 2])

    def test_members(self):
        self.assertEqual(len(family('extremal', 1.0).members(16)), 4)
        self.assertEqual(len(family('random', 1.0).members(16)), 4)
        self.assertEqual(len(family('sobolev', 1.0).members(16)), 8)
        self.assertEqual(family('smooth').members(4)[0].name, 'smooth')
        self.assertTrue(family('zero').degenerate)

    def test_extremal_members_in_class(self):
        spec = ClassSpec.sobolev(1.0, 1.0)
        for f in family('extremal', 1.0).members(32):
            self.assertLessEqual(f.sobolev_norm_sq(1.0), 1.0)
            self.assertTrue(spec.contains(f))

    def test_unknown(self):
        self.assertRaises(ConfigException, family, 'wiggly')
        self.assertRaises(ConfigException, FunctionFamily, 'random')

    def test_custom(self):
        custom = FunctionFamily.of([cosine()])
        self.assertEqual(custom.name, 'custom')
        self.assertEqual(len(custom.members(8)), 1)
