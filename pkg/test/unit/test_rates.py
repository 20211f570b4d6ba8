import os
import math
import unittest
from unittest import mock

import numpy as np

from gmequiv import rates
from gmequiv.rates import RateReport, rate_sweep, default_target, fit_slope, worker_count
from gmequiv.kernel import make_kernel
from gmequiv.families import family
from gmequiv.exceptions import ConfigException


class TestDefaultTarget(unittest.TestCase):

    def test_fixed_families(self):
        self.assertEqual(default_target('condition_i', 'single-freq'), -1.0)
        self.assertEqual(default_target('kl', 'smooth'), -1.0)
        self.assertEqual(default_target('condition_ii', 'custom'), -0.5)
        self.assertIsNone(default_target('condition_i', 'zero'))
        self.assertIsNone(default_target('transformation', 'constant'))

    def test_class_families(self):
        self.assertEqual(default_target('condition_i', 'extremal', 0.75), -0.5)
        self.assertEqual(default_target('condition_i', 'extremal', 2.0), -1.0)
        self.assertAlmostEqual(default_target('kl_exact', 'random', 0.75), -0.7)
        self.assertAlmostEqual(default_target('condition_ii', 'random', 0.75), -0.35)
        self.assertEqual(default_target('appendix_b_terms', 'sobolev', 1.0), -1.0)

    def test_errors(self):
        self.assertRaises(ConfigException, default_target, 'condition_i', 'extremal')
        self.assertRaises(ConfigException, default_target, 'variance', 'smooth')


class TestFitSlope(unittest.TestCase):

    def test_power_law(self):
        n = [16, 32, 64, 128, 256, 512]
        slope, intercept, stderr, fit_n = fit_slope(n, [3.0 * x ** -1.5 for x in n])
        self.assertAlmostEqual(slope, -1.5, places=10)
        self.assertAlmostEqual(intercept, math.log(3.0), places=10)
        self.assertAlmostEqual(stderr, 0.0, places=10)
        self.assertEqual(fit_n, [128, 256, 512])

    def test_short_grids(self):
        self.assertEqual(fit_slope([4, 8], [1.0, 0.5])[3], [4, 8])
        self.assertEqual(fit_slope([4, 8, 16], [1.0, 0.5, 0.25])[3], [8, 16])
        self.assertEqual(fit_slope([4], [1.0]), (None, None, None, [4]))

    def test_skips_non_positive(self):
        slope, _, _, fit_n = fit_slope([8, 16, 32, 64], [0.0, 1.0, math.nan, 0.25])
        self.assertEqual(fit_n, [16, 64])
        self.assertAlmostEqual(slope, -1.0, places=12)


class TestRateSweep(unittest.TestCase):

    def setUp(self):
        self.bm = make_kernel('bm')

    def test_condition_i_brownian_motion(self):
        report = rate_sweep('condition_i', self.bm, family('single-freq'))
        self.assertEqual(report.n_values, list(rates.DEFAULT_N_GRID))
        self.assertEqual(report.target, -1.0)
        self.assertAlmostEqual(report.slope, -1.0, delta=0.05)
        self.assertTrue(report.passed)
        self.assertEqual(report.members[0], 'cos(2pi x)')
        self.assertTrue(all(np.diff(report.values) < 0))

    def test_wrong_target_fails(self):
        report = rate_sweep('condition_i', self.bm, family('single-freq'), [16, 32, 64], target=-2.0)
        self.assertFalse(report.passed)
        self.assertFalse(report.to_dict()['pass'])

    def test_degenerate_families(self):
        for name in ('zero', 'constant'):
            report = rate_sweep('condition_i', self.bm, family(name), [8, 16, 32])
            self.assertTrue(report.degenerate)
            self.assertIsNone(report.slope)
            self.assertIsNone(report.passed)
            self.assertEqual(report.values, [0.0, 0.0, 0.0])

    def test_family_maximum(self):
        report = rate_sweep('condition_i', self.bm, family('extremal', 1.0), [8, 16])
        self.assertEqual(len(report.rows()), 2)
        self.assertTrue(report.members[0].startswith('extremal'))

    def test_bad_arguments(self):
        self.assertRaises(ConfigException, rate_sweep, 'variance', self.bm, family('smooth'))
        self.assertRaises(ConfigException, rate_sweep, 'condition_i', self.bm, family('smooth'), [16, 8])

    def test_excludes_non_finite(self):
        def statistic(kernel, f, n):
            return math.nan if n == 32 else 1.0 / n

        with mock.patch.dict(rates.STATISTICS, {'condition_i': statistic}):
            with self.assertLogs('gmequiv.rates', level='WARNING'):
                report = rate_sweep('condition_i', self.bm, family('smooth'), [16, 32, 64, 128])
        self.assertEqual(report.excluded, [32])
        self.assertTrue(math.isnan(report.values[1]))
        self.assertEqual(report.fit_n, [64, 128])
        self.assertAlmostEqual(report.slope, -1.0, places=12)


class TestThreads(unittest.TestCase):

    def test_worker_count(self):
        with mock.patch.dict(os.environ, {'GMEQUIV_THREADS': '3'}):
            self.assertEqual(worker_count(), 3)
        with mock.patch.dict(os.environ, {'GMEQUIV_THREADS': ''}):
            self.assertEqual(worker_count(), 1)
        with mock.patch.dict(os.environ, {'GMEQUIV_THREADS': '0'}):
            self.assertRaises(ConfigException, worker_count)
        with mock.patch.dict(os.environ, {'GMEQUIV_THREADS': 'many'}):
            self.assertRaises(ConfigException, worker_count)

    def test_threads_do_not_change_results(self):
        k = make_kernel('ou')
        f = family('sobolev', 1.0)
        serial = rate_sweep('condition_ii', k, f, [4, 8, 16], threads=1)
        with mock.patch.dict(os.environ, {'GMEQUIV_THREADS': '4'}):
            threaded = rate_sweep('condition_ii', k, f, [4, 8, 16])
        self.assertEqual(serial.to_dict(), threaded.to_dict())


class TestReport(unittest.TestCase):

    def test_passed(self):
        report = RateReport('kl', 'bm', 'smooth', [8, 16], [1.0, 0.5], ['a', 'b'], slope=-0.75,
                            target=-1.0, margin=0.3)
        self.assertTrue(report.passed)
        report.margin = 0.2
        self.assertFalse(report.passed)
        report.target = None
        self.assertIsNone(report.passed)
