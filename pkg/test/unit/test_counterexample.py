import math
import unittest

import numpy as np

from gmequiv.counterexample import (
    DecisionProblem, CounterexampleReport, Premise, build_fn, rho2, rho2_variance,
    indistinguishability_check, DEFICIENCY_LOWER_BOUND)
from gmequiv.experiments import PathSample
from gmequiv.kernel import make_kernel
from gmequiv.util import path_grid
from gmequiv.exceptions import GridMissingEndpoints, ConfigException


class TestBuildFn(unittest.TestCase):

    def test_integral(self):
        for n in (1, 4, 9):
            fn = build_fn(n, 0.8, 2.0)
            self.assertAlmostEqual(fn.antiderivative(1.0), math.sqrt(2.0 / 3.0) * 2.0 * n ** -0.8, places=14)
            self.assertEqual(fn.name, 'f_%d' % n)

    def test_bad_arguments(self):
        self.assertRaises(ConfigException, build_fn, 0, 1.0, 1.0)
        self.assertRaises(ConfigException, build_fn, 4, 0.0, 1.0)
        self.assertRaises(ConfigException, build_fn, 4, 1.0, -1.0)


class TestDecisionProblem(unittest.TestCase):

    def test_loss(self):
        problem = DecisionProblem()
        np.testing.assert_array_equal(problem.loss(0.5, [0.5, 0.5 + 1e-11, 0.6]), [0.0, 0.0, 1.0])
        self.assertEqual(problem.risk(1.0, np.array([1.0, 0.0, 0.0, 1.0])), 0.5)


class TestRho2(unittest.TestCase):

    def path(self, grid, values):
        return PathSample(n=4, grid=np.asarray(grid), values=np.asarray(values), kernel_name='bm',
                          function_name='f', seed=0)

    def test_endpoints(self):
        self.assertEqual(rho2(self.path([0.0, 0.5, 1.0], [0.0, 3.0, 1.25])), 1.25)
        np.testing.assert_array_equal(rho2(self.path(path_grid(3), [[0.0, 1.0, 2.0], [1.0, 1.0, 0.0]])),
                                      [2.0, -1.0])

    def test_missing_endpoints(self):
        self.assertRaises(GridMissingEndpoints, rho2, self.path([0.0, 0.5, 0.9], [0.0, 1.0, 2.0]))
        self.assertRaises(GridMissingEndpoints, rho2, self.path([0.1, 0.5, 1.0], [0.0, 1.0, 2.0]))


class TestIndistinguishability(unittest.TestCase):

    def test_premises_hold(self):
        for n in (4, 8, 16, 32):
            report = indistinguishability_check(n, draws=50, grid_density=4)
            failed = [p.name for p in report.premises if not p.passed]
            self.assertEqual(failed, [], 'n=%d' % n)
            self.assertTrue(report.passed)

    def test_verdict(self):
        verdict = indistinguishability_check(8, beta=1.5, L=0.5, draws=20).verdict()
        self.assertTrue(verdict['passed'])
        self.assertEqual(verdict['deficiency_lower_bound'], DEFICIENCY_LOWER_BOUND)
        self.assertEqual(verdict['n'], 8)
        self.assertEqual(len(verdict['premises']), 6)

    def test_discrete_rules_err(self):
        report = indistinguishability_check(8, draws=50)
        for risk in report.rule_risks:
            self.assertGreaterEqual(risk['max_risk'], 0.5, risk['rule'])

    def test_failed_premise(self):
        report = CounterexampleReport(n=4, beta=1.0, L=1.0, premises=[Premise('p', False, 'detail')])
        self.assertFalse(report.passed)
        self.assertIsNone(report.verdict()['deficiency_lower_bound'])


class TestRho2Variance(unittest.TestCase):

    def test_bridge(self):
        check = rho2_variance(make_kernel('bridge'), 8, draws=1000)
        self.assertEqual(check.variance, 0.0)
        self.assertEqual(check.expected, 0.0)

    def test_brownian_motion(self):
        check = rho2_variance(make_kernel('bm'), 4, seed=3, draws=20000)
        self.assertEqual(check.expected, 0.25)
        self.assertLessEqual(abs(check.variance - 0.25), 5 * check.stderr)
