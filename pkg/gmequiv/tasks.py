'''
One function per subcommand. Each takes a RunConfig and returns a Result;
the command line and the batch runner decide where it is written.
'''

import io
import logging

import numpy as np

from gmequiv import __version__
from gmequiv import kernel as kernels
from gmequiv import diagnostics
from gmequiv import counterexample as counter
from gmequiv.experiments import (
    simulate_increments, simulate_e1, simulate_e2, kriging_path_experiment, default_grid_size)
from gmequiv.families import FunctionFamily, family as make_family, smooth_function
from gmequiv.fourier import ClassSpec, function_from_spec, sample_ellipsoid
from gmequiv.output import Result
from gmequiv.rates import rate_sweep, DEFAULT_N_GRID
from gmequiv.rkhs import KrigingInterpolator
from gmequiv.util import knots, path_grid, print_table

log = logging.getLogger(__name__)

DEFAULT_N = {
    'simulate': [50],
    'kriging': [8, 16, 32, 64],
    'kl': [2, 4, 8],
    'counterexample': [4, 8, 16, 32],
    'validate': [8, 16, 32, 64],
}
DEFAULT_DRAWS = {
    'simulate': 1,
    'counterexample': counter.DEFAULT_DRAWS,
}

KRIGING_TOLERANCE = 1e-8
KRIGING_DENSE_MAX_N = 64
KL_TOLERANCE = 1e-10
PARSEVAL_TOLERANCE = 1e-10


def n_values(config):
    return list(config.n or DEFAULT_N.get(config.subcommand, DEFAULT_N_GRID))


def draws(config):
    return config.draws or DEFAULT_DRAWS.get(config.subcommand, 1)


def get_kernel(config, check=True):
    return kernels.kernel_from_spec(config.kernel, check)


def get_function(config, default=None):
    if config.function is not None:
        return function_from_spec(config.function)
    if default is None:
        return smooth_function()
    return default


def get_family(config, default='single-freq'):
    if config.function is not None:
        return FunctionFamily.of([function_from_spec(config.function)])
    return make_family(config.family or default, config.beta, config.L, config.seed)


def metadata(config, kernel=None, **extra):
    items = [('gmequiv', __version__), ('config', config.to_dict())]
    if kernel is not None:
        items.append(('kernel', kernel.to_spec()))
    items += sorted(extra.items())
    return items


def table_text(rows, columns):
    if not rows:
        return ''
    return print_table(rows, columns, out=io.StringIO()) + '\n'


def simulate(config):
    '''
    Dump simulated observations, one row per draw and index.

    Experiments:
        * increments: the noise increments xi_i alone
        * e1: Y_i = f(t_i) + sqrt(n) xi_i
        * e1prime: the same with cell averages in place of f(t_i)
        * e2: the path F_f(t) + Xi_t / sqrt(n) on the path grid
        * kriging-path: the Kriging interpolant of F_f plus the same noise
    '''
    kernel = get_kernel(config)
    f = get_function(config)
    size = draws(config)
    rows = []

    for n in n_values(config):
        grid_size = default_grid_size(n, config.grid_density)
        signal = None
        first = 1
        if config.experiment == 'increments':
            t = knots(n)[1:]
            values = simulate_increments(kernel, n, config.seed, size)
        elif config.experiment in ('e1', 'e1prime'):
            variant = 'original' if config.experiment == 'e1' else 'cell_averaged'
            sample = simulate_e1(kernel, f, n, config.seed, variant, size)
            t, values, signal = sample.t, sample.values, sample.signal
        elif config.experiment == 'e2':
            sample = simulate_e2(kernel, f, n, config.seed, grid_size, size)
            t, values, signal, first = sample.grid, sample.values, sample.signal, 0
        else:
            sample = kriging_path_experiment(kernel, f, n, config.seed, grid_size, size, config.method)
            t, values, signal, first = sample.grid, sample.values, sample.signal, 0

        values = np.atleast_2d(values)
        for draw in range(values.shape[0]):
            for i in range(values.shape[1]):
                rows.append({
                    'n': n, 'draw': draw, 'i': i + first, 't': float(t[i]),
                    'value': float(values[draw, i]),
                    'signal': None if signal is None else float(signal[i]),
                })

    summary = {'experiment': config.experiment, 'function': f.name, 'draws': size, 'rows': len(rows)}
    return Result('simulate', metadata(config, kernel, function=f.to_spec()),
                  ['n', 'draw', 'i', 't', 'value', 'signal'], rows, summary)


def rates(config):
    '''
    Family maxima of a statistic over the n grid with a fitted log-log
    slope. Exits with 2 when the slope misses its target.
    '''
    kernel = get_kernel(config)
    family = get_family(config)
    report = rate_sweep(config.statistic, kernel, family, n_values(config),
                        target=config.target, margin=config.margin)

    columns = ['n', 'statistic', 'family_member']
    rows = report.rows()
    if config.alpha is not None and config.statistic == 'condition_i':
        spec = ClassSpec.hoelder(config.alpha, config.L, config.M if config.M is not None else float('inf'))
        if not spec.in_theory_regime:
            log.warning('%s is outside the range covered by the equivalence theorems', spec)
        columns.append('hoelder_bound')
        for row in rows:
            row['hoelder_bound'] = diagnostics.hoelder_condition_i_bound(config.L, config.alpha, row['n'])

    summary = report.to_dict()
    exit_code = 2 if report.passed is False else 0
    text = table_text(rows, columns) + 'slope %s, target %s, %s\n' % (
        _fmt(report.slope), _fmt(report.target),
        {True: 'PASS', False: 'FAIL', None: 'no gate'}[report.passed])
    return Result('rates', metadata(config, kernel, family=str(family)), columns, rows,
                  summary, exit_code, text)


def kriging(config):
    '''
    Kriging interpolation of F_f through the knots: the interpolation
    property, agreement with a dense solve and, under Brownian motion,
    piecewise linearity.
    '''
    kernel = get_kernel(config)
    f = get_function(config)
    curves = []
    errors = []

    for n in n_values(config):
        interpolator = KrigingInterpolator(kernel, n, config.method)
        t = knots(n)
        y = np.asarray(f.antiderivative(t[1:]))
        grid = path_grid(default_grid_size(n, config.grid_density))
        curve = interpolator(y, grid)
        target = np.asarray(f.antiderivative(grid))

        entry = {
            'n': n,
            'interpolation_error': float(np.max(np.abs(interpolator(y, t[1:]) - y))),
            'dense_gap': None,
            'linear_gap': None,
            'approximation_error': float(np.max(np.abs(curve - target))),
        }
        if n <= KRIGING_DENSE_MAX_N:
            dense = KrigingInterpolator(kernel, n, 'dense')(y, grid)
            entry['dense_gap'] = float(np.max(np.abs(curve - dense)))
        if kernel.preset == 'bm':
            linear = np.interp(grid, t, np.concatenate([[0.0], y]))
            entry['linear_gap'] = float(np.max(np.abs(curve - linear)))
        errors.append(entry)

        for s, value, exact in zip(grid, curve, target):
            curves.append({'n': n, 't': float(s), 'interpolant': float(value), 'F': float(exact)})

    passed = all(e[k] is None or e[k] <= KRIGING_TOLERANCE
                 for e in errors for k in ('interpolation_error', 'dense_gap', 'linear_gap'))
    columns = ['n', 'interpolation_error', 'dense_gap', 'linear_gap', 'approximation_error']
    return Result('kriging', metadata(config, kernel, function=f.to_spec()),
                  ['n', 't', 'interpolant', 'F'], curves,
                  {'errors': errors, 'method': config.method, 'pass': passed},
                  0 if passed else 2, table_text([_flags_to_text(e) for e in errors], columns))


def kl(config):
    '''
    KL divergence between E1 and E1': the O(n) exact formula gated against
    the dense Gaussian formula, with the chain rule value alongside.
    '''
    kernel = get_kernel(config)
    f = get_function(config)
    rows = []
    for n in n_values(config):
        chain = diagnostics.kl_e1_vs_e1prime(kernel, f, n)
        exact = diagnostics.kl_exact(kernel, f, n)
        oracle = diagnostics.kl_dense_oracle(kernel, f, n)
        rows.append({'n': n, 'chain': chain, 'exact': exact, 'oracle': oracle,
                     'gap': abs(exact - oracle), 'chain_gap': chain - exact,
                     'condition_i': diagnostics.condition_i_statistic(kernel, f, n)})

    passed = all(r['gap'] <= KL_TOLERANCE * max(1.0, abs(r['oracle'])) for r in rows)
    columns = ['n', 'chain', 'exact', 'oracle', 'gap', 'chain_gap', 'condition_i']
    return Result('kl', metadata(config, kernel, function=f.to_spec()), columns, rows,
                  {'pass': passed}, 0 if passed else 2, table_text(rows, columns))


def decompose(config):
    '''
    Split the discretisation errors into the head and tail terms, with
    discrete Parseval, the closed form aliasing spectrum and both bounds.
    Without --fn the function is a random Sobolev ellipsoid member with
    frequencies up to twice the largest n.
    '''
    ns = n_values(config)
    if config.function is not None:
        f = function_from_spec(config.function)
    else:
        f = sample_ellipsoid(ClassSpec.sobolev(config.beta, config.L), 2 * max(ns), config.seed)

    rows = [diagnostics.appendix_b_decomposition(f, n, config.beta).to_dict() for n in ns]
    passed = all(abs(r['parseval_residual']) <= PARSEVAL_TOLERANCE
                 and r['spectral_residual'] <= PARSEVAL_TOLERANCE
                 and r['hd7_holds'] and r['hd4_holds'] is not False for r in rows)

    columns = ['n', 'a_sum', 'b_sum', 'c_sum', 'total', 'parseval_residual',
               'spectral_residual', 'hd7_holds', 'hd4_bound', 'hd4_holds']
    return Result('decompose', metadata(config, function=f.to_spec()), columns, rows,
                  {'pass': passed, 'function': f.name}, 0 if passed else 2,
                  table_text([_flags_to_text(r) for r in rows], columns))


def transform(config):
    '''
    Discrepancy of the transformed experiments over the n grid.
    '''
    kernel = get_kernel(config)
    family = get_family(config, default='smooth')
    report = rate_sweep('transformation', kernel, family, n_values(config),
                        target=config.target, margin=config.margin)
    columns = ['n', 'statistic', 'family_member']
    rows = report.rows()
    text = table_text(rows, columns) + 'slope %s, target %s\n' % (_fmt(report.slope), _fmt(report.target))
    return Result('transform', metadata(config, kernel, family=str(family)), columns, rows,
                  report.to_dict(), 2 if report.passed is False else 0, text)


def counterexample(config):
    '''
    Premises of the Brownian bridge construction for every n, plus the
    Brownian motion contrast where rho_2 no longer recovers int f.
    '''
    rows = []
    verdicts = []
    lines = []
    bm = kernels.brownian_motion()
    for n in n_values(config):
        report = counter.indistinguishability_check(
            n, config.beta, config.L, config.seed, draws(config), config.grid_density)
        contrast = counter.rho2_variance(bm, n, config.seed)
        verdict = report.verdict()
        verdict['bm_contrast'] = {'variance': contrast.variance, 'expected': contrast.expected,
                                  'within_band': contrast.within_band}
        verdicts.append(verdict)

        lines.append('n = %d: %s' % (n, 'all premises hold' if report.passed else 'PREMISE FAILED'))
        for premise in report.premises:
            lines.append('  [%s] %s: %s' % ('ok' if premise.passed else 'FAIL', premise.name, premise.detail))
            rows.append({'n': n, 'check': premise.name, 'passed': premise.passed, 'detail': premise.detail})
        for risk in report.rule_risks:
            lines.append('  E1 rule "%s": max risk %.3g' % (risk['rule'], risk['max_risk']))
        lines.append('  Brownian motion: Var rho_2 = %.4g (1/n = %.4g)' % (contrast.variance, contrast.expected))

    passed = all(v['passed'] for v in verdicts)
    lines.append('')
    lines.append(counter.CONCLUSION if passed else 'Some premises failed; no conclusion is drawn.')
    summary = {'passed': passed, 'verdicts': verdicts}
    return Result('counterexample', metadata(config, kernels.brownian_bridge()),
                  ['n', 'check', 'passed', 'detail'], rows, summary,
                  0 if passed else 2, '\n'.join(lines) + '\n')


def validate(config):
    '''
    Grid checks of the kernel assumptions and the smallest Gram eigenvalue
    on the knots. Reports, never gates.
    '''
    kernel = get_kernel(config, check=False)
    report = kernels.validate_assumption(kernel)
    rows = [{'check': c.name, 'passed': c.passed, 'witness': c.witness,
             'informational': c.informational} for c in report.checks]

    for n in n_values(config):
        points = knots(n)[1:] if kernel.v1_nonzero else knots(n)[1:-1]
        if len(points) == 0:
            continue
        eigenvalue = kernels.gram_min_eigenvalue(kernel, points)
        rows.append({'check': 'Gram matrix positive definite (n=%d)' % n,
                     'passed': bool(eigenvalue > -1e-10), 'witness': 'min eigenvalue %.6g' % eigenvalue,
                     'informational': False})

    columns = ['check', 'passed', 'witness', 'informational']
    passed = all(r['passed'] for r in rows if not r['informational'])
    text = 'kernel %s on %d points: %s\n' % (kernel.name, report.grid_size, 'PASS' if passed else 'FAIL')
    text += table_text([_flags_to_text(r) for r in rows], columns)
    summary = report.to_dict()
    summary['passed'] = passed
    return Result('validate', metadata(config, kernel), columns, rows, summary, 0, text)


def _fmt(value):
    if value is None:
        return 'n/a'
    return '%.4g' % value


def _flags_to_text(row):
    return {k: (str(v).lower() if isinstance(v, bool) else ('' if v is None else v))
            for k, v in row.items()}


TASKS = {
    'simulate': simulate,
    'rates': rates,
    'kriging': kriging,
    'kl': kl,
    'decompose': decompose,
    'transform': transform,
    'counterexample': counterexample,
    'validate': validate,
}


def run_task(config):
    log.debug('Running %s', config.subcommand)
    return TASKS[config.subcommand](config)
