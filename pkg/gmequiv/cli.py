'''
Command line front end.

    gmequiv SUBCOMMAND [options]
    gmequiv batch FILE.yml

Exit codes: 0 on success, 2 when a pass/fail gate fails, 1 on errors and 64
on usage errors.
'''

import sys
import shlex
import logging
import argparse

from gmequiv import __version__
from gmequiv.config import RunConfig, SUBCOMMANDS, load_batch
from gmequiv.exceptions import (
    GaussMarkovException, ConfigException, UsageError, ExpressionSyntaxError, UnknownIdentifier)
from gmequiv.expression import GRAMMAR
from gmequiv.output import emit, dumps, summary_table
from gmequiv.tasks import run_task

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_GATE = 2
EXIT_USAGE = 64

LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'

# flag -> RunConfig field
FLAGS = [
    ('--fn', 'function', 'function spec as JSON, {"coeffs": [[k, re, im], ...]}'),
    ('--n', 'n', 'n or n grid: 8, 8,16,32 or 16..512'),
    ('--seed', 'seed', 'random seed (default 0)'),
    ('--out', 'out', 'output file (default stdout)'),
    ('--format', 'format', 'csv or json (default csv)'),
    ('--grid-density', 'grid_density', 'path grid points per cell (default 20)'),
    ('--family', 'family', 'function family: zero, constant, single-freq, smooth, extremal, random, sobolev'),
    ('--stat', 'statistic', 'condition_i, condition_ii, kl, kl_exact, transformation or appendix_b_terms'),
    ('--beta', 'beta', 'Sobolev smoothness (default 1)'),
    ('--L', 'L', 'class radius (default 1)'),
    ('--alpha', 'alpha', 'Hoelder exponent'),
    ('--M', 'M', 'Hoelder sup-norm bound'),
    ('--target', 'target', 'expected log-log slope'),
    ('--margin', 'margin', 'slope tolerance (default 0.3)'),
    ('--experiment', 'experiment', 'increments, e1, e1prime, e2 or kriging-path'),
    ('--method', 'method', 'Kriging method: closed_form, tridiagonal or dense'),
    ('--draws', 'draws', 'number of simulated draws'),
]


class ArgumentParser(argparse.ArgumentParser):

    def error(self, message):
        raise UsageError('%s\n%s' % (message, self.format_usage().strip()))


def build_parser():
    verbosity = ArgumentParser(add_help=False)
    verbosity.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='errors only')

    options = ArgumentParser(add_help=False, parents=[verbosity])
    kernel = options.add_mutually_exclusive_group()
    kernel.add_argument('--preset', help='bm, ou, ou:L, bridge or slepian (default bm)')
    kernel.add_argument('--kernel', help='kernel spec as JSON')
    for flag, dest, help in FLAGS:
        options.add_argument(flag, dest=dest, help=help)

    parser = ArgumentParser(prog='gmequiv', description='Gauss-Markov asymptotic equivalence diagnostics')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    subparsers = parser.add_subparsers(dest='subcommand', metavar='SUBCOMMAND')
    subparsers.required = True
    for name in SUBCOMMANDS:
        subparsers.add_parser(name, parents=[options], help='run %s' % name)
    batch = subparsers.add_parser('batch', parents=[verbosity], help='run a YAML batch manifest')
    batch.add_argument('file')
    return parser


def configure_logging(verbose=False, quiet=False, stream=None):
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.ERROR
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=stream or sys.stderr, force=True)


def config_from_args(args):
    spec = {'subcommand': args.subcommand}
    if args.preset is not None:
        spec['kernel'] = args.preset
    elif args.kernel is not None:
        spec['kernel'] = args.kernel
    for _, dest, _ in FLAGS:
        value = getattr(args, dest)
        if value is not None:
            spec[dest] = value
    return RunConfig.from_dict(spec)


def write_result(result, config, command, stdout):
    result.metadata.insert(0, ('command', command))

    if config.subcommand in ('validate', 'counterexample'):
        stdout.write(result.report)
        if config.out:
            emit(result, config.format, config.out)
        elif config.subcommand == 'counterexample':
            stdout.write(dumps(result.summary))
    elif config.out:
        emit(result, config.format, config.out)
        if result.report:
            stdout.write(result.report)
        else:
            summary_table(result.summary, stdout)
    else:
        emit(result, config.format, stream=stdout)


def run_config(config, command, stdout):
    result = run_task(config)
    write_result(result, config, command, stdout)
    return result.exit_code


def run_batch(path, stdout):
    '''
    Runs every entry of a batch manifest in name order. A failing run is
    logged and does not stop the others; the exit code is the largest one.
    '''
    exit_code = EXIT_OK
    for run_name, config in load_batch(path):
        log.info('Batch run %s: %s', run_name, config.subcommand)
        try:
            code = run_config(config, 'gmequiv batch %s  # run %s' % (shlex.quote(path), run_name), stdout)
        except Exception as e:
            log.error('Run %s failed: %s', run_name, e)
            code = EXIT_ERROR
        exit_code = max(exit_code, code)
    return exit_code


def run(argv, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        stderr.write('gmequiv: %s\n' % e.message)
        return EXIT_USAGE
    except SystemExit as e:
        return e.code or EXIT_OK

    configure_logging(args.verbose, args.quiet, stderr)
    command = ' '.join(['gmequiv'] + [shlex.quote(a) for a in argv])
    try:
        if args.subcommand == 'batch':
            return run_batch(args.file, stdout)
        try:
            config = config_from_args(args)
        except ConfigException as e:
            stderr.write('gmequiv: %s\n%s\n' % (e, parser.format_usage().strip()))
            return EXIT_USAGE
        return run_config(config, command, stdout)
    except (ExpressionSyntaxError, UnknownIdentifier) as e:
        stderr.write('gmequiv: %s\n\nKernel expression grammar:\n%s\n' % (e, GRAMMAR))
        return EXIT_USAGE
    except ConfigException as e:
        stderr.write('gmequiv: %s\n' % e)
        return EXIT_USAGE
    except GaussMarkovException as e:
        log.debug('Failure', exc_info=True)
        stderr.write('gmequiv: %s\n' % e)
        return EXIT_ERROR
    except Exception as e:
        log.debug('Unexpected failure', exc_info=True)
        stderr.write('gmequiv: unexpected %s: %s\n' % (type(e).__name__, e))
        return EXIT_ERROR


def main():
    sys.exit(run(sys.argv[1:]))
