import re
import math
from dataclasses import dataclass, field, fields
from typing import List, Optional

import yaml
import simplejson as json

from gmequiv.kernel import parse_preset
from gmequiv.exceptions import ConfigException

SUBCOMMANDS = ('simulate', 'rates', 'kriging', 'kl', 'decompose', 'transform',
               'counterexample', 'validate')
EXPERIMENTS = ('increments', 'e1', 'e1prime', 'e2', 'kriging-path')
FORMATS = ('csv', 'json')
STATISTICS = ('condition_i', 'condition_ii', 'kl', 'kl_exact', 'transformation', 'appendix_b_terms')


def parse_string(value):
    if not isinstance(value, str):
        raise ConfigException('Value is not a string: "%s"' % (value,))
    return value

def parse_int(value):
    if isinstance(value, bool):
        raise ConfigException('Value is not an integer: "%s"' % value)
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigException('Value is not an integer: "%s"' % (value,))

def parse_seed(value):
    value = parse_int(value)
    if value < 0:
        raise ConfigException('Seeds must be non-negative: "%s"' % value)
    return value

def parse_positive_int(value):
    value = parse_int(value)
    if value < 1:
        raise ConfigException('Value must be at least 1: "%s"' % value)
    return value

def parse_optional_positive_int(value):
    if value is None:
        return None
    return parse_positive_int(value)

def parse_float(value):
    if isinstance(value, bool):
        raise ConfigException('Value is not a float: "%s"' % value)
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigException('Value is not a float: "%s"' % (value,))
    if math.isnan(value):
        raise ConfigException('Value is not a number')
    return value

def parse_optional_float(value):
    if value is None:
        return None
    return parse_float(value)

def parse_positive_float(value):
    value = parse_float(value)
    if not value > 0:
        raise ConfigException('Value must be positive: "%s"' % value)
    return value

def parse_json_object(value):
    if isinstance(value, str):
        try:
            value = json.loads(value)
        except ValueError as e:
            raise ConfigException('Invalid JSON: %s' % e)
    if not isinstance(value, dict):
        raise ConfigException('Value is not an object: "%s"' % (value,))
    return dict(value)

def parse_kernel(value):
    '''
    A kernel spec object, its JSON text, or preset syntax such as ``ou:2``.
    '''
    if isinstance(value, str) and not value.lstrip().startswith('{'):
        return parse_preset(value)
    return parse_json_object(value)

def parse_optional_json_object(value):
    if value is None:
        return None
    return parse_json_object(value)

def parse_choice(choices):
    def parser(value):
        if value not in choices:
            raise ConfigException('Invalid value: "%s", valid values are %s'
                                  % (value, ', '.join(choices)))
        return value
    return parser

def parse_optional_string(value):
    if value is None:
        return None
    return parse_string(value)

def parse_n_grid(value):
    '''
    ``"16..512"`` is the doubling grid 16, 32, .., 512, ``"8,16,32"`` a
    list, and a bare integer a single n.
    '''
    if isinstance(value, (list, tuple)):
        values = [parse_positive_int(x) for x in value]
    elif isinstance(value, int) and not isinstance(value, bool):
        values = [parse_positive_int(value)]
    else:
        value = str(value).strip()
        match = re.match(r'^(\d+)\.\.(\d+)$', value)
        if match:
            lo, hi = int(match.group(1)), int(match.group(2))
            if lo < 1 or hi < lo:
                raise ConfigException('Invalid n range: "%s"' % value)
            values = []
            n = lo
            while n <= hi:
                values.append(n)
                n *= 2
        else:
            values = [parse_positive_int(x) for x in value.split(',') if x.strip()]
    if not values:
        raise ConfigException('Empty n grid')
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigException('n grid must be strictly increasing: %s' % values)
    return values


def parse_optional_n_grid(value):
    if value is None:
        return None
    return parse_n_grid(value)


@dataclass
class RunConfig:
    subcommand: str
    kernel: dict = field(default_factory=lambda: {'preset': 'bm'})
    function: Optional[dict] = None
    family: Optional[str] = None
    n: Optional[List[int]] = None
    seed: int = 0
    out: Optional[str] = None
    format: str = 'csv'
    grid_density: int = 20
    statistic: str = 'condition_i'
    beta: float = 1.0
    L: float = 1.0
    alpha: Optional[float] = None
    M: Optional[float] = None
    target: Optional[float] = None
    margin: float = 0.3
    experiment: str = 'e1'
    method: str = 'closed_form'
    draws: Optional[int] = None

    field_parsers = {
        'subcommand': parse_choice(SUBCOMMANDS),
        'kernel': parse_kernel,
        'function': parse_optional_json_object,
        'family': parse_optional_string,
        'n': parse_optional_n_grid,
        'seed': parse_seed,
        'out': parse_optional_string,
        'format': parse_choice(FORMATS),
        'grid_density': parse_positive_int,
        'statistic': parse_choice(STATISTICS),
        'beta': parse_positive_float,
        'L': parse_positive_float,
        'alpha': parse_optional_float,
        'M': parse_optional_float,
        'target': parse_optional_float,
        'margin': parse_positive_float,
        'experiment': parse_choice(EXPERIMENTS),
        'method': parse_choice(('closed_form', 'tridiagonal', 'dense')),
        'draws': parse_optional_positive_int,
    }

    @classmethod
    def from_dict(cls, spec, run_name=None):
        spec = dict(spec)
        invalid_fields = set(spec) - set(cls.field_parsers)
        if invalid_fields:
            raise ConfigException(
                'Invalid fields: %s' % ', '.join(sorted(str(x) for x in invalid_fields)), run_name)
        if 'subcommand' not in spec:
            raise ConfigException('Runs require a subcommand', run_name)

        values = {}
        for name, value_parser in cls.field_parsers.items():
            if name in spec:
                try:
                    values[name] = value_parser(spec[name])
                except ConfigException as e:
                    raise ConfigException(e.message, run_name, name)
        return cls(**values)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def expand_template(spec, templates):
    if 'template' in spec:
        template = spec.pop('template')

        if template not in templates:
            raise ConfigException('Missing template: %s' % template)

        for k, v in templates[template].items():
            spec.setdefault(k, v)


def parse_batch(config):
    '''
    Runs of a batch manifest, in name order. The reserved key ``templates``
    holds partial run specs that runs pull in with ``template: NAME``.
    '''
    if not isinstance(config, dict):
        raise ConfigException('Batch manifest must be a mapping of run names to runs')
    config = dict(config)
    templates = config.pop('templates', None) or {}

    runs = []
    for run_name in sorted(config):
        spec = dict(config[run_name] or {})
        try:
            expand_template(spec, templates)
        except ConfigException as e:
            raise ConfigException(e.message, run_name)
        runs.append((run_name, RunConfig.from_dict(spec, run_name)))
    return runs


def load_batch(path):
    try:
        with open(path) as f:
            config = yaml.safe_load(f)
    except IOError as e:
        raise ConfigException('Cannot read batch manifest %s: %s' % (path, e.strerror))
    except yaml.YAMLError as e:
        raise ConfigException('Invalid YAML in %s: %s' % (path, e))
    return parse_batch(config or {})
