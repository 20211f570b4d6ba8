'''
Deterministic output: CSV with ``#`` metadata lines, or one JSON document.
Floats are written with repr, so identical runs give identical bytes.
'''

import csv
import sys
import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import simplejson as json

from gmequiv.util import print_table

log = logging.getLogger(__name__)


@dataclass
class Result:
    name: str
    metadata: list
    columns: List[str]
    rows: List[dict]
    summary: dict = field(default_factory=dict)
    exit_code: int = 0
    report: Optional[str] = None


def plain(value):
    '''
    numpy scalars and arrays to plain Python values.
    '''
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def format_value(value):
    value = plain(value)
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if math.isnan(value):
            return 'nan'
        return repr(value)
    return str(value)


def dumps(document):
    return json.dumps(plain(document), sort_keys=True, indent=2, ignore_nan=True) + '\n'


def write_csv(result, stream):
    for key, value in result.metadata:
        if not isinstance(value, str):
            value = json.dumps(plain(value), sort_keys=True, ignore_nan=True)
        stream.write('# %s: %s\n' % (key, value))
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([format_value(row.get(c)) for c in result.columns])


def write_json(result, stream):
    stream.write(dumps({
        'metadata': {k: v for k, v in result.metadata},
        'summary': result.summary,
        'rows': result.rows,
    }))


def emit(result, fmt='csv', out=None, stream=None):
    '''
    Write ``result`` to the file ``out``, or to ``stream`` (stdout) when no
    file is given.
    '''
    writer = write_json if fmt == 'json' else write_csv
    if out:
        with open(out, 'w', newline='') as f:
            writer(result, f)
        log.info('Wrote %d rows to %s', len(result.rows), out)
    else:
        writer(result, stream or sys.stdout)


def summary_table(summary, stream=None):
    rows = [{'key': k, 'value': format_value(v) if not isinstance(v, (list, dict)) else json.dumps(plain(v), ignore_nan=True)}
            for k, v in sorted(summary.items())]
    if rows:
        print_table(rows, ['key', 'value'], out=stream)
