import os
import re

import numpy as np

from gmequiv.exceptions import ConfigException


def print_table(table, columns=None, sort=None, out=None):
    def is_number(x):
        if x == '':
            return True
        try:
            float(re.sub('[%]$', '', x))
            return True
        except ValueError:
            return False

    if columns is None:
        columns = list(table[0].keys())

    if sort:
        table = sorted(table, key=lambda row: row[sort])

    lengths = {k: len(k) for k in columns}
    aligns = {k: '' for k in columns}

    clean_table = []
    for row in table:
        clean_row = {}
        for column in columns:
            value = row.get(column, '')
            if isinstance(value, float):
                value = '%.6g' % value
            value = str(value)
            if len(value) > lengths[column]:
                lengths[column] = len(value)
            if aligns[column] == '' and not is_number(value):
                aligns[column] = '-'
            clean_row[column] = value
        clean_table.append(clean_row)

    header = '  '.join('%-*s' % (lengths[c], c) for c in columns)
    lines = [header.rstrip()]
    for row in clean_table:
        cells = []
        for column in columns:
            if aligns[column] == '-':
                cells.append('%-*s' % (lengths[column], row[column]))
            else:
                cells.append('%*s' % (lengths[column], row[column]))
        lines.append('  '.join(cells).rstrip())

    text = '\n'.join(lines)
    if out is not None:
        out.write(text + '\n')
    else:
        print(text)
    return text


def env_int(var, default):
    value = os.environ.get(var)
    if value is None or value == '':
        return default
    try:
        value = int(value)
    except ValueError:
        raise ConfigException('%s must be an integer, got "%s"' % (var, value))
    if value < 1:
        raise ConfigException('%s must be at least 1, got %d' % (var, value))
    return value


def knots(n):
    '''
    The design points t_{j,n} = j/n for j = 0..n, as exact quotients so that
    they coincide bit for bit with the nodes of every refined path grid.
    '''
    return np.arange(n + 1) / n


def path_grid(grid_size):
    return np.arange(grid_size) / (grid_size - 1)


def knot_indices(grid, n):
    '''
    Positions of the knots 0, 1/n, .., 1 in ``grid``, or None when the grid
    misses any of them.
    '''
    grid = np.asarray(grid)
    targets = knots(n)
    idx = np.searchsorted(grid, targets - 1e-12)
    if np.any(idx >= len(grid)):
        return None
    if np.any(np.abs(grid[idx] - targets) > 1e-12):
        return None
    return idx
