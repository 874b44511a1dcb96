#!/usr/bin/env python3
import io
import os
import csv
import json
import math
import logging

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import tqdm

from .bounds import theorem4_bound
from .forms import HalfIntegralMatrix, JacobiDatum
from .kloosterman import kloosterman_pm
from .poincare import PoincareParams, diagonal_coefficient
from .utils import get_option, load_config, log_debug


SWEEP_KINDS = ['kloosterman', 'coefficient']

SWEEP_KEYS = ['name', 'kind', 'g', 'k', 'm', 'n_range', 'r_values', 'c_range', 'c_max', 'sign', 'max_slope']

# largest genus supported by each kind of sweep
SWEEP_MAX_GENUS = {'kloosterman': 3, 'coefficient': 2}


class SweepReport:
    """
    Rows of (parameters, magnitude, bound, ratio) over a parameter grid, with a
    log-log regression.

    Kloosterman sweeps regress log(ratio) against log(c), coefficient sweeps
    regress log(magnitude) against log(D).  Rows whose magnitude is within its
    abs_error of zero are kept in the table but left out of the regression.
    """
    def __init__(self, kind, param_names, rows, regress_x, regress_y):
        self.kind = kind
        self.param_names = list(param_names)
        self.rows = sorted(rows, key=lambda row: _sort_key(row['params'], self.param_names))
        self.regress_x = regress_x
        self.regress_y = regress_y

        for row in self.rows:
            if not (row['bound'] > 0):
                raise ValueError(f"sweep bound must be positive (row {row['params']})")
            row['ratio'] = row['magnitude'] / row['bound']

        self.max_ratio = max((row['ratio'] for row in self.rows), default=0.0)

        xs, ys = [], []
        self.excluded = 0

        for row in self.rows:
            if row['magnitude'] <= row.get('abs_error', 0.0):
                self.excluded += 1
                continue
            xs.append(row['params'][regress_x])
            ys.append(row[regress_y])

        self.slope, self.intercept, self.r_squared = log_log_regression(xs, ys)

    @property
    def regression(self):
        return (self.slope, self.intercept, self.r_squared)

    def summary(self):
        """
        The JSON summary {slope, intercept, r_squared, max_ratio} (plus row counts)
        """
        return {
            'kind': self.kind,
            'slope': self.slope,
            'intercept': self.intercept,
            'r_squared': self.r_squared,
            'max_ratio': self.max_ratio,
            'regression': f"log({self.regress_y}) ~ log({self.regress_x})",
            'rows': len(self.rows),
            'excluded': self.excluded,
        }

    def write_csv(self, file):
        """
        Write the rows as CSV (header: params..., magnitude, bound, ratio) to a path or file object
        """
        if isinstance(file, str):
            with open(file, 'w', newline='', encoding='utf-8') as f:
                return self.write_csv(f)

        writer = csv.writer(file, lineterminator='\n')
        writer.writerow(self.param_names + ['magnitude', 'bound', 'ratio'])

        for row in self.rows:
            params = [_csv_value(row['params'][name]) for name in self.param_names]
            writer.writerow(params + [repr(row['magnitude']), repr(row['bound']), repr(row['ratio'])])

    def to_csv(self):
        output = io.StringIO()
        self.write_csv(output)
        return output.getvalue()

    def write_summary(self, path):
        with open(path, 'w', encoding='utf-8') as file:
            json.dump(self.summary(), file, indent=2)

    def save(self, directory, name='sweep'):
        """
        Save <name>.csv and <name>.json under the directory, and return their paths
        """
        os.makedirs(directory, exist_ok=True)
        csv_path = os.path.join(directory, f"{name}.csv")
        json_path = os.path.join(directory, f"{name}.json")
        self.write_csv(csv_path)
        self.write_summary(json_path)
        return csv_path, json_path


def _sort_key(params, names):
    return tuple(tuple(params[name]) if isinstance(params[name], list) else params[name] for name in names)


def _csv_value(value):
    if isinstance(value, list):
        return ' '.join(str(x) for x in value)
    return value


def log_log_regression(xs, ys):
    """
    Ordinary least squares of log(y) against log(x).

    Returns:
      (slope, intercept, r_squared) -- a degenerate x (fewer than two distinct values)
                                       gives slope 0 and the mean of log(y)
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)

    if len(xs) != len(ys):
        raise ValueError(f"regression needs matching x and y (got {len(xs)} and {len(ys)})")

    if len(xs) == 0:
        return 0.0, 0.0, 0.0

    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("log-log regression needs positive data")

    lx = np.log(xs)
    ly = np.log(ys)

    if len(np.unique(lx)) < 2:
        intercept = float(np.mean(ly))
        constant = bool(np.allclose(ly, ly[0], rtol=0, atol=1e-12))
        return 0.0, intercept, 1.0 if constant else 0.0

    slope, intercept = np.polyfit(lx, ly, 1)

    residual = ly - (slope * lx + intercept)
    total = ly - np.mean(ly)
    ss_tot = float(np.dot(total, total))
    r_squared = 1.0 if ss_tot == 0 else 1.0 - float(np.dot(residual, residual)) / ss_tot

    return float(slope), float(intercept), r_squared


def _inclusive(value, name):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ValueError(f"'{name}' should be a [lo, hi] pair (was {value})")
    lo, hi = int(value[0]), int(value[1])
    if lo > hi:
        raise ValueError(f"'{name}' has lo > hi ({value})")
    return range(lo, hi + 1)


def load_family(family, k=None):
    """
    Load and validate a sweep family definition from a dict, or a .json/.yml/.yaml path
    (k overrides the weight of the family)
    """
    if isinstance(family, str):
        family = load_config(family, keys=SWEEP_KEYS, required=['g', 'm', 'n_range', 'r_values'])
    else:
        unknown = [key for key in family if key not in SWEEP_KEYS]
        if unknown:
            raise ValueError(f"sweep family has unknown keys {unknown} (valid keys are {SWEEP_KEYS})")

    family = dict(family)

    if k is not None:
        family['k'] = int(k)

    family.setdefault('kind', 'kloosterman' if 'c_range' in family else 'coefficient')

    if family['kind'] not in SWEEP_KINDS:
        raise ValueError(f"sweep kind should be one of {SWEEP_KINDS} (was '{family['kind']}')")

    m = family['m']
    if isinstance(m, list):
        m = HalfIntegralMatrix(m)
    elif not isinstance(m, HalfIntegralMatrix):
        m = HalfIntegralMatrix.from_json(m)

    family['m'] = m

    if int(family['g']) != m.g:
        raise ValueError(f"sweep family has g={family['g']} but m is {m.g}x{m.g}")

    if m.g > SWEEP_MAX_GENUS[family['kind']]:
        raise ValueError(f"{family['kind']} sweeps support g <= {SWEEP_MAX_GENUS[family['kind']]} (was {m.g})")

    family['r_values'] = [m._check_vector(r) for r in family['r_values']]

    if family['kind'] == 'kloosterman' and 'c_range' not in family:
        raise ValueError("kloosterman sweeps need a 'c_range'")

    if family['kind'] == 'coefficient' and family.get('k') is None:
        raise ValueError("coefficient sweeps need a weight 'k'")

    return family


def _data(family):
    """
    The JacobiDatum of every (n, r) in the family with D > 0
    """
    data = []

    for n in _inclusive(family['n_range'], 'n_range'):
        for r in family['r_values']:
            datum = JacobiDatum(n, r, family['m'], check=False)
            if n >= 1 and datum.D > 0:
                data.append(datum)
            else:
                log_debug(f"-- sweep:  skipping n={n} r={r} (D={datum.D})")

    return data


def _kloosterman_row(datum, c, sign):
    value = kloosterman_pm(datum.m, c, datum.n, datum.r, sign)
    bound = math.gcd(datum.D, c) * c ** ((datum.g + 1) / 2) * math.sqrt(datum.m.det2m)

    return {
        'params': {'n': datum.n, 'r': list(datum.r), 'D': datum.D, 'c': c},
        'magnitude': abs(value),
        'abs_error': value.abs_error,
        'bound': bound,
    }


def coefficient_bound(g, k, det2m, D):
    """
    The coefficient bound that a sweep row is compared against.  For g >= 2 this is
    theorem4_bound() at eps=0 (outside its weight range too); at g=1 the genus-dependent
    third summand isn't defined, and the bound is 1 + D^(1/2) / det(2m).
    """
    if g >= 2:
        return theorem4_bound(g, k, det2m, D, permissive=True)
    return 1 + math.sqrt(D) / det2m


def _coefficient_row(datum, k, c_max):
    value = diagonal_coefficient(k, datum, c_max)

    return {
        'params': {'n': datum.n, 'r': list(datum.r), 'D': datum.D},
        'magnitude': abs(value),
        'abs_error': value.abs_error,
        'bound': coefficient_bound(datum.g, k, datum.m.det2m, datum.D),
    }


def empirical_exponent_sweep(family, k=None, c_max=None, progress=True):
    """
    Evaluate every row of a sweep family and return the SweepReport.

    Parameters:
      family (dict|str) -- the family definition, or a path to it (see load_family)
      k (int) -- overrides the family's weight for coefficient sweeps
      c_max (int) -- overrides the family's truncation for coefficient sweeps
      progress (bool) -- show a tqdm progress bar
    """
    family = load_family(family, k)

    if c_max is not None:
        family['c_max'] = int(c_max)

    data = _data(family)
    threads = get_option('threads')

    if family['kind'] == 'kloosterman':
        sign = int(family.get('sign', 1))
        jobs = [(datum, c) for datum in data for c in _inclusive(family['c_range'], 'c_range')]
        evaluate = lambda job: _kloosterman_row(job[0], job[1], sign)
        param_names, regress_x, regress_y = ['n', 'r', 'D', 'c'], 'c', 'ratio'
    else:
        weight = family['k']
        limit = family.get('c_max', 100)
        if data:
            PoincareParams(weight, data[0], data[0].n, data[0].r)  # raises on an invalid weight
        jobs = data
        evaluate = lambda datum: _coefficient_row(datum, weight, limit)
        param_names, regress_x, regress_y = ['n', 'r', 'D'], 'D', 'magnitude'

    logging.info(f"running {family['kind']} sweep '{family.get('name', 'sweep')}' over {len(jobs)} rows")

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(tqdm.tqdm(pool.map(evaluate, jobs), total=len(jobs), disable=not progress))
    else:
        rows = [evaluate(job) for job in tqdm.tqdm(jobs, disable=not progress)]

    report = SweepReport(family['kind'], param_names, rows, regress_x, regress_y)
    log_debug('-- sweep summary', report.summary())
    return report
