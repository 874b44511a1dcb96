#!/usr/bin/env python3
import os
import sys
import json
import pprint
import contextlib


_OPTIONS = {
    'work_limit': 10**8,        # max inner terms per brute-force enumeration
    'threads': 1,               # worker threads for the c-series and sweeps
    'permissive': False,        # allow weights outside the validity ranges (with a warning)
    'kloosterman_method': 'auto',
}

_OPTIONS_SET = set()  # keys changed through set_options()

_OPTION_ENV = {
    'work_limit': ('SIEGEL_WORK_LIMIT', int),
    'threads': ('SIEGEL_THREADS', int),
    'permissive': ('SIEGEL_PERMISSIVE', lambda x: x.lower() in ('1', 'true', 'yes', 'on')),
}

KLOOSTERMAN_METHODS = ['auto', 'brute', 'crt', 'fast']


class NotInvertibleError(ValueError):
    """
    Raised when a residue has no inverse modulo c (gcd(a,c) != 1)
    """
    pass


class RangeError(ValueError):
    """
    Raised when (g,k) or a weight lies outside the range where a formula holds
    """
    pass


class WorkLimitError(RuntimeError):
    """
    Raised when a brute-force enumeration would exceed the configured work limit
    """
    def __init__(self, work, limit):
        super().__init__(f"enumeration needs {work} terms, which exceeds the work limit of {limit} (use --work-limit to raise it)")
        self.work = work
        self.limit = limit


class StrategyUnavailable(NotImplementedError):
    """
    Raised by a fast evaluation path that doesn't apply to its inputs,
    so that the caller can fall back to brute force.
    """
    pass


class ConsistencyError(RuntimeError):
    """
    Raised when an internal cross-check between two evaluations fails
    """
    pass


def check_dependencies(install=True):
    """
    Check if the required pip packages are available, and install them if needed.
    """
    try:
        import yaml
        import numpy
        import sympy
        import mpmath
        import tabulate
        import termcolor
        import tqdm
    except Exception as error:
        if not install:
            raise error

        import subprocess

        requirements = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'requirements.txt')
        cmd = [sys.executable, '-m', 'pip', 'install', '-r', requirements]

        print('-- Installing required packages:', cmd)
        subprocess.run(cmd, shell=False, check=True)


def get_option(key):
    """
    Return the value of a runtime option (see set_options() for the keys).
    Environment variables like SIEGEL_WORK_LIMIT override the defaults,
    but values set through set_options() take precedence over both.
    """
    if key not in _OPTIONS:
        raise KeyError(f"unknown option '{key}' (valid options are {list(_OPTIONS.keys())})")

    if key not in _OPTIONS_SET and key in _OPTION_ENV:
        env, parse = _OPTION_ENV[key]
        if env in os.environ:
            return parse(os.environ[env])

    return _OPTIONS[key]


def set_options(options={}, **kwargs):
    """
    Update the runtime options from a dict and/or keyword arguments.

    Parameters:
      work_limit (int) -- max inner terms of a brute-force Kloosterman or Gauss enumeration
      threads (int) -- number of worker threads used by the series and sweeps
      permissive (bool) -- evaluate formulas outside of their stated validity range
      kloosterman_method (str) -- one of 'auto', 'brute', 'crt', 'fast'

    Returns the dict of current options.
    """
    options = {**options, **kwargs}

    for key, value in options.items():
        if key not in _OPTIONS:
            raise KeyError(f"unknown option '{key}' (valid options are {list(_OPTIONS.keys())})")

        if value is None:
            continue

        if key in ('work_limit', 'threads'):
            value = int(value)
            if value < 1:
                raise ValueError(f"option '{key}' must be a positive integer (was {value})")
        elif key == 'kloosterman_method' and value not in KLOOSTERMAN_METHODS:
            raise ValueError(f"kloosterman_method should be one of {KLOOSTERMAN_METHODS} (was '{value}')")

        _OPTIONS[key] = value
        _OPTIONS_SET.add(key)

    log_debug('-- runtime options', _OPTIONS)
    return dict(_OPTIONS)


@contextlib.contextmanager
def temporary_options(**kwargs):
    """
    Apply set_options() inside a with-block, and restore the previous options on exit
    """
    saved = dict(_OPTIONS), set(_OPTIONS_SET)

    try:
        yield set_options(**kwargs)
    finally:
        _OPTIONS.clear()
        _OPTIONS.update(saved[0])
        _OPTIONS_SET.clear()
        _OPTIONS_SET.update(saved[1])


def load_config(path, keys=None, required=[]):
    """
    Load a JSON or YAML config file (selected by its .json, .yml, .yaml extension)

    Parameters:
      path (str) -- path to the file
      keys (list[str]) -- if specified, the keys that are allowed at the top level
      required (list[str]) -- the keys that must be present

    Returns the dict loaded from the file, or raises ValueError if it's invalid.
    """
    ext = os.path.splitext(path)[1].lower()

    with open(path) as file:
        if ext == '.json':
            try:
                config = json.load(file)
            except json.JSONDecodeError as error:
                raise ValueError(f"{path} is not valid JSON ({error})")
        elif ext == '.yml' or ext == '.yaml':
            import yaml
            try:
                config = yaml.safe_load(file)
            except yaml.YAMLError as error:
                raise ValueError(f"{path} is not valid YAML ({error})")
        else:
            raise ValueError(f"unsupported config file extension '{ext}' (expected .json, .yml, .yaml)")

    if not isinstance(config, dict):
        raise ValueError(f"{path} should contain a dict at the top level (found {type(config).__name__})")

    if keys is not None:
        unknown = [key for key in config if key not in keys]
        if unknown:
            raise ValueError(f"{path} has unknown keys {unknown} (valid keys are {keys})")

    missing = [key for key in required if key not in config]

    if missing:
        raise ValueError(f"{path} is missing required keys {missing}")

    return config


def print_table(rows, header=None, footer=None, color='green', attrs=None, file=None):
    """
    Print a table from a list[list] of rows/columns, or a 2-column dict
    where the keys are column 1, and the values are column 2.

    Header is a list of columns or rows that are inserted at the top.
    Footer is a list of columns or rows that are added to the end.

    color names and style attributes are from termcolor library:
      https://github.com/termcolor/termcolor#text-properties
    """
    from tabulate import tabulate
    from termcolor import cprint

    if isinstance(rows, dict):
        rows = [[key,value] for key, value in rows.items()]

    if header:
        if not isinstance(header[0], list):
            header = [header]
        rows = header + rows

    if footer:
        if not isinstance(footer[0], list):
            footer = [footer]
        rows = rows + footer

    cprint(tabulate(rows, tablefmt='simple_grid', numalign='center'), color, attrs=attrs, file=file)


def log_debug(*args, **kwargs):
    """
    Debug print function that only prints when VERBOSE or DEBUG environment variable is set
    """
    if os.environ.get('VERBOSE', False) or os.environ.get('DEBUG', False):
        kwargs.setdefault('file', sys.stderr)
        print(*args, **kwargs)


def pprint_debug(*args, **kwargs):
    """
    Debug print function that only prints when VERBOSE or DEBUG environment variable is set
    """
    if os.environ.get('VERBOSE', False) or os.environ.get('DEBUG', False):
        kwargs.setdefault('stream', sys.stderr)
        pprint.pprint(*args, **kwargs)
