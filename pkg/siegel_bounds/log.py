#!/usr/bin/env python3
import os
import logging
import datetime

import termcolor

from .utils import log_debug


# add custom logging.SUCCESS level and logging.success() function
logging.SUCCESS = 35 # https://docs.python.org/3/library/logging.html#logging-levels

# default root for sweep and benchmark output (overridden by SIEGEL_LOG_DIR or set_log_dir)
_LOG_ROOT = os.environ.get('SIEGEL_LOG_DIR', os.path.join(os.path.expanduser('~'), '.cache', 'siegel_bounds', 'logs'))
_LOG_DIRS = {}
_LOG_TYPES = ['root', 'sweep', 'benchmark']


class LogFormatter(logging.Formatter):
    """
    Colorized log formatter (inspired from https://stackoverflow.com/a/56944256)
    Use LogFormatter.config() to enable it with the desired logging level.
    """
    DefaultFormat = "%(asctime)s | %(levelname)s | %(message)s"
    DefaultDateFormat = "%H:%M:%S"

    DefaultColors = {
        logging.DEBUG: ('light_grey', 'dark'),
        logging.INFO: None,
        logging.WARNING: 'yellow',
        logging.SUCCESS: 'green',
        logging.ERROR: 'red',
        logging.CRITICAL: 'red'
    }

    @staticmethod
    def config(level='info', format=DefaultFormat, datefmt=DefaultDateFormat, colors=DefaultColors, **kwargs):
        """
        Configure the root logger with formatting and color settings.

        Parameters:
          level (str|int) -- Either the log level name or number
          format (str) -- Message formatting attributes (https://docs.python.org/3/library/logging.html#logrecord-attributes)
          datefmt (str) -- Date/time formatting string
          colors (dict) -- A dict with keys for each logging level that specify the color name to use for those messages.
                           If colors is None, then colorization will be disabled in the log.
          kwargs (dict) -- Additional arguments passed to logging.basicConfig()
        """
        add_success_level()

        if isinstance(level, str):
            level = getattr(logging, level.upper(), logging.INFO)

        log_handler = logging.StreamHandler()
        log_handler.setFormatter(LogFormatter(format=format, datefmt=datefmt, colors=colors))

        logging.basicConfig(handlers=[log_handler], level=level, force=True, **kwargs)

    def __init__(self, format=DefaultFormat, datefmt=DefaultDateFormat, colors=DefaultColors):
        """
        @internal it's recommended to use LogFormatter.config() above
        """
        super().__init__(fmt=format, datefmt=datefmt)
        self.formatters = {}

        for level in self.DefaultColors:
            if colors is not None and level in colors and colors[level] is not None:
                color = colors[level]
                attrs = None

                if not isinstance(color, str):
                    attrs = color[1:]
                    color = color[0]

                fmt = termcolor.colored(format, color, attrs=attrs)
            else:
                fmt = format

            self.formatters[level] = logging.Formatter(fmt=fmt, datefmt=datefmt)

    def format(self, record):
        """
        Implementation of logging.Formatter record formatting function
        """
        formatter = self.formatters.get(record.levelno)

        if formatter is None:
            return super().format(record)

        return formatter.format(record)


def add_success_level():
    """
    Register the SUCCESS level name and the logging.success() function.
    """
    logging.addLevelName(logging.SUCCESS, "SUCCESS")

    def log_success(*args, **kwargs):
        logging.log(logging.SUCCESS, *args, **kwargs)

    logging.success = log_success


def log_dir(type='root', create=True):
    """
    Return the path to the output directory for sweeps and benchmarks.
    type can be:  root, sweep, benchmark

    The default root is ~/.cache/siegel_bounds/logs/<timestamp> (or $SIEGEL_LOG_DIR/<timestamp>),
    and it's only created the first time that it gets used.
    """
    if type not in _LOG_TYPES:
        raise ValueError(f"log dir type should be one of {_LOG_TYPES} (was '{type}')")

    if 'root' not in _LOG_DIRS:
        set_log_dir(os.path.join(_LOG_ROOT, datetime.datetime.now().strftime('%Y%m%d_%H%M%S')), create=False)

    path = _LOG_DIRS[type]

    if create:
        os.makedirs(path, exist_ok=True)

    return path


def set_log_dir(path, type='root', create=True):
    """
    Set the path to the output directory, and create it if needed.
    Setting the root also resets the sweep and benchmark subdirectories.
    """
    if type not in _LOG_TYPES:
        raise ValueError(f"log dir type should be one of {_LOG_TYPES} (was '{type}')")

    _LOG_DIRS[type] = path
    log_debug(f"-- log dir ({type}):  {path}")

    if create:
        os.makedirs(path, exist_ok=True)

    if type == 'root':
        set_log_dir(os.path.join(path, 'sweep'), 'sweep', create)
        set_log_dir(os.path.join(path, 'benchmark'), 'benchmark', create)


add_success_level()
