#!/usr/bin/env python3

from . import utils

utils.check_dependencies(install=False)

from .log import *
from .arith import *
from .gauss import *
from .forms import *
from .kloosterman import *
from .bessel import *
from .poincare import *
from .bounds import *
from .sweep import *
from .utils import get_option, set_options, temporary_options, load_config, print_table
