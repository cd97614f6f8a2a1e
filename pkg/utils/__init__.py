# -*- coding: utf-8 -*-

from .util import *
from .errors import *
