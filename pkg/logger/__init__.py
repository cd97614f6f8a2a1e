# -*- coding: utf-8 -*-

from .logger import *
