# -*- coding: utf-8 -*-

from .model import *
from .loader import load_house, save_house, house_from_document, house_to_document
from .render import Representation, render, render_room
from .actions import *
from .state import apply_outcome
