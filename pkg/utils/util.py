# -*- coding: utf-8 -*-

import json
from pathlib import Path
from collections import OrderedDict
from fractions import Fraction


def ensure_dir(dirname):
    dirname = Path(dirname)
    if not dirname.is_dir():
        dirname.mkdir(parents=True, exist_ok=False)


def read_json(fname):
    fname = Path(fname)
    with fname.open('rt', encoding='utf-8') as handle:
        return json.load(handle, object_hook=OrderedDict)


def write_json(content, fname):
    fname = Path(fname)
    with fname.open('wt', encoding='utf-8') as handle:
        json.dump(content, handle, indent=4, sort_keys=False, ensure_ascii=False)


def fraction_to_decimal(value: Fraction, digits: int = 3) -> str:
    ''' render an exact rational as a fixed-point decimal string, half-up rounding. '''
    scale = 10 ** digits
    scaled = value * scale
    rounded = int(scaled + Fraction(1, 2)) if scaled >= 0 else -int(-scaled + Fraction(1, 2))
    sign = '-' if rounded < 0 else ''
    whole, frac = divmod(abs(rounded), scale)
    if digits == 0:
        return f'{sign}{whole}'
    return f'{sign}{whole}.{frac:0{digits}d}'
