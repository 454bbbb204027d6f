# -*- encoding: utf-8 -*-
"""Utility routines
"""


import os
import json
from enum import Enum

import numpy as np


class ChoiceEnum(Enum):
    """Enumeration whose values are the strings accepted on the command line."""

    @classmethod
    def choices(cls):
        return [member.value for member in cls]

    @classmethod
    def from_string(cls, string):
        for member in cls:
            if member.value == string or member.name == string:
                return member
        raise ValueError("invalid {}: {!r} (expected one of: {})"
                         .format(cls.__name__, string,
                                 ", ".join(cls.choices())))

def mkdir_p(path):
    if not path:
        return
    try:
        os.makedirs(path)
    except FileExistsError:
        pass

def json_default(obj):
    """Make numpy scalars and arrays JSON serializable."""
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Enum):
        return obj.value
    raise TypeError("object of type {} is not JSON serializable"
                    .format(type(obj).__name__))

def dump_json(obj, stream):
    json.dump(obj, stream, default=json_default, indent=2, sort_keys=True,
              allow_nan=False)
    stream.write("\n")

def finite_or_none(value):
    if value is None:
        return None
    value = float(value)
    if not np.isfinite(value):
        return None
    return value
