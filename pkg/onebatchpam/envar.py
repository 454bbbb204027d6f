# -*- encoding: utf-8 -*-
"""Environment variable name.
"""

_PREFIX = "ONEBATCHPAM"
def _mkvar(name):
    return "_".join((_PREFIX, name))

LOG_LEVEL = _mkvar("LOG_LEVEL")
JOBS = _mkvar("JOBS")
