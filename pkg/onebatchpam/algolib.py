# -*- encoding: utf-8 -*-
"""Registry of the clustering algorithms runnable from the command line and
from an experiment configuration.

Every algorithm declares its parameters with a default and a converter so
that a parameter map coming from JSON or argparse is checked the same way.
"""


from collections import namedtuple
from collections import OrderedDict

import numpy as np

from onebatchpam.batchlib import AUTO
from onebatchpam.batchlib import BatchStrategy
from onebatchpam.batchlib import as_strategy
from onebatchpam.swaplib import DEFAULT_MAX_PASSES
from onebatchpam.swaplib import DEFAULT_EPSILON
from onebatchpam.swaplib import one_batch_pam
from onebatchpam.swaplib import faster_pam
from onebatchpam.baselinelib import DEFAULT_MAX_ITERS
from onebatchpam.baselinelib import ClaraConfig
from onebatchpam.baselinelib import SeedingConfig
from onebatchpam.baselinelib import random_select
from onebatchpam.baselinelib import clara
from onebatchpam.baselinelib import alternate
from onebatchpam.baselinelib import kmeanspp_seed
from onebatchpam.baselinelib import kmc2_seed
from onebatchpam.baselinelib import ls_kmeanspp
from onebatchpam.errors import InvalidConfigError


def _is_auto(value):
    return isinstance(value, str) and value.upper() == AUTO

def _integer(value, minimum):
    if isinstance(value, (bool, np.bool_)):
        raise ValueError("expected an integer, got {!r}".format(value))
    if isinstance(value, str):
        value = int(value)
    if not isinstance(value, (int, np.integer)):
        raise ValueError("expected an integer, got {!r}".format(value))
    if value < minimum:
        raise ValueError("expected an integer >= {}, got {}"
                         .format(minimum, value))
    return int(value)

def positive_int(value):
    return _integer(value, 1)

def nonnegative_int(value):
    return _integer(value, 0)

def auto_or_positive_int(value):
    if value is None or _is_auto(value):
        return AUTO
    return positive_int(value)

def nonnegative_real(value):
    if isinstance(value, (bool, np.bool_)):
        raise ValueError("expected a real, got {!r}".format(value))
    value = float(value)
    if not np.isfinite(value) or value < 0:
        raise ValueError("expected a finite real >= 0, got {!r}"
                         .format(value))
    return value

def auto_or_positive_real(value):
    if value is None or _is_auto(value):
        return AUTO
    value = nonnegative_real(value)
    if value == 0:
        raise ValueError("expected a real > 0, got 0")
    return value

def boolean(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, str) and value.lower() in ("true", "yes", "1"):
        return True
    if isinstance(value, str) and value.lower() in ("false", "no", "0"):
        return False
    raise ValueError("expected a boolean, got {!r}".format(value))

def strategy(value):
    return as_strategy(value)

class Param(namedtuple("BaseParam", ("name", "default", "convert", "help"))):
    """One algorithm parameter: its default and its value converter."""

class Algorithm(object):

    def __init__(self, name, run, params, doc):
        self.name = name
        self._run = run
        self.params = OrderedDict((p.name, p) for p in params)
        self.doc = doc

    def resolve(self, params=None):
        """Return the full parameter map: defaults completed and values
        converted. Raise InvalidConfigError for unknown names or bad values.
        """
        if params is None:
            params = {}
        unknown = set(params) - set(self.params)
        if unknown:
            raise InvalidConfigError(
                "unknown parameter(s) for {}: {} (expected: {})"
                .format(self.name, ", ".join(sorted(unknown)),
                        ", ".join(self.params) or "none"))
        resolved = OrderedDict()
        for name, param in self.params.items():
            value = params.get(name, param.default)
            try:
                resolved[name] = param.convert(value)
            except (TypeError, ValueError) as e:
                raise InvalidConfigError("invalid value for {}.{}: {}"
                                         .format(self.name, name, e))
        return resolved

    def __call__(self, data, k, spec, seed=0, counter=None,
                 evaluate_exact=False, params=None):
        return self._run(data, k, spec, seed, counter, evaluate_exact,
                         **self.resolve(params))

    def __repr__(self):
        return "{}({!r})".format(type(self).__name__, self.name)

def _run_onebatchpam(data, k, spec, seed, counter, evaluate_exact, variant,
                     batch_size, max_passes, epsilon, eager):
    return one_batch_pam(data, k, spec, strategy=variant, m=batch_size,
                         max_passes=max_passes, epsilon=epsilon, seed=seed,
                         evaluate_exact=evaluate_exact, counter=counter,
                         eager=eager)

def _run_fasterpam(data, k, spec, seed, counter, evaluate_exact, max_passes,
                   epsilon, eager):
    return faster_pam(data, k, spec, max_passes=max_passes, seed=seed,
                      counter=counter, evaluate_exact=evaluate_exact,
                      epsilon=epsilon, eager=eager)

def _run_random(data, k, spec, seed, counter, evaluate_exact):
    return random_select(data, k, seed=seed, spec=spec, counter=counter,
                         evaluate_exact=evaluate_exact)

def _run_clara(data, k, spec, seed, counter, evaluate_exact, repetitions,
               subsample_size, max_passes):
    cfg = ClaraConfig(repetitions, subsample_size)
    return clara(data, k, spec, cfg=cfg, max_passes=max_passes, seed=seed,
                 counter=counter, evaluate_exact=evaluate_exact)

def _run_alternate(data, k, spec, seed, counter, evaluate_exact, max_iters):
    return alternate(data, k, spec, max_iters=max_iters, seed=seed,
                     counter=counter, evaluate_exact=evaluate_exact)

def _run_kmeanspp(data, k, spec, seed, counter, evaluate_exact, exponent):
    return kmeanspp_seed(data, k, spec, cfg=SeedingConfig(exponent=exponent),
                         seed=seed, counter=counter,
                         evaluate_exact=evaluate_exact)

def _run_kmc2(data, k, spec, seed, counter, evaluate_exact, exponent,
              chain_length):
    cfg = SeedingConfig(exponent=exponent, chain_length=chain_length)
    return kmc2_seed(data, k, spec, cfg=cfg, seed=seed, counter=counter,
                     evaluate_exact=evaluate_exact)

def _run_lskmeanspp(data, k, spec, seed, counter, evaluate_exact, exponent,
                    local_search_steps):
    cfg = SeedingConfig(exponent=exponent,
                        local_search_steps=local_search_steps)
    return ls_kmeanspp(data, k, spec, cfg=cfg, seed=seed, counter=counter,
                       evaluate_exact=evaluate_exact)

_MAX_PASSES = Param("max_passes", DEFAULT_MAX_PASSES, positive_int,
                    "Maximum number of swap passes.")
_EPSILON = Param("epsilon", DEFAULT_EPSILON, nonnegative_real,
                 "Relative gain a swap must exceed.")
_EAGER = Param("eager", True, boolean,
               "Swap as soon as an improving candidate is met.")
_EXPONENT = Param("exponent", AUTO, auto_or_positive_real,
                  "Exponent p of the d^p sampling rule.")

ALGORITHMS = OrderedDict((a.name, a) for a in (
    Algorithm("onebatchpam", _run_onebatchpam, (
        Param("variant", BatchStrategy.nniw.value, strategy,
              "Batch sampling strategy."),
        Param("batch_size", AUTO, auto_or_positive_int,
              "Batch size m (AUTO is min(n, 100 ln(kn)))."),
        _MAX_PASSES, _EPSILON, _EAGER,
    ), "Swap search on the whole dataset against one sampled batch."),
    Algorithm("fasterpam", _run_fasterpam,
              (_MAX_PASSES, _EPSILON, _EAGER),
              "Swap search against the full dataset."),
    Algorithm("random", _run_random, (),
              "Uniform random medoids."),
    Algorithm("clara", _run_clara, (
        Param("repetitions", 5, positive_int,
              "Number of subsamples I."),
        Param("subsample_size", AUTO, auto_or_positive_int,
              "Subsample size s (AUTO is 80 + 4k)."),
        _MAX_PASSES,
    ), "FasterPAM on subsamples, best exact objective kept."),
    Algorithm("alternate", _run_alternate, (
        Param("max_iters", DEFAULT_MAX_ITERS, positive_int,
              "Maximum number of iterations."),
    ), "Alternate assignment and medoid update."),
    Algorithm("kmeanspp", _run_kmeanspp, (_EXPONENT,),
              "k-means++ seeding."),
    Algorithm("kmc2", _run_kmc2, (
        _EXPONENT,
        Param("chain_length", 20, positive_int,
              "Length L of the Metropolis chains."),
    ), "k-means++ approximated by Metropolis chains."),
    Algorithm("lskmeanspp", _run_lskmeanspp, (
        _EXPONENT,
        Param("local_search_steps", 5, nonnegative_int,
              "Number Z of local search steps."),
    ), "k-means++ followed by single swap local search."),
))

def get_algorithm(name):
    try:
        return ALGORITHMS[name]
    except KeyError:
        raise InvalidConfigError("unknown algorithm {!r} (expected one of: {})"
                                 .format(name, ", ".join(ALGORITHMS)))

def params_to_json(params):
    """Render a resolved parameter map with JSON friendly values."""
    out = OrderedDict()
    for name, value in params.items():
        if isinstance(value, BatchStrategy):
            value = value.value
        out[name] = value
    return out
