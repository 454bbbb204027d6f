# -*- encoding: utf-8 -*-
"""Competitors of OneBatchPAM sharing its dissimilarity counters.

All of them return a RunResult whose dissim_evals is exactly the number of
pair evaluations performed, so that costs compare across algorithms.
"""


import logging

import numpy as np

from onebatchpam.datalib import make_rng
from onebatchpam.dissimlib import EvalCounter
from onebatchpam.dissimlib import as_dissimilarity
from onebatchpam.dissimlib import cross_dissim_matrix
from onebatchpam.dissimlib import rows_dissim_matrix
from onebatchpam.swaplib import RunResult
from onebatchpam.swaplib import check_k
from onebatchpam.swaplib import exact_objective
from onebatchpam.swaplib import faster_pam
from onebatchpam.swaplib import DEFAULT_MAX_PASSES
from onebatchpam.stopwatch import StopWatch
from onebatchpam.batchlib import AUTO
from onebatchpam.errors import InvalidConfigError

LOGGER = logging.getLogger(__name__)

DEFAULT_MAX_ITERS = 100

def _is_auto(value):
    return value is None or (isinstance(value, str) and value.upper() == AUTO)

class ClaraConfig(object):
    """Number of repetitions and subsample size (AUTO is 80 + 4k)."""

    def __init__(self, repetitions=5, subsample_size=AUTO):
        if not isinstance(repetitions, (int, np.integer)) or repetitions < 1:
            raise InvalidConfigError("clara repetitions must be >= 1, got {!r}"
                                     .format(repetitions))
        if not _is_auto(subsample_size) \
           and (not isinstance(subsample_size, (int, np.integer))
                or subsample_size < 1):
            raise InvalidConfigError("clara subsample size must be a positive "
                                     "integer or AUTO, got {!r}"
                                     .format(subsample_size))
        self.repetitions = int(repetitions)
        self.subsample_size = subsample_size

    def resolve_subsample_size(self, n, k):
        if _is_auto(self.subsample_size):
            s = 80 + 4 * k
        else:
            s = int(self.subsample_size)
        s = min(s, n)
        if s < k:
            raise InvalidConfigError("clara subsample size {} is smaller "
                                     "than k={}".format(s, k))
        return s

class SeedingConfig(object):
    """Exponent of the d^p rule, kmc2 chain length and LS steps."""

    def __init__(self, exponent=AUTO, chain_length=20, local_search_steps=5):
        if not _is_auto(exponent) and not float(exponent) > 0:
            raise InvalidConfigError("exponent must be > 0 or AUTO, got {!r}"
                                     .format(exponent))
        if not isinstance(chain_length, (int, np.integer)) or chain_length < 1:
            raise InvalidConfigError("chain length must be >= 1, got {!r}"
                                     .format(chain_length))
        if not isinstance(local_search_steps, (int, np.integer)) \
           or local_search_steps < 0:
            raise InvalidConfigError("local search steps must be >= 0, "
                                     "got {!r}".format(local_search_steps))
        self.exponent = exponent
        self.chain_length = int(chain_length)
        self.local_search_steps = int(local_search_steps)

    def resolve_exponent(self, spec):
        if _is_auto(self.exponent):
            return as_dissimilarity(spec).default_exponent
        return float(self.exponent)

def _finish(algorithm, data, medoids, spec, counter, before, stopwatch,
            evaluate_exact, est_objective=None, swaps=0, passes=0,
            history=()):
    wall_millis = stopwatch.total_millis
    exact = None
    if evaluate_exact:
        exact = exact_objective(data, medoids, spec, counter)
    return RunResult(algorithm=algorithm,
                     medoids=tuple(int(i) for i in medoids),
                     est_objective=est_objective,
                     exact_objective=exact,
                     swaps=swaps,
                     passes=passes,
                     dissim_evals=counter.count - before,
                     wall_millis=wall_millis,
                     history=tuple(history))

def random_select(data, k, seed=0, spec="l1", counter=None,
                  evaluate_exact=False):
    """Uniform k-subset; no evaluation besides the optional exact objective."""
    k = check_k(k, data.n)
    if counter is None:
        counter = EvalCounter()
    before = counter.count
    stopwatch = StopWatch().start()
    medoids = make_rng(seed).choice(data.n, size=k, replace=False)
    return _finish("random", data, medoids, spec, counter, before, stopwatch,
                   evaluate_exact)

def clara(data, k, spec, cfg=None, max_passes=DEFAULT_MAX_PASSES, seed=0,
          counter=None, evaluate_exact=True):
    """FasterPAM on I uniform subsamples, best exact objective kept.

    Each repetition costs s*s evaluations for the subsample search plus n*k
    for its exact evaluation on the whole dataset. The exact objective is part
    of the algorithm, so *evaluate_exact* adds nothing.
    """
    if cfg is None:
        cfg = ClaraConfig()
    spec = as_dissimilarity(spec)
    k = check_k(k, data.n)
    s = cfg.resolve_subsample_size(data.n, k)
    if counter is None:
        counter = EvalCounter()
    rng = make_rng(seed)
    before = counter.count
    stopwatch = StopWatch().start()
    best = None
    best_objective = np.inf
    history = []
    swaps = 0
    passes = 0
    for repetition in range(cfg.repetitions):
        sample = np.sort(rng.choice(data.n, size=s, replace=False))
        result = faster_pam(data.subset(sample), k, spec,
                            max_passes=max_passes, seed=rng, counter=counter)
        medoids = sample[list(result.medoids)]
        objective = exact_objective(data, medoids, spec, counter)
        history.append(objective)
        swaps += result.swaps
        passes += result.passes
        LOGGER.debug("clara repetition %d: objective %g",
                     repetition, objective)
        if objective < best_objective:
            best_objective = objective
            best = medoids
    wall_millis = stopwatch.total_millis
    return RunResult(algorithm="clara",
                     medoids=tuple(int(i) for i in best),
                     est_objective=None,
                     exact_objective=best_objective,
                     swaps=swaps,
                     passes=passes,
                     dissim_evals=counter.count - before,
                     wall_millis=wall_millis,
                     history=tuple(history))

def alternate(data, k, spec, max_iters=DEFAULT_MAX_ITERS, seed=0,
              counter=None, evaluate_exact=False):
    """k-means style alternation of assignment and per-cluster medoid update.

    An iteration costs n*k evaluations for the assignment plus the sum of the
    squared cluster sizes for the medoid update.
    """
    spec = as_dissimilarity(spec)
    k = check_k(k, data.n)
    if counter is None:
        counter = EvalCounter()
    rng = make_rng(seed)
    before = counter.count
    stopwatch = StopWatch().start()
    medoids = rng.choice(data.n, size=k, replace=False)
    slots = np.arange(k)
    history = []
    changes = 0
    iterations = 0
    while iterations < max_iters:
        iterations += 1
        distances = cross_dissim_matrix(spec, data, medoids, counter)
        labels = np.argmin(distances, axis=1)
        # A medoid always serves its own cluster, even against duplicates.
        labels[medoids] = slots
        history.append(float(distances[np.arange(data.n), labels].mean()))
        updated = medoids.copy()
        for slot in slots:
            members = np.flatnonzero(labels == slot)
            if members.size == 0:
                continue
            within = rows_dissim_matrix(spec, data, members, members, counter)
            updated[slot] = members[np.argmin(within.sum(axis=1))]
        changed = int((updated != medoids).sum())
        medoids = updated
        LOGGER.debug("alternate iteration %d: %d medoid(s) moved, "
                     "objective %g", iterations, changed, history[-1])
        if changed == 0:
            break
        changes += changed
    return _finish("alternate", data, medoids, spec, counter, before,
                   stopwatch, evaluate_exact, swaps=changes,
                   passes=iterations, history=history)

def _sample_d_power(rng, mass, chosen_mask):
    """Draw a row with probability proportional to *mass*.

    When the whole mass is zero, fall back to a uniform draw over the rows not
    yet chosen.
    """
    total = mass.sum()
    if total > 0:
        return int(rng.choice(mass.size, p=mass / total))
    return int(rng.choice(np.flatnonzero(~chosen_mask)))

def _kmeanspp(data, k, spec, exponent, rng, counter, keep_last=False):
    """Return (centers, distances) where distances[:, l] are the distances
    to the l-th center. The last column is only computed with *keep_last*.
    """
    n = data.n
    centers = [int(rng.integers(n))]
    chosen = np.zeros(n, dtype=bool)
    chosen[centers[0]] = True
    columns = []
    nearest = None
    for _ in range(1, k):
        column = cross_dissim_matrix(spec, data, centers[-1:], counter)[:, 0]
        columns.append(column)
        nearest = column if nearest is None else np.minimum(nearest, column)
        mass = nearest ** exponent
        mass[chosen] = 0.0
        center = _sample_d_power(rng, mass, chosen)
        centers.append(center)
        chosen[center] = True
    if keep_last:
        columns.append(cross_dissim_matrix(spec, data, centers[-1:],
                                           counter)[:, 0])
    distances = np.column_stack(columns) if columns else np.empty((n, 0))
    return np.array(centers, dtype=np.intp), distances

def kmeanspp_seed(data, k, spec, cfg=None, seed=0, counter=None,
                  evaluate_exact=False):
    """k-means++ seeding with the d^p rule; n*(k-1) evaluations."""
    if cfg is None:
        cfg = SeedingConfig()
    spec = as_dissimilarity(spec)
    k = check_k(k, data.n)
    if counter is None:
        counter = EvalCounter()
    before = counter.count
    stopwatch = StopWatch().start()
    centers, _ = _kmeanspp(data, k, spec, cfg.resolve_exponent(spec),
                           make_rng(seed), counter)
    return _finish("kmeanspp", data, centers, spec, counter, before,
                   stopwatch, evaluate_exact)

def kmc2_seed(data, k, spec, cfg=None, seed=0, counter=None,
              evaluate_exact=False):
    """k-means++ approximated by Metropolis chains of length L.

    Proposals are uniform over the rows not chosen yet. Each chain state is
    evaluated against the current centers, so choosing the c+1-th center
    costs L*c evaluations and the whole seeding L*k*(k-1)/2.
    """
    if cfg is None:
        cfg = SeedingConfig()
    spec = as_dissimilarity(spec)
    k = check_k(k, data.n)
    exponent = cfg.resolve_exponent(spec)
    if counter is None:
        counter = EvalCounter()
    rng = make_rng(seed)
    before = counter.count
    stopwatch = StopWatch().start()
    n = data.n
    centers = [int(rng.integers(n))]
    chosen = np.zeros(n, dtype=bool)
    chosen[centers[0]] = True
    for _ in range(1, k):
        pool = np.flatnonzero(~chosen)
        proposals = rng.choice(pool, size=cfg.chain_length, replace=True)
        uniforms = rng.random(cfg.chain_length)
        mass = rows_dissim_matrix(spec, data, proposals, centers,
                                  counter).min(axis=1) ** exponent
        current = 0
        for step in range(1, cfg.chain_length):
            if mass[current] == 0 \
               or uniforms[step] * mass[current] < mass[step]:
                current = step
        center = int(proposals[current])
        centers.append(center)
        chosen[center] = True
    return _finish("kmc2", data, centers, spec, counter, before, stopwatch,
                   evaluate_exact)

def ls_kmeanspp(data, k, spec, cfg=None, seed=0, counter=None,
                evaluate_exact=False):
    """k-means++ followed by Z single-swap local search steps.

    Each step samples a candidate by the d^p rule, evaluates the objective of
    swapping it with each center and keeps the best swap when it strictly
    improves. Cost: n*(k-1) for seeding, n for the last center's column when
    Z > 0, and n per step.
    """
    if cfg is None:
        cfg = SeedingConfig()
    spec = as_dissimilarity(spec)
    k = check_k(k, data.n)
    exponent = cfg.resolve_exponent(spec)
    if counter is None:
        counter = EvalCounter()
    rng = make_rng(seed)
    before = counter.count
    stopwatch = StopWatch().start()
    steps = cfg.local_search_steps
    centers, distances = _kmeanspp(data, k, spec, exponent, rng, counter,
                                   keep_last=steps > 0)
    swaps = 0
    history = []
    if steps > 0:
        chosen = np.zeros(data.n, dtype=bool)
        chosen[centers] = True
        current = distances.min(axis=1).mean()
        for _ in range(steps):
            mass = distances.min(axis=1) ** exponent
            mass[chosen] = 0.0
            candidate = _sample_d_power(rng, mass, chosen)
            column = cross_dissim_matrix(spec, data, [candidate],
                                         counter)[:, 0]
            best_slot, best_objective = None, current
            for slot in range(k):
                others = np.delete(distances, slot, axis=1)
                nearest = column if others.shape[1] == 0 \
                    else np.minimum(others.min(axis=1), column)
                objective = nearest.mean()
                if objective < best_objective:
                    best_slot, best_objective = slot, objective
            if best_slot is not None:
                chosen[centers[best_slot]] = False
                chosen[candidate] = True
                centers[best_slot] = candidate
                distances[:, best_slot] = column
                current = best_objective
                swaps += 1
            history.append(float(current))
    return _finish("lskmeanspp", data, centers, spec, counter, before,
                   stopwatch, evaluate_exact, swaps=swaps,
                   passes=steps, history=history)
