# -*- encoding: utf-8 -*-
"""FasterPAM-style swap local search on a batch estimate of the objective.

The search space is the whole dataset (every row is a swap candidate) while
the objective is only estimated on the batch columns. With a full uniform
batch (m = n) the estimate is the exact objective and the search is FasterPAM.
"""


import logging
from collections import namedtuple

import numpy as np

from onebatchpam.datalib import make_rng
from onebatchpam.dissimlib import EvalCounter
from onebatchpam.dissimlib import as_dissimilarity
from onebatchpam.dissimlib import check_indices
from onebatchpam.dissimlib import cross_dissim_matrix
from onebatchpam.batchlib import BatchStrategy
from onebatchpam.batchlib import AUTO
from onebatchpam.batchlib import as_strategy
from onebatchpam.batchlib import resolve_batch_size
from onebatchpam.batchlib import sample_batch
from onebatchpam.stopwatch import StopWatch
from onebatchpam.errors import InvalidKError
from onebatchpam.errors import DebiasRequiresKAtLeast2Error
from onebatchpam.errors import NonFiniteError
from onebatchpam.errors import CandidateIsMedoidError

LOGGER = logging.getLogger(__name__)

DEFAULT_MAX_PASSES = 10
DEFAULT_EPSILON = 0.0

# Number of matrix entries evaluated at once when scanning candidates.
BLOCK_ENTRIES = 1 << 18

# Gains at or below this fraction of the batch sum are rounding noise.
GAIN_RTOL = 1e-12

def check_k(k, n):
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise InvalidKError(k, n)
    return int(k)

class MedoidSet(object):
    """k distinct row indices; slot l holds the l-th medoid."""

    def __init__(self, indices, n):
        indices = check_indices(indices, n)
        if indices.size < 1 or indices.size > n:
            raise InvalidKError(indices.size, n)
        mask = np.zeros(n, dtype=bool)
        mask[indices] = True
        if mask.sum() != indices.size:
            raise InvalidKError(indices.size, n)
        self.indices = indices.copy()
        self.mask = mask

    @property
    def k(self):
        return self.indices.size

    def __len__(self):
        return self.indices.size

    def __iter__(self):
        return iter(self.indices.tolist())

    def __contains__(self, row):
        return bool(self.mask[row])

    def is_medoid(self, row):
        return bool(self.mask[row])

    def swap(self, slot, row):
        """Replace the medoid of *slot* by *row*; return the removed row."""
        if self.mask[row]:
            raise CandidateIsMedoidError(row)
        old = int(self.indices[slot])
        self.mask[old] = False
        self.mask[row] = True
        self.indices[slot] = row
        return old

    def as_tuple(self):
        return tuple(int(i) for i in self.indices)

    def copy(self):
        return MedoidSet(self.indices, self.mask.size)

    def __repr__(self):
        return "{}({})".format(type(self).__name__, self.as_tuple())

def as_indices(medoids):
    if isinstance(medoids, MedoidSet):
        return medoids.indices
    return np.asarray(medoids, dtype=np.intp).reshape(-1)

def _top_two(block):
    """Nearest and second nearest slot of each column; ties to smallest slot."""
    order = np.argsort(block, axis=0, kind="stable")
    near = order[0]
    sec = order[1]
    columns = np.arange(block.shape[1])
    return near, sec, block[near, columns], block[sec, columns]

class NeighborCache(object):
    """Per batch column nearest/second nearest medoid slots and distances.

    removal_gain[l] is the (non-positive) change of the batch sum when slot l
    is removed and every column it serves falls back to its second nearest
    medoid.
    """

    def __init__(self, medoids, near, sec, d_near, d_sec):
        self.medoids = medoids
        self.near = near
        self.sec = sec
        self.d_near = d_near
        self.d_sec = d_sec
        self._refresh()

    @classmethod
    def build(cls, batch, medoids):
        if medoids.k < 2:
            raise InvalidKError(medoids.k, batch.n)
        near, sec, d_near, d_sec = _top_two(batch.matrix[medoids.indices])
        return cls(medoids, near, sec, d_near, d_sec)

    @property
    def k(self):
        return self.medoids.k

    def _refresh(self):
        k = self.k
        self.removal_gain = np.bincount(self.near,
                                        weights=self.d_near - self.d_sec,
                                        minlength=k)
        self.finite = bool(np.isfinite(self.d_sec).all())
        counts = np.bincount(self.near, minlength=k)
        self._order = np.argsort(self.near, kind="stable")
        self._present = np.flatnonzero(counts)
        self._starts = (np.cumsum(counts) - counts)[self._present]

    @property
    def estimate_sum(self):
        """m times the batch estimate of the current medoids."""
        return float(self.d_near.sum())

    def slot_sums(self, values):
        """Sum the columns of *values* (b x m) by nearest slot (b x k)."""
        out = np.zeros((values.shape[0], self.k))
        if self._present.size:
            out[:, self._present] = np.add.reduceat(values[:, self._order],
                                                    self._starts, axis=1)
        return out

    def update(self, batch, slot):
        """Bring the cache up to date after the medoid of *slot* changed."""
        near, sec = self.near, self.sec
        d_near, d_sec = self.d_near, self.d_sec
        d_new = batch.matrix[self.medoids.indices[slot]]
        affected = (near == slot) | (sec == slot)
        kept = ~affected
        first = kept & ((d_new < d_near)
                        | ((d_new == d_near) & (slot < near)))
        second = kept & ~first & ((d_new < d_sec)
                                  | ((d_new == d_sec) & (slot < sec)))
        sec[first] = near[first]
        d_sec[first] = d_near[first]
        near[first] = slot
        d_near[first] = d_new[first]
        sec[second] = slot
        d_sec[second] = d_new[second]
        columns = np.flatnonzero(affected)
        if columns.size:
            block = batch.matrix[np.ix_(self.medoids.indices, columns)]
            (near[columns], sec[columns],
             d_near[columns], d_sec[columns]) = _top_two(block)
        self._refresh()

    def same_as(self, other):
        return all(np.array_equal(getattr(self, name), getattr(other, name))
                   for name in ("near", "sec", "d_near", "d_sec",
                                "removal_gain"))

def _split_gains(batch, cache, rows):
    """Return (shared, per_slot) such that the gain of swapping row
    rows[r] into slot l is shared[r] + per_slot[r, l].

    The gain is m times the decrease of the batch estimate. The shared part is
    what the columns gain by moving to x_i; the per slot part is
    removal_gain[l] corrected on the columns served by l that x_i serves
    better than their second nearest medoid.
    """
    d = batch.matrix[rows]
    d_near = cache.d_near
    d_sec = cache.d_sec
    shared = np.maximum(d_near - d, 0.0).sum(axis=1)
    if cache.finite:
        correction = np.where(d < d_near, d_sec - d_near,
                              np.where(d < d_sec, d_sec - d, 0.0))
        per_slot = cache.removal_gain + cache.slot_sums(correction)
    else:
        # A debiased batch with an infinite second distance: summing the
        # per-column loss directly keeps inf - inf out of the way.
        loss = d_near - np.minimum(d, d_sec) - np.maximum(d_near - d, 0.0)
        per_slot = cache.slot_sums(loss)
    return shared, per_slot

def candidate_gains(batch, cache, rows):
    """Best slot (ties to the smallest) and gain for each of *rows*."""
    shared, per_slot = _split_gains(batch, cache, rows)
    best = np.argmax(per_slot, axis=1)
    gains = shared + per_slot[np.arange(len(rows)), best]
    return best, gains

def slot_gains(batch, cache, candidate_row):
    """Gain of swapping *candidate_row* into each slot (k values)."""
    if cache.medoids.is_medoid(candidate_row):
        raise CandidateIsMedoidError(candidate_row)
    shared, per_slot = _split_gains(batch, cache, np.array([candidate_row]))
    return shared[0] + per_slot[0]

def swap_gain_scan(batch, cache, candidate_row):
    """Return (best_slot, gain) of swapping *candidate_row* into the medoids."""
    if cache.medoids.is_medoid(candidate_row):
        raise CandidateIsMedoidError(candidate_row)
    best, gains = candidate_gains(batch, cache, np.array([candidate_row]))
    return int(best[0]), float(gains[0])

def _block_size(batch):
    return max(1, min(batch.n, BLOCK_ENTRIES // max(1, batch.m)))

def _apply_swap(batch, medoids, cache, slot, row, gain, on_swap):
    removed = medoids.swap(slot, row)
    cache.update(batch, slot)
    LOGGER.debug("swap slot %d: row %d -> row %d (gain %g)",
                 slot, removed, row, gain)
    if on_swap is not None:
        on_swap(slot, row, gain)

def acceptance_threshold(estimate_sum, epsilon=DEFAULT_EPSILON):
    """Smallest gain a swap must exceed to be accepted."""
    scale = max(estimate_sum, np.finfo(np.float64).tiny)
    return epsilon * estimate_sum + GAIN_RTOL * scale

def run_swap_pass(batch, medoids, cache, eager=True, epsilon=DEFAULT_EPSILON,
                  on_swap=None):
    """Scan every non-medoid row once and return the number of swaps.

    A swap is accepted when its gain exceeds acceptance_threshold() of the
    current batch sum. Eager passes swap as soon as an accepted candidate is
    met and go on with the next row; otherwise only the best candidate of the
    pass is swapped.
    """
    n = batch.n
    block = _block_size(batch)
    swaps = 0
    start = 0
    best_gain, best_row, best_slot = -np.inf, None, None
    while start < n:
        stop = min(n, start + block)
        rows = np.arange(start, stop)
        rows = rows[~medoids.mask[rows]]
        if rows.size == 0:
            start = stop
            continue
        slots, gains = candidate_gains(batch, cache, rows)
        if eager:
            threshold = acceptance_threshold(cache.estimate_sum, epsilon)
            hits = np.flatnonzero(gains > threshold)
            if hits.size == 0:
                start = stop
                continue
            hit = hits[0]
            _apply_swap(batch, medoids, cache, int(slots[hit]),
                        int(rows[hit]), float(gains[hit]), on_swap)
            swaps += 1
            start = int(rows[hit]) + 1
        else:
            hit = int(np.argmax(gains))
            if gains[hit] > best_gain:
                best_gain = float(gains[hit])
                best_row = int(rows[hit])
                best_slot = int(slots[hit])
            start = stop
    if not eager and best_row is not None \
       and best_gain > acceptance_threshold(cache.estimate_sum, epsilon):
        _apply_swap(batch, medoids, cache, best_slot, best_row, best_gain,
                    on_swap)
        swaps = 1
    return swaps

def swap_search(batch, medoids, max_passes=DEFAULT_MAX_PASSES,
                epsilon=DEFAULT_EPSILON, eager=True, on_swap=None):
    """Run passes until one performs no swap or *max_passes* is reached.

    Return (swaps, passes, history) where history holds the batch estimate
    after each pass.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0, got {!r}".format(epsilon))
    cache = NeighborCache.build(batch, medoids)
    swaps = 0
    passes = 0
    history = []
    while passes < max_passes:
        done = run_swap_pass(batch, medoids, cache, eager=eager,
                             epsilon=epsilon, on_swap=on_swap)
        passes += 1
        swaps += done
        history.append(cache.estimate_sum / batch.m)
        LOGGER.debug("pass %d: %d swap(s), estimate %g",
                     passes, done, history[-1])
        if done == 0:
            break
    return swaps, passes, history

def estimated_objective(batch, medoids):
    """Mean over batch columns of the (weighted) distance to the medoids."""
    rows = batch.matrix[as_indices(medoids)]
    value = float(rows.min(axis=0).mean())
    if not np.isfinite(value):
        raise NonFiniteError("batch estimate")
    return value

def exact_objective(data, medoids, spec, counter):
    """Mean over all rows of the distance to the nearest medoid (n*k evals)."""
    matrix = cross_dissim_matrix(spec, data, as_indices(medoids), counter)
    return float(matrix.min(axis=1).mean())

def one_medoid(batch):
    """Row minimizing the batch estimate as a single medoid."""
    return int(np.argmin(batch.matrix.sum(axis=1)))

class RunResult(namedtuple("BaseRunResult",
                           ("algorithm", "medoids", "est_objective",
                            "exact_objective", "swaps", "passes",
                            "dissim_evals", "wall_millis", "history"))):
    """Outcome of one clustering run.

    est_objective is the batch estimate for the swap engine and None for
    algorithms without a batch; exact_objective is None unless evaluated.
    """

    def to_dict(self):
        d = self._asdict()
        d["medoids"] = list(self.medoids)
        d["history"] = list(self.history)
        return d

def one_batch_pam(data, k, spec, strategy=BatchStrategy.nniw, m=AUTO,
                  max_passes=DEFAULT_MAX_PASSES, epsilon=DEFAULT_EPSILON,
                  seed=0, evaluate_exact=False, counter=None,
                  algorithm="onebatchpam", eager=True):
    """Sample one batch, then swap-search the whole dataset against it."""
    strategy = as_strategy(strategy)
    spec = as_dissimilarity(spec)
    k = check_k(k, data.n)
    if strategy is BatchStrategy.debias and k < 2:
        raise DebiasRequiresKAtLeast2Error()
    if counter is None:
        counter = EvalCounter()
    rng = make_rng(seed)
    before = counter.count
    stopwatch = StopWatch().start()
    m = resolve_batch_size(m, data.n, k)
    batch = sample_batch(data, m, strategy, spec, rng, counter)
    if k == 1:
        medoids = MedoidSet([one_medoid(batch)], data.n)
        swaps, passes, history = 0, 0, []
    else:
        medoids = MedoidSet(rng.choice(data.n, size=k, replace=False),
                            data.n)
        swaps, passes, history = swap_search(batch, medoids, max_passes,
                                             epsilon, eager=eager)
    est = estimated_objective(batch, medoids)
    wall_millis = stopwatch.total_millis
    exact = None
    if evaluate_exact:
        exact = exact_objective(data, medoids, spec, counter)
    LOGGER.info("%s: k=%d m=%d %s swaps=%d passes=%d estimate=%g",
                algorithm, k, m, strategy.value, swaps, passes, est)
    return RunResult(algorithm=algorithm,
                     medoids=medoids.as_tuple(),
                     est_objective=est,
                     exact_objective=exact,
                     swaps=swaps,
                     passes=passes,
                     dissim_evals=counter.count - before,
                     wall_millis=wall_millis,
                     history=tuple(history))

def faster_pam(data, k, spec, max_passes=DEFAULT_MAX_PASSES, seed=0,
               counter=None, evaluate_exact=False, epsilon=DEFAULT_EPSILON,
               eager=True):
    """FasterPAM: the swap search on the full uniform batch (n*n evals)."""
    return one_batch_pam(data, k, spec, strategy=BatchStrategy.unif,
                         m=data.n, max_passes=max_passes, epsilon=epsilon,
                         seed=seed, evaluate_exact=evaluate_exact,
                         counter=counter, algorithm="fasterpam", eager=eager)
