# -*- encoding: utf-8 -*-
"""Construction of the batch the swap engine estimates the objective on.

A batch is m columns sigma(1..m) drawn from the dataset, one weight per
column and the n x m matrix of weighted dissimilarities between every row of
the dataset and every batch column.
"""


import logging
import math

import numpy as np

from onebatchpam.utils import ChoiceEnum
from onebatchpam.datalib import make_rng
from onebatchpam.dissimlib import Dissimilarity
from onebatchpam.dissimlib import as_dissimilarity
from onebatchpam.dissimlib import cross_dissim_matrix
from onebatchpam.dissimlib import pairwise_to_point
from onebatchpam.errors import InvalidBatchSizeError
from onebatchpam.errors import InvalidBoundError

LOGGER = logging.getLogger(__name__)

AUTO = "AUTO"

class BatchStrategy(ChoiceEnum):
    unif = "unif"
    debias = "debias"
    nniw = "nniw"
    lwcs = "lwcs"

    @property
    def with_replacement(self):
        return self is BatchStrategy.lwcs

def as_strategy(obj):
    if isinstance(obj, BatchStrategy):
        return obj
    elif isinstance(obj, str):
        return BatchStrategy.from_string(obj.lower())
    else:
        raise TypeError("cannot convert to a BatchStrategy an object of type {}"
                        .format(type(obj).__name__))

class BatchView(object):
    """The sampled batch: column indices, weights and weighted matrix.

    *nn_counts* holds, for the nniw strategy, the number of rows whose nearest
    batch column is j (before the zero-count fallback); *sampling_probs* holds,
    for the lwcs strategy, the sampling distribution q over the n rows.
    """

    def __init__(self, indices, weights, matrix, strategy, debiased=False,
                 nn_counts=None, sampling_probs=None):
        self.indices = np.asarray(indices, dtype=np.intp)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.matrix = np.asarray(matrix, dtype=np.float64)
        self.strategy = strategy
        self.debiased = debiased
        self.nn_counts = nn_counts
        self.sampling_probs = sampling_probs
        for array in (self.indices, self.weights, self.matrix):
            array.flags.writeable = False

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def m(self):
        return self.matrix.shape[1]

    def scaled(self, factor):
        """Return the same batch with every weight multiplied by *factor*."""
        if not factor > 0:
            raise ValueError("scale factor must be positive, got {!r}"
                             .format(factor))
        return BatchView(self.indices, self.weights * factor,
                         self.matrix * factor, self.strategy,
                         debiased=self.debiased, nn_counts=self.nn_counts,
                         sampling_probs=self.sampling_probs)

    def __repr__(self):
        return "{}(n={}, m={}, strategy={}, debiased={})"\
            .format(type(self).__name__, self.n, self.m,
                    self.strategy.value, self.debiased)

def default_batch_size(n, k):
    """Return min(n, ceil(100 ln(k n))), at least 1."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive, got n={} k={}"
                         .format(n, k))
    return max(1, min(n, int(math.ceil(100.0 * math.log(k * n)))))

def resolve_batch_size(m, n, k):
    if m is None or (isinstance(m, str) and m.upper() == AUTO):
        return default_batch_size(n, k)
    return int(m)

class BoundInputs(object):
    """Inputs of the batch size bound preserving the swap sequence.

    D is the largest pairwise dissimilarity, Delta the smallest gap between two
    objectives met by the full local search, delta the failure probability, T
    the number of swap steps and n the number of points.
    """

    def __init__(self, D, Delta, delta, T, n):
        if not D >= 0:
            raise InvalidBoundError("D must be >= 0, got {!r}".format(D))
        if not Delta > 0:
            raise InvalidBoundError("Delta must be > 0, got {!r}"
                                    .format(Delta))
        if not 0 < delta <= 1:
            raise InvalidBoundError("delta must be in (0, 1], got {!r}"
                                    .format(delta))
        if T < 1 or n < 1:
            raise InvalidBoundError("T and n must be positive, got T={} n={}"
                                    .format(T, n))
        self.D = float(D)
        self.Delta = float(Delta)
        self.delta = float(delta)
        self.T = int(T)
        self.n = int(n)

def swap_sequence_min_batch_size(b):
    """Smallest m with m >= (4 D^2 / Delta^2) ln(2 T n / delta)."""
    if b.D == 0:
        return 0
    value = 4.0 * b.D ** 2 / b.Delta ** 2 * math.log(2.0 * b.T * b.n / b.delta)
    return int(math.ceil(value))

def _check_batch_size(m, n, strategy):
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidBatchSizeError(m, n, strategy.value)
    if not strategy.with_replacement and m > n:
        raise InvalidBatchSizeError(m, n, strategy.value)

def nearest_neighbor_counts(matrix):
    """Count, for each column, the rows having it as nearest column.

    Ties go to the smallest column index.
    """
    nearest = np.argmin(matrix, axis=1)
    return np.bincount(nearest, minlength=matrix.shape[1])

def lightweight_coreset_probs(data, counter):
    """Mix of uniform mass and squared distance to the mean of the rows."""
    n = data.n
    mean = data.values.mean(axis=0)
    sqdist = pairwise_to_point(Dissimilarity.squared_l2, data, mean, counter)
    total = sqdist.sum()
    if total > 0:
        q = 0.5 / n + 0.5 * sqdist / total
    else:
        q = np.full(n, 1.0 / n)
    return q

def sample_batch(data, m, strategy, spec, seed, counter):
    """Sample a BatchView of *m* columns from *data*.

    The counter grows by exactly n*m, plus n for the mean distances of the
    lwcs strategy.
    """
    strategy = as_strategy(strategy)
    _check_batch_size(m, data.n, strategy)
    rng = make_rng(seed)
    n = data.n
    sampling_probs = None
    if strategy is BatchStrategy.lwcs:
        sampling_probs = lightweight_coreset_probs(data, counter)
        indices = rng.choice(n, size=m, replace=True, p=sampling_probs)
    else:
        indices = rng.choice(n, size=m, replace=False)
    return build_batch(data, indices, strategy, spec, counter,
                       sampling_probs=sampling_probs)

def build_batch(data, indices, strategy, spec, counter, sampling_probs=None):
    """Build the BatchView of already chosen column *indices*.

    For the lwcs strategy *sampling_probs* is the distribution the indices
    were drawn from; it is computed (n more evaluations) when missing.
    """
    strategy = as_strategy(strategy)
    spec = as_dissimilarity(spec)
    indices = np.asarray(indices, dtype=np.intp)
    m = indices.size
    _check_batch_size(m, data.n, strategy)
    if not strategy.with_replacement and np.unique(indices).size != m:
        raise InvalidBatchSizeError(m, data.n, strategy.value)
    n = data.n
    nn_counts = None
    if strategy is BatchStrategy.lwcs:
        if sampling_probs is None:
            sampling_probs = lightweight_coreset_probs(data, counter)
        weights = 1.0 / (m * sampling_probs[indices])
    else:
        sampling_probs = None
        weights = np.ones(m)
    matrix = cross_dissim_matrix(spec, data, indices, counter)
    if strategy is BatchStrategy.nniw:
        nn_counts = nearest_neighbor_counts(matrix)
        weights = nn_counts.astype(np.float64)
        # Zero weights would erase their column.
        weights[nn_counts == 0] = 1.0
    if strategy is BatchStrategy.nniw or strategy is BatchStrategy.lwcs:
        matrix *= weights
    debiased = strategy is BatchStrategy.debias
    if debiased:
        matrix[indices, np.arange(m)] = np.inf
    LOGGER.debug("sampled %s batch of %d columns out of %d rows",
                 strategy.value, m, n)
    return BatchView(indices, weights, matrix, strategy, debiased=debiased,
                     nn_counts=nn_counts, sampling_probs=sampling_probs)
