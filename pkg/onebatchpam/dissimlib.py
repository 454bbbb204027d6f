# -*- encoding: utf-8 -*-
"""Dissimilarity kernels counting every pairwise evaluation.

The number of point-pair evaluations is the cost unit every algorithm of the
package is compared with, so all of them go through this module.
"""


import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.spatial.distance import cdist

from onebatchpam.utils import ChoiceEnum
from onebatchpam.errors import DimensionMismatchError
from onebatchpam.errors import ZeroVectorError
from onebatchpam.errors import IndexOutOfRangeError


class Dissimilarity(ChoiceEnum):
    l1 = "l1"
    l2 = "l2"
    squared_l2 = "squared_l2"
    cosine = "cosine"

    @property
    def scipy_metric(self):
        return _SCIPY_METRICS[self]

    @property
    def default_exponent(self):
        """Exponent of the d^p seeding rule when left to AUTO."""
        if self is Dissimilarity.l2 or self is Dissimilarity.squared_l2:
            return 2.0
        return 1.0

_SCIPY_METRICS = {
    Dissimilarity.l1: "cityblock",
    Dissimilarity.l2: "euclidean",
    Dissimilarity.squared_l2: "sqeuclidean",
    Dissimilarity.cosine: "cosine",
}

# Largest cosine distance rounding can produce between identical rows.
_COSINE_ROUNDING = 1e-12

def as_dissimilarity(obj):
    if isinstance(obj, Dissimilarity):
        return obj
    elif isinstance(obj, str):
        return Dissimilarity.from_string(obj)
    else:
        raise TypeError("cannot convert to a Dissimilarity an object of type {}"
                        .format(type(obj).__name__))

class EvalCounter(object):
    """Number of single-pair dissimilarity evaluations performed."""

    def __init__(self, count=0):
        self._count = int(count)
        self._lock = threading.Lock()

    @property
    def count(self):
        return self._count

    def add(self, amount):
        amount = int(amount)
        if amount < 0:
            raise ValueError("a counter never decreases")
        with self._lock:
            self._count += amount

    def __repr__(self):
        return "{}({})".format(type(self).__name__, self._count)

def _check_nonzero(spec, values, offset=0):
    if spec is not Dissimilarity.cosine:
        return
    zero = np.flatnonzero(~values.any(axis=1))
    if zero.size:
        raise ZeroVectorError(offset + int(zero[0]))

def _kernel(spec, left, right):
    out = cdist(left, right, metric=spec.scipy_metric)
    if spec is Dissimilarity.cosine:
        # 1 - cos may round slightly below zero.
        np.maximum(out, 0.0, out=out)
        # Identical rows are exactly 0 apart.
        i, j = np.nonzero(out < _COSINE_ROUNDING)
        same = (left[i] == right[j]).all(axis=1)
        out[i[same], j[same]] = 0.0
    return out

def dissim(spec, a, b, counter):
    spec = as_dissimilarity(spec)
    a = np.asarray(a, dtype=np.float64).reshape(1, -1)
    b = np.asarray(b, dtype=np.float64).reshape(1, -1)
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatchError(a.shape[1], b.shape[1])
    _check_nonzero(spec, a)
    _check_nonzero(spec, b)
    value = float(_kernel(spec, a, b)[0, 0])
    counter.add(1)
    return value

def check_indices(indices, n):
    indices = np.asarray(indices, dtype=np.intp).reshape(-1)
    bad = np.flatnonzero((indices < 0) | (indices >= n))
    if bad.size:
        raise IndexOutOfRangeError(int(indices[bad[0]]), n)
    return indices

def _chunk_bounds(n, jobs):
    step = -(-n // jobs)
    return [(start, min(n, start + step)) for start in range(0, n, step)]

def cross_dissim_matrix(spec, data, column_indices, counter, jobs=1):
    """Return the n x m matrix of d(row i, row column_indices[j]).

    With *jobs* > 1 the rows are split into contiguous chunks computed by a
    thread pool; each entry only depends on its own pair so the output is
    bit-identical to the sequential one.
    """
    spec = as_dissimilarity(spec)
    columns = check_indices(column_indices, data.n)
    values = data.values
    _check_nonzero(spec, values)
    right = values[columns]
    if jobs <= 1 or data.n < 2 * jobs:
        out = _kernel(spec, values, right)
        counter.add(out.size)
        return out
    bounds = _chunk_bounds(data.n, jobs)
    out = np.empty((data.n, columns.size), dtype=np.float64)
    def work(bound):
        start, stop = bound
        out[start:stop] = _kernel(spec, values[start:stop], right)
        return (stop - start) * columns.size
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        counts = list(executor.map(work, bounds))
    counter.add(sum(counts))
    return out

def pairwise_to_point(spec, data, point, counter):
    """Return the n dissimilarities between every row and one *point*."""
    spec = as_dissimilarity(spec)
    point = np.asarray(point, dtype=np.float64).reshape(1, -1)
    if point.shape[1] != data.p:
        raise DimensionMismatchError(data.p, point.shape[1])
    _check_nonzero(spec, data.values)
    _check_nonzero(spec, point)
    out = _kernel(spec, data.values, point)[:, 0]
    counter.add(out.size)
    return out

def rows_dissim_matrix(spec, data, row_indices, column_indices, counter):
    """Dissimilarities between two explicit sets of rows (|rows| x |columns|)."""
    spec = as_dissimilarity(spec)
    rows = check_indices(row_indices, data.n)
    columns = check_indices(column_indices, data.n)
    left = data.values[rows]
    right = data.values[columns]
    _check_nonzero(spec, left)
    _check_nonzero(spec, right)
    out = _kernel(spec, left, right)
    counter.add(out.size)
    return out
