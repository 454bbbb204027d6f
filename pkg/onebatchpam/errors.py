# -*- encoding: utf-8 -*-
"""Exceptions raised by the onebatchpam package.

Every exception keeps the context it was raised with as attributes so that
callers (the benchmark harness in particular) can report it precisely.
"""


class OneBatchError(Exception):
    """Base class of all errors raised by this package."""

### Data

class DatasetIOError(OneBatchError):

    def __init__(self, path, reason):
        self.path = path
        self.reason = reason

    def __str__(self):
        return "cannot read dataset '{}': {}".format(self.path, self.reason)

class ParseError(OneBatchError):

    def __init__(self, path, row, column, message):
        self.path = path
        self.row = row
        self.column = column
        self.message = message

    def __str__(self):
        location = []
        if self.row is not None:
            location.append("row {}".format(self.row))
        if self.column is not None:
            location.append("column {}".format(self.column))
        return "{}{}: {}".format(self.path,
                                 ":" + ", ".join(location) if location else "",
                                 self.message)

class EmptyDatasetError(OneBatchError):

    def __init__(self, path):
        self.path = path

    def __str__(self):
        return "dataset '{}' has no data row".format(self.path)

class InvalidDataError(OneBatchError):
    """Raised when a point set violates the DataMatrix invariants."""

class InvalidSpecError(OneBatchError):
    """Raised for an inconsistent synthetic dataset specification."""

### Dissimilarity kernels

class DimensionMismatchError(OneBatchError):

    def __init__(self, left, right):
        self.left = left
        self.right = right

    def __str__(self):
        return "dimension mismatch: {} != {}".format(self.left, self.right)

class ZeroVectorError(OneBatchError):

    def __init__(self, row=None):
        self.row = row

    def __str__(self):
        if self.row is None:
            return "cosine dissimilarity is undefined for the zero vector"
        return "cosine dissimilarity is undefined for the zero vector " \
            "(row {})".format(self.row)

class IndexOutOfRangeError(OneBatchError):

    def __init__(self, index, n):
        self.index = index
        self.n = n

    def __str__(self):
        return "row index {} out of range [0, {})".format(self.index, self.n)

### Batch sampling

class InvalidBatchSizeError(OneBatchError):

    def __init__(self, m, n, strategy):
        self.m = m
        self.n = n
        self.strategy = strategy

    def __str__(self):
        return "invalid batch size {} for {} points with strategy '{}'"\
            .format(self.m, self.n, self.strategy)

class InvalidBoundError(OneBatchError):
    """Raised when the batch size bound inputs are out of their domain."""

### Swap engine

class InvalidKError(OneBatchError):

    def __init__(self, k, n):
        self.k = k
        self.n = n

    def __str__(self):
        return "invalid number of medoids k={} for n={} points"\
            .format(self.k, self.n)

class DebiasRequiresKAtLeast2Error(OneBatchError):

    def __str__(self):
        return "the debias strategy requires k >= 2"

class NonFiniteError(OneBatchError):

    def __init__(self, what):
        self.what = what

    def __str__(self):
        return "{} is not finite".format(self.what)

class CandidateIsMedoidError(OneBatchError):

    def __init__(self, row):
        self.row = row

    def __str__(self):
        return "candidate row {} is already a medoid".format(self.row)

### Benchmark harness

class InvalidConfigError(OneBatchError):
    """Raised for invalid experiment configuration or algorithm parameters."""

class ZeroBestObjectiveError(OneBatchError):

    def __str__(self):
        return "best objective is zero: relative objective is undefined"

class ZeroReferenceTimeError(OneBatchError):

    def __str__(self):
        return "reference time is zero: relative time is undefined"

class CellError(OneBatchError):

    def __init__(self, algorithm, k, seed, cause):
        self.algorithm = algorithm
        self.k = k
        self.seed = seed
        self.cause = cause
        # Formatted worker traceback, when the cell ran in another process.
        self.traceback = None

    def __str__(self):
        return "cell (algorithm={}, k={}, seed={}) failed: {}"\
            .format(self.algorithm, self.k, self.seed, self.cause)
