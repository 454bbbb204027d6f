# -*- encoding: utf-8 -*-
"""Point sets: ingestion, synthetic generation and the randomness contract.
"""


import logging
import re
from collections import namedtuple

import numpy as np
import pandas as pd

from onebatchpam.errors import DatasetIOError
from onebatchpam.errors import ParseError
from onebatchpam.errors import EmptyDatasetError
from onebatchpam.errors import InvalidDataError
from onebatchpam.errors import InvalidSpecError

LOGGER = logging.getLogger(__name__)

SEED_MAX = 2**64 - 1

def make_rng(seed):
    """Return a numpy Generator for *seed*.

    *seed* is either a non-negative integer below 2**64 or an existing
    Generator, which is returned as is so that one stream can be threaded
    through several stochastic steps. There is no global RNG state.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (bool, np.bool_)) \
       or not isinstance(seed, (int, np.integer)):
        raise TypeError("seed must be an int or a numpy Generator, not {}"
                        .format(type(seed).__name__))
    if not 0 <= seed <= SEED_MAX:
        raise ValueError("seed must be in [0, 2**64), got {}".format(seed))
    return np.random.default_rng(int(seed))

class DataMatrix(object):
    """An immutable n x p matrix of finite real values, one point per row."""

    def __init__(self, values):
        values = np.array(values, dtype=np.float64, order="C", copy=True)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2:
            raise InvalidDataError("expected a 2-D array, got {} dimension(s)"
                                   .format(values.ndim))
        n, p = values.shape
        if n < 1 or p < 1:
            raise InvalidDataError("a point set needs n >= 1 and p >= 1, "
                                   "got n={} p={}".format(n, p))
        if not np.isfinite(values).all():
            row, column = np.argwhere(~np.isfinite(values))[0]
            raise InvalidDataError("non finite value at row {}, column {}"
                                   .format(row, column))
        values.flags.writeable = False
        self._values = values

    @property
    def values(self):
        return self._values

    @property
    def n(self):
        return self._values.shape[0]

    @property
    def p(self):
        return self._values.shape[1]

    @property
    def shape(self):
        return self._values.shape

    def row(self, i):
        return self._values[i]

    def rows(self, indices):
        return self._values[np.asarray(indices, dtype=np.intp)]

    def subset(self, indices):
        """Return a new DataMatrix made of the given rows, in that order."""
        return DataMatrix(self.rows(indices))

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, DataMatrix):
            return NotImplemented
        return np.array_equal(self._values, other._values)

    def __repr__(self):
        return "{}(n={}, p={})".format(type(self).__name__, self.n, self.p)

_PANDAS_LINE_PATTERN = re.compile(r"line (\d+)")

def _locate_bad_cell(path, cells, first_row):
    for i in range(cells.shape[0]):
        for j in range(cells.shape[1]):
            cell = cells[i, j]
            try:
                value = float(cell)
            except (TypeError, ValueError):
                raise ParseError(path, first_row + i, j,
                                 "cannot parse {!r} as a number".format(cell))
            if not np.isfinite(value):
                raise ParseError(path, first_row + i, j,
                                 "non finite value {!r}".format(cell))

def load_csv(path, has_header=False, drop_columns=()):
    """Load a comma separated file of decimal numbers into a DataMatrix.

    Rows and columns in error messages are 1-based line numbers in the file and
    0-based column indices in the file (before dropping).
    """
    header = 0 if has_header else None
    first_row = 2 if has_header else 1
    try:
        frame = pd.read_csv(path, header=header, dtype=str,
                            keep_default_na=False, na_filter=False,
                            skip_blank_lines=True, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise EmptyDatasetError(path)
    except pd.errors.ParserError as e:
        mo = _PANDAS_LINE_PATTERN.search(str(e))
        row = int(mo.group(1)) if mo else None
        raise ParseError(path, row, None, "ragged row: {}".format(e))
    except (OSError, UnicodeDecodeError) as e:
        raise DatasetIOError(path, e)
    if frame.shape[0] == 0:
        raise EmptyDatasetError(path)
    ncols = frame.shape[1]
    drop = sorted(set(int(c) for c in drop_columns))
    for c in drop:
        if not 0 <= c < ncols:
            raise ParseError(path, None, c,
                             "dropped column out of range [0, {})"
                             .format(ncols))
    keep = [c for c in range(ncols) if c not in drop]
    if not keep:
        raise ParseError(path, None, None, "no column left after dropping")
    # Missing trailing fields of a short row read as empty strings.
    cells = frame.to_numpy(dtype=object)
    blank = pd.isna(cells) | (cells == "")
    trailing = np.logical_and.accumulate(blank[:, ::-1], axis=1)[:, ::-1]
    missing = np.argwhere(trailing)
    if missing.size:
        row, column = missing[0]
        raise ParseError(path, first_row + int(row), int(column),
                         "ragged row")
    cells = cells[:, keep]
    try:
        values = cells.astype(str).astype(np.float64)
    except ValueError:
        _locate_bad_cell(path, cells, first_row)
        raise
    if not np.isfinite(values).all():
        _locate_bad_cell(path, cells, first_row)
    LOGGER.debug("loaded %d x %d matrix from %s",
                 values.shape[0], values.shape[1], path)
    return DataMatrix(values)

def save_csv(path, data, header=None):
    """Write *data* so that load_csv() reads back the exact same values."""
    np.savetxt(path, data.values, fmt="%.17g", delimiter=",",
               header="" if header is None else ",".join(header),
               comments="")

class SyntheticSpec(namedtuple("BaseSyntheticSpec",
                               ("n_points", "dimension", "n_blobs",
                                "blob_spread", "seed"))):
    """Isotropic Gaussian blobs with centers drawn uniformly in [-10, 10]^p."""

    def __new__(cls, n_points, dimension, n_blobs, blob_spread, seed=0):
        for name, value in (("n_points", n_points),
                            ("dimension", dimension),
                            ("n_blobs", n_blobs)):
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise InvalidSpecError("{} must be a positive integer, got {!r}"
                                       .format(name, value))
        if n_blobs > n_points:
            raise InvalidSpecError("n_blobs ({}) cannot exceed n_points ({})"
                                   .format(n_blobs, n_points))
        blob_spread = float(blob_spread)
        if not np.isfinite(blob_spread) or blob_spread < 0:
            raise InvalidSpecError("blob_spread must be finite and >= 0, "
                                   "got {!r}".format(blob_spread))
        if not isinstance(seed, (int, np.integer)) or not 0 <= seed <= SEED_MAX:
            raise InvalidSpecError("seed must be a 64-bit unsigned integer, "
                                   "got {!r}".format(seed))
        return super(SyntheticSpec, cls).__new__(cls, int(n_points),
                                                 int(dimension), int(n_blobs),
                                                 blob_spread, int(seed))

    @classmethod
    def from_dict(cls, mapping):
        unknown = set(mapping) - set(cls._fields)
        if unknown:
            raise InvalidSpecError("unknown synthetic spec key(s): {}"
                                   .format(", ".join(sorted(unknown))))
        try:
            return cls(**mapping)
        except TypeError as e:
            raise InvalidSpecError(str(e))

def make_blobs(spec):
    """Draw the blobs of *spec*.

    Return (data, centers, labels). Points are split as evenly as possible
    between blobs, the first blobs receiving the remainder, and then shuffled.
    """
    if not isinstance(spec, SyntheticSpec):
        raise InvalidSpecError("expected a SyntheticSpec, not {}"
                               .format(type(spec).__name__))
    rng = make_rng(spec.seed)
    centers = rng.uniform(-10.0, 10.0, size=(spec.n_blobs, spec.dimension))
    sizes = np.full(spec.n_blobs, spec.n_points // spec.n_blobs)
    sizes[:spec.n_points % spec.n_blobs] += 1
    labels = rng.permutation(np.repeat(np.arange(spec.n_blobs), sizes))
    noise = rng.normal(0.0, 1.0, size=(spec.n_points, spec.dimension))
    values = centers[labels] + spec.blob_spread * noise
    return DataMatrix(values), centers, labels

def generate_blobs(spec):
    data, _, _ = make_blobs(spec)
    return data
