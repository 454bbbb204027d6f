# -*- encoding: utf-8 -*-
"""Benchmark harness: experiment grids, relative metrics and Pareto fronts.

An experiment runs every (algorithm, k, seed) cell of a grid on one dataset,
writes one CSV record per cell and a JSON summary holding, for each k, the
per-algorithm means and standard deviations over seeds, the delta relative
objective and relative time against the best-objective algorithm, and the
Pareto front of mean time against mean objective.
"""


import json
import logging
import os
from collections import namedtuple
from collections import OrderedDict

import numpy as np
import pandas as pd

from onebatchpam.algolib import get_algorithm
from onebatchpam.algolib import params_to_json
from onebatchpam.datalib import SyntheticSpec
from onebatchpam.datalib import SEED_MAX
from onebatchpam.datalib import load_csv
from onebatchpam.datalib import generate_blobs
from onebatchpam.dissimlib import EvalCounter
from onebatchpam.dissimlib import Dissimilarity
from onebatchpam.dissimlib import as_dissimilarity
from onebatchpam.runner import run_concurrent_cells
from onebatchpam.runner import run_monoproc_cells
from onebatchpam.stopwatch import format_millis
from onebatchpam.utils import dump_json
from onebatchpam.utils import finite_or_none
from onebatchpam.utils import mkdir_p
from onebatchpam.errors import InvalidConfigError
from onebatchpam.errors import InvalidSpecError
from onebatchpam.errors import ZeroBestObjectiveError
from onebatchpam.errors import ZeroReferenceTimeError
from onebatchpam.errors import CellError

LOGGER = logging.getLogger(__name__)

RECORD_COLUMNS = ("algorithm", "params", "k", "seed", "objective",
                  "wall_millis", "dissim_evals", "swaps")

### Metrics

def delta_relative_objective(objective, best_objective):
    if not best_objective > 0:
        raise ZeroBestObjectiveError()
    return objective / best_objective - 1.0

def relative_time(time, reference_time):
    if not reference_time > 0:
        raise ZeroReferenceTimeError()
    return time / reference_time

class ParetoPoint(namedtuple("BaseParetoPoint",
                             ("label", "mean_time", "mean_objective"))):
    """Mean time (ms) and objective of one algorithm over the seeds of a k."""

def pareto_front(points):
    """Return the points no other point dominates, sorted by time.

    q dominates p when it is no slower and no worse, and strictly better on
    one of both axes. Identical points do not dominate each other.
    """
    points = list(points)
    if not points:
        return []
    times = np.array([p.mean_time for p in points], dtype=np.float64)
    objectives = np.array([p.mean_objective for p in points],
                          dtype=np.float64)
    if not (np.isfinite(times).all() and np.isfinite(objectives).all()):
        raise ValueError("pareto points must be finite")
    # dominated[i, j]: point j dominates point i
    no_worse = (times[None, :] <= times[:, None]) \
        & (objectives[None, :] <= objectives[:, None])
    better = (times[None, :] < times[:, None]) \
        | (objectives[None, :] < objectives[:, None])
    dominated = (no_worse & better).any(axis=1)
    front = [p for p, d in zip(points, dominated) if not d]
    front.sort(key=lambda p: (p.mean_time, p.mean_objective))
    return front

### Configuration

class AlgorithmSpec(namedtuple("BaseAlgorithmSpec",
                               ("name", "label", "params"))):
    """An algorithm of the grid with its resolved parameters.

    *label* names the algorithm in records and summaries; it defaults to the
    algorithm name so that several variants of one algorithm can coexist.
    """

    _KEYS = ("name", "label", "params")

    @classmethod
    def from_dict(cls, mapping):
        if isinstance(mapping, str):
            mapping = {"name": mapping}
        if not isinstance(mapping, dict):
            raise InvalidConfigError("an algorithm entry must be a name or "
                                     "an object, got {!r}".format(mapping))
        unknown = set(mapping) - set(cls._KEYS)
        if unknown:
            raise InvalidConfigError("unknown algorithm key(s): {}"
                                     .format(", ".join(sorted(unknown))))
        if "name" not in mapping:
            raise InvalidConfigError("algorithm entry without a name")
        algorithm = get_algorithm(mapping["name"])
        params = mapping.get("params", {})
        if not isinstance(params, dict):
            raise InvalidConfigError("params of {} must be an object"
                                     .format(algorithm.name))
        label = mapping.get("label", algorithm.name)
        if not isinstance(label, str) or not label:
            raise InvalidConfigError("invalid label {!r}".format(label))
        return cls(algorithm.name, label, algorithm.resolve(params))

    @property
    def params_json(self):
        return json.dumps(params_to_json(self.params), sort_keys=True)

class DatasetSpec(namedtuple("BaseDatasetSpec",
                             ("path", "has_header", "drop_columns",
                              "synthetic"))):
    """Either a CSV file or a synthetic blob specification."""

    _KEYS = ("path", "has_header", "drop_columns", "synthetic")

    @classmethod
    def from_dict(cls, mapping, basedir=""):
        if isinstance(mapping, str):
            mapping = {"path": mapping}
        if not isinstance(mapping, dict):
            raise InvalidConfigError("dataset must be a path or an object, "
                                     "got {!r}".format(mapping))
        unknown = set(mapping) - set(cls._KEYS)
        if unknown:
            raise InvalidConfigError("unknown dataset key(s): {}"
                                     .format(", ".join(sorted(unknown))))
        if ("path" in mapping) == ("synthetic" in mapping):
            raise InvalidConfigError("dataset needs exactly one of 'path' "
                                     "and 'synthetic'")
        if "synthetic" in mapping:
            if set(mapping) != {"synthetic"}:
                raise InvalidConfigError("CSV options given for a synthetic "
                                         "dataset")
            try:
                synthetic = SyntheticSpec.from_dict(mapping["synthetic"])
            except InvalidSpecError as e:
                raise InvalidConfigError(str(e))
            return cls(None, False, (), synthetic)
        path = os.path.join(basedir, mapping["path"])
        has_header = mapping.get("has_header", False)
        if not isinstance(has_header, bool):
            raise InvalidConfigError("has_header must be a boolean")
        drop_columns = mapping.get("drop_columns", [])
        if not isinstance(drop_columns, list) \
           or not all(isinstance(c, int) and c >= 0 for c in drop_columns):
            raise InvalidConfigError("drop_columns must be a list of column "
                                     "indices")
        return cls(path, has_header, tuple(drop_columns), None)

    def load(self):
        if self.synthetic is not None:
            return generate_blobs(self.synthetic)
        return load_csv(self.path, has_header=self.has_header,
                        drop_columns=self.drop_columns)

    def describe(self):
        if self.synthetic is not None:
            return dict(self.synthetic._asdict())
        return self.path

def _check_int_list(name, values, minimum, maximum=None):
    if not isinstance(values, list) or not values:
        raise InvalidConfigError("{} must be a non-empty list".format(name))
    for value in values:
        if isinstance(value, bool) or not isinstance(value, int) \
           or value < minimum or (maximum is not None and value > maximum):
            raise InvalidConfigError("invalid value in {}: {!r}"
                                     .format(name, value))
    return tuple(values)

class ExperimentConfig(object):
    """The grid of an experiment and where to write its results.

    The summary is written next to *output_path* (the records CSV) as
    <stem>.summary.json. *jobs* is the number of worker processes; 0 runs
    every cell in this process.
    """

    _KEYS = ("dataset", "metric", "algorithms", "k_values", "seeds",
             "output_path", "jobs")

    def __init__(self, dataset, metric, algorithms, k_values, seeds,
                 output_path, jobs=0):
        if not algorithms:
            raise InvalidConfigError("no algorithm to run")
        labels = [a.label for a in algorithms]
        duplicated = sorted(set(l for l in labels if labels.count(l) > 1))
        if duplicated:
            raise InvalidConfigError("duplicated algorithm label(s): {}"
                                     .format(", ".join(duplicated)))
        if not k_values or not seeds:
            raise InvalidConfigError("k_values and seeds must not be empty")
        if isinstance(jobs, bool) or not isinstance(jobs, int) or jobs < 0:
            raise InvalidConfigError("jobs must be an integer >= 0, got {!r}"
                                     .format(jobs))
        self.dataset = dataset
        self.metric = as_dissimilarity(metric)
        self.algorithms = tuple(algorithms)
        self.k_values = tuple(k_values)
        self.seeds = tuple(seeds)
        self.output_path = output_path
        self.jobs = jobs

    @classmethod
    def from_dict(cls, mapping, basedir=""):
        if not isinstance(mapping, dict):
            raise InvalidConfigError("configuration must be a JSON object")
        unknown = set(mapping) - set(cls._KEYS)
        if unknown:
            raise InvalidConfigError("unknown configuration key(s): {}"
                                     .format(", ".join(sorted(unknown))))
        missing = [key for key in cls._KEYS[:-1] if key not in mapping]
        if missing:
            raise InvalidConfigError("missing configuration key(s): {}"
                                     .format(", ".join(missing)))
        try:
            metric = Dissimilarity.from_string(mapping["metric"])
        except (TypeError, ValueError) as e:
            raise InvalidConfigError(str(e))
        algorithms = mapping["algorithms"]
        if not isinstance(algorithms, list):
            raise InvalidConfigError("algorithms must be a list")
        output_path = mapping["output_path"]
        if not isinstance(output_path, str) or not output_path:
            raise InvalidConfigError("output_path must be a path")
        return cls(DatasetSpec.from_dict(mapping["dataset"], basedir),
                   metric,
                   [AlgorithmSpec.from_dict(a) for a in algorithms],
                   _check_int_list("k_values", mapping["k_values"], 1),
                   _check_int_list("seeds", mapping["seeds"], 0, SEED_MAX),
                   os.path.join(basedir, output_path),
                   jobs=mapping.get("jobs", 0))

    @classmethod
    def from_json(cls, path):
        """Load a configuration file; relative paths in it are relative to
        the directory of the file.
        """
        try:
            with open(path, encoding="utf-8") as stream:
                mapping = json.load(stream)
        except OSError as e:
            raise InvalidConfigError("cannot read configuration '{}': {}"
                                     .format(path, e))
        except ValueError as e:
            raise InvalidConfigError("invalid JSON in '{}': {}"
                                     .format(path, e))
        return cls.from_dict(mapping, basedir=os.path.dirname(path))

    @property
    def summary_path(self):
        stem, _ = os.path.splitext(self.output_path)
        return stem + ".summary.json"

    def cells(self):
        """The grid in its canonical order: algorithm, then k, then seed."""
        cells = []
        for algorithm in self.algorithms:
            for k in self.k_values:
                for seed in self.seeds:
                    cells.append(Cell(len(cells), algorithm.label,
                                      algorithm.name, algorithm.params, k,
                                      seed))
        return cells

### Records

class Cell(namedtuple("BaseCell", ("index", "label", "algorithm", "params",
                                   "k", "seed"))):
    """One run of the grid."""

class BenchRecord(namedtuple("BaseBenchRecord",
                             ("algorithm", "params", "k", "seed",
                              "exact_objective", "wall_millis",
                              "dissim_evals", "swaps"))):
    """Outcome of one cell; *algorithm* is the label, *params* a JSON text."""

    def to_row(self):
        row = self._asdict()
        row["objective"] = row.pop("exact_objective")
        return [row[c] for c in RECORD_COLUMNS]

def records_frame(records):
    return pd.DataFrame([r.to_row() for r in records],
                        columns=list(RECORD_COLUMNS))

def write_records(path, records):
    mkdir_p(os.path.dirname(path))
    records_frame(records).to_csv(path, index=False, float_format="%.17g")

def read_records(path):
    frame = pd.read_csv(path, dtype={"algorithm": str, "params": str},
                        float_precision="round_trip")
    return [BenchRecord(row.algorithm, row.params, int(row.k), int(row.seed),
                        float(row.objective), float(row.wall_millis),
                        int(row.dissim_evals), int(row.swaps))
            for row in frame.itertuples(index=False)]

def run_cell(context, cell):
    """Run one cell with a fresh counter. Executed in worker processes too."""
    data, metric = context
    LOGGER.info("start %s k=%d seed=%d", cell.label, cell.k, cell.seed)
    result = get_algorithm(cell.algorithm)(data, cell.k, metric,
                                           seed=cell.seed,
                                           counter=EvalCounter(),
                                           evaluate_exact=True,
                                           params=cell.params)
    LOGGER.info("done %s k=%d seed=%d: objective %g in %s",
                cell.label, cell.k, cell.seed, result.exact_objective,
                format_millis(result.wall_millis))
    return BenchRecord(algorithm=cell.label,
                       params=json.dumps(params_to_json(cell.params),
                                         sort_keys=True),
                       k=cell.k,
                       seed=cell.seed,
                       exact_objective=result.exact_objective,
                       wall_millis=result.wall_millis,
                       dissim_evals=result.dissim_evals,
                       swaps=result.swaps)

### Summary

def _std(values):
    return float(np.std(np.asarray(values, dtype=np.float64)))

def summarize(records):
    """Aggregate *records* per k and label (records are in grid order).

    Standard deviations are population ones (ddof=0) over the seeds.
    """
    frame = records_frame(records)
    cells = []
    for k, by_k in frame.groupby("k", sort=True):
        stats = by_k.groupby("algorithm", sort=False).agg(
            runs=("seed", "size"),
            mean_objective=("objective", "mean"),
            std_objective=("objective", _std),
            mean_wall_millis=("wall_millis", "mean"),
            std_wall_millis=("wall_millis", _std),
            mean_dissim_evals=("dissim_evals", "mean"),
            std_dissim_evals=("dissim_evals", _std),
            mean_swaps=("swaps", "mean"),
        )
        cells.append(_summarize_k(int(k), stats))
    return OrderedDict(cells=cells, overall=_summarize_overall(cells))

def _summarize_k(k, stats):
    labels = list(stats.index)
    objectives = stats["mean_objective"].to_numpy()
    times = stats["mean_wall_millis"].to_numpy()
    best = labels[int(np.argmin(objectives))]
    best_objective = float(stats.at[best, "mean_objective"])
    reference = best
    rt_fallback = False
    if not stats.at[best, "mean_wall_millis"] > 0:
        nonzero = np.flatnonzero(times > 0)
        if nonzero.size:
            reference = labels[int(nonzero[np.argmin(times[nonzero])])]
        else:
            reference = None
        rt_fallback = True
        LOGGER.warning("k=%d: best algorithm %s took no time; relative times "
                       "use %s", k, best, reference)
    reference_time = None if reference is None \
        else float(stats.at[reference, "mean_wall_millis"])
    delta_ro_undefined = not best_objective > 0
    algorithms = []
    for label in labels:
        row = stats.loc[label]
        entry = OrderedDict(label=label)
        for column in stats.columns:
            entry[column] = finite_or_none(row[column])
        entry["runs"] = int(row["runs"])
        entry["delta_ro"] = None if delta_ro_undefined \
            else delta_relative_objective(float(row["mean_objective"]),
                                          best_objective)
        entry["rt"] = None if reference_time is None \
            else relative_time(float(row["mean_wall_millis"]),
                               reference_time)
        algorithms.append(entry)
    points = [ParetoPoint(label, float(stats.at[label, "mean_wall_millis"]),
                          float(stats.at[label, "mean_objective"]))
              for label in labels]
    return OrderedDict(
        k=k,
        best=best,
        reference=reference,
        rt_fallback=rt_fallback,
        delta_ro_undefined=delta_ro_undefined,
        algorithms=algorithms,
        pareto_front=[p._asdict() for p in pareto_front(points)],
    )

def _as_float(value):
    return np.nan if value is None else float(value)

def _summarize_overall(cells):
    """Mean delta RO and RT of each label across the k cells.

    Cells where a ratio is undefined are left out of its mean.
    """
    rows = [(a["label"], _as_float(a["delta_ro"]), _as_float(a["rt"]))
            for cell in cells for a in cell["algorithms"]]
    if not rows:
        return []
    frame = pd.DataFrame(rows, columns=["label", "delta_ro", "rt"])
    stats = frame.groupby("label", sort=False).agg(
        cells=("delta_ro", "size"),
        mean_delta_ro=("delta_ro", "mean"),
        mean_rt=("rt", "mean"),
    )
    return [OrderedDict(label=label,
                        cells=int(row["cells"]),
                        mean_delta_ro=finite_or_none(row["mean_delta_ro"]),
                        mean_rt=finite_or_none(row["mean_rt"]))
            for label, row in stats.iterrows()]

def write_summary(path, cfg, data, summary):
    document = OrderedDict(
        dataset=cfg.dataset.describe(),
        n=data.n,
        p=data.p,
        metric=cfg.metric.value,
        records=cfg.output_path,
    )
    document.update(summary)
    mkdir_p(os.path.dirname(path))
    with open(path, "w", encoding="utf-8") as stream:
        dump_json(document, stream)

### Experiment

def run_experiment(cfg, printer=None):
    """Run every cell of *cfg* and write the records and the summary.

    Return (records, summary). Records come in grid order whatever the
    number of jobs. When a cell fails the records gathered so far are written
    before the CellError propagates.
    """
    data = cfg.dataset.load()
    too_big = [k for k in cfg.k_values if k > data.n]
    if too_big:
        raise InvalidConfigError("k value(s) {} exceed the {} point(s) of "
                                 "the dataset"
                                 .format(", ".join(map(str, too_big)), data.n))
    cells = cfg.cells()
    LOGGER.info("running %d cell(s) on %d x %d points with %d job(s)",
                len(cells), data.n, data.p, cfg.jobs)
    collected = {}
    def on_record(cell, record):
        collected[cell.index] = record
        if printer is not None:
            printer.overwrite("[{}/{}] {} k={} seed={}: {:.6g} in {}"
                              .format(len(collected), len(cells), cell.label,
                                      cell.k, cell.seed,
                                      record.exact_objective,
                                      format_millis(record.wall_millis)))
    context = (data, cfg.metric)
    try:
        if cfg.jobs == 0:
            run_monoproc_cells(cells, run_cell, context, on_record)
        else:
            run_concurrent_cells(cells, run_cell, context, on_record,
                                 njobs=cfg.jobs)
    except CellError:
        write_records(cfg.output_path,
                      [collected[i] for i in sorted(collected)])
        raise
    finally:
        if printer is not None:
            printer.new_line()
    records = [collected[i] for i in sorted(collected)]
    write_records(cfg.output_path, records)
    summary = summarize(records)
    write_summary(cfg.summary_path, cfg, data, summary)
    return records, summary
