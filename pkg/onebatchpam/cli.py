# -*- encoding: utf-8 -*-
# PYTHON_ARGCOMPLETE_OK
"""k-medoids clustering and benchmarking command line interface.
"""

import sys
import argparse
import logging
import os
from textwrap import dedent

from onebatchpam import __version__
from onebatchpam import envar
from onebatchpam.algolib import ALGORITHMS
from onebatchpam.algolib import get_algorithm
from onebatchpam.batchlib import AUTO
from onebatchpam.batchlib import BatchStrategy
from onebatchpam.batchlib import BoundInputs
from onebatchpam.batchlib import default_batch_size
from onebatchpam.batchlib import swap_sequence_min_batch_size
from onebatchpam.benchlib import ExperimentConfig
from onebatchpam.benchlib import run_experiment
from onebatchpam.datalib import SEED_MAX
from onebatchpam.datalib import SyntheticSpec
from onebatchpam.datalib import load_csv
from onebatchpam.datalib import generate_blobs
from onebatchpam.dissimlib import Dissimilarity
from onebatchpam.dissimlib import EvalCounter
from onebatchpam.progress import LinePrinter
from onebatchpam.utils import dump_json
from onebatchpam.errors import InvalidConfigError
from onebatchpam.errors import InvalidSpecError
from onebatchpam.errors import InvalidKError
from onebatchpam.errors import InvalidBatchSizeError
from onebatchpam.errors import InvalidBoundError
from onebatchpam.errors import DebiasRequiresKAtLeast2Error
from onebatchpam.errors import DatasetIOError
from onebatchpam.errors import CellError
from onebatchpam.errors import OneBatchError

try:
    import argcomplete
except ImportError:
    ARGCOMPLETE_ENABLED = False
else:
    ARGCOMPLETE_ENABLED = True

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

# Errors caused by what the user asked for rather than by the run itself.
USAGE_ERRORS = (
    InvalidConfigError,
    InvalidSpecError,
    InvalidKError,
    InvalidBatchSizeError,
    InvalidBoundError,
    DebiasRequiresKAtLeast2Error,
    DatasetIOError,
)

EPILOGUE = \
"""
Exit code:
 0 - success
 1 - usage or configuration error, unreadable input file
 2 - an error happened while running.

Environment variables:
 {envar_log_level} - logging level name (DEBUG, INFO, WARNING, ...);
                     overrides -v
 {envar_jobs} - default number of worker processes of 'bench'
                  (0 runs every cell in the main process)
""".format(
    envar_log_level=envar.LOG_LEVEL,
    envar_jobs=envar.JOBS,
)

class UsageError(Exception):
    """Raised for invalid command line values found after parsing."""

class _ArgumentParser(argparse.ArgumentParser):

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "{}: error: {}\n".format(self.prog, message))

def configure_logging(verbosity, stream=None):
    if stream is None:
        stream = sys.stderr
    level = os.environ.get(envar.LOG_LEVEL)
    if level:
        numeric = logging.getLevelName(level.upper())
        if not isinstance(numeric, int):
            raise UsageError("invalid {} value: {!r}"
                             .format(envar.LOG_LEVEL, level))
        level = numeric
    elif verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(stream)
    handler.setFormatter(logging.Formatter("%(levelname)s:%(name)s: "
                                           "%(message)s"))
    root.addHandler(handler)
    root.setLevel(level)

def default_jobs():
    value = os.environ.get(envar.JOBS)
    if value is None:
        return None
    try:
        jobs = int(value)
    except ValueError:
        jobs = -1
    if jobs < 0:
        raise UsageError("invalid {} value: {!r}".format(envar.JOBS, value))
    return jobs

def synthetic_param(param_str):
    """Parse 'n_points=1000,dimension=10,n_blobs=4,blob_spread=1[,seed=0]'."""
    mapping = {}
    for item in param_str.split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError("expected key=value, got '{}'"
                                             .format(item))
        key = key.strip()
        try:
            mapping[key] = float(value) if key == "blob_spread" \
                else int(value)
        except ValueError:
            raise argparse.ArgumentTypeError("invalid value for {}: '{}'"
                                             .format(key, value))
    try:
        return SyntheticSpec.from_dict(mapping)
    except InvalidSpecError as e:
        raise argparse.ArgumentTypeError(str(e))

def columns_param(param_str):
    try:
        columns = [int(c) for c in param_str.split(",") if c.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated column "
                                         "indices: '{}'".format(param_str))
    if any(c < 0 for c in columns):
        raise argparse.ArgumentTypeError("column indices must be >= 0")
    return columns

def batch_size_param(param_str):
    if param_str.upper() == AUTO:
        return AUTO
    try:
        m = int(param_str)
    except ValueError:
        raise argparse.ArgumentTypeError("expected AUTO or a positive "
                                         "integer: '{}'".format(param_str))
    if m < 1:
        raise argparse.ArgumentTypeError("batch size must be >= 1")
    return m

# Command line option -> algorithm parameter. Only the options given on the
# command line are forwarded, so that each algorithm rejects the ones it does
# not take.
ALGO_OPTIONS = (
    ("variant", "variant"),
    ("batch_size", "batch_size"),
    ("max_passes", "max_passes"),
    ("epsilon", "epsilon"),
    ("non_eager", "eager"),
    ("reps", "repetitions"),
    ("subsample_size", "subsample_size"),
    ("max_iters", "max_iters"),
    ("exponent", "exponent"),
    ("chain_length", "chain_length"),
    ("ls_steps", "local_search_steps"),
)

def algorithm_params(options):
    params = {}
    for dest, name in ALGO_OPTIONS:
        value = getattr(options, dest)
        if value is None:
            continue
        if dest == "non_eager":
            value = not value
        params[name] = value
    return params

def _add_common_arguments(parser):
    parser.add_argument(
        "-v", "--verbose",
        action="count",
        default=0,
        help="Log INFO messages (-vv for DEBUG).")
    parser.add_argument(
        "-q", "--quiet",
        action="store_true",
        help="Print no progress.")

def _add_run_arguments(parser):
    parser.add_argument(
        "--algo",
        action="store",
        choices=list(ALGORITHMS),
        default="onebatchpam",
        help="Algorithm to run.")
    parser.add_argument(
        "--k",
        type=int,
        action="store",
        required=True,
        help="Number of medoids.")
    parser.add_argument(
        "--metric",
        action="store",
        choices=Dissimilarity.choices(),
        default=Dissimilarity.l1.value,
        help="Dissimilarity.")
    parser.add_argument(
        "--seed",
        type=int,
        action="store",
        default=0,
        help="Seed of the run.")
    parser.add_argument(
        "--evaluate-exact",
        action="store_true",
        help="Also compute the exact objective (n*k evaluations).")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--data",
        metavar="CSV",
        action="store",
        help="Comma separated file of numbers, one point per row.")
    source.add_argument(
        "--synthetic",
        metavar="SPEC",
        type=synthetic_param,
        action="store",
        help="Gaussian blobs, e.g. "
        "'n_points=1000,dimension=10,n_blobs=4,blob_spread=1,seed=0'.")
    parser.add_argument(
        "--has-header",
        action="store_true",
        help="The first row of --data is a header.")
    parser.add_argument(
        "--drop-columns",
        metavar="INDICES",
        type=columns_param,
        action="store",
        default=[],
        help="Comma separated 0-based columns of --data to ignore.")
    group = parser.add_argument_group(
        "algorithm parameters",
        "Each applies only to the algorithms taking it; "
        "defaults come from the algorithm.")
    group.add_argument(
        "--variant",
        action="store",
        choices=BatchStrategy.choices(),
        help="Batch sampling strategy (onebatchpam).")
    group.add_argument(
        "--batch-size",
        type=batch_size_param,
        action="store",
        help="Batch size m or AUTO (onebatchpam).")
    group.add_argument(
        "--max-passes",
        type=int,
        action="store",
        help="Maximum swap passes (onebatchpam, fasterpam, clara).")
    group.add_argument(
        "--epsilon",
        type=float,
        action="store",
        help="Relative gain threshold of a swap (onebatchpam, fasterpam).")
    group.add_argument(
        "--non-eager",
        action="store_true",
        default=None,
        help="Perform only the best swap of each pass "
        "(onebatchpam, fasterpam).")
    group.add_argument(
        "--reps",
        type=int,
        action="store",
        help="Number of subsamples (clara).")
    group.add_argument(
        "--subsample-size",
        type=batch_size_param,
        action="store",
        help="Subsample size or AUTO (clara).")
    group.add_argument(
        "--max-iters",
        type=int,
        action="store",
        help="Maximum iterations (alternate).")
    group.add_argument(
        "--exponent",
        action="store",
        help="Exponent of the d^p rule or AUTO "
        "(kmeanspp, kmc2, lskmeanspp).")
    group.add_argument(
        "--chain-length",
        type=int,
        action="store",
        help="Metropolis chain length (kmc2).")
    group.add_argument(
        "--ls-steps",
        type=int,
        action="store",
        help="Local search steps (lskmeanspp).")

def algorithms_epilog():
    lines = ["Algorithms and their parameters:"]
    for algorithm in ALGORITHMS.values():
        lines.append(" {} - {}".format(algorithm.name, algorithm.doc))
        for param in algorithm.params.values():
            lines.append("     {}: {} (default: {})"
                         .format(param.name, param.help, param.default))
    return "\n".join(lines)

def build_cli():
    class RawDescriptionWithArgumentDefaultsHelpFormatter(
            argparse.ArgumentDefaultsHelpFormatter,
            argparse.RawDescriptionHelpFormatter,
    ):
        """Mix both formatter."""
    parser = _ArgumentParser(
        description=__doc__,
        epilog=dedent(EPILOGUE),
        formatter_class=RawDescriptionWithArgumentDefaultsHelpFormatter)
    parser.add_argument(
        "--version",
        action="version",
        version="%(prog)s " + __version__)
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    run = subparsers.add_parser(
        "run",
        help="Run one algorithm and print its result as JSON.",
        epilog=algorithms_epilog(),
        formatter_class=RawDescriptionWithArgumentDefaultsHelpFormatter)
    _add_common_arguments(run)
    _add_run_arguments(run)
    bench = subparsers.add_parser(
        "bench",
        help="Run an experiment grid described by a JSON configuration.",
        formatter_class=RawDescriptionWithArgumentDefaultsHelpFormatter)
    _add_common_arguments(bench)
    bench.add_argument(
        "--config",
        metavar="JSON",
        action="store",
        required=True,
        help="Experiment configuration.")
    bench.add_argument(
        "-j", "--jobs",
        type=int,
        action="store",
        default=None,
        help="Number of worker processes (0 runs the cells in this process);"
        " overrides the configuration and {}.".format(envar.JOBS))
    bound = subparsers.add_parser(
        "bound",
        help="Smallest batch size guaranteeing the FasterPAM swap sequence "
        "with probability 1 - delta.",
        formatter_class=RawDescriptionWithArgumentDefaultsHelpFormatter)
    _add_common_arguments(bound)
    for name, kind, text in (
            ("--D", float, "Largest pairwise dissimilarity."),
            ("--Delta", float, "Smallest gap between two objectives."),
            ("--delta", float, "Failure probability."),
            ("--T", int, "Number of swap steps."),
            ("--n", int, "Number of points.")):
        bound.add_argument(name, type=kind, action="store", required=True,
                           help=text)
    batch_size = subparsers.add_parser(
        "batch-size",
        help="Default batch size min(n, ceil(100 ln(kn))).",
        formatter_class=RawDescriptionWithArgumentDefaultsHelpFormatter)
    _add_common_arguments(batch_size)
    batch_size.add_argument("--n", type=int, action="store", required=True,
                            help="Number of points.")
    batch_size.add_argument("--k", type=int, action="store", required=True,
                            help="Number of medoids.")
    return parser

def load_run_data(options):
    if options.synthetic is not None:
        if options.has_header or options.drop_columns:
            raise UsageError("--has-header and --drop-columns only apply "
                             "to --data")
        return generate_blobs(options.synthetic)
    return load_csv(options.data, has_header=options.has_header,
                    drop_columns=options.drop_columns)

def cmd_run(options, printer):
    if not 0 <= options.seed <= SEED_MAX:
        raise UsageError("--seed must be in [0, 2**64)")
    algorithm = get_algorithm(options.algo)
    params = algorithm.resolve(algorithm_params(options))
    data = load_run_data(options)
    printer.overwrite("running {} on {} x {} points..."
                      .format(algorithm.name, data.n, data.p))
    result = algorithm(data, options.k, options.metric, seed=options.seed,
                       counter=EvalCounter(),
                       evaluate_exact=options.evaluate_exact, params=params)
    printer.new_line()
    dump_json(result.to_dict(), sys.stdout)
    return EXIT_OK

def cmd_bench(options, printer):
    cfg = ExperimentConfig.from_json(options.config)
    jobs = options.jobs
    if jobs is None:
        jobs = default_jobs()
    if jobs is not None:
        if jobs < 0:
            raise UsageError("--jobs must be >= 0")
        cfg.jobs = jobs
    records, _ = run_experiment(cfg, printer=printer)
    printer.write_nl("{} record(s) written to {}, summary in {}"
                     .format(len(records), cfg.output_path,
                             cfg.summary_path))
    return EXIT_OK

def cmd_bound(options, printer):
    b = BoundInputs(options.D, options.Delta, options.delta, options.T,
                    options.n)
    print(swap_sequence_min_batch_size(b))
    return EXIT_OK

def cmd_batch_size(options, printer):
    try:
        print(default_batch_size(options.n, options.k))
    except ValueError as e:
        raise UsageError(str(e))
    return EXIT_OK

COMMANDS = {
    "run": cmd_run,
    "bench": cmd_bench,
    "bound": cmd_bound,
    "batch-size": cmd_batch_size,
}

def main(argv):
    cli = build_cli()
    if ARGCOMPLETE_ENABLED:
        argcomplete.autocomplete(cli)
    options = cli.parse_args(argv[1:])
    printer = LinePrinter(quiet=options.quiet)
    try:
        configure_logging(options.verbose)
        return COMMANDS[options.command](options, printer)
    except (UsageError,) + USAGE_ERRORS as e:
        printer.new_line()
        sys.stderr.write("{}: error: {}\n".format(cli.prog, e))
        return EXIT_USAGE
    except CellError as e:
        printer.new_line()
        if e.traceback is not None:
            sys.stderr.write(e.traceback + "\n")
        elif e.__cause__ is not None:
            printer.write_exception()
        sys.stderr.write("{}: error: {}\n".format(cli.prog, e))
        return EXIT_RUNTIME
    except OneBatchError as e:
        printer.new_line()
        sys.stderr.write("{}: error: {}\n".format(cli.prog, e))
        return EXIT_RUNTIME
    except Exception:
        printer.write_exception()
        return EXIT_RUNTIME

def sys_main():
    sys.exit(main(sys.argv))

if __name__ == "__main__":
    sys_main()
