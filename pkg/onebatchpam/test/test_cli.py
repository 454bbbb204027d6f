# -*- encoding: utf-8 -*-
"""Test 'cli' module.
"""

import io
import json
import os
import shutil
import tempfile
import unittest
from contextlib import redirect_stdout
from contextlib import redirect_stderr
from unittest import mock

from onebatchpam import envar
from onebatchpam.cli import main
from onebatchpam.cli import build_cli
from onebatchpam.cli import algorithm_params
from onebatchpam.cli import algorithms_epilog
from onebatchpam.cli import default_jobs
from onebatchpam.cli import UsageError
from onebatchpam.cli import EXIT_OK
from onebatchpam.cli import EXIT_USAGE
from onebatchpam.cli import EXIT_RUNTIME
from onebatchpam.datalib import DataMatrix
from onebatchpam.datalib import SyntheticSpec
from onebatchpam.datalib import make_rng
from onebatchpam.datalib import save_csv

BLOBS = "n_points=80,dimension=2,n_blobs=4,blob_spread=0.5,seed=3"


class TestMain(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp(prefix="onebatchpam-test-")
        self.environ = mock.patch.dict(os.environ)
        self.environ.start()
        os.environ.pop(envar.LOG_LEVEL, None)
        os.environ.pop(envar.JOBS, None)

    def tearDown(self):
        self.environ.stop()
        shutil.rmtree(self.tmpdir)

    def call(self, *args):
        stdout = io.StringIO()
        stderr = io.StringIO()
        with redirect_stdout(stdout), redirect_stderr(stderr):
            try:
                code = main(["onebatchpam"] + list(args))
            except SystemExit as e:
                code = e.code
        return code, stdout.getvalue(), stderr.getvalue()

    def test_bound(self):
        code, out, _ = self.call("bound", "--D", "1", "--Delta", "0.1",
                                 "--delta", "0.05", "--T", "10",
                                 "--n", "1000")
        self.assertEqual(EXIT_OK, code)
        self.assertEqual("5160", out.strip())

    def test_bound_rejects_bad_inputs(self):
        code, _, err = self.call("bound", "--D", "1", "--Delta", "0",
                                 "--delta", "0.05", "--T", "10",
                                 "--n", "1000")
        self.assertEqual(EXIT_USAGE, code)
        self.assertIn("Delta", err)

    def test_batch_size(self):
        data = [
            ("1331", ("60000", "10")),
            ("100",  ("100", "10")),
            ("1",    ("1", "1")),
        ]
        for i, (a, (n, k)) in enumerate(data):
            code, out, _ = self.call("batch-size", "--n", n, "--k", k)
            self.assertEqual((EXIT_OK, a), (code, out.strip()),
                             "wrong answer for {!r} for data {}"
                             .format((n, k), i))
        code, _, _ = self.call("batch-size", "--n", "0", "--k", "1")
        self.assertEqual(EXIT_USAGE, code)

    def test_run_synthetic(self):
        code, out, _ = self.call("run", "-q", "--algo", "onebatchpam",
                                 "--k", "4", "--synthetic", BLOBS,
                                 "--batch-size", "40", "--variant", "unif",
                                 "--evaluate-exact")
        self.assertEqual(EXIT_OK, code)
        result = json.loads(out)
        self.assertEqual("onebatchpam", result["algorithm"])
        self.assertEqual(4, len(set(result["medoids"])))
        self.assertEqual(80 * 40 + 80 * 4, result["dissim_evals"])
        self.assertGreater(result["exact_objective"], 0.0)
        self.assertGreater(result["est_objective"], 0.0)

    def test_run_csv(self):
        path = os.path.join(self.tmpdir, "data.csv")
        values = make_rng(0).normal(size=(25, 3))
        save_csv(path, DataMatrix(values), header=["a", "b", "c"])
        code, out, _ = self.call("run", "-q", "--algo", "kmeanspp",
                                 "--k", "3", "--metric", "l2",
                                 "--data", path, "--has-header",
                                 "--drop-columns", "2", "--seed", "5")
        self.assertEqual(EXIT_OK, code)
        result = json.loads(out)
        self.assertEqual("kmeanspp", result["algorithm"])
        self.assertIsNone(result["exact_objective"])
        self.assertEqual(25 * 2, result["dissim_evals"])

    def test_run_is_deterministic(self):
        args = ("run", "-q", "--algo", "clara", "--k", "3", "--synthetic",
                BLOBS, "--reps", "2", "--seed", "11")
        _, first, _ = self.call(*args)
        _, second, _ = self.call(*args)
        self.assertEqual(json.loads(first)["medoids"],
                         json.loads(second)["medoids"])

    def test_usage_errors(self):
        data = [
            ("run", "--k", "3"),
            ("run", "--k", "3", "--synthetic", BLOBS, "--data", "x.csv"),
            ("run", "--k", "3", "--synthetic", "n_points=10"),
            ("run", "--k", "3", "--synthetic", BLOBS, "--algo", "pam"),
            ("run", "--k", "0", "--synthetic", BLOBS),
            ("run", "--k", "81", "--synthetic", BLOBS),
            ("run", "--k", "3", "--synthetic", BLOBS, "--algo", "random",
             "--max-passes", "3"),
            ("run", "--k", "3", "--synthetic", BLOBS, "--seed", "-1"),
            ("run", "--k", "3", "--synthetic", BLOBS, "--has-header"),
            ("run", "--k", "1", "--synthetic", BLOBS, "--variant", "debias"),
            ("run", "--k", "3", "--synthetic", BLOBS, "--batch-size", "0"),
            ("run", "--k", "3", "--synthetic", BLOBS, "--variant", "unif",
             "--batch-size", "81"),
            ("bench",),
            ("bench", "--config", os.path.join(self.tmpdir, "none.json")),
            ("frobnicate",),
            (),
        ]
        for i, args in enumerate(data):
            code, _, _ = self.call(*args)
            self.assertEqual(EXIT_USAGE, code,
                             "wrong exit code for {!r} for data {}"
                             .format(args, i))

    def test_missing_data_file(self):
        code, _, err = self.call("run", "-q", "--k", "2", "--data",
                                 os.path.join(self.tmpdir, "none.csv"))
        self.assertEqual(EXIT_USAGE, code)
        self.assertIn("none.csv", err)

    def test_bench(self):
        config = dict(
            dataset=dict(synthetic=dict(n_points=60, dimension=2, n_blobs=3,
                                        blob_spread=0.5, seed=2)),
            metric="l1",
            algorithms=["random", "fasterpam"],
            k_values=[3],
            seeds=[0, 1],
            output_path="records.csv",
        )
        path = os.path.join(self.tmpdir, "config.json")
        with open(path, "w") as stream:
            json.dump(config, stream)
        code, _, err = self.call("bench", "-q", "--config", path,
                                 "--jobs", "0")
        self.assertEqual(EXIT_OK, code, err)
        self.assertTrue(os.path.exists(os.path.join(self.tmpdir,
                                                    "records.csv")))
        with open(os.path.join(self.tmpdir, "records.summary.json")) as f:
            summary = json.load(f)
        self.assertEqual("fasterpam", summary["cells"][0]["best"])
        self.assertEqual(["random", "fasterpam"],
                         [o["label"] for o in summary["overall"]])

    def test_bench_missing_dataset(self):
        config = dict(dataset="none.csv", metric="l1",
                      algorithms=["random"], k_values=[2], seeds=[0],
                      output_path="records.csv")
        path = os.path.join(self.tmpdir, "config.json")
        with open(path, "w") as stream:
            json.dump(config, stream)
        code, _, err = self.call("bench", "-q", "--config", path)
        self.assertEqual(EXIT_USAGE, code)
        self.assertIn("none.csv", err)

    def test_bench_failing_cell(self):
        config = dict(
            dataset=dict(synthetic=dict(n_points=60, dimension=2, n_blobs=3,
                                        blob_spread=0.5, seed=2)),
            metric="l1",
            algorithms=[dict(name="clara", params=dict(subsample_size=2))],
            k_values=[3],
            seeds=[0],
            output_path="records.csv",
        )
        path = os.path.join(self.tmpdir, "config.json")
        with open(path, "w") as stream:
            json.dump(config, stream)
        code, _, err = self.call("bench", "-q", "--config", path)
        self.assertEqual(EXIT_RUNTIME, code)
        self.assertIn("algorithm=clara", err)

    def test_version(self):
        code, out, _ = self.call("--version")
        self.assertEqual(0, code)
        self.assertIn("0.1.0", out)

class TestHelpers(unittest.TestCase):

    def test_algorithm_params_forwards_given_options(self):
        options = build_cli().parse_args(
            ["run", "--k", "2", "--synthetic", BLOBS, "--non-eager",
             "--batch-size", "AUTO", "--epsilon", "0.5"])
        self.assertEqual(dict(eager=False, batch_size="AUTO", epsilon=0.5),
                         algorithm_params(options))
        options = build_cli().parse_args(
            ["run", "--k", "2", "--synthetic", BLOBS])
        self.assertEqual({}, algorithm_params(options))
        self.assertEqual(SyntheticSpec(80, 2, 4, 0.5, 3), options.synthetic)

    def test_algorithms_epilog(self):
        epilog = algorithms_epilog()
        self.assertIn(" kmc2 - ", epilog)
        self.assertIn("chain_length: Length L of the Metropolis chains. "
                      "(default: 20)", epilog)

    def test_default_jobs(self):
        with mock.patch.dict(os.environ, {envar.JOBS: "3"}):
            self.assertEqual(3, default_jobs())
        with mock.patch.dict(os.environ, {envar.JOBS: "many"}):
            with self.assertRaises(UsageError):
                default_jobs()
        with mock.patch.dict(os.environ):
            os.environ.pop(envar.JOBS, None)
            self.assertIsNone(default_jobs())
