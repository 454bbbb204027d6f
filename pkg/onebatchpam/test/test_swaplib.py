# -*- encoding: utf-8 -*-
"""Test 'swaplib' module.
"""


import unittest

import numpy as np
import numpy.testing as npt

from onebatchpam.datalib import DataMatrix
from onebatchpam.datalib import SyntheticSpec
from onebatchpam.datalib import generate_blobs
from onebatchpam.datalib import make_rng
from onebatchpam.dissimlib import EvalCounter
from onebatchpam.batchlib import BatchView
from onebatchpam.batchlib import BatchStrategy
from onebatchpam.batchlib import sample_batch
from onebatchpam.batchlib import build_batch
from onebatchpam.swaplib import MedoidSet
from onebatchpam.swaplib import NeighborCache
from onebatchpam.swaplib import estimated_objective
from onebatchpam.swaplib import exact_objective
from onebatchpam.swaplib import swap_gain_scan
from onebatchpam.swaplib import slot_gains
from onebatchpam.swaplib import candidate_gains
from onebatchpam.swaplib import run_swap_pass
from onebatchpam.swaplib import acceptance_threshold
from onebatchpam.swaplib import GAIN_RTOL
from onebatchpam.swaplib import swap_search
from onebatchpam.swaplib import one_medoid
from onebatchpam.swaplib import one_batch_pam
from onebatchpam.swaplib import faster_pam
from onebatchpam.errors import InvalidKError
from onebatchpam.errors import CandidateIsMedoidError
from onebatchpam.errors import DebiasRequiresKAtLeast2Error
from onebatchpam.errors import NonFiniteError
from onebatchpam.errors import IndexOutOfRangeError


def batch_sum(batch, indices):
    """m times the batch estimate, computed directly."""
    return batch.matrix[list(indices)].min(axis=0).sum()

def oracle_gain(batch, medoids, slot, row):
    swapped = list(medoids.indices)
    swapped[slot] = row
    return batch_sum(batch, medoids.indices) - batch_sum(batch, swapped)

def handmade_batch(matrix, strategy=BatchStrategy.unif):
    matrix = np.asarray(matrix, dtype=np.float64)
    m = matrix.shape[1]
    return BatchView(np.arange(m), np.ones(m), matrix, strategy)

class TestMedoidSet(unittest.TestCase):

    def test_valid(self):
        medoids = MedoidSet([4, 0, 2], 5)
        self.assertEqual(3, medoids.k)
        self.assertEqual((4, 0, 2), medoids.as_tuple())
        self.assertTrue(medoids.is_medoid(0))
        self.assertFalse(medoids.is_medoid(1))
        self.assertIn(4, medoids)

    def test_invalid(self):
        with self.assertRaises(InvalidKError):
            MedoidSet([1, 1], 5)
        with self.assertRaises(InvalidKError):
            MedoidSet([], 5)
        with self.assertRaises(IndexOutOfRangeError):
            MedoidSet([5], 5)

    def test_swap(self):
        medoids = MedoidSet([4, 0, 2], 5)
        self.assertEqual(0, medoids.swap(1, 3))
        self.assertEqual((4, 3, 2), medoids.as_tuple())
        self.assertFalse(medoids.is_medoid(0))
        self.assertTrue(medoids.is_medoid(3))
        with self.assertRaises(CandidateIsMedoidError):
            medoids.swap(0, 2)

    def test_copy_is_independent(self):
        medoids = MedoidSet([0, 1], 3)
        other = medoids.copy()
        other.swap(0, 2)
        self.assertEqual((0, 1), medoids.as_tuple())

class TestObjectives(unittest.TestCase):

    def test_hand_example(self):
        data = DataMatrix([0, 1, 5])
        counter = EvalCounter()
        batch = build_batch(data, [0, 1, 2], "unif", "l1", counter)
        self.assertAlmostEqual(5.0 / 3,
                               estimated_objective(batch, MedoidSet([1], 3)))
        counter = EvalCounter()
        self.assertAlmostEqual(5.0 / 3,
                               exact_objective(data, [1], "l1", counter))
        self.assertEqual(3, counter.count)

    def test_every_point_is_a_medoid(self):
        data = DataMatrix(make_rng(0).normal(size=(6, 2)))
        counter = EvalCounter()
        self.assertEqual(0.0, exact_objective(data, range(6), "l2", counter))
        self.assertEqual(36, counter.count)
        self.assertEqual(0.0, exact_objective(DataMatrix([[3.0]]), [0], "l1",
                                              EvalCounter()))

    def test_doubled_weights_double_the_estimate(self):
        data = DataMatrix(make_rng(1).normal(size=(20, 2)))
        batch = sample_batch(data, 8, "unif", "l1", 0, EvalCounter())
        medoids = MedoidSet([0, 5], 20)
        self.assertAlmostEqual(2 * estimated_objective(batch, medoids),
                               estimated_objective(batch.scaled(2.0), medoids))

    def test_debias_with_one_medoid_is_not_finite(self):
        data = DataMatrix([0, 1, 5])
        batch = build_batch(data, [0, 1, 2], "debias", "l1", EvalCounter())
        with self.assertRaises(NonFiniteError):
            estimated_objective(batch, MedoidSet([1], 3))
        # Column minima 1, 1 and 4.
        self.assertAlmostEqual(2.0,
                               estimated_objective(batch,
                                                   MedoidSet([0, 1], 3)))

class TestNeighborCache(unittest.TestCase):

    def test_build(self):
        batch = handmade_batch([[1.0, 4.0, 2.0],
                                [3.0, 0.0, 2.0],
                                [0.0, 9.0, 5.0]])
        cache = NeighborCache.build(batch, MedoidSet([0, 1, 2], 3))
        npt.assert_array_equal([2, 1, 0], cache.near)
        npt.assert_array_equal([0, 0, 1], cache.sec)
        npt.assert_array_equal([0.0, 0.0, 2.0], cache.d_near)
        npt.assert_array_equal([1.0, 4.0, 2.0], cache.d_sec)
        npt.assert_array_equal([0.0, -4.0, -1.0], cache.removal_gain)
        self.assertEqual(2.0, cache.estimate_sum)

    def test_requires_two_medoids(self):
        batch = handmade_batch([[1.0], [2.0]])
        with self.assertRaises(InvalidKError):
            NeighborCache.build(batch, MedoidSet([0], 2))

    def test_update_equals_build(self):
        rng = make_rng(5)
        for i in range(30):
            # Small integers make ties frequent.
            matrix = rng.integers(0, 4, size=(12, 9)).astype(np.float64)
            batch = handmade_batch(matrix)
            medoids = MedoidSet(rng.choice(12, size=4, replace=False), 12)
            cache = NeighborCache.build(batch, medoids)
            for _ in range(10):
                slot = int(rng.integers(4))
                row = int(rng.choice(np.flatnonzero(~medoids.mask)))
                medoids.swap(slot, row)
                cache.update(batch, slot)
                self.assertTrue(
                    cache.same_as(NeighborCache.build(batch, medoids)),
                    "incremental cache diverged for data {}".format(i))

class TestSwapGain(unittest.TestCase):

    def test_hand_trace(self):
        # One batch column: d_near=5 (slot 0), d_sec=9 (slot 1), d'=7.
        batch = handmade_batch([[5.0], [9.0], [7.0]])
        cache = NeighborCache.build(batch, MedoidSet([0, 1], 3))
        gains = slot_gains(batch, cache, 2)
        npt.assert_array_equal([-2.0, 0.0], gains)
        self.assertEqual((1, 0.0), swap_gain_scan(batch, cache, 2))

    def test_candidate_is_medoid(self):
        batch = handmade_batch([[5.0], [9.0], [7.0]])
        cache = NeighborCache.build(batch, MedoidSet([0, 1], 3))
        with self.assertRaises(CandidateIsMedoidError):
            swap_gain_scan(batch, cache, 1)

    def test_duplicate_point_of_a_medoid(self):
        data = DataMatrix([0, 0, 4, 10])
        batch = build_batch(data, [0, 1, 2, 3], "unif", "l1", EvalCounter())
        cache = NeighborCache.build(batch, MedoidSet([0, 3], 4))
        gains = slot_gains(batch, cache, 1)
        self.assertAlmostEqual(0.0, gains[0])

    def test_matches_oracle(self):
        rng = make_rng(7)
        for i in range(20):
            n = int(rng.integers(10, 50))
            data = DataMatrix(rng.normal(size=(n, 3)))
            strategy = list(BatchStrategy)[i % 4]
            batch = sample_batch(data, min(n, 10), strategy, "l1", i,
                                 EvalCounter())
            k = int(rng.integers(2, 5))
            medoids = MedoidSet(rng.choice(n, size=k, replace=False), n)
            cache = NeighborCache.build(batch, medoids)
            for row in np.flatnonzero(~medoids.mask):
                gains = slot_gains(batch, cache, row)
                for slot in range(k):
                    expected = oracle_gain(batch, medoids, slot, row)
                    self.assertAlmostEqual(
                        expected, gains[slot],
                        delta=1e-9 * max(1.0, abs(expected)),
                        msg="wrong answer for {!r} for data {}"
                        .format((row, slot), i))
                best, gain = swap_gain_scan(batch, cache, row)
                self.assertEqual(int(np.argmax(gains)), best)
                self.assertEqual(gains[best], gain)

    def test_candidate_gains_ties_to_smallest_slot(self):
        batch = handmade_batch([[0.0, 1.0], [1.0, 0.0], [3.0, 3.0]])
        cache = NeighborCache.build(batch, MedoidSet([0, 1], 3))
        slots, _ = candidate_gains(batch, cache, np.array([2]))
        self.assertEqual(0, slots[0])

class TestSwapPass(unittest.TestCase):

    def test_local_optimum_is_a_fixed_point(self):
        data = DataMatrix([0, 1, 2, 10, 11, 12])
        batch = build_batch(data, range(6), "unif", "l1", EvalCounter())
        medoids = MedoidSet([1, 4], 6)
        cache = NeighborCache.build(batch, medoids)
        self.assertEqual(0, run_swap_pass(batch, medoids, cache))
        self.assertEqual((1, 4), medoids.as_tuple())

    def test_all_points_are_medoids(self):
        data = DataMatrix([0, 1, 2])
        batch = build_batch(data, range(3), "unif", "l1", EvalCounter())
        medoids = MedoidSet([2, 0, 1], 3)
        cache = NeighborCache.build(batch, medoids)
        self.assertEqual(0, run_swap_pass(batch, medoids, cache))

    def test_medoids_leave_a_single_blob(self):
        data = DataMatrix([0, 1, 2, 100, 101, 102, 200, 201, 202])
        batch = build_batch(data, range(9), "unif", "l1", EvalCounter())
        medoids = MedoidSet([0, 1, 2], 9)
        swaps, passes, _ = swap_search(batch, medoids)
        self.assertGreaterEqual(swaps, 2)
        blobs = sorted(int(data.values[i, 0]) // 100 for i in medoids)
        self.assertEqual([0, 1, 2], blobs)
        self.assertEqual((1, 4, 7), tuple(sorted(medoids)))

    def test_two_swaps_in_one_pass(self):
        # Blob centers come first in scan order: 101 then 201.
        data = DataMatrix([10, 0, 20, 101, 201, 100, 102, 200, 202])
        batch = build_batch(data, range(9), "unif", "l1", EvalCounter())
        medoids = MedoidSet([1, 2, 0], 9)
        cache = NeighborCache.build(batch, medoids)
        gains = []
        swaps = run_swap_pass(batch, medoids, cache,
                              on_swap=lambda s, r, g: gains.append((s, r, g)))
        self.assertEqual(2, swaps)
        self.assertEqual([(0, 3, 474.0), (1, 4, 288.0)], gains)
        self.assertEqual((3, 4, 0), medoids.as_tuple())
        self.assertEqual(24.0, cache.estimate_sum)
        self.assertEqual(0, run_swap_pass(batch, medoids, cache))

    def test_rounding_noise_gain_is_rejected(self):
        batch = handmade_batch([[1.0], [5.0], [1.0 - 1e-14]])
        for eager in (True, False):
            medoids = MedoidSet([0, 1], 3)
            cache = NeighborCache.build(batch, medoids)
            _, gain = swap_gain_scan(batch, cache, 2)
            self.assertGreater(gain, 0.0)
            self.assertLessEqual(gain, acceptance_threshold(1.0))
            self.assertEqual(0, run_swap_pass(batch, medoids, cache,
                                              eager=eager))
            self.assertEqual((0, 1), medoids.as_tuple())

    def test_small_real_gain_is_accepted(self):
        batch = handmade_batch([[1.0], [5.0], [1.0 - 1e-6]])
        for eager in (True, False):
            medoids = MedoidSet([0, 1], 3)
            cache = NeighborCache.build(batch, medoids)
            self.assertEqual(1, run_swap_pass(batch, medoids, cache,
                                              eager=eager))
            self.assertEqual((2, 1), medoids.as_tuple())

    def test_acceptance_threshold(self):
        self.assertEqual(GAIN_RTOL * 10.0, acceptance_threshold(10.0))
        self.assertAlmostEqual(0.5, acceptance_threshold(10.0, 0.05),
                               delta=1e-9)
        self.assertGreater(acceptance_threshold(0.0), 0.0)

    def test_each_swap_decreases_the_estimate_by_its_gain(self):
        data = generate_blobs(SyntheticSpec(120, 2, 4, 1.0, seed=3))
        for strategy in BatchStrategy:
            batch = sample_batch(data, 30, strategy, "l2", 1, EvalCounter())
            medoids = MedoidSet([0, 1, 2, 3], data.n)
            cache = NeighborCache.build(batch, medoids)
            before = [batch_sum(batch, medoids.indices)]
            def on_swap(slot, row, gain):
                after = batch_sum(batch, medoids.indices)
                self.assertGreater(gain, 0)
                self.assertAlmostEqual(before[0] - after, gain,
                                       delta=1e-9 * before[0])
                self.assertTrue(cache.same_as(
                    NeighborCache.build(batch, medoids)))
                before[0] = after
            for _ in range(5):
                if run_swap_pass(batch, medoids, cache,
                                 on_swap=on_swap) == 0:
                    break

    def test_non_eager_performs_the_best_swap(self):
        data = DataMatrix(make_rng(4).normal(size=(30, 2)))
        batch = build_batch(data, range(30), "unif", "l1", EvalCounter())
        medoids = MedoidSet([0, 1], 30)
        cache = NeighborCache.build(batch, medoids)
        best = max(oracle_gain(batch, medoids, slot, row)
                   for row in range(2, 30) for slot in range(2))
        gains = []
        swaps = run_swap_pass(batch, medoids, cache, eager=False,
                              on_swap=lambda s, r, g: gains.append(g))
        self.assertEqual(1, swaps)
        self.assertAlmostEqual(best, gains[0], delta=1e-9 * abs(best))

    def test_epsilon_threshold(self):
        data = DataMatrix(make_rng(6).normal(size=(40, 2)))
        batch = build_batch(data, range(40), "unif", "l1", EvalCounter())
        medoids = MedoidSet([0, 1, 2], 40)
        cache = NeighborCache.build(batch, medoids)
        def on_swap(slot, row, gain):
            before = cache.estimate_sum + gain
            self.assertGreater(gain, 0.05 * before * (1 - 1e-12))
        run_swap_pass(batch, medoids, cache, epsilon=0.05, on_swap=on_swap)
        # A huge epsilon forbids every swap.
        medoids = MedoidSet([0, 1, 2], 40)
        cache = NeighborCache.build(batch, medoids)
        self.assertEqual(0, run_swap_pass(batch, medoids, cache,
                                          epsilon=1e6))

    def test_negative_epsilon(self):
        batch = handmade_batch([[0.0, 1.0], [1.0, 0.0], [3.0, 3.0]])
        with self.assertRaises(ValueError):
            swap_search(batch, MedoidSet([0, 1], 3), epsilon=-1.0)

class TestOneMedoid(unittest.TestCase):

    def test_hand_example(self):
        data = DataMatrix([0, 1, 5])
        batch = build_batch(data, range(3), "unif", "l1", EvalCounter())
        self.assertEqual(1, one_medoid(batch))

    def test_single_point(self):
        batch = build_batch(DataMatrix([[2.0]]), [0], "unif", "l1",
                            EvalCounter())
        self.assertEqual(0, one_medoid(batch))

    def test_heavy_column(self):
        # Column 2 weighs 10: the point nearest to it wins.
        matrix = np.array([[0.0, 1.0, 30.0], [1.0, 0.0, 20.0],
                           [30.0, 20.0, 0.0]])
        batch = BatchView(np.arange(3), np.array([1.0, 1.0, 10.0]),
                          matrix * [1.0, 1.0, 10.0], BatchStrategy.unif)
        self.assertEqual(2, one_medoid(batch))

class TestOneBatchPam(unittest.TestCase):

    def test_budget(self):
        data = generate_blobs(SyntheticSpec(300, 3, 4, 1.0, seed=1))
        for strategy in ("unif", "debias", "nniw"):
            result = one_batch_pam(data, 4, "l1", strategy=strategy, m=50,
                                   seed=2)
            self.assertEqual(300 * 50, result.dissim_evals)
            self.assertIsNone(result.exact_objective)
            result = one_batch_pam(data, 4, "l1", strategy=strategy, m=50,
                                   seed=2, evaluate_exact=True)
            self.assertEqual(300 * 50 + 300 * 4, result.dissim_evals)
            self.assertGreaterEqual(result.exact_objective, 0.0)
        result = one_batch_pam(data, 4, "l1", strategy="lwcs", m=50, seed=2)
        self.assertEqual(300 * 50 + 300, result.dissim_evals)

    def test_same_seed_same_result(self):
        data = generate_blobs(SyntheticSpec(200, 2, 3, 1.0, seed=5))
        a = one_batch_pam(data, 3, "l2", seed=9, evaluate_exact=True)
        b = one_batch_pam(data, 3, "l2", seed=9, evaluate_exact=True)
        self.assertEqual(a.medoids, b.medoids)
        self.assertEqual(a.exact_objective, b.exact_objective)
        self.assertEqual(a.dissim_evals, b.dissim_evals)

    def test_result_fields(self):
        data = generate_blobs(SyntheticSpec(100, 2, 3, 1.0, seed=5))
        result = one_batch_pam(data, 3, "l1", m=20, seed=0)
        self.assertEqual("onebatchpam", result.algorithm)
        self.assertEqual(3, len(set(result.medoids)))
        self.assertGreaterEqual(result.swaps, 0)
        self.assertEqual(result.passes, len(result.history))
        self.assertGreaterEqual(result.wall_millis, 0.0)
        d = result.to_dict()
        self.assertEqual(list(result.medoids), d["medoids"])

    def test_k_equals_n(self):
        data = DataMatrix([0, 3, 7])
        result = one_batch_pam(data, 3, "l1", strategy="unif", m=3)
        self.assertEqual(0.0, result.est_objective)
        self.assertEqual(0, result.swaps)

    def test_invalid_k(self):
        data = DataMatrix([0, 3, 7])
        for i, k in enumerate((0, 4, 1.5)):
            with self.assertRaises(InvalidKError,
                                   msg="for data {}".format(i)):
                one_batch_pam(data, k, "l1")

    def test_debias_requires_two_medoids(self):
        with self.assertRaises(DebiasRequiresKAtLeast2Error):
            one_batch_pam(DataMatrix([0, 3, 7]), 1, "l1", strategy="debias")

    def test_max_passes(self):
        data = DataMatrix(make_rng(8).normal(size=(80, 2)))
        result = one_batch_pam(data, 5, "l1", strategy="unif", m=80,
                               max_passes=1, seed=3)
        self.assertEqual(1, result.passes)

class TestFasterPam(unittest.TestCase):

    def test_single_medoid(self):
        data = DataMatrix([0, 1, 5])
        result = faster_pam(data, 1, "l1", evaluate_exact=True)
        self.assertEqual((1,), result.medoids)
        self.assertAlmostEqual(5.0 / 3, result.exact_objective)
        self.assertEqual("fasterpam", result.algorithm)

    def test_two_points(self):
        result = faster_pam(DataMatrix([0, 1]), 2, "l1", evaluate_exact=True)
        self.assertEqual([0, 1], sorted(result.medoids))
        self.assertEqual(0.0, result.exact_objective)

    def test_improves_on_initialization(self):
        data = DataMatrix(make_rng(10).normal(size=(150, 3)))
        result = faster_pam(data, 4, "l1", seed=4, evaluate_exact=True)
        init = make_rng(4)
        # The full uniform batch draws a permutation first.
        init.choice(150, size=150, replace=False)
        start = init.choice(150, size=4, replace=False)
        self.assertLessEqual(result.exact_objective,
                             exact_objective(data, start, "l1",
                                             EvalCounter()))
        self.assertEqual(150 * 150 + 150 * 4, result.dissim_evals)
        self.assertAlmostEqual(result.est_objective, result.exact_objective)
