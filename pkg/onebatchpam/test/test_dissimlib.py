# -*- encoding: utf-8 -*-
"""Test 'dissimlib' module.
"""


import unittest

import numpy as np
import numpy.testing as npt

from onebatchpam.datalib import DataMatrix
from onebatchpam.datalib import make_rng
from onebatchpam.dissimlib import Dissimilarity
from onebatchpam.dissimlib import as_dissimilarity
from onebatchpam.dissimlib import EvalCounter
from onebatchpam.dissimlib import dissim
from onebatchpam.dissimlib import cross_dissim_matrix
from onebatchpam.dissimlib import pairwise_to_point
from onebatchpam.dissimlib import rows_dissim_matrix
from onebatchpam.errors import DimensionMismatchError
from onebatchpam.errors import ZeroVectorError
from onebatchpam.errors import IndexOutOfRangeError


class TestDissimilarity(unittest.TestCase):

    def test_as_dissimilarity(self):
        for spec in Dissimilarity:
            self.assertIs(spec, as_dissimilarity(spec.value))
            self.assertIs(spec, as_dissimilarity(spec))
        with self.assertRaises(ValueError):
            as_dissimilarity("hamming")
        with self.assertRaises(TypeError):
            as_dissimilarity(1)

    def test_default_exponent(self):
        data = [
            (1.0, Dissimilarity.l1),
            (2.0, Dissimilarity.l2),
            (2.0, Dissimilarity.squared_l2),
            (1.0, Dissimilarity.cosine),
        ]
        for i, (a, q) in enumerate(data):
            self.assertEqual(a, q.default_exponent,
                             "wrong answer for {!r} for data {}".format(q, i))

class TestDissim(unittest.TestCase):

    def test_values(self):
        data = [
            (7.0,  ("l1", [0, 0], [3, 4])),
            (5.0,  ("l2", [0, 0], [3, 4])),
            (25.0, ("squared_l2", [0, 0], [3, 4])),
            (1.0,  ("cosine", [1, 0], [0, 2])),
            (0.0,  ("cosine", [1, 1], [2, 2])),
            (2.0,  ("cosine", [1, 0], [-1, 0])),
        ]
        for i, (a, (spec, x, y)) in enumerate(data):
            counter = EvalCounter()
            self.assertAlmostEqual(a, dissim(spec, x, y, counter), places=12,
                                   msg="wrong answer for {!r} for data {}"
                                   .format(spec, i))
            self.assertEqual(1, counter.count)

    def test_identity_and_symmetry(self):
        rng = make_rng(0)
        counter = EvalCounter()
        for i in range(200):
            x, y = rng.normal(size=(2, 5))
            for spec in Dissimilarity:
                self.assertEqual(0.0, dissim(spec, x, x, counter),
                                 msg="wrong answer for {!r} for data {}"
                                 .format(spec, i))
                self.assertEqual(dissim(spec, x, y, counter),
                                 dissim(spec, y, x, counter))

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            dissim("l1", [0, 1], [0, 1, 2], EvalCounter())

    def test_zero_vector_under_cosine(self):
        counter = EvalCounter()
        with self.assertRaises(ZeroVectorError):
            dissim("cosine", [0, 0], [1, 2], counter)
        self.assertEqual(0, counter.count)
        # Other dissimilarities accept it.
        self.assertEqual(3.0, dissim("l1", [0, 0], [1, 2], counter))

class TestEvalCounter(unittest.TestCase):

    def test_add(self):
        counter = EvalCounter()
        counter.add(3)
        counter.add(0)
        self.assertEqual(3, counter.count)
        with self.assertRaises(ValueError):
            counter.add(-1)

class TestCrossDissimMatrix(unittest.TestCase):

    def test_hand_example(self):
        data = DataMatrix([0, 1, 5])
        counter = EvalCounter()
        matrix = cross_dissim_matrix("l1", data, [0, 2], counter)
        npt.assert_array_equal([[0, 5], [1, 4], [5, 0]], matrix)
        self.assertEqual(6, counter.count)

    def test_all_columns(self):
        data = DataMatrix(make_rng(1).normal(size=(30, 3)))
        counter = EvalCounter()
        for spec in Dissimilarity:
            matrix = cross_dissim_matrix(spec, data, range(30), counter)
            npt.assert_allclose(np.diag(matrix), 0.0, atol=1e-12)
            npt.assert_allclose(matrix, matrix.T, rtol=0, atol=1e-12)
            self.assertTrue((matrix >= 0).all())
        self.assertEqual(4 * 30 * 30, counter.count)

    def test_threaded_is_identical(self):
        data = DataMatrix(make_rng(2).normal(size=(101, 4)))
        columns = [3, 50, 7, 99]
        sequential = EvalCounter()
        threaded = EvalCounter()
        a = cross_dissim_matrix("l2", data, columns, sequential)
        b = cross_dissim_matrix("l2", data, columns, threaded, jobs=4)
        npt.assert_array_equal(a, b)
        self.assertEqual(sequential.count, threaded.count)

    def test_index_out_of_range(self):
        data = DataMatrix([0, 1, 5])
        counter = EvalCounter()
        for i, columns in enumerate(([3], [-1], [0, 7])):
            with self.assertRaises(IndexOutOfRangeError,
                                   msg="for data {}".format(i)):
                cross_dissim_matrix("l1", data, columns, counter)
        self.assertEqual(0, counter.count)

class TestOtherKernels(unittest.TestCase):

    def test_cosine_diagonal_is_zero(self):
        rng = make_rng(13)
        data = DataMatrix(rng.normal(size=(200, 5)))
        for jobs in (1, 4):
            matrix = cross_dissim_matrix("cosine", data, np.arange(200),
                                         EvalCounter(), jobs=jobs)
            npt.assert_array_equal(np.zeros(200), np.diag(matrix))
            self.assertTrue((matrix[~np.eye(200, dtype=bool)] > 0).all())
        column = pairwise_to_point("cosine", data, data.values[7],
                                   EvalCounter())
        self.assertEqual(0.0, column[7])

    def test_pairwise_to_point(self):
        data = DataMatrix([[0, 0], [1, 1], [2, 0]])
        counter = EvalCounter()
        npt.assert_array_equal([1, 1, 1],
                               pairwise_to_point("squared_l2", data, [1, 0],
                                                 counter))
        self.assertEqual(3, counter.count)
        with self.assertRaises(DimensionMismatchError):
            pairwise_to_point("l1", data, [1, 0, 0], counter)

    def test_rows_dissim_matrix(self):
        data = DataMatrix([0, 1, 5, 9])
        counter = EvalCounter()
        matrix = rows_dissim_matrix("l1", data, [1, 3], [0, 2, 3], counter)
        npt.assert_array_equal([[1, 4, 8], [9, 4, 0]], matrix)
        self.assertEqual(6, counter.count)
