"""MIT License.

Copyright (c) 2023 Ritik Ranjan

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""

from __future__ import annotations

import numpy as np
import pytest

from core import (
    DomainError,
    InputArray,
    Query,
    QueryBatch,
    RangeError,
    SparseTable,
    build_sparse_table,
    exhaustive_batch,
    rmq_exhaustive,
    rmq_sparse,
    scan_indices,
)

from .conftest import random_values


class TestInputArray:
    def test_rejects_empty(self):
        with pytest.raises(DomainError):
            InputArray.from_values([])

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(DomainError, match="position 1"):
            InputArray.from_values([1.0, bad, 2.0])

    def test_values_are_read_only_float32(self, first):
        assert first.values.dtype == np.float32
        assert first.n == 7
        with pytest.raises(ValueError):
            first.values[0] = 0

    @pytest.mark.parametrize("low", [0.0, 1.0, -3.5, -(2.0**30), 2.0**30, 1e-30])
    def test_theta_strictly_below_minimum(self, low):
        arr = InputArray.from_values([low, low + abs(low) + 1])
        assert arr.theta < arr.min_value


class TestQuery:
    def test_length(self):
        assert len(Query(2, 6)) == 5

    @pytest.mark.parametrize(("l", "r"), [(-1, 2), (3, 2), (0, 7)])
    def test_out_of_range(self, l, r):  # noqa: E741
        with pytest.raises(RangeError):
            Query(l, r).validate(7)

    def test_batch_names_first_bad_query(self):
        batch = QueryBatch.from_queries([(0, 1), (2, 9), (5, 4)])
        with pytest.raises(RangeError, match=r"\(2, 9\)"):
            batch.validate(7)

    def test_batch_iteration_and_slice(self):
        batch = QueryBatch.from_queries([Query(0, 1), (2, 3), (4, 6)])
        assert list(batch) == [Query(0, 1), Query(2, 3), Query(4, 6)]
        assert list(batch.slice(1, 3)) == [Query(2, 3), Query(4, 6)]
        np.testing.assert_array_equal(batch.lengths(), [2, 2, 3])

    def test_empty_batch(self):
        with pytest.raises(RangeError):
            QueryBatch.from_queries([])


class TestExhaustive:
    def test_worked_example(self, first):
        answer = rmq_exhaustive(first, Query(2, 6))
        assert answer.index == 5
        assert answer.value == 1.0

    def test_ties_go_left(self):
        arr = InputArray.from_values([1, 0, 0, 1, 0])
        assert rmq_exhaustive(arr, Query(0, 4)).index == 1
        assert rmq_exhaustive(arr, Query(2, 4)).index == 2

    def test_single_element(self):
        arr = InputArray.from_values([42.0])
        assert rmq_exhaustive(arr, Query(0, 0)).index == 0

    def test_batch_matches_scalar(self, second):
        batch = QueryBatch.from_queries([(3, 5), (0, 5), (1, 4)])
        np.testing.assert_array_equal(exhaustive_batch(second, batch), [5, 2, 2])


class TestSparseTable:
    @pytest.mark.parametrize("distinct", [None, 2, 5])
    def test_all_pairs_against_scan(self, rng, distinct):
        arr = random_values(rng, 97, distinct=distinct)
        left, right = np.triu_indices(arr.n)
        expected = scan_indices(arr.values, left.astype(np.int64), right.astype(np.int64))
        np.testing.assert_array_equal(SparseTable(arr).indices(left, right), expected)

    def test_scalar_queries(self, second):
        table = build_sparse_table(second)
        assert rmq_sparse(table, Query(3, 5)).index == 5
        assert rmq_sparse(table, Query(0, 5)).index == 2
        assert table.argmin(1, 4) == 2

    def test_levels(self):
        table = SparseTable(InputArray.from_values(np.arange(1000, dtype=np.float32)))
        assert table.levels == 10

    def test_rejects_bad_query(self, first):
        with pytest.raises(RangeError):
            rmq_sparse(build_sparse_table(first), Query(4, 7))

    def test_widening_never_raises_minimum(self, rng):
        arr = random_values(rng, 200)
        table = SparseTable(arr)
        left = rng.integers(1, 200, size=500)
        right = np.maximum(left, rng.integers(0, 200, size=500))
        inner = arr.values[table.indices(left, right)]
        outer = arr.values[table.indices(left - 1, right)]
        assert np.all(outer <= inner)
