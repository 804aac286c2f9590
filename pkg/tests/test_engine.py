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

import logging

import numpy as np
import pytest

from core import ConfigurationError, ConsistencyError, InputArray, Query, QueryBatch, RangeError, SparseTable
from raycast import Solver, build_scene, partitioned, solve_batch, solve_block, solve_single

from .conftest import FIRST, SECOND, random_values

LAYOUTS = [
    pytest.param({"strategy": "single"}, id="single"),
    pytest.param({"block_size": 1}, id="bs1"),
    pytest.param({"block_size": 3}, id="bs3"),
    pytest.param({"block_size": 8}, id="bs8"),
    pytest.param({"block_size": 3, "blockmin_strategy": "lookup_table"}, id="bs3-lookup"),
    pytest.param({"block_size": 2, "dtype": np.float64}, id="bs2-fp64"),
]


class TestWorkedExamples:
    @pytest.mark.parametrize("layout", LAYOUTS)
    @pytest.mark.parametrize(
        ("values", "l", "r", "expected"),
        [
            (FIRST, 2, 6, 5),
            (SECOND, 3, 5, 5),
            (SECOND, 0, 5, 2),
            (SECOND, 1, 4, 2),
            (SECOND, 0, 2, 2),
            (SECOND, 4, 4, 4),
        ],
    )
    def test_answers(self, layout, values, l, r, expected):  # noqa: E741
        arr = InputArray.from_values(values)
        answer = Solver.build(arr, **layout).solve(Query(l, r))
        assert answer.index == expected
        assert answer.value == values[expected]

    def test_block_decomposition(self, second):
        parts = Solver.build(second, block_size=3).decompose(Query(1, 4))
        assert (parts.first_block, parts.last_block) == (0, 1)
        assert parts.left.index == 2
        assert parts.right.index == 4
        assert parts.middle is None
        assert parts.answer.index == 2

    def test_decomposition_with_covered_block(self, second):
        parts = Solver.build(second, block_size=2).decompose(Query(1, 4))
        assert (parts.left.index, parts.middle.index, parts.right.index) == (1, 2, 4)
        assert parts.answer.index == 2

    def test_query_inside_one_block(self, second):
        parts = Solver.build(second, block_size=3).decompose(Query(3, 4))
        assert parts.single_block
        assert parts.right is None
        assert parts.left.index == 4


class TestAgainstSparseTable:
    @pytest.mark.parametrize("layout", LAYOUTS)
    @pytest.mark.parametrize("distinct", [None, 3])
    def test_all_pairs(self, rng, layout, distinct):
        arr = random_values(rng, 64, distinct=distinct)
        left, right = np.triu_indices(64)
        batch = QueryBatch(left, right)
        result = Solver.build(arr, **layout).solve_batch(batch)
        expected = SparseTable(arr).query_batch(batch)
        np.testing.assert_array_equal(result.indices, expected)
        np.testing.assert_array_equal(result.values, arr.values[expected])

    @pytest.mark.parametrize("block_size", [7, 64, 1000, None])
    @pytest.mark.parametrize("blockmin", ["geometry", "lookup_table"])
    def test_sampled(self, rng, block_size, blockmin):
        n = 5000
        arr = random_values(rng, n)
        left = rng.integers(0, n, size=3000)
        right = np.minimum(n - 1, left + rng.integers(0, n, size=3000))
        batch = QueryBatch(left, right)
        solver = Solver.build(arr, block_size=block_size, blockmin_strategy=blockmin, check_payload=True)
        np.testing.assert_array_equal(solver.solve_batch(batch).indices, SparseTable(arr).query_batch(batch))

    def test_negative_and_large_values(self):
        arr = InputArray.from_values([1e30, -1e30, 3.0, -1e30, 0.0, -2.5e29])
        for layout in ({"strategy": "single"}, {"block_size": 2}):
            assert Solver.build(arr, **layout).solve(Query(0, 5)).index == 1
            assert Solver.build(arr, **layout).solve(Query(2, 5)).index == 3


class TestStrictLayout:
    @pytest.mark.parametrize(("n", "block_size"), [(16, 4), (64, 8), (9, 3), (36, 6), (100, 10)])
    @pytest.mark.parametrize("blockmin", ["geometry", "lookup_table"])
    @pytest.mark.parametrize("distinct", [None, 3])
    def test_all_pairs(self, rng, n, block_size, blockmin, distinct):
        arr = random_values(rng, n, distinct=distinct)
        left, right = np.triu_indices(n)
        batch = QueryBatch(left, right)
        solver = Solver.build(arr, block_size=block_size, blockmin_strategy=blockmin, strict_layout=True, fallback=False)
        assert solver.scene.config.strict
        assert solver.scene.config.block_size <= solver.scene.config.num_blocks
        np.testing.assert_array_equal(solver.solve_batch(batch).indices, SparseTable(arr).query_batch(batch))

    def test_worked_example(self, first):
        solver = Solver.build(first, block_size=2, strict_layout=True, fallback=False)
        assert solver.solve(Query(2, 6)).index == 5

    def test_warns_when_blocks_outgrow_their_cell(self, rng, caplog):
        arr = random_values(rng, 16)
        with caplog.at_level(logging.WARNING, logger="transform"):
            Solver.build(arr, block_size=8, strict_layout=True, fallback=False)
        assert any("leave the unit cell" in record.getMessage() for record in caplog.records)

    def test_no_warning_when_blocks_fit(self, rng, caplog):
        arr = random_values(rng, 16)
        with caplog.at_level(logging.WARNING, logger="transform"):
            Solver.build(arr, block_size=4, strict_layout=True, fallback=False)
        assert not any("leave the unit cell" in record.getMessage() for record in caplog.records)


class TestThreads:
    def test_answers_do_not_depend_on_worker_count(self, rng):
        arr = random_values(rng, 4096)
        left = rng.integers(0, 4096, size=10_000)
        right = np.minimum(4095, left + rng.integers(0, 300, size=10_000))
        batch = QueryBatch(left, right)
        solver = Solver.build(arr)
        one = solver.solve_batch(batch, threads=1)
        many = solver.solve_batch(batch, threads=8)
        np.testing.assert_array_equal(one.indices, many.indices)
        assert one.elapsed_ns > 0

    def test_more_workers_than_queries(self, first):
        batch = QueryBatch.from_queries([(0, 6), (2, 6)])
        indices, _ = partitioned(Solver.build(first).indices, batch, 16)
        np.testing.assert_array_equal(indices, [5, 5])


class TestErrors:
    def test_out_of_range_query(self, first):
        with pytest.raises(RangeError):
            Solver.build(first).solve(Query(3, 7))
        with pytest.raises(RangeError):
            Solver.build(first).solve_batch(QueryBatch.from_queries([(0, 1), (5, 2)]))

    def test_wrong_scene(self, first, second):
        with pytest.raises(ConfigurationError):
            Solver(first, build_scene(second))

    def test_layout_specific_entry_points(self, first):
        single = Solver.build(first, strategy="single")
        block = Solver.build(first, block_size=2)
        assert solve_single(single, Query(2, 6)).index == 5
        assert solve_block(block, Query(2, 6)).index == 5
        with pytest.raises(ConfigurationError):
            solve_single(block, Query(2, 6))
        with pytest.raises(ConfigurationError):
            solve_block(single, Query(2, 6))
        with pytest.raises(ConfigurationError):
            single.decompose(Query(2, 6))

    def test_unknown_strategy(self, first):
        with pytest.raises(ConfigurationError):
            Solver.build(first, strategy="tiled")  # type: ignore[arg-type]

    def test_failing_block_size_without_fallback(self):
        arr = InputArray.from_values(np.zeros(10, dtype=np.float32))
        with pytest.raises(ConfigurationError):
            Solver.build(arr, block_size=1 << 20, fallback=False)

    def test_shifted_right_block_is_caught(self, rng):
        arr = random_values(rng, 256)
        left, right = np.triu_indices(256)
        batch = QueryBatch(left, right)
        expected = SparseTable(arr).query_batch(batch)
        solver = Solver.build(arr, block_size=16, b_r_begin_shift=1)
        # a right block starting at its first element leaves an empty range and no hit
        with pytest.raises(ConsistencyError):
            solve_batch(solver, batch)
        safe = (right % 16 != 0) | (left // 16 == right // 16)
        got = solver.solve_batch(QueryBatch(left[safe], right[safe])).indices
        assert np.any(got != expected[safe])
