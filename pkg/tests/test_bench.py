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

import io
import math

import numpy as np
import pytest

from bench import (
    CSV_HEADER,
    BenchRecord,
    DistributionSpec,
    SweepSettings,
    batch_sweep,
    best_of,
    block_size_candidates,
    gen_lengths,
    gen_queries,
    heatmap_sweep,
    make_rng,
    read_csv,
    run_bench,
    write_csv,
)
from bench import sweeps
from core import ConfigurationError


class TestDistributions:
    @pytest.mark.parametrize("kind", ["large", "medium", "small"])
    def test_sample_mean(self, kind):
        spec = DistributionSpec(kind, 1 << 26)
        lengths = gen_lengths(spec, 100_000, make_rng(3))
        assert lengths.min() >= 1
        assert lengths.max() <= 1 << 26
        assert lengths.mean() == pytest.approx(spec.analytic_mean(), rel=0.02, abs=1)

    def test_location(self):
        spec = DistributionSpec("medium", 1 << 20)
        assert spec.mu == pytest.approx(0.6 * 20 * math.log(2))
        assert DistributionSpec("large", 10).mu is None

    @pytest.mark.parametrize("kind", ["large", "medium", "small"])
    def test_queries_are_valid(self, kind):
        batch = gen_queries(DistributionSpec(kind, 1000), 20_000, seed=11)
        assert np.all(batch.left >= 0)
        assert np.all(batch.left <= batch.right)
        assert np.all(batch.right < 1000)
        assert batch.distribution_tag == kind

    def test_same_seed_same_queries(self):
        spec = DistributionSpec("small", 1 << 16)
        a, b = gen_queries(spec, 1000, seed=5), gen_queries(spec, 1000, seed=5)
        np.testing.assert_array_equal(a.left, b.left)
        np.testing.assert_array_equal(a.right, b.right)
        assert not np.array_equal(a.left, gen_queries(spec, 1000, seed=6).left)

    def test_fraction(self):
        spec = DistributionSpec.fraction(1024, -3)
        assert spec.length == 128
        assert spec.tag == "n*2^-3"
        np.testing.assert_array_equal(gen_queries(spec, 50, seed=1).lengths(), 128)

    def test_fraction_is_at_least_one(self):
        assert DistributionSpec.fraction(16, -10).length == 1

    @pytest.mark.parametrize(
        "kwargs",
        [{"kind": "huge", "n": 10}, {"kind": "large", "n": 0}, {"kind": "fixed", "n": 10, "length": 11}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            DistributionSpec(**kwargs)


class TestRunBench:
    @pytest.mark.parametrize("algo", ["raycast", "sparse", "exhaustive"])
    def test_record(self, algo):
        record = run_bench(algo, 512, 256, DistributionSpec("large", 512), reps=2, realizations=2, seed=3)
        assert record.status == "ok"
        assert record.ok
        assert record.ns_per_rmq > 0
        assert record.answers.shape == (512,)
        assert (record.block_size is not None) == (algo == "raycast")

    def test_algorithms_agree(self):
        spec = DistributionSpec("medium", 2048)
        answers = [run_bench(algo, 2048, 500, spec, 1, 2, seed=9).answers for algo in ("raycast", "sparse", "exhaustive")]
        np.testing.assert_array_equal(answers[0], answers[1])
        np.testing.assert_array_equal(answers[1], answers[2])

    def test_reproducible(self):
        spec = DistributionSpec("small", 1024)
        a = run_bench("raycast", 1024, 300, spec, 1, 1, seed=4, threads=1)
        b = run_bench("raycast", 1024, 300, spec, 1, 1, seed=4, threads=4)
        np.testing.assert_array_equal(a.answers, b.answers)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ConfigurationError):
            run_bench("bogus", 16, 4, DistributionSpec("large", 16), 1, 1, 0)
        with pytest.raises(ConfigurationError):
            run_bench("sparse", 16, 4, DistributionSpec("large", 32), 1, 1, 0)
        with pytest.raises(ConfigurationError):
            run_bench("raycast", 16, 4, DistributionSpec("large", 16), 0, 1, 0)

    def test_failing_block_size_without_fallback(self):
        with pytest.raises(ConfigurationError):
            run_bench("raycast", 16, 4, DistributionSpec("large", 16), 1, 1, 0, block_size=1 << 20, fallback=False)


class TestCsv:
    def test_round_trip_keeps_missing_block_size(self):
        records = [
            BenchRecord(1024, 64, "large", "sparse", None, 12.5, 0.8, 2, 3, 7),
            BenchRecord(1024, 64, "n*2^-2", "raycast", 32, 40.25, 2.6, 2, 3, 7),
        ]
        out = io.StringIO()
        assert write_csv(records, out) == 2
        assert out.getvalue().splitlines()[0] == ",".join(CSV_HEADER)
        out.seek(0)
        assert read_csv(out) == records

    def test_failed_row(self):
        record = BenchRecord.failed(MemoryError(), n=1, q=1, dist="large", algo="raycast", block_size=4, reps=1, realizations=1, seed=0)
        assert record.status == "error:MemoryError"
        assert not record.ok
        assert math.isnan(record.ns_per_rmq)
        assert record.to_row()[5] == "nan"

    def test_unexpected_header(self):
        with pytest.raises(ConfigurationError):
            read_csv(io.StringIO("a,b\n1,2\n"))

    def test_best_of(self):
        fast = BenchRecord(1, 1, "large", "raycast", 4, 5.0, 1.0, 1, 1, 0)
        slow = BenchRecord(1, 1, "large", "raycast", 8, 9.0, 1.0, 1, 1, 0)
        broken = BenchRecord(1, 1, "large", "raycast", 16, 1.0, 1.0, 1, 1, 0, status="error:ConfigurationError")
        best = best_of([slow, broken, fast])
        assert (best.block_size, best.status) == (4, "best")
        assert best_of([broken]) is None


class TestSweeps:
    def test_block_size_candidates(self):
        assert block_size_candidates(100, [0, 3, 7, 8, 20]) == [1, 8, 128]
        assert block_size_candidates(1 << 34, [18]) == []

    def test_heatmap(self):
        out = io.StringIO()
        settings = SweepSettings(q=64, reps=1, realizations=1, seed=1)
        records = heatmap_sweep([6, 7], [-2, -1], ["sparse", "raycast"], settings, out, block_size_exponents=[2, 4])
        # per cell: one sparse row, two block sizes and a best row for raycast
        assert len(records) == 2 * 2 * 4
        assert [r.status for r in records].count("best") == 4
        assert {r.dist for r in records} == {"n*2^-2", "n*2^-1"}
        out.seek(0)
        assert len(read_csv(out)) == len(records)

    def test_heatmap_without_block_sizes(self):
        settings = SweepSettings(q=16, reps=1, realizations=1, seed=1)
        records = heatmap_sweep([5], [-1], ["raycast"], settings)
        assert len(records) == 1
        assert records[0].block_size is not None

    def test_failed_cells_become_rows(self, monkeypatch):
        def explode(*args, **kwargs):
            raise ConfigurationError("no room")

        monkeypatch.setattr(sweeps, "run_bench", explode)
        settings = SweepSettings(q=16, reps=1, realizations=1, seed=1)
        records = heatmap_sweep([5], [-1], ["sparse"], settings)
        assert records[0].status == "error:ConfigurationError"

    def test_batch_sweep(self):
        out = io.StringIO()
        settings = SweepSettings(q=1, reps=1, realizations=1, seed=2, threads=2)
        records = batch_sweep("sparse", 256, range(2, 6), DistributionSpec("large", 256), settings, out)
        assert [r.q for r in records] == [4, 8, 16, 32]
        assert all(r.ok for r in records)


@pytest.mark.slow
class TestRelativePerformance:
    n = 1 << 20

    def measure(self, algo, kind):
        return run_bench(algo, self.n, 1 << 16, DistributionSpec(kind, self.n), reps=1, realizations=1, seed=7, audit=False)

    def test_raycast_beats_the_scan_on_long_ranges(self):
        raycast = self.measure("raycast", "large")
        exhaustive = self.measure("exhaustive", "large")
        assert raycast.ns_per_rmq * 5 < exhaustive.ns_per_rmq

    def test_short_ranges_are_cheaper(self):
        assert self.measure("raycast", "small").ns_per_rmq < self.measure("raycast", "large").ns_per_rmq
