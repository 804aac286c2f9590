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
from collections.abc import Iterable
from dataclasses import dataclass
from typing import TextIO

from core.errors import RmqError
from raycast.transform import precision_gate

from .distributions import DistributionSpec
from .harness import BenchRecord, best_of, run_bench, write_csv

__all__ = (
    "SweepSettings",
    "batch_sweep",
    "block_size_candidates",
    "heatmap_sweep",
)

log = logging.getLogger("bench")


@dataclass(frozen=True, slots=True)
class SweepSettings:
    """Measurement settings shared by every cell of a sweep."""

    q: int
    reps: int
    realizations: int
    seed: int
    threads: int = 1
    blockmin: str = "geometry"


def block_size_candidates(n: int, exponents: Iterable[int]) -> list[int]:
    """Powers of two from `exponents` that pass the precision gate and do not exceed `bit_ceil(n)`."""
    bit_ceil = 1 << max(n - 1, 0).bit_length()
    sizes = sorted({1 << e for e in exponents if e >= 0})
    return [size for size in sizes if size <= bit_ceil and precision_gate(n, size)]


class _Sink:
    def __init__(self, fp: TextIO | None) -> None:
        self.fp = fp
        self.records: list[BenchRecord] = []
        if fp is not None:
            write_csv((), fp)

    def add(self, record: BenchRecord) -> None:
        self.records.append(record)
        if self.fp is not None:
            write_csv((record,), self.fp, header=False)
            self.fp.flush()


def _measure(
    sink: _Sink,
    algo: str,
    n: int,
    spec: DistributionSpec,
    settings: SweepSettings,
    *,
    q: int | None = None,
    block_size: int | None = None,
) -> BenchRecord:
    batch = q or settings.q
    try:
        record = run_bench(
            algo,
            n,
            batch,
            spec,
            settings.reps,
            settings.realizations,
            settings.seed,
            threads=settings.threads,
            block_size=block_size,
            blockmin=settings.blockmin,
            fallback=block_size is None,
        )
    except (RmqError, MemoryError) as error:
        log.warning("%s n=%s dist=%s block_size=%s failed: %s", algo, n, spec.tag, block_size, error)
        record = BenchRecord.failed(
            error,
            n=n,
            q=batch,
            dist=spec.tag,
            algo=algo,
            block_size=block_size,
            reps=settings.reps,
            realizations=settings.realizations,
            seed=settings.seed,
        )
    sink.add(record)
    return record


def heatmap_sweep(  # pylint: disable=too-many-arguments
    n_exponents: Iterable[int],
    y_exponents: Iterable[int],
    algos: Iterable[str],
    settings: SweepSettings,
    out: TextIO | None = None,
    *,
    block_size_exponents: Iterable[int] = (),
) -> list[BenchRecord]:
    """Time every algorithm over the `n x |(l, r)|` grid with `|(l, r)| = n * 2^y`.

    Raycast cells are measured once per block-size candidate and followed
    by a `best` row. Failed cells become `error:` rows and the sweep goes on.
    """
    algos = list(algos)
    y_exponents = list(y_exponents)
    block_size_exponents = list(block_size_exponents)
    sink = _Sink(out)

    for n_exp in n_exponents:
        n = 1 << n_exp
        for y in y_exponents:
            spec = DistributionSpec.fraction(n, y)
            for algo in algos:
                if algo != "raycast" or not block_size_exponents:
                    _measure(sink, algo, n, spec, settings)
                    continue

                cell = [
                    _measure(sink, algo, n, spec, settings, block_size=size)
                    for size in block_size_candidates(n, block_size_exponents)
                ]
                if (best := best_of(cell)) is not None:
                    sink.add(best)
                    log.info("n=2^%s y=%s: best block size %s at %.4g ns/RMQ", n_exp, y, best.block_size, best.ns_per_rmq)

    return sink.records


def batch_sweep(  # pylint: disable=too-many-arguments
    algo: str,
    n: int,
    q_exponents: Iterable[int],
    spec: DistributionSpec,
    settings: SweepSettings,
    out: TextIO | None = None,
    *,
    block_size: int | None = None,
) -> list[BenchRecord]:
    """One row per batch size `2^k`, to see where parallel work saturates."""
    sink = _Sink(out)
    for k in q_exponents:
        _measure(sink, algo, n, spec, settings, q=1 << k, block_size=block_size)
    return sink.records
