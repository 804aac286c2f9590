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

import csv
import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TextIO

import numpy as np

from core.errors import ConfigurationError, ConsistencyError
from core.oracle import SparseTable, scan_indices
from core.types import InputArray, QueryBatch
from raycast.engine import Solver, partitioned
from raycast.transform import block_config
from utils.config import ALGORITHMS
from utils.time import Stopwatch

from .distributions import DistributionSpec, gen_queries, make_rng

__all__ = (
    "CSV_HEADER",
    "BenchRecord",
    "best_of",
    "make_runner",
    "read_csv",
    "run_bench",
    "write_csv",
)

log = logging.getLogger("bench")

CSV_HEADER = ("n", "q", "dist", "algo", "block_size", "ns_per_rmq", "total_ms", "reps", "realizations", "seed", "status")
AUDIT_FRACTION = 0.01

IndexFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _fmt(value: float) -> str:
    return f"{value:.6g}"


@dataclass(frozen=True)
class BenchRecord:  # pylint: disable=too-many-instance-attributes
    """One timing observation."""

    n: int
    q: int
    dist: str
    algo: str
    block_size: int | None
    ns_per_rmq: float
    total_ms: float
    reps: int
    realizations: int
    seed: int
    status: str = "ok"
    std_ns: float = 0.0
    build_ms: float = 0.0
    answers: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return self.status in ("ok", "best")

    def to_row(self) -> list[str]:
        # fmt: off
        return [
            str(self.n),
            str(self.q),
            self.dist,
            self.algo,
            "" if self.block_size is None else str(self.block_size),
            _fmt(self.ns_per_rmq),
            _fmt(self.total_ms),
            str(self.reps),
            str(self.realizations),
            str(self.seed),
            self.status,
        ]
        # fmt: on

    @classmethod
    def from_row(cls, row: dict[str, str]) -> BenchRecord:
        return cls(
            n=int(row["n"]),
            q=int(row["q"]),
            dist=row["dist"],
            algo=row["algo"],
            block_size=int(row["block_size"]) if row["block_size"] else None,
            ns_per_rmq=float(row["ns_per_rmq"]),
            total_ms=float(row["total_ms"]),
            reps=int(row["reps"]),
            realizations=int(row["realizations"]),
            seed=int(row["seed"]),
            status=row["status"],
        )

    @classmethod
    def failed(cls, error: Exception, **fields: int | str | None) -> BenchRecord:
        """A row standing in for a measurement that raised."""
        return cls(
            ns_per_rmq=math.nan,
            total_ms=math.nan,
            status=f"error:{type(error).__name__}",
            **fields,  # type: ignore[arg-type]
        )


def write_csv(records: Iterable[BenchRecord], fp: TextIO, *, header: bool = True) -> int:
    writer = csv.writer(fp, lineterminator="\n")
    if header:
        writer.writerow(CSV_HEADER)
    count = 0
    for record in records:
        writer.writerow(record.to_row())
        count += 1
    return count


def read_csv(source: str | Path | TextIO) -> list[BenchRecord]:
    if isinstance(source, str | Path):
        with Path(source).open(encoding="utf-8", newline="") as fp:
            return read_csv(fp)

    reader = csv.DictReader(source)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        msg = f"unexpected CSV header {reader.fieldnames}"
        raise ConfigurationError(msg)
    return [BenchRecord.from_row(row) for row in reader]


def make_runner(  # pylint: disable=too-many-arguments
    algo: str,
    arr: InputArray,
    *,
    block_size: int | None = None,
    blockmin: str = "geometry",
    dtype: np.dtype = np.float32,
    strict_layout: bool = False,
    fallback: bool = True,
) -> tuple[IndexFn, int | None]:
    """Preprocess `arr` for `algo` and return its query function and block size."""
    if algo == "raycast":
        solver = Solver.build(
            arr,
            strategy="block_matrix",
            block_size=block_size,
            blockmin_strategy=blockmin,  # type: ignore[arg-type]
            dtype=dtype,
            strict_layout=strict_layout,
            fallback=fallback,
        )
        return solver.indices, solver.scene.config.block_size

    if algo == "sparse":
        return SparseTable(arr).indices, None

    if algo == "exhaustive":
        values = arr.values
        return (lambda left, right: scan_indices(values, left, right)), None

    msg = f"unknown algorithm {algo!r}, expected one of {', '.join(ALGORITHMS)}"
    raise ConfigurationError(msg)


def _audit(algo: str, arr: InputArray, batch: QueryBatch, answers: np.ndarray, rng: np.random.Generator) -> int:
    """Compare a 1% sample against an independent oracle, returning the mismatch count."""
    size = max(1, math.ceil(len(batch) * AUDIT_FRACTION))
    sample = np.sort(rng.choice(len(batch), size=size, replace=False))
    left, right = batch.left[sample], batch.right[sample]
    if algo == "exhaustive":
        expected = SparseTable(arr).indices(left, right)
    else:
        expected = scan_indices(arr.values, left, right)
    return int(np.count_nonzero(expected != answers[sample]))


def run_bench(  # pylint: disable=too-many-arguments, too-many-locals
    algo: str,
    n: int,
    batch_size: int,
    spec: DistributionSpec,
    reps: int,
    realizations: int,
    seed: int,
    *,
    threads: int = 1,
    block_size: int | None = None,
    blockmin: str = "geometry",
    dtype: np.dtype = np.float32,
    strict_layout: bool = False,
    fallback: bool = True,
    audit: bool = True,
) -> BenchRecord:
    """Time `algo` on fresh uniform arrays, one per realization, repeating the same batch `reps` times.

    Preprocessing is timed apart from the query loop. `ns_per_rmq` is the
    mean query time per RMQ over all realizations and repeats.
    """
    if algo not in ALGORITHMS:
        msg = f"unknown algorithm {algo!r}, expected one of {', '.join(ALGORITHMS)}"
        raise ConfigurationError(msg)
    for name, value in (("n", n), ("batch size", batch_size), ("reps", reps), ("realizations", realizations), ("threads", threads)):
        if value < 1:
            msg = f"{name} must be at least 1, got {value}"
            raise ConfigurationError(msg)
    if spec.n != n:
        msg = f"distribution drawn for n={spec.n} used with n={n}"
        raise ConfigurationError(msg)
    if algo == "raycast" and block_size is not None and not fallback:
        block_config(n, block_size, strict=strict_layout)

    children = np.random.SeedSequence(seed).spawn(realizations)
    per_realization_ns: list[float] = []
    totals_ns: list[int] = []
    build_ns: list[int] = []
    answers: list[np.ndarray] = []
    mismatches = 0
    used_block_size: int | None = None

    for index, child in enumerate(children):
        rng = make_rng(child)
        arr = InputArray.from_values(rng.random(n, dtype=np.float32))
        query_seed = int(child.generate_state(1, np.uint64)[0])
        batch = gen_queries(spec, batch_size, query_seed)

        with Stopwatch() as build:
            runner, used_block_size = make_runner(
                algo,
                arr,
                block_size=block_size,
                blockmin=blockmin,
                dtype=dtype,
                strict_layout=strict_layout,
                fallback=fallback,
            )
        build_ns.append(build.elapsed_ns)

        first: np.ndarray | None = None
        total = 0
        for _ in range(reps):
            result, elapsed = partitioned(runner, batch, threads)
            total += elapsed
            if first is None:
                first = result
            elif not np.array_equal(first, result):
                msg = f"{algo} answered the same batch differently across repeats"
                raise ConsistencyError(msg)

        assert first is not None
        totals_ns.append(total)
        per_realization_ns.append(total / (batch_size * reps))
        answers.append(first)
        log.debug("%s n=%s realization %s: %.4g ns/RMQ", algo, n, index, per_realization_ns[-1])

        if audit:
            mismatches += _audit(algo, arr, batch, first, rng)

    status = "ok"
    if mismatches:
        log.error("%s n=%s: %s audited answers disagree with the oracle", algo, n, mismatches)
        status = "mismatch"

    total_ms = float(np.mean(totals_ns)) / 1e6
    record = BenchRecord(
        n=n,
        q=batch_size,
        dist=spec.tag,
        algo=algo,
        block_size=used_block_size,
        ns_per_rmq=float(np.mean(totals_ns)) / (batch_size * reps),
        total_ms=total_ms,
        reps=reps,
        realizations=realizations,
        seed=seed,
        status=status,
        std_ns=float(np.std(per_realization_ns)),
        build_ms=float(np.mean(build_ns)) / 1e6,
        answers=np.concatenate(answers),
    )
    log.info(
        "%s n=%s q=%s dist=%s: %.4g ns/RMQ (sd %.3g), build %.3g ms",
        algo,
        n,
        batch_size,
        spec.tag,
        record.ns_per_rmq,
        record.std_ns,
        record.build_ms,
    )
    return record


def best_of(records: list[BenchRecord]) -> BenchRecord | None:
    """The fastest successful record, relabelled as the cell's best."""
    usable = [r for r in records if r.status == "ok"]
    if not usable:
        return None
    return replace(min(usable, key=lambda r: r.ns_per_rmq), status="best")
