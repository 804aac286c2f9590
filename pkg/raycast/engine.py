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
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from core.errors import ConfigurationError, ConsistencyError
from core.types import InputArray, Query, QueryBatch, RmqAnswer
from utils.time import Stopwatch

from .bvh import MISS
from .geometry import BlockminStrategy, Scene, block_ray_origins, blockmin_ray_origins, build_scene, single_ray_origins
from .transform import choose_block_size

__all__ = (
    "PAYLOAD_ULPS",
    "BatchResult",
    "Decomposition",
    "Solver",
    "partitioned",
    "solve_batch",
    "solve_block",
    "solve_single",
)

log = logging.getLogger("engine")

PAYLOAD_ULPS = 4
ABSENT = -1

Strategy = Literal["single", "block_matrix"]
IndexFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class BatchResult:
    indices: np.ndarray
    values: np.ndarray
    elapsed_ns: int

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    @property
    def ns_per_rmq(self) -> float:
        return self.elapsed_ns / max(len(self), 1)

    @property
    def answers(self) -> list[RmqAnswer]:
        return [RmqAnswer(i, v) for i, v in zip(self.indices.tolist(), self.values.tolist(), strict=True)]


@dataclass(frozen=True, slots=True)
class Decomposition:
    """Sub-answers of one block-layout query.

    `left` covers `[l, end of l's block]` (or all of `[l, r]` when both ends
    share a block), `right` covers `[start of r's block, r]` and `middle`
    the fully covered blocks between them.
    """

    query: Query
    first_block: int
    last_block: int
    left: RmqAnswer
    right: RmqAnswer | None
    middle: RmqAnswer | None
    answer: RmqAnswer

    @property
    def single_block(self) -> bool:
        return self.first_block == self.last_block


def partitioned(fn: IndexFn, batch: QueryBatch, threads: int) -> tuple[np.ndarray, int]:
    """Run `fn` over contiguous slices of `batch` on `threads` workers.

    Each worker writes its own slice of the output, so answers come back in
    input order for any worker count. Returns the answers and the elapsed
    nanoseconds of the query loop alone.
    """
    q = len(batch)
    out = np.empty(q, dtype=np.int64)
    threads = max(1, min(threads, q))
    bounds = np.linspace(0, q, threads + 1).astype(np.int64)

    def work(lo: int, hi: int) -> None:
        out[lo:hi] = fn(batch.left[lo:hi], batch.right[lo:hi])

    if threads == 1:
        with Stopwatch() as watch:
            work(0, q)
        return out, watch.elapsed_ns

    with ThreadPoolExecutor(max_workers=threads, thread_name_prefix="rmq") as pool:
        with Stopwatch() as watch:
            futures = [pool.submit(work, int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:], strict=True)]
            for future in futures:
                future.result()
    return out, watch.elapsed_ns


class Solver:
    """Answers range minimum queries by closest-hit ray casting over a built scene."""

    def __init__(self, arr: InputArray, scene: Scene, *, check_payload: bool = False, b_r_begin_shift: int = 0) -> None:
        if scene.arr is not arr:
            msg = "scene was built for a different array"
            raise ConfigurationError(msg)
        self.arr = arr
        self.scene = scene
        self.check_payload = check_payload
        # test hook: moves the start of the right partial block
        self._b_r_begin_shift = b_r_begin_shift

    def __repr__(self) -> str:
        cfg = self.scene.config
        block = f" block_size={cfg.block_size} blockmin={self.blockmin_strategy}" if cfg else ""
        return f"<Solver n={self.arr.n} strategy={self.strategy}{block}>"

    @classmethod
    def build(  # pylint: disable=too-many-arguments
        cls,
        arr: InputArray,
        *,
        strategy: Strategy = "block_matrix",
        block_size: int | None = None,
        blockmin_strategy: BlockminStrategy = "geometry",
        dtype: np.dtype = np.float32,
        strict_layout: bool = False,
        fallback: bool = True,
        check_payload: bool = False,
        b_r_begin_shift: int = 0,
    ) -> Solver:
        if strategy == "single":
            scene = build_scene(arr, dtype=dtype)
        elif strategy == "block_matrix":
            cfg = choose_block_size(arr.n, block_size, strict=strict_layout, fallback=fallback)
            scene = build_scene(arr, cfg, blockmin_strategy, dtype=dtype)
        else:
            msg = f"unknown strategy {strategy!r}"
            raise ConfigurationError(msg)
        return cls(arr, scene, check_payload=check_payload, b_r_begin_shift=b_r_begin_shift)

    @property
    def strategy(self) -> Strategy:
        return self.scene.layout

    @property
    def blockmin_strategy(self) -> BlockminStrategy | None:
        return self.scene.blockmin_strategy

    def _trace(self, origins: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        prim, t = self.scene.bvh.trace(origins)
        missed = prim == MISS
        if missed.any():
            k = int(np.flatnonzero(missed)[0])
            msg = f"no hit for range ({int(left[k])}, {int(right[k])}) at origin {origins[k].tolist()}"
            raise ConsistencyError(msg)
        if self.check_payload:
            self._check_payload(prim, t)
        return prim

    def _check_payload(self, prim: np.ndarray, t: np.ndarray) -> None:
        arr = self.arr
        dtype = t.dtype.type
        values = np.where(prim < arr.n, arr.values[np.minimum(prim, arr.n - 1)], 0).astype(t.dtype)
        if self.scene.block_minimums is not None:
            blocks = prim >= arr.n
            values[blocks] = self.scene.block_minimums.values[prim[blocks] - arr.n]

        theta = dtype(arr.theta)
        recovered = theta + t
        tolerance = PAYLOAD_ULPS * np.spacing(np.abs(values - theta))
        bad = np.abs(recovered - values) > tolerance
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            msg = f"payload {float(recovered[k])!r} disagrees with stored value {float(values[k])!r} (primitive {int(prim[k])})"
            raise ConsistencyError(msg)

    def _single_indices(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        origins = single_ray_origins(self.arr, left, right, dtype=self.scene.dtype)
        return self._trace(origins, left, right)

    def _block_parts(self, left: np.ndarray, right: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Indices of the left, right and middle sub-answers, `ABSENT` where a part does not exist."""
        cfg = self.scene.config
        assert cfg is not None
        dtype = self.scene.dtype
        nb = cfg.block_size

        first = left // nb
        last = right // nb
        spans = first != last

        # left partial block, or the whole range inside one block
        hi = np.where(spans, cfg.block_end(first), right)
        base = first * nb
        origins = block_ray_origins(self.arr, cfg, first, left - base, hi - base, dtype=dtype)
        left_part = self._trace(origins, left, hi)

        right_part = np.full(left.shape[0], ABSENT, dtype=np.int64)
        if spans.any():
            blocks = last[spans]
            base = blocks * nb
            begin = base + self._b_r_begin_shift
            stop = right[spans]
            origins = block_ray_origins(self.arr, cfg, blocks, begin - base, stop - base, dtype=dtype)
            right_part[spans] = self._trace(origins, begin, stop)

        middle = np.full(left.shape[0], ABSENT, dtype=np.int64)
        covered = last - first > 1
        if covered.any():
            lo_block = first[covered] + 1
            hi_block = last[covered] - 1
            if self.scene.lookup is not None:
                block = self.scene.lookup[lo_block, hi_block].astype(np.int64)
            else:
                origins = blockmin_ray_origins(self.arr, cfg, lo_block, hi_block, dtype=dtype)
                block = self._trace(origins, lo_block * nb, hi_block * nb) - self.arr.n
            middle[covered] = self.scene.block_minimums.argmins[block]

        return left_part, right_part, middle

    def _combine(self, left_part: np.ndarray, right_part: np.ndarray, middle: np.ndarray) -> np.ndarray:
        # parts are positionally ordered left < middle < right, so a later part wins only when strictly smaller
        values = self.arr.values
        best = left_part.copy()
        for part in (middle, right_part):
            present = part != ABSENT
            candidate = part[present]
            current = best[present]
            best[present] = np.where(values[candidate] < values[current], candidate, current)
        return best

    def _block_indices(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        return self._combine(*self._block_parts(left, right))

    def indices(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """Leftmost argmin per query for pre-validated index columns."""
        if left.shape[0] == 0:
            return np.empty(0, dtype=np.int64)
        if self.strategy == "single":
            return self._single_indices(left, right)
        return self._block_indices(left, right)

    def _answer(self, index: int) -> RmqAnswer:
        return RmqAnswer(index, self.arr.value_at(index))

    def solve(self, q: Query) -> RmqAnswer:
        q.validate(self.arr.n)
        column_l = np.array([q.l], dtype=np.int64)
        column_r = np.array([q.r], dtype=np.int64)
        return self._answer(int(self.indices(column_l, column_r)[0]))

    def solve_single(self, q: Query) -> RmqAnswer:
        if self.strategy != "single":
            msg = "solve_single needs a single-layout scene"
            raise ConfigurationError(msg)
        return self.solve(q)

    def solve_block(self, q: Query) -> RmqAnswer:
        if self.strategy != "block_matrix":
            msg = "solve_block needs a block-matrix scene"
            raise ConfigurationError(msg)
        return self.solve(q)

    def decompose(self, q: Query) -> Decomposition:
        if self.strategy != "block_matrix":
            msg = "only block-matrix queries decompose"
            raise ConfigurationError(msg)
        q.validate(self.arr.n)
        nb = self.scene.config.block_size
        column_l = np.array([q.l], dtype=np.int64)
        column_r = np.array([q.r], dtype=np.int64)
        left_part, right_part, middle = (int(p[0]) for p in self._block_parts(column_l, column_r))
        answer = int(self._combine(np.array([left_part]), np.array([right_part]), np.array([middle]))[0])
        return Decomposition(
            query=q,
            first_block=q.l // nb,
            last_block=q.r // nb,
            left=self._answer(left_part),
            right=None if right_part == ABSENT else self._answer(right_part),
            middle=None if middle == ABSENT else self._answer(middle),
            answer=self._answer(answer),
        )

    def solve_batch(self, batch: QueryBatch, threads: int = 1) -> BatchResult:
        batch.validate(self.arr.n)
        indices, elapsed = partitioned(self.indices, batch, threads)
        log.debug("%s queries on %s threads in %s ns", len(batch), threads, elapsed)
        return BatchResult(indices=indices, values=self.arr.values[indices], elapsed_ns=elapsed)


def solve_single(solver: Solver, q: Query) -> RmqAnswer:
    return solver.solve_single(q)


def solve_block(solver: Solver, q: Query) -> RmqAnswer:
    return solver.solve_block(q)


def solve_batch(solver: Solver, batch: QueryBatch, threads: int = 1) -> BatchResult:
    return solver.solve_batch(batch, threads)
