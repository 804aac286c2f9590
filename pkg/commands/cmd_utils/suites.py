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
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field

import numpy as np

from bench.distributions import DistributionSpec, gen_lengths, gen_queries, make_rng
from bench.harness import make_runner
from core.errors import RmqError
from core.oracle import SparseTable, build_sparse_table, rmq_exhaustive, rmq_sparse, scan_indices
from core.types import InputArray, Query, QueryBatch
from raycast.bvh import MISS, Bvh, brute_force_trace, hit_matrix
from raycast.engine import Solver, partitioned
from raycast.geometry import (
    block_ray_origins,
    blockmin_ray_origins,
    build_scene,
    compute_block_minimums,
    gen_blockmin_triangles,
    gen_triangles,
    gen_triangles_block,
    single_ray_origins,
)
from raycast.transform import (
    MANTISSA_BITS,
    block_config,
    choose_block_size,
    coordinate_ulp,
    gate_report,
    int_to_float,
    int_to_float_array,
    precision_gate,
)
from utils.config import defaults
from utils.time import Stopwatch

__all__ = (
    "DEFAULT_SUITES",
    "SUITE_REGISTRY",
    "SuiteResult",
    "SuiteSettings",
    "run_suites",
    "suite",
)

log = logging.getLogger("verify")

MAX_NOTES = 8

SuiteFn = Callable[["SuiteSettings", "SuiteResult"], None]
SUITE_REGISTRY: dict[str, SuiteFn] = {}


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: int = 0
    notes: list[str] = field(default_factory=list)
    elapsed_ns: int = 0

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def _note(self, note: str) -> None:
        if len(self.notes) < MAX_NOTES:
            self.notes.append(note)

    def check(self, ok: bool, note: str | Callable[[], str]) -> bool:
        self.checks += 1
        if not ok:
            self.failures += 1
            self._note(note() if callable(note) else note)
        return bool(ok)

    def compare(self, expected: np.ndarray, actual: np.ndarray, what: str) -> bool:
        """One check per element; notes the first disagreement."""
        expected = np.asarray(expected).ravel()
        actual = np.asarray(actual).ravel()
        self.checks += expected.shape[0]
        bad = np.flatnonzero(expected != actual)
        if bad.size:
            self.failures += int(bad.size)
            k = int(bad[0])
            self._note(f"{what}: {bad.size} differ, first at {k}: expected {expected[k]!r}, got {actual[k]!r}")
        return not bad.size

    def __str__(self) -> str:
        return f"{self.name:<14} {self.checks:>10} {self.failures:>8}"


@dataclass(frozen=True)
class SuiteSettings:
    seed: int = 7
    threads: int = 1
    fp64: bool = False
    inject_fault: bool = False
    sizes: dict = field(default_factory=lambda: dict(defaults["verify"]))

    @classmethod
    def create(cls, *, full: bool = False, **kwargs: int | bool) -> SuiteSettings:
        sizes = dict(defaults["verify"])
        if full:
            sizes.update(defaults["verify_full"])
        return cls(sizes=sizes, **kwargs)  # type: ignore[arg-type]

    def __getitem__(self, key: str) -> int:
        return self.sizes[key]

    def rng(self, salt: int) -> np.random.Generator:
        return make_rng(np.random.SeedSequence([self.seed, salt]))

    @property
    def shift(self) -> int:
        return 1 if self.inject_fault else 0


def suite(name: str) -> Callable[[SuiteFn], SuiteFn]:
    def decorator(fn: SuiteFn) -> SuiteFn:
        SUITE_REGISTRY[name] = fn
        return fn

    return decorator


def random_array(rng: np.random.Generator, n: int, duplicate_rate: float, *, few_distinct: bool = False) -> InputArray:
    """Uniform reals in `[-1, 1)` with some positions copied from others, or only four distinct values."""
    if few_distinct:
        return InputArray.from_values(rng.integers(0, 4, size=n).astype(np.float32))

    values = rng.uniform(-1, 1, size=n).astype(np.float32)
    copies = rng.random(n) < duplicate_rate
    values[copies] = values[rng.integers(0, n, size=int(copies.sum()))]
    return InputArray.from_values(values)


def all_pairs(n: int) -> QueryBatch:
    left, right = np.triu_indices(n)
    return QueryBatch(left.astype(np.int64), right.astype(np.int64), "explicit", 0)


def sampled_queries(n: int, count: int, seed: int) -> QueryBatch:
    """Half uniform lengths, half short ones, so both block parts and single blocks are exercised."""
    half = max(1, count // 2)
    large = gen_queries(DistributionSpec("large", n), half, seed)
    small = gen_queries(DistributionSpec("small", n), max(1, count - half), seed + 1)
    return QueryBatch(
        np.concatenate([large.left, small.left]),
        np.concatenate([large.right, small.right]),
        "explicit",
        seed,
    )


def block_sizes(n: int) -> list[int]:
    chosen = choose_block_size(n).block_size
    candidates = {max(1, n // 8), max(1, math.isqrt(n)), max(1, n // 2), chosen}
    return sorted(bs for bs in candidates if precision_gate(n, bs))


def solvers(arr: InputArray, settings: SuiteSettings, *, single: bool = True, dtype: np.dtype = np.float32) -> Iterable[Solver]:
    """Single layout plus every block size of `block_sizes` under both block-minimum strategies."""
    if single:
        yield Solver.build(arr, strategy="single", dtype=dtype)
    for bs in block_sizes(arr.n):
        for strategy in ("geometry", "lookup_table"):
            yield Solver.build(
                arr,
                block_size=bs,
                blockmin_strategy=strategy,
                dtype=dtype,
                fallback=False,
                b_r_begin_shift=settings.shift,
            )


@suite("examples")
def examples_suite(settings: SuiteSettings, result: SuiteResult) -> None:
    """Small worked arrays with known answers."""
    first = InputArray.from_values([9, 2, 7, 8, 4, 1, 3])
    second = InputArray.from_values([5, 3, 1, 9, 6, 2])
    cases = [
        (first, Query(2, 6), 5),
        (second, Query(3, 5), 5),
        (second, Query(0, 5), 2),
        (second, Query(1, 4), 2),
        (second, Query(0, 2), 2),
    ]
    for arr, q, expected in cases:
        result.check(rmq_exhaustive(arr, q).index == expected, f"exhaustive {q}")
        result.check(rmq_sparse(build_sparse_table(arr), q).index == expected, f"sparse {q}")
        for solver in solvers(arr, settings):
            got = solver.solve(q)
            result.check(
                got.index == expected and got.value == arr.value_at(expected),
                lambda solver=solver, q=q, got=got: f"{solver!r} {q}: got {got}",
            )

    # nb=3: [5 3 1 | 9 6 2]; nb=2: [5 3 | 1 9 | 6 2]
    for nb, expected in ((3, (2, 4, None)), (2, (1, 4, 2))):
        solver = Solver.build(second, block_size=nb, fallback=False, b_r_begin_shift=settings.shift)
        parts = solver.decompose(Query(1, 4))
        got = (parts.left.index, parts.right and parts.right.index, parts.middle and parts.middle.index)
        result.check(got == expected and parts.answer.index == 2, lambda nb=nb, got=got: f"nb={nb} parts of (1, 4): {got}")


@suite("oracle")
def oracle_suite(settings: SuiteSettings, result: SuiteResult) -> None:
    """Sparse table against the linear scan, and widening a range never raises its minimum."""
    rng = settings.rng(1)
    rate = settings["duplicate_rate"]
    for n in settings["oracle_sizes"]:
        for k in range(settings["oracle_arrays"]):
            arr = random_array(rng, n, rate, few_distinct=k % 4 == 0)
            table = SparseTable(arr)
            if n <= settings["all_pairs_max_n"]:
                batch = all_pairs(n)
            else:
                batch = sampled_queries(n, settings["sampled_queries"], int(rng.integers(2**31)))
            expected = scan_indices(arr.values, batch.left, batch.right)
            result.compare(expected, table.query_batch(batch), f"sparse n={n} array {k}")

            widen = batch.left > 0
            inner = arr.values[expected[widen]]
            outer = arr.values[table.indices(batch.left[widen] - 1, batch.right[widen])]
            result.compare(np.ones(inner.shape[0], dtype=bool), outer <= inner, f"monotone n={n} array {k}")


@suite("transform")
def transform_suite(settings: SuiteSettings, result: SuiteResult) -> None:
    """Integer-to-real order, fixed points and the precision gate."""
    top = 1 << settings["transform_exhaustive_exp"]
    mapped = int_to_float_array(np.arange(top + 1, dtype=np.int64))
    result.compare(np.ones(top, dtype=bool), np.diff(mapped) > 0, "consecutive integers")

    rng = settings.rng(2)
    pairs = rng.integers(0, 129 << MANTISSA_BITS, size=(settings["transform_random_pairs"], 2), dtype=np.int64)
    fx = int_to_float_array(pairs[:, 0])
    fy = int_to_float_array(pairs[:, 1])
    result.compare(np.sign(pairs[:, 0] - pairs[:, 1]), np.sign(fx.astype(np.float64) - fy), "random pairs")

    for x, expected in ((0, 0.5), (1 << 23, 1.0), ((1 << 24) - 1, ((1 << 24) - 1) / 2**23)):
        got = int_to_float(x)
        result.check(got == np.float32(expected), f"int_to_float({x}) = {got!r}, expected {expected!r}")

    n = 1 << 26
    result.check(precision_gate(n, 1 << 12), "n=2^26 block_size=2^12 should pass")
    result.check(precision_gate(n, 1 << 18), "n=2^26 block_size=2^18 should pass")
    boundary = gate_report(n, 1 << 18)
    result.check(boundary.lhs == boundary.rhs, lambda: f"n=2^26 block_size=2^18 should sit on the boundary: {boundary}")
    result.check(not precision_gate(1 << 34, 1 << 18), "n=2^34 block_size=2^18 should fail")

    # a passing layout keeps its farthest coordinate at least one local step apart from its neighbour
    for exp_n in range(1, 31, 3):
        for exp_bs in range(0, 19, 2):
            n, bs = 1 << exp_n, 1 << exp_bs
            if not precision_gate(n, bs):
                continue
            cfg = block_config(n, bs)
            ulp = coordinate_ulp(cfg.farthest_coordinate())
            result.check(ulp <= 1 / bs, f"n=2^{exp_n} block_size=2^{exp_bs}: ulp {ulp} > 1/bs")


def _expected_hits(left: np.ndarray, right: np.ndarray, index: np.ndarray) -> np.ndarray:
    return (left[:, None] <= index[None, :]) & (index[None, :] <= right[:, None])


@suite("coverage")
def coverage_suite(settings: SuiteSettings, result: SuiteResult) -> None:
    """Every ray hits exactly the triangles of its range, in both layouts."""
    rng = settings.rng(3)
    for n in range(1, settings["coverage_max_n"] + 1):
        arr = random_array(rng, n, settings["duplicate_rate"])
        left, right = np.triu_indices(n)
        hits = hit_matrix(gen_triangles(arr), single_ray_origins(arr, left, right))
        result.compare(_expected_hits(left, right, np.arange(n)), hits, f"single n={n}")

        for bs in range(1, n + 1):
            cfg = block_config(n, bs)
            minimums = compute_block_minimums(arr, cfg)
            triangles = np.concatenate([gen_triangles_block(arr, cfg), gen_blockmin_triangles(minimums, cfg)])
            element = np.arange(n)
            block_of = element // bs
            local = element - block_of * bs

            cells = set(zip(*(c.tolist() for c in cfg.cell_of(np.arange(cfg.num_blocks))), strict=True))
            result.check(len(cells) == cfg.num_blocks and (0, 0) not in cells, f"cells overlap n={n} bs={bs}")

            for b in range(cfg.num_blocks):
                size = int(cfg.block_end(b) - cfg.block_begin(b)) + 1
                lo, hi = np.triu_indices(size)
                origins = block_ray_origins(arr, cfg, np.full(lo.shape[0], b), lo, hi)
                expected = np.zeros((lo.shape[0], triangles.shape[0]), dtype=bool)
                expected[:, :n] = _expected_hits(lo, hi, local) & (block_of == b)[None, :]
                result.compare(expected, hit_matrix(triangles, origins), f"block n={n} bs={bs} b={b}")

            first, last = np.triu_indices(cfg.num_blocks)
            origins = blockmin_ray_origins(arr, cfg, first, last)
            expected = np.zeros((first.shape[0], triangles.shape[0]), dtype=bool)
            expected[:, n:] = _expected_hits(first, last, np.arange(cfg.num_blocks))
            result.compare(expected, hit_matrix(triangles, origins), f"cell 0 n={n} bs={bs}")


def _check_structure(bvh: Bvh, primitive_ids: np.ndarray, result: SuiteResult, what: str) -> None:
    owned: list[np.ndarray] = []
    for node in bvh:
        if node.is_leaf:
            owned.append(bvh.leaf_primitives(node))
            tris = bvh.triangles[node.start : node.start + node.count]
            inside = np.all(tris.min(axis=1) >= node.aabb_min) and np.all(tris.max(axis=1) <= node.aabb_max)
            result.check(bool(inside), f"{what}: leaf {node.index} box misses its triangles")
        else:
            left, right = (bvh.node(c) for c in node.children)
            result.check(node.contains(left) and node.contains(right), f"{what}: node {node.index} box misses a child")

    result.compare(np.sort(primitive_ids), np.sort(np.concatenate(owned)), f"{what}: leaves")
    m = primitive_ids.shape[0]
    bound = 2 * math.ceil(math.log2(max(m, 2))) + 2
    result.check(bvh.depth <= bound, f"{what}: depth {bvh.depth} above {bound}")


@suite("bvh")
def bvh_suite(settings: SuiteSettings, result: SuiteResult) -> None:
    """Hierarchy traversal against testing every triangle, bit for bit."""
    rng = settings.rng(4)
    for k in range(settings["bvh_scenes"]):
        n = int(rng.integers(1, settings["bvh_max_n"], endpoint=True))
        arr = random_array(rng, n, settings["duplicate_rate"], few_distinct=k % 5 == 0)
        cfg = None if k % 2 == 0 else choose_block_size(n, int(rng.integers(1, n, endpoint=True)))
        scene = build_scene(arr, cfg)
        what = f"scene {k} n={n} {scene.layout}"
        _check_structure(scene.bvh, scene.primitive_ids, result, what)

        rays = settings["bvh_rays"]
        if cfg is None:
            cell = np.zeros((rays, 2), dtype=np.int64)
        else:
            cell = np.stack(cfg.cell_of(rng.integers(-1, cfg.num_blocks, size=rays)), axis=1)
        origins = np.empty((rays, 3), dtype=np.float32)
        origins[:, 0] = arr.theta
        origins[:, 1:] = 2 * cell + rng.random((rays, 2))
        # exact query points too, where ties and shared edges live
        half = rays // 2
        if cfg is None:
            left, right = np.sort(rng.integers(0, n, size=(2, half)), axis=0)
            origins[:half] = single_ray_origins(arr, left, right)
        else:
            block = rng.integers(0, cfg.num_blocks, size=half)
            lo, hi = np.sort(rng.integers(0, cfg.block_size, size=(2, half)), axis=0)
            last = cfg.block_end(block) - cfg.block_begin(block)
            origins[:half] = block_ray_origins(arr, cfg, block, np.minimum(lo, last), np.minimum(hi, last))

        prim, t = scene.bvh.trace(origins)
        prim_ref, t_ref = brute_force_trace(scene.triangles, scene.primitive_ids, origins)
        result.compare(prim_ref, prim, f"{what}: primitive")
        result.compare(t_ref.view(np.uint32), t.view(np.uint32), f"{what}: t")
        result.check(not np.any(prim[:half] == MISS), f"{what}: query ray missed")


@suite("engine")
def engine_suite(settings: SuiteSettings, result: SuiteResult) -> None:
    """Every layout and block-minimum strategy against the sparse table."""
    rng = settings.rng(5)
    for n in settings["oracle_sizes"]:
        for k in range(max(1, settings["oracle_arrays"] // 4)):
            arr = random_array(rng, n, settings["duplicate_rate"], few_distinct=k % 4 == 1)
            if n <= settings["all_pairs_max_n"]:
                batch = all_pairs(n)
            else:
                batch = sampled_queries(n, settings["sampled_queries"], int(rng.integers(2**31)))
            expected = SparseTable(arr).query_batch(batch)
            for solver in solvers(arr, settings):
                try:
                    got = solver.solve_batch(batch, settings.threads)
                except RmqError as exc:
                    result.check(False, f"{solver!r} n={n}: {exc}")
                    continue
                result.compare(expected, got.indices, f"{solver!r} array {k}")
                result.compare(arr.values[expected], got.values, f"{solver!r} array {k} values")


@suite("decomposition")
def decomposition_suite(settings: SuiteSettings, result: SuiteResult) -> None:
    """Left, middle and right sub-answers of block queries against the sparse table."""
    rng = settings.rng(6)
    per_solver = max(1, settings["sampled_queries"] // 20)
    for n in settings["oracle_sizes"][:2]:
        arr = random_array(rng, n, settings["duplicate_rate"])
        table = SparseTable(arr)
        batch = sampled_queries(n, per_solver, int(rng.integers(2**31)))
        for solver in solvers(arr, settings, single=False):
            nb = solver.scene.config.block_size
            for q in batch:
                try:
                    parts = solver.decompose(q)
                except RmqError as exc:
                    result.check(False, f"{solver!r} {q}: {exc}")
                    continue

                spans = parts.first_block != parts.last_block
                left_hi = min((parts.first_block + 1) * nb - 1, q.r)
                result.check(parts.left.index == table.argmin(q.l, left_hi), f"{solver!r} {q}: left part")
                if spans:
                    right = parts.right.index if parts.right else None
                    result.check(right == table.argmin(parts.last_block * nb, q.r), f"{solver!r} {q}: right part")
                else:
                    result.check(parts.right is None, f"{solver!r} {q}: right part in a single block")

                if parts.last_block - parts.first_block > 1:
                    middle = parts.middle.index if parts.middle else None
                    expected = table.argmin((parts.first_block + 1) * nb, parts.last_block * nb - 1)
                    result.check(middle == expected, f"{solver!r} {q}: middle part")
                else:
                    result.check(parts.middle is None, f"{solver!r} {q}: middle part without covered blocks")

                result.check(parts.answer.index == table.argmin(q.l, q.r), f"{solver!r} {q}: answer")


@suite("distributions")
def distributions_suite(settings: SuiteSettings, result: SuiteResult) -> None:
    """Sample means, bounds and reproducibility of the query generators."""
    rng = settings.rng(7)
    samples = settings["distribution_samples"]
    n = 1 << 26
    for kind in ("large", "medium", "small"):
        spec = DistributionSpec(kind, n)
        lengths = gen_lengths(spec, samples, rng)
        result.check(bool(np.all((lengths >= 1) & (lengths <= n))), f"{kind}: length outside [1, n]")
        mean, expected = float(lengths.mean()), spec.analytic_mean()
        result.check(abs(mean - expected) <= 0.02 * expected + 1, f"{kind}: mean {mean:.1f}, expected {expected:.1f}")

    for kind in ("large", "medium", "small"):
        spec = DistributionSpec(kind, 1 << 20)
        batch = gen_queries(spec, 10_000, settings.seed)
        result.check(
            bool(np.all((batch.left >= 0) & (batch.left <= batch.right) & (batch.right < spec.n))),
            f"{kind}: query outside the array",
        )
        again = gen_queries(spec, 10_000, settings.seed)
        result.check(
            np.array_equal(batch.left, again.left) and np.array_equal(batch.right, again.right),
            f"{kind}: same seed gave different queries",
        )


@suite("determinism")
def determinism_suite(settings: SuiteSettings, result: SuiteResult) -> None:
    """Answers do not depend on the worker count."""
    rng = settings.rng(8)
    n = 1 << 14
    arr = random_array(rng, n, settings["duplicate_rate"])
    batch = sampled_queries(n, n, settings.seed)
    threads = settings["determinism_threads"]
    for algo in ("raycast", "sparse", "exhaustive"):
        fn, _ = make_runner(algo, arr)
        one, _ = partitioned(fn, batch, 1)
        many, _ = partitioned(fn, batch, threads)
        result.compare(one, many, f"{algo}: 1 vs {threads} threads")


@suite("precision")
def precision_suite(settings: SuiteSettings, result: SuiteResult) -> None:
    """Large arrays in 32-bit with payload checks, and the 64-bit build as a reference."""
    rng = settings.rng(9)
    n = settings["precision_n"]
    arr = random_array(rng, n, settings["duplicate_rate"])
    batch = sampled_queries(n, settings["precision_queries"], settings.seed)
    expected = SparseTable(arr).query_batch(batch)

    block_size = choose_block_size(n).block_size
    single32 = Solver.build(arr, strategy="single", check_payload=True)
    block32 = Solver.build(arr, block_size=block_size, check_payload=True, b_r_begin_shift=settings.shift)
    block64 = Solver.build(arr, block_size=block_size, dtype=np.float64, b_r_begin_shift=settings.shift)
    answers = {}
    for label, solver in (("single f32", single32), ("block f32", block32), ("block f64", block64)):
        try:
            answers[label] = solver.solve_batch(batch, settings.threads).indices
        except RmqError as exc:
            result.check(False, f"{label}: {exc}")
            continue
        result.compare(expected, answers[label], label)

    if "block f32" in answers and "block f64" in answers:
        result.compare(answers["block f64"], answers["block f32"], "f32 vs f64")


DEFAULT_SUITES = tuple(name for name in SUITE_REGISTRY if name != "precision")


def run_suites(names: Iterable[str], settings: SuiteSettings) -> list[SuiteResult]:
    """Run the named suites in order; an exception inside a suite counts as one failure."""
    results = []
    for name in names:
        fn = SUITE_REGISTRY[name]
        result = SuiteResult(name)
        log.info("running suite %s", name)
        with Stopwatch() as watch:
            try:
                fn(settings, result)
            except Exception as exc:  # noqa: BLE001  # pylint: disable=broad-exception-caught
                log.exception("suite %s raised", name)
                result.check(False, f"raised {type(exc).__name__}: {exc}")
        result.elapsed_ns = watch.elapsed_ns
        log.info("suite %s: %s checks, %s failures", name, result.checks, result.failures)
        results.append(result)
    return results
