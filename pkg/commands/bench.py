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
from typing import TYPE_CHECKING

import numpy as np

from bench import DistributionSpec, SweepSettings, batch_sweep, heatmap_sweep, run_bench, write_csv
from core import Command, RunContext
from utils import format_ns

from .cmd_utils import (
    BENCH_FLAGS,
    COMMON_FLAGS,
    HEATMAP_FLAGS,
    MEASURE_FLAGS,
    RAYCAST_FLAGS,
    SCALING_FLAGS,
    add_flags,
)

if TYPE_CHECKING:
    import argparse

    from bench import BenchRecord
    from core import App

log = logging.getLogger("bench")


def _exit_code(records: list[BenchRecord]) -> int:
    return 1 if any(record.status == "mismatch" for record in records) else 0


def _settings(ctx: RunContext) -> SweepSettings:
    config = ctx.config
    return SweepSettings(
        q=config.q,
        reps=config.reps,
        realizations=config.realizations,
        seed=config.seed,
        threads=config.threads,
        blockmin=config.blockmin,
    )


class Bench(Command):
    """Time one solver on one configuration and print a CSV row."""

    name = "bench"
    help = "time one solver, one CSV row"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_flags(parser, BENCH_FLAGS, MEASURE_FLAGS, COMMON_FLAGS, RAYCAST_FLAGS)

    def run(self, ctx: RunContext) -> int:
        config = ctx.config
        block_size = config.block_size if config.algo == "raycast" else None
        record = run_bench(
            config.algo,
            config.n,
            config.q,
            DistributionSpec(config.dist, config.n),
            config.reps,
            config.realizations,
            config.seed,
            threads=config.threads,
            block_size=block_size,
            blockmin=config.blockmin,
            dtype=np.float64 if config.fp64 else np.float32,
            strict_layout=config.strict_layout,
            fallback=block_size is None,
        )
        log.info("build %s per realization", format_ns(record.build_ms * 1e6))

        with ctx.output() as fp:
            write_csv([record], fp)
        return _exit_code([record])


class Heatmap(Command):
    """Sweep the `n x |(l, r)|` grid for a set of solvers."""

    name = "heatmap"
    help = "sweep n and range length, one CSV row per cell"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_flags(parser, HEATMAP_FLAGS, MEASURE_FLAGS, COMMON_FLAGS)

    def run(self, ctx: RunContext) -> int:
        config = ctx.config
        with ctx.output() as fp:
            records = heatmap_sweep(
                range(config.nmin, config.nmax + 1),
                range(config.ymin, config.ymax + 1),
                config.algos,
                _settings(ctx),
                fp,
                block_size_exponents=config.block_size_exps or (),
            )
        failed = sum(1 for record in records if not record.ok)
        log.info("heatmap: %s rows, %s failed", len(records), failed)
        return _exit_code(records)


class Scaling(Command):
    """Time one solver over growing batch sizes."""

    name = "scaling"
    help = "sweep the batch size 2^qmin .. 2^qmax"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_flags(parser, SCALING_FLAGS, COMMON_FLAGS)

    def run(self, ctx: RunContext) -> int:
        config = ctx.config
        with ctx.output() as fp:
            records = batch_sweep(
                config.algo,
                config.n,
                range(config.qmin, config.qmax + 1),
                DistributionSpec(config.dist, config.n),
                _settings(ctx),
                fp,
                block_size=config.block_size if config.algo == "raycast" else None,
            )
        return _exit_code(records)


def setup(app: App) -> None:
    """Load the benchmark commands."""
    app.add_command(Bench(app))
    app.add_command(Heatmap(app))
    app.add_command(Scaling(app))
