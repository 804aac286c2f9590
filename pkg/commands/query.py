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

from bench import make_runner
from core import Command, InputArray, QueryBatch, RunContext, UsageError
from raycast import Solver, from_raw, normalize_unit, partitioned
from utils import format_ns

from .cmd_utils import COMMON_FLAGS, QUERY_FLAGS, RAYCAST_FLAGS, add_flags, parse_input

if TYPE_CHECKING:
    import argparse

    from core import App

log = logging.getLogger("query")


class Queries(Command):
    """Answer the queries of an input file, one `index value` line each."""

    name = "query"
    help = "answer range minimum queries read from a file"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_flags(parser, QUERY_FLAGS, COMMON_FLAGS, RAYCAST_FLAGS)

    def load(self, ctx: RunContext) -> tuple[InputArray, QueryBatch | None, list[str]]:
        config = ctx.config
        parsed = parse_input(config.input_path, config.queries)

        if parsed.integer:
            if config.normalize:
                msg = "--normalize applies to real inputs only"
                raise UsageError(msg)
            arr = from_raw(parsed.raw)
        else:
            values = normalize_unit(parsed.values) if config.normalize else parsed.values
            arr = InputArray.from_values(values)

        batch = QueryBatch(parsed.left, parsed.right) if parsed.left.shape[0] else None
        shown = [parsed.display(i) for i in range(arr.n)] if config.by != "index" else []
        return arr, batch, shown

    def run(self, ctx: RunContext) -> int:
        config = ctx.config
        arr, batch, shown = self.load(ctx)

        block_size = config.block_size
        if config.nb is not None:
            block_size = -(-arr.n // config.nb)

        if config.algo == "raycast":
            solver = Solver.build(
                arr,
                strategy="single" if config.layout == "single" else "block_matrix",
                block_size=block_size,
                blockmin_strategy=config.blockmin,
                dtype=np.float64 if config.fp64 else np.float32,
                strict_layout=config.strict_layout,
                fallback=block_size is None,
                check_payload=config.check_payload,
            )
            self.report(ctx, solver)
            answer = solver.indices
        else:
            answer, _ = make_runner(config.algo, arr)

        if batch is None:
            log.warning("no queries in %s", config.input_path)
            return 0

        batch.validate(arr.n)
        indices, elapsed = partitioned(answer, batch, config.threads)
        log.info("%s queries in %s (%.4g ns/RMQ)", len(batch), format_ns(elapsed), elapsed / len(batch))

        with ctx.output() as fp:
            for index in indices.tolist():
                if config.by == "index":
                    fp.write(f"{index}\n")
                elif config.by == "value":
                    fp.write(f"{shown[index]}\n")
                else:
                    fp.write(f"{index} {shown[index]}\n")
        return 0

    def report(self, ctx: RunContext, solver: Solver) -> None:
        config = ctx.config
        scene = solver.scene
        if config.dump_scene:
            lines = scene.dump(config.dump_scene)
            log.info("dumped %s triangles to %s", lines, config.dump_scene)

        if config.stats:
            cfg = scene.config
            layout = f"block_matrix bs={cfg.block_size} blocks={cfg.num_blocks} side={cfg.grid_side}" if cfg else "single"
            ctx.stderr.write(
                f"layout {layout}\n"
                f"triangles {scene.triangle_count}\n"
                f"bvh nodes {scene.bvh.node_count} depth {scene.bvh.depth}\n"
                f"bytes {scene.nbytes}\n",
            )


def setup(app: App) -> None:
    """Load the query command."""
    app.add_command(Queries(app))
