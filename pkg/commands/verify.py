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

from core import Command, RunContext, UsageError, VerificationFailed
from utils import format_ns

from .cmd_utils import COMMON_FLAGS, DEFAULT_SUITES, SUITE_REGISTRY, VERIFY_FLAGS, SuiteSettings, add_flags, run_suites

if TYPE_CHECKING:
    import argparse

    from core import App

log = logging.getLogger("verify")


class Verify(Command):
    """Run the correctness suites and print `suite checks failures` per suite."""

    name = "verify"
    help = "run the correctness suites"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_flags(parser, VERIFY_FLAGS, COMMON_FLAGS)

    def suites(self, ctx: RunContext) -> list[str]:
        config = ctx.config
        if not config.suites:
            return [*DEFAULT_SUITES, "precision"] if config.fp64 else list(DEFAULT_SUITES)

        unknown = [name for name in config.suites if name not in SUITE_REGISTRY]
        if unknown:
            msg = f"unknown suite(s) {', '.join(unknown)}, expected some of {', '.join(SUITE_REGISTRY)}"
            raise UsageError(msg)
        return list(config.suites)

    def run(self, ctx: RunContext) -> int:
        config = ctx.config
        names = self.suites(ctx)
        settings = SuiteSettings.create(
            full=config.full,
            seed=config.seed,
            threads=config.threads,
            fp64=config.fp64,
            inject_fault=config.inject_fault,
        )
        if settings.inject_fault:
            log.warning("fault injected: the right partial block starts one element late")

        results = run_suites(names, settings)
        with ctx.output() as fp:
            fp.write(f"{'suite':<14} {'checks':>10} {'failures':>8}\n")
            for result in results:
                fp.write(f"{result}\n")

        for result in results:
            log.info("%s took %s", result.name, format_ns(result.elapsed_ns))
            for note in result.notes:
                ctx.error(f"{result.name}: {note}")

        failed = [result.name for result in results if not result.passed]
        if failed:
            msg = f"{len(failed)} suite(s) failed: {', '.join(failed)}"
            raise VerificationFailed(msg)
        return 0


def setup(app: App) -> None:
    """Load the verify command."""
    app.add_command(Verify(app))
