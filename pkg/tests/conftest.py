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
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest

from core import App, InputArray

# arrays with known answers used across the test modules
FIRST = [9, 2, 7, 8, 4, 1, 3]
SECOND = [5, 3, 1, 9, 6, 2]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


@pytest.fixture
def first() -> InputArray:
    return InputArray.from_values(FIRST)


@pytest.fixture
def second() -> InputArray:
    return InputArray.from_values(SECOND)


def random_values(rng: np.random.Generator, n: int, *, distinct: int | None = None) -> InputArray:
    """Uniform reals in [-1, 1), or `distinct` integer levels for many ties."""
    if distinct is not None:
        return InputArray.from_values(rng.integers(0, distinct, size=n).astype(np.float32))
    return InputArray.from_values(rng.uniform(-1, 1, size=n).astype(np.float32))


@pytest.fixture
def run_cli() -> Callable[..., tuple[int, str, str]]:
    """Run the app in-process, returning the exit code, stdout and stderr."""

    def runner(*argv: str | Path) -> tuple[int, str, str]:
        stdout, stderr = io.StringIO(), io.StringIO()
        code = App().run([str(arg) for arg in argv], stdout=stdout, stderr=stderr)
        return code, stdout.getvalue(), stderr.getvalue()

    return runner
