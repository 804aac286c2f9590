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

import time
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from types import TracebackType

    from typing_extensions import Self

__all__ = ("Stopwatch", "format_ns")

_UNITS = (
    (1_000_000_000, "s"),
    (1_000_000, "ms"),
    (1_000, "us"),
)


class Stopwatch:
    """Monotonic nanosecond timer used around batch loops.

    Examples
    --------
    >>> with Stopwatch() as watch:
    ...     solve()
    >>> watch.elapsed_ns
    """

    def __init__(self) -> None:
        self._start: int | None = None
        self._stop: int | None = None

    def __enter__(self) -> Self:
        self.start()
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self.stop()

    def start(self) -> None:
        """Start, or restart, the timer."""
        self._start = time.perf_counter_ns()
        self._stop = None

    def stop(self) -> int:
        """Stop the timer and return the elapsed nanoseconds."""
        if self._start is None:
            msg = "stopwatch was never started"
            raise RuntimeError(msg)
        self._stop = time.perf_counter_ns()
        return self.elapsed_ns

    @property
    def elapsed_ns(self) -> int:
        """Elapsed nanoseconds, up to now if still running."""
        if self._start is None:
            return 0
        end = self._stop if self._stop is not None else time.perf_counter_ns()
        return end - self._start

    @property
    def elapsed_ms(self) -> float:
        """Elapsed milliseconds."""
        return self.elapsed_ns / 1_000_000

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} elapsed={format_ns(self.elapsed_ns)}>"

    def __str__(self) -> str:
        return format_ns(self.elapsed_ns)


def format_ns(ns: float) -> str:
    """Human readable duration, `1532000` -> `1.53 ms`."""
    for scale, unit in _UNITS:
        if abs(ns) >= scale:
            return f"{ns / scale:.3g} {unit}"
    return f"{ns:.3g} ns"
