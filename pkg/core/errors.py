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

from dataclasses import dataclass

__all__ = (
    "ConfigurationError",
    "ConsistencyError",
    "ConstructionError",
    "DomainError",
    "GateReport",
    "InputFormatError",
    "RangeError",
    "RmqError",
    "UsageError",
    "VerificationFailed",
)


class RmqError(Exception):
    """Base class for every error raised by this package."""


class RangeError(RmqError, IndexError):
    """Query bounds outside `0 <= l <= r <= n - 1`."""


class DomainError(RmqError, ValueError):
    """Input outside a transform's domain."""


@dataclass(frozen=True, slots=True)
class GateReport:
    """Evaluated sides of the block precision inequality."""

    n: int
    block_size: int
    num_blocks: int
    lhs: float
    rhs: float
    within_limits: bool

    @property
    def passed(self) -> bool:
        return self.within_limits and self.lhs <= self.rhs

    def __str__(self) -> str:
        sign = "<=" if self.lhs <= self.rhs else ">"
        limits = "ok" if self.within_limits else "exceeded"
        return (
            f"n={self.n} block_size={self.block_size} blocks={self.num_blocks}: "
            f"2^floor(log2(2*ceil(sqrt(n/bs)))) * 2^-23 = {self.lhs:.6g} {sign} 1/bs = {self.rhs:.6g}, hard limits {limits}"
        )


class ConfigurationError(RmqError, ValueError):
    """An unusable block layout, size limit or flag combination."""

    def __init__(self, message: str, *, report: GateReport | None = None) -> None:
        super().__init__(message)
        self.report = report


class ConstructionError(RmqError):
    """A scene or hierarchy could not be built."""


class ConsistencyError(RmqError, RuntimeError):
    """A valid query produced no hit, or a payload disagrees with stored values."""


class InputFormatError(RmqError, ValueError):
    """Malformed line in an input file."""

    def __init__(self, message: str, *, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class UsageError(RmqError):
    """Flags that cannot be run together."""


class VerificationFailed(RmqError):
    """One or more verification suites reported failures."""
