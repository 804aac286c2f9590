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

from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from typing_extensions import Self

from .errors import DomainError, RangeError

__all__ = (
    "DistributionTag",
    "InputArray",
    "Query",
    "QueryBatch",
    "RmqAnswer",
    "theta_below",
)

DistributionTag = Literal["large", "medium", "small", "fixed", "explicit"]


def theta_below(min_value: np.float32) -> np.float32:
    """Ray origin abscissa strictly below `min_value`.

    `min - 1` in 32-bit; once `|min| >= 2^24` that rounds back to `min`,
    so the step grows to `|min|`.
    """
    theta = np.float32(min_value) - np.float32(1)
    if theta < min_value:
        return np.float32(theta)

    theta = np.float32(min_value) - np.float32(abs(min_value))
    if theta < min_value:
        return np.float32(theta)

    # min_value == 0 is handled by the first branch, this is unreachable for finite input
    msg = f"no 32-bit value below {min_value!r}"
    raise DomainError(msg)


@dataclass(frozen=True, slots=True)
class InputArray:
    """The element sequence, in 32-bit, with the metadata rays are built from."""

    values: np.ndarray
    theta: np.float32
    min_value: np.float32
    max_value: np.float32
    raw: np.ndarray | None = None

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.n

    @classmethod
    def from_values(cls, values: Iterable[float] | np.ndarray, *, raw: np.ndarray | None = None) -> Self:
        """Wrap real values, rounding them to 32-bit."""
        array = np.ascontiguousarray(np.asarray(values, dtype=np.float32))
        if array.ndim != 1 or array.shape[0] < 1:
            msg = "input array must be one-dimensional with at least one element"
            raise DomainError(msg)

        if not np.all(np.isfinite(array)):
            bad = int(np.flatnonzero(~np.isfinite(array))[0])
            msg = f"non-finite value at position {bad}"
            raise DomainError(msg)

        if raw is not None and raw.shape != array.shape:
            msg = "raw and transformed arrays differ in length"
            raise DomainError(msg)

        array.flags.writeable = False
        min_value = np.float32(array.min())
        return cls(
            values=array,
            theta=theta_below(min_value),
            min_value=min_value,
            max_value=np.float32(array.max()),
            raw=raw,
        )

    def value_at(self, index: int) -> float:
        return float(self.values[index])


@dataclass(frozen=True, slots=True, order=True)
class Query:
    l: int  # noqa: E741
    r: int

    def validate(self, n: int) -> Self:
        if not 0 <= self.l <= self.r <= n - 1:
            msg = f"query ({self.l}, {self.r}) outside 0 <= l <= r <= {n - 1}"
            raise RangeError(msg)
        return self

    def __len__(self) -> int:
        return self.r - self.l + 1


@dataclass(frozen=True, slots=True)
class RmqAnswer:
    index: int
    value: float

    def __str__(self) -> str:
        return f"{self.index} {self.value!r}"


@dataclass(frozen=True)
class QueryBatch:
    """A batch of queries held as two index columns."""

    left: np.ndarray
    right: np.ndarray
    distribution_tag: DistributionTag = "explicit"
    seed: int = 0
    _validated_for: list[int] = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self) -> None:
        left = np.ascontiguousarray(self.left, dtype=np.int64)
        right = np.ascontiguousarray(self.right, dtype=np.int64)
        if left.ndim != 1 or left.shape != right.shape:
            msg = "query columns must be one-dimensional and of equal length"
            raise RangeError(msg)
        if left.shape[0] < 1:
            msg = "a query batch needs at least one query"
            raise RangeError(msg)

        left.flags.writeable = False
        right.flags.writeable = False
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @classmethod
    def from_queries(cls, queries: Iterable[Query | tuple[int, int]], *, seed: int = 0) -> Self:
        pairs = [(q.l, q.r) if isinstance(q, Query) else tuple(q) for q in queries]
        if not pairs:
            msg = "a query batch needs at least one query"
            raise RangeError(msg)
        columns = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        return cls(columns[:, 0], columns[:, 1], "explicit", seed)

    def __len__(self) -> int:
        return int(self.left.shape[0])

    def __iter__(self) -> Iterator[Query]:
        for l, r in zip(self.left.tolist(), self.right.tolist(), strict=True):  # noqa: E741
            yield Query(l, r)

    def __getitem__(self, index: int) -> Query:
        return Query(int(self.left[index]), int(self.right[index]))

    def validate(self, n: int) -> Self:
        """Raise `RangeError` naming the first query invalid for an array of size `n`."""
        if n in self._validated_for:
            return self

        bad = (self.left < 0) | (self.left > self.right) | (self.right > n - 1)
        if bad.any():
            first = int(np.flatnonzero(bad)[0])
            self[first].validate(n)

        self._validated_for.append(n)
        return self

    def lengths(self) -> np.ndarray:
        return self.right - self.left + 1

    def slice(self, start: int, stop: int) -> QueryBatch:
        return QueryBatch(self.left[start:stop], self.right[start:stop], self.distribution_tag, self.seed)
