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

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from core.errors import ConfigurationError
from core.types import QueryBatch

__all__ = (
    "DistributionKind",
    "DistributionSpec",
    "gen_lengths",
    "gen_queries",
    "make_rng",
)

DistributionKind = Literal["large", "medium", "small", "fixed"]

LOGNORMAL_SIGMA = 0.3
# exponent of n whose natural log is the log-normal location
_LOCATION_POWER = {"medium": 0.6, "small": 0.3}


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """The one generator used for arrays and queries: PCG64DXSM."""
    return np.random.Generator(np.random.PCG64DXSM(seed))


@dataclass(frozen=True, slots=True)
class DistributionSpec:
    """How query lengths are drawn for an array of size `n`.

    `large` is uniform on `[1, n]`; `medium` and `small` are
    `ceil(LogNormal(ln(n^0.6 or n^0.3), 0.3))` clamped to `[1, n]`; `fixed`
    uses `length` for every query.
    """

    kind: DistributionKind
    n: int
    length: int | None = None
    sigma: float = LOGNORMAL_SIGMA
    label: str | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            msg = f"distribution needs n >= 1, got {self.n}"
            raise ConfigurationError(msg)
        if self.kind not in ("large", "medium", "small", "fixed"):
            msg = f"unknown distribution {self.kind!r}"
            raise ConfigurationError(msg)
        if self.kind == "fixed" and (self.length is None or not 1 <= self.length <= self.n):
            msg = f"fixed length must lie in [1, {self.n}], got {self.length}"
            raise ConfigurationError(msg)

    @classmethod
    def fraction(cls, n: int, y: int) -> DistributionSpec:
        """Fixed length `n * 2^y` (at least 1), the heatmap's range axis."""
        return cls("fixed", n, length=max(1, min(n, round(n * 2.0**y))), label=f"n*2^{y}")

    @property
    def mu(self) -> float | None:
        power = _LOCATION_POWER.get(self.kind)
        return None if power is None else math.log(self.n**power)

    @property
    def tag(self) -> str:
        return self.label or self.kind

    def analytic_mean(self) -> float:
        """Mean length before rounding and clamping."""
        if self.kind == "large":
            return (self.n + 1) / 2
        if self.kind == "fixed":
            return float(self.length)
        return math.exp(self.mu + self.sigma**2 / 2)


def gen_lengths(spec: DistributionSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """Query lengths only, no array needed."""
    if count < 1:
        msg = f"count must be positive, got {count}"
        raise ConfigurationError(msg)

    if spec.kind == "large":
        return rng.integers(1, spec.n, size=count, endpoint=True, dtype=np.int64)
    if spec.kind == "fixed":
        return np.full(count, spec.length, dtype=np.int64)

    samples = np.ceil(rng.lognormal(spec.mu, spec.sigma, size=count))
    return np.clip(samples, 1, spec.n).astype(np.int64)


def gen_queries(spec: DistributionSpec, count: int, seed: int) -> QueryBatch:
    """Draw lengths, then place each range uniformly: `l` in `[0, n - s]`, `r = l + s - 1`."""
    rng = make_rng(seed)
    lengths = gen_lengths(spec, count, rng)
    left = rng.integers(0, spec.n - lengths, endpoint=True, dtype=np.int64)
    right = left + lengths - 1
    return QueryBatch(left, right, spec.kind, seed)
