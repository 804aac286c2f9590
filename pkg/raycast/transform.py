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
from dataclasses import dataclass

import numpy as np

from core.errors import ConfigurationError, DomainError, GateReport
from core.types import InputArray
from utils.config import limits

__all__ = (
    "INT_TO_FLOAT_LIMIT",
    "MAX_BLOCKS",
    "MAX_BLOCK_SIZE",
    "MANTISSA_BITS",
    "BlockConfig",
    "block_config",
    "choose_block_size",
    "coordinate_ulp",
    "from_raw",
    "gate_report",
    "int_to_float",
    "int_to_float_array",
    "lookup_limit",
    "normalize_unit",
    "precision_gate",
)

log = logging.getLogger("transform")

MANTISSA_BITS = 23
# q * 2^E stays finite in 32-bit up to E = 128
INT_TO_FLOAT_LIMIT = 129 << MANTISSA_BITS
MAX_BLOCK_SIZE = 1 << 18
MAX_BLOCKS = 1 << 24

_MANTISSA_MASK = (1 << MANTISSA_BITS) - 1


def int_to_float(x: int) -> np.float32:
    """Map a nonnegative integer to a 32-bit real, strictly increasing in `x`.

    `x = E * 2^23 + M` becomes `(M + 2^23) / 2^24 * 2^E`.
    """
    x = int(x)
    if x < 0:
        msg = f"int_to_float is undefined for negative input {x}"
        raise DomainError(msg)
    if x >= INT_TO_FLOAT_LIMIT:
        msg = f"int_to_float input {x} overflows 32-bit reals (limit {INT_TO_FLOAT_LIMIT})"
        raise DomainError(msg)

    exponent = x >> MANTISSA_BITS
    mantissa = x & _MANTISSA_MASK
    q = (mantissa + (1 << MANTISSA_BITS)) / (1 << (MANTISSA_BITS + 1))
    return np.float32(math.ldexp(q, exponent))


def int_to_float_array(raw: np.ndarray) -> np.ndarray:
    raw = np.asarray(raw, dtype=np.int64)
    if raw.size and (raw.min() < 0 or raw.max() >= INT_TO_FLOAT_LIMIT):
        bad = int(np.flatnonzero((raw < 0) | (raw >= INT_TO_FLOAT_LIMIT))[0])
        msg = f"raw value {int(raw[bad])} at position {bad} is outside [0, {INT_TO_FLOAT_LIMIT})"
        raise DomainError(msg)

    exponent = (raw >> MANTISSA_BITS).astype(np.int32)
    q = ((raw & _MANTISSA_MASK) + (1 << MANTISSA_BITS)).astype(np.float64) / (1 << (MANTISSA_BITS + 1))
    # 24 significant bits, exact after the cast
    return np.ldexp(q, exponent).astype(np.float32)


def from_raw(raw: np.ndarray | list[int]) -> InputArray:
    """Build an input array from raw nonnegative integers."""
    raw = np.asarray(raw, dtype=np.int64)
    return InputArray.from_values(int_to_float_array(raw), raw=raw)


def normalize_unit(values: np.ndarray) -> np.ndarray:
    """Affinely map real values into `[0, 1]`, keeping their order.

    Distinct inputs closer than 32-bit resolution after scaling collapse to
    equal values; a constant array maps to all zeros.
    """
    values = np.asarray(values, dtype=np.float64)
    low, high = values.min(), values.max()
    if high == low:
        return np.zeros(values.shape, dtype=np.float32)
    return ((values - low) / (high - low)).astype(np.float32)


def _ceil_sqrt_ratio(n: int, block_size: int) -> int:
    # smallest c with c^2 >= n / block_size
    blocks = -(-n // block_size)
    return math.isqrt(blocks - 1) + 1


def gate_report(n: int, block_size: int) -> GateReport:
    """Evaluate both sides of the block precision inequality."""
    if n < 1 or block_size < 1:
        msg = f"n and block_size must be positive, got n={n} block_size={block_size}"
        raise ConfigurationError(msg)

    c = _ceil_sqrt_ratio(n, block_size)
    k = (2 * c).bit_length() - 1
    num_blocks = -(-n // block_size)
    within = block_size <= MAX_BLOCK_SIZE and num_blocks <= MAX_BLOCKS
    return GateReport(
        n=n,
        block_size=block_size,
        num_blocks=num_blocks,
        lhs=math.ldexp(1.0, k - MANTISSA_BITS),
        rhs=1.0 / block_size,
        within_limits=within,
    )


def precision_gate(n: int, block_size: int) -> bool:
    """True when 32-bit coordinates resolve every query of the block layout."""
    if n < 1 or block_size < 1:
        return False
    c = _ceil_sqrt_ratio(n, block_size)
    k = (2 * c).bit_length() - 1
    # 2^k * 2^-23 <= 1 / block_size, in integers
    if (block_size << k) > (1 << MANTISSA_BITS):
        return False
    return block_size <= MAX_BLOCK_SIZE and -(-n // block_size) <= MAX_BLOCKS


def coordinate_ulp(value: float) -> float:
    """Spacing of 32-bit reals at `value`."""
    return float(np.spacing(np.float32(abs(value))))


@dataclass(frozen=True, slots=True)
class BlockConfig:
    """Block-matrix layout.

    Block `b` lives in cell `((b + 1) mod side, (b + 1) div side)`, cell 0
    holds the block minimums. `strict` reproduces the literal linear layout
    with normalization by the block count.
    """

    n: int
    block_size: int
    num_blocks: int
    grid_side: int
    strict: bool = False

    @property
    def cell_modulus(self) -> int:
        return self.num_blocks if self.strict else self.grid_side

    @property
    def local_scale(self) -> int:
        """Denominator of in-cell coordinates."""
        return self.num_blocks if self.strict else self.block_size

    def cell_of(self, block: np.ndarray | int) -> tuple[np.ndarray, np.ndarray]:
        slot = np.asarray(block, dtype=np.int64) + 1
        return slot % self.cell_modulus, slot // self.cell_modulus

    def block_end(self, block: np.ndarray | int) -> np.ndarray:
        """Last global index of `block`, clamped to the array."""
        return np.minimum((np.asarray(block, dtype=np.int64) + 1) * self.block_size - 1, self.n - 1)

    def block_begin(self, block: np.ndarray | int) -> np.ndarray:
        return np.asarray(block, dtype=np.int64) * self.block_size

    def farthest_coordinate(self) -> int:
        """Largest in-range ray coordinate magnitude, bounded by `2 * grid_side - 1`."""
        return 2 * self.grid_side - 1


def block_config(n: int, block_size: int, *, strict: bool = False) -> BlockConfig:
    """Validate `block_size` for `n` and return the layout, raising with the gate values on failure."""
    report = gate_report(n, block_size)
    if not report.passed:
        msg = f"block size {block_size} is not usable for n={n}"
        raise ConfigurationError(msg, report=report)

    num_blocks = report.num_blocks
    cfg = BlockConfig(
        n=n,
        block_size=block_size,
        num_blocks=num_blocks,
        grid_side=math.isqrt(num_blocks) + 1,  # ceil(sqrt(blocks + 1))
        strict=strict,
    )
    if strict and block_size > num_blocks:
        log.warning(
            "strict layout with block_size=%s > blocks=%s: in-cell coordinates leave the unit cell",
            block_size,
            num_blocks,
        )
    return cfg


def choose_block_size(n: int, hint: int | None = None, *, strict: bool = False, fallback: bool = True) -> BlockConfig:
    """Pick a block layout for `n`.

    A passing `hint` is used as is. Otherwise the largest power of two not
    above `min(2^18, bit_ceil(n))` that passes the gate is chosen. With
    `fallback=False` a failing hint raises instead.
    """
    if n < 1:
        msg = f"n must be positive, got {n}"
        raise ConfigurationError(msg)

    if hint is not None:
        if precision_gate(n, hint):
            return block_config(n, hint, strict=strict)
        if not fallback:
            return block_config(n, hint, strict=strict)
        log.info("block size hint %s fails the precision gate for n=%s, choosing one", hint, n)

    bit_ceil = 1 << max(n - 1, 0).bit_length()
    candidate = min(MAX_BLOCK_SIZE, bit_ceil)
    while candidate >= 1:
        if precision_gate(n, candidate):
            return block_config(n, candidate, strict=strict)
        candidate >>= 1

    msg = f"no block size satisfies the precision gate for n={n}"
    raise ConfigurationError(msg, report=gate_report(n, min(MAX_BLOCK_SIZE, bit_ceil)))


def lookup_limit() -> int:
    return int(limits["lookup_max_blocks"])
