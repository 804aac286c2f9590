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
from pathlib import Path

import numpy as np

from core.errors import InputFormatError, RangeError

__all__ = ("ParsedInput", "format_value", "parse_input", "parse_queries")

log = logging.getLogger("inputs")

INT_HEADER = "int"
REAL_HEADER = "real"


@dataclass(frozen=True, slots=True)
class ParsedInput:
    """Array and queries read from text files."""

    raw: np.ndarray | None
    values: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def integer(self) -> bool:
        return self.raw is not None

    def display(self, index: int) -> str:
        if self.raw is not None:
            return str(int(self.raw[index]))
        return format_value(self.values[index])


def format_value(value: float) -> str:
    """Shortest text that reads back to the same 32-bit value, `1.0` printed as `1`."""
    return np.format_float_positional(np.float32(value), trim="-")


def _lines(path: Path) -> list[tuple[int, list[str]]]:
    rows = []
    with path.open(encoding="utf-8") as fp:
        for number, line in enumerate(fp, start=1):
            text = line.split("#", 1)[0].strip()
            if text:
                rows.append((number, text.split()))
    return rows


def _query_pair(number: int, tokens: list[str]) -> tuple[int, int]:
    if len(tokens) != 2:  # noqa: PLR2004
        msg = f"expected `l r`, got {' '.join(tokens)!r}"
        raise InputFormatError(msg, line=number)
    try:
        return int(tokens[0]), int(tokens[1])
    except ValueError:
        msg = f"query bounds must be integers, got {' '.join(tokens)!r}"
        raise InputFormatError(msg, line=number) from None


def parse_queries(path: str | Path, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    pairs = [(_query_pair(number, tokens), number) for number, tokens in _lines(Path(path))]
    return _columns(pairs, n)


def _columns(pairs: list[tuple[tuple[int, int], int]], n: int | None) -> tuple[np.ndarray, np.ndarray]:
    if n is not None:
        for (l, r), number in pairs:  # noqa: E741
            if not 0 <= l <= r <= n - 1:
                msg = f"line {number}: query ({l}, {r}) outside 0 <= l <= r <= {n - 1}"
                raise RangeError(msg)
    left = np.array([p[0][0] for p in pairs], dtype=np.int64)
    right = np.array([p[0][1] for p in pairs], dtype=np.int64)
    return left, right


def parse_input(path: str | Path, queries: str | Path | None = None) -> ParsedInput:  # noqa: C901
    """Read an array, one value per line, then `l r` query lines.

    An `int` first line marks raw nonnegative integers, `real` (or no
    header) marks reals. Blank lines and `#` comments are skipped.
    """
    rows = _lines(Path(path))
    integer = False
    if rows and rows[0][1] in ([INT_HEADER], [REAL_HEADER]):
        integer = rows[0][1] == [INT_HEADER]
        rows = rows[1:]

    raw_values: list[int] = []
    real_values: list[float] = []
    pairs: list[tuple[tuple[int, int], int]] = []

    for number, tokens in rows:
        if len(tokens) == 1 and not pairs:
            token = tokens[0]
            try:
                if integer:
                    raw_values.append(int(token))
                else:
                    value = float(token)
                    if not math.isfinite(value):
                        raise ValueError(token)
                    real_values.append(value)
            except ValueError:
                kind = "an integer" if integer else "a finite real"
                msg = f"expected {kind}, got {token!r}"
                raise InputFormatError(msg, line=number) from None
            continue

        if len(tokens) == 1:
            msg = "array values must come before the queries"
            raise InputFormatError(msg, line=number)
        pairs.append((_query_pair(number, tokens), number))

    n = len(raw_values) if integer else len(real_values)
    if n == 0:
        msg = "no array values found"
        raise InputFormatError(msg, line=rows[-1][0] if rows else 1)

    left, right = _columns(pairs, n)
    if queries is not None:
        extra_left, extra_right = parse_queries(queries, n)
        left = np.concatenate([left, extra_left])
        right = np.concatenate([right, extra_right])

    raw = np.array(raw_values, dtype=np.int64) if integer else None
    values = np.array(real_values, dtype=np.float32) if not integer else np.empty(0, dtype=np.float32)
    log.debug("read %s values and %s queries from %s", n, left.shape[0], path)
    return ParsedInput(raw=raw, values=values, left=left, right=right)
