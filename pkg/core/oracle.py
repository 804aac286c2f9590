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

import numba
import numpy as np

from .errors import RangeError
from .types import InputArray, Query, QueryBatch, RmqAnswer

__all__ = (
    "SparseTable",
    "build_sparse_table",
    "exhaustive_batch",
    "rmq_exhaustive",
    "rmq_sparse",
    "scan_indices",
)

log = logging.getLogger("oracle")


@numba.njit(nogil=True, cache=True)
def _scan_kernel(values, left, right, out):  # noqa: ANN001, ANN202
    for j in range(left.shape[0]):
        best = left[j]
        for i in range(left[j] + 1, right[j] + 1):
            if values[i] < values[best]:
                best = i
        out[j] = best


def rmq_exhaustive(arr: InputArray, q: Query) -> RmqAnswer:
    """Scan `[l, r]` left to right, keeping the first minimum."""
    q.validate(arr.n)
    index = q.l + int(np.argmin(arr.values[q.l : q.r + 1]))
    return RmqAnswer(index, arr.value_at(index))


def scan_indices(values: np.ndarray, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    out = np.empty(left.shape[0], dtype=np.int64)
    _scan_kernel(values, left, right, out)
    return out


def exhaustive_batch(arr: InputArray, batch: QueryBatch) -> np.ndarray:
    """Leftmost argmin of every query in `batch` by linear scan."""
    batch.validate(arr.n)
    return scan_indices(arr.values, batch.left, batch.right)


def _floor_log2(lengths: np.ndarray) -> np.ndarray:
    # frexp is exact on integers: length = m * 2^e with m in [0.5, 1)
    return np.frexp(lengths.astype(np.float64))[1].astype(np.int64) - 1


class SparseTable:
    """Leftmost-argmin sparse table.

    Level `k` stores, for every `i`, the leftmost argmin of `values[i : i + 2^k]`.
    Both lookups and merges keep the left candidate on equal values.
    """

    def __init__(self, arr: InputArray) -> None:
        self.arr = arr
        n = arr.n
        values = arr.values
        index_type = np.int32 if n < 2**31 else np.int64

        levels = int(n).bit_length()
        table = np.zeros((levels, n), dtype=index_type)
        table[0] = np.arange(n, dtype=index_type)

        for k in range(1, levels):
            half = 1 << (k - 1)
            width = n - (1 << k) + 1
            a = table[k - 1, :width]
            b = table[k - 1, half : half + width]
            table[k, :width] = np.where(values[a] <= values[b], a, b)

        self._table = table
        log.debug("sparse table over n=%s with %s levels (%s bytes)", n, levels, table.nbytes)

    @property
    def nbytes(self) -> int:
        return int(self._table.nbytes)

    @property
    def levels(self) -> int:
        return int(self._table.shape[0])

    def argmin(self, l: int, r: int) -> int:  # noqa: E741
        k = (r - l + 1).bit_length() - 1
        a = int(self._table[k, l])
        b = int(self._table[k, r - (1 << k) + 1])
        return a if self.arr.values[a] <= self.arr.values[b] else b

    def query(self, q: Query) -> RmqAnswer:
        q.validate(self.arr.n)
        index = self.argmin(q.l, q.r)
        return RmqAnswer(index, self.arr.value_at(index))

    def indices(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """Leftmost argmin per query for pre-validated index columns."""
        k = _floor_log2(right - left + 1)
        a = self._table[k, left].astype(np.int64)
        b = self._table[k, right - (np.int64(1) << k) + 1].astype(np.int64)
        values = self.arr.values
        return np.where(values[a] <= values[b], a, b)

    def query_batch(self, batch: QueryBatch) -> np.ndarray:
        """Leftmost argmin of every query in `batch`."""
        batch.validate(self.arr.n)
        return self.indices(batch.left, batch.right)


def build_sparse_table(arr: InputArray) -> SparseTable:
    if arr.n < 1:
        msg = "cannot build a sparse table over an empty array"
        raise RangeError(msg)
    return SparseTable(arr)


def rmq_sparse(table: SparseTable, q: Query) -> RmqAnswer:
    return table.query(q)
