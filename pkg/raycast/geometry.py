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
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, TextIO

import numpy as np
import psutil

from core.errors import ConfigurationError
from core.types import InputArray
from utils.config import limits

from .bvh import Bvh
from .transform import BlockConfig, lookup_limit

__all__ = (
    "BlockMinimums",
    "BlockminStrategy",
    "Layout",
    "Scene",
    "Triangle",
    "block_ray_origins",
    "blockmin_ray_origins",
    "build_lookup_table",
    "build_scene",
    "compute_block_minimums",
    "gen_blockmin_triangles",
    "gen_triangle",
    "gen_triangle_block",
    "gen_triangles",
    "gen_triangles_block",
    "single_ray_origins",
)

log = logging.getLogger("geometry")

Layout = Literal["single", "block_matrix"]
BlockminStrategy = Literal["geometry", "lookup_table"]


@dataclass(frozen=True, slots=True)
class Triangle:
    """Right triangle in a plane of constant value, right angle at `v0`."""

    v0: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    primitive_id: int

    @classmethod
    def from_vertices(cls, vertices: np.ndarray, primitive_id: int) -> Triangle:
        return cls(vertices[0].copy(), vertices[1].copy(), vertices[2].copy(), int(primitive_id))

    @property
    def vertices(self) -> np.ndarray:
        return np.stack([self.v0, self.v1, self.v2])

    @property
    def value(self) -> float:
        return float(self.v0[0])


def _place(numerator: np.ndarray, scale: int, offset: np.ndarray | int) -> np.ndarray:
    # rays and triangles share this so equal numerators give bitwise-equal coordinates
    return np.asarray(numerator, dtype=np.float64) / scale + np.asarray(offset, dtype=np.float64)


def _vertices(  # pylint: disable=too-many-arguments
    x: np.ndarray,
    l_num: np.ndarray,
    r_num: np.ndarray,
    scale: int,
    off_y: np.ndarray | int,
    off_z: np.ndarray | int,
    dtype: np.dtype,
) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    off_y = np.broadcast_to(np.asarray(off_y, dtype=np.float64), x.shape)
    off_z = np.broadcast_to(np.asarray(off_z, dtype=np.float64), x.shape)
    y = _place(l_num, scale, off_y)
    z = _place(r_num, scale, off_z)

    tris = np.empty((x.shape[0], 3, 3), dtype=dtype)
    tris[:, :, 0] = x[:, None]
    tris[:, 0, 1] = y
    tris[:, 0, 2] = z
    tris[:, 1, 1] = y
    tris[:, 1, 2] = off_z + 2
    tris[:, 2, 1] = off_y - 1
    tris[:, 2, 2] = z
    return tris


def gen_triangles(arr: InputArray, *, dtype: np.dtype = np.float32) -> np.ndarray:
    """One triangle per element; element `i` covers the queries with `l <= i <= r`."""
    i = np.arange(arr.n, dtype=np.int64)
    return _vertices(arr.values, i + 1, i - 1, arr.n, 0, 0, dtype)


def gen_triangle(arr: InputArray, i: int, *, dtype: np.dtype = np.float32) -> Triangle:
    index = np.array([i], dtype=np.int64)
    return Triangle.from_vertices(_vertices(arr.values[index], index + 1, index - 1, arr.n, 0, 0, dtype)[0], i)


def _block_parts(cfg: BlockConfig, index: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    block = index // cfg.block_size
    local = index - block * cfg.block_size
    bx, by = cfg.cell_of(block)
    return block, local, 2 * bx, 2 * by


def gen_triangles_block(arr: InputArray, cfg: BlockConfig, *, dtype: np.dtype = np.float32) -> np.ndarray:
    """Element triangles placed in their block's cell, in element order."""
    i = np.arange(arr.n, dtype=np.int64)
    _, local, off_y, off_z = _block_parts(cfg, i)
    return _vertices(arr.values, local + 1, local - 1, cfg.local_scale, off_y, off_z, dtype)


def gen_triangle_block(arr: InputArray, i: int, cfg: BlockConfig, *, dtype: np.dtype = np.float32) -> Triangle:
    index = np.array([i], dtype=np.int64)
    _, local, off_y, off_z = _block_parts(cfg, index)
    tri = _vertices(arr.values[index], local + 1, local - 1, cfg.local_scale, off_y, off_z, dtype)[0]
    return Triangle.from_vertices(tri, i)


@dataclass(frozen=True, slots=True)
class BlockMinimums:
    """Leftmost minimum of every block and its global index."""

    values: np.ndarray
    argmins: np.ndarray

    def __len__(self) -> int:
        return int(self.values.shape[0])


def compute_block_minimums(arr: InputArray, cfg: BlockConfig) -> BlockMinimums:
    padded = np.full(cfg.num_blocks * cfg.block_size, np.inf, dtype=np.float32)
    padded[: arr.n] = arr.values
    local = padded.reshape(cfg.num_blocks, cfg.block_size).argmin(axis=1)
    argmins = np.arange(cfg.num_blocks, dtype=np.int64) * cfg.block_size + local
    return BlockMinimums(values=arr.values[argmins].copy(), argmins=argmins)


def gen_blockmin_triangles(minimums: BlockMinimums, cfg: BlockConfig, *, dtype: np.dtype = np.float32) -> np.ndarray:
    """Cell-0 triangles, one per block, laid out like single-layout triangles over the block minimums."""
    b = np.arange(cfg.num_blocks, dtype=np.int64)
    return _vertices(minimums.values, b + 1, b - 1, cfg.num_blocks, 0, 0, dtype)


def build_lookup_table(block_values: np.ndarray) -> np.ndarray:
    """`table[a, b]` is the leftmost argmin block over `[a, b]`, for `a <= b`.

    Entries below the diagonal are -1.
    """
    count = block_values.shape[0]
    if count > lookup_limit():
        msg = f"lookup table over {count} blocks exceeds the limit of {lookup_limit()} (RMQ_LOOKUP_MAX_BLOCKS)"
        raise ConfigurationError(msg)

    table = np.full((count, count), -1, dtype=np.int32)
    for a in range(count):
        row = block_values[a:]
        prefix_min = np.minimum.accumulate(row)
        improves = np.empty(row.shape[0], dtype=bool)
        improves[0] = True
        improves[1:] = row[1:] < prefix_min[:-1]
        positions = np.where(improves, np.arange(row.shape[0]), 0)
        table[a, a:] = np.maximum.accumulate(positions) + a
    return table


def single_ray_origins(arr: InputArray, left: np.ndarray, right: np.ndarray, *, dtype: np.dtype = np.float32) -> np.ndarray:
    origins = np.empty((left.shape[0], 3), dtype=dtype)
    origins[:, 0] = arr.theta
    origins[:, 1] = _place(left, arr.n, 0)
    origins[:, 2] = _place(right, arr.n, 0)
    return origins


def block_ray_origins(  # pylint: disable=too-many-arguments
    arr: InputArray,
    cfg: BlockConfig,
    block: np.ndarray,
    lo_local: np.ndarray,
    hi_local: np.ndarray,
    *,
    dtype: np.dtype = np.float32,
) -> np.ndarray:
    """Rays for in-block ranges given by local bounds."""
    bx, by = cfg.cell_of(block)
    origins = np.empty((block.shape[0], 3), dtype=dtype)
    origins[:, 0] = arr.theta
    origins[:, 1] = _place(lo_local, cfg.local_scale, 2 * bx)
    origins[:, 2] = _place(hi_local, cfg.local_scale, 2 * by)
    return origins


def blockmin_ray_origins(
    arr: InputArray,
    cfg: BlockConfig,
    first_block: np.ndarray,
    last_block: np.ndarray,
    *,
    dtype: np.dtype = np.float32,
) -> np.ndarray:
    """Rays into cell 0 for block ranges `[first_block, last_block]`."""
    origins = np.empty((first_block.shape[0], 3), dtype=dtype)
    origins[:, 0] = arr.theta
    origins[:, 1] = _place(first_block, cfg.num_blocks, 0)
    origins[:, 2] = _place(last_block, cfg.num_blocks, 0)
    return origins


@dataclass(frozen=True, eq=False)
class Scene:  # pylint: disable=too-many-instance-attributes
    """Triangles, block data and hierarchy for one input array."""

    arr: InputArray
    triangles: np.ndarray
    primitive_ids: np.ndarray
    layout: Layout
    bvh: Bvh
    config: BlockConfig | None = None
    blockmin_strategy: BlockminStrategy | None = None
    block_minimums: BlockMinimums | None = None
    lookup: np.ndarray | None = None

    @property
    def dtype(self) -> np.dtype:
        return self.triangles.dtype

    @property
    def triangle_count(self) -> int:
        return int(self.triangles.shape[0])

    @property
    def nbytes(self) -> int:
        """Bytes held by geometry, hierarchy and block data."""
        total = self.triangles.nbytes + self.primitive_ids.nbytes + self.bvh.nbytes
        if self.block_minimums is not None:
            total += self.block_minimums.values.nbytes + self.block_minimums.argmins.nbytes
        if self.lookup is not None:
            total += self.lookup.nbytes
        return int(total)

    def triangle(self, k: int) -> Triangle:
        return Triangle.from_vertices(self.triangles[k], int(self.primitive_ids[k]))

    def dump(self, target: str | os.PathLike | TextIO) -> int:
        """Write `id v0x v0y v0z v1x v1y v1z v2x v2y v2z` per triangle, returning how many triangles were written."""
        if isinstance(target, str | os.PathLike):
            with Path(target).open("w", encoding="utf-8") as fp:
                return self.dump(fp)

        flat = self.triangles.reshape(-1, 9)
        for pid, row in zip(self.primitive_ids.tolist(), flat.tolist(), strict=True):
            target.write(f"{pid} {' '.join(repr(v) for v in row)}\n")
        return int(flat.shape[0])


def build_scene(
    arr: InputArray,
    cfg: BlockConfig | None = None,
    blockmin_strategy: BlockminStrategy = "geometry",
    *,
    dtype: np.dtype = np.float32,
) -> Scene:
    """Generate every triangle and build the hierarchy.

    Without `cfg` the single layout is used. With `cfg` the element triangles
    go to block cells and the block minimums are answered by cell 0
    geometry or by a lookup matrix.
    """
    dtype = np.dtype(dtype)
    process = psutil.Process()
    rss_before = process.memory_info().rss

    if cfg is None:
        if arr.n > limits["single_max_n"]:
            msg = f"single layout supports at most {limits['single_max_n']} elements, got {arr.n}"
            raise ConfigurationError(msg)
        triangles = gen_triangles(arr, dtype=dtype)
        primitive_ids = np.arange(arr.n, dtype=np.int64)
        scene_kw: dict = {"layout": "single"}
    else:
        if cfg.n != arr.n:
            msg = f"block layout built for n={cfg.n} used with an array of {arr.n} elements"
            raise ConfigurationError(msg)
        if blockmin_strategy not in ("geometry", "lookup_table"):
            msg = f"unknown block-minimum strategy {blockmin_strategy!r}"
            raise ConfigurationError(msg)

        minimums = compute_block_minimums(arr, cfg)
        triangles = gen_triangles_block(arr, cfg, dtype=dtype)
        primitive_ids = np.arange(arr.n, dtype=np.int64)
        lookup = None

        if blockmin_strategy == "geometry":
            block_tris = gen_blockmin_triangles(minimums, cfg, dtype=dtype)
            triangles = np.concatenate([triangles, block_tris])
            primitive_ids = np.concatenate([primitive_ids, arr.n + np.arange(cfg.num_blocks, dtype=np.int64)])
        else:
            lookup = build_lookup_table(minimums.values)

        scene_kw = {
            "layout": "block_matrix",
            "config": cfg,
            "blockmin_strategy": blockmin_strategy,
            "block_minimums": minimums,
            "lookup": lookup,
        }

    bvh = Bvh.build(triangles, primitive_ids)
    scene = Scene(arr=arr, triangles=triangles, primitive_ids=primitive_ids, bvh=bvh, **scene_kw)

    log.info(
        "%s scene: %s triangles, %s nodes, depth %s, %s bytes (rss %+d bytes)",
        scene.layout,
        scene.triangle_count,
        bvh.node_count,
        bvh.depth,
        scene.nbytes,
        process.memory_info().rss - rss_before,
    )
    return scene
