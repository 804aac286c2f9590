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
from collections.abc import Iterator
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numba
import numpy as np

from core.errors import ConstructionError, DomainError

if TYPE_CHECKING:
    from .geometry import Scene

__all__ = (
    "LEAF_SIZE",
    "MISS",
    "Bvh",
    "BvhNode",
    "HitRecord",
    "Ray",
    "brute_force_trace",
    "build_bvh",
    "closest_hit",
    "hit_matrix",
    "intersect_ray_triangle",
)

log = logging.getLogger("bvh")

LEAF_SIZE = 4
MISS = -1
STACK_SIZE = 256


@dataclass(frozen=True, slots=True)
class Ray:
    """A ray along +X. Only the origin varies in this engine."""

    origin: np.ndarray
    t_min: float = 0.0
    t_max: float = float("inf")
    direction: np.ndarray = field(default_factory=lambda: np.array([1, 0, 0], dtype=np.float32))

    def __post_init__(self) -> None:
        dtype = np.asarray(self.origin).dtype
        dtype = dtype if dtype in (np.float32, np.float64) else np.dtype(np.float32)
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=dtype).reshape(3))
        object.__setattr__(self, "direction", np.asarray(self.direction, dtype=dtype).reshape(3))

        if not 0 <= self.t_min <= self.t_max:
            msg = f"ray bounds must satisfy 0 <= t_min <= t_max, got [{self.t_min}, {self.t_max}]"
            raise DomainError(msg)
        if self.direction.tolist() != [1, 0, 0]:
            msg = f"rays travel along +X, got direction {self.direction.tolist()}"
            raise DomainError(msg)

    @property
    def dtype(self) -> np.dtype:
        return self.origin.dtype


@dataclass(frozen=True, slots=True)
class HitRecord:
    hit: bool
    t: float
    primitive_id: int = MISS

    @classmethod
    def miss(cls, t_max: float = float("inf")) -> HitRecord:
        return cls(False, t_max, MISS)


@dataclass(frozen=True, slots=True)
class BvhNode:
    """Read-only view of one node of a `Bvh`."""

    index: int
    aabb_min: np.ndarray
    aabb_max: np.ndarray
    left: int
    right: int
    start: int
    count: int

    @property
    def is_leaf(self) -> bool:
        return self.left < 0

    @property
    def children(self) -> tuple[int, int] | None:
        return None if self.is_leaf else (self.left, self.right)

    def contains(self, other: BvhNode) -> bool:
        return bool(np.all(self.aabb_min <= other.aabb_min) and np.all(other.aabb_max <= self.aabb_max))


@numba.njit(inline="always")
def _intersect(ox, oy, oz, dx, dy, dz, tri, t_min, t_max):  # noqa: ANN001, ANN202, PLR0913
    # Moller-Trumbore; the two edges meeting at v0 are open, the third is closed
    e1x = tri[1, 0] - tri[0, 0]
    e1y = tri[1, 1] - tri[0, 1]
    e1z = tri[1, 2] - tri[0, 2]
    e2x = tri[2, 0] - tri[0, 0]
    e2y = tri[2, 1] - tri[0, 1]
    e2z = tri[2, 2] - tri[0, 2]

    px = dy * e2z - dz * e2y
    py = dz * e2x - dx * e2z
    pz = dx * e2y - dy * e2x
    det = e1x * px + e1y * py + e1z * pz
    if det == 0:
        return False, t_min

    sx = ox - tri[0, 0]
    sy = oy - tri[0, 1]
    sz = oz - tri[0, 2]
    u = (sx * px + sy * py + sz * pz) / det
    if u <= 0:
        return False, t_min

    qx = sy * e1z - sz * e1y
    qy = sz * e1x - sx * e1z
    qz = sx * e1y - sy * e1x
    v = (dx * qx + dy * qy + dz * qz) / det
    if v <= 0 or u + v > 1:
        return False, t_min

    t = (e2x * qx + e2y * qy + e2z * qz) / det
    if t < t_min or t > t_max:
        return False, t_min
    return True, t


@numba.njit(cache=True)
def _intersect_one(origin, direction, tri, t_min, t_max):  # noqa: ANN001, ANN202
    return _intersect(origin[0], origin[1], origin[2], direction[0], direction[1], direction[2], tri, t_min, t_max)


@numba.njit(cache=True)
def _build_kernel(bmin, bmax, sorted_idx, leaf_size, node_min, node_max, left, right, start, count):  # noqa: ANN001, ANN202, C901, PLR0912, PLR0913
    m = bmin.shape[0]
    flag = np.zeros(m, dtype=np.uint8)
    scratch = np.empty(m, dtype=np.int64)
    stack_node = np.empty(node_min.shape[0], dtype=np.int64)
    stack_depth = np.empty(node_min.shape[0], dtype=np.int64)

    start[0] = 0
    count[0] = m
    n_nodes = 1
    max_depth = 0
    stack_node[0] = 0
    stack_depth[0] = 0
    top = 1

    while top > 0:
        top -= 1
        node = stack_node[top]
        depth = stack_depth[top]
        max_depth = max(max_depth, depth)
        lo = start[node]
        hi = lo + count[node]

        first = sorted_idx[0, lo]
        for a in range(3):
            node_min[node, a] = bmin[first, a]
            node_max[node, a] = bmax[first, a]
        for j in range(lo + 1, hi):
            p = sorted_idx[0, j]
            for a in range(3):
                node_min[node, a] = min(node_min[node, a], bmin[p, a])
                node_max[node, a] = max(node_max[node, a], bmax[p, a])

        left[node] = -1
        right[node] = -1
        if hi - lo <= leaf_size:
            continue

        axis = 0
        extent = node_max[node, 0] - node_min[node, 0]
        for a in range(1, 3):
            e = node_max[node, a] - node_min[node, a]
            if e > extent:
                axis = a
                extent = e

        # median by centroid on the split axis, other axes partitioned stably
        mid = (lo + hi) // 2
        for j in range(lo, hi):
            flag[sorted_idx[axis, j]] = 1 if j < mid else 0
        for b in range(3):
            if b == axis:
                continue
            w = lo
            for j in range(lo, hi):
                p = sorted_idx[b, j]
                if flag[p] == 1:
                    scratch[w] = p
                    w += 1
            for j in range(lo, hi):
                p = sorted_idx[b, j]
                if flag[p] == 0:
                    scratch[w] = p
                    w += 1
            for j in range(lo, hi):
                sorted_idx[b, j] = scratch[j]

        l_node = n_nodes
        r_node = n_nodes + 1
        n_nodes += 2
        left[node] = l_node
        right[node] = r_node
        start[l_node] = lo
        count[l_node] = mid - lo
        start[r_node] = mid
        count[r_node] = hi - mid

        stack_node[top] = r_node
        stack_depth[top] = depth + 1
        stack_node[top + 1] = l_node
        stack_depth[top + 1] = depth + 1
        top += 2

    return n_nodes, max_depth


@numba.njit(nogil=True, cache=True)
def _trace_kernel(node_min, node_max, left, right, start, count, tris, prims, origins, direction, t_min, t_max, out_prim, out_t):  # noqa: ANN001, ANN202, C901, PLR0912, PLR0913, E501
    stack = np.empty(STACK_SIZE, dtype=np.int64)
    dx = direction[0]
    dy = direction[1]
    dz = direction[2]

    for q in range(origins.shape[0]):
        ox = origins[q, 0]
        oy = origins[q, 1]
        oz = origins[q, 2]

        found = False
        best_x = tris[0, 0, 0]
        best_t = t_min
        best_id = -1

        stack[0] = 0
        top = 1
        while top > 0:
            top -= 1
            node = stack[top]

            if oy < node_min[node, 1] or oy > node_max[node, 1]:
                continue
            if oz < node_min[node, 2] or oz > node_max[node, 2]:
                continue
            if node_max[node, 0] - ox < t_min or node_min[node, 0] - ox > t_max:
                continue
            # ties on the plane may still hide a smaller id, so only a strictly farther box is skipped
            if found and node_min[node, 0] > best_x:
                continue

            if left[node] < 0:
                for k in range(start[node], start[node] + count[node]):
                    hit, t = _intersect(ox, oy, oz, dx, dy, dz, tris[k], t_min, t_max)
                    if not hit:
                        continue
                    x = tris[k, 0, 0]
                    pid = prims[k]
                    if not found or x < best_x or (x == best_x and pid < best_id):
                        found = True
                        best_x = x
                        best_t = t
                        best_id = pid
                continue

            near = left[node]
            far = right[node]
            if node_min[far, 0] < node_min[near, 0]:
                near, far = far, near
            stack[top] = far
            stack[top + 1] = near
            top += 2

        if found:
            out_prim[q] = best_id
            out_t[q] = best_t
        else:
            out_prim[q] = -1
            out_t[q] = t_max


@numba.njit(nogil=True, cache=True)
def _brute_kernel(tris, prims, origins, direction, t_min, t_max, out_prim, out_t):  # noqa: ANN001, ANN202, PLR0913
    for q in range(origins.shape[0]):
        found = False
        best_x = tris[0, 0, 0]
        best_t = t_min
        best_id = -1
        for k in range(tris.shape[0]):
            hit, t = _intersect(
                origins[q, 0],
                origins[q, 1],
                origins[q, 2],
                direction[0],
                direction[1],
                direction[2],
                tris[k],
                t_min,
                t_max,
            )
            if not hit:
                continue
            x = tris[k, 0, 0]
            pid = prims[k]
            if not found or x < best_x or (x == best_x and pid < best_id):
                found = True
                best_x = x
                best_t = t
                best_id = pid
        if found:
            out_prim[q] = best_id
            out_t[q] = best_t
        else:
            out_prim[q] = -1
            out_t[q] = t_max


@numba.njit(nogil=True, cache=True)
def _hit_matrix_kernel(tris, origins, direction, t_min, t_max, out):  # noqa: ANN001, ANN202, PLR0913
    for q in range(origins.shape[0]):
        for k in range(tris.shape[0]):
            hit, _ = _intersect(
                origins[q, 0],
                origins[q, 1],
                origins[q, 2],
                direction[0],
                direction[1],
                direction[2],
                tris[k],
                t_min,
                t_max,
            )
            out[q, k] = hit


def _direction(dtype: np.dtype) -> np.ndarray:
    return np.array([1, 0, 0], dtype=dtype)


def _bounds(dtype: np.dtype, t_min: float, t_max: float) -> tuple[np.floating, np.floating]:
    scalar = np.dtype(dtype).type
    return scalar(t_min), scalar(t_max)


def intersect_ray_triangle(ray: Ray, triangle: np.ndarray) -> float | None:
    """Parametric distance to `triangle` (3x3 vertex rows), or None on a miss."""
    tri = np.ascontiguousarray(triangle, dtype=ray.dtype).reshape(3, 3)
    t_min, t_max = _bounds(ray.dtype, ray.t_min, ray.t_max)
    hit, t = _intersect_one(ray.origin, ray.direction, tri, t_min, t_max)
    return float(t) if hit else None


class Bvh:  # pylint: disable=too-many-instance-attributes
    """Flat binary bounding-volume hierarchy over triangles perpendicular to X.

    Nodes are stored as parallel arrays; leaves own the contiguous range
    `[start, start + count)` of the reordered triangle array.
    """

    def __init__(  # pylint: disable=too-many-arguments
        self,
        *,
        node_min: np.ndarray,
        node_max: np.ndarray,
        left: np.ndarray,
        right: np.ndarray,
        start: np.ndarray,
        count: np.ndarray,
        triangles: np.ndarray,
        primitive_ids: np.ndarray,
        depth: int,
    ) -> None:
        self.node_min = node_min
        self.node_max = node_max
        self.left = left
        self.right = right
        self.start = start
        self.count = count
        self.triangles = triangles
        self.primitive_ids = primitive_ids
        self.depth = depth

        for array in (node_min, node_max, left, right, start, count, triangles, primitive_ids):
            array.flags.writeable = False

    def __repr__(self) -> str:
        return f"<Bvh triangles={len(self.triangles)} nodes={self.node_count} depth={self.depth} dtype={self.dtype}>"

    @classmethod
    def build(cls, triangles: np.ndarray, primitive_ids: np.ndarray | None = None, *, leaf_size: int = LEAF_SIZE) -> Bvh:
        """Median split on the longest axis of each node's box, recursing until `leaf_size` triangles remain."""
        triangles = np.asarray(triangles)
        if triangles.ndim != 3 or triangles.shape[1:] != (3, 3):
            msg = f"expected triangles of shape (m, 3, 3), got {triangles.shape}"
            raise ConstructionError(msg)

        m = triangles.shape[0]
        if m == 0:
            msg = "cannot build a hierarchy over zero triangles"
            raise ConstructionError(msg)
        if leaf_size < 1:
            msg = f"leaf size must be positive, got {leaf_size}"
            raise ConstructionError(msg)

        if primitive_ids is None:
            primitive_ids = np.arange(m, dtype=np.int64)
        primitive_ids = np.asarray(primitive_ids, dtype=np.int64)
        if primitive_ids.shape != (m,):
            msg = "one primitive id per triangle is required"
            raise ConstructionError(msg)

        dtype = triangles.dtype if triangles.dtype in (np.float32, np.float64) else np.dtype(np.float32)
        triangles = np.ascontiguousarray(triangles, dtype=dtype)

        bmin = np.ascontiguousarray(triangles.min(axis=1))
        bmax = np.ascontiguousarray(triangles.max(axis=1))
        centroid = triangles.astype(np.float64).mean(axis=1)
        sorted_idx = np.stack([np.argsort(centroid[:, a], kind="stable") for a in range(3)]).astype(np.int64)

        capacity = max(2 * m - 1, 1)
        node_min = np.empty((capacity, 3), dtype=dtype)
        node_max = np.empty((capacity, 3), dtype=dtype)
        left = np.empty(capacity, dtype=np.int64)
        right = np.empty(capacity, dtype=np.int64)
        start = np.empty(capacity, dtype=np.int64)
        count = np.empty(capacity, dtype=np.int64)

        n_nodes, depth = _build_kernel(bmin, bmax, sorted_idx, leaf_size, node_min, node_max, left, right, start, count)
        order = sorted_idx[0]
        log.debug("bvh: %s triangles, %s nodes, depth %s", m, n_nodes, depth)

        return cls(
            node_min=node_min[:n_nodes].copy(),
            node_max=node_max[:n_nodes].copy(),
            left=left[:n_nodes].copy(),
            right=right[:n_nodes].copy(),
            start=start[:n_nodes].copy(),
            count=count[:n_nodes].copy(),
            triangles=np.ascontiguousarray(triangles[order]),
            primitive_ids=np.ascontiguousarray(primitive_ids[order]),
            depth=int(depth),
        )

    @property
    def dtype(self) -> np.dtype:
        return self.triangles.dtype

    @property
    def node_count(self) -> int:
        return int(self.left.shape[0])

    @property
    def nbytes(self) -> int:
        arrays = (self.node_min, self.node_max, self.left, self.right, self.start, self.count, self.triangles, self.primitive_ids)
        return sum(int(a.nbytes) for a in arrays)

    @property
    def root(self) -> BvhNode:
        return self.node(0)

    def node(self, index: int) -> BvhNode:
        return BvhNode(
            index=index,
            aabb_min=self.node_min[index],
            aabb_max=self.node_max[index],
            left=int(self.left[index]),
            right=int(self.right[index]),
            start=int(self.start[index]),
            count=int(self.count[index]),
        )

    def __iter__(self) -> Iterator[BvhNode]:
        for index in range(self.node_count):
            yield self.node(index)

    def leaf_primitives(self, node: BvhNode) -> np.ndarray:
        return self.primitive_ids[node.start : node.start + node.count]

    def trace(
        self,
        origins: np.ndarray,
        *,
        t_min: float = 0.0,
        t_max: float = float("inf"),
        out_prim: np.ndarray | None = None,
        out_t: np.ndarray | None = None,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Closest hit of one +X ray per origin row.

        Returns primitive ids (`MISS` where nothing is hit) and t values.
        """
        origins = np.ascontiguousarray(origins, dtype=self.dtype).reshape(-1, 3)
        q = origins.shape[0]
        if out_prim is None:
            out_prim = np.empty(q, dtype=np.int64)
        if out_t is None:
            out_t = np.empty(q, dtype=self.dtype)

        lo, hi = _bounds(self.dtype, t_min, t_max)
        _trace_kernel(
            self.node_min,
            self.node_max,
            self.left,
            self.right,
            self.start,
            self.count,
            self.triangles,
            self.primitive_ids,
            origins,
            _direction(self.dtype),
            lo,
            hi,
            out_prim,
            out_t,
        )
        return out_prim, out_t

    def closest_hit(self, ray: Ray) -> HitRecord:
        prim, t = self.trace(ray.origin, t_min=ray.t_min, t_max=ray.t_max)
        if prim[0] == MISS:
            return HitRecord.miss(ray.t_max)
        return HitRecord(True, float(t[0]), int(prim[0]))


def build_bvh(triangles: np.ndarray, primitive_ids: np.ndarray | None = None, *, leaf_size: int = LEAF_SIZE) -> Bvh:
    return Bvh.build(triangles, primitive_ids, leaf_size=leaf_size)


def closest_hit(scene: Scene | Bvh, ray: Ray) -> HitRecord:
    """Closest hit of `ray` in a scene, or directly in its hierarchy."""
    bvh = scene if isinstance(scene, Bvh) else scene.bvh
    return bvh.closest_hit(ray)


def brute_force_trace(
    triangles: np.ndarray,
    primitive_ids: np.ndarray,
    origins: np.ndarray,
    *,
    t_min: float = 0.0,
    t_max: float = float("inf"),
) -> tuple[np.ndarray, np.ndarray]:
    """Closest hit by testing every triangle, with the same ordering as `Bvh.trace`."""
    triangles = np.ascontiguousarray(triangles)
    dtype = triangles.dtype
    origins = np.ascontiguousarray(origins, dtype=dtype).reshape(-1, 3)
    out_prim = np.empty(origins.shape[0], dtype=np.int64)
    out_t = np.empty(origins.shape[0], dtype=dtype)
    lo, hi = _bounds(dtype, t_min, t_max)
    _brute_kernel(
        triangles,
        np.ascontiguousarray(primitive_ids, dtype=np.int64),
        origins,
        _direction(dtype),
        lo,
        hi,
        out_prim,
        out_t,
    )
    return out_prim, out_t


def hit_matrix(triangles: np.ndarray, origins: np.ndarray) -> np.ndarray:
    """`out[q, k]` is True when the ray from `origins[q]` hits `triangles[k]`."""
    triangles = np.ascontiguousarray(triangles)
    dtype = triangles.dtype
    origins = np.ascontiguousarray(origins, dtype=dtype).reshape(-1, 3)
    out = np.zeros((origins.shape[0], triangles.shape[0]), dtype=np.bool_)
    lo, hi = _bounds(dtype, 0.0, float("inf"))
    _hit_matrix_kernel(triangles, origins, _direction(dtype), lo, hi, out)
    return out
