"""Torus geometry and the named vertex sets used by the constructions.

Coordinates are 1-based in every public function: a vertex of T_n^d is a
tuple ``(x_1, ..., x_d)`` with ``1 <= x_j <= n``.  Internally a vertex is the
mixed-radix integer ``sum((x_j - 1) * n**(j - 1))``, so reshaping a state
vector of a 2-dimensional torus to ``(n, n)`` gives rows indexed by ``x_2``.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

DEFAULT_MAX_CELLS = 1 << 24
MAX_CELLS_ENV = "DYNAMO_LAB_MAX_CELLS"


def max_cells() -> int:
    """Vertex budget for a single torus, overridable through the environment."""
    raw = os.environ.get(MAX_CELLS_ENV)
    if raw is None:
        return DEFAULT_MAX_CELLS
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{MAX_CELLS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{MAX_CELLS_ENV} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class TorusShape:
    """The d-dimensional torus T_n^d with side length ``n``."""

    n: int
    d: int
    budget: int | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise TypeError(f"n must be an integer, got {self.n!r}")
        if isinstance(self.d, bool) or not isinstance(self.d, (int, np.integer)):
            raise TypeError(f"d must be an integer, got {self.d!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "d", int(self.d))
        if self.n < 3:
            raise ValueError(f"side length must be at least 3 (got n={self.n}); "
                             "n <= 2 gives a multigraph")
        if self.d < 1:
            raise ValueError(f"dimension must be at least 1 (got d={self.d})")
        limit = max_cells() if self.budget is None else self.budget
        # compare in log space first so huge exponents never get materialised
        if self.d * math.log2(self.n) > math.log2(limit) + 1 or self.n ** self.d > limit:
            raise ValueError(f"T_{self.n}^{self.d} has more than {limit} vertices; "
                             f"raise {MAX_CELLS_ENV} to allow it")

    @property
    def vertex_count(self) -> int:
        return self.n ** self.d

    @property
    def degree(self) -> int:
        return 2 * self.d

    @cached_property
    def coords(self) -> np.ndarray:
        """``(n**d, d)`` array of 1-based coordinates, row ``v`` is vertex ``v``."""
        idx = np.arange(self.vertex_count, dtype=np.int64)
        out = np.empty((self.vertex_count, self.d), dtype=np.int64)
        for j in range(self.d):
            out[:, j] = (idx // self.n ** j) % self.n + 1
        out.setflags(write=False)
        return out

    @cached_property
    def neighbor_table(self) -> np.ndarray:
        """``(n**d, 2d)`` array; columns are ``+e_1, -e_1, +e_2, -e_2, ...``."""
        idx = np.arange(self.vertex_count, dtype=np.int64)
        table = np.empty((self.vertex_count, 2 * self.d), dtype=np.int64)
        for j in range(self.d):
            stride = self.n ** j
            digit = (idx // stride) % self.n
            table[:, 2 * j] = idx + (((digit + 1) % self.n) - digit) * stride
            table[:, 2 * j + 1] = idx + (((digit - 1) % self.n) - digit) * stride
        table.setflags(write=False)
        return table

    def vertex_index(self, coord: Sequence[int]) -> int:
        if len(coord) != self.d:
            raise ValueError(f"expected {self.d} coordinates, got {len(coord)}")
        index = 0
        for j, x in enumerate(coord):
            if not 1 <= x <= self.n:
                raise ValueError(f"coordinate {x} outside [1, {self.n}]")
            index += (int(x) - 1) * self.n ** j
        return index

    def coords_of(self, v: int) -> tuple[int, ...]:
        self._check_vertex(v)
        return tuple(int(c) for c in self.coords[v])

    def neighbors(self, v: int) -> list[int]:
        self._check_vertex(v)
        return [int(u) for u in self.neighbor_table[v]]

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.vertex_count:
            raise IndexError(f"vertex {v} outside [0, {self.vertex_count})")


def make_torus(n: int, d: int) -> TorusShape:
    return TorusShape(n, d)


class VertexSet:
    """A subset of the vertices of a torus, stored as a dense boolean vector.

    A configuration is the same object read as "the set of active vertices",
    so :data:`Configuration` is an alias of this class.
    """

    __slots__ = ("shape", "bits")

    def __init__(self, shape: TorusShape, bits):
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (shape.vertex_count,):
            raise ValueError(f"expected {shape.vertex_count} bits, got shape {bits.shape}")
        bits = bits.copy()
        bits.setflags(write=False)
        self.shape = shape
        self.bits = bits

    @classmethod
    def empty(cls, shape: TorusShape) -> VertexSet:
        return cls(shape, np.zeros(shape.vertex_count, dtype=bool))

    @classmethod
    def full(cls, shape: TorusShape) -> VertexSet:
        return cls(shape, np.ones(shape.vertex_count, dtype=bool))

    @classmethod
    def from_indices(cls, shape: TorusShape, indices: Iterable[int]) -> VertexSet:
        bits = np.zeros(shape.vertex_count, dtype=bool)
        bits[np.fromiter(indices, dtype=np.int64)] = True
        return cls(shape, bits)

    @classmethod
    def from_coords(cls, shape: TorusShape, coords: Iterable[Sequence[int]]) -> VertexSet:
        return cls.from_indices(shape, (shape.vertex_index(c) for c in coords))

    def cardinality(self) -> int:
        return int(np.count_nonzero(self.bits))

    __len__ = cardinality

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def to_coords(self) -> list[tuple[int, ...]]:
        return [tuple(int(c) for c in row) for row in self.shape.coords[self.bits]]

    def is_full(self) -> bool:
        return bool(self.bits.all())

    def issubset(self, other: VertexSet) -> bool:
        self._check_same(other)
        return not bool((self.bits & ~other.bits).any())

    def __contains__(self, v) -> bool:
        if isinstance(v, tuple):
            v = self.shape.vertex_index(v)
        return bool(self.bits[v])

    def _check_same(self, other: VertexSet) -> None:
        if not isinstance(other, VertexSet):
            raise TypeError(f"expected a VertexSet, got {type(other).__name__}")
        if other.shape != self.shape:
            raise ValueError(f"sets live on different tori: {self.shape} vs {other.shape}")

    def __or__(self, other: VertexSet) -> VertexSet:
        self._check_same(other)
        return VertexSet(self.shape, self.bits | other.bits)

    def __and__(self, other: VertexSet) -> VertexSet:
        self._check_same(other)
        return VertexSet(self.shape, self.bits & other.bits)

    def __sub__(self, other: VertexSet) -> VertexSet:
        self._check_same(other)
        return VertexSet(self.shape, self.bits & ~other.bits)

    def __invert__(self) -> VertexSet:
        return VertexSet(self.shape, ~self.bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.bits, other.bits))

    def __ge__(self, other: VertexSet) -> bool:
        return other.issubset(self)

    def __le__(self, other: VertexSet) -> bool:
        return self.issubset(other)

    __hash__ = None

    def __repr__(self) -> str:
        return f"VertexSet(T_{self.shape.n}^{self.shape.d}, |{self.cardinality()}|)"


Configuration = VertexSet


def neighbor_counts(shape: TorusShape, bits: np.ndarray) -> np.ndarray:
    """Number of neighbors inside ``bits`` for every vertex.

    ``bits`` may carry leading batch axes; the last axis indexes vertices.
    """
    bits = np.asarray(bits, dtype=bool)
    table = shape.neighbor_table
    counts = np.zeros(bits.shape, dtype=np.int16)
    for col in range(table.shape[1]):
        counts += bits[..., table[:, col]]
    return counts


def internal_degrees(vset: VertexSet) -> np.ndarray:
    """Degree of each member of ``vset`` in the subgraph it induces."""
    return neighbor_counts(vset.shape, vset.bits)[vset.bits]


def parity_class(shape: TorusShape, i: int) -> VertexSet:
    if i not in (0, 1):
        raise ValueError(f"parity class must be 0 or 1, got {i}")
    return VertexSet(shape, shape.coords.sum(axis=1) % 2 == i)


def level_set(shape: TorusShape, j: int) -> VertexSet:
    if not shape.d <= j <= shape.d * shape.n:
        raise ValueError(f"level {j} outside [{shape.d}, {shape.d * shape.n}]")
    return VertexSet(shape, shape.coords.sum(axis=1) == j)


def corner_distances(shape: TorusShape) -> np.ndarray:
    """L1 distance of every vertex to the nearest corner of [1, n]^d, no wraparound."""
    c = shape.coords
    return np.minimum(c - 1, shape.n - c).sum(axis=1)


def corner_distance_class(shape: TorusShape, l: int) -> VertexSet:
    top = shape.d * (shape.n // 2)
    if not 0 <= l <= top:
        raise ValueError(f"corner distance {l} outside [0, {top}]")
    return VertexSet(shape, corner_distances(shape) == l)


def build_h(shape: TorusShape) -> VertexSet:
    """Vertices with some coordinate <= 2: d pairs of adjacent codimension-1 slabs."""
    if shape.n < 5:
        raise ValueError(f"H needs n >= 5, got n={shape.n}")
    return VertexSet(shape, (shape.coords <= 2).any(axis=1))


def border_set(shape: TorusShape, width: int) -> VertexSet:
    """Vertices with some coordinate in the top ``width`` values ``n-width+1..n``."""
    if width not in (1, 2):
        raise ValueError(f"border width must be 1 or 2, got {width}")
    if shape.n < 2 * width + 1:
        raise ValueError(f"width-{width} border needs n >= {2 * width + 1}, got n={shape.n}")
    return VertexSet(shape, (shape.coords > shape.n - width).any(axis=1))


def index_family(d: int, r: int) -> list[tuple[int, ...]]:
    """All increasing (d-r+1)-tuples from 1..d; there are C(d, r-1) of them."""
    if not 2 <= r <= d:
        raise ValueError(f"index family needs 2 <= r <= d, got r={r}, d={d}")
    return list(itertools.combinations(range(1, d + 1), d - r + 1))


def _check_index_tuple(shape: TorusShape, k: Sequence[int]) -> tuple[int, ...]:
    k = tuple(int(j) for j in k)
    if not 1 <= len(k) <= shape.d - 1:
        raise ValueError(f"index tuple must have between 1 and {shape.d - 1} entries, got {k}")
    if any(a >= b for a, b in zip(k, k[1:])) or k[0] < 1 or k[-1] > shape.d:
        raise ValueError(f"index tuple must be strictly increasing within [1, {shape.d}], got {k}")
    return k


def sub_torus(shape: TorusShape, k: Sequence[int]) -> VertexSet:
    """Vertices whose coordinates listed in ``k`` all equal 1."""
    k = _check_index_tuple(shape, k)
    cols = [j - 1 for j in k]
    return VertexSet(shape, (shape.coords[:, cols] == 1).all(axis=1))


def embed_in_sub_torus(shape: TorusShape, k: Sequence[int], pattern: VertexSet) -> VertexSet:
    """Copy a set of T_n^m into T(k), m = d - len(k).

    The coordinates named in ``k`` are pinned to 1 and the remaining ones,
    in increasing order, take the coordinates of ``pattern``.
    """
    k = _check_index_tuple(shape, k)
    free = [j for j in range(1, shape.d + 1) if j not in k]
    sub = pattern.shape
    if sub.n != shape.n or sub.d != len(free):
        raise ValueError(f"pattern lives on T_{sub.n}^{sub.d}, "
                         f"sub-torus {k} is T_{shape.n}^{len(free)}")
    src = sub.coords[pattern.bits]
    index = np.zeros(len(src), dtype=np.int64)
    for pos, j in enumerate(free):
        index += (src[:, pos] - 1) * shape.n ** (j - 1)
    bits = np.zeros(shape.vertex_count, dtype=bool)
    bits[index] = True
    return VertexSet(shape, bits)


def union_d_r(shape: TorusShape, r: int) -> VertexSet:
    """Union of the sub-tori T(k) over the whole index family K(r)."""
    out = VertexSet.empty(shape)
    for k in index_family(shape.d, r):
        out = out | sub_torus(shape, k)
    return out
