"""Bound formulas, k-core certificates and brute-force minimum-dynamo search."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import dynamics
from .constructions import (
    A0_ACTIVATOR,
    MONOTONE_DYNAMO,
    ConstructionReport,
    _majority_s_params,
    _s_threshold_params,
    build_majority_s,
    build_s_threshold,
    parity_fill_round,
)
from .dynamics import BP, MAJORITY, REVERSIBLE, Rule
from .torus import Configuration, TorusShape, VertexSet, build_h, neighbor_counts

SEARCH_MAX_VERTICES = 25
SEARCH_CHUNK = 4096


@dataclass(frozen=True)
class BoundsRecord:
    """Leading term of the minimum (monotone) dynamo size for one table cell.

    The table is tight up to lower-order terms, so ``lower`` and ``upper``
    carry the same leading term; ``source`` names the cell.
    """

    d: int
    r: int | None
    n: int
    model: str
    monotone: bool
    lower: Fraction
    upper: Fraction
    source: str


def table1_bounds(d: int, r: int | None, n: int, model: str, monotone: bool = False) -> BoundsRecord:
    if d < 1 or n < 3:
        raise ValueError(f"need d >= 1 and n >= 3, got d={d}, n={n}")
    if model == MAJORITY:
        frac = Fraction(d, d + 2) if monotone else Fraction(d, d + 1)
        value = (1 - frac) * n ** d
        cell = "majority, monotone" if monotone else "majority"
        return BoundsRecord(d, None, n, model, monotone, value, value, cell)
    if model not in (BP, REVERSIBLE):
        raise ValueError(f"unknown model {model!r}")
    if r is None or not 1 <= r <= 2 * d:
        raise ValueError(f"threshold must satisfy 1 <= r <= 2d, got r={r}, d={d}")
    small = r <= d
    if small:
        base = Fraction(math.comb(d, r - 1), r) * n ** (r - 1)
        if model == BP:
            factor, cell = 1, "r-BP, small r"
        elif monotone:
            factor, cell = 2, "reversible r-BP, small r, monotone"
        else:
            factor = 1 + (n % 2 == 0)
            cell = f"reversible r-BP, small r, i={factor - 1}"
        value = factor * base
    else:
        value = (1 - Fraction(d, r)) * n ** d
        if model == REVERSIBLE:
            value *= 2
        cell = ("r-BP" if model == BP else "reversible r-BP") + ", large r"
    return BoundsRecord(d, r, n, model, monotone, value, value, cell)


def k_core(shape: TorusShape, vset: VertexSet, k: int, rng: np.random.Generator | None = None
           ) -> VertexSet:
    """Largest subset of ``vset`` inducing minimum degree >= k.

    Peels vertices of induced degree < k.  With ``rng`` the initial peel
    order is shuffled; the result does not depend on it.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    alive = np.array(vset.bits, dtype=bool)
    deg = neighbor_counts(shape, alive).astype(np.int64)
    start = np.flatnonzero(alive & (deg < k))
    if rng is not None:
        start = rng.permutation(start)
    queue = deque(start.tolist())
    table = shape.neighbor_table
    while queue:
        v = queue.popleft()
        if not alive[v]:
            continue
        alive[v] = False
        for u in table[v]:
            deg[u] -= 1
            if alive[u] and deg[u] == k - 1:
                queue.append(int(u))
    return VertexSet(shape, alive)


def bp_dynamo_by_core(shape: TorusShape, config: Configuration, r: int) -> bool:
    """r-BP dynamo iff the inactive vertices have an empty (2d - r + 1)-core."""
    Rule.bp(r).validate(shape)
    return k_core(shape, ~config, shape.degree - r + 1).cardinality() == 0


@dataclass
class SearchResult:
    minimum: int | None
    witness: Configuration | None
    examined: int
    exhaustive: bool
    lower_bound: int = 0


def min_dynamo_search(shape: TorusShape, rule: Rule, monotone_required: bool = False,
                      budget: int | None = None, symmetry: bool = False,
                      max_vertices: int = SEARCH_MAX_VERTICES) -> SearchResult:
    """Smallest (monotone) dynamo by enumerating configurations in order of size.

    With ``symmetry`` only sets containing vertex 0 are tried, which loses
    nothing because every translate of a dynamo is a dynamo.  When ``budget``
    candidates have been examined without a success the result is not
    exhaustive; ``lower_bound`` then records the smallest size not yet ruled
    out and the witness, if any, is the all-active configuration.
    """
    rule.validate(shape)
    total = shape.vertex_count
    if total > max_vertices:
        raise ValueError(f"T_{shape.n}^{shape.d} has {total} vertices; exhaustive search "
                         f"is capped at {max_vertices}")
    examined = 0
    for size in range(total + 1):
        if symmetry and size > 0:
            combos = ((0,) + rest for rest in itertools.combinations(range(1, total), size - 1))
        else:
            combos = itertools.combinations(range(total), size)
        while True:
            room = SEARCH_CHUNK if budget is None else min(SEARCH_CHUNK, budget - examined)
            if room <= 0:
                full = VertexSet.full(shape)
                fallback = _accepts(shape, full.bits[None, :], rule, monotone_required)[0]
                return SearchResult(total if fallback else None, full if fallback else None,
                                    examined, False, lower_bound=size)
            chunk = list(itertools.islice(combos, room))
            if not chunk:
                break
            bits = np.zeros((len(chunk), total), dtype=bool)
            if size:
                rows = np.repeat(np.arange(len(chunk)), size)
                bits[rows, np.array(chunk).ravel()] = True
            ok = _accepts(shape, bits, rule, monotone_required)
            hits = np.flatnonzero(ok)
            if hits.size:
                examined += int(hits[0]) + 1
                return SearchResult(size, VertexSet(shape, bits[hits[0]]), examined, True,
                                    lower_bound=size)
            examined += len(chunk)
    return SearchResult(None, None, examined, True, lower_bound=total + 1)


def _accepts(shape: TorusShape, bits: np.ndarray, rule: Rule, monotone: bool) -> np.ndarray:
    out = dynamics.simulate_batch(shape, bits, rule)
    if not out.decided.all():
        raise RuntimeError("simulation budget exhausted during exhaustive search")
    return out.dynamo & out.monotone if monotone else out.dynamo


@dataclass
class BoundCheck:
    name: str
    bound: Fraction
    observed: int

    @property
    def required(self) -> int:
        return math.ceil(self.bound)

    @property
    def ok(self) -> bool:
        return self.observed >= self.required


@dataclass
class LowerBoundReport:
    checks: list[BoundCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[BoundCheck]:
        return [c for c in self.checks if not c.ok]


def check_lower_bounds(shape: TorusShape, rule: Rule, monotone: bool, observed_minimum: int,
                       bp_minimum: int | None = None) -> LowerBoundReport:
    """Compare a dynamo size against every closed-form lower bound that applies.

    * monotone reversible r-BP: ``2 (1 - 2d / 2r) n^d``;
    * monotone majority: ``(1 - d / (d + 2)) n^d``;
    * reversible r-BP on even n, given the r-BP minimum: twice that minimum;
    * reversible r-BP with r = 2d: all n^d vertices.
    """
    rule.validate(shape)
    total = shape.vertex_count
    report = LowerBoundReport()
    if rule.kind == REVERSIBLE:
        r = rule.r
        if monotone:
            bound = 2 * (1 - Fraction(shape.degree, 2 * r)) * total
            report.checks.append(BoundCheck("monotone reversible, regular graph", bound,
                                            observed_minimum))
        if r == shape.degree:
            report.checks.append(BoundCheck("reversible, r = 2d", Fraction(total),
                                            observed_minimum))
        if shape.n % 2 == 0 and bp_minimum is not None:
            report.checks.append(BoundCheck("bipartite factor two", Fraction(2 * bp_minimum),
                                            observed_minimum))
    elif rule.kind == MAJORITY and monotone:
        bound = (1 - Fraction(shape.d, shape.d + 2)) * total
        report.checks.append(BoundCheck("monotone majority, regular graph", bound,
                                        observed_minimum))
    return report


def verify_construction(shape: TorusShape, report: ConstructionReport,
                        max_rounds: int | None = None) -> tuple[bool | None, dynamics.Outcome | None]:
    """Check a builder's claim by simulation; ``None`` when the budget runs out."""
    if report.claim == A0_ACTIVATOR:
        filled = parity_fill_round(shape, report.config, report.rule, max_rounds)
        return filled is not None, None
    verdict, outcome = dynamics.is_dynamo(shape, report.config, report.rule, max_rounds)
    if verdict and report.claim == MONOTONE_DYNAMO:
        verdict = outcome.monotone
    return verdict, outcome


@dataclass
class StructureReport:
    """Violations of the exact-degree properties of an S pattern.

    ``inside`` lists members with the wrong number of neighbors in S,
    ``forward`` lists non-members off H with the wrong number of neighbors
    in S outside the level below.  Vertices whose neighborhood crosses the
    wraparound seam are only checked when the pattern's modulus divides n;
    ``weak`` lists seam-independent failures: members with fewer than the
    required neighbors in S or H, and non-members with too few forward
    neighbors in S or H.
    """

    checked_inside: int = 0
    checked_forward: int = 0
    inside: list[tuple[int, ...]] = field(default_factory=list)
    forward: list[tuple[int, ...]] = field(default_factory=list)
    weak: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.inside or self.forward or self.weak)


def _structure(shape: TorusShape, s: VertexSet, want_inside: int, want_forward: int,
               periodic: bool) -> StructureReport:
    coords = shape.coords
    level = coords.sum(axis=1)
    table = shape.neighbor_table
    h = build_h(shape).bits
    s_bits = s.bits
    active = s_bits | h
    # neighbors obtained by increasing a coordinate are the even columns
    up = table[:, 0::2]
    inside = neighbor_counts(shape, s_bits)
    # an increase never lands in the level below, except across the seam
    fwd_s = (s_bits[up] & (level[up] != level[:, None] - 1)).sum(axis=1)
    fwd_active = (active[up] & (level[up] != level[:, None] - 1)).sum(axis=1)
    inside_active = neighbor_counts(shape, active)
    interior = periodic | ((coords >= 2) & (coords <= shape.n - 1)).all(axis=1)
    off = ~s_bits & ~h
    report = StructureReport()
    members = s_bits & interior
    candidates = off & (periodic | (coords <= shape.n - 1).all(axis=1))
    report.checked_inside = int(members.sum())
    report.checked_forward = int(candidates.sum())
    report.inside = [shape.coords_of(v) for v in np.flatnonzero(members & (inside != want_inside))]
    report.forward = [shape.coords_of(v)
                      for v in np.flatnonzero(candidates & (fwd_s != want_forward))]
    weak = (s_bits & (inside_active < want_inside)) | (off & (fwd_active < want_forward))
    report.weak = [shape.coords_of(v) for v in np.flatnonzero(weak)]
    return report


def s_threshold_structure(shape: TorusShape, r: int) -> StructureReport:
    """Check members see exactly r of S and others exactly r - d forward neighbors in S."""
    _, modulus, _ = _s_threshold_params(shape.d, r)
    return _structure(shape, build_s_threshold(shape, r), r, r - shape.d,
                      shape.n % modulus == 0)


def majority_s_structure(shape: TorusShape) -> StructureReport:
    """Check members see exactly d of S and others exactly one forward neighbor in S."""
    _, modulus, _ = _majority_s_params(shape.d)
    return _structure(shape, build_majority_s(shape), shape.d, 1, shape.n % modulus == 0)
