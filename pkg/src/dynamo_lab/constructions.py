"""Explicit dynamo constructions on T_n^d and the transforms between them.

Every builder returns a :class:`ConstructionReport`: the configuration, what
it claims to be (dynamo, monotone dynamo, or a configuration that fills a
parity class), the rule the claim refers to, and a concrete size bound split
into the leading term and a lower-order allowance.  The claims are checked by
simulation in :mod:`dynamo_lab.analysis`, never assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import dynamics
from .dynamics import Rule
from .torus import (
    Configuration,
    TorusShape,
    VertexSet,
    border_set,
    build_h,
    embed_in_sub_torus,
    index_family,
    parity_class,
)

DYNAMO = "dynamo"
MONOTONE_DYNAMO = "monotone_dynamo"
A0_ACTIVATOR = "a0_activator"


@dataclass
class ConstructionReport:
    config: Configuration
    claim: str
    rule: Rule
    leading_term: Fraction
    allowance: Fraction
    name: str = ""

    @property
    def predicted_size_bound(self) -> int:
        return math.floor(self.leading_term + self.allowance)

    @property
    def size(self) -> int:
        return self.config.cardinality()

    def within_bound(self) -> bool:
        return self.size <= self.predicted_size_bound


def _residue_count(n: int, modulus: int, hits: int) -> int:
    # max members of a `hits`-residue window among n consecutive steps of a unit
    # (invertible) stride mod `modulus`
    q, rho = divmod(n, modulus)
    return hits * q + min(hits, rho)


def _s_threshold_params(d: int, r: int) -> tuple[list[int], int, int]:
    """Coefficients, modulus and number of accepted residues of the S pattern."""
    if r % 2 == 0:
        half = r // 2
        return list(range(1, half)), half, r - d
    return [2 * i for i in range(1, (r - 1) // 2 + 1)], r, 2 * (r - d)


def build_s_threshold(shape: TorusShape, r: int) -> VertexSet:
    """Dense periodic set where members keep exactly r neighbors inside.

    Even r: ``x_1 + 2 x_2 + ... + (r/2 - 1) x_{r/2-1}  (mod r/2)`` lies in
    ``{1..r-d}``.  Odd r: ``2 x_1 + 4 x_2 + ... + (r-1) x_{(r-1)/2}  (mod r)``
    lies in ``{1..2(r-d)}``.  The exact-degree properties hold away from the
    wraparound seam, and everywhere when the modulus divides n.
    """
    d = shape.d
    if not d + 1 <= r <= 2 * d - 1:
        raise ValueError(f"S needs d+1 <= r <= 2d-1, got r={r}, d={d}")
    if shape.n < 5:
        raise ValueError(f"S needs n >= 5, got n={shape.n}")
    coeffs, modulus, hits = _s_threshold_params(d, r)
    value = shape.coords[:, :len(coeffs)] @ np.array(coeffs, dtype=np.int64)
    residue = value % modulus
    return VertexSet(shape, (residue >= 1) & (residue <= hits))


def s_threshold_size_bound(shape: TorusShape, r: int) -> int:
    _, modulus, hits = _s_threshold_params(shape.d, r)
    return _residue_count(shape.n, modulus, hits) * shape.n ** (shape.d - 1)


def _h_size(shape: TorusShape) -> int:
    return shape.n ** shape.d - (shape.n - 2) ** shape.d


def build_large_r_monotone(shape: TorusShape, r: int) -> ConstructionReport:
    """H union S, a monotone dynamo for reversible r-BP when d < r <= 2d."""
    d, n = shape.d, shape.n
    if not d + 1 <= r <= 2 * d:
        raise ValueError(f"large-r construction needs d+1 <= r <= 2d, got r={r}, d={d}")
    if n < 5:
        raise ValueError(f"large-r construction needs n >= 5, got n={n}")
    leading = 2 * (1 - Fraction(d, r)) * n ** d
    if r == 2 * d:
        # the only dynamo is everything
        return ConstructionReport(VertexSet.full(shape), MONOTONE_DYNAMO, Rule.reversible(r),
                                  leading, n ** d - leading, "large-r")
    config = build_h(shape) | build_s_threshold(shape, r)
    bound = s_threshold_size_bound(shape, r) + _h_size(shape)
    return ConstructionReport(config, MONOTONE_DYNAMO, Rule.reversible(r),
                              leading, bound - leading, "large-r")


def _origin_pair(shape: TorusShape) -> VertexSet:
    one = (1,) * shape.d
    return VertexSet.from_coords(shape, [one, (2,) + one[1:]])


def _origin(shape: TorusShape) -> VertexSet:
    return VertexSet.from_coords(shape, [(1,) * shape.d])


def _copies(shape: TorusShape, r: int, pattern: VertexSet) -> VertexSet:
    out = VertexSet.empty(shape)
    for k in index_family(shape.d, r):
        out = out | embed_in_sub_torus(shape, k, pattern)
    return out


def _check_small_r(shape: TorusShape, r: int) -> None:
    if not 1 <= r <= shape.d:
        raise ValueError(f"small-r construction needs 1 <= r <= d, got r={r}, d={shape.d}")
    if r >= 2 and shape.n < 5:
        raise ValueError(f"small-r construction needs n >= 5 for r >= 2, got n={shape.n}")


def build_small_r_monotone(shape: TorusShape, r: int) -> ConstructionReport:
    """Large-r monotone dynamo of T_n^(r-1) copied into every sub-torus T(k)."""
    _check_small_r(shape, r)
    d, n = shape.d, shape.n
    if r == 1:
        return ConstructionReport(_origin_pair(shape), MONOTONE_DYNAMO, Rule.reversible(1),
                                  Fraction(2), Fraction(0), "small-r-monotone")
    inner = build_large_r_monotone(TorusShape(n, r - 1), r)
    copies = math.comb(d, r - 1)
    leading = Fraction(2, r) * copies * n ** (r - 1)
    bound = copies * inner.predicted_size_bound
    return ConstructionReport(_copies(shape, r, inner.config), MONOTONE_DYNAMO,
                              Rule.reversible(r), leading, bound - leading, "small-r-monotone")


def build_small_r_bp(shape: TorusShape, r: int) -> ConstructionReport:
    """r-BP dynamo from the halved monotone pattern placed in every T(k)."""
    _check_small_r(shape, r)
    d, n = shape.d, shape.n
    if r == 1:
        return ConstructionReport(_origin(shape), DYNAMO, Rule.bp(1),
                                  Fraction(1), Fraction(0), "small-r-bp")
    sub = TorusShape(n, r - 1)
    inner = build_large_r_monotone(sub, r)
    halved = halve_monotone(sub, inner.config)
    copies = math.comb(d, r - 1)
    per_copy = Fraction(inner.predicted_size_bound, 2) + border_set(sub, 1).cardinality()
    leading = Fraction(1, r) * copies * n ** (r - 1)
    return ConstructionReport(_copies(shape, r, halved), DYNAMO, Rule.bp(r),
                              leading, copies * per_copy - leading, "small-r-bp")


def lighter_parity(shape: TorusShape, config: Configuration) -> int:
    """Parity class holding fewer active vertices; ties go to class 0."""
    on_zero = int(np.count_nonzero(config.bits & parity_class(shape, 0).bits))
    return 0 if 2 * on_zero <= config.cardinality() else 1


def halve_bipartite(shape: TorusShape, config: Configuration) -> Configuration:
    """Keep only the active vertices of the lighter side of the checkerboard."""
    if shape.n % 2:
        raise ValueError(f"T_{shape.n}^{shape.d} is not bipartite (odd n)")
    return config & parity_class(shape, lighter_parity(shape, config))


def halve_monotone(shape: TorusShape, config: Configuration) -> Configuration:
    """Monotone reversible dynamo W to an r-BP dynamo of size about |W|/2.

    Keeps W on the lighter parity class plus W on the border x_j = n; every
    other vertex of W then sees all of its neighbors among the kept ones.
    """
    side = parity_class(shape, lighter_parity(shape, config))
    return (config & side) | (config & border_set(shape, 1))


def build_a0(shape: TorusShape, r: int | None = None) -> ConstructionReport:
    """The even parity class; a reversible r-BP dynamo for r <= d when n is odd."""
    if shape.n % 2 == 0:
        raise ValueError(f"A_0 blinks forever on even n (got n={shape.n})")
    r = shape.d if r is None else r
    if not 1 <= r <= shape.d:
        raise ValueError(f"A_0 is a dynamo only for 1 <= r <= d, got r={r}")
    total = shape.vertex_count
    return ConstructionReport(parity_class(shape, 0), DYNAMO, Rule.reversible(r),
                              Fraction(total, 2), Fraction(1, 2), "a0")


def to_a0_activator(shape: TorusShape, config: Configuration, r: int) -> Configuration:
    """Reversible dynamo W to (W on the lighter parity class) plus the width-2 border.

    Under reversible r-BP the result makes that whole parity class active at
    some round.  For r = 2d the only dynamo is everything, so the output
    already contains a full class at round 0.
    """
    d = shape.d
    if not d + 1 <= r <= 2 * d:
        raise ValueError(f"A_0-activator needs d+1 <= r <= 2d, got r={r}, d={d}")
    side = parity_class(shape, lighter_parity(shape, config))
    return (config & side) | border_set(shape, 2)


def parity_fill_round(shape: TorusShape, config: Configuration, rule: Rule,
                      max_rounds: int | None = None) -> tuple[int, int] | None:
    """First ``(round, class)`` at which a whole parity class is active, else None."""
    rule.validate(shape)
    if max_rounds is None:
        max_rounds = dynamics.default_max_rounds(shape)
    classes = [parity_class(shape, 0).bits, parity_class(shape, 1).bits]
    cur = np.array(config.bits)
    prev = None
    for t in range(max_rounds + 1):
        for i, cls in enumerate(classes):
            if cur[cls].all():
                return t, i
        new = dynamics.step_bits(shape, cur, rule)
        if np.array_equal(new, cur) or (prev is not None and np.array_equal(new, prev)):
            return None
        prev, cur = cur, new
    return None


def build_small_r_reversible_odd(shape: TorusShape, r: int) -> ConstructionReport:
    """Reversible r-BP dynamo of size about (1/r) C(d, r-1) n^(r-1) for odd n."""
    d, n = shape.d, shape.n
    if n % 2 == 0:
        raise ValueError(f"odd-n construction needs odd n, got n={n}")
    if not 1 <= r <= d:
        raise ValueError(f"odd-n construction needs 1 <= r <= d, got r={r}, d={d}")
    if r >= 2 and n < 7:
        raise ValueError(f"odd-n construction needs n >= 7 for r >= 2, got n={n}")
    if r == 1:
        return ConstructionReport(_origin(shape), DYNAMO, Rule.reversible(1),
                                  Fraction(1), Fraction(0), "odd-n")
    sub = TorusShape(n, r - 1)
    copies = math.comb(d, r - 1)
    leading = Fraction(1, r) * copies * n ** (r - 1)
    if r == 2:
        # each T(k) is a cycle with threshold 2, whose only dynamo is the whole
        # cycle; seed the parity class through (1, ..., 1) on every line instead
        line = parity_class(sub, 1)
        per_copy = Fraction(n + 1, 2)
        return ConstructionReport(_copies(shape, r, line), DYNAMO, Rule.reversible(r),
                                  leading, copies * per_copy - leading, "odd-n")
    inner = build_large_r_monotone(sub, r)
    activator = to_a0_activator(sub, inner.config, r)
    per_copy = Fraction(inner.predicted_size_bound, 2) + border_set(sub, 2).cardinality()
    return ConstructionReport(_copies(shape, r, activator), DYNAMO, Rule.reversible(r),
                              leading, copies * per_copy - leading, "odd-n")


def _majority_s_params(d: int) -> tuple[list[int], int, int]:
    if d % 2 == 0:
        return list(range(1, d // 2 + 1)), (d + 2) // 2, 1
    return [2 * i for i in range(1, (d + 1) // 2 + 1)], d + 2, 2


def build_majority_s(shape: TorusShape) -> VertexSet:
    """Periodic set where members keep exactly d neighbors inside.

    Even d: ``x_1 + 2 x_2 + ... + (d/2) x_{d/2}  (mod (d+2)/2)`` equals 1.
    Odd d: ``2 x_1 + 4 x_2 + ... + (d+1) x_{(d+1)/2}  (mod d+2)`` is 1 or 2.
    """
    if shape.n < 5:
        raise ValueError(f"majority S needs n >= 5, got n={shape.n}")
    coeffs, modulus, hits = _majority_s_params(shape.d)
    residue = (shape.coords[:, :len(coeffs)] @ np.array(coeffs, dtype=np.int64)) % modulus
    return VertexSet(shape, (residue >= 1) & (residue <= hits))


def build_majority_dynamo(shape: TorusShape) -> ConstructionReport:
    """H union the majority S pattern, a monotone dynamo of the majority process."""
    d, n = shape.d, shape.n
    config = build_h(shape) | build_majority_s(shape)
    _, modulus, hits = _majority_s_params(d)
    bound = _residue_count(n, modulus, hits) * n ** (d - 1) + _h_size(shape)
    leading = (1 - Fraction(d, d + 2)) * n ** d
    return ConstructionReport(config, MONOTONE_DYNAMO, Rule.majority(),
                              leading, bound - leading, "majority")


def pad_embed(shape: TorusShape, config: Configuration) -> tuple[TorusShape, Configuration]:
    """Place ``config`` on [1, n]^d inside T_{n+3}^d and switch the rest on."""
    big = TorusShape(shape.n + 3, shape.d)
    inner = (big.coords <= shape.n).all(axis=1)
    bits = ~inner
    src = shape.coords[config.bits]
    index = ((src - 1) * (big.n ** np.arange(shape.d))).sum(axis=1)
    bits[index] = True
    return big, VertexSet(big, bits)


def build_large_r_bp(shape: TorusShape, r: int) -> ConstructionReport:
    """Halved H union S: an r-BP dynamo of size about (1 - d/r) n^d for d < r <= 2d."""
    inner = build_large_r_monotone(shape, r)
    d, n = shape.d, shape.n
    leading = (1 - Fraction(d, r)) * n ** d
    bound = Fraction(inner.predicted_size_bound, 2) + border_set(shape, 1).cardinality()
    return ConstructionReport(halve_monotone(shape, inner.config), DYNAMO, Rule.bp(r),
                              leading, bound - leading, "large-r-bp")
