"""Synchronous threshold dynamics on the torus.

Three update rules are supported: irreversible r-bootstrap percolation
(``bp``), reversible r-bootstrap percolation (``rbp``) and the majority rule
with ties resolved in favour of the current state (``maj``).

Runs stop as soon as the state is all-active, or when the state two rounds
back reappears.  Symmetric synchronous threshold networks always settle into
a fixed point or a 2-cycle, so the two-step stopper is complete; ``debug``
mode keeps a hash of every visited state and raises if a longer cycle is ever
seen.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .torus import Configuration, TorusShape, VertexSet, neighbor_counts

BP = "bp"
REVERSIBLE = "rbp"
MAJORITY = "maj"
MODELS = (BP, REVERSIBLE, MAJORITY)

PERCOLATED = "percolated"
CYCLE = "cycle"
BUDGET = "budget"


@dataclass(frozen=True)
class Rule:
    kind: str
    r: int | None = None

    def __post_init__(self):
        if self.kind not in MODELS:
            raise ValueError(f"unknown model {self.kind!r}; expected one of {', '.join(MODELS)}")
        if self.kind == MAJORITY:
            if self.r is not None:
                raise ValueError("the majority rule takes no threshold")
        elif self.r is None or int(self.r) < 1:
            raise ValueError(f"{self.kind} needs a threshold r >= 1, got {self.r!r}")
        else:
            object.__setattr__(self, "r", int(self.r))

    @classmethod
    def bp(cls, r: int) -> Rule:
        return cls(BP, r)

    @classmethod
    def reversible(cls, r: int) -> Rule:
        return cls(REVERSIBLE, r)

    @classmethod
    def majority(cls) -> Rule:
        return cls(MAJORITY)

    def validate(self, shape: TorusShape) -> None:
        if self.r is not None and self.r > shape.degree:
            raise ValueError(f"threshold r={self.r} exceeds the degree {shape.degree} of "
                             f"T_{shape.n}^{shape.d}")

    def __str__(self) -> str:
        return self.kind if self.r is None else f"{self.kind}({self.r})"


@dataclass
class Outcome:
    """How a run ended.

    ``verdict`` is ``"percolated"`` (all-active at round ``round``),
    ``"cycle"`` (the states from round ``round`` on repeat with ``period``
    1 or 2, never all-active) or ``"budget"`` (``round`` is the round limit).
    """

    verdict: str
    round: int
    period: int | None = None
    monotone: bool = True
    rounds_run: int = 0
    frames: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def percolated(self) -> bool:
        return self.verdict == PERCOLATED

    @property
    def is_dynamo(self) -> bool | None:
        if self.verdict == BUDGET:
            return None
        return self.verdict == PERCOLATED

    def describe(self) -> str:
        if self.verdict == PERCOLATED:
            return f"percolated at t={self.round}"
        if self.verdict == CYCLE:
            return f"cycle of period {self.period} at t={self.round}"
        return f"indeterminate: no decision within {self.round} rounds"


def default_max_rounds(shape: TorusShape) -> int:
    return 4 * shape.d * shape.n + 16


def step_bits(shape: TorusShape, bits: np.ndarray, rule: Rule) -> np.ndarray:
    """One synchronous round on a raw state array (batch axes allowed)."""
    counts = neighbor_counts(shape, bits)
    if rule.kind == BP:
        return bits | (counts >= rule.r)
    if rule.kind == REVERSIBLE:
        return counts >= rule.r
    d = shape.d
    return (counts > d) | ((counts == d) & bits)


def step(shape: TorusShape, config: Configuration, rule: Rule) -> Configuration:
    rule.validate(shape)
    return VertexSet(shape, step_bits(shape, config.bits, rule))


def run(shape: TorusShape, config: Configuration, rule: Rule, max_rounds: int | None = None,
        *, record: bool = False, debug: bool = False) -> Outcome:
    """Iterate ``rule`` from ``config`` until percolation, a repeat, or the budget.

    With ``record`` the outcome carries every state from round 0 to the last
    round run.  With ``debug`` every state is hashed and a repeat the two-step
    stopper did not catch raises ``RuntimeError``.
    """
    rule.validate(shape)
    if max_rounds is None:
        max_rounds = default_max_rounds(shape)
    if max_rounds < 1:
        raise ValueError(f"max_rounds must be at least 1, got {max_rounds}")

    cur = np.array(config.bits, dtype=bool)
    frames = [cur] if record else None
    seen = {cur.tobytes(): 0} if debug else None
    if cur.all():
        return Outcome(PERCOLATED, 0, monotone=True, rounds_run=0, frames=frames)

    prev = None
    monotone = True
    for t in range(1, max_rounds + 1):
        new = step_bits(shape, cur, rule)
        if monotone and (cur & ~new).any():
            monotone = False
        if record:
            frames.append(new)
        if new.all():
            return Outcome(PERCOLATED, t, monotone=monotone, rounds_run=t, frames=frames)
        if np.array_equal(new, cur):
            return Outcome(CYCLE, t - 1, period=1, monotone=monotone, rounds_run=t, frames=frames)
        if prev is not None and np.array_equal(new, prev):
            return Outcome(CYCLE, t - 2, period=2, monotone=monotone, rounds_run=t, frames=frames)
        if debug:
            key = new.tobytes()
            if key in seen:
                raise RuntimeError(f"state at round {t} repeats round {seen[key]}: "
                                   f"period {t - seen[key]} > 2")
            seen[key] = t
        prev, cur = cur, new
    return Outcome(BUDGET, max_rounds, monotone=monotone, rounds_run=max_rounds, frames=frames)


def find_cycle(shape: TorusShape, config: Configuration, rule: Rule,
               max_rounds: int | None = None) -> tuple[int, int] | None:
    """Hash every state until one repeats; returns ``(entry_round, period)``.

    Independent of the two-step stopper in :func:`run`, used to cross-check it.
    """
    rule.validate(shape)
    if max_rounds is None:
        max_rounds = default_max_rounds(shape)
    cur = np.array(config.bits, dtype=bool)
    seen = {cur.tobytes(): 0}
    for t in range(1, max_rounds + 1):
        cur = step_bits(shape, cur, rule)
        key = cur.tobytes()
        if key in seen:
            return seen[key], t - seen[key]
        seen[key] = t
    return None


def is_dynamo(shape: TorusShape, config: Configuration, rule: Rule,
              max_rounds: int | None = None) -> tuple[bool | None, Outcome]:
    """``(True, outcome)`` if the run percolates, ``False`` on a cycle, ``None`` on budget."""
    outcome = run(shape, config, rule, max_rounds)
    return outcome.is_dynamo, outcome


def is_monotone_dynamo(shape: TorusShape, config: Configuration, rule: Rule,
                       max_rounds: int | None = None) -> bool | None:
    verdict, outcome = is_dynamo(shape, config, rule, max_rounds)
    if verdict is None:
        return None
    return verdict and outcome.monotone


def is_stable_set(shape: TorusShape, vset: VertexSet, rule: Rule) -> bool:
    """True when every member keeps enough neighbors inside ``vset`` to stay active."""
    rule.validate(shape)
    if rule.kind == BP:
        return True
    need = rule.r if rule.kind == REVERSIBLE else shape.d
    inside = neighbor_counts(shape, vset.bits)[vset.bits]
    return bool((inside >= need).all())


def bp_closure(shape: TorusShape, config: Configuration, r: int) -> Configuration:
    """Final state of irreversible r-BP, by worklist activation instead of sweeps."""
    Rule.bp(r).validate(shape)
    active = np.array(config.bits, dtype=bool)
    counts = neighbor_counts(shape, active).astype(np.int64)
    table = shape.neighbor_table
    queue = deque(np.flatnonzero(~active & (counts >= r)).tolist())
    while queue:
        v = queue.popleft()
        if active[v]:
            continue
        active[v] = True
        for u in table[v]:
            counts[u] += 1
            if not active[u] and counts[u] == r:
                queue.append(int(u))
    return VertexSet(shape, active)


@dataclass
class BatchOutcome:
    dynamo: np.ndarray
    decided: np.ndarray
    monotone: np.ndarray


def simulate_batch(shape: TorusShape, bits: np.ndarray, rule: Rule,
                   max_rounds: int | None = None) -> BatchOutcome:
    """Vectorised :func:`run` over the rows of a ``(batch, n**d)`` array."""
    rule.validate(shape)
    if max_rounds is None:
        max_rounds = default_max_rounds(shape)
    cur = np.array(bits, dtype=bool)
    if cur.ndim != 2 or cur.shape[1] != shape.vertex_count:
        raise ValueError(f"expected a (batch, {shape.vertex_count}) array, got {cur.shape}")
    batch = cur.shape[0]
    dynamo = cur.all(axis=1)
    decided = dynamo.copy()
    monotone = np.ones(batch, dtype=bool)
    live = np.flatnonzero(~decided)
    cur = cur[live]
    prev = None
    for _ in range(max_rounds):
        if live.size == 0:
            break
        new = step_bits(shape, cur, rule)
        monotone[live] &= ~(cur & ~new).any(axis=1)
        full = new.all(axis=1)
        stuck = (new == cur).all(axis=1)
        if prev is not None:
            stuck |= (new == prev).all(axis=1)
        dynamo[live[full]] = True
        done = full | stuck
        decided[live[done]] = True
        keep = ~done
        live = live[keep]
        prev = cur[keep]
        cur = new[keep]
    return BatchOutcome(dynamo=dynamo, decided=decided, monotone=monotone)
