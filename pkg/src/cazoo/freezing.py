"""Freezing CAs: synthesize the minimal state order under which no cell can increase."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import BiPeriodicConfig, PeriodicConfig
from .engine import step_biperiodic, torus_step
from .errors import InputError, ResourceError
from .report import DecisionReport
from .rule import TABLE_LIMIT, CARule, all_windows


def _closure(rel: np.ndarray) -> np.ndarray:
    rel = rel.copy()
    np.fill_diagonal(rel, True)
    for k in range(rel.shape[0]):
        rel |= rel[:, k:k + 1] & rel[k:k + 1, :]
    return rel


@dataclass(frozen=True, eq=False)
class StateOrder:
    """Partial order on state indices; ``le[a, b]`` means ``a <= b``."""

    le: np.ndarray

    def __post_init__(self):
        le = np.array(self.le, dtype=bool)
        if le.ndim != 2 or le.shape[0] != le.shape[1]:
            raise InputError("order relation must be a square boolean matrix")
        if not le.diagonal().all():
            raise InputError("order is not reflexive")
        if (_closure(le) != le).any():
            raise InputError("order is not transitively closed")
        if cycle_in(le) is not None:
            raise InputError("order is not antisymmetric")
        le.flags.writeable = False
        object.__setattr__(self, "le", le)

    @classmethod
    def from_pairs(cls, n_states: int, pairs) -> "StateOrder":
        """Reflexive-transitive closure of the generators ``(a, b)`` meaning ``a <= b``."""
        rel = np.zeros((n_states, n_states), dtype=bool)
        for a, b in pairs:
            rel[a, b] = True
        return cls(_closure(rel))

    @property
    def n_states(self) -> int:
        return self.le.shape[0]

    def leq(self, a: int, b: int) -> bool:
        return bool(self.le[a, b])

    def generators(self) -> list[tuple[int, int]]:
        """Covering pairs ``a < b`` (the transitive reduction)."""
        strict = self.le & ~np.eye(self.n_states, dtype=bool)
        via = (strict.astype(np.int64) @ strict.astype(np.int64)) > 0
        cover = strict & ~via
        return [(int(a), int(b)) for a, b in zip(*np.nonzero(cover))]

    def __eq__(self, other):
        if not isinstance(other, StateOrder):
            return NotImplemented
        return self.le.shape == other.le.shape and bool((self.le == other.le).all())

    __hash__ = None


def cycle_in(rel: np.ndarray):
    """A list of states ``a0 <= a1 <= ... <= a0`` (distinct) in a closed relation, or None."""
    both = rel & rel.T & ~np.eye(rel.shape[0], dtype=bool)
    if not both.any():
        return None
    a, b = (int(x) for x in np.argwhere(both)[0])
    return [a, b, a]


def _constraints(rule: CARule, limit: int):
    """Windows of the centered rule and the adjacency of ``image <= center``."""
    rule = rule.with_center()
    k = len(rule.neighborhood)
    if rule.n_windows > limit:
        raise ResourceError(f"{rule.n_windows} windows exceed limit {limit}")
    wins = all_windows(rule.n_states, k)
    image = rule.evaluate(wins.T)
    center = wins[:, rule.neighborhood.index((0,) * rule.dimension)]
    return rule, wins, image, center


def find_freezing_order(rule: CARule, limit: int = TABLE_LIMIT):
    """Minimal order making ``rule`` freezing.

    Returns ``(StateOrder, None)`` or ``(None, cycle)`` where ``cycle`` lists
    distinct states forced below each other.  Rules whose neighborhood omits
    the origin are first re-expressed over ``V + {0}``.
    """
    rule, _, image, center = _constraints(rule, limit)
    rel = np.zeros((rule.n_states, rule.n_states), dtype=bool)
    rel[image, center] = True
    closed = _closure(rel)
    cyc = cycle_in(closed)
    if cyc is not None:
        return None, cyc
    return StateOrder(closed), None


def check_freezing(rule: CARule, order: StateOrder, limit: int = TABLE_LIMIT) -> DecisionReport:
    if order.n_states != rule.n_states:
        raise InputError("order and rule alphabets differ in size")
    centered, wins, image, center = _constraints(rule, limit)
    ok = order.le[image, center]
    if ok.all():
        return DecisionReport("yes", note=f"checked {len(wins)} windows")
    k = int(np.argmin(ok))
    window = {v: int(s) for v, s in zip(centered.neighborhood, wins[k])}
    return DecisionReport(
        "no", note=f"image {int(image[k])} is not <= center {int(center[k])}",
        counterexample=window,
    )


def change_count_audit(rule: CARule, c, steps: int) -> int:
    """Largest number of state changes of any tracked cell over ``steps`` steps.

    Periodic configurations track every cell of the torus; bi-periodic ones
    track the explicit middle plus one period of each tail at time 0.
    """
    if isinstance(c, PeriodicConfig):
        c.check_alphabet(rule.n_states)
        cells = c.cells
        changes = np.zeros(cells.shape, dtype=np.int64)
        for _ in range(steps):
            nxt = torus_step(rule, cells)
            changes += nxt != cells
            cells = nxt
        return int(changes.max())
    if isinstance(c, BiPeriodicConfig):
        c.check_alphabet(rule.n_states)
        lo = -c.origin - len(c.left)
        hi = len(c.mid) - c.origin + len(c.right) - 1
        prev = c.window(lo, hi)
        changes = np.zeros(prev.shape, dtype=np.int64)
        for _ in range(steps):
            c = step_biperiodic(rule, c)
            cur = c.window(lo, hi)
            changes += cur != prev
            prev = cur
        return int(changes.max())
    raise InputError(f"unsupported configuration type {type(c).__name__}")
