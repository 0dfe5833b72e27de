"""Cellular automaton local rules.

A rule is stored either as a dense transition table (one entry per
neighborhood pattern, first neighbor most significant) or, when the table
would be too large to materialize, as a vectorized local function.  Both
forms go through :meth:`CARule.evaluate`, which maps a stack of neighbor
arrays of shape ``(len(V), ...)`` to the array of next states.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InputError, ResourceError

#: Default ceiling on the number of table entries materialized at once.
TABLE_LIMIT = 2**20

Offset = tuple[int, ...]


def radius_of(neighborhood: Sequence[Offset]) -> int:
    return max(max(abs(x) for x in v) for v in neighborhood)


@dataclass(frozen=True, eq=False)
class CARule:
    dimension: int
    states: tuple[str, ...]
    neighborhood: tuple[Offset, ...]
    table: np.ndarray | None = None
    local: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    name: str = ""

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise InputError(f"unsupported dimension {self.dimension}")
        if not self.states:
            raise InputError("empty alphabet")
        if len(set(self.states)) != len(self.states):
            raise InputError("duplicate state names")
        hood = tuple(tuple(int(x) for x in v) for v in self.neighborhood)
        if not hood:
            raise InputError("empty neighborhood")
        if len(set(hood)) != len(hood):
            raise InputError("neighborhood offsets must be distinct")
        if any(len(v) != self.dimension for v in hood):
            raise InputError("offset arity does not match dimension")
        object.__setattr__(self, "neighborhood", hood)
        object.__setattr__(self, "states", tuple(self.states))
        if (self.table is None) == (self.local is None):
            raise InputError("exactly one of table or local must be given")
        if self.table is not None:
            table = np.asarray(self.table, dtype=np.int64).ravel()
            if table.size != self.n_states ** len(hood):
                raise InputError(
                    f"table has {table.size} entries, expected {self.n_states ** len(hood)}"
                )
            if table.size and (table.min() < 0 or table.max() >= self.n_states):
                raise InputError("table image out of alphabet range")
            table = table.copy()
            table.flags.writeable = False
            object.__setattr__(self, "table", table)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @functools.cached_property
    def radius(self) -> int:
        return radius_of(self.neighborhood)

    @property
    def n_windows(self) -> int:
        return self.n_states ** len(self.neighborhood)

    def index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise InputError(f"undefined state {name!r}") from None

    def evaluate(self, neigh: np.ndarray) -> np.ndarray:
        """Apply the local map along the first axis of ``neigh``."""
        neigh = np.asarray(neigh, dtype=np.int64)
        if neigh.shape[0] != len(self.neighborhood):
            raise InputError("neighbor stack does not match the neighborhood")
        if self.table is not None:
            q = self.n_states
            idx = np.zeros(neigh.shape[1:], dtype=np.int64)
            for layer in neigh:
                idx *= q
                idx += layer
            return self.table[idx]
        return np.asarray(self.local(neigh), dtype=np.int64)

    def to_table(self, limit: int = TABLE_LIMIT) -> np.ndarray:
        """Dense table, materializing it from the local function if needed."""
        if self.table is not None:
            return self.table
        if self.n_windows > limit:
            raise ResourceError(
                f"rule {self.name or '?'} has {self.n_windows} windows, limit is {limit}"
            )
        return self.evaluate(all_windows(self.n_states, len(self.neighborhood)).T)

    def tabulated(self, limit: int = TABLE_LIMIT) -> "CARule":
        if self.table is not None:
            return self
        return CARule(self.dimension, self.states, self.neighborhood,
                      table=self.to_table(limit), name=self.name)

    @functools.cached_property
    def absorbing(self) -> frozenset[int]:
        """States ``q`` with ``f(w) = q`` for every window centered on ``q``.

        A cell in such a state never leaves it.  Empty when the rule has no
        center offset or its table is too large to scan.
        """
        if not self.has_center() or self.n_windows > TABLE_LIMIT:
            return frozenset()
        wins = all_windows(self.n_states, len(self.neighborhood))
        center = wins[:, self.neighborhood.index((0,) * self.dimension)]
        moved = np.zeros(self.n_states, dtype=bool)
        moved[center[self.to_table() != center]] = True
        return frozenset(int(q) for q in np.nonzero(~moved)[0])

    def has_center(self) -> bool:
        return (0,) * self.dimension in self.neighborhood

    def same_behavior(self, other: "CARule", limit: int = TABLE_LIMIT) -> bool:
        """Equal as global maps (compared over the union neighborhood)."""
        if self.dimension != other.dimension or self.states != other.states:
            return False
        union = tuple(sorted(set(self.neighborhood) | set(other.neighborhood)))
        if self.n_states ** len(union) > limit:
            raise ResourceError("union neighborhood too large to compare")
        wins = all_windows(self.n_states, len(union))
        pos = {v: k for k, v in enumerate(union)}
        a = self.evaluate(wins[:, [pos[v] for v in self.neighborhood]].T)
        b = other.evaluate(wins[:, [pos[v] for v in other.neighborhood]].T)
        return bool(np.array_equal(a, b))

    def __eq__(self, other):
        if not isinstance(other, CARule):
            return NotImplemented
        if (self.dimension, self.states, self.neighborhood) != (
            other.dimension, other.states, other.neighborhood
        ):
            return False
        return bool(np.array_equal(self.to_table(), other.to_table()))

    __hash__ = None

    @classmethod
    def from_function(cls, dimension, states, neighborhood, fn, name="") -> "CARule":
        """Tabulate a per-window Python function ``fn(window) -> state index``."""
        q = len(states)
        k = len(neighborhood)
        if q**k > TABLE_LIMIT:
            raise ResourceError(f"{q}**{k} windows exceed the table limit")
        table = np.fromiter(
            (fn(w) for w in itertools.product(range(q), repeat=k)), dtype=np.int64, count=q**k
        )
        return cls(dimension, tuple(states), tuple(neighborhood), table=table, name=name)

    def with_center(self) -> "CARule":
        """Same global map, re-expressed over a neighborhood containing the origin."""
        if self.has_center():
            return self
        zero = (0,) * self.dimension
        hood = self.neighborhood + (zero,)
        if self.table is not None:
            table = np.repeat(self.table, self.n_states)
            return CARule(self.dimension, self.states, hood, table=table, name=self.name)
        inner = self.local
        return CARule(self.dimension, self.states, hood,
                      local=lambda neigh: inner(neigh[:-1]), name=self.name)


def all_windows(n_states: int, width: int) -> np.ndarray:
    """All ``n_states**width`` windows as rows, in table (big-endian) order."""
    count = n_states**width
    idx = np.arange(count, dtype=np.int64)
    out = np.empty((count, width), dtype=np.int64)
    for k in range(width - 1, -1, -1):
        out[:, k] = idx % n_states
        idx //= n_states
    return out


def apply_local(rule: CARule, window: Sequence[int]) -> int:
    """f(window), with one state per neighborhood offset in listed order."""
    window = [int(s) for s in window]
    if len(window) != len(rule.neighborhood):
        raise InputError(
            f"window has {len(window)} states, neighborhood has {len(rule.neighborhood)}"
        )
    for s in window:
        if not 0 <= s < rule.n_states:
            raise InputError(f"state index {s} out of range")
    return int(rule.evaluate(np.array(window, dtype=np.int64).reshape(-1, 1))[0])
