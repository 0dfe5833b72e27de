"""Configuration representations.

``PeriodicConfig`` is a torus (one period of a spatially periodic
configuration).  ``BiPeriodicConfig`` is a 1D configuration
``^inf(left) . mid . (right)^inf``; ``FinitePattern`` is a centered window
over the ball of radius ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError


def _frozen(a, dtype=np.int64):
    a = np.array(a, dtype=dtype)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class PeriodicConfig:
    """One period of a periodic configuration; axis ``k`` is coordinate ``z_k``."""

    cells: np.ndarray

    def __post_init__(self):
        cells = _frozen(self.cells)
        if cells.ndim not in (1, 2):
            raise InputError("periodic configurations are 1D or 2D")
        if 0 in cells.shape:
            raise InputError("every period component must be >= 1")
        if cells.size and cells.min() < 0:
            raise InputError("negative state index")
        object.__setattr__(self, "cells", cells)

    @property
    def dimension(self) -> int:
        return self.cells.ndim

    @property
    def period(self) -> tuple[int, ...]:
        return self.cells.shape

    def check_alphabet(self, n_states: int):
        if self.cells.max() >= n_states:
            raise InputError(f"state index {int(self.cells.max())} out of range for {n_states} states")

    def __getitem__(self, z):
        if isinstance(z, (int, np.integer)):
            z = (z,)
        return int(self.cells[tuple(int(x) % p for x, p in zip(z, self.period))])

    def key(self) -> bytes:
        return self.cells.tobytes()

    def __eq__(self, other):
        if not isinstance(other, PeriodicConfig):
            return NotImplemented
        return self.period == other.period and bool(np.array_equal(self.cells, other.cells))

    def __hash__(self):
        return hash((self.period, self.key()))


def _primitive(word: tuple[int, ...]) -> tuple[int, ...]:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


@dataclass(frozen=True, eq=False)
class BiPeriodicConfig:
    """``^inf(left) . mid . (right)^inf`` on Z.

    ``mid[k]`` sits at cell ``k - origin``; the left tail ends with
    ``left[-1]`` at cell ``-origin - 1`` and the right tail starts with
    ``right[0]`` at cell ``len(mid) - origin``.
    """

    left: tuple[int, ...]
    mid: tuple[int, ...]
    right: tuple[int, ...]
    origin: int = 0

    def __post_init__(self):
        for name in ("left", "mid", "right"):
            w = tuple(map(int, getattr(self, name)))
            if w and min(w) < 0:
                raise InputError("negative state index")
            object.__setattr__(self, name, w)
        if not self.left or not self.right:
            raise InputError("tail periods must be non-empty words")
        object.__setattr__(self, "origin", int(self.origin))

    dimension = 1

    @classmethod
    def _trusted(cls, left: tuple, mid: tuple, right: tuple, origin: int) -> "BiPeriodicConfig":
        """Build from already-validated int tuples, skipping checks."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "left", left)
        object.__setattr__(obj, "mid", mid)
        object.__setattr__(obj, "right", right)
        object.__setattr__(obj, "origin", origin)
        return obj

    @classmethod
    def uniform(cls, state: int) -> "BiPeriodicConfig":
        return cls((state,), (), (state,), 0)

    @property
    def size(self) -> int:
        return len(self.left) + len(self.mid) + len(self.right)

    def check_alphabet(self, n_states: int):
        top = max(self.left + self.mid + self.right)
        if top >= n_states:
            raise InputError(f"state index {top} out of range for {n_states} states")

    def __getitem__(self, z: int) -> int:
        k = z + self.origin
        if 0 <= k < len(self.mid):
            return self.mid[k]
        if k < 0:
            return self.left[k % len(self.left)]
        return self.right[(k - len(self.mid)) % len(self.right)]

    def window(self, lo: int, hi: int) -> np.ndarray:
        """States of cells ``lo..hi`` inclusive."""
        z = np.arange(lo, hi + 1) + self.origin
        out = np.empty(z.shape, dtype=np.int64)
        left, mid, right = (np.array(w, dtype=np.int64) for w in (self.left, self.mid, self.right))
        m = len(self.mid)
        in_left = z < 0
        in_mid = (z >= 0) & (z < m)
        in_right = z >= m
        out[in_left] = left[z[in_left] % len(left)]
        if m:
            out[in_mid] = mid[z[in_mid]]
        out[in_right] = right[(z[in_right] - m) % len(right)]
        return out

    def span(self) -> tuple[int, int]:
        """Cells covered by the explicit middle, extended to contain cell 0."""
        lo = min(-self.origin, 0)
        hi = max(len(self.mid) - self.origin - 1, 0)
        return lo, hi

    def shifted(self, k: int) -> "BiPeriodicConfig":
        """Translate content ``k`` cells to the right."""
        return BiPeriodicConfig(self.left, self.mid, self.right, self.origin - k)

    def expanded(self) -> "BiPeriodicConfig":
        """Equivalent form whose middle covers cell 0."""
        lo, hi = self.span()
        return self.recut(lo, hi)

    def recut(self, lo: int, hi: int) -> "BiPeriodicConfig":
        """Equivalent form whose explicit middle is cells ``lo..hi``.

        The range is widened if needed so that it contains the current middle.
        """
        lo = min(lo, -self.origin)
        hi = max(hi, len(self.mid) - self.origin - 1)
        pl, pr = len(self.left), len(self.right)
        return BiPeriodicConfig(
            tuple(self.window(lo - pl, lo - 1)),
            tuple(self.window(lo, hi)) if hi >= lo else (),
            tuple(self.window(hi + 1, hi + pr)),
            -lo,
        )

    def canonical(self) -> "BiPeriodicConfig":
        """Unique representative: primitive tails, minimal middle, leftmost boundary."""
        left, right = _primitive(self.left), _primitive(self.right)
        mid = list(self.mid)
        origin = self.origin
        lo_cut = 0
        while lo_cut < len(mid) and mid[lo_cut] == left[lo_cut % len(left)]:
            lo_cut += 1
        if lo_cut:
            k = lo_cut % len(left)
            left = left[k:] + left[:k]
            mid = mid[lo_cut:]
            origin -= lo_cut
        hi_cut = 0
        while hi_cut < len(mid) and mid[-1 - hi_cut] == right[(-1 - hi_cut) % len(right)]:
            hi_cut += 1
        if hi_cut:
            k = hi_cut % len(right)
            right = right[len(right) - k:] + right[: len(right) - k]
            mid = mid[: len(mid) - hi_cut]
        if not mid:
            # slide the boundary left while the right tail extends backwards
            moves = 0
            cap = len(left) + len(right)
            while left[-1] == right[-1] and moves <= cap:
                left = left[-1:] + left[:-1]
                right = right[-1:] + right[:-1]
                origin += 1
                moves += 1
            if moves > cap:
                # fully periodic: cut at cell 0, reading one period from there
                p, b = len(right), -origin
                right = tuple(right[(z - b) % p] for z in range(p))
                left = right
                origin = 0
        return BiPeriodicConfig._trusted(left, tuple(mid), right, origin)

    def __eq__(self, other):
        if not isinstance(other, BiPeriodicConfig):
            return NotImplemented
        a, b = self.canonical(), other.canonical()
        return (a.left, a.mid, a.right, a.origin) == (b.left, b.mid, b.right, b.origin)

    def __hash__(self):
        c = self.canonical()
        return hash((c.left, c.mid, c.right, c.origin))


@dataclass(frozen=True, eq=False)
class FinitePattern:
    """A pattern over the ball of radius ``n``, cell 0 at the center."""

    cells: np.ndarray

    def __post_init__(self):
        cells = _frozen(self.cells)
        if cells.ndim not in (1, 2):
            raise InputError("patterns are 1D or 2D")
        side = cells.shape[0]
        if side % 2 == 0 or any(s != side for s in cells.shape):
            raise InputError(f"pattern shape {cells.shape} is not a ball of odd side")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def of(cls, states: Sequence) -> "FinitePattern":
        return cls(np.asarray(states))

    @property
    def dimension(self) -> int:
        return self.cells.ndim

    @property
    def n(self) -> int:
        return self.cells.shape[0] // 2

    @property
    def center(self) -> int:
        return int(self.cells[(self.n,) * self.dimension])

    def __eq__(self, other):
        if not isinstance(other, FinitePattern):
            return NotImplemented
        return self.cells.shape == other.cells.shape and bool(np.array_equal(self.cells, other.cells))

    def __hash__(self):
        return hash((self.cells.shape, self.cells.tobytes()))
