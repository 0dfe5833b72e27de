"""Prediction, reachability, temporal cycles and column-factor languages."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .config import BiPeriodicConfig, FinitePattern, PeriodicConfig
from .constructions import ZigzagAlphabet, _forbidden
from .engine import MAX_CELLS, evolve_window, shrink_step, step_biperiodic, torus_step, trace
from .errors import InputError, ResourceError
from .report import DecisionReport
from .rule import TABLE_LIMIT, CARule, all_windows

#: Default cap on the number of distinct configurations remembered by cycle detection.
MAX_ORBIT = 10**6


def pred(rule: CARule, t: int, u: FinitePattern) -> int:
    """F^t(u) at the center, for ``u`` over exactly B(r t)."""
    if t <= 0:
        raise InputError("t must be positive")
    if u.n != rule.radius * t:
        raise InputError(f"support radius must be exactly r*t = {rule.radius * t}, got {u.n}")
    return evolve_window(rule, u, t).center


def ubpred_bounded(rule: CARule, c: BiPeriodicConfig, q: int, horizon: int,
                   max_cells: int = MAX_CELLS) -> DecisionReport:
    """Semi-decision: is F^t(c)_0 = q for some 0 <= t <= horizon?"""
    if rule.dimension != 1:
        raise InputError("reachability is defined for 1D rules")
    c.check_alphabet(rule.n_states)
    if not 0 <= q < rule.n_states:
        raise InputError(f"state {q} out of range")
    for t in range(horizon + 1):
        if c[0] == q:
            return DecisionReport("yes", witness_time=t)
        if t == horizon:
            break
        c = step_biperiodic(rule, c)
        if c.size > max_cells:
            raise ResourceError(f"explicit size {c.size} exceeds budget", progress=t + 1)
    return DecisionReport("unknown", note=f"not reached within {horizon} steps")


def ubpred_bounded_all(rule: CARule, c: BiPeriodicConfig, horizon: int,
                       max_cells: int = MAX_CELLS) -> list[DecisionReport]:
    """:func:`ubpred_bounded` for every state at once, sharing one bi-periodic orbit."""
    if rule.dimension != 1:
        raise InputError("reachability is defined for 1D rules")
    c.check_alphabet(rule.n_states)
    return reports_from_history(trace(rule, c, 0, horizon, max_cells), rule.n_states)


def reports_from_history(history, n_states: int) -> list[DecisionReport]:
    """Bounded reachability verdicts for every state, given cell 0 at times ``0..T``."""
    first: dict[int, int] = {}
    for t, s in enumerate(history):
        first.setdefault(int(s), t)
    horizon = len(history) - 1
    return [
        DecisionReport("yes", witness_time=first[q]) if q in first
        else DecisionReport("unknown", note=f"not reached within {horizon} steps")
        for q in range(n_states)
    ]


def stabilization_bound(size: int) -> int:
    """Steps after which cell 0 of a zigzag configuration of total size L is frozen."""
    return 9 * size * size + 10 * size + 10


def zigzag_size(c: BiPeriodicConfig) -> int:
    """L = |left| + |mid| + |right|, with the middle extended to cover cell 0."""
    e = c.expanded()
    return len(e.left) + len(e.mid) + len(e.right)


def zigzag_case(alpha: ZigzagAlphabet, c: BiPeriodicConfig) -> str:
    """Which structural situation cell 0 is in (reported, not used for the verdict)."""
    e = c.expanded()
    pl, pr = len(e.left), len(e.right)
    lo, hi = -e.origin - 3 * pl - 1, len(e.mid) - e.origin + 3 * pr
    cells = [alpha.decode(int(s)) for s in e.window(lo, hi)]
    if any(s.tag == "e" for s in cells) or any(
        _forbidden(a, b) for a, b in zip(cells, cells[1:])
    ):
        return "invalid"

    def in_zone(s):
        return alpha.decode(int(s)).tag == "q"

    if not in_zone(e[0]):
        return "outside-zone"
    first_left, first_right = -e.origin - 1, len(e.mid) - e.origin
    k = 0
    while k > first_left and in_zone(e[k]):
        k -= 1
    j = 0
    while j < first_right and in_zone(e[j]):
        j += 1
    if (k == first_left and all(map(in_zone, e.left))) or (
        j == first_right and all(map(in_zone, e.right))
    ):
        return "infinite-zone"
    return "finite-zone"


def ubpred_zigzag(inner: CARule, c: BiPeriodicConfig, q: int,
                  zz: CARule | None = None) -> DecisionReport:
    """Exact reachability for the zigzag wrapper of ``inner``.

    Cell 0 is frozen after :func:`stabilization_bound` steps, so its light
    cone is evolved for that many steps and every state it takes is recorded.
    """
    reports = ubpred_zigzag_all(inner, c, zz)
    if not 0 <= q < len(reports):
        raise InputError(f"state {q} out of range")
    return reports[q]


def ubpred_zigzag_all(inner: CARule, c: BiPeriodicConfig,
                      zz: CARule | None = None) -> list[DecisionReport]:
    """:func:`ubpred_zigzag` for every state, from a single light-cone run."""
    from .constructions import zigzag

    if inner.dimension != 1 or inner.radius != 1:
        raise InputError("inner rule must be 1D with radius 1")
    zz = zz or zigzag(inner)
    alpha = ZigzagAlphabet(inner.states)
    if len(alpha) != zz.n_states:
        raise InputError("alphabet mismatch between inner rule and zigzag rule")
    c.check_alphabet(zz.n_states)
    size = zigzag_size(c)
    horizon = stabilization_bound(size)
    seen = cell_zero_history(zz, c, horizon)
    note = f"L={size} horizon={horizon} case={zigzag_case(alpha, c)}"
    states, first = np.unique(seen, return_index=True)
    when = dict(zip(states.tolist(), first.tolist()))
    return [
        DecisionReport("yes", witness_time=when[q], note=note) if q in when
        else DecisionReport("no", note=note)
        for q in range(zz.n_states)
    ]


def cell_zero_history(rule: CARule, c: BiPeriodicConfig, steps: int) -> np.ndarray:
    """States of cell 0 at times ``0..steps``, evolved on the light cone only."""
    r = rule.radius
    cells = c.window(-r * steps, r * steps)
    out = np.empty(steps + 1, dtype=np.int64)
    mid = r * steps
    out[0] = cells[mid]
    for t in range(1, steps + 1):
        cells = shrink_step(rule, cells)
        out[t] = cells[(cells.shape[0] - 1) // 2]
    return out


def cycle_structure(rule: CARule, c: PeriodicConfig, max_orbit: int = MAX_ORBIT):
    """``(transient, cycle_length)`` of the orbit of ``c`` on its torus."""
    if c.dimension != rule.dimension:
        raise InputError("dimension mismatch")
    c.check_alphabet(rule.n_states)
    seen: dict[bytes, int] = {}
    cells = c.cells
    t = 0
    while True:
        key = cells.tobytes()
        if key in seen:
            first = seen[key]
            return first, t - first
        if len(seen) >= max_orbit:
            raise ResourceError(f"no repeat within {max_orbit} configurations", progress=t)
        seen[key] = t
        cells = torus_step(rule, cells)
        t += 1


_FACTOR = re.compile(r"^(?:(\d+)|n(?:\^(\d+))?|2\^n)$")


@dataclass(frozen=True)
class PhiSpec:
    """A product of factors: integer constants, ``n``, ``n^k`` (k <= 6), ``2^n``."""

    text: str

    def __post_init__(self):
        for factor in self._factors():
            m = _FACTOR.match(factor)
            if not m:
                raise InputError(f"bad phi factor {factor!r}")
            if m.group(2) is not None and not 1 <= int(m.group(2)) <= 6:
                raise InputError("exponent of n must be between 1 and 6")

    def _factors(self):
        parts = [p.strip() for p in self.text.replace(" ", "").split("*")]
        if not parts or any(not p for p in parts):
            raise InputError(f"bad phi expression {self.text!r}")
        return parts

    def __call__(self, n: int) -> int:
        value = 1
        for factor in self._factors():
            m = _FACTOR.match(factor)
            if m.group(1) is not None:
                value *= int(m.group(1))
            elif factor == "2^n":
                value *= 2**n
            else:
                value *= n ** int(m.group(2) or 1)
        if value < 1:
            raise InputError(f"phi({n}) = {value} is below 1")
        return value


def cycle_gt_phi(rule: CARule, c: PeriodicConfig, phi: PhiSpec,
                 max_orbit: int = MAX_ORBIT) -> DecisionReport:
    """Is the temporal cycle reached from ``c`` longer than phi(n)?"""
    period = c.period
    if len(set(period)) != 1:
        raise InputError(f"period {period} is not n x n")
    n = period[0]
    transient, cycle = cycle_structure(rule, c, max_orbit)
    bound = phi(n)
    verdict = "yes" if cycle > bound else "no"
    return DecisionReport(verdict, transient=transient, cycle=cycle, note=f"phi({n})={bound}")


def column_language(rule: CARule, n: int, k: int, limit: int = TABLE_LIMIT) -> set:
    """All length-``k`` column words of width ``n`` (cells 1..n) in space-time diagrams.

    Each word is a tuple of ``k`` tuples of ``n`` states.
    """
    if rule.dimension != 1:
        raise InputError("column factors are defined for 1D rules")
    if n < 1 or k < 1:
        raise InputError("width and depth must be positive")
    r = rule.radius
    width = n + 2 * r * (k - 1)
    count = rule.n_states**width
    if count > limit:
        raise ResourceError(f"{count} initial windows exceed budget {limit}")
    cells = all_windows(rule.n_states, width)
    rows = []
    for t in range(k):
        off = r * (k - 1 - t)
        rows.append(cells[:, off: off + n])
        if t < k - 1:
            cells = shrink_step(rule, cells)
    words = np.concatenate(rows, axis=1)
    uniq = np.unique(words, axis=0)
    return {tuple(tuple(int(s) for s in row[j * n:(j + 1) * n]) for j in range(k)) for row in uniq}
