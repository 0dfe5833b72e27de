"""Binary PGM rendering of space-time diagrams and 2D frames."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import BiPeriodicConfig, PeriodicConfig
from .engine import MAX_CELLS, step, torus_step
from .errors import InputError, ResourceError
from .rule import CARule


@dataclass(frozen=True)
class RenderSpec:
    n_states: int
    time_up: bool = False

    def gray(self) -> np.ndarray:
        """Gray level of each state: floor(255 i / (|Q| - 1)), or 0 for a single state."""
        if self.n_states == 1:
            return np.zeros(1, dtype=np.uint8)
        i = np.arange(self.n_states, dtype=np.int64)
        return (255 * i // (self.n_states - 1)).astype(np.uint8)


def pgm(pixels: np.ndarray) -> bytes:
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    h, w = pixels.shape
    return b"P5\n%d %d\n255\n" % (w, h) + pixels.tobytes()


def read_pgm(data: bytes) -> np.ndarray:
    parts = data.split(maxsplit=4)
    if len(parts) < 5 or parts[0] != b"P5" or parts[3] != b"255":
        raise InputError("not an 8-bit binary PGM")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4], dtype=np.uint8, count=w * h).reshape(h, w)


def spacetime(rule: CARule, c, steps: int, lo: int | None = None, hi: int | None = None,
              max_cells: int = MAX_CELLS) -> np.ndarray:
    """Rows of state indices at times ``0..steps`` (row t is time t).

    Periodic configurations render one full period; bi-periodic ones render
    cells ``lo..hi``, by default the explicit part widened by ``r * steps``.
    """
    if rule.dimension != 1:
        raise InputError("space-time diagrams need a 1D rule")
    if steps < 0:
        raise InputError("negative step count")
    if isinstance(c, PeriodicConfig):
        if (steps + 1) * c.cells.size > max_cells:
            raise ResourceError("diagram too large")
        c.check_alphabet(rule.n_states)
        rows = [c.cells]
        for _ in range(steps):
            rows.append(torus_step(rule, rows[-1]))
        return np.stack(rows)
    if not isinstance(c, BiPeriodicConfig):
        raise InputError(f"cannot render {type(c).__name__}")
    c.check_alphabet(rule.n_states)
    if lo is None or hi is None:
        a, b = c.span()
        pad = rule.radius * steps
        lo = a - pad if lo is None else lo
        hi = b + pad if hi is None else hi
    if hi < lo:
        raise InputError("empty cell range")
    if (steps + 1) * (hi - lo + 1) > max_cells:
        raise ResourceError("diagram too large")
    rows = [c.window(lo, hi)]
    for _ in range(steps):
        c = step(rule, c)
        rows.append(c.window(lo, hi))
    return np.stack(rows)


def render_spacetime(rule: CARule, c, steps: int, time_up: bool = False,
                     lo: int | None = None, hi: int | None = None) -> bytes:
    rows = spacetime(rule, c, steps, lo, hi)
    spec = RenderSpec(rule.n_states, time_up)
    if time_up:
        rows = rows[::-1]
    return pgm(spec.gray()[rows])


def render_frames(rule: CARule, c: PeriodicConfig, steps: int) -> list[bytes]:
    """One PGM per time step ``0..steps`` of a 2D periodic configuration."""
    if rule.dimension != 2 or not isinstance(c, PeriodicConfig) or c.dimension != 2:
        raise InputError("frames need a 2D rule and a 2D periodic configuration")
    c.check_alphabet(rule.n_states)
    gray = RenderSpec(rule.n_states).gray()
    cells = c.cells
    out = [pgm(gray[cells])]
    for _ in range(steps):
        cells = torus_step(rule, cells)
        out.append(pgm(gray[cells]))
    return out
