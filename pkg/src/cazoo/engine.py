"""Exact stepping on periodic, bi-periodic and finite-window configurations."""

from __future__ import annotations

import numpy as np

from .config import BiPeriodicConfig, FinitePattern, PeriodicConfig
from .errors import InputError, ResourceError
from .rule import CARule

#: Default cap on explicit cells held while tracing a bi-periodic orbit.
MAX_CELLS = 10**7


def torus_step(rule: CARule, cells: np.ndarray) -> np.ndarray:
    """One step on the last ``rule.dimension`` axes of ``cells``, wrapping around."""
    d = rule.dimension
    axes = tuple(range(cells.ndim - d, cells.ndim))
    neigh = np.stack([np.roll(cells, tuple(-x for x in v), axis=axes) for v in rule.neighborhood])
    return rule.evaluate(neigh)


def shrink_step(rule: CARule, cells: np.ndarray) -> np.ndarray:
    """One step of the finite-pattern action: the last ``d`` axes shrink by ``r`` per side.

    Leading axes are treated as a batch.
    """
    d, r = rule.dimension, rule.radius
    shape = cells.shape[-d:]
    if any(s <= 2 * r for s in shape):
        raise InputError(f"pattern of extent {shape} too small for radius {r}")
    lead = (slice(None),) * (cells.ndim - d)
    layers = []
    for v in rule.neighborhood:
        sl = tuple(slice(r + x, s - r + x) for x, s in zip(v, shape))
        layers.append(cells[lead + sl])
    return rule.evaluate(np.stack(layers))


def _check_dim(rule: CARule, c):
    if c.dimension != rule.dimension:
        raise InputError(f"configuration is {c.dimension}D but rule is {rule.dimension}D")


def step_periodic(rule: CARule, c: PeriodicConfig) -> PeriodicConfig:
    _check_dim(rule, c)
    c.check_alphabet(rule.n_states)
    return PeriodicConfig(torus_step(rule, c.cells))


def evolve_window(rule: CARule, u: FinitePattern, t: int) -> FinitePattern:
    """Image of ``u`` (over B(n + r t)) after ``t`` steps, a pattern over B(n)."""
    _check_dim(rule, u)
    if t < 0:
        raise InputError("negative step count")
    if u.n < rule.radius * t:
        raise InputError(f"support radius {u.n} too small for {t} steps at radius {rule.radius}")
    if u.cells.max() >= rule.n_states:
        raise InputError(f"state index {int(u.cells.max())} out of range")
    cells = u.cells
    for _ in range(t):
        cells = shrink_step(rule, cells)
    return FinitePattern(cells)


def step_biperiodic(rule: CARule, c: BiPeriodicConfig) -> BiPeriodicConfig:
    """F(c), keeping tail periods; the middle grows by at most ``r`` per side."""
    if rule.dimension != 1:
        raise InputError("bi-periodic configurations are 1D only")
    r = rule.radius
    left, right = c.left, c.right
    pl, pr, m = len(left), len(right), len(c.mid)
    # source covers one tail period plus 2r cells beyond the middle on each side
    need_l, need_r = pl + 2 * r, pr + 2 * r
    ext_l = (left * (need_l // pl + 1))[-need_l:]
    ext_r = (right * (need_r // pr + 1))[:need_r]
    img = shrink_step(rule, np.array(ext_l + c.mid + ext_r, dtype=np.int64)).tolist()
    # img[k] is the image of source cell k + r; the middle image starts at pl
    return BiPeriodicConfig._trusted(
        tuple(img[:pl]), tuple(img[pl:pl + m + 2 * r]), tuple(img[pl + m + 2 * r:]), c.origin + r
    ).canonical()


def step(rule: CARule, c):
    if isinstance(c, PeriodicConfig):
        return step_periodic(rule, c)
    if isinstance(c, BiPeriodicConfig):
        return step_biperiodic(rule, c)
    if isinstance(c, FinitePattern):
        return evolve_window(rule, c, 1)
    raise InputError(f"unsupported configuration type {type(c).__name__}")


def orbit(rule: CARule, c, steps: int):
    """Yield ``c, F(c), ..., F^steps(c)``."""
    yield c
    for _ in range(steps):
        c = step(rule, c)
        yield c


def trace(rule: CARule, c, cell, steps: int, max_cells: int = MAX_CELLS) -> list[int]:
    """States of ``cell`` at times ``0..steps``."""
    if steps < 0:
        raise InputError("negative horizon")
    if isinstance(c, FinitePattern):
        raise InputError("trace needs a configuration, not a finite pattern")
    out = [c[cell]]
    absorbing = rule.absorbing
    for t in range(steps):
        if out[-1] in absorbing:
            out += [out[-1]] * (steps - t)
            break
        nxt = step(rule, c)
        if isinstance(nxt, BiPeriodicConfig):
            if nxt.size > max_cells:
                raise ResourceError(f"explicit size {nxt.size} exceeds budget at time {t + 1}",
                                    progress=t + 1)
            if (nxt.left, nxt.mid, nxt.right) == (c.left, c.mid, c.right):
                # F(c) is c translated by d cells, so F^j(c)_z = c_(z + j d) from here on
                d = nxt.origin - c.origin
                out += [c[cell + j * d] for j in range(1, steps - t + 1)]
                break
        c = nxt
        out.append(c[cell])
    return out
