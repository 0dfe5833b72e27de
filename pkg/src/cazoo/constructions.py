"""Builders for the concrete automata: rule 110, the zigzag shrinking-zone
wrapper, the symmetric signed majority CA, and small test rules."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InputError
from .rule import CARule

LINE = ((-1,), (0,), (1,))
VON_NEUMANN = ((0, 0), (0, 1), (1, 0), (0, -1), (-1, 0))


def rule110() -> CARule:
    def delta(w):
        x, y, z = w
        return (1 - x * y * z) * max(y, z)

    return CARule.from_function(1, ("0", "1"), LINE, delta, name="rule110")


def identity(states=("0", "1")) -> CARule:
    return CARule.from_function(1, states, LINE, lambda w: w[1], name="identity")


def shift(states=("0", "1")) -> CARule:
    return CARule.from_function(1, states, ((1,),), lambda w: w[0], name="shift")


def negation() -> CARule:
    return CARule.from_function(1, ("0", "1"), ((0,),), lambda w: 1 - w[0], name="not")


def or_spread() -> CARule:
    return CARule.from_function(1, ("0", "1"), LINE, max, name="or-spread")


def xor() -> CARule:
    return CARule.from_function(1, ("0", "1"), LINE, lambda w: sum(w) % 2, name="xor")


def toy_rules() -> dict[str, CARule]:
    return {
        "identity": identity(),
        "shift": shift(),
        "not": negation(),
        "or_spread": or_spread(),
        "xor": xor(),
    }


# -- zigzag --------------------------------------------------------------

MODES = ("<", ">", "l", "r")  # head moving left, head moving right, left of head, right of head
LEFT, RIGHT, L, R = range(4)
B, BPLUS, E = 0, 1, 2


class ZigzagState(NamedTuple):
    tag: str  # "b", "b+", "e" or "q"
    x: int | None = None
    y: int | None = None
    mode: int | None = None


class ZigzagAlphabet:
    """Index layout ``b, b+, e`` then ``(x, y, mode)`` with x major and mode minor."""

    def __init__(self, inner_states):
        self.inner = tuple(inner_states)
        self.q = len(self.inner)

    def __len__(self):
        return 3 + 4 * self.q * self.q

    def encode(self, x, y, mode) -> int:
        return 3 + (x * self.q + y) * 4 + mode

    def decode(self, s: int) -> ZigzagState:
        if s < 3:
            return ZigzagState(("b", "b+", "e")[s])
        x, rest = divmod(s - 3, 4 * self.q)
        y, mode = divmod(rest, 4)
        return ZigzagState("q", x, y, mode)

    def names(self) -> tuple[str, ...]:
        sep = "" if all(len(n) == 1 for n in self.inner) else ":"
        out = ["b", "b+", "e"]
        for x in self.inner:
            for y in self.inner:
                out.extend(f"{m}{sep}{x}{sep}{y}" for m in MODES)
        return tuple(out)


def _is_head(mode):
    return mode in (LEFT, RIGHT)


def _forbidden(p: ZigzagState, q: ZigzagState) -> bool:
    if p.tag != "q" or q.tag != "q":
        return False
    a, b = p.mode, q.mode
    return (
        (a == R and b == L)
        or (a == L and b == R)
        or (_is_head(a) and _is_head(b))
        or (a == R and _is_head(b))
        or (_is_head(a) and b == L)
    )


def zigzag(inner: CARule) -> CARule:
    """The shrinking-zone wrapper around a 1D radius-1 rule.

    Rules are tried in priority order: error spreading, forbidden-pair
    detection, blank dynamics, head movement, then "unchanged".
    """
    if inner.dimension != 1 or inner.radius != 1:
        raise InputError("zigzag needs a 1D radius-1 inner rule")
    if inner.neighborhood != LINE:
        inner = _over_line(inner)
    table = inner.to_table()
    q = inner.n_states
    alpha = ZigzagAlphabet(inner.states)

    def delta(a, b, c):
        return int(table[(a * q + b) * q + c])

    def enc(x, y, m):
        return alpha.encode(x, y, m)

    def local(w):
        a, c, d = (alpha.decode(s) for s in w)
        center = w[1]
        if "e" in (a.tag, c.tag, d.tag):
            return E
        if _forbidden(a, c) or _forbidden(c, d):
            return E
        if c.tag in ("b", "b+"):
            return B
        x, y, m = c.x, c.y, c.mode
        am = a.mode if a.tag == "q" else None
        dm = d.mode if d.tag == "q" else None
        # inside a zone
        if am == L and m == LEFT and dm == R:
            return enc(x, y, R)
        if am == L and m == L and dm == LEFT:
            return enc(x, y, LEFT)
        if am == L and m == RIGHT and dm == R:
            return enc(x, y, L)
        if am == RIGHT and m == R and dm == R:
            return enc(delta(a.y, x, d.x), x, RIGHT)
        # bounces at zone boundaries
        if a.tag == "b":
            if m == L and dm == LEFT:
                return enc(x, y, LEFT)
            if m == LEFT and dm == R:
                return enc(x, y, RIGHT)
            if m == RIGHT and dm == R:
                return enc(y, x, L)
            if m == L and dm == RIGHT:
                return BPLUS
        if d.tag == "b":
            if am == RIGHT and m == R:
                return enc(x, y, RIGHT)
            if am == L and m == RIGHT:
                return enc(x, y, LEFT)
            if am == L and m == LEFT:
                return enc(x, y, R)
            if am == LEFT and m == R:
                return BPLUS
        if a.tag in ("b", "b+") and d.tag in ("b", "b+") and _is_head(m):
            return enc(x, y, R)
        return center

    return CARule.from_function(1, alpha.names(), LINE, local, name=f"zigzag:{inner.name}")


def _over_line(rule: CARule) -> CARule:
    """Re-express a radius-1 rule over the neighborhood (-1, 0, 1)."""
    picks = [LINE.index(v) for v in rule.neighborhood]
    return CARule.from_function(
        1, rule.states, LINE, lambda w: rule_at(rule, [w[k] for k in picks]), name=rule.name
    )


def rule_at(rule: CARule, window) -> int:
    idx = 0
    for s in window:
        idx = idx * rule.n_states + s
    return int(rule.to_table()[idx])


# -- symmetric signed majority ------------------------------------------

_OPPOSITE = (0, 3, 4, 1, 2)


class SignedMajorityState(NamedTuple):
    inner: int  # +1 or -1
    signs: tuple[int, ...]  # one sign per von Neumann offset, in neighborhood order


def sm_encode(inner: int, signs) -> int:
    bits = sum(1 << k for k, s in enumerate(signs) if s > 0)
    return (1 if inner > 0 else 0) + 2 * bits


def sm_decode(s: int) -> SignedMajorityState:
    return SignedMajorityState(1 if s & 1 else -1,
                               tuple(1 if (s >> (k + 1)) & 1 else -1 for k in range(5)))


def _sm_names():
    out = []
    for s in range(64):
        st = sm_decode(s)
        sign = lambda v: "+" if v > 0 else "-"  # noqa: E731
        out.append(sign(st.inner) + ":" + "".join(sign(v) for v in st.signs))
    return tuple(out)


def _sign_of(states, k):
    return np.where((states >> (k + 1)) & 1, 1, -1)


def sm_weighted_sum(neigh: np.ndarray) -> np.ndarray:
    """The deciding sum of w(z,z') I(c_z') over the neighborhood, per cell."""
    center = neigh[0]
    total = np.zeros(center.shape, dtype=np.int64)
    for k in range(5):
        w = _sign_of(center, k) * _sign_of(neigh[k], _OPPOSITE[k])
        total += w * np.where(neigh[k] & 1, 1, -1)
    return total


def signed_majority() -> CARule:
    def local(neigh):
        total = sm_weighted_sum(neigh)
        return (neigh[0] & ~1) | (total > 0)

    return CARule(2, _sm_names(), VON_NEUMANN, local=local, name="signed-majority")


# -- registry -------------------------------------------------------------

def builtin(name: str, resolve=None) -> CARule:
    """Look up a builtin rule by registry name.

    ``zigzag:<inner>`` wraps ``<inner>``, which is resolved with ``resolve``
    (defaults to this function) so callers can also accept rule files.
    """
    resolve = resolve or builtin
    if name.startswith("zigzag:"):
        return zigzag(resolve(name[len("zigzag:"):]))
    simple = {
        "rule110": rule110,
        "signed-majority": signed_majority,
        "identity": identity,
        "shift": shift,
        "not": negation,
        "or-spread": or_spread,
        "xor": xor,
    }
    if name in simple:
        return simple[name]()
    if name in ("wire", "wire-one-shot"):
        from .circuits import wire_ca

        return wire_ca(one_shot=name == "wire-one-shot")
    raise InputError(f"unknown builtin rule {name!r}")


BUILTIN_NAMES = ("rule110", "zigzag:<inner>", "signed-majority", "identity", "shift", "not",
                 "or-spread", "xor", "wire", "wire-one-shot")
