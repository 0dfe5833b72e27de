"""Block recoding, rescaling and cell-wise restriction/projection checks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .config import PeriodicConfig
from .engine import shrink_step
from .errors import InputError, ResourceError
from .report import DecisionReport
from .rule import TABLE_LIMIT, CARule, all_windows


@dataclass(frozen=True)
class BlockShape:
    m: tuple[int, ...]
    t: int = 1

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if not self.m or any(x < 1 for x in self.m) or self.t < 1:
            raise InputError(f"invalid block shape m={self.m} t={self.t}")

    @property
    def size(self) -> int:
        return math.prod(self.m)


@dataclass(frozen=True)
class SimulationWitness:
    """Sub-alphabet of the host (block) alphabet and its projection onto the guest states."""

    shape: BlockShape
    projection: dict[int, int] = field(hash=False)

    @property
    def sub_alphabet(self) -> tuple[int, ...]:
        return tuple(sorted(self.projection))


# -- bloc recoding ---------------------------------------------------------

def encode_digits(digits: np.ndarray, n_states: int) -> np.ndarray:
    """Pack the last axis (block components, first component most significant)."""
    out = np.zeros(digits.shape[:-1], dtype=np.int64)
    for k in range(digits.shape[-1]):
        out = out * n_states + digits[..., k]
    return out


def decode_digits(symbols: np.ndarray, n_states: int, size: int) -> np.ndarray:
    symbols = np.asarray(symbols, dtype=np.int64)
    out = np.empty(symbols.shape + (size,), dtype=np.int64)
    rest = symbols.copy()
    for k in range(size - 1, -1, -1):
        out[..., k] = rest % n_states
        rest //= n_states
    return out


def _to_blocks(cells: np.ndarray, m: tuple[int, ...]) -> np.ndarray:
    """Array of block component tuples, last axis in bloc order (first coordinate fastest)."""
    lead = cells.ndim - len(m)
    shape = cells.shape[lead:]
    if any(s % k for s, k in zip(shape, m)):
        raise InputError(f"extent {shape} not divisible by block shape {m}")
    split = cells.shape[:lead]
    for s, k in zip(shape, m):
        split += (s // k, k)
    x = cells.reshape(split)
    d = len(m)
    block_axes = [lead + 2 * i for i in range(d)]
    inner_axes = [lead + 2 * i + 1 for i in reversed(range(d))]
    x = x.transpose(list(range(lead)) + block_axes + inner_axes)
    return x.reshape(x.shape[: lead + d] + (math.prod(m),))


def _from_blocks(digits: np.ndarray, m: tuple[int, ...]) -> np.ndarray:
    d = len(m)
    lead = digits.ndim - 1 - d
    grid = digits.shape[lead: lead + d]
    x = digits.reshape(digits.shape[: lead + d] + tuple(reversed(m)))
    # axes: lead..., B1..Bd, i_d..i_1 -> lead..., B1, i_1, B2, i_2, ...
    order = list(range(lead))
    for i in range(d):
        order += [lead + i, lead + d + (d - 1 - i)]
    x = x.transpose(order)
    return x.reshape(digits.shape[:lead] + tuple(g * k for g, k in zip(grid, m)))


def block_encode(c: PeriodicConfig, m, n_states: int) -> PeriodicConfig:
    m = tuple(m)
    if len(m) != c.dimension:
        raise InputError("block shape arity does not match dimension")
    return PeriodicConfig(encode_digits(_to_blocks(c.cells, m), n_states))


def block_decode(c: PeriodicConfig, m, n_states: int) -> PeriodicConfig:
    m = tuple(m)
    digits = decode_digits(c.cells, n_states, math.prod(m))
    return PeriodicConfig(_from_blocks(digits, m))


def block_names(states, size: int) -> tuple[str, ...]:
    return tuple("(" + ",".join(t) + ")" for t in itertools.product(states, repeat=size))


# -- rescaling ---------------------------------------------------------------

def rescale(rule: CARule, shape: BlockShape, limit: int = TABLE_LIMIT) -> CARule:
    """The block CA whose one step is ``t`` steps of ``rule`` read through bloc_m."""
    if len(shape.m) != rule.dimension:
        raise InputError("block shape arity does not match rule dimension")
    if all(x == 1 for x in shape.m) and shape.t == 1:
        return rule
    size = shape.size
    q = rule.n_states
    n_block = q**size
    R = math.ceil(rule.radius * shape.t / min(shape.m))
    hood = tuple(itertools.product(range(-R, R + 1), repeat=rule.dimension))
    n_win = n_block ** len(hood)
    if n_win > limit:
        raise ResourceError(f"rescaled table needs {n_win} entries, limit is {limit}")
    wins = all_windows(n_block, len(hood))
    side = 2 * R + 1
    # window of blocks (lexicographic offsets) -> grid of blocks -> grid of cells
    grid = wins.reshape((n_win,) + (side,) * rule.dimension)
    cells = _from_blocks(decode_digits(grid, q, size), shape.m)
    for _ in range(shape.t):
        cells = shrink_step(rule, cells)
    cut = rule.radius * shape.t
    sl = tuple(slice(R * k - cut, R * k - cut + k) for k in shape.m)
    center = cells[(slice(None),) + sl]
    table = encode_digits(_to_blocks(center, shape.m), q).reshape(n_win)
    return CARule(rule.dimension, block_names(rule.states, size), hood, table=table,
                  name=f"{rule.name}[{','.join(map(str, shape.m))};{shape.t}]")


# -- restriction and projection ------------------------------------------------

def _check_projection(guest: CARule, host: CARule, projection: dict[int, int]):
    if guest.dimension != host.dimension:
        raise InputError("guest and host dimensions differ")
    if not projection:
        raise InputError("empty projection")
    for a, b in projection.items():
        if not 0 <= a < host.n_states:
            raise InputError(f"host state {a} out of range")
        if not 0 <= b < guest.n_states:
            raise InputError(f"guest state {b} out of range")
    if set(projection.values()) != set(range(guest.n_states)):
        raise InputError("projection is not surjective onto the guest alphabet")


def check_subproj(guest: CARule, host: CARule, projection: dict[int, int],
                  limit: int = TABLE_LIMIT) -> DecisionReport:
    """Is ``guest`` obtained from ``host`` by restricting to ``projection``'s domain and projecting?

    Checks closure of the sub-alphabet and commutation exhaustively over
    windows on the union of both neighborhoods.
    """
    _check_projection(guest, host, projection)
    sub = np.array(sorted(projection), dtype=np.int64)
    union = tuple(sorted(set(guest.neighborhood) | set(host.neighborhood)))
    n = len(sub) ** len(union)
    if n > limit:
        raise ResourceError(f"{n} windows to check, limit is {limit}")
    pos = {v: k for k, v in enumerate(union)}
    wins = sub[all_windows(len(sub), len(union))]
    image = host.evaluate(wins[:, [pos[v] for v in host.neighborhood]].T)
    pi = np.full(host.n_states, -1, dtype=np.int64)
    pi[sub] = [projection[s] for s in sub.tolist()]
    escaped = pi[image] < 0
    if escaped.any():
        k = int(np.argmax(escaped))
        return DecisionReport("no", note="sub-alphabet not closed",
                              counterexample=_window_dict(union, wins[k]))
    expect = guest.evaluate(pi[wins[:, [pos[v] for v in guest.neighborhood]]].T)
    bad = pi[image] != expect
    if bad.any():
        k = int(np.argmax(bad))
        return DecisionReport("no", note="projection does not commute",
                              counterexample=_window_dict(union, wins[k]))
    return DecisionReport("yes", note=f"checked {n} windows")


def _window_dict(offsets, states):
    return {v: int(s) for v, s in zip(offsets, states)}


def check_simulation(guest: CARule, guest_shape: BlockShape, host: CARule,
                     host_shape: BlockShape, projection: dict[int, int],
                     limit: int = TABLE_LIMIT) -> DecisionReport:
    """Two-sided check: rescaled guest is a restriction/projection of rescaled host."""
    return check_subproj(rescale(guest, guest_shape, limit), rescale(host, host_shape, limit),
                         projection, limit)


def iter_shapes(dimension: int, m_max: int, t_max: int):
    """Shapes in lexicographic order of (m, t)."""
    for m in itertools.product(range(1, m_max + 1), repeat=dimension):
        for t in range(1, t_max + 1):
            yield BlockShape(m, t)


def search_strong_simulation(guest: CARule, host: CARule, m_max: int, t_max: int,
                             limit: int = TABLE_LIMIT):
    """First witness of ``guest`` ⊑ ``host``^[m,t] with m <= m_max, t <= t_max.

    Returns ``(witness or None, report)``.  Shapes whose rescaled table
    exceeds ``limit`` are skipped and listed in the report.
    """
    if guest.n_states > 3:
        raise InputError("search supports guests with at most 3 states")
    if guest.dimension != host.dimension:
        raise InputError("guest and host dimensions differ")
    skipped, exhausted = [], []
    for shape in iter_shapes(guest.dimension, m_max, t_max):
        try:
            block = rescale(host, shape, limit)
        except ResourceError:
            skipped.append(shape)
            continue
        pi = _search_projection(guest, block, limit)
        if pi is not None:
            w = SimulationWitness(shape, pi)
            return w, DecisionReport("yes", note=f"shape m={shape.m} t={shape.t}")
        exhausted.append(shape)
    verdict = "unknown" if skipped else "no"
    note = f"exhausted {len(exhausted)} shapes"
    if skipped:
        note += "; skipped (resource limit): " + " ".join(f"m={s.m},t={s.t}" for s in skipped)
    return None, DecisionReport(verdict, note=note)


def _search_projection(guest: CARule, block: CARule, limit: int):
    """Backtracking over pi(state) in {0..|Q_F|-1, excluded}, with forced-image propagation."""
    n_host, n_guest = block.n_states, guest.n_states
    union = tuple(sorted(set(guest.neighborhood) | set(block.neighborhood)))
    pos = {v: k for k, v in enumerate(union)}
    host_idx = [pos[v] for v in block.neighborhood]
    guest_idx = [pos[v] for v in guest.neighborhood]
    if block.n_states ** len(block.neighborhood) > limit:
        raise ResourceError("host block table too large for search")
    host_table = block.to_table(limit)
    guest_table = guest.to_table()
    q_host, q_guest = n_host, n_guest
    EXCLUDED = -1
    UNSET = -2

    def host_image(win):
        idx = 0
        for k in host_idx:
            idx = idx * q_host + win[k]
        return int(host_table[idx])

    def guest_image(gwin):
        idx = 0
        for k in guest_idx:
            idx = idx * q_guest + gwin[k]
        return int(guest_table[idx])

    pi = [UNSET] * n_host
    width = len(union)

    def propagate(state, trail) -> bool:
        """Check every window over included states whose first occurrence of
        ``state`` is at some position; images of unset states are forced."""
        included = [s for s in range(n_host) if pi[s] >= 0]
        for at in range(width):
            for rest in itertools.product(included, repeat=width - 1):
                if state in rest[:at]:
                    continue
                win = rest[:at] + (state,) + rest[at:]
                img = host_image(win)
                want = guest_image([pi[s] for s in win])
                cur = pi[img]
                if cur == UNSET:
                    pi[img] = want
                    trail.append(img)
                elif cur != want:
                    return False
        return True

    def assign(state, value):
        """Assign and propagate to a fixpoint; returns the undo trail or None."""
        pi[state] = value
        trail = [state]
        if value == EXCLUDED:
            return trail
        done = 0
        while done < len(trail):
            s = trail[done]
            done += 1
            if not propagate(s, trail):
                for t in trail:
                    pi[t] = UNSET
                return None
        return trail

    def search(k):
        while k < n_host and pi[k] != UNSET:
            k += 1
        covered = {v for v in pi if v >= 0}
        free = pi.count(UNSET)
        if n_guest - len(covered) > free:
            return False
        if k == n_host:
            return len(covered) == n_guest
        for value in list(range(n_guest)) + [EXCLUDED]:
            trail = assign(k, value)
            if trail is None:
                continue
            if search(k + 1):
                return True
            for t in trail:
                pi[t] = UNSET
        return False

    if search(0):
        return {s: v for s, v in enumerate(pi) if v >= 0}
    return None
