"""Boolean gate blocks and checkers for transient / repeatable circuit simulation.

Sides are indexed 0..3 in the order north, east, south, west.  Value
tuples ``(n, e, s, w)`` follow the same order.  In array coordinates north
is row ``-1`` and west is column ``-1``.

The checkers run over finite surrogates of valid configurations (tori and
blank-padded rectangles), so a ``yes`` is evidence, not a proof.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .config import PeriodicConfig
from .constructions import VON_NEUMANN
from .engine import torus_step
from .errors import InputError
from .report import DecisionReport
from .rule import CARule

NORTH, EAST, SOUTH, WEST = range(4)
SIDE_NAMES = ("north", "east", "south", "west")
# (row, col) step towards each side
SIDE_STEP = ((-1, 0), (0, 1), (1, 0), (0, -1))

Bits = tuple[int, int, int, int]
ZERO: Bits = (0, 0, 0, 0)


@dataclass(frozen=True)
class GateType:
    kind: str
    i: int | None = None
    o: int | None = None

    def __post_init__(self):
        if self.kind == "WIRE":
            if self.i is None or self.o is None or self.i == self.o or not (
                0 <= self.i < 4 and 0 <= self.o < 4
            ):
                raise InputError(f"WIRE needs distinct sides in 0..3, got {self.i}, {self.o}")
        elif self.kind not in ("AND", "OR", "CROSS", "NOP", "FORK"):
            raise InputError(f"unknown gate {self.kind!r}")
        elif self.i is not None or self.o is not None:
            raise InputError(f"{self.kind} takes no side indices")

    @property
    def name(self) -> str:
        return f"WIRE_{self.i}_{self.o}" if self.kind == "WIRE" else self.kind

    @classmethod
    def parse(cls, name: str) -> "GateType":
        if name.startswith("WIRE_"):
            parts = name.split("_")
            if len(parts) != 3 or not all(p.isdigit() for p in parts[1:]):
                raise InputError(f"bad wire gate name {name!r}")
            return cls("WIRE", int(parts[1]), int(parts[2]))
        return cls(name)

    @property
    def inputs(self) -> frozenset[int]:
        return frozenset({
            "AND": (NORTH, WEST), "OR": (NORTH, WEST), "CROSS": (NORTH, WEST),
            "NOP": (0, 1, 2, 3), "FORK": (WEST,), "WIRE": (self.i,),
        }[self.kind])

    @property
    def outputs(self) -> frozenset[int]:
        return frozenset({
            "AND": (EAST,), "OR": (EAST,), "CROSS": (EAST, SOUTH),
            "NOP": (0, 1, 2, 3), "FORK": (EAST, SOUTH), "WIRE": (self.o,),
        }[self.kind])

    def __str__(self):
        return self.name


GATES: tuple[GateType, ...] = (
    GateType("AND"), GateType("OR"), GateType("CROSS"), GateType("NOP"), GateType("FORK"),
) + tuple(GateType("WIRE", i, o) for i in range(4) for o in range(4) if i != o)


def gate_eval(g: GateType, io: Sequence[int]) -> Bits:
    n, e, s, w = (int(b) for b in io)
    if g.kind == "AND":
        return (0, min(n, w), 0, 0)
    if g.kind == "OR":
        return (0, max(n, w), 0, 0)
    if g.kind == "CROSS":
        return (0, w, n, 0)
    if g.kind == "NOP":
        return ZERO
    if g.kind == "FORK":
        return (0, w, w, 0)
    out = [0, 0, 0, 0]
    out[g.o] = (n, e, s, w)[g.i]
    return tuple(out)


def img(g: GateType) -> tuple[Bits, ...]:
    """All 4-tuples in the image of ``g``, sorted."""
    return tuple(sorted({gate_eval(g, bits) for bits in itertools.product((0, 1), repeat=4)}))


def bits_str(u: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in u)


def parse_bits(text: str) -> Bits:
    if len(text) != 4 or set(text) - {"0", "1"}:
        raise InputError(f"side values must be 4 bits, got {text!r}")
    return tuple(int(ch) for ch in text)


@dataclass(frozen=True, eq=False)
class Block:
    gate: GateType
    u: Bits
    pattern: np.ndarray

    def __post_init__(self):
        u = tuple(int(b) for b in self.u)
        if u not in img(self.gate):
            raise InputError(f"side values {bits_str(u)} not in Img({self.gate.name})")
        pattern = np.array(self.pattern, dtype=np.int64)
        if pattern.ndim != 2 or pattern.shape[0] != pattern.shape[1]:
            raise InputError(f"block pattern must be square, got shape {pattern.shape}")
        pattern.flags.writeable = False
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "pattern", pattern)

    @property
    def type(self) -> tuple[GateType, Bits]:
        return self.gate, self.u

    def __eq__(self, other):
        if not isinstance(other, Block):
            return NotImplemented
        return self.type == other.type and np.array_equal(self.pattern, other.pattern)

    def __hash__(self):
        return hash((self.gate, self.u, self.pattern.tobytes()))


@dataclass(frozen=True, eq=False)
class BlockLibrary:
    """Valid blocks of side ``n`` with delay ``delta``; ``rule_ref`` names the host rule."""

    n: int
    delta: int
    blocks: tuple[Block, ...]
    rule_ref: str = ""
    pad_state: int = 0
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise InputError("block side must be positive")
        if self.delta < 1:
            raise InputError("delay must be positive")
        blocks = tuple(self.blocks)
        index: dict[bytes, set] = {}
        for b in blocks:
            if b.pattern.shape != (self.n, self.n):
                raise InputError(
                    f"{b.gate.name}_{bits_str(b.u)} pattern is {b.pattern.shape}, expected {self.n}x{self.n}"
                )
            index.setdefault(b.pattern.tobytes(), []).append(b)
        have = {b.type for b in blocks}
        gates = {b.gate for b in blocks}
        for g in gates:
            for u in img(g):
                if (g, u) not in have:
                    raise InputError(f"library has no block of type {g.name}_{bits_str(u)}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "_index", index)

    @property
    def gates(self) -> tuple[GateType, ...]:
        seen = []
        for b in self.blocks:
            if b.gate not in seen:
                seen.append(b.gate)
        return tuple(seen)

    def of_type(self, gate: GateType, u: Bits) -> list[Block]:
        return [b for b in self.blocks if b.gate == gate and b.u == tuple(u)]

    def matching(self, pattern: np.ndarray) -> list[Block]:
        return self._index.get(np.ascontiguousarray(pattern, dtype=np.int64).tobytes(), [])

    def lookup(self, pattern: np.ndarray) -> set:
        """Types ``(gate, u)`` of every library block equal to ``pattern``."""
        return {b.type for b in self.matching(pattern)}

    def __eq__(self, other):
        if not isinstance(other, BlockLibrary):
            return NotImplemented
        return (self.n, self.delta, self.rule_ref, self.pad_state) == (
            other.n, other.delta, other.rule_ref, other.pad_state
        ) and set(self.blocks) == set(other.blocks)

    __hash__ = None


# -- assemblies ----------------------------------------------------------------

def _edge_ok(a: GateType, side: int, b: GateType) -> bool:
    """``b`` sits beyond ``side`` of ``a``: outputs must face inputs (NOP outputs are silent)."""
    back = (side + 2) % 4
    if a.kind != "NOP" and side in a.outputs and back not in b.inputs:
        return False
    if b.kind != "NOP" and back in b.outputs and side not in a.inputs:
        return False
    return True


@dataclass(frozen=True, eq=False)
class Assembly:
    """An ``h x w`` grid of library blocks, on a torus or surrounded by one block of padding."""

    grid: tuple[tuple[Block, ...], ...]
    mode: str = "torus"

    def __post_init__(self):
        grid = tuple(tuple(row) for row in self.grid)
        if not grid or not grid[0] or any(len(row) != len(grid[0]) for row in grid):
            raise InputError("assembly grid must be a non-empty rectangle")
        if self.mode not in ("torus", "padded"):
            raise InputError(f"unknown boundary mode {self.mode!r}")
        object.__setattr__(self, "grid", grid)
        bad = self.bad_edge()
        if bad is not None:
            raise InputError(bad)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.grid), len(self.grid[0])

    def neighbor(self, i: int, j: int, side: int):
        """Block beyond ``side`` of tile (i, j), or None for padding."""
        h, w = self.shape
        di, dj = SIDE_STEP[side]
        a, b = i + di, j + dj
        if self.mode == "torus":
            return self.grid[a % h][b % w]
        if 0 <= a < h and 0 <= b < w:
            return self.grid[a][b]
        return None

    def neighbors(self):
        h, w = self.shape
        for i in range(h):
            for j in range(w):
                yield (i, j), [self.neighbor(i, j, s) for s in range(4)]

    def bad_edge(self) -> str | None:
        for (i, j), around in self.neighbors():
            a = self.grid[i][j].gate
            for side in (EAST, SOUTH, WEST, NORTH):
                b = around[side]
                if b is not None and not _edge_ok(a, side, b.gate):
                    return (f"adjacency violation between tile ({i},{j}) {a.name} and its "
                            f"{SIDE_NAMES[side]} neighbor {b.gate.name}")
        return None

    def inputs(self, i: int, j: int) -> Bits:
        """Values read by tile (i, j): the facing side value of each neighbor."""
        out = []
        for side, b in enumerate(self.neighbor(i, j, s) for s in range(4)):
            out.append(0 if b is None else b.u[(side + 2) % 4])
        return tuple(out)

    def with_grid(self, grid) -> "Assembly":
        return Assembly(grid, self.mode)


def _as_block(lib: BlockLibrary, entry) -> Block:
    if isinstance(entry, Block):
        return entry
    gate, u = entry
    if isinstance(gate, str):
        gate = GateType.parse(gate)
    if isinstance(u, str):
        u = parse_bits(u)
    found = lib.of_type(gate, u)
    if not found:
        raise InputError(f"library has no block of type {gate.name}_{bits_str(u)}")
    return found[0]


def assemble(lib: BlockLibrary, layout, mode: str = "torus") -> tuple[Assembly, PeriodicConfig]:
    """Tile the chosen blocks; entries are ``Block`` objects or ``(gate, u)`` pairs."""
    grid = [[_as_block(lib, e) for e in row] for row in layout]
    asm = Assembly(grid, mode)
    return asm, PeriodicConfig(render_assembly(lib, asm))


def render_assembly(lib: BlockLibrary, asm: Assembly) -> np.ndarray:
    n = lib.n
    h, w = asm.shape
    tiles = np.block([[b.pattern for b in row] for row in asm.grid])
    if asm.mode == "torus":
        return tiles
    out = np.full(((h + 2) * n, (w + 2) * n), lib.pad_state, dtype=np.int64)
    out[n:-n, n:-n] = tiles
    return out


def _tile(cells: np.ndarray, asm: Assembly, n: int, i: int, j: int) -> np.ndarray:
    off = n if asm.mode == "padded" else 0
    return cells[off + i * n: off + (i + 1) * n, off + j * n: off + (j + 1) * n]


@dataclass
class AssemblySpec:
    """Seeded generator of random valid assemblies."""

    count: int = 100
    max_h: int = 4
    max_w: int = 4
    modes: tuple[str, ...] = ("torus", "padded")
    seed: int = 0


def generate_assemblies(lib: BlockLibrary, spec: AssemblySpec) -> Iterator[Assembly]:
    """Raster-order greedy placement; NOP always fits, so generation never gets stuck."""
    rng = random.Random(spec.seed)
    gates = lib.gates
    if GateType("NOP") not in gates:
        raise InputError("random assemblies need a NOP block in the library")
    for _ in range(spec.count):
        h, w = rng.randint(1, spec.max_h), rng.randint(1, spec.max_w)
        mode = rng.choice(spec.modes)
        chosen: dict[tuple[int, int], GateType] = {}
        for i in range(h):
            for j in range(w):
                ok = [g for g in gates if _fits(g, i, j, h, w, mode, chosen)]
                chosen[i, j] = rng.choice(ok)
        grid = []
        for i in range(h):
            row = []
            for j in range(w):
                g = chosen[i, j]
                u = rng.choice(img(g))
                row.append(rng.choice(lib.of_type(g, u)))
            grid.append(row)
        yield Assembly(grid, mode)


def _fits(g, i, j, h, w, mode, chosen) -> bool:
    for side, (di, dj) in enumerate(SIDE_STEP):
        a, b = i + di, j + dj
        if mode == "torus":
            a, b = a % h, b % w
        if (a, b) == (i, j):
            other = g
        elif (a, b) in chosen:
            other = chosen[a, b]
        else:
            continue
        if not _edge_ok(g, side, other):
            return False
    return True


# -- checkers ------------------------------------------------------------------

def _tile_report(round_no, i, j, gate, u, inputs, expected, before, after, why):
    return {
        "round": round_no, "tile": (i, j), "gate": gate.name, "u": bits_str(u),
        "inputs": bits_str(inputs), "expected": bits_str(expected) if expected else None,
        "before": before.tolist(), "after": after.tolist(), "reason": why,
    }


def _check_one(rule: CARule, lib: BlockLibrary, asm: Assembly, rounds: int, every_tile: bool):
    """Run ``rounds`` periods of ``delta`` steps; returns (counterexample or None, assembly)."""
    n = lib.n
    cells = render_assembly(lib, asm)
    if cells.max() >= rule.n_states:
        raise InputError("library pattern uses a state outside the rule alphabet")
    for rnd in range(1, rounds + 1):
        before = cells
        for _ in range(lib.delta):
            cells = torus_step(rule, cells)
        if asm.mode == "padded":
            border = np.ones(cells.shape, dtype=bool)
            border[n:-n, n:-n] = False
            if (cells[border] != lib.pad_state).any():
                r, c = np.argwhere(border & (cells != lib.pad_state))[0]
                return {"round": rnd, "cell": (int(r), int(c)),
                        "reason": "padding disturbed"}, asm
        h, w = asm.shape
        new_grid = []
        for i in range(h):
            row = []
            for j in range(w):
                blk = asm.grid[i][j]
                tile_after = _tile(cells, asm, n, i, j)
                tile_before = _tile(before, asm, n, i, j)
                found = lib.matching(tile_after)
                types = {b.type for b in found}
                inputs = asm.inputs(i, j)
                expect = gate_eval(blk.gate, inputs)
                if not types:
                    return _tile_report(rnd, i, j, blk.gate, blk.u, inputs, expect, tile_before,
                                        tile_after, "tile matches no library block"), asm
                must = every_tile or blk.u == ZERO
                if must and (blk.gate, expect) not in types:
                    return _tile_report(rnd, i, j, blk.gate, blk.u, inputs, expect, tile_before,
                                        tile_after, "incorrect transition"), asm
                same_gate = [b for b in found if b.gate == blk.gate]
                row.append(same_gate[0] if same_gate else found[0])
            new_grid.append(row)
        asm = Assembly(new_grid, asm.mode)
        cells = render_assembly(lib, asm)
    return None, asm


def _run(rule, lib, assemblies: Iterable[Assembly], rounds: int, every_tile: bool):
    if rule.dimension != 2:
        raise InputError("circuit simulation needs a 2D rule")
    count = 0
    for k, asm in enumerate(assemblies):
        bad, _ = _check_one(rule, lib, asm, rounds, every_tile)
        count += 1
        if bad is not None:
            bad["assembly"] = k
            where = f"round {bad['round']}" if "round" in bad else ""
            return DecisionReport("no", note=f"assembly {k}, {where}: {bad['reason']}",
                                  counterexample=bad)
    return DecisionReport("yes", note=f"{count} assemblies, {rounds} round(s)")


def _assemblies(lib, assemblies):
    if isinstance(assemblies, AssemblySpec):
        return generate_assemblies(lib, assemblies)
    if isinstance(assemblies, Assembly):
        return [assemblies]
    return assemblies


def check_transient(rule: CARule, lib: BlockLibrary, assemblies) -> DecisionReport:
    """After ``delta`` steps every tile is a library block and every quiescent-typed tile
    ``f_(0,0,0,0)`` became ``f_v`` with ``v`` computed from its neighbors."""
    return _run(rule, lib, _assemblies(lib, assemblies), 1, every_tile=False)


def check_repeatable(rule: CARule, lib: BlockLibrary, assemblies, rounds: int = 4) -> DecisionReport:
    """Every tile makes the correct transition, for ``rounds`` consecutive periods."""
    if rounds < 1:
        raise InputError("rounds must be positive")
    return _run(rule, lib, _assemblies(lib, assemblies), rounds, every_tile=True)


# -- reference wire CA ---------------------------------------------------------
#
# Blocks are 3x3: center at (1,1), one port cell in the middle of each side,
# blank corners.  Every cell carries a global phase mod 3:
#   phase 0 -> 1  ports copy the facing port of the neighbouring block
#   phase 1 -> 2  the center evaluates its gate on its four ports; ports clear
#   phase 2 -> 0  ports display the center's side value for their side
# so one period (delta = 3) turns f_u into f_v with v = f(inputs).

FLAGS_PLAIN = ("",)
FLAGS_ONE_SHOT = ("fresh", "primed", "fired")

# von Neumann index of the center as seen from a port -> side of that port
_PORT_SIDE = {1: WEST, 2: NORTH, 3: EAST, 4: SOUTH}
_OPPOSITE = (0, 3, 4, 1, 2)
# von Neumann index of the port on each side, seen from the center
_PORT_AT = {NORTH: 4, EAST: 1, SOUTH: 2, WEST: 3}


def _center_combos(flags):
    return [(g, u, f) for g in GATES for u in img(g) for f in flags]


def _next_flag(flag: str, v: Bits) -> str:
    if flag == "fresh":
        return "fired" if v != ZERO else "fresh"
    if flag == "primed":
        return "primed" if v != ZERO else "fresh"
    return flag


def _center_name(g, u, flag, p):
    parts = [g.name, bits_str(u)] + ([flag] if flag else []) + [str(p)]
    return "/".join(parts)


def wire_ca(one_shot: bool = False) -> CARule:
    """The phase-3 port/center signal CA (``one_shot`` gives the burn-out mutant)."""
    flags = FLAGS_ONE_SHOT if one_shot else FLAGS_PLAIN
    combos = _center_combos(flags)
    combo_id = {c: k for k, c in enumerate(combos)}
    names = [f"_{p}" for p in range(3)]
    names += [f"P{b}{p}" for b in (0, 1) for p in range(3)]
    names += [_center_name(g, u, f, p) for (g, u, f) in combos for p in range(3)]
    n = len(names)

    kind = np.zeros(n, dtype=np.int64)      # 0 blank, 1 port, 2 center
    phase = np.arange(n) % 3
    bit = np.zeros(n, dtype=np.int64)
    combo = np.full(n, -1, dtype=np.int64)
    kind[3:9] = 1
    bit[3:9] = np.arange(6) // 3
    kind[9:] = 2
    combo[9:] = np.arange(n - 9) // 3

    display = np.array([u for (_, u, _) in combos], dtype=np.int64)
    successor = np.empty((len(combos), 16), dtype=np.int64)
    for k, (g, u, f) in enumerate(combos):
        for mask in range(16):
            ins = tuple((mask >> (3 - s)) & 1 for s in range(4))
            if f == "fired":
                v = u
            else:
                v = gate_eval(g, ins)
            successor[k, mask] = combo_id[g, v, _next_flag(f, v)]

    def local(neigh):
        me = neigh[0]
        p = phase[me]
        q = (p + 1) % 3
        out = q.copy()                                   # blank of the next phase

        # ports
        is_port = kind[me] == 1
        side = np.full(me.shape, -1, dtype=np.int64)
        outward = np.zeros(me.shape, dtype=np.int64)
        ctr = np.zeros(me.shape, dtype=np.int64)
        for j in (1, 2, 3, 4):
            hit = (kind[neigh[j]] == 2) & (side < 0)
            side = np.where(hit, _PORT_SIDE[j], side)
            outward = np.where(hit, neigh[_OPPOSITE[j]], outward)
            ctr = np.where(hit, neigh[j], ctr)
        oriented = side >= 0
        new_bit = bit[me].copy()
        read = oriented & (p == 0)
        new_bit = np.where(read, np.where(kind[outward] == 1, bit[outward], 0), new_bit)
        new_bit = np.where(oriented & (p == 1), 0, new_bit)
        show = oriented & (p == 2)
        shown = display[np.maximum(combo[ctr], 0), np.maximum(side, 0)]
        new_bit = np.where(show, shown, new_bit)
        out = np.where(is_port, 3 + new_bit * 3 + q, out)

        # centers
        is_center = kind[me] == 2
        mask = np.zeros(me.shape, dtype=np.int64)
        for s in range(4):
            nb = neigh[_PORT_AT[s]]
            mask = mask * 2 + np.where(kind[nb] == 1, bit[nb], 0)
        k = np.maximum(combo[me], 0)
        new_k = np.where(p == 1, successor[k, mask], k)
        out = np.where(is_center, 9 + new_k * 3 + q, out)
        return out

    return CARule(2, tuple(names), VON_NEUMANN, local=local,
                  name="wire-one-shot" if one_shot else "wire")


def _wire_pattern(rule: CARule, g: GateType, u: Bits, flag: str = "") -> np.ndarray:
    blank = rule.index("_0")
    pat = np.full((3, 3), blank, dtype=np.int64)
    pat[1, 1] = rule.index(_center_name(g, u, flag, 0))
    for s, (di, dj) in enumerate(SIDE_STEP):
        pat[1 + di, 1 + dj] = rule.index(f"P{u[s]}0")
    return pat


def _library(rule: CARule, entries, ref: str) -> BlockLibrary:
    blocks = [Block(g, u, pat) for g, u, pat in entries]
    return BlockLibrary(3, 3, tuple(blocks), rule_ref=ref, pad_state=rule.index("_0"))


def reference_wire_ca() -> tuple[CARule, BlockLibrary]:
    rule = wire_ca()
    entries = [(g, u, _wire_pattern(rule, g, u)) for g in GATES for u in img(g)]
    return rule, _library(rule, entries, "wire")


def corrupted_and_library() -> tuple[CARule, BlockLibrary]:
    """Mutant: every AND block carries an OR center."""
    rule = wire_ca()
    entries = []
    for g in GATES:
        for u in img(g):
            wired = GateType("OR") if g.kind == "AND" else g
            entries.append((g, u, _wire_pattern(rule, wired, u)))
    return rule, _library(rule, entries, "wire")


def one_shot_library() -> tuple[CARule, BlockLibrary]:
    """Mutant whose gates latch their output after the first non-zero result."""
    rule = wire_ca(one_shot=True)
    entries = []
    for g in GATES:
        for u in img(g):
            flags = ("fresh",) if u == ZERO else ("primed", "fired")
            entries += [(g, u, _wire_pattern(rule, g, u, f)) for f in flags]
    return rule, _library(rule, entries, "wire-one-shot")
