"""Line-oriented text formats for rules, configurations, witnesses, orders and block libraries.

Blank lines and ``#`` comments are ignored everywhere.  Parse errors carry
the 1-based line and column of the offending token.
"""

from __future__ import annotations

import collections
import os
import re
from pathlib import Path

import numpy as np

from .circuits import Block, BlockLibrary, GateType, bits_str, parse_bits
from .config import BiPeriodicConfig, PeriodicConfig
from .constructions import builtin
from .errors import InputError
from .freezing import StateOrder
from .intrinsic import BlockShape, SimulationWitness, decode_digits, encode_digits
from .rule import CARule, all_windows

GRAMMAR = """\
file formats (blank lines and '#' comments are ignored):

  rule file
    dimension <1|2>
    states <name> <name> ...
    neighborhood <offset> <offset> ...      1D: -1 0 1    2D: 0,0 0,1 1,0
    rule <s_1> ... <s_|V|> -> <s>           one line per window, V order
    default -> <state>|unchanged            optional; 'unchanged' needs offset 0

  configuration file
    left: <word>  mid: <word>  right: <word>  origin: <int>   (bi-periodic, 1D)
    period: <word>                                             (periodic, 1D)
    grid:  followed by one row per line                        (periodic, 2D)
    a word is written compactly (0110) when every state name is one
    character, otherwise as space-separated names

  witness file
    m: <int> ...
    t: <int>
    blocks: <block> <block> ...          a block is (s_1,...,s_k)
    pi:
    <block> -> <state>                   one line per block

  order file
    <state> <= <state>                   generators; closed reflexively and transitively

  library directory
    meta           lines 'N <int>', 'delta <int>', 'rule <builtin-or-path>', 'pad <state>'
    <any>.block    'gate: <AND|OR|CROSS|NOP|FORK|WIRE_i_o>', 'u: <4 bits>', then N rows
"""


def _lines(text: str):
    """Yield ``(line_no, stripped_content)`` for non-empty, comment-free lines."""
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield no, line


def _tokens(line: str):
    """``(column, token)`` pairs, 1-based columns."""
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", line)]


def _state(states: dict, tok: str, no: int, col: int) -> int:
    try:
        return states[tok]
    except KeyError:
        raise InputError(f"undefined state {tok!r}", no, col) from None


def _int(tok: str, no: int, col: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InputError(f"expected an integer, got {tok!r}", no, col) from None


# -- rules ---------------------------------------------------------------------

def parse_rule(text: str, name: str = "") -> CARule:
    dim = states = hood = None
    rules: dict[tuple[int, ...], tuple[int, int]] = {}
    default = None
    index: dict[str, int] = {}
    for no, line in _lines(text):
        toks = _tokens(line)
        key = toks[0][1]
        if key == "dimension":
            if len(toks) != 2 or toks[1][1] not in ("1", "2"):
                raise InputError("dimension must be 1 or 2", no, toks[-1][0])
            dim = int(toks[1][1])
        elif key == "states":
            names = [t for _, t in toks[1:]]
            if not names:
                raise InputError("empty state list", no, toks[0][0])
            for col, t in toks[1:]:
                if t in index or t == "->":
                    raise InputError(f"invalid or duplicate state name {t!r}", no, col)
                index[t] = len(index)
            states = tuple(names)
        elif key == "neighborhood":
            if dim is None:
                raise InputError("neighborhood before dimension", no, toks[0][0])
            hood = []
            for col, t in toks[1:]:
                parts = t.split(",")
                if len(parts) != dim:
                    raise InputError(f"offset {t!r} does not have {dim} component(s)", no, col)
                v = tuple(_int(p, no, col) for p in parts)
                if v in hood:
                    raise InputError(f"repeated offset {t!r}", no, col)
                hood.append(v)
            if not hood:
                raise InputError("empty neighborhood", no, toks[0][0])
        elif key == "rule":
            if states is None or hood is None:
                raise InputError("rule before states/neighborhood", no, toks[0][0])
            body = toks[1:]
            if len(body) != len(hood) + 2 or body[-2][1] != "->":
                raise InputError(f"expected {len(hood)} states, '->' and an image", no, toks[0][0])
            window = tuple(_state(index, t, no, c) for c, t in body[:-2])
            image = _state(index, body[-1][1], no, body[-1][0])
            if window in rules and rules[window][0] != image:
                raise InputError(f"conflicting images for window {' '.join(t for _, t in body[:-2])}",
                                 no, toks[0][0])
            rules[window] = (image, no)
        elif key == "default":
            if states is None:
                raise InputError("default before states", no, toks[0][0])
            if len(toks) != 3 or toks[1][1] != "->":
                raise InputError("expected 'default -> <state>|unchanged'", no, toks[0][0])
            col, t = toks[2]
            if t == "unchanged":
                default = "unchanged"
            else:
                default = _state(index, t, no, col)
        else:
            raise InputError(f"unknown directive {key!r}", no, toks[0][0])
    if dim is None or states is None or hood is None:
        raise InputError("rule file needs dimension, states and neighborhood lines")
    if default == "unchanged" and (0,) * dim not in hood:
        raise InputError("'default -> unchanged' needs the offset 0 in the neighborhood")
    q, k = len(states), len(hood)
    wins = all_windows(q, k)
    table = np.full(len(wins), -1, dtype=np.int64)
    for w, (img, _) in rules.items():
        idx = 0
        for s in w:
            idx = idx * q + s
        table[idx] = img
    missing = table < 0
    if missing.any():
        if default is None:
            w = wins[int(np.argmax(missing))]
            raise InputError(f"no rule for window {' '.join(states[s] for s in w)} and no default")
        if default == "unchanged":
            table[missing] = wins[missing, hood.index((0,) * dim)]
        else:
            table[missing] = default
    return CARule(dim, states, tuple(hood), table=table, name=name)


def serialize_rule(rule: CARule) -> str:
    table = rule.to_table()
    default = collections.Counter(table.tolist()).most_common(1)[0][0]
    hood = " ".join(",".join(str(x) for x in v) for v in rule.neighborhood)
    out = [f"dimension {rule.dimension}", f"states {' '.join(rule.states)}", f"neighborhood {hood}"]
    wins = all_windows(rule.n_states, len(rule.neighborhood))
    for w, img in zip(wins, table):
        if img != default:
            out.append(f"rule {' '.join(rule.states[s] for s in w)} -> {rule.states[img]}")
    out.append(f"default -> {rule.states[default]}")
    return "\n".join(out) + "\n"


def resolve_rule(ref: str, base: str | os.PathLike | None = None) -> CARule:
    """A builtin name (``zigzag:<inner>`` nests) or the path of a rule file."""
    path = Path(base, ref) if base is not None else Path(ref)
    if path.is_file():
        return parse_rule(path.read_text(encoding="utf-8"), name=path.stem)
    return builtin(ref, resolve=lambda r: resolve_rule(r, base))


# -- words and configurations ---------------------------------------------------

def _compact(states) -> bool:
    return all(len(s) == 1 for s in states)


def format_word(word, states) -> str:
    sep = "" if _compact(states) else " "
    return sep.join(states[int(s)] for s in word)


def parse_word(text: str, states, no: int | None = None, offset: int = 1) -> tuple[int, ...]:
    index = {s: k for k, s in enumerate(states)}
    out = []
    for col, tok in _tokens(text):
        if tok in index:
            out.append(index[tok])
        elif _compact(states):
            out += [_state(index, ch, no, offset + col - 1 + j) for j, ch in enumerate(tok)]
        else:
            raise InputError(f"undefined state {tok!r}", no, offset + col - 1)
    return tuple(out)


def parse_config(text: str, states):
    """A ``BiPeriodicConfig`` or ``PeriodicConfig`` over the named ``states``."""
    fields: dict[str, tuple] = {}
    rows: list[tuple[int, ...]] | None = None
    for no, line in _lines(text):
        if rows is not None:
            row = parse_word(line, states, no)
            if rows and len(row) != len(rows[0]):
                raise InputError(f"grid row has {len(row)} cells, expected {len(rows[0])}", no, 1)
            rows.append(row)
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep:
            raise InputError("expected '<field>: <value>'", no, 1)
        if key in fields:
            raise InputError(f"duplicate field {key!r}", no, 1)
        offset = len(key) + 2 + (len(line) - len(line.lstrip()))
        if key in ("left", "mid", "right", "period"):
            fields[key] = (parse_word(rest, states, no, offset), no)
        elif key == "origin":
            fields[key] = (_int(rest.strip(), no, offset), no)
        elif key == "grid":
            if rest.strip():
                raise InputError("grid rows start on the next line", no, offset)
            rows = []
        else:
            raise InputError(f"unknown field {key!r}", no, 1)
    if rows is not None:
        if fields:
            raise InputError("grid cannot be mixed with other fields")
        if not rows:
            raise InputError("empty grid")
        return PeriodicConfig(np.array(rows, dtype=np.int64))
    if "period" in fields:
        if set(fields) != {"period"}:
            raise InputError("period cannot be mixed with other fields", fields["period"][1], 1)
        word = fields["period"][0]
        if not word:
            raise InputError("empty period", fields["period"][1], 1)
        return PeriodicConfig(np.array(word, dtype=np.int64))
    for key in ("left", "right"):
        if key not in fields:
            raise InputError(f"bi-periodic configuration needs a '{key}:' line")
        if not fields[key][0]:
            raise InputError(f"'{key}:' must be a non-empty word", fields[key][1], 1)
    mid = fields.get("mid", ((), 0))[0]
    origin = fields.get("origin", (0, 0))[0]
    return BiPeriodicConfig(fields["left"][0], mid, fields["right"][0], origin)


def serialize_config(c, states) -> str:
    if isinstance(c, BiPeriodicConfig):
        return (f"left: {format_word(c.left, states)}\nmid: {format_word(c.mid, states)}\n"
                f"right: {format_word(c.right, states)}\norigin: {c.origin}\n")
    if isinstance(c, PeriodicConfig):
        if c.dimension == 1:
            return f"period: {format_word(c.cells, states)}\n"
        return "grid:\n" + "".join(format_word(row, states) + "\n" for row in c.cells)
    raise InputError(f"cannot serialize {type(c).__name__}")


# -- witnesses -------------------------------------------------------------------

def _block_tuple(symbol: int, states, size: int) -> str:
    digits = decode_digits(np.array([symbol]), len(states), size)[0]
    return "(" + ",".join(states[int(d)] for d in digits) + ")"


def _parse_block(tok: str, index, size: int, no: int, col: int) -> int:
    if not (tok.startswith("(") and tok.endswith(")")):
        raise InputError(f"expected a block tuple, got {tok!r}", no, col)
    parts = tok[1:-1].split(",")
    if len(parts) != size:
        raise InputError(f"block {tok} has {len(parts)} components, expected {size}", no, col)
    digits = np.array([[_state(index, p, no, col) for p in parts]])
    return int(encode_digits(digits, len(index))[0])


def serialize_witness(w: SimulationWitness, host_states, guest_states) -> str:
    size = w.shape.size
    blocks = " ".join(_block_tuple(s, host_states, size) for s in w.sub_alphabet)
    lines = [f"m: {' '.join(map(str, w.shape.m))}", f"t: {w.shape.t}", f"blocks: {blocks}", "pi:"]
    for s in w.sub_alphabet:
        lines.append(f"{_block_tuple(s, host_states, size)} -> {guest_states[w.projection[s]]}")
    return "\n".join(lines) + "\n"


def parse_witness(text: str, host_states, guest_states) -> SimulationWitness:
    host_index = {s: k for k, s in enumerate(host_states)}
    guest_index = {s: k for k, s in enumerate(guest_states)}
    m = t = None
    declared = None
    pi: dict[int, int] = {}
    in_pi = False
    for no, line in _lines(text):
        stripped = line.strip()
        if in_pi and "->" in stripped:
            if m is None:
                raise InputError("pi before m:", no, 1)
            size = int(np.prod(m))
            left, _, right = stripped.partition("->")
            col = line.index(left.strip()) + 1
            block = _parse_block(left.strip(), host_index, size, no, col)
            if block in pi:
                raise InputError(f"block {left.strip()} mapped twice", no, col)
            pi[block] = _state(guest_index, right.strip(), no, line.rindex(right.strip()) + 1)
            continue
        key, sep, rest = stripped.partition(":")
        if not sep:
            raise InputError("expected '<field>: <value>'", no, 1)
        toks = _tokens(rest)
        if key == "m":
            m = tuple(_int(tok, no, col) for col, tok in toks)
        elif key == "t":
            if len(toks) != 1:
                raise InputError("t takes one integer", no, 1)
            t = _int(toks[0][1], no, toks[0][0])
        elif key == "blocks":
            if m is None:
                raise InputError("blocks before m:", no, 1)
            size = int(np.prod(m))
            declared = [_parse_block(tok, host_index, size, no, col) for col, tok in toks]
        elif key == "pi":
            in_pi = True
        else:
            raise InputError(f"unknown field {key!r}", no, 1)
    if m is None or t is None:
        raise InputError("witness needs 'm:' and 't:' lines")
    if declared is not None and sorted(declared) != sorted(pi):
        raise InputError("'blocks:' list does not match the domain of pi")
    return SimulationWitness(BlockShape(m, t), pi)


# -- orders ----------------------------------------------------------------------

def parse_order(text: str, states) -> StateOrder:
    index = {s: k for k, s in enumerate(states)}
    pairs = []
    for no, line in _lines(text):
        toks = _tokens(line)
        if len(toks) != 3 or toks[1][1] != "<=":
            raise InputError("expected '<state> <= <state>'", no, 1)
        pairs.append((_state(index, toks[0][1], no, toks[0][0]),
                      _state(index, toks[2][1], no, toks[2][0])))
    return StateOrder.from_pairs(len(states), pairs)


def serialize_order(order: StateOrder, states) -> str:
    return "".join(f"{states[a]} <= {states[b]}\n" for a, b in order.generators())


# -- block libraries -----------------------------------------------------------

def parse_library(directory, rule: CARule | None = None) -> tuple[CARule, BlockLibrary]:
    """Read a library directory; the host rule comes from ``meta`` unless given."""
    directory = Path(directory)
    meta_path = directory / "meta"
    if not meta_path.is_file():
        raise InputError(f"{meta_path}: missing library meta file")
    meta = {}
    for no, line in _lines(meta_path.read_text(encoding="utf-8")):
        toks = _tokens(line)
        if len(toks) != 2 or toks[0][1] not in ("N", "delta", "rule", "pad"):
            raise InputError(f"{meta_path}: expected 'N|delta|rule|pad <value>'", no, 1)
        meta[toks[0][1]] = (toks[1][1], no, toks[1][0])
    for key in ("N", "delta"):
        if key not in meta:
            raise InputError(f"{meta_path}: missing '{key}' line")
    n = _int(*meta["N"])
    delta = _int(*meta["delta"])
    ref = meta.get("rule", ("", 0, 0))[0]
    if rule is None:
        if not ref:
            raise InputError(f"{meta_path}: no 'rule' line and no rule given")
        rule = resolve_rule(ref, directory)
    index = {s: k for k, s in enumerate(rule.states)}
    pad = _state(index, *meta["pad"]) if "pad" in meta else 0
    blocks = []
    for path in sorted(directory.glob("*.block")):
        try:
            blocks.append(_parse_block_file(path.read_text(encoding="utf-8"), rule.states, n))
        except InputError as exc:
            raise InputError(f"{path.name}: {exc}") from None
    if not blocks:
        raise InputError(f"{directory}: no .block files")
    return rule, BlockLibrary(n, delta, tuple(blocks), rule_ref=ref, pad_state=pad)


def _parse_block_file(text: str, states, n: int) -> Block:
    gate = u = None
    rows = []
    for no, line in _lines(text):
        if gate is None or u is None:
            key, sep, rest = line.partition(":")
            if not sep or key.strip() not in ("gate", "u"):
                raise InputError("expected 'gate:' and 'u:' lines before the pattern", no, 1)
            if key.strip() == "gate":
                gate = GateType.parse(rest.strip())
            else:
                u = parse_bits(rest.strip())
            continue
        row = parse_word(line, states, no)
        if len(row) != n:
            raise InputError(f"pattern row has {len(row)} cells, expected {n}", no, 1)
        rows.append(row)
    if gate is None or u is None:
        raise InputError("block file needs 'gate:' and 'u:' lines")
    if len(rows) != n:
        raise InputError(f"pattern has {len(rows)} rows, expected {n}")
    return Block(gate, u, np.array(rows, dtype=np.int64))


def write_library(directory, lib: BlockLibrary, states):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "meta").write_text(
        f"N {lib.n}\ndelta {lib.delta}\nrule {lib.rule_ref}\npad {states[lib.pad_state]}\n",
        encoding="utf-8",
    )
    for k, b in enumerate(lib.blocks):
        body = f"gate: {b.gate.name}\nu: {bits_str(b.u)}\n"
        body += "".join(format_word(row, states) + "\n" for row in b.pattern)
        (directory / f"{k:03d}_{b.gate.name}_{bits_str(b.u)}.block").write_text(body, encoding="utf-8")
