"""Command-line front end.

Exit codes: 0 yes/success, 1 no, 2 unknown, 3 input error, 4 resource limit.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import circuits, decision, freezing, intrinsic, io, render
from .config import BiPeriodicConfig, FinitePattern, PeriodicConfig
from .engine import orbit, trace
from .errors import InputError, ResourceError
from .report import DecisionReport

EXIT = {"yes": 0, "no": 1, "unknown": 2}
INPUT_ERROR, RESOURCE_ERROR = 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _config(rule, path):
    try:
        return io.parse_config(_read(path), rule.states)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def _emit(report: DecisionReport) -> int:
    sys.stdout.write(report.to_text())
    return EXIT[report.verdict]


# -- commands --------------------------------------------------------------------

def cmd_simulate(args) -> int:
    rule = io.resolve_rule(args.rule)
    c = _config(rule, args.config)
    if args.cell is not None:
        cell = tuple(int(x) for x in args.cell.split(","))
        cell = cell[0] if len(cell) == 1 else cell
        states = trace(rule, c, cell, args.steps)
        print(" ".join(rule.states[s] for s in states))
        return 0
    for last in orbit(rule, c, args.steps):
        pass
    sys.stdout.write(io.serialize_config(last, rule.states))
    return 0


def cmd_render(args) -> int:
    rule = io.resolve_rule(args.rule)
    c = _config(rule, args.config)
    if rule.dimension == 2:
        if not args.out:
            raise InputError("2D rendering writes numbered frames and needs --out PREFIX")
        for t, data in enumerate(render.render_frames(rule, c, args.steps)):
            Path(f"{args.out}_{t:04d}.pgm").write_bytes(data)
        return 0
    data = render.render_spacetime(rule, c, args.steps, args.time_up, args.lo, args.hi)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
    return 0


def _window(rule, text: str) -> FinitePattern:
    rows = [io.parse_word(part, rule.states) for part in text.split("/")]
    if rule.dimension == 1:
        if len(rows) != 1:
            raise InputError("1D windows are a single word")
        return FinitePattern(np.array(rows[0], dtype=np.int64))
    if len({len(r) for r in rows}) != 1:
        raise InputError("2D window rows differ in length")
    return FinitePattern(np.array(rows, dtype=np.int64))


def cmd_pred(args) -> int:
    rule = io.resolve_rule(args.rule)
    u = _window(rule, args.window)
    print(rule.states[decision.pred(rule, args.t, u)])
    return 0


def cmd_ubpred(args) -> int:
    rule = io.resolve_rule(args.rule)
    c = _config(rule, args.config)
    if not isinstance(c, BiPeriodicConfig):
        raise InputError("ubpred needs a bi-periodic configuration")
    return _emit(decision.ubpred_bounded(rule, c, rule.index(args.state), args.horizon))


def cmd_ubpred_zigzag(args) -> int:
    from .constructions import zigzag

    inner = io.resolve_rule(args.inner)
    zz = zigzag(inner)
    c = _config(zz, args.config)
    if not isinstance(c, BiPeriodicConfig):
        raise InputError("ubpred-zigzag needs a bi-periodic configuration")
    return _emit(decision.ubpred_zigzag(inner, c, zz.index(args.state), zz))


def cmd_cycle(args) -> int:
    rule = io.resolve_rule(args.rule)
    c = _config(rule, args.config)
    if not isinstance(c, PeriodicConfig):
        raise InputError("cycle needs a periodic configuration")
    if args.phi is None:
        transient, cycle = decision.cycle_structure(rule, c, args.max_orbit)
        print(f"transient: {transient}\ncycle: {cycle}")
        return 0
    return _emit(decision.cycle_gt_phi(rule, c, decision.PhiSpec(args.phi), args.max_orbit))


def cmd_column_lang(args) -> int:
    rule = io.resolve_rule(args.rule)
    words = decision.column_language(rule, args.n, args.k, args.limit)
    for word in sorted(words):
        print(" | ".join(io.format_word(col, rule.states) for col in word))
    print(f"{len(words)} words", file=sys.stderr)
    return 0


def cmd_check_freezing(args) -> int:
    rule = io.resolve_rule(args.rule)
    if args.order:
        order = io.parse_order(_read(args.order), rule.states)
        report = freezing.check_freezing(rule, order)
        if report.counterexample:
            window = " ".join(rule.states[s] for s in report.counterexample.values())
            report.note += f"; window {window}"
        return _emit(report)
    order, cycle = freezing.find_freezing_order(rule)
    if order is None:
        print("verdict: no")
        print("cycle: " + " <= ".join(rule.states[s] for s in cycle))
        return 1
    print("verdict: yes")
    sys.stdout.write(io.serialize_order(order, rule.states))
    return 0


def _shape(m: str | None, t: int | None):
    if m is None:
        return None
    return intrinsic.BlockShape(tuple(int(x) for x in m.split(",")), t or 1)


def cmd_verify_sim(args) -> int:
    guest = io.resolve_rule(args.guest)
    host = io.resolve_rule(args.host)
    w = io.parse_witness(_read(args.witness), host.states, guest.states)
    block = intrinsic.rescale(host, w.shape, args.limit)
    gshape = _shape(args.guest_m, args.guest_t)
    if gshape is not None:
        guest = intrinsic.rescale(guest, gshape, args.limit)
    report = intrinsic.check_subproj(guest, block, w.projection, args.limit)
    if report.counterexample:
        report.note += "; window " + " ".join(
            f"{','.join(map(str, v))}:{block.states[s]}" for v, s in report.counterexample.items()
        )
    return _emit(report)


def cmd_search_sim(args) -> int:
    guest = io.resolve_rule(args.guest)
    host = io.resolve_rule(args.host)
    w, report = intrinsic.search_strong_simulation(guest, host, args.m_max, args.t_max, args.limit)
    if w is not None:
        sys.stdout.write(io.serialize_witness(w, host.states, guest.states))
    return _emit(report)


def cmd_check_circuit(args) -> int:
    if args.library:
        rule, lib = io.parse_library(args.library,
                                     io.resolve_rule(args.rule) if args.rule else None)
    else:
        rule, lib = {
            "reference": circuits.reference_wire_ca,
            "corrupted-and": circuits.corrupted_and_library,
            "one-shot": circuits.one_shot_library,
        }[args.builtin]()
    spec = circuits.AssemblySpec(count=args.count, max_h=args.max_size, max_w=args.max_size,
                                 seed=args.seed)
    if args.mode == "transient":
        report = circuits.check_transient(rule, lib, spec)
    else:
        report = circuits.check_repeatable(rule, lib, spec, args.rounds)
    return _emit(report)


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cazoo", description="Cellular automaton engine and verification toolkit.",
                epilog=io.GRAMMAR + "\nexit codes: 0 yes/success, 1 no, 2 unknown, "
                "3 input error, 4 resource limit\nrules: builtin names "
                "(rule110, zigzag:<inner>, signed-majority, identity, shift, not, or-spread, "
                "xor, wire, wire-one-shot) or rule file paths",
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text, epilog=io.GRAMMAR,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("simulate", cmd_simulate, "evolve a configuration; print the result or a cell trace")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--config", required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--cell", help="trace this cell (z or z0,z1) instead of printing the result")

    sp = add("render", cmd_render, "write a space-time diagram (1D) or frames (2D) as PGM")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--config", required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--out", help="output file (1D) or frame prefix (2D); stdout if omitted")
    sp.add_argument("--time-up", action="store_true", help="put time 0 at the bottom")
    sp.add_argument("--lo", type=int)
    sp.add_argument("--hi", type=int)

    sp = add("pred", cmd_pred, "state at the center after t steps of a window over B(r t)")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--window", required=True, help="a word; 2D rows separated by '/'")

    sp = add("ubpred", cmd_ubpred, "bounded search for state q at cell 0")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--config", required=True)
    sp.add_argument("--state", required=True)
    sp.add_argument("--horizon", type=int, required=True)

    sp = add("ubpred-zigzag", cmd_ubpred_zigzag, "exact reachability for the zigzag wrapper")
    sp.add_argument("--inner", required=True)
    sp.add_argument("--config", required=True)
    sp.add_argument("--state", required=True)

    sp = add("cycle", cmd_cycle, "transient and cycle length of a periodic configuration")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--config", required=True)
    sp.add_argument("--phi", help="decide cycle > phi(n); products of constants, n, n^k, 2^n")
    sp.add_argument("--max-orbit", type=int, default=decision.MAX_ORBIT)

    sp = add("column-lang", cmd_column_lang, "column-factor words of width n and depth k")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--limit", type=int, default=2**20)

    sp = add("check-freezing", cmd_check_freezing,
             "synthesize a freezing order, or check a given one")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--order")

    sp = add("verify-sim", cmd_verify_sim, "check a restriction/projection witness")
    sp.add_argument("--guest", required=True)
    sp.add_argument("--host", required=True)
    sp.add_argument("--witness", required=True)
    sp.add_argument("--guest-m", help="also rescale the guest by this block shape")
    sp.add_argument("--guest-t", type=int)
    sp.add_argument("--limit", type=int, default=2**20)

    sp = add("search-sim", cmd_search_sim, "search small shapes for a strong simulation")
    sp.add_argument("--guest", required=True)
    sp.add_argument("--host", required=True)
    sp.add_argument("--m-max", type=int, default=1)
    sp.add_argument("--t-max", type=int, default=1)
    sp.add_argument("--limit", type=int, default=2**20)

    sp = add("check-circuit", cmd_check_circuit, "check a block library on random assemblies")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--library", help="library directory")
    src.add_argument("--builtin", choices=("reference", "corrupted-and", "one-shot"))
    sp.add_argument("--rule", help="host rule (overrides the library meta)")
    sp.add_argument("--mode", choices=("transient", "repeatable"), default="repeatable")
    sp.add_argument("--rounds", type=int, default=4)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--max-size", type=int, default=4)
    sp.add_argument("--seed", type=int, required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 3 via _Parser.error; --help exits 0
        return exc.code
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return RESOURCE_ERROR


if __name__ == "__main__":
    sys.exit(main())
