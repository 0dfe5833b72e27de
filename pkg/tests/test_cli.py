from pathlib import Path

import numpy as np
import pytest

from cazoo.cli import main
from cazoo.render import RenderSpec, read_pgm

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


def test_pred(capsys):
    assert run(capsys, "pred", "--rule", "rule110", "--t", "1", "--window", "110")[:2] == (0, "1\n")
    code, _, err = run(capsys, "pred", "--rule", "rule110", "--t", "2", "--window", "110")
    assert code == 3 and "r*t" in err


def test_check_freezing(capsys, files):
    code, out, _ = run(capsys, "check-freezing", "--rule", "not")
    assert code == 1 and "cycle: 0 <= 1 <= 0" in out
    code, out, _ = run(capsys, "check-freezing", "--rule", "or-spread")
    assert code == 0 and out == "verdict: yes\n1 <= 0\n"
    order = files("up.order", "0 <= 1\n")
    code, out, _ = run(capsys, "check-freezing", "--rule", "or-spread", "--order", order)
    assert code == 1 and "window 0 0 1" in out


def test_cycle(capsys, files):
    cfg = files("p3.cfg", "period: 011\n")
    code, out, _ = run(capsys, "cycle", "--rule", "identity", "--config", cfg, "--phi", "1")
    assert code == 1 and "verdict: no" in out and "cycle: 1" in out
    code, out, _ = run(capsys, "cycle", "--rule", "identity", "--config", cfg)
    assert (code, out) == (0, "transient: 0\ncycle: 1\n")
    code, _, _ = run(capsys, "cycle", "--rule", "shift", "--config", cfg, "--max-orbit", "2")
    assert code == 4


def test_ubpred(capsys, files):
    cfg = files("one.cfg", "left: 0\nmid: 1\nright: 0\norigin: 0\n")
    code, out, _ = run(capsys, "ubpred", "--rule", "rule110", "--config", cfg, "--state", "1",
                       "--horizon", "5")
    assert code == 0 and "witness_time: 0" in out
    code, out, _ = run(capsys, "ubpred", "--rule", "rule110", "--config", cfg, "--state", "0",
                       "--horizon", "10")
    assert code == 2 and "verdict: unknown" in out


def test_ubpred_zigzag(capsys):
    cfg = str(GOLDEN / "zigzag_zone.cfg")
    code, out, _ = run(capsys, "ubpred-zigzag", "--inner", "rule110", "--config", cfg,
                       "--state", "e")
    assert code == 1 and "case=finite-zone" in out
    code, out, _ = run(capsys, "ubpred-zigzag", "--inner", "rule110", "--config", cfg,
                       "--state", "l01")
    assert code == 0 and "witness_time: 0" in out


def test_simulate(capsys, files):
    cfg = files("one.cfg", "left: 0\nmid: 1\nright: 0\n")
    code, out, _ = run(capsys, "simulate", "--rule", "rule110", "--config", cfg, "--steps", "1")
    assert code == 0 and "mid: 11" in out
    code, out, _ = run(capsys, "simulate", "--rule", "rule110", "--config", cfg, "--steps", "3",
                       "--cell", "-1")
    # (1,1,1) at time 2 switches cell -1 off again
    assert out == "0 1 1 0\n"


def test_column_lang(capsys):
    code, out, err = run(capsys, "column-lang", "--rule", "identity", "--n", "1", "--k", "2")
    assert code == 0 and out == "0 | 0\n1 | 1\n" and "2 words" in err


def test_search_and_verify_sim(capsys, files):
    code, out, _ = run(capsys, "search-sim", "--guest", "rule110", "--host", "rule110")
    assert code == 0 and out.startswith("m: 1\nt: 1\n")
    witness = files("w.txt", out.split("verdict:")[0])
    code, out, _ = run(capsys, "verify-sim", "--guest", "rule110", "--host", "rule110",
                       "--witness", witness)
    assert code == 0
    flipped = files("flip.txt", "m: 1\nt: 1\npi:\n(0) -> 1\n(1) -> 0\n")
    code, out, _ = run(capsys, "verify-sim", "--guest", "rule110", "--host", "rule110",
                       "--witness", flipped)
    assert code == 1 and "window" in out
    code, out, _ = run(capsys, "search-sim", "--guest", "identity", "--host", "xor",
                       "--m-max", "2", "--t-max", "2")
    assert code == 1 and "exhausted 4 shapes" in out


def test_check_circuit(capsys):
    base = ["check-circuit", "--count", "20", "--seed", "1"]
    assert run(capsys, *base, "--builtin", "reference")[0] == 0
    code, out, _ = run(capsys, *base, "--builtin", "corrupted-and", "--mode", "transient")
    assert code == 1 and "incorrect transition" in out
    code, _, err = run(capsys, "check-circuit", "--builtin", "reference")
    assert code == 3 and "--seed" in err


def test_input_errors(capsys, files):
    assert run(capsys, "pred", "--bogus")[0] == 3
    assert run(capsys, "frobnicate")[0] == 3
    bad_rule = files("bad.rule", "dimension 1\nstates 0 1\nneighborhood 0\nrule 0 -> 1\n")
    code, _, err = run(capsys, "pred", "--rule", bad_rule, "--t", "1", "--window", "0")
    assert code == 3 and "no rule for window 1" in err
    cfg = files("bad.cfg", "left: 0\nright: 7\n")
    code, _, err = run(capsys, "ubpred", "--rule", "rule110", "--config", cfg, "--state", "1",
                       "--horizon", "3")
    assert code == 3 and "line 2" in err
    code, _, err = run(capsys, "cycle", "--rule", "xor", "--config", "/nonexistent/file")
    assert code == 3


def test_help_prints_grammar(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0
    assert "rule file" in out and "witness file" in out and "exit codes" in out


def _rule110_rows(steps, lo, hi):
    """Plain re-evaluation from a single 1 at cell 0."""
    cells = {0: 1}

    def at(z):
        return cells.get(z, 0)

    rows = []
    width = range(lo - steps - 1, hi + steps + 2)
    for _ in range(steps + 1):
        rows.append([at(z) for z in range(lo, hi + 1)])
        nxt = {}
        for z in width:
            x, y, w = at(z - 1), at(z), at(z + 1)
            nxt[z] = (1 - x * y * w) * max(y, w)
        cells = nxt
    return rows


def test_rule110_golden(capsys, tmp_path):
    out = tmp_path / "r.pgm"
    code, _, _ = run(capsys, "render", "--rule", "rule110", "--config",
                     str(GOLDEN / "single_one.cfg"), "--steps", "20", "--out", str(out))
    golden = (GOLDEN / "rule110_single_one_t20.pgm").read_bytes()
    assert code == 0 and out.read_bytes() == golden
    expect = np.array(_rule110_rows(20, -20, 20), dtype=np.uint8) * 255
    assert np.array_equal(read_pgm(golden), expect)


def test_zigzag_golden(capsys, tmp_path):
    out = tmp_path / "z.pgm"
    code, _, _ = run(capsys, "render", "--rule", "zigzag:rule110", "--config",
                     str(GOLDEN / "zigzag_zone.cfg"), "--steps", "45", "--lo", "-2", "--hi", "9",
                     "--time-up", "--out", str(out))
    golden = (GOLDEN / "zigzag_zone_t45_up.pgm").read_bytes()
    assert code == 0 and out.read_bytes() == golden
    pixels = read_pgm(golden)[::-1]
    gray = RenderSpec(19).gray()
    blank = {int(gray[0]), int(gray[1])}
    widths = [sum(int(p) not in blank for p in row) for row in pixels]
    # the working zone shrinks to one frozen cell and never grows back
    assert widths[0] == 8 and widths[-1] == 1
    assert all(a >= b for a, b in zip(widths, widths[1:]))


def test_render_2d_frames(tmp_path, files, capsys):
    cfg = files("g.cfg", "grid:\n" + ("+:+++++ " * 3).strip() + "\n" + ("-:+++++ " * 3).strip()
                + "\n")
    prefix = tmp_path / "frame"
    code, _, _ = run(capsys, "render", "--rule", "signed-majority", "--config", cfg, "--steps",
                     "2", "--out", str(prefix))
    assert code == 0
    frames = sorted(tmp_path.glob("frame_*.pgm"))
    assert len(frames) == 3
    assert read_pgm(frames[0].read_bytes()).shape == (2, 3)


def test_identity_render_rows_repeat(capsysbinary, files):
    cfg = files("p.cfg", "period: 0110\n")
    code = main(["render", "--rule", "identity", "--config", cfg, "--steps", "2"])
    data = capsysbinary.readouterr().out
    assert code == 0
    assert read_pgm(data).tolist() == [[0, 255, 255, 0]] * 3


def test_gray_levels():
    assert RenderSpec(1).gray().tolist() == [0]
    assert RenderSpec(3).gray().tolist() == [0, 127, 255]
    assert RenderSpec(19).gray()[1] == 255 // 18
