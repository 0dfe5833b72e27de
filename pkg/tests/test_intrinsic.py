import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cazoo import CARule, InputError, PeriodicConfig, ResourceError
from cazoo.constructions import identity, or_spread, rule110, shift, xor
from cazoo.engine import step_periodic
from cazoo.intrinsic import (
    BlockShape, block_decode, block_encode, check_simulation, check_subproj, rescale,
    search_strong_simulation,
)


def test_block_shape_validation():
    with pytest.raises(InputError):
        BlockShape((0,), 1)
    with pytest.raises(InputError):
        BlockShape((2,), 0)
    assert BlockShape((2, 3), 1).size == 6


def test_block_encode_examples():
    c = PeriodicConfig([0, 1, 1, 0])
    assert block_encode(c, (1,), 2) == c
    # (a,b),(c,d) with the first component most significant
    assert block_encode(c, (2,), 2).cells.tolist() == [0 * 2 + 1, 1 * 2 + 0]
    with pytest.raises(InputError):
        block_encode(PeriodicConfig([0, 1, 0]), (2,), 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(1, 1), (2, 2), (1, 2), (2, 1)]))
def test_block_round_trip_2d(seed, m):
    rng = np.random.default_rng(seed)
    c = PeriodicConfig(rng.integers(0, 3, size=(4, 4)))
    enc = block_encode(c, m, 3)
    assert enc.period == (4 // m[0], 4 // m[1])
    assert block_decode(enc, m, 3) == c


def test_rescale_trivial_cases():
    f = rule110()
    assert rescale(f, BlockShape((1,), 1)) is f
    g = rescale(identity(), BlockShape((3,), 2))
    assert g.n_states == 8
    rng = np.random.default_rng(0)
    c = PeriodicConfig(rng.integers(0, 8, size=5))
    assert step_periodic(g, c) == c


def _oracle_step(rule, c, shape, n_states):
    cells = block_decode(c, shape.m, n_states)
    for _ in range(shape.t):
        cells = step_periodic(rule, cells)
    return block_encode(cells, shape.m, n_states)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([((2,), 2), ((3,), 1), ((2,), 1), ((1,), 3)]),
       st.integers(1, 5))
def test_rescale_matches_stepping_oracle(seed, params, blocks):
    shape = BlockShape(*params)
    f = rule110()
    big = rescale(f, shape)
    rng = np.random.default_rng(seed)
    c = PeriodicConfig(rng.integers(0, big.n_states, size=blocks))
    assert step_periodic(big, c) == _oracle_step(f, c, shape, 2)


def test_rescale_resource_limit():
    with pytest.raises(ResourceError):
        rescale(rule110(), BlockShape((8,), 1), limit=1000)


def test_check_subproj_identity_and_negation():
    for f in (rule110(), identity(), xor()):
        assert check_subproj(f, f, {0: 0, 1: 1}).verdict == "yes"
    rep = check_subproj(rule110(), rule110(), {0: 1, 1: 0})
    assert rep.verdict == "no"
    window = rep.counterexample
    assert set(window) == {(-1,), (0,), (1,)}
    f = rule110()
    w = tuple(window[(k,)] for k in (-1, 0, 1))
    lhs = 1 - f.evaluate(np.array(w).reshape(3, 1))[0]
    rhs = f.evaluate(np.array([1 - s for s in w]).reshape(3, 1))[0]
    assert lhs != rhs


def test_check_subproj_input_errors():
    with pytest.raises(InputError):
        check_subproj(rule110(), rule110(), {0: 0})
    with pytest.raises(InputError):
        check_subproj(rule110(), rule110(), {0: 0, 5: 1})


def _product():
    states = tuple(f"{a}{b}" for a in "01" for b in "01")

    def local(w):
        a = [s // 2 for s in w]
        b = [s % 2 for s in w]
        return 2 * ((1 - a[0] * a[1] * a[2]) * max(a[1], a[2])) + sum(b) % 2

    return CARule.from_function(1, states, ((-1,), (0,), (1,)), local, name="rule110*xor")


def test_product_projects_onto_factor():
    f, g = rule110(), xor()
    prod = _product()
    assert check_subproj(f, prod, {s: s // 2 for s in range(4)}).verdict == "yes"
    assert check_subproj(g, prod, {s: s % 2 for s in range(4)}).verdict == "yes"


def test_closure_failure_is_reported():
    # state c escapes to a, which lies outside the sub-alphabet {b, c}
    escape = CARule.from_function(1, ("a", "b", "c"), ((0,),), lambda w: (0, 1, 0)[w[0]])
    rep = check_subproj(identity(("a", "b")), escape, {1: 0, 2: 1})
    assert rep.verdict == "no" and "closed" in rep.note


def test_two_sided_check():
    f = rule110()
    rep = check_simulation(f, BlockShape((2,), 1), f, BlockShape((2,), 1), {s: s for s in range(4)})
    assert rep.verdict == "yes"


def test_search_examples():
    w, rep = search_strong_simulation(identity(), identity(), 1, 1)
    assert rep.verdict == "yes" and w.shape == BlockShape((1,), 1) and w.projection == {0: 0, 1: 1}
    w, rep = search_strong_simulation(rule110(), rule110(), 1, 1)
    assert w.projection == {0: 0, 1: 1}
    w, rep = search_strong_simulation(identity(), xor(), 2, 2)
    if w is not None:
        assert check_subproj(identity(), rescale(xor(), w.shape), w.projection).verdict == "yes"
    else:
        assert rep.verdict == "no"


def test_search_rejects_big_guest():
    with pytest.raises(InputError):
        search_strong_simulation(identity(("a", "b", "c", "d")), xor(), 1, 1)


def _brute_force_first(guest, block):
    """Lexicographically first projection (values 0..|Q_F|-1 then 'excluded')."""
    choices = list(range(guest.n_states)) + [-1]
    for values in itertools.product(choices, repeat=block.n_states):
        pi = {s: v for s, v in enumerate(values) if v >= 0}
        if set(pi.values()) != set(range(guest.n_states)):
            continue
        if check_subproj(guest, block, pi).verdict == "yes":
            return pi
    return None


@pytest.mark.parametrize("guest", [identity(), shift(), xor(), or_spread(), rule110()],
                         ids=lambda r: r.name)
@pytest.mark.parametrize("host", [identity(), xor(), or_spread(), rule110()], ids=lambda r: r.name)
def test_search_agrees_with_brute_force(guest, host):
    # the full search over (2,2) returns the first shape with a brute-force witness
    w, rep = search_strong_simulation(guest, host, 2, 2)
    first = None
    for shape in (BlockShape((1,), 1), BlockShape((1,), 2), BlockShape((2,), 1), BlockShape((2,), 2)):
        pi = _brute_force_first(guest, rescale(host, shape))
        if pi is not None:
            first = (shape, pi)
            break
    if first is None:
        assert w is None and rep.verdict == "no"
    else:
        assert (w.shape, w.projection) == first


@pytest.mark.parametrize("guest,host,shape", [
    (rule110(), rule110(), BlockShape((2,), 1)),
    (rule110(), _product(), BlockShape((1,), 1)),
    (xor(), _product(), BlockShape((1,), 1)),
    (or_spread(), or_spread(), BlockShape((1,), 2)),
])
def test_sampled_orbits_follow_guest(guest, host, shape):
    w, rep = search_strong_simulation(guest, host, shape.m[0], shape.t)
    assert rep.verdict == "yes"
    block = rescale(host, w.shape)
    assert check_subproj(guest, block, w.projection).verdict == "yes"
    sub = np.array(w.sub_alphabet)
    pi = np.zeros(block.n_states, dtype=np.int64)
    pi[sub] = [w.projection[s] for s in sub.tolist()]
    rng = np.random.default_rng(7)
    for _ in range(100):
        c = PeriodicConfig(sub[rng.integers(0, len(sub), size=rng.integers(1, 7))])
        g = PeriodicConfig(pi[c.cells])
        for _ in range(5):
            c, g = step_periodic(block, c), step_periodic(guest, g)
            assert PeriodicConfig(pi[c.cells]) == g
