import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cazoo import BiPeriodicConfig, CARule, FinitePattern, InputError, PeriodicConfig, apply_local
from cazoo.constructions import identity, rule110, shift, xor
from cazoo.engine import evolve_window, step, step_biperiodic, step_periodic, trace
from cazoo.rule import all_windows


def words(min_size=1, max_size=5, q=2):
    return st.lists(st.integers(0, q - 1), min_size=min_size, max_size=max_size).map(tuple)


def test_apply_local_rule110_examples():
    f = rule110()
    assert apply_local(f, (1, 1, 1)) == 0
    assert apply_local(f, (0, 0, 0)) == 0
    assert apply_local(f, (0, 0, 1)) == 1


def test_apply_local_rejects_out_of_range():
    with pytest.raises(InputError):
        apply_local(rule110(), (0, 2, 0))
    with pytest.raises(InputError):
        apply_local(rule110(), (0, 1))


def test_rule_validation():
    with pytest.raises(InputError):
        CARule(1, ("0", "1"), ((0,), (0,)), table=[0] * 4)
    with pytest.raises(InputError):
        CARule(1, ("0", "1"), ((0,),), table=[0, 1, 0])
    with pytest.raises(InputError):
        CARule(1, ("0", "1"), ((0,),), table=[0, 2])
    with pytest.raises(InputError):
        CARule(3, ("0",), ((0, 0, 0),), table=[0])
    assert rule110().radius == 1
    assert CARule(1, ("a",), ((-3,), (2,)), table=[0]).radius == 3


def test_all_windows_big_endian():
    w = all_windows(2, 3)
    assert w[1].tolist() == [0, 0, 1]
    assert w[6].tolist() == [1, 1, 0]


def test_step_periodic_identity_and_quiescent():
    c = PeriodicConfig([0, 1, 1, 0, 1])
    assert step_periodic(identity(), c) == c
    assert step_periodic(rule110(), PeriodicConfig([0])) == PeriodicConfig([0])


def test_step_periodic_rule110_period3():
    # wrapped windows (1,0,1), (0,1,1), (1,1,0) all map to 1
    assert step_periodic(rule110(), PeriodicConfig([0, 1, 1])).cells.tolist() == [1, 1, 1]


def test_step_periodic_dimension_mismatch():
    with pytest.raises(InputError):
        step_periodic(rule110(), PeriodicConfig([[0, 1], [1, 0]]))


def test_evolve_window_examples():
    f = rule110()
    u = FinitePattern.of([0, 1, 1, 0, 1])
    assert evolve_window(f, u, 0) == u
    assert evolve_window(f, FinitePattern.of([1, 1, 0]), 1).center == 1
    assert evolve_window(f, FinitePattern.of([0, 0, 1, 0, 0]), 2).center == 1
    with pytest.raises(InputError):
        evolve_window(f, FinitePattern.of([0, 1, 0]), 2)


def test_finite_pattern_shape():
    with pytest.raises(InputError):
        FinitePattern.of([0, 1])
    with pytest.raises(InputError):
        FinitePattern(np.zeros((3, 5), dtype=int))
    assert FinitePattern(np.zeros((5, 5), dtype=int)).n == 2


def test_step_biperiodic_examples():
    f = rule110()
    zero = BiPeriodicConfig.uniform(0)
    assert step_biperiodic(f, zero) == zero
    one = BiPeriodicConfig((0,), (1,), (0,), 0)
    img = step_biperiodic(f, one)
    assert img == BiPeriodicConfig((0,), (1, 1), (0,), 1)
    assert (img[-1], img[0], img[1], img[-2]) == (1, 1, 0, 0)
    moved = step_biperiodic(shift(), one)
    assert moved == BiPeriodicConfig((0,), (1,), (0,), 1)
    assert moved[-1] == 1


def test_step_biperiodic_rejects_2d():
    from cazoo.constructions import signed_majority

    with pytest.raises(InputError):
        step_biperiodic(signed_majority(), BiPeriodicConfig.uniform(0))


def test_trace_examples():
    one = BiPeriodicConfig((0,), (1,), (0,), 0)
    assert trace(rule110(), one, 0, 2) == [1, 1, 1]
    assert trace(rule110(), BiPeriodicConfig.uniform(0), 0, 5) == [0] * 6
    c = PeriodicConfig([0, 1, 0])
    assert trace(identity(), c, 1, 3) == [1, 1, 1, 1]


def test_absorbing_states():
    from cazoo.constructions import E, or_spread, zigzag

    assert identity().absorbing == {0, 1}
    assert or_spread().absorbing == {1}
    assert rule110().absorbing == frozenset()
    assert shift().absorbing == frozenset()
    assert zigzag(rule110()).absorbing == {E}


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=3),
       st.lists(st.integers(0, 1), max_size=5),
       st.lists(st.integers(0, 1), min_size=1, max_size=3), st.integers(-4, 4))
def test_trace_shortcuts_match_plain_stepping(left, mid, right, cell):
    from cazoo.constructions import or_spread

    for rule in (or_spread(), shift(), rule110()):
        c = BiPeriodicConfig(tuple(left), tuple(mid), tuple(right), 0)
        plain = [c[cell]]
        for _ in range(12):
            c = step_biperiodic(rule, c)
            plain.append(c[cell])
        assert trace(rule, BiPeriodicConfig(tuple(left), tuple(mid), tuple(right), 0), cell,
                     12) == plain


def test_canonical_equality():
    a = BiPeriodicConfig((0, 0), (0, 1, 0), (0,), 1)
    b = BiPeriodicConfig((0,), (1,), (0, 0, 0), 0)
    assert a == b and hash(a) == hash(b)
    # fully periodic configurations with different cuts
    p = BiPeriodicConfig((0, 1), (), (0, 1), 0)
    assert p == BiPeriodicConfig((1, 0), (), (1, 0), 1)
    assert p != BiPeriodicConfig((1, 0), (), (1, 0), 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.data())
def test_light_cone_consistency(n, t, data):
    f = xor() if data.draw(st.booleans()) else rule110()
    cells = data.draw(words(2 * (n + t) + 1, 2 * (n + t) + 1))
    u = FinitePattern.of(cells)
    whole = evolve_window(f, u, t)
    stepped = u
    for _ in range(t):
        stepped = evolve_window(f, stepped, 1)
    assert whole == stepped
    assert whole.n == n


@settings(max_examples=60, deadline=None)
@given(words(1, 6), st.integers(0, 5))
def test_periodic_biperiodic_agreement(word, origin):
    f = rule110()
    periodic = step_periodic(f, PeriodicConfig(list(word)))
    bi = step_biperiodic(f, BiPeriodicConfig(word, (), word, origin % len(word)))
    shift_ = origin % len(word)
    for z in range(len(word)):
        assert bi[z] == periodic[z + shift_]


@settings(max_examples=60, deadline=None)
@given(words(1, 3), words(0, 6), words(1, 3), st.integers(-4, 8), st.integers(-5, 5))
def test_translation_invariance(left, mid, right, origin, k):
    f = rule110()
    c = BiPeriodicConfig(left, mid, right, origin)
    assert step_biperiodic(f, c.shifted(k)) == step_biperiodic(f, c).shifted(k)


@settings(max_examples=60, deadline=None)
@given(words(1, 3), words(0, 6), words(1, 3), st.integers(-4, 8))
def test_biperiodic_growth_and_cellwise_oracle(left, mid, right, origin):
    f = rule110()
    c = BiPeriodicConfig(left, mid, right, origin)
    img = step_biperiodic(f, c)
    # tails keep their (primitive) period and the middle grows by at most r per side
    assert len(img.left) <= len(left) and len(left) % len(img.left) == 0
    assert len(img.right) <= len(right) and len(right) % len(img.right) == 0
    assert len(img.mid) <= len(c.canonical().mid) + 2 * f.radius + len(left) + len(right)
    lo, hi = c.span()
    for z in range(lo - 6, hi + 7):
        assert img[z] == apply_local(f, (c[z - 1], c[z], c[z + 1]))


def test_step_dispatch():
    assert step(identity(), FinitePattern.of([0, 1, 0])) == FinitePattern.of([1])
    with pytest.raises(InputError):
        step(identity(), [0, 1])


@settings(max_examples=100, deadline=None)
@given(words(1, 3), words(0, 5), words(1, 3), st.integers(-4, 8), st.integers(-6, 3),
       st.integers(0, 6))
def test_canonical_form_is_a_representation_invariant(left, mid, right, origin, lo, width):
    c = BiPeriodicConfig(left, mid, right, origin)
    other = c.recut(lo, lo + width - 1)
    canon = c.canonical()
    assert other == c
    assert canon.canonical() == canon
    for z in range(-15, 16):
        assert canon[z] == c[z] == other[z]
