"""Seeded random bi-periodic configurations over zigzag(rule110)."""

import random

from cazoo.config import BiPeriodicConfig
from cazoo.constructions import BPLUS, B, E, L, LEFT, R, RIGHT, ZigzagAlphabet
from cazoo.decision import zigzag_size

ALPHA = ZigzagAlphabet(("0", "1"))


def _cell(rng, mode):
    return ALPHA.encode(rng.randrange(2), rng.randrange(2), mode)


def _zone(rng, width):
    """l^a H r^b with the head at a random position."""
    head = rng.randrange(width)
    mode = rng.choice((LEFT, RIGHT))
    return [_cell(rng, L if k < head else R if k > head else mode) for k in range(width)]


def _noise(rng, width):
    pool = [B, B, BPLUS] + [_cell(rng, m) for m in range(4)]
    if rng.random() < 0.2:
        pool.append(E)
    return [rng.choice(pool) for _ in range(width)]


def _segment(rng, budget):
    kind = rng.choices(("blank", "zone", "noise", "forbidden"), (3, 5, 2, 1))[0]
    width = rng.randint(1, max(1, min(budget, 6)))
    if kind == "blank":
        return [rng.choice((B, B, BPLUS)) for _ in range(width)]
    if kind == "zone":
        return [B] + _zone(rng, width)
    if kind == "noise":
        return _noise(rng, width)
    a, b = rng.choice(((R, L), (L, R), (LEFT, RIGHT), (R, LEFT), (RIGHT, L)))
    return [_cell(rng, a), _cell(rng, b)]


def _tail(rng):
    kind = rng.choices(("blank", "l", "r", "mixed"), (4, 2, 2, 1))[0]
    n = rng.randint(1, 3)
    if kind == "blank":
        return [B] * n
    if kind == "l":
        return [_cell(rng, L) for _ in range(n)]
    if kind == "r":
        return [_cell(rng, R) for _ in range(n)]
    return _noise(rng, n)


def random_config(rng: random.Random, max_size: int = 12) -> BiPeriodicConfig:
    while True:
        left, right = _tail(rng), _tail(rng)
        mid = []
        budget = max_size - len(left) - len(right)
        while budget > 0 and rng.random() < 0.8:
            seg = _segment(rng, budget)
            if len(seg) > budget:
                break
            mid += seg
            budget -= len(seg)
        origin = rng.randint(0, max(len(mid) - 1, 0))
        c = BiPeriodicConfig(tuple(left), tuple(mid), tuple(right), origin)
        if zigzag_size(c) <= max_size:
            return c


def cases(count: int, seed: int, max_size: int = 12):
    rng = random.Random(seed)
    return [random_config(rng, max_size) for _ in range(count)]
