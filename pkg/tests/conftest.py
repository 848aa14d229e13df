from __future__ import annotations

import random

import pytest

from rieszkit.scalars import Q
from rieszkit.spaces import SpaceDesc, Kind, fin_dim, fin_dev, gamma, row_block_ek, row_block_grid, tail_seq
from rieszkit.elements import (
    Element,
    element_fin,
    element_findev,
    element_rowblock,
    element_tail,
)

ALL_SPACES = [fin_dim(4), tail_seq(), fin_dev(), row_block_ek(), row_block_grid()]


def random_scalar(rng: random.Random, span: int = 6) -> Q:
    num = rng.randint(-span, span)
    den = rng.randint(1, 4)
    return Q(num, den)


def random_element(rng: random.Random, space: SpaceDesc) -> Element:
    if space.kind == Kind.FIN_DIM:
        return element_fin(space, [random_scalar(rng) for _ in range(space.dim)])
    if space.kind == Kind.TAIL_SEQ:
        width = rng.randint(0, 4)
        return element_tail(
            space, [random_scalar(rng) for _ in range(width)], random_scalar(rng)
        )
    if space.kind == Kind.FIN_DEV:
        toks = rng.sample(range(1, 8), rng.randint(0, 3))
        return element_findev(
            space,
            {gamma(k): random_scalar(rng) for k in toks},
            random_scalar(rng),
        )
    tail = random_scalar(rng)
    rows = []
    for _ in range(rng.randint(0, 3)):
        width = rng.randint(0, 3)
        rtail = random_scalar(rng) if space.row_units else tail
        rows.append(([random_scalar(rng) for _ in range(width)], rtail))
    return element_rowblock(space, rows, tail)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
