from __future__ import annotations

import random

import pytest

from rieszkit.scalars import Q, RationalSeq
from rieszkit.spaces import fin_dev, fin_dim, seq_form, tail_seq, token_form
from rieszkit.elements import atom, element_fin, element_tail, unit, zero
from rieszkit.operators import (
    apply_op,
    functional,
    operator,
    rank_one,
    stencil_rule,
)
from rieszkit.calculus import positive_part, rk_value_functional_unit
from rieszkit.oracles import (
    bruteforce_dominating_search,
    grid_interval_sup,
    majorant_growth_probe,
    matrix_apply,
    matrix_positive_part,
    truncate_element,
    truncate_operator,
)
from rieszkit.sequences import element_seq
from rieszkit.casebook import identity_on_tail_seq, row_pair_difference_operator

T = tail_seq()
F = fin_dev()


def random_matrix(rng: random.Random, rows: int, cols: int):
    return [[Q(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(cols)] for _ in range(rows)]


def test_matrix_positive_part_examples():
    assert matrix_positive_part([[1, -2], [-3, 4]]) == [[1, 0], [0, 4]]
    assert matrix_positive_part([[0, 0], [0, 0]]) == [[0, 0], [0, 0]]
    M = [[2, 1], [3, 5]]
    assert matrix_positive_part(M) == [[Q(2), Q(1)], [Q(3), Q(5)]]


def test_engine_agrees_with_matrix_oracle(rng):
    for _ in range(40):
        n, m = rng.randint(1, 5), rng.randint(1, 5)
        M = random_matrix(rng, m, n)
        dom, cod = fin_dim(n), fin_dim(m)
        op_ = operator(
            dom,
            cod,
            {j + 1: element_fin(cod, [M[i][j] for i in range(m)]) for j in range(n)},
        )
        cand, in_f = positive_part(op_)
        assert in_f
        P = matrix_positive_part(M)
        for j in range(n):
            assert dict(cand.atom_images)[j + 1] == element_fin(
                cod, [P[i][j] for i in range(m)]
            )


def test_grid_sup_depth0_enumeration():
    f = functional(T, {1: 1, 2: -2}, 3)
    assert grid_interval_sup(f, unit(T), 0) == 5
    assert rk_value_functional_unit(f) == 5


def test_grid_sup_monotone_in_depth(rng):
    for _ in range(10):
        coeffs = {i + 1: Q(rng.randint(-4, 4)) for i in range(rng.randint(0, 3))}
        f = functional(T, coeffs, Q(rng.randint(-4, 4)))
        vals = [grid_interval_sup(f, unit(T), d) for d in range(4)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))
        assert all(v <= rk_value_functional_unit(f) for v in vals)


def test_grid_sup_positive_operator_attains_application():
    P = identity_on_tail_seq()
    x = element_tail(T, [1, 2], 1)
    got = grid_interval_sup(P, x, 1)
    assert got == apply_op(P, x)


def test_grid_sup_separable_matches_joint():
    f = functional(T, {1: 2, 2: -1, 3: 1}, 2)
    joint = grid_interval_sup(f, unit(T), 2, joint_budget=10**6)
    separable = grid_interval_sup(f, unit(T), 2, joint_budget=1)
    assert joint == separable


def test_grid_sup_operator_target_routes_agree():
    P = identity_on_tail_seq()
    x = element_tail(T, [1, 1], 1)
    joint = grid_interval_sup(P, x, 2, joint_budget=10**7)
    separable = grid_interval_sup(P, x, 2, joint_budget=1)
    assert joint == separable


def test_grid_sup_below_interval_supremum():
    from rieszkit.calculus import rk_value
    from rieszkit.casebook import moving_indicator_operator
    from rieszkit.elements import coordinate, support

    Tm = moving_indicator_operator()
    g = grid_interval_sup(Tm, unit(T), 2)
    rk = rk_value(Tm, unit(T))
    for tok in [t for t, _ in g.entries]:
        assert coordinate(g, tok) <= rk.pat.at_token(tok)
    assert g.ambient <= rk.pat.ambient


def test_majorant_growth():
    Tr = row_pair_difference_operator()
    mu = [majorant_growth_probe(Tr, n) for n in range(13)]
    assert mu[1] == 1
    assert all(a <= b for a, b in zip(mu, mu[1:]))
    assert all(mu[n] >= Q(n, 2) for n in range(13))
    from rieszkit.operators import zero_op
    from rieszkit.spaces import row_block_ek, row_block_grid

    assert majorant_growth_probe(zero_op(row_block_ek(), row_block_grid()), 5) == 0


def test_dominating_search_finds_easy_cases():
    h = element_seq(T, atoms=[(seq_form(0, 1), RationalSeq.harmonic(1))])
    res = bruteforce_dominating_search(h, 6)
    assert res.found is not None
    res0 = bruteforce_dominating_search(element_seq(T), 0)
    assert res0.found is not None


def test_dominating_search_refutes_moving_indicator():
    x = element_seq(F, atoms=[(token_form(1, 0), RationalSeq.const(1))])
    res = bruteforce_dominating_search(x, 6)
    assert res.found is None
    assert res.candidates_checked > 0


def test_truncation_commutes_with_apply():
    P = identity_on_tail_seq()
    M = truncate_operator(P, 4)
    x = element_tail(T, [1, -2, 3], 7)
    assert matrix_apply(M, truncate_element(x, 4)) == truncate_element(apply_op(P, x), 4)
