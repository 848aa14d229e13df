from __future__ import annotations

import random

import pytest

from rieszkit.errors import PreconditionError, StencilError
from rieszkit.scalars import Q, RationalSeq
from rieszkit.spaces import (
    fin_dev,
    fin_dim,
    gamma,
    pair_form,
    row_block_ek,
    row_block_grid,
    seq_form,
    tail_seq,
    token_form,
)
from rieszkit.elements import (
    add,
    atom,
    element_findev,
    element_tail,
    le,
    pos,
    row_unit,
    scale,
    unit,
    zero,
)
from rieszkit.operators import (
    add_op,
    apply_functional,
    apply_op,
    atom_image,
    decompose,
    functional,
    functional_is_positive,
    image_sum_pattern,
    is_positive_operator,
    op_eq,
    operator,
    order_bounded_test,
    partial_sum_seq,
    rank_one,
    recompose,
    scale_op,
    stencil_rule,
)
from rieszkit.sequences import eval_seq
from rieszkit.casebook import (
    identity_on_tail_seq,
    limit_functional_rank_one,
    moving_indicator_operator,
    row_pair_difference_operator,
)

T = tail_seq()
F = fin_dev()


def test_decompose_recompose():
    x = element_tail(T, [3, 5], 5)
    parts = decompose(x)
    assert parts == [(("atom", 1), Q(-2)), (("unit",), Q(5))]
    assert recompose(T, parts) == x
    assert decompose(atom(T, 4)) == [(("atom", 4), Q(1))]


def test_decompose_rowblock(rng):
    from conftest import random_element

    E = row_block_ek()
    x = random_element(rng, E)
    assert recompose(E, decompose(x)) == x
    one_atom = atom(E, (1, 1))
    assert decompose(one_atom) == [(("atom", (1, 1)), Q(1))]


def test_decompose_all_kinds(rng):
    from conftest import ALL_SPACES, random_element

    for space in ALL_SPACES:
        for _ in range(25):
            x = random_element(rng, space)
            assert recompose(space, decompose(x)) == x


def test_apply_moving_indicator():
    Tm = moving_indicator_operator()
    assert apply_op(Tm, unit(T)).is_zero()
    assert atom_image(Tm, 3) == element_findev(F, {gamma(3): 1, gamma(2): -1}, 0)
    assert apply_op(zero_like(Tm), element_tail(T, [1, 2], 3)).is_zero()


def zero_like(op_):
    from rieszkit.operators import zero_op

    return zero_op(op_.domain, op_.codomain)


def test_apply_linear(rng):
    from conftest import random_element

    Tm = moving_indicator_operator()
    for _ in range(20):
        x = random_element(rng, T)
        y = random_element(rng, T)
        a, b = Q(rng.randint(-3, 3)), Q(rng.randint(-3, 3))
        lhs = apply_op(Tm, add(scale(a, x), scale(b, y)))
        rhs = add(scale(a, apply_op(Tm, x)), scale(b, apply_op(Tm, y)))
        assert lhs == rhs


def test_operator_arithmetic(rng):
    from conftest import random_element

    S = identity_on_tail_seq()
    R = limit_functional_rank_one()
    for _ in range(10):
        x = random_element(rng, T)
        assert apply_op(add_op(S, R), x) == add(apply_op(S, x), apply_op(R, x))
        assert apply_op(scale_op(Q(-3, 2), S), x) == scale(Q(-3, 2), apply_op(S, x))


def test_rank_one():
    f = functional(T, {1: 1}, 1)
    R = rank_one(f, atom(T, 1))
    assert apply_op(R, element_tail(T, [3, 5], 5)) == scale(3, atom(T, 1))
    Rz = rank_one(f, zero(T))
    assert apply_op(Rz, unit(T)).is_zero()
    lf = functional(T, {}, 1)
    Rl = rank_one(lf, unit(T))
    assert apply_op(Rl, element_tail(T, [3, 5], 5)) == scale(5, unit(T))


def test_rank_one_positive(rng):
    from conftest import random_element

    f = functional(T, {1: Q(1, 2), 3: 2}, 4)
    assert functional_is_positive(f)
    R = rank_one(f, add(atom(T, 2), unit(T)))
    for _ in range(20):
        x = random_element(rng, T)
        xp = pos(x)
        assert le(zero(T), apply_op(R, xp))


def test_partial_sums_telescope():
    Tm = moving_indicator_operator()
    s = partial_sum_seq(Tm)
    for n in range(1, 7):
        literal = zero(F)
        for k in range(1, n + 1):
            literal = add(literal, atom_image(Tm, k))
        assert eval_seq(s, n) == literal == element_findev(F, {gamma(n): 1}, 0)
    # consistency: s_n - s_{n-1} = image of the n-th atom
    for n in range(2, 8):
        assert eval_seq(s, n) - eval_seq(s, n - 1) == atom_image(Tm, n)


def test_partial_sums_identity():
    s = partial_sum_seq(identity_on_tail_seq())
    assert eval_seq(s, 3) == element_tail(T, [1, 1, 1], 0)
    z = partial_sum_seq(zero_like(identity_on_tail_seq()))
    assert eval_seq(z, 5).is_zero()


def test_order_bounded_moving_indicator():
    rep = order_bounded_test(moving_indicator_operator())
    assert rep.bounded
    assert rep.bound == scale(2, unit(F))


def test_order_bounded_fails_on_stationary_leak():
    rule = stencil_rule(1, 0, [[(seq_form(0, 1), 1)]], T)
    leak = operator(T, T, {}, rule, None, zero(T))
    rep = order_bounded_test(leak)
    assert not rep.bounded
    with pytest.raises(StencilError):
        partial_sum_seq(leak)


def test_order_bounded_zero():
    rep = order_bounded_test(zero_like(identity_on_tail_seq()))
    assert rep.bounded
    assert rep.bound == zero(T)


def test_positive_operator_checks():
    assert is_positive_operator(identity_on_tail_seq())
    assert is_positive_operator(limit_functional_rank_one())
    assert not is_positive_operator(moving_indicator_operator())
    assert not is_positive_operator(row_pair_difference_operator())


def test_functional_application():
    f = functional(T, {1: 1, 2: -2}, 3)
    assert apply_functional(f, unit(T)) == 3
    assert apply_functional(f, atom(T, 1)) == 1
    assert apply_functional(f, element_tail(T, [3, 5], 5)) == 3 * 1 + 5 * (-2) + 5 * (3 - (-1))


def test_row_pair_difference_images():
    Tr = row_pair_difference_operator()
    E = Tr.domain
    assert apply_op(Tr, atom(E, (1, 1))) == atom(Tr.codomain, (1, 1))
    assert apply_op(Tr, atom(E, (2, 4))) == scale(-1, atom(Tr.codomain, (2, 2)))
    assert apply_op(Tr, row_unit(E, 1)).is_zero()
    assert apply_op(Tr, unit(E)).is_zero()


def test_stencil_validation():
    with pytest.raises(StencilError):
        stencil_rule(1, 0, [[(seq_form(Q(1, 2), 0), 1)]], T)  # not integral
    with pytest.raises(StencilError):
        stencil_rule(1, 0, [[(seq_form(-1, 10), 1)]], T)  # leaves the index set
    with pytest.raises(StencilError):
        stencil_rule(
            1, 0, [[(seq_form(1, 0), 1), (seq_form(2, -3), 1)]], T
        )  # collide at n = 3
    merged = stencil_rule(1, 0, [[(seq_form(1, 0), 1), (seq_form(1, 0), 2)]], T)
    assert merged.entries[0][0][1] == Q(3)


def test_pair_domain_explicit_override_of_the_rule():
    """An explicit pair image overrides the rule at that atom only; other
    rows keep their rule images and pattern sums compensate exactly."""
    E, G = row_block_ek(), row_block_grid()
    rule = stencil_rule(
        2,
        0,
        [
            [(pair_form(1, 0, Q(1, 2), 0), -1)],
            [(pair_form(1, 0, Q(1, 2), Q(1, 2)), 1)],
        ],
        G,
    )
    override = scale(5, atom(G, (7, 7)))
    Tr = operator(E, G, {(2, 3): override}, rule, {}, zero(G))
    assert atom_image(Tr, (2, 3)) == override
    assert atom_image(Tr, (1, 3)) == atom(G, (1, 2))   # rule untouched elsewhere
    assert atom_image(Tr, (2, 5)) == atom(G, (2, 3))
    sig = image_sum_pattern(Tr, "pos")
    # the overridden atom contributes 5 at (7,7) instead of 1 at (2,2)
    assert sig.pat.at(7, 7) == 5 + 1   # override plus the rule image of atom (7,13)
    assert sig.pat.at(2, 2) == 0       # the rule contribution there was overridden
    assert sig.pat.at(1, 2) == 1


def test_pair_domain_add_keeps_overrides():
    E, G = row_block_ek(), row_block_grid()
    rule = stencil_rule(
        2,
        0,
        [
            [(pair_form(1, 0, Q(1, 2), 0), -1)],
            [(pair_form(1, 0, Q(1, 2), Q(1, 2)), 1)],
        ],
        G,
    )
    override = scale(5, atom(G, (7, 7)))
    A = operator(E, G, {(2, 3): override}, rule, {}, zero(G))
    B = operator(E, G, {}, rule, {}, zero(G))
    S = add_op(A, B)
    assert atom_image(S, (2, 3)) == add(override, atom(G, (2, 2)))
    assert atom_image(S, (1, 3)) == scale(2, atom(G, (1, 2)))
    x = add(atom(E, (2, 3)), row_unit(E, 1))
    assert apply_op(S, x) == add(apply_op(A, x), apply_op(B, x))


def test_pair_stencil_single_atom_collision_rejected():
    # both entries hit output (3, 3) for the atom (3, 3): entrywise
    # transforms would be wrong there, so construction refuses
    E, G = row_block_ek(), row_block_grid()
    with pytest.raises(StencilError):
        stencil_rule(
            1,
            0,
            [[(pair_form(1, 0, 1, 0), 1), (pair_form(2, -3, 2, -3), -1)]],
            G,
        )


def test_add_materializes_collisions():
    a = operator(T, T, {}, stencil_rule(1, 0, [[(seq_form(1, 0), 1)]], T), None, unit(T))
    b = operator(
        T, T, {}, stencil_rule(1, 2, [[(seq_form(2, -3), 1)]], T), None, unit(T)
    )
    # the forms meet at n = 3, which add_op materializes as an explicit image
    s = add_op(a, b)
    for i in range(1, 9):
        assert atom_image(s, i) == add(atom_image(a, i), atom_image(b, i))
    assert op_eq(add_op(a, b), add_op(b, a))


def test_image_sum_pattern_values():
    sig = image_sum_pattern(identity_on_tail_seq(), "id")
    from rieszkit.completion import collapse

    assert collapse(sig) == unit(T)
    Tm = moving_indicator_operator()
    sig_abs = image_sum_pattern(Tm, "abs")
    from rieszkit.operators import pattern_max_abs

    assert pattern_max_abs(sig_abs) == 2


def test_operators_from_uncountable_domain_refused():
    with pytest.raises(PreconditionError):
        operator(F, T, {}, None, None, zero(T))
