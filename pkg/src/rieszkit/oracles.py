"""Brute-force references on finite truncations.

Everything here is enumerative and independent of the symbolic engine: the
oracles re-derive values from definitions on truncated index sets, and the
test suite compares the engine against them.  Box-linear maxima are taken on
dyadic grids whose endpoints include the box vertices, which is exact for
linear objectives.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import NotDecreasingError, PreconditionError
from .scalars import Q, RationalSeq, qof
from .spaces import Kind, seq_form
from .elements import (
    Element,
    abs_,
    add,
    atom,
    coordinate,
    element_tail,
    le,
    sub,
    zero,
)
from .operators import Functional, Operator, apply_functional, apply_op, atom_image
from .sequences import ElementSeq, element_seq, eval_seq
from .convergence import decide_monotone_limit


# ---------------------------------------------------------------------------
# truncation to finite dimensions


def truncate_element(x: Element, level: int) -> list[Q]:
    """Coordinates 1..level plus the tail slot (tail_seq only)."""
    if x.space.kind != Kind.TAIL_SEQ:
        raise PreconditionError("truncation is defined for tail sequences")
    return [coordinate(x, i) for i in range(1, level + 1)] + [x.tail]


def truncate_operator(T: Operator, level: int) -> list[list[Q]]:
    """Matrix of T on the truncated basis e_1..e_level plus the tail block.

    Column j < level is the truncation of T(e_j); the last column is the
    image of the tail generator (unit minus the listed atoms)."""
    cols = []
    for j in range(1, level + 1):
        cols.append(truncate_element(atom_image(T, j), level))
    tail_gen_img = T.unit_image
    for j in range(1, level + 1):
        tail_gen_img = sub(tail_gen_img, atom_image(T, j))
    cols.append(truncate_element(tail_gen_img, level))
    return [[cols[j][i] for j in range(level + 1)] for i in range(level + 1)]


def matrix_positive_part(M) -> list[list[Q]]:
    return [[max(qof(v), Q(0)) for v in row] for row in M]


def matrix_apply(M, v) -> list[Q]:
    return [sum((qof(a) * qof(x) for a, x in zip(row, v)), Q(0)) for row in M]


# ---------------------------------------------------------------------------
# grid supremum over an order interval


def _dyadic_grid(top: Q, depth: int) -> list[Q]:
    steps = 2**depth
    return [top * k / steps for k in range(steps + 1)]


def grid_interval_sup(
    T: Operator | Functional, x: Element, depth: int, joint_budget: int = 4096
):
    """Coordinatewise max of T(y) over the dyadic grid of [0, x].

    Grid points vary the coordinates that the data can see (the atom
    supports of the operator's table plus x's prefix) and the tail value.
    Small cases enumerate the product grid outright; larger ones maximize
    per output coordinate, which agrees with the joint maximum because the
    objective is linear in each grid variable.
    """
    if x.space.kind != Kind.TAIL_SEQ:
        raise PreconditionError("the grid oracle runs on tail sequences")
    is_functional = isinstance(T, Functional)
    support = set(range(1, len(x.prefix) + 1))
    if is_functional:
        support |= {i for i, _ in T.atom_coeffs}
    else:
        support |= {i for i, _ in T.atom_images if isinstance(i, int)}
        if T.rule is not None:
            support |= set(range(T.rule.threshold + 1, T.rule.threshold + 4))
    support = sorted(support)
    axes = []
    for i in support:
        axes.append([v for v in _dyadic_grid(coordinate(x, i), depth)])
    tail_axis = _dyadic_grid(x.tail, depth)

    def build(yvals, t) -> Element:
        prefix = []
        top = max(support, default=0)
        vals = dict(zip(support, yvals))
        for i in range(1, top + 1):
            prefix.append(vals.get(i, min(t, coordinate(x, i))))
        return element_tail(x.space, prefix, t)

    total = len(tail_axis)
    for a in axes:
        total *= len(a)
        if total > joint_budget:
            break
    if total <= joint_budget:
        best = None
        for combo in product(*axes, tail_axis):
            y = build(combo[:-1], combo[-1])
            img = apply_functional(T, y) if is_functional else apply_op(T, y)
            if best is None:
                best = img
            elif is_functional:
                best = max(best, img)
            else:
                from .elements import sup2

                best = sup2(best, img)
        return best
    # separable route: per output coordinate the objective is linear in each
    # grid variable, so the coordinatewise grid maximum splits per variable
    if is_functional:
        coeffs = dict(T.atom_coeffs)
        out = Q(0)
        for i in support:
            c = coeffs.get(i, Q(0))
            out += max((c * v for v in _dyadic_grid(coordinate(x, i), depth)), default=Q(0))
        limit_weight = T.unit_value - sum(coeffs.values(), Q(0))
        out += max((limit_weight * t for t in tail_axis), default=Q(0))
        return out
    return _grid_sup_operator_separable(T, x, depth, support, tail_axis)


def _grid_sup_operator_separable(T: Operator, x: Element, depth: int, support, tail_axis):
    """Coordinatewise grid maximum for an operator target.

    T(y) at output k equals sum_i y_i * a_{i,k} + t * (U_k - sigma_k) where
    a_{i,k} is coordinate k of the i-th atom image, U the unit image and
    sigma_k the row sum over the support; each output coordinate maximizes
    its variables independently."""
    from .elements import element_findev, support as elem_support
    from .spaces import Kind, Token

    imgs = {i: atom_image(T, i) for i in support}
    U = T.unit_image
    touched = set(elem_support(U))
    for img in imgs.values():
        touched.update(elem_support(img))

    def coord_max(k) -> Q:
        out = Q(0)
        sigma = Q(0)
        for i in support:
            a = coordinate(imgs[i], k)
            sigma += a
            out += max(
                (a * v for v in _dyadic_grid(coordinate(x, i), depth)), default=Q(0)
            )
        w = coordinate(U, k) - sigma
        out += max((w * t for t in tail_axis), default=Q(0))
        return out

    kind = T.codomain.kind
    if kind == Kind.FIN_DIM:
        from .elements import element_fin

        return element_fin(
            T.codomain, [coord_max(k) for k in range(1, T.codomain.dim + 1)]
        )
    if kind == Kind.TAIL_SEQ:
        width = max((k for k in touched if isinstance(k, int)), default=0)
        tail_probe = width + 1  # beyond every image prefix: the tail class
        return element_tail(
            T.codomain,
            [coord_max(k) for k in range(1, width + 1)],
            coord_max(tail_probe),
        )
    if kind == Kind.FIN_DEV:
        from .spaces import fresh_star

        toks = sorted(t for t in touched if isinstance(t, Token))
        probe_tok = fresh_star(toks)  # untouched by every image: the ambient class
        return element_findev(
            T.codomain,
            {tok: coord_max(tok) for tok in toks},
            coord_max(probe_tok),
        )
    raise PreconditionError("grid oracle does not assemble row-block targets")


# ---------------------------------------------------------------------------
# majorant growth for the row-pair difference family


def majorant_growth_probe(T: Operator, level: int) -> Q:
    """Least possible sup-entry of S(unit) over structured positive S >= T
    on the level-N truncation, for alternating row-difference stencils.

    Constraint generation follows the row-unit chain: S(u_r) dominates
    S of every initial alternating segment, hence T of it, at every column;
    the codomain's constant-off-finite structure then forces the constant
    slot of S(u_r) up to the stencil's positive coefficient, and the unit
    dominates the sum of the first `level` row units.  The witness S built
    from those floors is feasible, so the bound is exact.
    """
    if level < 0:
        raise PreconditionError("level must be >= 0")
    if T.domain.kind != Kind.ROW_BLOCK or not T.domain.row_units:
        raise PreconditionError("the probe runs on row-block domains")
    if T.rule is None or T.rule.is_zero():
        return Q(0)
    peak = Q(0)
    for es in T.rule.entries:
        for _, c in es:
            peak = max(peak, c)
    if peak == 0:
        return Q(0)
    if level == 0:
        return Q(0)
    # floors: const slot of S(u_r) >= peak for each r <= level, verified by
    # enumerating the segment constraints S(u_r) >= T(y_M) on the level grid
    for r in range(1, level + 1):
        for m_top in range(1, level + 1):
            seg = zero(T.domain)
            for m in range(1, 2 * m_top, 2):
                seg = add(seg, atom(T.domain, (r, m)))
            img = apply_op(T, seg)
            for mm in range(1, m_top + 1):
                if coordinate(img, (r, mm)) > peak:
                    raise PreconditionError("stencil outside the probed family")
    return peak * level


# ---------------------------------------------------------------------------
# bounded search for dominating families


def _candidate_families(x: ElementSeq, bound: int):
    """Decreasing-family candidates with representation size <= bound.

    The palette scales come from the sequence's own coefficient values; the
    shapes combine a constant ambient, harmonic copies of the stationary
    atoms, matched moving-atom copies, and unit-minus-march terms."""
    space = x.space
    scales = {Q(1)}
    for _, coeff in x.atoms:
        v = coeff.max_abs()
        if v != 0:
            scales.update({v, v / 2, 2 * v})
    scales = sorted(scales)

    # shape generators, each parameterized by a scale
    def amb_const(c):
        return element_seq(space, ambient=RationalSeq.const(c))

    def harmonic_unitless(c):
        atoms = [
            (form, RationalSeq.harmonic(c))
            for form, _ in x.atoms
            if not form.moving
        ]
        if not atoms:
            return None
        return element_seq(space, atoms=atoms)

    def matched_moving(c):
        atoms = [(form, RationalSeq.const(c)) for form, _ in x.atoms if form.moving]
        if not atoms:
            return None
        return element_seq(space, atoms=atoms)

    def march(c):
        if space.kind != Kind.TAIL_SEQ:
            return None
        from .sequences import fill as mkfill

        return element_seq(
            space,
            fills=[mkfill(seq_form(1, 0), 1, 0, 1, 1, -c)],
            ambient=RationalSeq.const(c),
        )

    def zero_family(_):
        return element_seq(space)

    gens = [zero_family, amb_const, harmonic_unitless, matched_moving, march]
    size = 0
    out = []
    for picks in product(range(len(gens)), repeat=2):
        for s1 in scales:
            for s2 in scales:
                fams = []
                ok = True
                total = 0
                for gi, sc in zip(picks, (s1, s2)):
                    fam = gens[gi](sc)
                    if fam is None:
                        ok = False
                        break
                    total += 0 if gi == 0 else 1 + len(fam.atoms) + len(fam.fills)
                    fams.append(fam)
                if not ok or total > bound:
                    continue
                out.append(_seq_sum(fams))
    seen = set()
    uniq = []
    for fam in out:
        key = _seq_key(fam)
        if key not in seen:
            seen.add(key)
            uniq.append(fam)
    return uniq


def _seq_sum(fams):
    base = fams[0]
    for other in fams[1:]:
        base = element_seq(
            base.space,
            static=add(base.static, other.static),
            atoms=list(base.atoms) + list(other.atoms),
            fills=list(base.fills) + list(other.fills),
            ambient=base.ambient.add(other.ambient),
            n0=max(base.n0, other.n0),
            prelude=tuple(
                add(eval_seq(base, n), eval_seq(other, n))
                for n in range(1, max(base.n0, other.n0))
            ),
        )
    return base


def _seq_key(seq: ElementSeq):
    return (
        str(seq.static),
        tuple((str(f), c.describe()) for f, c in seq.atoms),
        tuple((str(f.form), f.modulus, f.residue, f.kmin, f.lag, f.value) for f in seq.fills),
        seq.ambient.describe(),
    )


@dataclass(frozen=True)
class SearchResult:
    found: ElementSeq | None
    candidates_checked: int
    note: str


def bruteforce_dominating_search(
    x: ElementSeq, bound: int = 6, probe: int = 10
) -> SearchResult:
    """Search for a decreasing family y_n >= |x_n| with infimum 0.

    Candidates are drawn from a structured class (constant ambients,
    harmonic copies, matched moving atoms, unit-minus-march shapes, and
    pairwise sums) with representation size at most `bound`; domination is
    probed on a window, decrease and the zero infimum are certified by the
    monotone decision rule.
    """
    checked = 0
    window = max(probe, 2 * bound)
    for cand in _candidate_families(x, bound):
        checked += 1
        dominated = True
        for n in range(1, window + 1):
            if not le(abs_(eval_seq(x, n)), eval_seq(cand, n)):
                dominated = False
                break
        if not dominated:
            continue
        try:
            cert = decide_monotone_limit(cand)
        except NotDecreasingError:
            continue
        if cert.converges:
            return SearchResult(cand, checked, "dominating family found")
    return SearchResult(
        None,
        checked,
        f"no decreasing dominating family of size <= {bound} in the candidate class",
    )
