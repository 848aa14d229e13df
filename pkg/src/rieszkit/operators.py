"""Finite symbolic operator representations.

An operator is a generator-image table: explicit atom images below a
threshold, a residue-class affine stencil for the atoms beyond it, images of
the row units (row-block domains), and the image of the unit.  Linear
extension over the generator decomposition defines the operator on the whole
space.  Everything here is exact.

Stencil entries with a stationary output form (slope 0) break local
finiteness; they are representable so the order-boundedness test can refuse
them, but accumulation-based operations reject them.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Tuple

from .errors import (
    InvalidIndexError,
    PreconditionError,
    SpaceMismatchError,
    StencilError,
)
from .scalars import Q, QLike, qof
from .spaces import (
    AtomIndex,
    CoordForm,
    Kind,
    PairForm,
    SpaceDesc,
    TokenForm,
    affine_intersection,
    atom_key,
)
from .elements import (
    Element,
    add,
    atom,
    coordinate,
    le,
    max_abs_coord,
    pos,
    neg,
    abs_,
    scale,
    sub,
    unit,
    zero,
    is_positive as elem_is_positive,
)
from .completion import (
    CompletionElement,
    ce_le,
    embed,
    rowblock_pattern,
    tail_pattern,
    findev_pattern,
)
from .scalars import ZERO_SEQ
from .sequences import ElementSeq, eval_seq, fill, normalize

StencilEntry = Tuple[CoordForm, Q]


@dataclass(frozen=True)
class StencilRule:
    """Images of tail atoms: for the driving index i > threshold with
    i = residue (mod modulus), the atom maps to sum of coeff * atom(form(i)).

    For row-block domains the driving index is the column m and forms are
    pairs affine in (row, column)."""

    modulus: int
    threshold: int
    entries: Tuple[Tuple[StencilEntry, ...], ...]  # indexed by residue

    def entries_for(self, i: int) -> Tuple[StencilEntry, ...]:
        return self.entries[i % self.modulus]

    def is_zero(self) -> bool:
        return all(not es for es in self.entries)


def _validate_form(form: CoordForm, codomain: SpaceDesc, modulus: int, residue: int,
                   threshold: int) -> None:
    from .spaces import form_space_matches

    if not form_space_matches(form, codomain):
        raise StencilError(f"form {form} does not fit codomain {codomain.label}")
    affs = [form.idx] if not isinstance(form, PairForm) else [form.row, form.col]
    for k, aff in enumerate(affs):
        if aff.a < 0:
            raise StencilError(f"index form {aff} eventually leaves the index set")
        if isinstance(form, PairForm) and k == 0:
            # the row component is driven by the free row variable over all n
            if aff.a.denominator != 1 or aff.b.denominator != 1:
                raise StencilError(f"row form {aff} is not integral")
            if aff.at(1) < 1:
                raise StencilError(f"row form {aff} leaves the index set")
            continue
        # driven by the rule variable over the residue class beyond threshold
        if (aff.a * modulus).denominator != 1 or (aff.a * residue + aff.b).denominator != 1:
            raise StencilError(f"index form {aff} is not integral on its class")
        first = threshold + 1
        while first % modulus != residue:
            first += 1
        if aff.at(first) < 1:
            raise StencilError(f"index form {aff} leaves the index set at i={first}")
        if codomain.kind == Kind.FIN_DIM and aff.a != 0:
            raise StencilError("moving forms cannot target a finite-dimensional space")


def stencil_rule(
    modulus: int,
    threshold: int,
    entries_by_residue,
    codomain: SpaceDesc,
) -> StencilRule:
    """Canonical constructor: merges identical forms, rejects forms that
    collide at isolated applicable indices (callers materialize those)."""
    if modulus < 1 or threshold < 0:
        raise StencilError("bad stencil rule header")
    canon = []
    for r in range(modulus):
        raw = list(entries_by_residue[r]) if r < len(entries_by_residue) else []
        merged: list[list] = []
        for form, coeff in raw:
            _validate_form(form, codomain, modulus, r, threshold)
            c = qof(coeff)
            for item in merged:
                if item[0] == form:
                    item[1] += c
                    break
            else:
                merged.append([form, c])
        kept = [(f, c) for f, c in merged if c != 0]
        for i, (f1, _) in enumerate(kept):
            for f2, _ in kept[i + 1 :]:
                n_hit = _entry_collision(f1, f2, modulus, r, threshold)
                if n_hit is not None:
                    raise StencilError(
                        f"stencil entries collide at index {n_hit}; "
                        "materialize it as an explicit image",
                        collision_index=n_hit,
                    )
        kept.sort(key=lambda fc: (str(fc[0]),))
        canon.append(tuple(kept))
    return StencilRule(modulus, threshold, tuple(canon))


def _entry_collision(
    f1: CoordForm, f2: CoordForm, modulus: int, residue: int, threshold: int
) -> int | None:
    """Smallest applicable driving index where two distinct forms coincide."""
    if isinstance(f1, PairForm) != isinstance(f2, PairForm):
        return None
    if isinstance(f1, PairForm):
        rows_meet = f1.row == f2.row or affine_intersection(f1.row, f2.row) is not None
        if not rows_meet:
            return None
        if f1.col == f2.col:
            # collide at every applicable column for the meeting row(s)
            return threshold + 1
        cand = affine_intersection(f1.col, f2.col)
        if cand is None:
            return None
        if cand > threshold and cand % modulus == residue:
            # even a single colliding atom breaks entrywise transforms
            return cand
        return None
    cand = affine_intersection(f1.idx, f2.idx)
    if cand is None:
        return None
    if cand > threshold and cand % modulus == residue:
        return cand
    return None


@dataclass(frozen=True)
class Operator:
    domain: SpaceDesc
    codomain: SpaceDesc
    atom_images: Tuple[Tuple[AtomIndex, Element], ...]
    rule: StencilRule | None
    row_unit_images: Tuple[Tuple[int, Element], ...]
    unit_image: Element

    def explicit_map(self) -> dict:
        return dict(self.atom_images)

    def __add__(self, other: "Operator") -> "Operator":
        return add_op(self, other)

    def __sub__(self, other: "Operator") -> "Operator":
        return add_op(self, scale_op(-1, other))

    def __neg__(self) -> "Operator":
        return scale_op(-1, self)

    def __rmul__(self, c) -> "Operator":
        return scale_op(c, self)


def operator(
    domain: SpaceDesc,
    codomain: SpaceDesc,
    atom_images=None,
    rule: StencilRule | None = None,
    row_unit_images=None,
    unit_image: Element | None = None,
) -> Operator:
    if domain.kind == Kind.FIN_DEV:
        raise PreconditionError(
            "operators from the uncountable kind are not representable"
        )
    images = dict(atom_images or {})
    for idx, img in images.items():
        if img.space != codomain:
            raise SpaceMismatchError(f"image of {idx} lives in {img.space.label}")
    rows = dict(row_unit_images or {})
    if rows and not (domain.kind == Kind.ROW_BLOCK and domain.row_units):
        raise SpaceMismatchError("row-unit images need an ek domain")
    for r, img in rows.items():
        if img.space != codomain:
            raise SpaceMismatchError(f"row-unit image {r} lives in {img.space.label}")
    if domain.kind == Kind.FIN_DIM:
        for idx in images:
            if not isinstance(idx, int) or not 1 <= idx <= domain.dim:
                raise InvalidIndexError(f"atom {idx!r} outside the domain")
        cols = [images.get(i, zero(codomain)) for i in range(1, domain.dim + 1)]
        derived_unit = zero(codomain)
        for c in cols:
            derived_unit = add(derived_unit, c)
        if unit_image is not None and unit_image != derived_unit:
            raise PreconditionError("unit image must equal the sum of atom images")
        return Operator(
            domain,
            codomain,
            tuple(sorted(((i, images.get(i, zero(codomain))) for i in range(1, domain.dim + 1)), key=lambda kv: atom_key(kv[0]))),
            None,
            (),
            derived_unit,
        )
    if unit_image is None:
        raise PreconditionError("domains with a unit need a unit image")
    if unit_image.space != codomain:
        raise SpaceMismatchError("unit image lives in the wrong space")
    # tail_seq: explicit images must sit below the rule threshold, so the
    # rule is materialized up to any index the table reaches past; pair
    # domains instead let explicit entries override the rule pointwise
    # (pattern sums compensate at the overridden atoms)
    if rule is not None and domain.kind == Kind.TAIL_SEQ:
        past = [idx for idx in images if idx > rule.threshold]
        if past:
            new_threshold = max(past)
            for idx in range(rule.threshold + 1, new_threshold + 1):
                images.setdefault(idx, _rule_image(domain, codomain, rule, idx))
            rule = StencilRule(rule.modulus, new_threshold, rule.entries)
    ordered = tuple(sorted(images.items(), key=lambda kv: atom_key(kv[0])))
    row_items = tuple(sorted(rows.items()))
    return Operator(domain, codomain, ordered, rule, row_items, unit_image)


def _driving_index(idx: AtomIndex) -> int:
    if isinstance(idx, tuple):
        return idx[1]
    return idx


def _rule_image(domain, codomain, rule: StencilRule, idx: AtomIndex) -> Element:
    out = zero(codomain)
    if domain.kind == Kind.TAIL_SEQ:
        i = idx
        if rule is None or i <= rule.threshold:
            return out
        for form, c in rule.entries_for(i):
            out = add(out, scale(c, atom(codomain, form.at(i))))
        return out
    n, m = idx
    if rule is None or m <= rule.threshold:
        return out
    for form, c in rule.entries_for(m):
        assert isinstance(form, PairForm)
        out = add(out, scale(c, atom(codomain, (form.row.at_int(n), form.col.at_int(m)))))
    return out


def atom_image(T: Operator, idx: AtomIndex) -> Element:
    for k, img in T.atom_images:
        if k == idx:
            return img
    if T.domain.kind == Kind.FIN_DIM:
        raise InvalidIndexError(f"atom {idx!r} outside the domain")
    if T.rule is not None and _driving_index(idx) > T.rule.threshold:
        return _rule_image(T.domain, T.codomain, T.rule, idx)
    return zero(T.codomain)


def row_unit_image(T: Operator, r: int) -> Element:
    for k, img in T.row_unit_images:
        if k == r:
            return img
    return zero(T.codomain)


# ---------------------------------------------------------------------------
# generator decomposition and application


def decompose(x: Element) -> list:
    """Exact finite decomposition of x over the generator family of its
    space: [(("atom", idx) | ("row_unit", n) | ("unit",), coefficient)]."""
    space = x.space
    out = []
    if space.kind == Kind.FIN_DIM:
        for i, v in enumerate(x.coords, start=1):
            if v != 0:
                out.append((("atom", i), v))
        return out
    if space.kind == Kind.TAIL_SEQ:
        t = x.tail
        for i, v in enumerate(x.prefix, start=1):
            if v - t != 0:
                out.append((("atom", i), v - t))
        if t != 0:
            out.append((("unit",), t))
        return out
    if space.kind == Kind.FIN_DEV:
        amb = x.ambient
        for tok, v in x.entries:
            out.append((("atom", tok), v - amb))
        if amb != 0:
            out.append((("unit",), amb))
        return out
    t = x.tail
    for n, (pref, rt) in enumerate(x.rows, start=1):
        for m, v in enumerate(pref, start=1):
            if v - rt != 0:
                out.append((("atom", (n, m)), v - rt))
        if space.row_units and rt - t != 0:
            out.append((("row_unit", n), rt - t))
    if t != 0:
        out.append((("unit",), t))
    return out


def recompose(space: SpaceDesc, parts) -> Element:
    from .elements import row_unit as row_unit_elem

    out = zero(space)
    for ref, c in parts:
        if ref[0] == "atom":
            out = add(out, scale(c, atom(space, ref[1])))
        elif ref[0] == "row_unit":
            out = add(out, scale(c, row_unit_elem(space, ref[1])))
        else:
            out = add(out, scale(c, unit(space)))
    return out


def apply_op(T: Operator, x: Element) -> Element:
    if x.space != T.domain:
        raise SpaceMismatchError(f"argument lives in {x.space.label}")
    out = zero(T.codomain)
    for ref, c in decompose(x):
        if ref[0] == "atom":
            img = atom_image(T, ref[1])
        elif ref[0] == "row_unit":
            img = row_unit_image(T, ref[1])
        else:
            img = T.unit_image
        if not img.is_zero():
            out = add(out, scale(c, img))
    return out


# ---------------------------------------------------------------------------
# operator arithmetic


def zero_op(domain: SpaceDesc, codomain: SpaceDesc) -> Operator:
    if domain.kind == Kind.FIN_DIM:
        return operator(domain, codomain, {})
    return operator(domain, codomain, {}, None, None, zero(codomain))


def scale_op(c: QLike, T: Operator) -> Operator:
    c_q = qof(c)
    images = {k: scale(c_q, v) for k, v in T.atom_images}
    rows = {k: scale(c_q, v) for k, v in T.row_unit_images}
    rule = None
    if T.rule is not None:
        rule = StencilRule(
            T.rule.modulus,
            T.rule.threshold,
            tuple(
                tuple((f, c_q * cv) for f, cv in es if c_q * cv != 0)
                for es in T.rule.entries
            ),
        )
    if T.domain.kind == Kind.FIN_DIM:
        return operator(T.domain, T.codomain, images)
    return operator(T.domain, T.codomain, images, rule, rows, scale(c_q, T.unit_image))


def add_op(S: Operator, T: Operator) -> Operator:
    if S.domain != T.domain or S.codomain != T.codomain:
        raise SpaceMismatchError("operator shapes differ")
    if S.domain.kind == Kind.FIN_DIM:
        images = {
            i: add(atom_image(S, i), atom_image(T, i))
            for i in range(1, S.domain.dim + 1)
        }
        return operator(S.domain, S.codomain, images)
    threshold = max(
        S.rule.threshold if S.rule else _max_drive(S),
        T.rule.threshold if T.rule else _max_drive(T),
    )
    modulus = 1
    for op_ in (S, T):
        if op_.rule is not None:
            modulus = modulus * op_.rule.modulus // gcd(modulus, op_.rule.modulus)
    merged_entries = []
    for r in range(modulus):
        es = []
        for op_ in (S, T):
            if op_.rule is not None:
                es.extend(op_.rule.entries_for(r))
        merged_entries.append(es)
    rule = None
    if any(merged_entries):
        # isolated collisions between the two stencils get materialized as
        # explicit images past a raised threshold
        while True:
            try:
                rule = stencil_rule(modulus, threshold, merged_entries, S.codomain)
                break
            except StencilError as e:
                if e.collision_index is None:
                    raise
                threshold = e.collision_index
    explicit_idx = set()
    explicit_idx.update(k for k, _ in S.atom_images)
    explicit_idx.update(k for k, _ in T.atom_images)
    if S.domain.kind == Kind.TAIL_SEQ:
        explicit_idx.update(range(1, threshold + 1))
        explicit_idx = {i for i in explicit_idx if i <= threshold}
    else:
        # pair domains: overrides apply pointwise at any driving index, and
        # the below-threshold block is materialized for every touched row
        rows = {idx[0] for idx in explicit_idx if isinstance(idx, tuple)} | {1}
        explicit_idx.update((r, m) for r in rows for m in range(1, threshold + 1))
    images = {}
    for idx in explicit_idx:
        images[idx] = add(atom_image(S, idx), atom_image(T, idx))
    rows_out = {}
    for r in {k for k, _ in S.row_unit_images} | {k for k, _ in T.row_unit_images}:
        rows_out[r] = add(row_unit_image(S, r), row_unit_image(T, r))
    return operator(
        S.domain,
        S.codomain,
        images,
        rule,
        rows_out,
        add(S.unit_image, T.unit_image),
    )


def _max_drive(T: Operator) -> int:
    return max((_driving_index(idx) for idx, _ in T.atom_images), default=0)


def op_eq(S: Operator, T: Operator, window: int = 6) -> bool:
    """Equality on the generator family (exact; window covers explicits)."""
    if S.domain != T.domain or S.codomain != T.codomain:
        return False
    if S.unit_image != T.unit_image:
        return False
    top = max(
        _max_drive(S),
        _max_drive(T),
        S.rule.threshold if S.rule else 0,
        T.rule.threshold if T.rule else 0,
    ) + window
    if S.domain.kind in (Kind.FIN_DIM, Kind.TAIL_SEQ):
        hi = min(top, S.domain.dim) if S.domain.kind == Kind.FIN_DIM else top
        for i in range(1, hi + 1):
            if atom_image(S, i) != atom_image(T, i):
                return False
    else:
        for n in range(1, window + 1):
            for m in range(1, top + 1):
                if atom_image(S, (n, m)) != atom_image(T, (n, m)):
                    return False
        rows = {k for k, _ in S.row_unit_images} | {k for k, _ in T.row_unit_images}
        for r in rows:
            if row_unit_image(S, r) != row_unit_image(T, r):
                return False
    if S.domain.kind == Kind.TAIL_SEQ and (S.rule or T.rule):
        rs = S.rule or StencilRule(1, 0, ((),))
        rt = T.rule or StencilRule(1, 0, ((),))
        mod = rs.modulus * rt.modulus // gcd(rs.modulus, rt.modulus)
        base = max(rs.threshold, rt.threshold, top)
        for r in range(mod):
            i = base + 1
            while i % mod != r:
                i += 1
            if _rule_image(S.domain, S.codomain, rs, i) != _rule_image(
                T.domain, T.codomain, rt, i
            ):
                return False
    return True


# ---------------------------------------------------------------------------
# functionals and rank-one operators


@dataclass(frozen=True)
class Functional:
    """Order-bounded functional: finitely many atom coefficients (the tail
    coefficients vanish, so the modulus sum is a finite closed form), row
    unit coefficients where those exist, and the unit value."""

    domain: SpaceDesc
    atom_coeffs: Tuple[Tuple[AtomIndex, Q], ...]
    row_unit_coeffs: Tuple[Tuple[int, Q], ...]
    unit_value: Q


def functional(domain: SpaceDesc, atom_coeffs=None, unit_value: QLike = 0,
               row_unit_coeffs=None) -> Functional:
    if domain.kind == Kind.FIN_DEV:
        raise PreconditionError("functionals on the uncountable kind are not representable")
    coeffs = {k: qof(v) for k, v in dict(atom_coeffs or {}).items() if qof(v) != 0}
    rows = {k: qof(v) for k, v in dict(row_unit_coeffs or {}).items() if qof(v) != 0}
    u = qof(unit_value)
    if domain.kind == Kind.FIN_DIM:
        u = sum(coeffs.values(), Q(0))
    return Functional(
        domain,
        tuple(sorted(coeffs.items(), key=lambda kv: atom_key(kv[0]))),
        tuple(sorted(rows.items())),
        u,
    )


def apply_functional(f: Functional, x: Element) -> Q:
    if x.space != f.domain:
        raise SpaceMismatchError("argument lives in the wrong space")
    coeffs = dict(f.atom_coeffs)
    rows = dict(f.row_unit_coeffs)
    out = Q(0)
    for ref, c in decompose(x):
        if ref[0] == "atom":
            out += c * coeffs.get(ref[1], Q(0))
        elif ref[0] == "row_unit":
            out += c * rows.get(ref[1], Q(0))
        else:
            out += c * f.unit_value
    return out


def functional_is_positive(f: Functional) -> bool:
    s = sum((v for _, v in f.atom_coeffs), Q(0)) + sum(
        (v for _, v in f.row_unit_coeffs), Q(0)
    )
    return (
        all(v >= 0 for _, v in f.atom_coeffs)
        and all(v >= 0 for _, v in f.row_unit_coeffs)
        and f.unit_value >= s
    )


def functional_abs_sum(f: Functional) -> Q:
    return sum((abs(v) for _, v in f.atom_coeffs), Q(0))


def rank_one(f: Functional, v: Element) -> Operator:
    """The operator x -> f(x) * v."""
    images = {idx: scale(c, v) for idx, c in f.atom_coeffs}
    rows = {r: scale(c, v) for r, c in f.row_unit_coeffs}
    if f.domain.kind == Kind.FIN_DIM:
        return operator(f.domain, v.space, images)
    return operator(f.domain, v.space, images, None, rows, scale(f.unit_value, v))


def coordinate_functional_of(T: Operator, out_idx: AtomIndex) -> Functional:
    """The functional x -> coordinate(T(x), out_idx); finite by local
    finiteness of the tail rule."""
    coeffs: dict = {}
    for idx, img in T.atom_images:
        c = coordinate(img, out_idx)
        if c != 0:
            coeffs[idx] = c
    if T.rule is not None:
        for idx, c in _rule_hits(T, out_idx):
            coeffs[idx] = coeffs.get(idx, Q(0)) + c
    rows = {}
    for r, img in T.row_unit_images:
        c = coordinate(img, out_idx)
        if c != 0:
            rows[r] = c
    return functional(
        T.domain, coeffs, coordinate(T.unit_image, out_idx), rows
    )


def _rule_hits(T: Operator, out_idx: AtomIndex):
    """(atom index, coefficient) pairs where the tail rule touches out_idx."""
    rule = T.rule
    explicit = {k for k, _ in T.atom_images}
    hits = []
    for r in range(rule.modulus):
        for form, c in rule.entries[r]:
            if isinstance(form, PairForm):
                row_t, col_t = out_idx
                ns = _affine_preimages(form.row, row_t)
                ms = [
                    m
                    for m in _affine_preimages(form.col, col_t)
                    if m > rule.threshold and m % rule.modulus == r
                ]
                if ns == "all":
                    raise PreconditionError("rule is not locally finite")
                if ms == "all":
                    raise PreconditionError("rule is not locally finite")
                for n in ns:
                    for m in ms:
                        if (n, m) not in explicit:
                            hits.append(((n, m), c))
            else:
                if isinstance(form, TokenForm):
                    if not (hasattr(out_idx, "family") and out_idx.family == "g"):
                        continue
                    target = out_idx.k
                else:
                    if not isinstance(out_idx, int):
                        continue
                    target = out_idx
                pre = _affine_preimages(form.idx, target)
                if pre == "all":
                    raise PreconditionError("rule is not locally finite")
                for i in pre:
                    if i > rule.threshold and i % rule.modulus == r and i not in explicit:
                        hits.append((i, c))
    return hits


def _affine_preimages(aff, target: int):
    if aff.a == 0:
        return "all" if aff.b == target else []
    n = (Q(target) - aff.b) / aff.a
    if n.denominator != 1 or n.numerator < 1:
        return []
    return [n.numerator]


# ---------------------------------------------------------------------------
# partial sums and image-sum patterns


def partial_sum_seq(T: Operator) -> ElementSeq:
    """s_n = sum of the first n atom images, in closed symbolic form."""
    if T.domain.kind != Kind.TAIL_SEQ:
        raise PreconditionError("partial sums need countably enumerated atoms")
    threshold = T.rule.threshold if T.rule else _max_drive(T)
    static = zero(T.codomain)
    for i in range(1, threshold + 1):
        static = add(static, atom_image(T, i))
    fills = []
    if T.rule is not None:
        for r in range(T.rule.modulus):
            for form, c in T.rule.entries[r]:
                aff = form.idx
                if aff.a == 0:
                    if c != 0:
                        raise StencilError(
                            "stationary stencil entries admit no closed accumulation form"
                        )
                    continue
                first = threshold + 1
                while first % T.rule.modulus != r:
                    first += 1
                fills.append(fill(form, T.rule.modulus, r, first, 0, c))
    prelude = []
    acc = zero(T.codomain)
    for n in range(1, threshold):
        acc = add(acc, atom_image(T, n))
        prelude.append(acc)
    seq = ElementSeq(
        T.codomain,
        static,
        (),
        tuple(fills),
        ZERO_SEQ,
        max(threshold, 1),
        tuple(prelude),
    )
    return normalize(seq)


_TRANSFORMS = {
    "id": lambda c: c,
    "pos": lambda c: max(c, Q(0)),
    "neg": lambda c: max(-c, Q(0)),
    "abs": lambda c: abs(c),
}

_ELEM_TRANSFORMS = {"id": lambda x: x, "pos": pos, "neg": neg, "abs": abs_}


def image_sum_pattern(T: Operator, transform: str = "id") -> CompletionElement:
    """The coordinatewise sum over all atoms of transform(T(atom)).

    Exact because the tail rule is locally finite: every output coordinate
    receives finitely many contributions, eventually periodically.  Explicit
    entries that override the rule (pair domains) are compensated, since the
    rule pieces sweep over every atom beyond the threshold.
    """
    tf = _TRANSFORMS[transform]
    etf = _ELEM_TRANSFORMS[transform]
    explicit = zero(T.codomain)
    for idx, img in T.atom_images:
        explicit = add(explicit, etf(img))
        explicit = sub(explicit, _rule_transformed_image(T, idx, tf))
    pieces = []
    if T.rule is not None:
        for r in range(T.rule.modulus):
            first = T.rule.threshold + 1
            while first % T.rule.modulus != r:
                first += 1
            for form, c in T.rule.entries[r]:
                v = tf(c)
                if v == 0:
                    continue
                pieces.append(_piece_of(form, T.rule.modulus, first, v))
    return _pattern_from_pieces(T.codomain, explicit, pieces)


def _rule_transformed_image(T: Operator, idx: AtomIndex, tf) -> Element:
    """What the rule pieces contribute at an explicitly overridden atom."""
    if T.rule is None or _driving_index(idx) <= T.rule.threshold:
        return zero(T.codomain)
    out = zero(T.codomain)
    i = _driving_index(idx)
    for form, c in T.rule.entries_for(i):
        v = tf(c)
        if v == 0:
            continue
        if isinstance(form, PairForm):
            coordn = (form.row.at_int(idx[0]), form.col.at_int(i))
        else:
            coordn = form.at(i)
        out = add(out, scale(v, atom(T.codomain, coordn)))
    return out


def row_sum_pattern(T: Operator, row: int, transform: str = "id") -> CompletionElement:
    """Sum over the atoms of one row of a row-block domain."""
    if T.domain.kind != Kind.ROW_BLOCK:
        raise PreconditionError("row sums need a row-block domain")
    tf = _TRANSFORMS[transform]
    etf = _ELEM_TRANSFORMS[transform]
    explicit = zero(T.codomain)
    for idx, img in T.atom_images:
        if isinstance(idx, tuple) and idx[0] == row:
            explicit = add(explicit, etf(img))
            explicit = sub(explicit, _rule_transformed_image(T, idx, tf))
    pieces = []
    if T.rule is not None:
        for r in range(T.rule.modulus):
            first = T.rule.threshold + 1
            while first % T.rule.modulus != r:
                first += 1
            for form, c in T.rule.entries[r]:
                v = tf(c)
                if v == 0:
                    continue
                assert isinstance(form, PairForm)
                out_row = form.row.at_int(row)
                col_step = int(form.col.a * T.rule.modulus)
                col_first = form.col.at_int(first)
                pieces.append(("rowcol", 0, out_row, col_step, col_first, v))
    return _pattern_from_pieces(T.codomain, explicit, pieces)


def _piece_of(form: CoordForm, modulus: int, first: int, value: Q):
    if isinstance(form, PairForm):
        row_step = int(form.row.a)
        row_first = form.row.at_int(1)
        col_step = int(form.col.a * modulus)
        col_first = form.col.at_int(first)
        return ("rowcol", row_step, row_first, col_step, col_first, value)
    step_q = form.idx.a * modulus
    step = int(step_q)
    start = form.idx.at_int(first)
    kind = "token" if isinstance(form, TokenForm) else "seq"
    return (kind, step, start, value)


def _covers(step: int, first: int, i: int) -> bool:
    if step == 0:
        return i == first
    return i >= first and (i - first) % step == 0


def _pattern_from_pieces(codomain: SpaceDesc, explicit: Element, pieces) -> CompletionElement:
    if codomain.kind == Kind.FIN_DIM:
        out = explicit
        for piece in pieces:
            _, step, start, value = piece
            if step != 0:
                raise StencilError("moving pieces cannot target a finite-dimensional space")
            out = add(out, scale(value, atom(codomain, start)))
        return CompletionElement(codomain, out)
    if codomain.kind in (Kind.TAIL_SEQ, Kind.FIN_DEV):
        line_pieces = [(p[1], p[2], p[3]) for p in pieces]
        mod = 1
        for step, _, _ in line_pieces:
            if step:
                mod = mod * step // gcd(mod, step)
        if codomain.kind == Kind.TAIL_SEQ:
            base_len = len(explicit.prefix)
            base_val = lambda i: coordinate(explicit, i)  # noqa: E731
        else:
            line_keys = [t.k for t, _ in explicit.entries if t.family == "g"]
            base_len = max(line_keys, default=0)
            from .spaces import gamma

            base_val = lambda i: coordinate(explicit, gamma(i))  # noqa: E731
        th = max([base_len] + [first for _, first, _ in line_pieces] + [0])
        th += (-th) % mod

        def v(i: int) -> Q:
            out = base_val(i)
            for step, first, value in line_pieces:
                if _covers(step, first, i):
                    out += value
            return out

        prefix = [v(i) for i in range(1, th + 1)]
        residues = [Q(0)] * mod
        for j in range(1, mod + 1):
            residues[(th + j) % mod] = v(th + j)
        line = tail_pattern(prefix, mod, residues)
        if codomain.kind == Kind.TAIL_SEQ:
            return CompletionElement(codomain, line)
        extra = {t: val for t, val in explicit.entries if t.family != "g"}
        return CompletionElement(
            codomain, findev_pattern(extra, line, explicit.ambient)
        )
    # row-block codomain
    rb = [p for p in pieces]
    row_mod = 1
    col_mod = 1
    for _, row_step, _, col_step, _, _ in rb:
        if row_step:
            row_mod = row_mod * row_step // gcd(row_mod, row_step)
        if col_step:
            col_mod = col_mod * col_step // gcd(col_mod, col_step)
    rth = max([len(explicit.rows)] + [rf for _, _, rf, _, _, _ in rb] + [0])
    rth += (-rth) % row_mod
    cth = max(
        [max((len(p) for p, _ in explicit.rows), default=0)]
        + [cf for _, _, _, _, cf, _ in rb]
        + [0]
    )
    cth += (-cth) % col_mod

    def cell(n: int, m: int) -> Q:
        out = coordinate(explicit, (n, m))
        for _, row_step, row_first, col_step, col_first, value in rb:
            if _covers(row_step, row_first, n) and _covers(col_step, col_first, m):
                out += value
        return out

    def row_pattern(n: int):
        prefix = [cell(n, m) for m in range(1, cth + 1)]
        residues = [Q(0)] * col_mod
        for j in range(1, col_mod + 1):
            residues[(cth + j) % col_mod] = cell(n, cth + j)
        return tail_pattern(prefix, col_mod, residues)

    rows = [row_pattern(n) for n in range(1, rth + 1)]
    row_residues = [None] * row_mod
    for j in range(1, row_mod + 1):
        row_residues[(rth + j) % row_mod] = row_pattern(rth + j)
    return CompletionElement(codomain, rowblock_pattern(rows, row_residues))


def pattern_max_abs(ce: CompletionElement) -> Q:
    p = ce.pat
    if isinstance(p, Element):
        return max_abs_coord(p)
    from .completion import FinDevPattern, TailPattern

    if isinstance(p, TailPattern):
        return max((abs(v) for v in p.all_values()), default=Q(0))
    if isinstance(p, FinDevPattern):
        vals = [abs(p.ambient)] + [abs(v) for _, v in p.extra] + [
            abs(v) for v in p.line.all_values()
        ]
        return max(vals)
    vals = [Q(0)]
    for row in list(p.rows) + list(p.row_residues):
        vals.extend(abs(v) for v in row.all_values())
    return max(vals)


# ---------------------------------------------------------------------------
# order boundedness


@dataclass(frozen=True)
class BoundReport:
    bounded: bool
    bound: Element | None
    note: str


def order_bounded_test(T: Operator) -> BoundReport:
    """Order boundedness via the modulus partial sums.

    The increasing family sum_{k<=n} |T(e_k)| is bounded above exactly when
    the tail rule keeps local finiteness (no stationary entry leaks into a
    fixed coordinate); the bound combines its supremum with the unit and
    row-unit images.
    """
    leak = _stationary_leak(T)
    if leak is not None:
        return BoundReport(
            False,
            None,
            f"coordinate {leak} accumulates unboundedly through the tail rule",
        )
    m = pattern_max_abs(image_sum_pattern(T, "abs"))
    m = max(m, max_abs_coord(T.unit_image))
    for _, img in T.row_unit_images:
        m = max(m, max_abs_coord(img))
    return BoundReport(True, scale(m, unit(T.codomain)), "modulus partial sums settle")


def _stationary_leak(T: Operator):
    if T.rule is None:
        return None
    for r in range(T.rule.modulus):
        for form, c in T.rule.entries[r]:
            if c == 0:
                continue
            if isinstance(form, PairForm):
                if form.row.a == 0 or form.col.a == 0:
                    return (form.row.at_int(1), form.col.at_int(max(T.rule.threshold + 1, 1)))
            elif form.idx.a == 0:
                return form.at(T.rule.threshold + 1)
    return None


# ---------------------------------------------------------------------------
# positivity


def is_positive_operator(T: Operator, probe: int = 6) -> bool:
    for _, img in T.atom_images:
        if not elem_is_positive(img):
            return False
    if T.rule is not None:
        for es in T.rule.entries:
            for _, c in es:
                if c < 0:
                    return False
    for _, img in T.row_unit_images:
        if not elem_is_positive(img):
            return False
    if T.domain.kind == Kind.FIN_DIM:
        return True
    if T.domain.kind == Kind.TAIL_SEQ:
        if not order_bounded_test(T).bounded:
            return False
        s = partial_sum_seq(T)
        top = T.rule.threshold if T.rule else _max_drive(T)
        for n in range(1, top + probe + 1):
            if not le(eval_seq(s, n), T.unit_image):
                return False
        return ce_le(image_sum_pattern(T, "id"), embed(T.unit_image))
    if T.domain.kind == Kind.ROW_BLOCK and not T.domain.row_units:
        if not order_bounded_test(T).bounded:
            return False
        return ce_le(image_sum_pattern(T, "id"), embed(T.unit_image))
    # ek domain: the row-unit generators force row-level conditions
    if T.rule is not None and not T.rule.is_zero():
        return False
    rows = {k for k, _ in T.row_unit_images}
    for r in rows:
        if not ce_le(row_sum_pattern(T, r, "id"), embed(row_unit_image(T, r))):
            return False
    total = zero(T.codomain)
    for _, img in T.row_unit_images:
        total = add(total, img)
    for idx, img in T.atom_images:
        if isinstance(idx, tuple) and idx[0] not in rows:
            total = add(total, img)
    return le(total, T.unit_image)
