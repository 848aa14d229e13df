"""Symbolically represented element sequences.

An ElementSeq denotes (x_n) for n >= 1 through four components:

  static   -- a fixed element added at every step
  atoms    -- finitely many (coordinate form, coefficient sequence) pairs;
              the form is affine in n (a stationary form has slope zero,
              a moving form strictly escapes every finite coordinate set)
  fills    -- accumulation terms: a fill contributes `value` at every
              coordinate form(k) with k in a residue class, kmin <= k <= n-lag
              (these are the closed forms of stencil partial sums)
  ambient  -- a scalar sequence multiplying the unit at every step

For n < n0 an explicit prelude overrides the symbolic form, so evaluation is
exact at every index.  All decision procedures work from two facts about
this class: for a fixed coordinate the value sequence is eventually constant
(or a harmonic multiple), and the coordinatewise limits form a representable
completion pattern.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Tuple

from .errors import SpaceMismatchError, StencilError
from .scalars import Q, QLike, RationalSeq, ZERO_SEQ, qof
from .spaces import (
    CoordForm,
    Kind,
    PairForm,
    SeqForm,
    SpaceDesc,
    TokenForm,
    affine,
    form_space_matches,
    forms_collide_at,
)
from .elements import Element, add, atom, scale, unit, zero
from .completion import (
    CompletionElement,
    findev_pattern,
    pattern_from_tail,
    rowblock_pattern,
    tail_pattern,
)

MovingAtom = Tuple[CoordForm, RationalSeq]


@dataclass(frozen=True)
class Fill:
    """Accumulated coordinates {form(k) : k ≡ residue (mod modulus), kmin <= k <= n-lag}."""

    form: CoordForm
    modulus: int
    residue: int
    kmin: int
    lag: int
    value: Q

    def ks_at(self, n: int) -> list[int]:
        top = n - self.lag
        if top < self.kmin:
            return []
        first = self.kmin + ((self.residue - self.kmin) % self.modulus)
        return list(range(first, top + 1, self.modulus))

    def line_params(self) -> tuple[Q, Q]:
        """The covered coordinate line as (step, offset) over the class index."""
        if isinstance(self.form, PairForm):
            raise StencilError("row_block fills are not supported")
        a, b = self.form.idx.a, self.form.idx.b
        return (a * self.modulus, a * self.residue + b)


def fill(form: CoordForm, modulus: int, residue: int, kmin: int, lag: int, value: QLike) -> Fill:
    if modulus < 1 or not 0 <= residue < modulus:
        raise StencilError("bad fill residue class")
    if isinstance(form, PairForm):
        raise StencilError("row_block fills are not supported")
    if form.idx.a <= 0:
        raise StencilError("fill forms must be strictly moving")
    return Fill(form, modulus, residue, max(kmin, 1), lag, qof(value))


@dataclass(frozen=True)
class ElementSeq:
    space: SpaceDesc
    static: Element
    atoms: Tuple[MovingAtom, ...]
    fills: Tuple[Fill, ...]
    ambient: RationalSeq
    n0: int = 1
    prelude: Tuple[Element, ...] = ()


def element_seq(
    space: SpaceDesc,
    static: Element | None = None,
    atoms=(),
    fills=(),
    ambient: RationalSeq | None = None,
    n0: int = 1,
    prelude=(),
) -> ElementSeq:
    """Canonical constructor: validates forms, merges duplicates, and pushes
    the prelude past any aliasing of distinct atom forms."""
    static = static if static is not None else zero(space)
    if static.space != space:
        raise SpaceMismatchError("static part lives in the wrong space")
    ambient = ambient if ambient is not None else ZERO_SEQ
    if ambient.kind == "harmonic":
        raise StencilError("ambient sequences must be eventually constant")
    merged: list[MovingAtom] = []
    for form, coeff in atoms:
        if not form_space_matches(form, space):
            raise SpaceMismatchError(f"atom form {form} does not fit {space.label}")
        for i, (f2, c2) in enumerate(merged):
            if f2 == form:
                merged[i] = (f2, c2.add(coeff))
                break
        else:
            merged.append((form, coeff))
    merged = [(f, c) for f, c in merged if not c.is_zero()]
    fills = tuple(f for f in fills if f.value != 0)
    for f in fills:
        if not form_space_matches(f.form, space):
            raise SpaceMismatchError(f"fill form {f.form} does not fit {space.label}")
    # distinct forms may alias at finitely many steps; hide those behind the
    # prelude so symbolic reasoning can assume injective supports
    collide = 0
    for i, (f1, _) in enumerate(merged):
        for f2, _ in merged[i + 1 :]:
            hits = forms_collide_at(f1, f2)
            if hits:
                collide = max(collide, max(hits) + 1)
    seq = ElementSeq(space, static, tuple(merged), fills, ambient, n0, tuple(prelude))
    if collide > seq.n0:
        pre = [
            (prelude[k] if k < len(seq.prelude) else _eval_symbolic(seq, k + 1))
            for k in range(collide - 1)
        ]
        seq = replace(seq, n0=collide, prelude=tuple(pre))
    if len(seq.prelude) != seq.n0 - 1:
        raise StencilError("prelude must cover exactly the steps below n0")
    return seq


def _eval_symbolic(seq: ElementSeq, n: int) -> Element:
    """The symbolic value at step n (ignores the prelude)."""
    space = seq.space
    hits: dict = {}
    for form, coeff in seq.atoms:
        c = coeff.at(n)
        if c != 0:
            idx = form.at(n)
            hits[idx] = hits.get(idx, Q(0)) + c
    for f in seq.fills:
        for k in f.ks_at(n):
            idx = f.form.at(k)
            hits[idx] = hits.get(idx, Q(0)) + f.value
    out = seq.static
    amb = seq.ambient.at(n)
    if amb != 0:
        out = add(out, scale(amb, unit(space)))
    for idx, v in sorted(hits.items(), key=_hit_key):
        if v != 0:
            out = add(out, scale(v, atom(space, idx)))
    return out


def _hit_key(kv):
    from .spaces import atom_key

    return atom_key(kv[0])


def eval_seq(seq: ElementSeq, n: int) -> Element:
    if n < 1:
        raise ValueError("sequence index starts at 1")
    if n < seq.n0:
        return seq.prelude[n - 1]
    return _eval_symbolic(seq, n)


# ---------------------------------------------------------------------------
# builders


def sub_element(seq: ElementSeq, x: Element) -> ElementSeq:
    if x.space != seq.space:
        raise SpaceMismatchError("cannot subtract across spaces")
    return ElementSeq(
        seq.space,
        add(seq.static, scale(-1, x)),
        seq.atoms,
        seq.fills,
        seq.ambient,
        seq.n0,
        tuple(add(p, scale(-1, x)) for p in seq.prelude),
    )


def scale_seq(c: QLike, seq: ElementSeq) -> ElementSeq:
    c_q = qof(c)
    return ElementSeq(
        seq.space,
        scale(c_q, seq.static),
        tuple((f, s.scale(c_q)) for f, s in seq.atoms),
        tuple(replace(f, value=f.value * c_q) for f in seq.fills),
        seq.ambient.scale(c_q),
        seq.n0,
        tuple(scale(c_q, p) for p in seq.prelude),
    )


# ---------------------------------------------------------------------------
# normalization: merge fills on the same coordinate line (telescoping)


def normalize(seq: ElementSeq) -> ElementSeq:
    """Merge fills covering the same coordinate line.

    Overlapping ranges add their values; range boundaries that do not cancel
    come back as static corrections (lower end) or moving atoms (upper end).
    Only full classes (modulus 1) telescope; other fills stay as they are.
    """
    groups: dict = {}
    passthrough = []
    for f in seq.fills:
        if f.modulus != 1:
            passthrough.append(f)
            continue
        step, offset = f.line_params()
        if step.denominator != 1 or offset.denominator != 1:
            passthrough.append(f)
            continue
        key = (type(f.form), int(step), int(offset) % int(step))
        groups.setdefault(key, []).append(f)
    static_extra = zero(seq.space)
    new_atoms = list(seq.atoms)
    new_fills = list(passthrough)
    for (form_type, step, base), fs in sorted(
        groups.items(), key=lambda kv: (kv[0][0].__name__, kv[0][1], kv[0][2])
    ):
        # express each fill by its line index j: coordinate = step*j + base
        parts = []
        for f in fs:
            a, b = f.line_params()
            delta = (int(b) - base) // step
            parts.append((f.kmin + delta, f.lag - delta, f.value))
        jmins = [p[0] for p in parts]
        lags = [p[1] for p in parts]
        total = sum((p[2] for p in parts), Q(0))
        jmin, jmax = min(jmins), max(jmins)
        lag_min, lag_max = min(lags), max(lags)
        # lower boundary: line indices present in some but not all ranges
        for j in range(jmin, jmax):
            v = sum((p[2] for p in parts if p[0] <= j), Q(0))
            if v != 0 and step * j + base >= 1:
                static_extra = add(
                    static_extra,
                    scale(v, atom(seq.space, _line_coord(form_type, step * j + base))),
                )
        # upper boundary: the last few line indices, moving with n
        for lag in range(lag_min, lag_max):
            v = sum((p[2] for p in parts if p[1] <= lag), Q(0))
            if v != 0:
                form = _line_form(form_type, step, base - step * lag)
                new_atoms.append((form, RationalSeq.const(v)))
        if total != 0:
            form = _line_form(form_type, step, base)
            new_fills.append(
                Fill(form, 1, 0, jmax, lag_max, total)
            )
    return element_seq(
        seq.space,
        add(seq.static, static_extra),
        new_atoms,
        new_fills,
        seq.ambient,
        seq.n0,
        seq.prelude,
    )


def _line_coord(form_type, index: int):
    from .spaces import gamma

    if form_type is TokenForm:
        return gamma(index)
    return index


def _line_form(form_type, a: int, b: int) -> CoordForm:
    if form_type is TokenForm:
        return TokenForm(affine(a, b))
    return SeqForm(affine(a, b))


# ---------------------------------------------------------------------------
# structural threshold and eventual pattern


def structural_threshold(seq: ElementSeq) -> int:
    """An index beyond which all components are in their eventual regime."""
    t = seq.n0
    t = max(t, seq.ambient.settle_bound())
    for _, coeff in seq.atoms:
        t = max(t, coeff.settle_bound())
    for f in seq.fills:
        t = max(t, f.kmin + f.lag + f.modulus)
    return t + 1


def eventual_pattern(seq: ElementSeq) -> CompletionElement:
    """Coordinatewise limits of the sequence, as a completion pattern.

    Moving atoms hit each fixed coordinate at most finitely often and
    contribute nothing; stationary atoms contribute their eventual
    coefficient; a fill eventually covers its whole coordinate line.
    """
    space = seq.space
    amb_lim = seq.ambient.limit()
    stationary: dict = {}
    for form, coeff in seq.atoms:
        if not form.moving:
            ev = coeff.eventual_value()
            v = Q(0) if ev is None else ev  # harmonic decays vanish in the limit
            if v != 0:
                idx = form.at(seq.n0)
                stationary[idx] = stationary.get(idx, Q(0)) + v
    if space.kind == Kind.FIN_DIM:
        out = add(seq.static, scale(amb_lim, unit(space)))
        for idx, v in sorted(stationary.items()):
            out = add(out, scale(v, atom(space, idx)))
        return CompletionElement(space, out)
    if space.kind in (Kind.TAIL_SEQ, Kind.FIN_DEV):
        pieces = []  # (step, first_coord, value) on the coordinate line
        for f in seq.fills:
            step, offset = f.line_params()
            if step.denominator != 1 or offset.denominator != 1:
                raise StencilError("fill line is not integral")
            first_k = f.kmin + ((f.residue - f.kmin) % f.modulus)
            pieces.append((int(step), f.form.idx.at_int(first_k), f.value))
        mod = 1
        for step, _, _ in pieces:
            mod = mod * step // _gcd(mod, step)
        if space.kind == Kind.TAIL_SEQ:
            static_extent = [len(seq.static.prefix)]
        else:
            static_extent = [t.k for t, _ in seq.static.entries if t.family == "g"]
        th = max(
            [0]
            + [fc for _, fc, _ in pieces]
            + static_extent
            + [
                idx if isinstance(idx, int) else idx.k
                for idx in stationary
                if space.kind == Kind.TAIL_SEQ or getattr(idx, "family", "") == "g"
            ]
        )
        th += (-th) % mod

        def line_value(i: int) -> Q:
            v = amb_lim
            if space.kind == Kind.TAIL_SEQ:
                v += (
                    seq.static.prefix[i - 1]
                    if i <= len(seq.static.prefix)
                    else seq.static.tail
                )
                v += stationary.get(i, Q(0))
            else:
                from .spaces import gamma

                from .elements import coordinate

                v += coordinate(seq.static, gamma(i))
                v += stationary.get(gamma(i), Q(0))
            for step, first, val in pieces:
                if i >= first and (i - first) % step == 0:
                    v += val
            return v

        prefix = [line_value(i) for i in range(1, th + 1)]
        residues = [Q(0)] * mod
        for j in range(1, mod + 1):
            residues[(th + j) % mod] = line_value(th + j)
        line = tail_pattern(prefix, mod, residues)
        if space.kind == Kind.TAIL_SEQ:
            return CompletionElement(space, line)
        extra = {}
        for tok, v in seq.static.entries:
            if tok.family != "g":
                extra[tok] = v + amb_lim
        for idx, v in stationary.items():
            if idx.family != "g":
                extra[idx] = extra.get(idx, seq.static.ambient + amb_lim) + v
        ambient = seq.static.ambient + amb_lim
        return CompletionElement(space, findev_pattern(extra, line, ambient))
    # row_block: no fills in this class, so the pattern is static + stationary
    if seq.fills:
        raise StencilError("row_block sequences do not carry fills")
    base = add(seq.static, scale(amb_lim, unit(space)))
    for idx, v in sorted(stationary.items()):
        base = add(base, scale(v, atom(space, idx)))
    rows = [pattern_from_tail(p, rt) for p, rt in base.rows]
    return CompletionElement(
        space, rowblock_pattern(rows, [pattern_from_tail([], base.tail)])
    )


def _gcd(a: int, b: int) -> int:
    from math import gcd

    return gcd(a, b)


# ---------------------------------------------------------------------------
# bounds


def deviation_bound(seq: ElementSeq) -> Q:
    """A bound M with |x_n| <= M * unit for all n (the class is bounded)."""
    from .elements import max_abs_coord

    m = max_abs_coord(seq.static) + seq.ambient.max_abs()
    for _, coeff in seq.atoms:
        m += coeff.max_abs()
    for f in seq.fills:
        m += abs(f.value)
    for p in seq.prelude:
        m = max(m, max_abs_coord(p))
    return m


def cover_shift(seq: ElementSeq) -> int:
    """A shift s such that every coordinate with line index i is settled by
    step i + s: fills have reached it and transient atoms have passed."""
    s = structural_threshold(seq)
    for f in seq.fills:
        step, _ = f.line_params()
        # coordinate step*j+offset arrives at k = modulus-granular j plus lag
        s = max(s, f.kmin + f.lag + f.modulus + 1)
    for form, coeff in seq.atoms:
        if form.moving:
            b = form.idx.b
            s = max(s, int(-b) + 1 if b < 0 else 1)
    return s
