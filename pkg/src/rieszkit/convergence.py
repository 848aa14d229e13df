"""Decision procedures for monotone limits, order convergence, and uniform
Cauchy-ness, with re-checkable certificates.

The decision rules per space kind:

  monotone family b_n decreasing:  b_n decreases to zero iff every
  coordinate's value sequence has infimum 0, and -- for the uncountably
  indexed kind -- the ambient sequence also tends to 0.  The ambient clause
  is forced by the representation: a countable union of finite supports
  misses some fresh point, whose value is the ambient, so a persistent
  ambient eps yields the positive minorant eps * indicator(fresh point).

  order convergence x_n -> L:  the sequence is order bounded by class
  structure, and converges iff every coordinate's value sequence tends to
  the limit's coordinate (ambient included for the uncountable kind).  The
  certificate carries an explicit dominating family for the part that a
  same-index decreasing family can dominate, and an escaping-support record
  for moving bumps, which are dominated by the net of finite-support
  cut-downs of the order bound (an order-convergence witness that is
  provably not replaceable by a same-index family in the uncountable kind).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .errors import NotDecreasingError, PreconditionError, SpaceMismatchError
from .scalars import Q, RationalSeq, qstr
from .spaces import Kind, SpaceDesc, Token, fresh_star, seq_form
from .elements import (
    Element,
    abs_,
    atom,
    le,
    max_abs_coord,
    scale,
    sub,
    unit,
    zero,
)
from .completion import CompletionElement
from .sequences import (
    ElementSeq,
    MovingAtom,
    cover_shift,
    deviation_bound,
    element_seq,
    eval_seq,
    eventual_pattern,
    fill,
    normalize,
    structural_threshold,
    sub_element,
)

CONVERGES = "converges"
DIVERGES = "diverges"


@dataclass(frozen=True)
class ConvergenceCertificate:
    verdict: str
    space: SpaceDesc
    mode: str = "order"  # "monotone" | "order" | "o1_obstruction"
    dominating: ElementSeq | None = None
    escaping: Tuple[MovingAtom, ...] = ()
    escape_bound: Q = Q(0)
    order_bound: Element | None = None
    minorant: Element | None = None
    bad_class: str | None = None
    bad_value: Q | None = None
    n0: int = 1
    anchors: Tuple[str, ...] = ()
    notes: Tuple[str, ...] = ()

    @property
    def converges(self) -> bool:
        return self.verdict == CONVERGES


@dataclass(frozen=True)
class UniformCauchyResult:
    is_cauchy: bool
    regulator: Element | None
    note: str


# ---------------------------------------------------------------------------
# decreasing check


def check_decreasing(b: ElementSeq, probe: int = 8) -> int:
    """Verify b_{n+1} <= b_n for all n; returns the verified window end.

    Concrete element comparisons cover every step up to the structural
    threshold plus the probe; beyond that the eventual regime makes the
    comparisons recur verbatim, which the symbolic conditions certify:
    nonincreasing ambient, nonincreasing stationary coefficients,
    nonpositive moving coefficients and fill values.
    """
    window = structural_threshold(b) + probe
    for n in range(1, window + 1):
        if not le(eval_seq(b, n + 1), eval_seq(b, n)):
            raise NotDecreasingError(n, f"b({n + 1}) !<= b({n})")
    if not b.ambient.is_nonincreasing_from(1):
        raise NotDecreasingError(window, "ambient sequence increases in the tail")
    for form, coeff in b.atoms:
        if form.moving:
            ev = coeff.eventual_value()
            if ev is not None and ev > 0:
                raise NotDecreasingError(
                    window, f"moving coefficient at {form} stays positive"
                )
            if coeff.kind == "harmonic" and coeff.value > 0:
                raise NotDecreasingError(
                    window, f"moving coefficient at {form} stays positive"
                )
        else:
            if not coeff.is_nonincreasing_from(1):
                raise NotDecreasingError(
                    window, f"stationary coefficient at {form} increases"
                )
    for f in b.fills:
        if f.value > 0:
            raise NotDecreasingError(window, f"fill at {f.form} adds positive mass")
    return window


# ---------------------------------------------------------------------------
# witnesses for a nonzero eventual pattern


def _pattern_witness(pat: CompletionElement) -> tuple[object | None, Q, str]:
    """(coordinate, value, description) of the first nonzero pattern class.

    A None coordinate means the obstruction sits on the ambient class of the
    uncountable kind: every fresh point keeps that value.
    """
    space = pat.space
    p = pat.pat
    if isinstance(p, Element):
        for i, v in enumerate(p.coords, start=1):
            if v != 0:
                return i, v, f"coordinate {i} settles at {qstr(v)}"
        return None, Q(0), "zero"
    if space.kind == Kind.TAIL_SEQ:
        for i, v in enumerate(p.prefix, start=1):
            if v != 0:
                return i, v, f"coordinate {i} settles at {qstr(v)}"
        for r, v in enumerate(p.residues):
            if v != 0:
                i = len(p.prefix) + 1
                while i % p.modulus != r:
                    i += 1
                return i, v, f"coordinates = {r} mod {p.modulus} settle at {qstr(v)}"
        return None, Q(0), "zero"
    if space.kind == Kind.FIN_DEV:
        for tok, v in p.extra:
            if v != 0:
                return tok, v, f"coordinate {tok} settles at {qstr(v)}"
        for i, v in enumerate(p.line.prefix, start=1):
            if v != 0:
                from .spaces import gamma

                return gamma(i), v, f"coordinate g({i}) settles at {qstr(v)}"
        for r, v in enumerate(p.line.residues):
            if v != 0:
                from .spaces import gamma

                i = len(p.line.prefix) + 1
                while i % p.line.modulus != r:
                    i += 1
                return gamma(i), v, f"line residue {r} mod {p.line.modulus} settles at {qstr(v)}"
        if p.ambient != 0:
            return None, p.ambient, f"ambient value stays {qstr(p.ambient)} at every untouched point"
        return None, Q(0), "zero"
    # row_block
    for n, row in enumerate(p.rows, start=1):
        for m, v in enumerate(row.prefix, start=1):
            if v != 0:
                return (n, m), v, f"cell ({n},{m}) settles at {qstr(v)}"
        for r, v in enumerate(row.residues):
            if v != 0:
                m = len(row.prefix) + 1
                while m % row.modulus != r:
                    m += 1
                return (n, m), v, f"row {n} tail settles at {qstr(v)}"
    for rr, row in enumerate(p.row_residues):
        for m, v in enumerate(list(row.prefix) + list(row.residues), start=1):
            if v != 0:
                n = len(p.rows) + 1
                while n % p.row_modulus != rr:
                    n += 1
                return (n, max(m, 1)), v, f"row class {rr} settles nonzero"
    return None, Q(0), "zero"


def _tokens_in_play(seq: ElementSeq) -> set[Token]:
    toks: set[Token] = set()
    if seq.space.kind != Kind.FIN_DEV:
        return toks
    toks.update(t for t, _ in seq.static.entries)
    for p in seq.prelude:
        toks.update(t for t, _ in p.entries)
    return toks


# ---------------------------------------------------------------------------
# monotone limits


def decide_monotone_limit(b: ElementSeq, probe: int = 8) -> ConvergenceCertificate:
    """Decide whether the (verified decreasing) family b_n has infimum 0."""
    b = normalize(b)
    check_decreasing(b, probe)
    pat = eventual_pattern(b)
    if pat.is_zero():
        return ConvergenceCertificate(
            verdict=CONVERGES,
            space=b.space,
            mode="monotone",
            dominating=b,
            n0=b.n0,
            anchors=("monotone-coordinate-rule",),
            notes=("every coordinate class of the family settles at 0",),
        )
    coord, value, desc = _pattern_witness(pat)
    if value > 0:
        if coord is None:
            star = fresh_star(_tokens_in_play(b))
            minorant = scale(value / 2, atom(b.space, star))
            note = (
                f"every countable union of finite supports misses {star}; "
                f"the family keeps value >= {qstr(value)} there"
            )
            anchors = ("uncountable-ambient-obstruction",)
        else:
            minorant = scale(value, atom(b.space, coord))
            note = desc
            anchors = ("monotone-coordinate-rule",)
        return ConvergenceCertificate(
            verdict=DIVERGES,
            space=b.space,
            mode="monotone",
            minorant=minorant,
            bad_class=desc,
            bad_value=value,
            n0=b.n0,
            anchors=anchors,
            notes=(note,),
        )
    return ConvergenceCertificate(
        verdict=DIVERGES,
        space=b.space,
        mode="monotone",
        bad_class=desc,
        bad_value=value,
        n0=b.n0,
        anchors=("monotone-coordinate-rule",),
        notes=(f"family is not nonnegative in the limit: {desc}",),
    )


# ---------------------------------------------------------------------------
# order convergence


def _build_residual(d: ElementSeq, bound: Q) -> tuple[ElementSeq, Tuple[MovingAtom, ...]]:
    """Split d into (residual dominating family, escaping moving atoms)."""
    space = d.space
    kind = space.kind
    harmonic_parts = [
        (form, coeff.abs_env())
        for form, coeff in d.atoms
        if not form.moving and coeff.kind == "harmonic"
    ]
    if kind in (Kind.TAIL_SEQ, Kind.FIN_DIM):
        # a same-index family suffices: bound times the unit off an
        # advancing front, plus matched harmonic envelopes
        if kind == Kind.FIN_DIM:
            window = structural_threshold(d)
            devs = [max_abs_coord(eval_seq(d, n)) for n in range(1, window + 1)]
            env: list[Q] = []
            running = Q(0)
            for v in reversed(devs):
                running = max(running, v)
                env.append(running)
            env.reverse()
            amb = RationalSeq.steps(env, 0)
            dom = element_seq(space, atoms=harmonic_parts, ambient=amb)
            return dom, ()
        shift = cover_shift(d)
        march = fill(seq_form(1, 0), 1, 0, 1, shift, -bound) if bound != 0 else None
        dom = element_seq(
            space,
            atoms=harmonic_parts,
            fills=[march] if march else [],
            ambient=RationalSeq.const(bound),
        )
        return dom, ()
    # uncountable or pair-indexed kinds: moving support escapes any finite
    # set, so it is dominated by the net of finite cut-downs of the bound;
    # the stationary remainder gets its own same-index family, enveloped on
    # the evaluated values (static and ambient components may cancel)
    escaping = tuple((form, coeff) for form, coeff in d.atoms if form.moving)
    dom = element_seq(space, atoms=harmonic_parts, ambient=_static_settle_env(d))
    return dom, escaping


def _static_settle_env(d: ElementSeq) -> RationalSeq:
    """Envelope for the prelude/static transients of the stationary part."""
    window = structural_threshold(d)
    devs = []
    for n in range(1, window + 1):
        x = eval_seq(d, n)
        moving_part = zero(d.space)
        for form, coeff in d.atoms:
            if form.moving and coeff.at(n) != 0:
                moving_part = moving_part + scale(coeff.at(n), atom(d.space, form.at(n)))
        stationary = sub(x, moving_part)
        devs.append(max_abs_coord(stationary))
    env: list[Q] = []
    running = Q(0)
    for v in reversed(devs):
        running = max(running, v)
        env.append(running)
    env.reverse()
    return RationalSeq.steps(env, 0)


def decide_order_convergence(
    x: ElementSeq, limit: Element, probe: int = 8
) -> ConvergenceCertificate:
    if limit.space != x.space:
        raise SpaceMismatchError("limit lives in the wrong space")
    d = normalize(sub_element(x, limit))
    pat = eventual_pattern(d)
    bound = deviation_bound(d)
    order_bound = scale(bound, unit(x.space))
    if not pat.is_zero():
        coord, value, desc = _pattern_witness(pat)
        return ConvergenceCertificate(
            verdict=DIVERGES,
            space=x.space,
            order_bound=order_bound,
            bad_class=desc,
            bad_value=value,
            n0=d.n0,
            anchors=("coordinatewise-order-rule",),
            notes=(f"value sequence fails to reach the limit: {desc}",),
        )
    residual, escaping = _build_residual(d, bound)
    esc_bound = max((c.max_abs() for _, c in escaping), default=Q(0))
    anchors = ["coordinatewise-order-rule", "completion-transfer"]
    notes = ["every coordinate value sequence settles at the limit value"]
    if escaping:
        anchors.append("escaping-support-net")
        notes.append(
            "moving bumps leave every finite coordinate set; the net of "
            "finite cut-downs of the order bound dominates them"
        )
    return ConvergenceCertificate(
        verdict=CONVERGES,
        space=x.space,
        dominating=residual,
        escaping=escaping,
        escape_bound=esc_bound,
        order_bound=order_bound,
        n0=max(d.n0, structural_threshold(d)),
        anchors=tuple(anchors),
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# the same-index (o1) obstruction for moving bumps over uncountable supports


def o1_dominating_obstruction(x: ElementSeq, probe: int = 8) -> ConvergenceCertificate:
    """Certificate that no same-index decreasing family dominates x_n.

    Applies to uncountably indexed moving bumps with coefficients bounded
    away from 0: any decreasing y_n >= |x_n| satisfies y_n >= y_m >= |x_m|
    for m >= n, so y_n carries infinitely many coordinates >= c; a
    finite-deviation element then has ambient >= c, and some fresh point
    keeps the value c at every step.
    """
    if x.space.kind != Kind.FIN_DEV:
        raise PreconditionError("the obstruction argument needs the uncountable kind")
    cands = []
    for form, coeff in x.atoms:
        if form.moving:
            ev = coeff.eventual_value()
            if ev is not None and ev != 0:
                cands.append(abs(ev))
    if not cands:
        raise PreconditionError("no moving bump with coefficient bounded away from 0")
    c = min(cands)
    star = fresh_star(_tokens_in_play(x))
    minorant = scale(c / 2, atom(x.space, star))
    return ConvergenceCertificate(
        verdict=DIVERGES,
        space=x.space,
        mode="o1_obstruction",
        minorant=minorant,
        bad_class="ambient of any dominating decreasing family",
        bad_value=c,
        n0=x.n0,
        anchors=("uncountable-ambient-obstruction",),
        notes=(
            f"any decreasing family above |x_n| keeps infinitely many "
            f"coordinates >= {qstr(c)}, hence ambient >= {qstr(c)}; "
            f"the fresh point {star} then witnesses a positive minorant",
        ),
    )


# ---------------------------------------------------------------------------
# uniform Cauchy


def decide_uniform_cauchy(x: ElementSeq, probe: int = 8) -> UniformCauchyResult:
    x = normalize(x)
    for f in x.fills:
        if f.value != 0:
            coord = f.form.at(f.kmin + ((f.residue - f.kmin) % f.modulus))
            return UniformCauchyResult(
                False,
                None,
                f"accumulation at {coord}-line keeps steps of size {qstr(abs(f.value))}",
            )
    needs_unit = False
    stationary_support = []
    for form, coeff in x.atoms:
        if form.moving:
            ev = coeff.eventual_value()
            if coeff.kind != "harmonic" and ev != 0:
                return UniformCauchyResult(
                    False,
                    None,
                    f"moving bump at {form} keeps size {qstr(abs(ev))}",
                )
            if coeff.kind == "harmonic" or not coeff.is_zero():
                needs_unit = True
        else:
            stationary_support.append(form.at(x.n0))
    if x.ambient.kind == "steps":
        needs_unit = True
    if x.prelude:
        needs_unit = True
    if needs_unit:
        regulator = unit(x.space)
    elif stationary_support:
        reg = zero(x.space)
        for idx in stationary_support:
            reg = reg + atom(x.space, idx)
        regulator = reg
    else:
        regulator = zero(x.space)
    return UniformCauchyResult(True, regulator, "uniformly Cauchy")


# ---------------------------------------------------------------------------
# independent verifier


def verify_certificate(
    cert: ConvergenceCertificate,
    x: ElementSeq,
    limit: Element | None = None,
    probe: int = 8,
) -> tuple[bool, list[str]]:
    """Re-check a certificate using only element comparisons at probed steps
    plus the symbolic tail rule; independent of how it was produced."""
    log: list[str] = []
    d = x if limit is None else normalize(sub_element(x, limit))
    window = structural_threshold(d) + probe
    if cert.verdict == CONVERGES:
        ok = True
        if cert.order_bound is not None:
            for n in range(1, window + 1):
                if not le(abs_(eval_seq(d, n)), cert.order_bound):
                    log.append(f"FAIL order bound at n={n}")
                    ok = False
                    break
            else:
                log.append(f"order bound holds at n=1..{window}")
        b = cert.dominating
        if b is not None:
            try:
                check_decreasing(b, probe)
                log.append("dominating family verified decreasing")
            except NotDecreasingError as e:
                log.append(f"FAIL dominating family not decreasing: {e}")
                ok = False
            if not eventual_pattern(b).is_zero():
                log.append("FAIL dominating family does not settle at 0")
                ok = False
            else:
                log.append("dominating family settles at 0 (monotone rule)")
            for n in range(max(1, cert.n0), window + 1):
                resid = eval_seq(d, n)
                for form, coeff in cert.escaping:
                    c = coeff.at(n)
                    if c != 0:
                        resid = resid - scale(c, atom(d.space, form.at(n)))
                if not le(abs_(resid), eval_seq(b, n)):
                    log.append(f"FAIL domination of the stationary part at n={n}")
                    ok = False
                    break
            else:
                log.append(f"stationary part dominated at n={cert.n0}..{window}")
        for form, coeff in cert.escaping:
            if not form.moving:
                log.append(f"FAIL escaping form {form} is stationary")
                ok = False
            if coeff.max_abs() > cert.escape_bound:
                log.append(f"FAIL escaping coefficient at {form} exceeds the bound")
                ok = False
        if cert.escaping:
            # each form is injective (strictly moving), and distinct affine
            # forms share a coordinate at most once, so every fixed
            # coordinate is hit finitely often and the supports escape any
            # finite set; probe per-form injectivity on the window
            revisit = False
            for form, _ in cert.escaping:
                seen = set()
                for n in range(max(1, cert.n0), window + 1):
                    idx = form.at(n)
                    if idx in seen:
                        revisit = True
                    seen.add(idx)
            if revisit:
                log.append("FAIL an escaping support revisits a coordinate")
                ok = False
            else:
                log.append("escaping supports leave every finite set (probed + affine)")
        return ok, log
    # diverges
    ok = True
    if cert.mode == "o1_obstruction":
        # the minorant bounds every candidate decreasing family above |x_n|,
        # not x itself; re-derive the coefficient floor and the freshness
        h = cert.minorant
        if h is None or le(h, zero(h.space)) or h.is_zero():
            log.append("FAIL minorant is not positive")
            return False, log
        log.append("minorant is positive")
        floors = [
            abs(c.eventual_value())
            for f, c in x.atoms
            if f.moving and c.eventual_value() not in (None, Q(0))
        ]
        if not floors:
            log.append("FAIL no moving bump with a coefficient floor")
            return False, log
        c0 = min(floors)
        if max_abs_coord(h) > c0:
            log.append("FAIL minorant exceeds the coefficient floor")
            ok = False
        else:
            log.append(
                f"any decreasing family above the bumps keeps infinitely many "
                f"coordinates >= {qstr(c0)}, so its ambient is >= {qstr(c0)}"
            )
        used = _tokens_in_play(x)
        fresh = [t for t in _element_tokens(h) if t.family == "star"]
        if not fresh or any(t in used for t in fresh):
            log.append("FAIL minorant support is not a fresh point")
            ok = False
        else:
            log.append(f"minorant sits at the fresh point {fresh[0]}")
        return ok, log
    if cert.minorant is not None:
        h = cert.minorant
        if le(h, zero(h.space)) or h.is_zero():
            log.append("FAIL minorant is not positive")
            ok = False
        else:
            log.append("minorant is positive")
        if limit is None:
            for n in range(1, window + 1):
                if not le(h, eval_seq(x, n)):
                    log.append(f"FAIL minorant not below the family at n={n}")
                    ok = False
                    break
            else:
                log.append(f"minorant below the family at n=1..{window}")
    if cert.bad_class is not None:
        pat = eventual_pattern(d)
        if pat.is_zero():
            log.append("FAIL claimed obstruction but the pattern settles at 0")
            ok = False
        else:
            log.append(f"obstruction confirmed: {cert.bad_class}")
    return ok, log


def _element_tokens(h: Element) -> list[Token]:
    if h.space.kind != Kind.FIN_DEV:
        return []
    return [t for t, _ in h.entries]
