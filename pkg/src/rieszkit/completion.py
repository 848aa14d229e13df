"""Representable fragment of the order completion.

A completion element generalizes an element's tail payload to an eventually
periodic residue pattern.  This fragment is closed under the sums, positive
parts and limits the engine produces (local finiteness of tail rules keeps
every coordinate's contribution list finite), and membership in the base
space is decidable: a pattern belongs to the space exactly when it collapses
to a single tail value (respectively a finite deviation set).

  tail_seq   -> TailPattern: explicit prefix, then values by residue class
  fin_dev    -> FinDevPattern: off-line tokens + TailPattern on the token
                line + ambient value for untouched points
  row_block  -> RowBlockPattern: explicit rows (TailPattern each) + per
                row-residue patterns for all later rows
  fin_dim    -> the space is already order complete; patterns are elements
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Tuple, Union

from .errors import SpaceMismatchError
from .scalars import Q, QLike, qof, qstr
from .spaces import Kind, SpaceDesc, Token, atom_key
from .elements import Element, element_findev, element_rowblock, element_tail


@dataclass(frozen=True)
class TailPattern:
    """Values over indices 1, 2, ...: explicit prefix, then residues mod q.

    The value at i > len(prefix) is residues[i % modulus].
    """

    prefix: Tuple[Q, ...]
    modulus: int
    residues: Tuple[Q, ...]

    def at(self, i: int) -> Q:
        if i < 1:
            raise ValueError("pattern index starts at 1")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return self.residues[i % self.modulus]

    def collapse(self) -> Tuple[Tuple[Q, ...], Q] | None:
        """(prefix, tail) when the residues agree, else None."""
        vals = set(self.residues)
        if len(vals) != 1:
            return None
        return (self.prefix, next(iter(vals)))

    def all_values(self) -> list[Q]:
        return list(self.prefix) + list(self.residues)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.all_values())

    def __str__(self) -> str:
        body = ",".join(qstr(v) for v in self.prefix)
        res = ",".join(qstr(v) for v in self.residues)
        return f"({body}|mod{self.modulus}:{res})"


def tail_pattern(prefix, modulus: int, residues) -> TailPattern:
    """Canonical constructor: minimal modulus, minimal prefix."""
    pref = [qof(v) for v in prefix]
    res = [qof(v) for v in residues]
    if modulus < 1 or len(res) != modulus:
        raise ValueError("modulus must match the residue tuple")
    # reduce the modulus to the smallest divisor consistent with the values
    for d in sorted(_divisors(modulus)):
        if all(res[r] == res[r % d] for r in range(modulus)):
            res = res[:d]
            modulus = d
            break
    # trim prefix entries already explained by the pattern
    while pref and pref[-1] == res[len(pref) % modulus]:
        pref.pop()
    return TailPattern(tuple(pref), modulus, tuple(res))


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def pattern_from_tail(prefix, tail: QLike) -> TailPattern:
    return tail_pattern(prefix, 1, [qof(tail)])


def _tp_zip(a: TailPattern, b: TailPattern, op) -> TailPattern:
    width = max(len(a.prefix), len(b.prefix))
    mod = a.modulus * b.modulus // gcd(a.modulus, b.modulus)
    # align the explicit region to a residue boundary so residues line up
    width += (-width) % mod
    pref = [op(a.at(i), b.at(i)) for i in range(1, width + 1)]
    res = [op(a.at(width + j), b.at(width + j)) for j in range(1, mod + 1)]
    # residues are indexed by i % mod
    aligned = [Q(0)] * mod
    for j in range(1, mod + 1):
        aligned[(width + j) % mod] = res[j - 1]
    return tail_pattern(pref, mod, aligned)


def _tp_map(a: TailPattern, op) -> TailPattern:
    return tail_pattern([op(v) for v in a.prefix], a.modulus, [op(v) for v in a.residues])


def tp_add(a: TailPattern, b: TailPattern) -> TailPattern:
    return _tp_zip(a, b, lambda x, y: x + y)


def tp_sup(a: TailPattern, b: TailPattern) -> TailPattern:
    return _tp_zip(a, b, max)


def tp_scale(c: Q, a: TailPattern) -> TailPattern:
    return _tp_map(a, lambda v: c * v)


def tp_pos(a: TailPattern) -> TailPattern:
    return _tp_map(a, lambda v: max(v, Q(0)))


def tp_le(a: TailPattern, b: TailPattern) -> bool:
    width = max(len(a.prefix), len(b.prefix))
    mod = a.modulus * b.modulus // gcd(a.modulus, b.modulus)
    return all(a.at(i) <= b.at(i) for i in range(1, width + mod + 1))


ZERO_TP = TailPattern((), 1, (Q(0),))


@dataclass(frozen=True)
class FinDevPattern:
    """extra off-line token values, a pattern on the token line, ambient."""

    extra: Tuple[Tuple[Token, Q], ...]
    line: TailPattern
    ambient: Q

    def at_token(self, tok: Token) -> Q:
        for t, v in self.extra:
            if t == tok:
                return v
        if tok.family == "g":
            return self.line.at(tok.k)
        return self.ambient

    def is_zero(self) -> bool:
        return (
            self.ambient == 0
            and self.line.is_zero()
            and all(v == 0 for _, v in self.extra)
        )

    def __str__(self) -> str:
        body = ",".join(f"{t}:{qstr(v)}" for t, v in self.extra)
        return f"{{{body}; line {self.line} | {qstr(self.ambient)}}}"


def findev_pattern(extra, line: TailPattern, ambient: QLike) -> FinDevPattern:
    amb = qof(ambient)
    kept = tuple(
        sorted(
            ((t, qof(v)) for t, v in (extra.items() if hasattr(extra, "items") else extra) if qof(v) != amb),
            key=lambda kv: atom_key(kv[0]),
        )
    )
    # fold line values equal to ambient into the pattern itself (no-op), keep canonical line
    return FinDevPattern(kept, tail_pattern(line.prefix, line.modulus, line.residues), amb)


@dataclass(frozen=True)
class RowBlockPattern:
    """Explicit rows then rows by residue class; each row a TailPattern."""

    rows: Tuple[TailPattern, ...]
    row_residues: Tuple[TailPattern, ...]

    @property
    def row_modulus(self) -> int:
        return len(self.row_residues)

    def row_at(self, n: int) -> TailPattern:
        if n <= len(self.rows):
            return self.rows[n - 1]
        return self.row_residues[n % self.row_modulus]

    def at(self, n: int, m: int) -> Q:
        return self.row_at(n).at(m)

    def is_zero(self) -> bool:
        return all(r.is_zero() for r in self.rows) and all(
            r.is_zero() for r in self.row_residues
        )


def rowblock_pattern(rows, row_residues) -> RowBlockPattern:
    rows = list(rows)
    res = list(row_residues)
    if not res:
        raise ValueError("need at least one row residue pattern")
    for d in sorted(_divisors(len(res))):
        if all(res[r] == res[r % d] for r in range(len(res))):
            res = res[:d]
            break
    depth = len(rows)
    depth += (-depth) % len(res)
    while len(rows) < depth:
        rows.append(res[(len(rows) + 1) % len(res)])
    while rows and rows[-1] == res[len(rows) % len(res)]:
        rows.pop()
    return RowBlockPattern(tuple(rows), tuple(res))


def _rbp_zip(a: RowBlockPattern, b: RowBlockPattern, op) -> RowBlockPattern:
    depth = max(len(a.rows), len(b.rows))
    mod = a.row_modulus * b.row_modulus // gcd(a.row_modulus, b.row_modulus)
    depth += (-depth) % mod
    rows = [_tp_zip(a.row_at(n), b.row_at(n), op) for n in range(1, depth + 1)]
    res = [ZERO_TP] * mod
    for j in range(1, mod + 1):
        res[(depth + j) % mod] = _tp_zip(a.row_at(depth + j), b.row_at(depth + j), op)
    return rowblock_pattern(rows, res)


Pattern = Union[Element, TailPattern, FinDevPattern, RowBlockPattern]


@dataclass(frozen=True)
class CompletionElement:
    space: SpaceDesc
    pat: Pattern

    def is_zero(self) -> bool:
        if isinstance(self.pat, Element):
            return self.pat.is_zero()
        return self.pat.is_zero()

    def __str__(self) -> str:
        return f"~{self.pat}"


def embed(x: Element) -> CompletionElement:
    k = x.space.kind
    if k == Kind.FIN_DIM:
        return CompletionElement(x.space, x)
    if k == Kind.TAIL_SEQ:
        return CompletionElement(x.space, pattern_from_tail(x.prefix, x.tail))
    if k == Kind.FIN_DEV:
        extra = [(t, v) for t, v in x.entries if t.family != "g"]
        line_width = max([t.k for t, _ in x.entries if t.family == "g"], default=0)
        vals = {t.k: v for t, v in x.entries if t.family == "g"}
        line = tail_pattern(
            [vals.get(i, x.ambient) for i in range(1, line_width + 1)], 1, [x.ambient]
        )
        return CompletionElement(x.space, findev_pattern(extra, line, x.ambient))
    rows = [pattern_from_tail(p, rt) for p, rt in x.rows]
    return CompletionElement(
        x.space, rowblock_pattern(rows, [pattern_from_tail([], x.tail)])
    )


def _check_space(a: CompletionElement, b: CompletionElement) -> None:
    if a.space != b.space:
        raise SpaceMismatchError(f"{a.space.label} vs {b.space.label}")


def _ce_zip(a: CompletionElement, b: CompletionElement, elem_op, op) -> CompletionElement:
    _check_space(a, b)
    pa, pb = a.pat, b.pat
    if isinstance(pa, Element):
        return CompletionElement(a.space, elem_op(pa, pb))
    if isinstance(pa, TailPattern):
        return CompletionElement(a.space, _tp_zip(pa, pb, op))
    if isinstance(pa, FinDevPattern):
        toks = {t for t, _ in pa.extra} | {t for t, _ in pb.extra}
        extra = {t: op(pa.at_token(t), pb.at_token(t)) for t in toks}
        line = _tp_zip(pa.line, pb.line, op)
        return CompletionElement(
            a.space, findev_pattern(extra, line, op(pa.ambient, pb.ambient))
        )
    return CompletionElement(a.space, _rbp_zip(pa, pb, op))


def ce_add(a: CompletionElement, b: CompletionElement) -> CompletionElement:
    from .elements import add as elem_add

    return _ce_zip(a, b, elem_add, lambda x, y: x + y)


def ce_sub(a: CompletionElement, b: CompletionElement) -> CompletionElement:
    return ce_add(a, ce_scale(Q(-1), b))


def ce_sup(a: CompletionElement, b: CompletionElement) -> CompletionElement:
    from .elements import sup2

    return _ce_zip(a, b, sup2, max)


def ce_scale(c: QLike, a: CompletionElement) -> CompletionElement:
    from .elements import scale as elem_scale

    c_q = qof(c)
    pa = a.pat
    if isinstance(pa, Element):
        return CompletionElement(a.space, elem_scale(c_q, pa))
    if isinstance(pa, TailPattern):
        return CompletionElement(a.space, tp_scale(c_q, pa))
    if isinstance(pa, FinDevPattern):
        return CompletionElement(
            a.space,
            findev_pattern(
                {t: c_q * v for t, v in pa.extra},
                tp_scale(c_q, pa.line),
                c_q * pa.ambient,
            ),
        )
    return CompletionElement(
        a.space,
        rowblock_pattern(
            [tp_scale(c_q, r) for r in pa.rows],
            [tp_scale(c_q, r) for r in pa.row_residues],
        ),
    )


def ce_pos(a: CompletionElement) -> CompletionElement:
    zero_ce = embed_zero(a.space)
    return ce_sup(a, zero_ce)


def embed_zero(space: SpaceDesc) -> CompletionElement:
    from .elements import zero

    return embed(zero(space))


def ce_le(a: CompletionElement, b: CompletionElement) -> bool:
    _check_space(a, b)
    diff = ce_sub(b, a)
    return ce_is_nonneg(diff)


def ce_is_nonneg(a: CompletionElement) -> bool:
    pa = a.pat
    if isinstance(pa, Element):
        from .elements import is_positive

        return is_positive(pa)
    if isinstance(pa, TailPattern):
        return all(v >= 0 for v in pa.all_values())
    if isinstance(pa, FinDevPattern):
        return (
            pa.ambient >= 0
            and all(v >= 0 for _, v in pa.extra)
            and all(v >= 0 for v in pa.line.all_values())
        )
    return all(
        v >= 0 for row in list(pa.rows) + list(pa.row_residues) for v in row.all_values()
    )


def in_space(a: CompletionElement) -> bool:
    return collapse(a) is not None


def collapse(a: CompletionElement) -> Element | None:
    """The element of the base space the pattern denotes, if it is one."""
    pa = a.pat
    if isinstance(pa, Element):
        return pa
    if isinstance(pa, TailPattern):
        c = pa.collapse()
        if c is None:
            return None
        return element_tail(a.space, c[0], c[1])
    if isinstance(pa, FinDevPattern):
        c = pa.line.collapse()
        if c is None or c[1] != pa.ambient:
            return None
        prefix, _ = c
        entries = dict(pa.extra)
        from .spaces import gamma

        for i, v in enumerate(prefix, start=1):
            entries[gamma(i)] = v
        return element_findev(a.space, entries, pa.ambient)
    # row_block: every row beyond the explicit block must be the constant
    # background row, and that background must be a single value
    back = None
    for r in pa.row_residues:
        c = r.collapse()
        if c is None or c[0] != ():
            return None
        if back is None:
            back = c[1]
        elif back != c[1]:
            return None
    rows = []
    for r in pa.rows:
        c = r.collapse()
        if c is None:
            return None
        rows.append(c)
    if not a.space.row_units:
        if any(rt != back for _, rt in rows):
            return None
    return element_rowblock(a.space, rows, back)


def describe_pattern(a: CompletionElement) -> dict:
    """JSON-friendly description with deterministic ordering."""
    pa = a.pat
    if isinstance(pa, Element):
        from .elements import render

        return {"kind": "element", "value": render(pa)}
    if isinstance(pa, TailPattern):
        return {
            "kind": "tail_pattern",
            "prefix": [qstr(v) for v in pa.prefix],
            "modulus": pa.modulus,
            "residues": [qstr(v) for v in pa.residues],
        }
    if isinstance(pa, FinDevPattern):
        return {
            "kind": "fin_dev_pattern",
            "extra": [[str(t), qstr(v)] for t, v in pa.extra],
            "line": {
                "prefix": [qstr(v) for v in pa.line.prefix],
                "modulus": pa.line.modulus,
                "residues": [qstr(v) for v in pa.line.residues],
            },
            "ambient": qstr(pa.ambient),
        }
    return {
        "kind": "row_block_pattern",
        "rows": [
            {
                "prefix": [qstr(v) for v in r.prefix],
                "modulus": r.modulus,
                "residues": [qstr(v) for v in r.residues],
            }
            for r in pa.rows
        ],
        "row_residues": [
            {
                "prefix": [qstr(v) for v in r.prefix],
                "modulus": r.modulus,
                "residues": [qstr(v) for v in r.residues],
            }
            for r in pa.row_residues
        ],
    }
