"""Canonical elements of the four space kinds and their lattice operations.

Canonical forms make equality decidable:

  tail_seq   -- the prefix carries no trailing entries equal to the tail
  fin_dev    -- no stored entry equals the ambient value
  row_block  -- each row payload is canonical as a tail_seq payload and no
                trailing row equals the constant-at-tail row
  fin_dim    -- plain coordinate tuples

All operations are pointwise over the (finitely many) touched coordinates
plus the tail/ambient slots, which is the lattice structure of each
represented space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Tuple

from .errors import InvalidIndexError, SpaceMismatchError
from .scalars import Q, QLike, qof, qstr
from .spaces import (
    AtomIndex,
    Kind,
    SpaceDesc,
    Token,
    atom_key,
)

RowPayload = Tuple[Tuple[Q, ...], Q]  # (prefix, row tail)


@dataclass(frozen=True)
class Element:
    space: SpaceDesc
    data: tuple

    # -- kind-specific accessors -------------------------------------------
    @property
    def coords(self) -> Tuple[Q, ...]:
        assert self.space.kind == Kind.FIN_DIM
        return self.data

    @property
    def prefix(self) -> Tuple[Q, ...]:
        assert self.space.kind == Kind.TAIL_SEQ
        return self.data[0]

    @property
    def tail(self) -> Q:
        if self.space.kind == Kind.TAIL_SEQ:
            return self.data[1]
        if self.space.kind == Kind.ROW_BLOCK:
            return self.data[1]
        raise AssertionError("tail is only defined for sequence kinds")

    @property
    def entries(self) -> Tuple[Tuple[Token, Q], ...]:
        assert self.space.kind == Kind.FIN_DEV
        return self.data[0]

    @property
    def ambient(self) -> Q:
        assert self.space.kind == Kind.FIN_DEV
        return self.data[1]

    @property
    def rows(self) -> Tuple[RowPayload, ...]:
        assert self.space.kind == Kind.ROW_BLOCK
        return self.data[0]

    # -- generic ------------------------------------------------------------
    def is_zero(self) -> bool:
        return self == zero(self.space)

    def __add__(self, other: "Element") -> "Element":
        return add(self, other)

    def __sub__(self, other: "Element") -> "Element":
        return sub(self, other)

    def __neg__(self) -> "Element":
        return scale(-1, self)

    def __rmul__(self, c) -> "Element":
        return scale(c, self)

    def __str__(self) -> str:
        return render(self)


# ---------------------------------------------------------------------------
# constructors


def element_fin(space: SpaceDesc, coords: Sequence[QLike]) -> Element:
    if space.kind != Kind.FIN_DIM:
        raise SpaceMismatchError("element_fin needs a fin_dim space")
    vals = tuple(qof(v) for v in coords)
    if len(vals) != space.dim:
        raise InvalidIndexError(f"expected {space.dim} coordinates, got {len(vals)}")
    return Element(space, vals)


def element_tail(space: SpaceDesc, prefix: Sequence[QLike], tail: QLike) -> Element:
    if space.kind != Kind.TAIL_SEQ:
        raise SpaceMismatchError("element_tail needs a tail_seq space")
    tail_q = qof(tail)
    pref = [qof(v) for v in prefix]
    while pref and pref[-1] == tail_q:
        pref.pop()
    return Element(space, (tuple(pref), tail_q))


def element_findev(
    space: SpaceDesc, entries: Mapping[Token, QLike] | Iterable[Tuple[Token, QLike]],
    ambient: QLike,
) -> Element:
    if space.kind != Kind.FIN_DEV:
        raise SpaceMismatchError("element_findev needs a fin_dev space")
    amb = qof(ambient)
    items = entries.items() if isinstance(entries, Mapping) else entries
    kept = {}
    for tok, v in items:
        v_q = qof(v)
        if v_q != amb:
            kept[tok] = v_q
    ordered = tuple(sorted(kept.items(), key=lambda kv: atom_key(kv[0])))
    return Element(space, (ordered, amb))


def _canonical_row(prefix: Sequence[QLike], rtail: QLike) -> RowPayload:
    rt = qof(rtail)
    pref = [qof(v) for v in prefix]
    while pref and pref[-1] == rt:
        pref.pop()
    return (tuple(pref), rt)


def element_rowblock(
    space: SpaceDesc, rows: Sequence[Tuple[Sequence[QLike], QLike]], tail: QLike
) -> Element:
    if space.kind != Kind.ROW_BLOCK:
        raise SpaceMismatchError("element_rowblock needs a row_block space")
    tail_q = qof(tail)
    canon = [_canonical_row(p, rt) for p, rt in rows]
    while canon and canon[-1] == ((), tail_q):
        canon.pop()
    if not space.row_units:
        # grid variant: constant off a finite set, so every row tail is the
        # global constant
        for p, rt in canon:
            if rt != tail_q:
                raise SpaceMismatchError(
                    "grid elements must have row tails equal to the global tail"
                )
    return Element(space, (tuple(canon), tail_q))


def zero(space: SpaceDesc) -> Element:
    if space.kind == Kind.FIN_DIM:
        return element_fin(space, [0] * space.dim)
    if space.kind == Kind.TAIL_SEQ:
        return element_tail(space, [], 0)
    if space.kind == Kind.FIN_DEV:
        return element_findev(space, {}, 0)
    return element_rowblock(space, [], 0)


def unit(space: SpaceDesc) -> Element:
    if space.kind == Kind.FIN_DIM:
        return element_fin(space, [1] * space.dim)
    if space.kind == Kind.TAIL_SEQ:
        return element_tail(space, [], 1)
    if space.kind == Kind.FIN_DEV:
        return element_findev(space, {}, 1)
    return element_rowblock(space, [], 1)


def atom(space: SpaceDesc, idx: AtomIndex) -> Element:
    if space.kind == Kind.FIN_DIM:
        if not isinstance(idx, int) or not 1 <= idx <= space.dim:
            raise InvalidIndexError(f"atom index {idx!r} out of range")
        return element_fin(space, [1 if i == idx else 0 for i in range(1, space.dim + 1)])
    if space.kind == Kind.TAIL_SEQ:
        if not isinstance(idx, int) or idx < 1:
            raise InvalidIndexError(f"atom index {idx!r} out of range")
        return element_tail(space, [0] * (idx - 1) + [1], 0)
    if space.kind == Kind.FIN_DEV:
        if not isinstance(idx, Token):
            raise InvalidIndexError("fin_dev atoms are indexed by tokens")
        return element_findev(space, {idx: 1}, 0)
    if not (isinstance(idx, tuple) and len(idx) == 2 and min(idx) >= 1):
        raise InvalidIndexError(f"row_block atom index {idx!r} out of range")
    n, m = idx
    rows = [([], 0)] * (n - 1) + [([0] * (m - 1) + [1], 0)]
    return element_rowblock(space, rows, 0)


def row_unit(space: SpaceDesc, n: int) -> Element:
    if space.kind != Kind.ROW_BLOCK or not space.row_units:
        raise InvalidIndexError("row units exist only in the ek variant")
    if n < 1:
        raise InvalidIndexError("row index out of range")
    rows = [([], 0)] * (n - 1) + [([], 1)]
    return element_rowblock(space, rows, 0)


# ---------------------------------------------------------------------------
# coordinate access


def coordinate(x: Element, idx: AtomIndex) -> Q:
    """The coordinate functional of the atom at `idx` applied to x."""
    k = x.space.kind
    if k == Kind.FIN_DIM:
        if not isinstance(idx, int) or not 1 <= idx <= x.space.dim:
            raise InvalidIndexError(f"coordinate {idx!r} out of range")
        return x.coords[idx - 1]
    if k == Kind.TAIL_SEQ:
        if not isinstance(idx, int) or idx < 1:
            raise InvalidIndexError(f"coordinate {idx!r} out of range")
        return x.prefix[idx - 1] if idx <= len(x.prefix) else x.tail
    if k == Kind.FIN_DEV:
        if not isinstance(idx, Token):
            raise InvalidIndexError("fin_dev coordinates are tokens")
        for tok, v in x.entries:
            if tok == idx:
                return v
        return x.ambient
    if not (isinstance(idx, tuple) and len(idx) == 2):
        raise InvalidIndexError("row_block coordinates are (row, col) pairs")
    n, m = idx
    if n < 1 or m < 1:
        raise InvalidIndexError("row_block coordinates start at (1, 1)")
    if n <= len(x.rows):
        pref, rt = x.rows[n - 1]
        return pref[m - 1] if m <= len(pref) else rt
    return x.tail


def support(x: Element) -> list[AtomIndex]:
    """Touched coordinates (where a value is stored explicitly), sorted."""
    k = x.space.kind
    if k == Kind.FIN_DIM:
        return [i for i in range(1, x.space.dim + 1) if x.coords[i - 1] != 0]
    if k == Kind.TAIL_SEQ:
        return list(range(1, len(x.prefix) + 1))
    if k == Kind.FIN_DEV:
        return [tok for tok, _ in x.entries]
    out = []
    for n, (pref, _) in enumerate(x.rows, start=1):
        out.extend((n, m) for m in range(1, len(pref) + 1))
    return sorted(out)


def max_abs_coord(x: Element) -> Q:
    """sup over all coordinates of |x| (tails and ambients included)."""
    k = x.space.kind
    if k == Kind.FIN_DIM:
        return max((abs(v) for v in x.coords), default=Q(0))
    if k == Kind.TAIL_SEQ:
        return max([abs(x.tail)] + [abs(v) for v in x.prefix])
    if k == Kind.FIN_DEV:
        return max([abs(x.ambient)] + [abs(v) for _, v in x.entries])
    vals = [abs(x.tail)]
    for pref, rt in x.rows:
        vals.append(abs(rt))
        vals.extend(abs(v) for v in pref)
    return max(vals)


# ---------------------------------------------------------------------------
# linear and lattice operations, all pointwise


def _check_same_space(x: Element, y: Element) -> None:
    if x.space != y.space:
        raise SpaceMismatchError(f"{x.space.label} vs {y.space.label}")


def _zip_tail(x: Element, y: Element, op) -> Element:
    width = max(len(x.prefix), len(y.prefix))
    pref = [op(coordinate(x, i), coordinate(y, i)) for i in range(1, width + 1)]
    return element_tail(x.space, pref, op(x.tail, y.tail))


def _zip_findev(x: Element, y: Element, op) -> Element:
    toks = {tok for tok, _ in x.entries} | {tok for tok, _ in y.entries}
    vals = {tok: op(coordinate(x, tok), coordinate(y, tok)) for tok in toks}
    return element_findev(x.space, vals, op(x.ambient, y.ambient))


def _row_at(x: Element, n: int) -> RowPayload:
    if n <= len(x.rows):
        return x.rows[n - 1]
    return ((), x.tail)


def _zip_rowblock(x: Element, y: Element, op) -> Element:
    depth = max(len(x.rows), len(y.rows))
    rows = []
    for n in range(1, depth + 1):
        px, tx = _row_at(x, n)
        py, ty = _row_at(y, n)
        width = max(len(px), len(py))
        pref = [
            op(px[m] if m < len(px) else tx, py[m] if m < len(py) else ty)
            for m in range(width)
        ]
        rows.append((pref, op(tx, ty)))
    return element_rowblock(x.space, rows, op(x.tail, y.tail))


def _pointwise(x: Element, y: Element, op) -> Element:
    _check_same_space(x, y)
    k = x.space.kind
    if k == Kind.FIN_DIM:
        return element_fin(x.space, [op(a, b) for a, b in zip(x.coords, y.coords)])
    if k == Kind.TAIL_SEQ:
        return _zip_tail(x, y, op)
    if k == Kind.FIN_DEV:
        return _zip_findev(x, y, op)
    return _zip_rowblock(x, y, op)


def add(x: Element, y: Element) -> Element:
    return _pointwise(x, y, lambda a, b: a + b)


def sub(x: Element, y: Element) -> Element:
    return _pointwise(x, y, lambda a, b: a - b)


def scale(c: QLike, x: Element) -> Element:
    c_q = qof(c)
    k = x.space.kind
    if k == Kind.FIN_DIM:
        return element_fin(x.space, [c_q * v for v in x.coords])
    if k == Kind.TAIL_SEQ:
        return element_tail(x.space, [c_q * v for v in x.prefix], c_q * x.tail)
    if k == Kind.FIN_DEV:
        return element_findev(
            x.space, {t: c_q * v for t, v in x.entries}, c_q * x.ambient
        )
    rows = [([c_q * v for v in p], c_q * rt) for p, rt in x.rows]
    return element_rowblock(x.space, rows, c_q * x.tail)


def sup2(x: Element, y: Element) -> Element:
    """Least upper bound of {x, y} in the represented space."""
    return _pointwise(x, y, max)


def inf2(x: Element, y: Element) -> Element:
    return _pointwise(x, y, min)


def pos(x: Element) -> Element:
    """Positive part x v 0."""
    return sup2(x, zero(x.space))


def neg(x: Element) -> Element:
    """Negative part (-x) v 0."""
    return pos(-x)


def abs_(x: Element) -> Element:
    return sup2(x, -x)


def le(x: Element, y: Element) -> bool:
    """Pointwise order: x <= y on every coordinate (tails included)."""
    return sup2(x, y) == y


def is_positive(x: Element) -> bool:
    return le(zero(x.space), x)


def is_disjoint(x: Element, y: Element) -> bool:
    return inf2(abs_(x), abs_(y)).is_zero()


# ---------------------------------------------------------------------------
# rendering


def render(x: Element) -> str:
    k = x.space.kind
    if k == Kind.FIN_DIM:
        return "(" + ",".join(qstr(v) for v in x.coords) + ")"
    if k == Kind.TAIL_SEQ:
        body = ",".join(qstr(v) for v in x.prefix)
        return f"({body}|{qstr(x.tail)})"
    if k == Kind.FIN_DEV:
        body = ",".join(f"{t}:{qstr(v)}" for t, v in x.entries)
        return f"{{{body}|{qstr(x.ambient)}}}"
    rows = ";".join(
        "(" + ",".join(qstr(v) for v in p) + f"|{qstr(rt)})" for p, rt in x.rows
    )
    return f"[{rows}|{qstr(x.tail)}]"
