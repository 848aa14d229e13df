"""Command-line interface.

    rieszkit check order_bounded --spec FILE [--operator NAME]
    rieszkit check order_continuous --spec FILE
    rieszkit positive-part --spec FILE
    rieszkit project-oc --spec FILE
    rieszkit witness-pervasive --spec FILE
    rieszkit classify --domain KIND --codomain KIND | --spec FILE
    rieszkit casebook {not-directed | bounded-not-regular | projection-demo}
    rieszkit oracle {matrix-positive-part | grid-sup | majorant-growth
                     | dominating-search} [args]

Exit codes: 0 verdict produced, 1 verdict refuted/false, 2 input error,
3 unsupported hypothesis.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (
    NotDecreasingError,
    PreconditionError,
    RieszkitError,
    UnsupportedHypothesisError,
)
from .scalars import RationalSeq, qof, qstr
from .spaces import parse_space_label, token_form
from .elements import unit
from .operators import order_bounded_test
from .calculus import (
    classify_pair,
    oc_projection,
    order_continuity_test,
    pervasive_witness,
    positive_part,
)
from .casebook import CASEBOOK, row_pair_difference_operator
from .oracles import (
    bruteforce_dominating_search,
    grid_interval_sup,
    majorant_growth_probe,
    matrix_positive_part,
)
from .reports import Report, to_json, to_markdown
from .sequences import element_seq
from .specfile import SpecError, build_all, parse


def _load_operator(args):
    if not args.spec:
        raise PreconditionError("this command needs --spec FILE")
    with open(args.spec, "r", encoding="utf-8") as fh:
        spec = parse(fh.read())
    spaces, ops = build_all(spec)
    if not ops:
        raise PreconditionError("the spec file declares no operator")
    name = args.operator or next(iter(ops))
    if name not in ops:
        raise PreconditionError(f"no operator named {name!r} in the spec file")
    return spec, spaces, ops[name], name


def _cmd_check(args) -> Report:
    _, _, T, name = _load_operator(args)
    if args.what == "order_bounded":
        rep = order_bounded_test(T)
        return Report(
            command=f"check order_bounded {name}",
            verdict="order bounded" if rep.bounded else "not order bounded",
            exit_code=0 if rep.bounded else 1,
            anchors=("order-bound-partial-moduli",),
            details={"bound": rep.bound, "note": rep.note},
        )
    ok, cert = order_continuity_test(T, args.probe)
    return Report(
        command=f"check order_continuous {name}",
        verdict="order continuous" if ok else "not order continuous",
        exit_code=0 if ok else 1,
        anchors=cert.anchors,
        certificate=cert,
    )


def _cmd_positive_part(args) -> Report:
    _, spaces, T, name = _load_operator(args)
    cand, in_f = positive_part(T)
    cls = classify_pair(T.domain, T.codomain)
    if in_f:
        verdict = "positive part exists and is representable"
        code = 0
    elif cls.pervasive:
        verdict = "positive part does not exist in the operator space"
        code = 1
    else:
        verdict = "candidate not representable; existence undecided"
        code = 1
    return Report(
        command=f"positive-part {name}",
        verdict=verdict,
        exit_code=code,
        anchors=tuple(dict.fromkeys(("rk-formula", "rk-property-pervasive") + cls.anchors)),
        certificate={
            "unit_image": cand.unit_image,
            "row_unit_images": dict(cand.row_unit_images),
            "row_unit_tail": cand.row_unit_tail,
            "failing_generator": cand.failing_generator(),
        },
        details={"in_space": in_f, "pervasiveness_route": cls.pervasive_route},
    )


def _cmd_project_oc(args) -> Report:
    _, _, T, name = _load_operator(args)
    P = oc_projection(T)
    from .calculus import projection_fixes

    fixed = projection_fixes(T)
    return Report(
        command=f"project-oc {name}",
        verdict="operator is its own projection" if fixed else "projection is proper",
        exit_code=0,
        anchors=("partial-sum-projection", "oc-regular-band"),
        certificate={
            "unit_image": P.unit_image,
            "restricts_to_space": P.in_codomain(),
        },
        details={"fixed": fixed},
    )


def _cmd_witness(args) -> Report:
    _, _, T, name = _load_operator(args)
    w = pervasive_witness(T, args.probe)
    return Report(
        command=f"witness-pervasive {name}",
        verdict="rank-one minorant found",
        exit_code=0,
        anchors=("atomic-codomain-witness", "rank-one-pervasive"),
        certificate={
            "generator": w.generator,
            "coordinate": None if w.coordinate is None else str(w.coordinate),
            "functional": {
                "atom_coeffs": {str(k): v for k, v in w.functional.atom_coeffs},
                "unit_value": w.functional.unit_value,
            },
            "vector": w.vector,
        },
        transcript=w.transcript,
    )


def _cmd_classify(args) -> Report:
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as fh:
            spec = parse(fh.read())
        from .specfile import build_spaces

        spaces = build_spaces(spec)
        if args.domain and args.domain in spaces:
            E = spaces[args.domain]
        else:
            E = next(iter(spaces.values()))
        if args.codomain and args.codomain in spaces:
            F = spaces[args.codomain]
        else:
            vals = list(spaces.values())
            F = vals[1] if len(vals) > 1 else vals[0]
    else:
        if not (args.domain and args.codomain):
            raise PreconditionError("classify needs --domain and --codomain (or --spec)")
        E = parse_space_label(args.domain)
        F = parse_space_label(args.codomain)
    cls = classify_pair(E, F)
    conclusions = []
    if cls.pervasive:
        conclusions.append(
            f"operator space pervasive in its completion ({cls.pervasive_route})"
        )
    if cls.rk_property:
        conclusions.append("interval-supremum formula for every positive part")
    if cls.oc_band:
        conclusions.append("order-continuous regular operators form a band")
    if cls.riesz_completion_subspace:
        conclusions.append("lattice completion realized inside the completed-codomain operators")
    if cls.riesz_space:
        conclusions.append("the regular operators form a lattice")
    if cls.codomain_order_complete:
        conclusions.append("codomain order complete: all classical conclusions")
    return Report(
        command=f"classify {E.label} -> {F.label}",
        verdict="; ".join(conclusions) if conclusions else "no conclusion applies",
        exit_code=0 if conclusions else 1,
        anchors=cls.anchors,
        details={
            "domain": E.label,
            "codomain": F.label,
            "notes": list(cls.notes),
        },
    )


def _cmd_casebook(args) -> Report:
    if args.name not in CASEBOOK:
        raise PreconditionError(
            f"unknown casebook run {args.name!r}; choose from {sorted(CASEBOOK)}"
        )
    if args.name == "projection-demo":
        return CASEBOOK[args.name](seed=args.seed, probe=args.probe)
    return CASEBOOK[args.name](probe=args.probe)


def _cmd_oracle(args) -> Report:
    if args.name == "matrix-positive-part":
        if not args.matrix:
            raise PreconditionError("matrix-positive-part needs --matrix JSON")
        M = [[qof(v) for v in row] for row in json.loads(args.matrix)]
        P = matrix_positive_part(M)
        return Report(
            command="oracle matrix-positive-part",
            verdict="computed",
            oracle={"input": [[qstr(v) for v in r] for r in M],
                    "positive_part": [[qstr(v) for v in r] for r in P]},
        )
    if args.name == "grid-sup":
        _, _, T, name = _load_operator(args)
        value = grid_interval_sup(T, unit(T.domain), args.depth)
        return Report(
            command=f"oracle grid-sup {name}",
            verdict="computed",
            oracle={"depth": args.depth, "value": value},
        )
    if args.name == "majorant-growth":
        if args.spec:
            _, _, T, _ = _load_operator(args)
        else:
            T = row_pair_difference_operator()
        mu = {str(n): majorant_growth_probe(T, n) for n in range(args.levels + 1)}
        return Report(
            command="oracle majorant-growth",
            verdict="computed",
            oracle={"floors": mu},
        )
    if args.name == "dominating-search":
        from .operators import partial_sum_seq

        if args.spec:
            _, _, T, _ = _load_operator(args)
            seq = partial_sum_seq(T)
            subject = "the operator's atom-image partial sums"
        else:
            from .spaces import fin_dev

            seq = element_seq(
                fin_dev(), atoms=[(token_form(1, 0), RationalSeq.const(1))]
            )
            subject = "the moving-indicator sequence"
        res = bruteforce_dominating_search(seq, args.bound)
        return Report(
            command="oracle dominating-search",
            verdict="found" if res.found else "none",
            exit_code=0 if res.found else 1,
            oracle={
                "subject": subject,
                "bound": args.bound,
                "checked": res.candidates_checked,
                "found": res.found,
                "note": res.note,
            },
        )
    raise PreconditionError(
        f"unknown oracle {args.name!r}; choose from matrix-positive-part, "
        "grid-sup, majorant-growth, dominating-search"
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="declarative spec file")
    common.add_argument("--operator", help="operator name inside the spec file")
    common.add_argument("--probe", type=int, default=8, help="finite spot-check depth")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=True)
    fmt.add_argument("--markdown", action="store_true", default=False)

    p = argparse.ArgumentParser(
        prog="rieszkit",
        description="exact symbolic calculus for regular operators",
        parents=[common],
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common],
                       help="run a named check on the spec operator")
    c.add_argument("what", choices=["order_bounded", "order_continuous"])

    sub.add_parser("positive-part", parents=[common],
                   help="interval suprema on the generators")
    sub.add_parser("project-oc", parents=[common],
                   help="band projection onto the order-continuous part")
    sub.add_parser("witness-pervasive", parents=[common],
                   help="rank-one minorant below a positive operator")

    cl = sub.add_parser("classify", parents=[common],
                        help="applicable conclusions for a space pair")
    cl.add_argument("--domain")
    cl.add_argument("--codomain")

    cb = sub.add_parser("casebook", parents=[common], help="run a named case study")
    cb.add_argument("name")
    cb.add_argument("--seed", type=int, default=42)

    orc = sub.add_parser("oracle", parents=[common], help="run a brute-force reference")
    orc.add_argument("name")
    orc.add_argument("--matrix", help="JSON matrix for matrix-positive-part")
    orc.add_argument("--depth", type=int, default=4, help="grid depth for grid-sup")
    orc.add_argument("--levels", type=int, default=8, help="levels for majorant-growth")
    orc.add_argument("--bound", type=int, default=6, help="size bound for dominating-search")
    return p


_DISPATCH = {
    "check": _cmd_check,
    "positive-part": _cmd_positive_part,
    "project-oc": _cmd_project_oc,
    "witness-pervasive": _cmd_witness,
    "classify": _cmd_classify,
    "casebook": _cmd_casebook,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep = _DISPATCH[args.command](args)
    except SpecError as e:
        print(json.dumps({"error": str(e), "kind": "input"}, indent=2))
        return 2
    except (PreconditionError, NotDecreasingError, FileNotFoundError) as e:
        print(json.dumps({"error": str(e), "kind": "input"}, indent=2))
        return 2
    except UnsupportedHypothesisError as e:
        print(json.dumps({"error": str(e), "kind": "unsupported-hypothesis"}, indent=2))
        return 3
    except RieszkitError as e:
        print(json.dumps({"error": str(e), "kind": "input"}, indent=2))
        return 2
    print(to_markdown(rep) if args.markdown else to_json(rep))
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
