"""Command-line front end."""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import catalog
from .exact import CycloNum, format_scalar, parse_scalar
from .poly import WPoly, format_poly

GOLDEN_DIR = Path(__file__).resolve().parents[2] / "tests" / "goldens" / "v1"


# ---------------------------------------------------------------------------
# rendering: one report tree, two formats
# ---------------------------------------------------------------------------

def _to_json(x):
    if isinstance(x, WPoly):
        return format_poly(x)
    if isinstance(x, (Fraction, CycloNum)):
        return format_scalar(x)
    if isinstance(x, dict):
        return {str(k): _to_json(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_to_json(v) for v in x]
    return x


def render_json(report: dict) -> str:
    return json.dumps(_to_json(report), indent=2, sort_keys=True) + "\n"


_PRIMES = {"xs": "x'", "ys": "y'", "zs": "z'"}


def _latex_var(name: str) -> str:
    if name in _PRIMES:
        return _PRIMES[name]
    if name[0] in "abt" and name[1:].isdigit():
        return f"{name[0]}_{{{name[1:]}}}"
    return name


def latex_scalar(c) -> str:
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return str(c.numerator)
        sign = "-" if c < 0 else ""
        return f"{sign}\\frac{{{abs(c.numerator)}}}{{{c.denominator}}}"
    if isinstance(c, int):
        return str(c)
    return "(" + format_scalar(c).replace("z(", "\\zeta_{").replace(")^", "}^") + ")"


def latex_poly(p: WPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for e, c in p.sorted_terms():
        mono = " ".join(
            _latex_var(v) + (f"^{{{k}}}" if k > 1 else "") for v, k in zip(p.ring.vars, e) if k)
        neg = isinstance(c, Fraction) and c < 0
        mag = -c if neg else c
        coeff = "" if (mag == 1 and mono) else latex_scalar(mag)
        term = (coeff + " " + mono).strip()
        parts.append(("- " if neg else "+ ") + term)
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[1:]


def _latex_value(v) -> str:
    if isinstance(v, WPoly):
        return f"${latex_poly(v)}$"
    if isinstance(v, (Fraction, CycloNum)):
        return f"${latex_scalar(v)}$"
    if isinstance(v, dict):
        inner = "".join(f"\\item {k}: {_latex_value(x)}\n" for k, x in v.items())
        return "\\begin{itemize}\n" + inner + "\\end{itemize}"
    if isinstance(v, (list, tuple)):
        if v and all(isinstance(x, WPoly) for x in v):
            return "$" + ",\\ ".join(latex_poly(x) for x in v) + "$"
        return ", ".join(_latex_value(x) for x in v) if v else "none"
    return str(v).replace("_", "\\_")


def render_latex(report: dict) -> str:
    lines = [f"\\section*{{{report.get('title', 'report')}}}", "\\begin{itemize}"]
    for k, v in report.items():
        if k == "title":
            continue
        lines.append(f"\\item \\textbf{{{k.replace('_', ' ')}}}: {_latex_value(v)}")
    lines.append("\\end{itemize}")
    return "\n".join(lines) + "\n"


def render_text(report: dict) -> str:
    out = []
    for k, v in _to_json(report).items():
        out.append(f"{k}: {json.dumps(v, sort_keys=True) if not isinstance(v, str) else v}")
    return "\n".join(out) + "\n"


def emit(report: dict, fmt: str) -> str:
    return {"json": render_json, "latex": render_latex, "text": render_text}[fmt](report)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def group_report(name: str) -> dict:
    from .fold import mckay_cartan
    from .grp import build_group
    G = build_group(name)
    cd = mckay_cartan(G)
    return {
        "title": f"group {G.name}",
        "order": G.order,
        "class_sizes": G.class_sizes,
        "class_traces": G.class_traces,
        "character_table": G.char_table,
        "degrees": G.degrees(),
        "mckay_type": cd.type,
        "cartan": cd.cartan,
        "molien_0_24": G.molien(24),
    }


def kleinian_report(name: str) -> dict:
    from .klein import ade_type, build_kleinian
    K = build_kleinian(name)
    return {
        "title": f"Kleinian singularity for {K.group.name}",
        "type": ade_type(K.group.spec),
        "generators": list(K.gens),
        "weights": list(K.weights),
        "relation": K.f,
        "milnor_basis": [list(e) for e in K.milnor_basis],
        "socle": K.socle,
        "socle_degree": K.socle.wdeg(),
    }


def deform_report(name: str) -> dict:
    from .deform import universal_deformation
    U = universal_deformation(name)
    return {
        "title": f"universal deformation for {U.K.group.name}",
        "F": U.bigF,
        "parameters": U.params,
        "parameter_weights": U.param_weights,
    }


def pair_report(g1: str, g2: str) -> dict:
    from .deform import pair_universal_deformation
    from .klein import socle_map
    P = pair_universal_deformation((g1, g2))
    QA = P.QA
    action = []
    for q, t in enumerate(QA.taus):
        action.append({v: t.images[v] for v in ["x", "y", "z"] + QA.U.params})
    sm = socle_map(g1, g2)
    return {
        "title": f"pair deformation {P.QA.pair.name}",
        "F": QA.U.bigF,
        "action": action,
        "I": QA.zero_avg_params,
        "invariant_parameters": QA.invariant_params,
        "F_mod_I": P.bigF,
        "x'": P.embedding[0],
        "y'": P.embedding[1],
        "z'": P.embedding[2],
        "F'": P.smallF,
        "verified": P.verify(),
        "socle_alpha": sm.alpha,
    }


def fold_report(g1: str | None, g2: str | None, synthetic: str | None) -> dict:
    from .fold import fold, fold_pair, group_order, synthetic_d4_s3, synthetic_e6_c2
    if synthetic:
        R, autos = {"d4s3": synthetic_d4_s3, "e6c2": synthetic_e6_c2}[synthetic]()
        F = fold(R, autos)
        title = f"fold of {R.type} by a synthetic automorphism group"
    else:
        F = fold_pair((g1, g2))
        title = f"fold for {g1}<{g2}"
    rep = {
        "title": title,
        "base_type": F.base.type,
        "automorphisms": [list(p) for p in F.autos],
        "folded_type": F.type,
        "folded_roots": len(F.folded.roots),
        "folded_simple_roots": [[str(x) for x in r] for r in F.folded.simple],
    }
    try:
        rep["H_order"] = group_order(F.h_gens_fixed)
    except ValueError:
        rep["H_order"] = "not enumerated"
    return rep


def fold_table() -> dict:
    from .fold import fold_pair
    rows = []
    for a, b in catalog.normal_pairs():
        F = fold_pair((a, b))
        rows.append({"pair": f"{a}<{b}", "base": F.base.type, "folded": F.type, "Q_on_nodes": len(F.autos)})
    return {"title": "folding table for the catalog", "pairs": rows}


def _parse_params(items) -> dict:
    out = {}
    for it in items or []:
        for part in it.split(","):
            if not part:
                continue
            k, _, v = part.partition("=")
            out[k.strip()] = parse_scalar(v.strip())
    return out


def cbh_report(group: str | None, pair: str | None, degree: int, params: dict, formal: bool, seed: int) -> dict:
    import random
    from .cbh import (CBHAlgebra, commutativity_check, first_order_bracket, invariant_embedding,
                      spherical_basis)
    from .grp import build_group, normal_pair
    rng = random.Random(seed)
    if pair:
        a, b = pair.split(",")
        pr = normal_pair(a, b)
        coeffs = [params.get(f"t{i}", Fraction(rng.randint(1, 9), rng.randint(1, 5))) for i in range(len(pr.orbits))]
        r = invariant_embedding(pr, coeffs, degree)
        return {"title": f"invariant embedding {pr.name}", "seed": seed, "orbit_coefficients": coeffs,
                "invariant_dims": r.invariant_dims, "target_dims": r.target_dims, "structure_ok": r.structure_ok}
    G = build_group(group)
    if formal:
        br = first_order_bracket(G, degree)
        return {"title": f"first-order bracket for {G.name}", "pairs": len(br.pairs),
                "extracted": br.extracted[0] if br.extracted else {}, "consistent": br.consistent}
    coeffs = [params.get(f"t{i}", Fraction(rng.randint(1, 9), rng.randint(1, 5))) for i in range(len(G.classes))]
    A = CBHAlgebra.from_classes(G, coeffs, spherical=True)
    B = spherical_basis(A, degree)
    comm, witness = commutativity_check(A, degree, generator_pairs=G.spec.kind in "TOI")
    per_degree = [B.dims[0]] + [B.dims[d] - B.dims[d - 1] for d in range(1, len(B.dims))]
    return {"title": f"CBH algebra for {G.name}", "seed": seed, "class_coefficients": coeffs,
            "spherical_dims_by_degree": per_degree, "spherical_filtered_dims": B.dims,
            "molien_filtered": B.expected, "flat": B.flat, "commutative": comm,
            "witness": list(witness) if witness else None}


# ---------------------------------------------------------------------------
# main
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from .acceptance import DEFAULT_SEED, SUITES
    p = argparse.ArgumentParser(prog="kleinpair", description="Kleinian pairs: invariants, deformations, folding, CBH algebras")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp):
        sp.add_argument("--emit", choices=("json", "latex", "text"), default="text")
        sp.add_argument("--out", help="write the report to this file")

    sp = sub.add_parser("group"); sp.add_argument("name"); fmt(sp)
    sp = sub.add_parser("kleinian"); sp.add_argument("name"); fmt(sp)
    sp = sub.add_parser("deform"); sp.add_argument("name"); fmt(sp)
    sp = sub.add_parser("pair")
    sp.add_argument("--g1", required=True)
    sp.add_argument("--g2", required=True)
    sp.add_argument("--golden-dir", default=str(GOLDEN_DIR))
    sp.add_argument("--check-golden", action="store_true")
    sp.add_argument("--update-golden", action="store_true")
    fmt(sp)
    sp = sub.add_parser("fold")
    sp.add_argument("--g1")
    sp.add_argument("--g2")
    sp.add_argument("--synthetic", choices=("d4s3", "e6c2"))
    sp.add_argument("--catalog", action="store_true")
    fmt(sp)
    sp = sub.add_parser("cbh")
    sp.add_argument("--group")
    sp.add_argument("--pair", help="G1,G2")
    sp.add_argument("--degree", type=int, default=6)
    sp.add_argument("--param", action="append", help="name=value list, e.g. t0=1,t1=1/2")
    sp.add_argument("--formal", action="store_true")
    fmt(sp)
    sp = sub.add_parser("verify")
    sp.add_argument("--suite", choices=sorted(SUITES), default="all")
    sp.add_argument("--workers", type=int, default=None)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0) if e.code not in (None, 0) else 0
    try:
        if args.command == "verify":
            from .acceptance import SUITES, run
            print(f"seed {args.seed}")
            results = run(SUITES[args.suite], args.seed, args.workers)
            for r in results:
                print(r.line())
            return 0 if all(r.ok for r in results) else 1
        if args.command == "group":
            rep = group_report(args.name)
        elif args.command == "kleinian":
            rep = kleinian_report(args.name)
        elif args.command == "deform":
            rep = deform_report(args.name)
        elif args.command == "pair":
            rep = pair_report(args.g1, args.g2)
            path = Path(args.golden_dir) / f"pair_{args.g1}_{args.g2}.json"
            if args.update_golden:
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(render_json(rep))
            elif args.check_golden:
                if not path.exists() or path.read_text() != render_json(rep):
                    print(f"golden mismatch: {path}", file=sys.stderr)
                    return 1
        elif args.command == "fold":
            if args.catalog:
                rep = fold_table()
            elif args.synthetic or (args.g1 and args.g2):
                rep = fold_report(args.g1, args.g2, args.synthetic)
            else:
                parser.error("fold needs --g1/--g2, --synthetic or --catalog")
        elif args.command == "cbh":
            if not args.group and not args.pair:
                parser.error("cbh needs --group or --pair")
            rep = cbh_report(args.group, args.pair, args.degree, _parse_params(args.param), args.formal, args.seed)
        else:  # pragma: no cover
            parser.error("unknown command")
    except SystemExit as e:
        return int(e.code or 2)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    text = emit(rep, args.emit)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
