"""Command-line surface tying the generators, builders, provers, and the
verifier together over the workspace file formats.

Exit codes: 0 success or valid; 1 certificate invalid; 2 malformed input;
3 symmetry audit failure; 4 budget or cap exceeded; 5 search infeasible.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import fileio
from .algebra import FieldTag, prime_field
from .circuit import Budget
from .errors import BudgetExceededError, CapExceededError, MalformedInputError, SymipsError
from .instances import (
    GraphInput,
    gen_cfi,
    gen_counterexample_f2,
    gen_php,
    gen_piso,
    gen_subset_sum,
    k4,
    prism,
)
from .constructions import (
    build_cfi_linear,
    build_cfi_mu,
    build_php,
    build_subsetsum,
    symmetrize_average,
    symmetrize_product,
)
from .pc import (
    EpcProof,
    epc_to_symipslin,
    pc_search_bounded_degree,
    pc_to_ipslin,
    skewize,
    sym_linear_certificate_search,
)
from .report import render_figure, render_table, stats_row
from .symmetry import GROUP_CAP, SEARCH_CAP
from .verify import audit, verify_certificate

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MALFORMED = 2
EXIT_SYMMETRY = 3
EXIT_BUDGET = 4
EXIT_INFEASIBLE = 5

BUILTIN_GRAPHS = {"k4": k4, "prism": prism}


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_graph_arg(spec: str) -> GraphInput:
    if spec in BUILTIN_GRAPHS:
        return BUILTIN_GRAPHS[spec]()
    return fileio.load_graph(_read(spec))


def _parse_field_arg(text: str) -> FieldTag:
    if text.upper() == "Q":
        return FieldTag("Q")
    if text.upper().startswith("F"):
        return prime_field(int(text[1:]))
    raise MalformedInputError(f"unknown field {text!r} (use Q or F<p>)")


def _budget(args) -> Budget:
    return Budget(args.expansion_budget)


def cmd_gen(args) -> int:
    family = args.family
    if family == "cfi":
        inst = gen_cfi(_load_graph_arg(args.graph), u=args.u, a=args.a)
    elif family == "subsetsum":
        field = _parse_field_arg(args.field)
        beta = Fraction(args.beta) if field.kind == "Q" else int(args.beta)
        inst = gen_subset_sum(args.n, field, beta, lifted=args.lifted)
    elif family == "php":
        inst = gen_php(args.n)
    elif family == "piso":
        g = _load_graph_arg(args.graph)
        h = _load_graph_arg(args.graph2)
        inst = gen_piso(g, h)
    elif family == "example42":
        inst = gen_counterexample_f2()
    else:
        raise MalformedInputError(f"unknown family {family!r}")
    _write(args.out, fileio.dump_instance(inst))
    return EXIT_OK


def cmd_refute(args) -> int:
    inst = fileio.load_instance(_read(args.instance))
    budget = _budget(args)
    method = args.method
    if method == "cfi-mu":
        cert = build_cfi_mu(inst)
    elif method == "cfi-linear":
        cert = build_cfi_linear(inst, budget=budget)
    elif method == "subsetsum":
        cert = build_subsetsum(inst)
    elif method == "php":
        cert = build_php(inst, budget=budget)
    elif method == "pc-search":
        proof = pc_search_bounded_degree(inst, args.degree, budget=budget)
        if proof is None:
            print(
                f"no bounded-degree derivation at degree {args.degree} (fixed point)",
                file=sys.stderr,
            )
            return EXIT_INFEASIBLE
        if args.proof_out:
            _write(args.proof_out, fileio.dump_pcproof(inst.field, proof))
        cert = pc_to_ipslin(inst, proof)
    elif method == "sym-linear-search":
        cert = sym_linear_certificate_search(inst, d=args.degree, budget=budget)
        if cert is None:
            print(
                f"no symmetric linear certificate with coefficient degree {args.degree}",
                file=sys.stderr,
            )
            return EXIT_INFEASIBLE
    else:
        raise MalformedInputError(f"unknown method {method!r}")
    _write(args.out, fileio.dump_certificate(cert))
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = fileio.load_instance(_read(args.instance))
    cert = fileio.load_certificate(_read(args.certificate))
    budget = _budget(args)
    if args.full_audit:
        report = audit(
            inst,
            cert,
            mode=args.mode,
            rounds=args.rounds,
            seed=args.seed,
            budget=budget,
            search_cap=args.search_cap,
        )
    else:
        report = verify_certificate(
            inst, cert, mode=args.mode, rounds=args.rounds, seed=args.seed, budget=budget
        )
    _write(args.out, json.dumps(report.as_dict(), indent=2) + "\n" if args.json else report.as_text())
    if not report.valid():
        return EXIT_INVALID
    if args.full_audit and not report.symmetry_ok():
        return EXIT_SYMMETRY
    return EXIT_OK


def cmd_symmetrize(args) -> int:
    inst = fileio.load_instance(_read(args.instance))
    cert = fileio.load_certificate(_read(args.certificate))
    if args.method == "product":
        out = symmetrize_product(inst, cert, cap=args.group_cap)
    elif args.method == "average":
        out = symmetrize_average(inst, cert, budget=_budget(args), cap=args.group_cap)
    else:
        raise MalformedInputError(f"unknown method {args.method!r}")
    _write(args.out, fileio.dump_certificate(out))
    return EXIT_OK


def cmd_translate(args) -> int:
    inst = fileio.load_instance(_read(args.instance))
    if args.what == "pc-to-ips":
        field, proof, ext = fileio.load_pcproof(_read(args.proof))
        if field != inst.field:
            raise MalformedInputError("proof field differs from the instance field")
        cert = pc_to_ipslin(inst, proof)
    elif args.what == "epc-to-ips":
        field, proof, ext = fileio.load_pcproof(_read(args.proof))
        if field != inst.field:
            raise MalformedInputError("proof field differs from the instance field")
        if ext is None:
            raise MalformedInputError("proof file carries no extension block")
        cert = epc_to_symipslin(inst, EpcProof(proof, ext), budget=_budget(args))
    elif args.what == "skewize":
        cert_in = fileio.load_certificate(_read(args.certificate))
        cert = skewize(inst, cert_in, args.degree, budget=_budget(args))
    else:
        raise MalformedInputError(f"unknown translation {args.what!r}")
    _write(args.out, fileio.dump_certificate(cert))
    return EXIT_OK


def cmd_stats(args) -> int:
    rows = []
    n_vars = None
    if args.instance:
        inst = fileio.load_instance(_read(args.instance))
        n_vars = len(inst.xvars) + len(inst.yvars)
    for path in args.certificates:
        cert = fileio.load_certificate(_read(path))
        rows.append(stats_row(path, cert, n_vars))
    table = render_table(rows)
    _write(args.tsv, table)
    if args.json:
        payload = [dict(zip(("label", "gates", "wires", "instance_vars",
                             "proof_size", "min_convention", "claimed_linear",
                             "claimed_degree"), r.as_tuple())) for r in rows]
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    if args.plot:
        render_figure(rows, args.plot)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="symips",
        description="generate, refute, transform, and verify polynomial-system certificates",
    )
    ap.add_argument(
        "--expansion-budget",
        type=int,
        default=Budget.DEFAULT,
        help=f"term-operation cap for exact expansions (default {Budget.DEFAULT})",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("family", choices=["cfi", "subsetsum", "php", "piso", "example42"])
    g.add_argument("--graph", default="k4", help="graph file or builtin name (k4, prism)")
    g.add_argument("--graph2", default="k4", help="second graph for piso")
    g.add_argument("--u", type=int, default=None, help="special vertex (cfi)")
    g.add_argument("--a", type=int, default=1, help="twist bit (cfi)")
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--beta", default="4", help="target sum (subsetsum)")
    g.add_argument("--field", default="Q", help="Q or F<p> (subsetsum)")
    g.add_argument("--lifted", action="store_true")
    g.add_argument("--out", default="-")
    g.set_defaults(fn=cmd_gen)

    r = sub.add_parser("refute", help="build or search a certificate")
    r.add_argument("instance")
    r.add_argument(
        "--method",
        required=True,
        choices=["cfi-mu", "cfi-linear", "subsetsum", "php", "pc-search", "sym-linear-search"],
    )
    r.add_argument("--degree", type=int, default=2, help="degree bound for the searches")
    r.add_argument("--budget", dest="expansion_budget", type=int,
                   default=argparse.SUPPRESS, help="alias for --expansion-budget")
    r.add_argument("--proof-out", default=None, help="also write the found proof (pc-search)")
    r.add_argument("--out", default="-")
    r.set_defaults(fn=cmd_refute)

    v = sub.add_parser("verify", help="check a certificate against an instance")
    v.add_argument("instance")
    v.add_argument("certificate")
    v.add_argument("--mode", choices=["exact", "pit"], default="exact")
    v.add_argument("--rounds", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--full-audit", action="store_true")
    v.add_argument("--search-cap", type=int, default=SEARCH_CAP,
                   help=f"automorphism-search gate cap (default {SEARCH_CAP})")
    v.add_argument("--json", action="store_true")
    v.add_argument("--out", default="-")
    v.set_defaults(fn=cmd_verify)

    s = sub.add_parser("symmetrize", help="make a certificate symmetric")
    s.add_argument("instance")
    s.add_argument("certificate")
    s.add_argument("--method", choices=["product", "average"], required=True)
    s.add_argument("--group-cap", type=int, default=GROUP_CAP,
                   help=f"group enumeration cap (default {GROUP_CAP})")
    s.add_argument("--out", default="-")
    s.set_defaults(fn=cmd_symmetrize)

    t = sub.add_parser("translate", help="proof-to-certificate translations")
    t.add_argument("what", choices=["pc-to-ips", "epc-to-ips", "skewize"])
    t.add_argument("instance")
    t.add_argument("--proof", help="proof file (pc-to-ips, epc-to-ips)")
    t.add_argument("--certificate", help="certificate file (skewize)")
    t.add_argument("--degree", type=int, default=4, help="degree bound (skewize)")
    t.add_argument("--out", default="-")
    t.set_defaults(fn=cmd_translate)

    st = sub.add_parser("stats", help="size table and figures for certificates")
    st.add_argument("certificates", nargs="+")
    st.add_argument("--instance", default=None, help="instance file for variable counts")
    st.add_argument("--tsv", default="-", help="table output path")
    st.add_argument("--plot", default=None, help="figure output path (png/pdf)")
    st.add_argument("--json", action="store_true")
    st.set_defaults(fn=cmd_stats)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (BudgetExceededError, CapExceededError) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except MalformedInputError as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except SymipsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
