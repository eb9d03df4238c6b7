"""Command-line front end: solve, check, tu, and oracle subcommands.

Exit codes: 0 success, 1 size bound exceeded, 2 infeasible, 3
assumption violation in strict mode, 4 parse or usage error, 5
internal invariant failure.  The machine format is JSON with a stable
field order and no timing, so reports are byte-stable across runs.
"""

from __future__ import annotations

import argparse
import json
import sys as _sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .errors import (
    CertificateFailure,
    CtrlselError,
    GroupingViolation,
    InfeasibleSystem,
    NonIntegralSolution,
    TooLarge,
    ZeroMaxCost,
)
from .graphs import (
    StructuredSystem,
    build_bipartite,
    build_system_digraph,
    is_structurally_controllable,
    scc_decompose,
)
from .instances import InstanceParseError, load_instance
from .models import (
    PROBLEMS,
    SolveResult,
    build_model,
    check_assumption_grouped,
    solve_problem,
)
from .oracle import brute_force_solve
from .unimodular import (
    KERNEL_NAME,
    build_incidence_m,
    build_incidence_m_hat,
    build_standard_form_matrix,
    tu_exhaustive,
    tu_ghouila_houri,
)

EXIT_OK = 0
EXIT_TOO_LARGE = 1
EXIT_INFEASIBLE = 2
EXIT_ASSUMPTION = 3
EXIT_PARSE = 4
EXIT_INTERNAL = 5


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; remap to 4."""

    def error(self, message):
        self.print_usage(_sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _frac_doc(value: Optional[Fraction]):
    if value is None:
        return None
    return {
        "num": value.numerator,
        "den": value.denominator,
        "decimal": format(float(value), ".6g"),
    }


def _frac_text(value: Optional[Fraction]) -> str:
    if value is None:
        return "-"
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator} ({float(value):.6g})"


def _links_doc(sys: StructuredSystem, links) -> list:
    out = []
    for (i, j) in links:
        w = sys.costs[(i, j)]
        out.append([i, j, w.numerator, w.denominator])
    return out


def _assumption_doc(sys: StructuredSystem) -> dict:
    cert = is_structurally_controllable(sys, sys.b_pattern)
    scc = scc_decompose(build_system_digraph(sys))
    grouped, witness = check_assumption_grouped(sys, scc)
    costs = sorted(sys.costs.values())
    return {
        "controllable": bool(cert),
        "unreached_states": [
            i for i, ok in enumerate(cert.reachable, start=1) if not ok
        ],
        "unmatched_states": list(cert.unmatched),
        "w_min": _frac_doc(costs[0]) if costs else None,
        "w_max": _frac_doc(costs[-1]) if costs else None,
        "grouped": grouped,
        "grouping_witness": list(witness) if witness else None,
    }


def _solve_doc(sys: StructuredSystem, res) -> dict:
    if isinstance(res, SolveResult):
        selection = res.selection
        links = selection.links if selection else ()
        sparsity = selection.sparsity if selection else None
        cost = selection.total_cost if selection else None
        integral = res.status != "fractional"
        penalized = res.penalized_optimum
        grouped = res.grouped
        witness = res.grouping_witness
        engine = "lp"
    else:
        links = res.links
        sparsity = res.sparsity
        cost = res.total_cost
        integral = True
        penalized = None
        scc = scc_decompose(build_system_digraph(sys))
        grouped, witness = check_assumption_grouped(sys, scc)
        engine = "oracle"
    return {
        "engine": engine,
        "problem": res.problem,
        "status": res.status,
        "k": res.k,
        "optimum": _frac_doc(res.optimum),
        "sparsity": sparsity,
        "total_cost": _frac_doc(cost),
        "links": [[i, j] for (i, j) in links],
        "link_costs": _links_doc(sys, links),
        "integral": integral,
        "penalized_optimum": _frac_doc(penalized),
        "grouped": grouped,
        "grouping_witness": list(witness) if witness else None,
    }


def _solve_text(doc: dict, elapsed: float) -> str:
    lines = [
        f"engine: {doc['engine']}",
        f"problem: {doc['problem']}" + (f" (k={doc['k']})" if doc["k"] is not None else ""),
        f"status: {doc['status']}",
    ]
    opt = doc["optimum"]
    lines.append(
        "optimum: "
        + ("-" if opt is None else _frac_text(Fraction(opt["num"], opt["den"])))
    )
    if doc["sparsity"] is not None:
        lines.append(f"sparsity: {doc['sparsity']}")
    tc = doc["total_cost"]
    if tc is not None:
        lines.append(f"total cost: {_frac_text(Fraction(tc['num'], tc['den']))}")
    if doc["links"]:
        lines.append("links: " + " ".join(f"(x{i},u{j})" for i, j in doc["links"]))
        lines.append(
            "link costs: "
            + " ".join(
                f"(x{i},u{j})={_frac_text(Fraction(n, d))}"
                for i, j, n, d in doc["link_costs"]
            )
        )
    if doc["penalized_optimum"] is not None:
        pen = doc["penalized_optimum"]
        lines.append(f"penalized optimum: {_frac_text(Fraction(pen['num'], pen['den']))}")
    if not doc["integral"]:
        lines.append("warning: LP relaxation returned a fractional vertex")
    lines.append(
        "assumptions: grouped=" + ("yes" if doc["grouped"] else "no")
        + (
            ""
            if doc["grouping_witness"] is None
            else " witness=u{0} x{1}/x{2}".format(*doc["grouping_witness"])
        )
    )
    lines.append(f"elapsed: {elapsed:.3f}s")
    return "\n".join(lines) + "\n"


def _emit(args, machine_doc: dict, text: str) -> None:
    if args.format == "machine":
        payload = json.dumps(machine_doc, indent=2) + "\n"
    else:
        payload = text
    if args.out:
        Path(args.out).write_text(payload)
    else:
        _sys.stdout.write(payload)


def _status_exit(status: str) -> int:
    return EXIT_OK if status in ("optimal", "fractional") else EXIT_INFEASIBLE


def cmd_solve(args) -> int:
    sys = load_instance(args.instance)
    res = solve_problem(sys, args.problem, k=args.k, strict_grouping=args.strict)
    doc = _solve_doc(sys, res)
    _emit(args, doc, _solve_text(doc, res.elapsed))
    return _status_exit(res.status)


def cmd_oracle(args) -> int:
    sys = load_instance(args.instance)
    start = time.perf_counter()
    res = brute_force_solve(sys, args.problem, k=args.k)
    doc = _solve_doc(sys, res)
    _emit(args, doc, _solve_text(doc, time.perf_counter() - start))
    return _status_exit(res.status)


def cmd_check(args) -> int:
    sys = load_instance(args.instance)
    start = time.perf_counter()
    doc = _assumption_doc(sys)
    lines = [
        "controllable: " + ("yes" if doc["controllable"] else "no"),
    ]
    if doc["unreached_states"]:
        lines.append(
            "unreached states: " + " ".join(f"x{i}" for i in doc["unreached_states"])
        )
    if doc["unmatched_states"]:
        lines.append(
            "unmatched states: " + " ".join(f"x{i}" for i in doc["unmatched_states"])
        )
    if doc["w_min"] is not None:
        w_lo = Fraction(doc["w_min"]["num"], doc["w_min"]["den"])
        w_hi = Fraction(doc["w_max"]["num"], doc["w_max"]["den"])
        lines.append(f"costs: min {_frac_text(w_lo)}  max {_frac_text(w_hi)}")
    lines.append("grouped: " + ("yes" if doc["grouped"] else "no"))
    if doc["grouping_witness"]:
        j, a, b = doc["grouping_witness"]
        lines.append(f"grouping witness: u{j} actuates x{a} and x{b}")
    lines.append(f"elapsed: {time.perf_counter() - start:.3f}s")
    _emit(args, doc, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_tu(args) -> int:
    sys = load_instance(args.instance)
    start = time.perf_counter()
    dg = build_system_digraph(sys)
    scc = scc_decompose(dg)
    bg = build_bipartite(sys)
    rhs = None
    if args.which == "m":
        matrix = build_incidence_m(bg, scc)
    elif args.which == "mhat":
        matrix = build_incidence_m_hat(bg, scc)
    else:
        model = build_model(sys, args.problem, scc, bg, k=args.k)
        matrix, rhs = build_standard_form_matrix(model)
    verdict = (
        tu_exhaustive(matrix)
        if args.method == "exhaustive"
        else tu_ghouila_houri(matrix)
    )
    doc = {
        "which": args.which,
        "method": verdict.method,
        "kernel": KERNEL_NAME,
        "nrows": matrix.nrows,
        "ncols": matrix.ncols,
        "row_labels": list(matrix.row_labels),
        "col_labels": list(matrix.col_labels),
        "entries": [list(r) for r in matrix.entries],
        "rhs": None if rhs is None else [_frac_doc(v) for v in rhs],
        "is_tu": verdict.is_tu,
        "witness_rows": list(verdict.witness_rows) if verdict.witness_rows else None,
        "witness_cols": list(verdict.witness_cols) if verdict.witness_cols else None,
        "determinant": verdict.determinant,
        "gh_subset": list(verdict.gh_subset) if verdict.gh_subset else None,
        "gh_axis": verdict.gh_axis,
    }
    lines = [
        f"matrix {args.which}: {matrix.nrows} x {matrix.ncols}",
        matrix.to_text().rstrip("\n"),
    ]
    if rhs is not None:
        lines.append("rhs: " + " ".join(_frac_text(v) for v in rhs))
    if verdict.is_tu:
        lines.append(f"verdict: TU ({verdict.method}, {KERNEL_NAME} kernel)")
    else:
        lines.append(f"verdict: NOT TU ({verdict.method}, {KERNEL_NAME} kernel)")
        lines.append("witness rows: " + " ".join(str(i) for i in verdict.witness_rows))
        lines.append("witness cols: " + " ".join(str(j) for j in verdict.witness_cols))
        lines.append(f"determinant: {verdict.determinant}")
        if verdict.gh_subset is not None:
            lines.append(
                f"unsignable {verdict.gh_axis}: "
                + " ".join(str(i) for i in verdict.gh_subset)
            )
    lines.append(f"elapsed: {time.perf_counter() - start:.3f}s")
    _emit(args, doc, "\n".join(lines) + "\n")
    return EXIT_OK


def _add_common(sp) -> None:
    sp.add_argument("instance", help="instance file (JSON)")
    sp.add_argument(
        "--format", choices=("text", "machine"), default="text",
        help="text report or byte-stable JSON",
    )
    sp.add_argument("--out", default=None, help="write the report to this path")


def _add_problem(sp, required: bool) -> None:
    sp.add_argument(
        "--problem", choices=PROBLEMS, required=required, default=None if required else "p1",
        help="which selection problem to solve",
    )
    sp.add_argument("--k", type=int, default=None, help="sparsity bound (p3 only)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ctrlsel",
        description="Minimum-cost and sparsest input selection for structural controllability.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", parents=[], help="solve via the LP relaxation pipeline")
    _add_common(sp)
    _add_problem(sp, required=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument(
        "--strict", dest="strict", action="store_true", default=True,
        help="abort on a source-grouped violation (default)",
    )
    g.add_argument(
        "--lenient", dest="strict", action="store_false",
        help="solve anyway; fractional vertices are reported, not errors",
    )
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("oracle", help="solve by exhaustive enumeration")
    _add_common(sp)
    _add_problem(sp, required=True)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("check", help="report the assumption checks only")
    _add_common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("tu", help="build a constraint matrix and certify TU")
    _add_common(sp)
    sp.add_argument(
        "--which", choices=("m", "mhat", "mlp"), default="m",
        help="incidence matrix, with cardinality row, or full inequality form",
    )
    sp.add_argument(
        "--method", choices=("exhaustive", "gh"), default="exhaustive",
        help="minimal-submatrix search or row-signing criterion",
    )
    _add_problem(sp, required=False)
    sp.set_defaults(func=cmd_tu)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "problem", None) is not None:
        if args.problem == "p3" and args.k is None:
            parser.error("p3 requires --k")
        if args.problem != "p3" and args.k is not None:
            parser.error("--k only applies to p3")
        if args.k is not None and args.k < 0:
            parser.error("--k must be non-negative")
    try:
        return args.func(args)
    except InstanceParseError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_PARSE
    except GroupingViolation as exc:
        print(f"assumption violation: {exc}", file=_sys.stderr)
        return EXIT_ASSUMPTION
    except ZeroMaxCost as exc:
        print(f"assumption violation: {exc}", file=_sys.stderr)
        return EXIT_ASSUMPTION
    except InfeasibleSystem as exc:
        print(f"infeasible: {exc}", file=_sys.stderr)
        return EXIT_INFEASIBLE
    except TooLarge as exc:
        print(f"too large: {exc}", file=_sys.stderr)
        return EXIT_TOO_LARGE
    except (NonIntegralSolution, CertificateFailure) as exc:
        print(f"internal invariant failure: {exc}", file=_sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
