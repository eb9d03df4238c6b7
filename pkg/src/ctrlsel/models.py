"""Assembly of the input-selection ILP models and their LP pipeline.

Decision variables: one matching variable y per bipartite edge (E_XX
first, then E_UX, in canonical order) and one reachability indicator z
per source component.  The constraint rows are, in order:

  - one equality per left vertex x_i^L (it must be matched),
  - one <= 1 degree row per right vertex x_j^R and per input u_j,
  - one reach row per source component: z_i - sum of y over the links
    into that component <= 0,
  - for the sparsity-bounded problem only, one cardinality row:
    sum of E_UX matching variables - sum of z <= k - r.

Constant objective offsets (the number of sources for the sparsest
problem, the summed minimum source costs for the cost problems) are
carried outside the LP objective and re-added when reporting.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional

from . import simplex
from .errors import (
    CertificateFailure,
    GroupingViolation,
    InfeasibleSystem,
    NonIntegralSolution,
    ZeroMaxCost,
)
from .graphs import (
    ControllabilityCertificate,
    Link,
    SccDecomposition,
    StructuredSystem,
    SystemBipartite,
    build_bipartite,
    build_system_digraph,
    is_structurally_controllable,
    scc_decompose,
)

PROBLEMS = ("p1", "p2", "p3", "p4")


@dataclass
class VariableDirectory:
    """Column layout: E_XX matching vars, E_UX matching vars, then z_1..z_r."""

    exx: tuple[Link, ...]
    eux: tuple[Link, ...]
    r: int

    def __post_init__(self):
        self._exx_col = {e: c for c, e in enumerate(self.exx)}
        self._eux_col = {e: len(self.exx) + c for c, e in enumerate(self.eux)}

    @property
    def ncols(self) -> int:
        return len(self.exx) + len(self.eux) + self.r

    def exx_col(self, edge: Link) -> int:
        return self._exx_col[edge]

    def eux_col(self, edge: Link) -> int:
        return self._eux_col[edge]

    def z_col(self, source: int) -> int:
        """Column of z_i for the 1-based source component number."""
        if not (1 <= source <= self.r):
            raise ValueError(f"source index {source} out of range 1..{self.r}")
        return len(self.exx) + len(self.eux) + source - 1

    def eux_cols(self) -> range:
        return range(len(self.exx), len(self.exx) + len(self.eux))

    def z_cols(self) -> range:
        n_y = len(self.exx) + len(self.eux)
        return range(n_y, n_y + self.r)

    def tag(self, col: int) -> str:
        if col < len(self.exx):
            i, j = self.exx[col]
            return f"y[a:{i},{j}]"
        col2 = col - len(self.exx)
        if col2 < len(self.eux):
            i, j = self.eux[col2]
            return f"y[b:{i},{j}]"
        return f"z[{col - len(self.exx) - len(self.eux) + 1}]"


@dataclass
class IlpRow:
    coeffs: dict[int, int]
    sense: str  # "==" or "<="
    rhs: int
    tag: str


@dataclass
class IlpModel:
    problem: str
    directory: VariableDirectory
    rows: list[IlpRow]
    objective: tuple[Fraction, ...]
    offset: Fraction
    integral: bool = True
    k: Optional[int] = None

    def __post_init__(self):
        for row in self.rows:
            for c, v in row.coeffs.items():
                if v not in (-1, 1):
                    raise ValueError(f"row {row.tag}: coefficient {v} not in {{0, +-1}}")
                if not (0 <= c < self.directory.ncols):
                    raise ValueError(f"row {row.tag}: column {c} out of range")
            if row.rhs != int(row.rhs):
                raise ValueError(f"row {row.tag}: rhs {row.rhs} not integral")


@dataclass(frozen=True)
class SourceCostProfile:
    """Per source component: the cheapest link into it and its cost.

    Ties on cost are broken by the lexicographically smallest (state,
    input) pair, so the recovered selections are deterministic.
    """

    min_costs: tuple[Fraction, ...]
    argmin_links: tuple[Link, ...]


def source_cost_profile(sys: StructuredSystem, scc: SccDecomposition) -> SourceCostProfile:
    mins: list[Fraction] = []
    args: list[Link] = []
    for i, links in enumerate(scc.source_links, start=1):
        if not links:
            raise InfeasibleSystem(
                f"source component {i} has no input link; no selection can reach it"
            )
        best = min(links, key=lambda l: (sys.costs[l], l))
        mins.append(sys.costs[best])
        args.append(best)
    return SourceCostProfile(min_costs=tuple(mins), argmin_links=tuple(args))


@dataclass(frozen=True)
class InputSelection:
    """A selected set of input links with its controllability certificate."""

    links: tuple[Link, ...]
    total_cost: Fraction
    sparsity: int
    certificate: ControllabilityCertificate
    e_mat: tuple[Link, ...] = ()
    e_rea: tuple[Link, ...] = ()


def check_assumption_sc(sys: StructuredSystem) -> bool:
    """Structural controllability with every input link selected."""
    return bool(is_structurally_controllable(sys, sys.b_pattern))


def check_assumption_grouped(
    sys: StructuredSystem, scc: SccDecomposition
) -> tuple[bool, Optional[tuple[int, int, int]]]:
    """Source-grouped input constraint; the witness is (input, state, state)."""
    witness = scc.grouping_violation(sys.b_pattern)
    return witness is None, witness


def _require_controllable(sys: StructuredSystem):
    if not check_assumption_sc(sys):
        raise InfeasibleSystem(
            "system is not structurally controllable with all links selected"
        )


def _base_rows(bg: SystemBipartite, scc: SccDecomposition, d: VariableDirectory) -> list[IlpRow]:
    rows: list[IlpRow] = []
    for i in range(1, bg.n + 1):
        coeffs = {d.exx_col(e): 1 for e in bg.exx if e[0] == i}
        coeffs.update({d.eux_col(e): 1 for e in bg.eux if e[0] == i})
        rows.append(IlpRow(coeffs=coeffs, sense="==", rhs=1, tag=f"match[xL{i}]"))
    for j in range(1, bg.n + 1):
        coeffs = {d.exx_col(e): 1 for e in bg.exx if e[1] == j}
        rows.append(IlpRow(coeffs=coeffs, sense="<=", rhs=1, tag=f"degree[xR{j}]"))
    for j in range(1, bg.m + 1):
        coeffs = {d.eux_col(e): 1 for e in bg.eux if e[1] == j}
        rows.append(IlpRow(coeffs=coeffs, sense="<=", rhs=1, tag=f"degree[u{j}]"))
    for i in range(1, scc.r + 1):
        coeffs = {d.eux_col(e): -1 for e in scc.source_links[i - 1]}
        coeffs[d.z_col(i)] = 1
        rows.append(IlpRow(coeffs=coeffs, sense="<=", rhs=0, tag=f"reach[{i}]"))
    return rows


def _directory(bg: SystemBipartite, scc: SccDecomposition) -> VariableDirectory:
    return VariableDirectory(exx=bg.exx, eux=bg.eux, r=scc.r)


def build_p1_ilp(
    sys: StructuredSystem, scc: SccDecomposition, bg: SystemBipartite
) -> IlpModel:
    """Sparsest selection: count selected links plus unreached sources."""
    _require_controllable(sys)
    d = _directory(bg, scc)
    obj = [Fraction(0)] * d.ncols
    for c in d.eux_cols():
        obj[c] = Fraction(1)
    for c in d.z_cols():
        obj[c] = Fraction(-1)
    return IlpModel(
        problem="p1",
        directory=d,
        rows=_base_rows(bg, scc, d),
        objective=tuple(obj),
        offset=Fraction(scc.r),
    )


def _cost_objective(
    sys: StructuredSystem,
    d: VariableDirectory,
    profile: SourceCostProfile,
    shift: Fraction = Fraction(0),
) -> tuple[tuple[Fraction, ...], Fraction]:
    obj = [Fraction(0)] * d.ncols
    for c, edge in zip(d.eux_cols(), d.eux):
        obj[c] = sys.costs[edge] + shift
    for i, c in enumerate(d.z_cols()):
        obj[c] = -(profile.min_costs[i] + shift)
    offset = sum((w + shift for w in profile.min_costs), Fraction(0))
    return tuple(obj), offset


def build_p2_ilp(
    sys: StructuredSystem,
    scc: SccDecomposition,
    bg: SystemBipartite,
    profile: SourceCostProfile,
) -> IlpModel:
    """Minimum cost selection: link costs plus the cheapest repair per unreached source."""
    _require_controllable(sys)
    d = _directory(bg, scc)
    obj, offset = _cost_objective(sys, d, profile)
    return IlpModel(
        problem="p2",
        directory=d,
        rows=_base_rows(bg, scc, d),
        objective=obj,
        offset=offset,
    )


def build_p3_ilp(
    sys: StructuredSystem,
    scc: SccDecomposition,
    bg: SystemBipartite,
    profile: SourceCostProfile,
    k: int,
) -> IlpModel:
    """Minimum cost under a sparsity bound k.

    Feasibility of k is not pre-checked; an infeasible bound surfaces
    as LP infeasibility.
    """
    if k < 0:
        raise ValueError(f"sparsity bound must be non-negative, got {k}")
    model = build_p2_ilp(sys, scc, bg, profile)
    d = model.directory
    coeffs = {c: 1 for c in d.eux_cols()}
    coeffs.update({c: -1 for c in d.z_cols()})
    model.rows.append(IlpRow(coeffs=coeffs, sense="<=", rhs=k - scc.r, tag="card"))
    model.problem = "p3"
    model.k = k
    return model


def build_p4_as_p2(
    sys: StructuredSystem,
    scc: SccDecomposition,
    bg: SystemBipartite,
    profile: SourceCostProfile,
) -> IlpModel:
    """Sparsest-then-cheapest selection, as a cost problem over shifted costs.

    Every link cost is shifted by gamma = n * w_max, which penalizes
    each extra link more than any achievable cost saving; minimizing
    the shifted cost is then lexicographic in (sparsity, cost).
    """
    _require_controllable(sys)
    w_max = sys.w_max
    if w_max == 0:
        raise ZeroMaxCost("sparsity penalty needs w_max > 0")
    gamma = sys.n * w_max
    d = _directory(bg, scc)
    obj, offset = _cost_objective(sys, d, profile, shift=gamma)
    return IlpModel(
        problem="p4",
        directory=d,
        rows=_base_rows(bg, scc, d),
        objective=obj,
        offset=offset,
    )


def relax(model: IlpModel) -> IlpModel:
    """Drop integrality; bounds stay [0, 1].  Idempotent."""
    return replace(model, rows=list(model.rows), integral=False)


def recover_selection(
    sys: StructuredSystem,
    scc: SccDecomposition,
    profile: SourceCostProfile,
    model: IlpModel,
    vector: Iterable[Fraction],
) -> InputSelection:
    """Selection from an integral solution: matched links plus repairs.

    E_mat collects the E_UX edges with y = 1; E_rea adds the cheapest
    link into every source with z = 0 (even a zero-cost one, since
    controllability needs the link regardless of its cost).  The
    certificate is recomputed and must pass.
    """
    x = list(vector)
    d = model.directory
    if len(x) != d.ncols:
        raise ValueError(f"vector length {len(x)} != {d.ncols}")
    for c, v in enumerate(x):
        if v != 0 and v != 1:
            raise NonIntegralSolution(c, v)
    e_mat = tuple(edge for c, edge in zip(d.eux_cols(), d.eux) if x[c] == 1)
    e_rea = tuple(
        profile.argmin_links[i]
        for i, c in enumerate(d.z_cols())
        if x[c] == 0
    )
    links = tuple(sorted(set(e_mat) | set(e_rea)))
    cert = is_structurally_controllable(sys, links)
    if not cert:
        raise CertificateFailure(
            f"recovered selection {links} failed the controllability certificate"
        )
    return InputSelection(
        links=links,
        total_cost=sys.cost_of(links),
        sparsity=len(links),
        certificate=cert,
        e_mat=e_mat,
        e_rea=e_rea,
    )


def debug_text(model: IlpModel) -> str:
    """Plain-text dump of a model for golden-file comparison."""
    d = model.directory
    lines = [
        f"problem {model.problem}  cols {d.ncols}  rows {len(model.rows)}"
        + (f"  k {model.k}" if model.k is not None else ""),
        f"offset {model.offset}",
        "min " + " ".join(str(c) for c in model.objective),
    ]
    for c in range(d.ncols):
        lines.append(f"col {c} {d.tag(c)}")
    for row in model.rows:
        terms = " ".join(
            f"{'+' if v > 0 else '-'}{d.tag(c)}"
            for c, v in sorted(row.coeffs.items())
        )
        lines.append(f"row {row.tag} {terms} {row.sense} {row.rhs}")
    lines.append(f"integral {'yes' if model.integral else 'no'}")
    return "\n".join(lines) + "\n"


@dataclass
class SolveResult:
    """Outcome of the end-to-end pipeline (or of the brute-force oracle)."""

    problem: str
    status: str  # "optimal" | "infeasible" | "fractional"
    k: Optional[int] = None
    optimum: Optional[Fraction] = None
    selection: Optional[InputSelection] = None
    outcome: Optional[simplex.LpOutcome] = None
    model: Optional[IlpModel] = None
    penalized_optimum: Optional[Fraction] = None
    grouped: bool = True
    grouping_witness: Optional[tuple[int, int, int]] = None
    elapsed: float = 0.0


def build_model(
    sys: StructuredSystem,
    problem: str,
    scc: SccDecomposition,
    bg: SystemBipartite,
    k: Optional[int] = None,
) -> IlpModel:
    if problem == "p1":
        return build_p1_ilp(sys, scc, bg)
    profile = source_cost_profile(sys, scc)
    if problem == "p2":
        return build_p2_ilp(sys, scc, bg, profile)
    if problem == "p3":
        if k is None:
            raise ValueError("p3 needs a sparsity bound k")
        return build_p3_ilp(sys, scc, bg, profile, k)
    if problem == "p4":
        return build_p4_as_p2(sys, scc, bg, profile)
    raise ValueError(f"unknown problem {problem!r}")


def solve_problem(
    sys: StructuredSystem,
    problem: str,
    k: Optional[int] = None,
    strict_grouping: bool = True,
) -> SolveResult:
    """Full pipeline: check, build, relax, solve, recover, certify.

    In strict mode a grouping violation raises; in lenient mode the LP
    is solved anyway and a fractional vertex is reported as such
    instead of being recovered (on grouped instances a fractional
    vertex is impossible and raises NonIntegralSolution).
    """
    if problem not in PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}")
    start = time.perf_counter()
    dg = build_system_digraph(sys)
    scc = scc_decompose(dg)
    bg = build_bipartite(sys)
    grouped, witness = check_assumption_grouped(sys, scc)
    if not grouped and strict_grouping:
        raise GroupingViolation(*witness)

    try:
        model = build_model(sys, problem, scc, bg, k=k)
    except InfeasibleSystem:
        return SolveResult(
            problem=problem,
            status="infeasible",
            k=k,
            grouped=grouped,
            grouping_witness=witness,
            elapsed=time.perf_counter() - start,
        )
    relaxed = relax(model)
    outcome = simplex.solve_lp(relaxed)
    if outcome.status == simplex.UNBOUNDED:
        raise RuntimeError("LP relaxation unbounded; the model is malformed")
    if outcome.status == simplex.INFEASIBLE:
        return SolveResult(
            problem=problem,
            status="infeasible",
            k=k,
            model=model,
            outcome=outcome,
            grouped=grouped,
            grouping_witness=witness,
            elapsed=time.perf_counter() - start,
        )

    integral, bad = simplex.assert_integral(outcome)
    if not integral:
        if grouped:
            raise NonIntegralSolution(bad, outcome.x[bad])
        return SolveResult(
            problem=problem,
            status="fractional",
            k=k,
            optimum=outcome.objective + model.offset,
            model=model,
            outcome=outcome,
            grouped=grouped,
            grouping_witness=witness,
            elapsed=time.perf_counter() - start,
        )

    profile = source_cost_profile(sys, scc)
    selection = recover_selection(sys, scc, profile, model, outcome.x)
    total = outcome.objective + model.offset
    penalized = None
    if problem == "p4":
        penalized = total
        optimum = selection.total_cost
    else:
        optimum = total
        if problem == "p1" and selection.sparsity != total:
            raise CertificateFailure(
                f"sparsity {selection.sparsity} disagrees with optimum {total}"
            )
        if problem in ("p2", "p3") and selection.total_cost != total:
            raise CertificateFailure(
                f"selection cost {selection.total_cost} disagrees with optimum {total}"
            )
    return SolveResult(
        problem=problem,
        status="optimal",
        k=k,
        optimum=optimum,
        selection=selection,
        outcome=outcome,
        model=model,
        penalized_optimum=penalized,
        grouped=grouped,
        grouping_witness=witness,
        elapsed=time.perf_counter() - start,
    )
