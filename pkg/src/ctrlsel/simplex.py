"""Exact rational simplex returning vertex (basic) optimal solutions.

Everything is computed over fractions.Fraction, so feasibility,
optimality, and integrality of the returned point are decidable with
exact equality.  The solver is a dense two-phase tableau simplex:
inequality rows get slack columns, equality rows get phase-1 artificial
columns, and the pivot rule is Dantzig with a switch to Bland's rule
after an iteration threshold so termination is guaranteed.

The optimum of a bounded LP returned here is always a basic feasible
solution, i.e. a vertex of the feasible polyhedron.  That is the whole
point: on totally unimodular constraint matrices with integer right
hand sides, vertices are integral, so no rounding or crossover step is
ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)

LE = "<="
GE = ">="
EQ = "=="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    """min objective . x  subject to rows, x >= 0.

    Each row is (coeffs, sense, rhs) with coeffs a sparse column->value
    map and sense one of "<=", ">=", "==".  Upper bounds on variables
    must be expressed as rows.
    """

    ncols: int
    objective: list[Fraction]
    rows: list[tuple[dict[int, Fraction], str, Fraction]]

    def __post_init__(self):
        if len(self.objective) != self.ncols:
            raise ValueError("objective length != ncols")
        for coeffs, sense, _rhs in self.rows:
            if sense not in (LE, GE, EQ):
                raise ValueError(f"unknown sense {sense!r}")
            for c in coeffs:
                if not (0 <= c < self.ncols):
                    raise ValueError(f"column {c} out of range")


@dataclass
class LpOutcome:
    """Solver result.

    For an optimal outcome, x is the structural part of the vertex,
    x_ext the full point in the normalized equality form (structural
    columns then slacks), basis the basic column per kept row, and dual
    a multiplier per original row certifying optimality.
    """

    status: str
    x: Optional[tuple[Fraction, ...]] = None
    objective: Optional[Fraction] = None
    x_ext: Optional[tuple[Fraction, ...]] = None
    basis: Optional[tuple[int, ...]] = None
    kept_rows: Optional[tuple[int, ...]] = None
    dual: Optional[tuple[Fraction, ...]] = None


def _normalize(lp: LinearProgram):
    """Equality form with non-negative right hand sides.

    Returns (columns, rows, negated, slack_of_row) where rows are dense
    coefficient lists over ncols + nslacks columns.  negated[i] records
    whether row i was multiplied by -1, which matters when reporting
    duals in the original orientation.
    """
    nslack = sum(1 for _c, sense, _b in lp.rows if sense != EQ)
    total = lp.ncols + nslack
    dense_rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    negated: list[bool] = []
    slack_of_row: list[Optional[int]] = []
    next_slack = lp.ncols
    for coeffs, sense, b in lp.rows:
        row = [ZERO] * total
        for c, v in coeffs.items():
            row[c] = Fraction(v)
        s = None
        if sense == LE:
            s = next_slack
            row[s] = ONE
            next_slack += 1
        elif sense == GE:
            s = next_slack
            row[s] = -ONE
            next_slack += 1
        b = Fraction(b)
        flip = b < 0
        if flip:
            row = [-v for v in row]
            b = -b
        dense_rows.append(row)
        rhs.append(b)
        negated.append(flip)
        slack_of_row.append(s)
    return total, dense_rows, rhs, negated, slack_of_row


class _Tableau:
    def __init__(self, rows, rhs, basis, ncols_total):
        self.rows = rows              # list of lists, ncols_total wide
        self.rhs = rhs
        self.basis = basis            # basic column per row
        self.ncols = ncols_total
        self.locked: set[int] = set()
        self.cost: list[Fraction] = []
        self.cost_rhs = ZERO
        self.iterations = 0

    def set_objective(self, c: Sequence[Fraction]):
        self.cost = list(c) + [ZERO] * (self.ncols - len(c))
        self.cost_rhs = ZERO
        for i, bcol in enumerate(self.basis):
            coef = self.cost[bcol]
            if coef != 0:
                row = self.rows[i]
                for j in range(self.ncols):
                    self.cost[j] -= coef * row[j]
                self.cost_rhs -= coef * self.rhs[i]

    def objective_value(self) -> Fraction:
        return -self.cost_rhs

    def _pivot(self, i: int, j: int):
        row = self.rows[i]
        piv = row[j]
        inv = ONE / piv
        self.rows[i] = row = [v * inv for v in row]
        self.rhs[i] = self.rhs[i] * inv
        for k, other in enumerate(self.rows):
            if k == i:
                continue
            f = other[j]
            if f != 0:
                self.rows[k] = [a - f * b for a, b in zip(other, row)]
                self.rhs[k] -= f * self.rhs[i]
        f = self.cost[j]
        if f != 0:
            for jj in range(self.ncols):
                self.cost[jj] -= f * row[jj]
            self.cost_rhs -= f * self.rhs[i]
        self.basis[i] = j

    def run(self, bland_after: int, hard_cap: int = 200_000) -> str:
        """Pivot to optimality.  Returns "optimal" or "unbounded"."""
        while True:
            self.iterations += 1
            if self.iterations > hard_cap:
                raise RuntimeError("simplex iteration cap exceeded")
            bland = self.iterations > bland_after
            enter = -1
            if bland:
                for j in range(self.ncols):
                    if j not in self.locked and self.cost[j] < 0:
                        enter = j
                        break
            else:
                best = ZERO
                for j in range(self.ncols):
                    if j not in self.locked and self.cost[j] < best:
                        best = self.cost[j]
                        enter = j
            if enter < 0:
                return OPTIMAL
            leave = -1
            best_ratio: Optional[Fraction] = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and self.basis[i] < self.basis[leave])
                    ):
                        best_ratio = ratio
                        leave = i
            if leave < 0:
                return UNBOUNDED
            self._pivot(leave, enter)


def _solve_dual(rows, rhs_cols, size):
    """Solve a dense size x size rational system rows . y = rhs_cols."""
    a = [list(r) + [rhs_cols[i]] for i, r in enumerate(rows)]
    for col in range(size):
        piv = next((r for r in range(col, size) if a[r][col] != 0), None)
        if piv is None:
            raise RuntimeError("singular basis matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = ONE / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(size):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[i][size] for i in range(size)]


def solve(lp: LinearProgram) -> LpOutcome:
    """Two-phase simplex over exact rationals."""
    total, rows, rhs, negated, slack_of_row = _normalize(lp)
    nrows = len(rows)

    basis: list[int] = []
    art_cols: list[int] = []
    next_col = total
    for i in range(nrows):
        s = slack_of_row[i]
        if s is not None and rows[i][s] == 1:
            basis.append(s)
        else:
            basis.append(next_col)
            art_cols.append(next_col)
            next_col += 1
    grand_total = next_col
    for i in range(nrows):
        rows[i] = rows[i] + [ZERO] * (grand_total - total)
        if basis[i] >= total:
            rows[i][basis[i]] = ONE

    tab = _Tableau([list(r) for r in rows], list(rhs), list(basis), grand_total)
    bland_after = 40 + 8 * (nrows + grand_total)

    if art_cols:
        phase1 = [ZERO] * grand_total
        for c in art_cols:
            phase1[c] = ONE
        tab.set_objective(phase1)
        status = tab.run(bland_after)
        if status != OPTIMAL or tab.objective_value() > 0:
            return LpOutcome(status=INFEASIBLE)
        # Pivot remaining artificials out; a row with no eligible pivot
        # is redundant and gets dropped.
        keep = []
        for i in range(len(tab.rows)):
            if tab.basis[i] < total:
                keep.append(i)
                continue
            pivot_col = next(
                (j for j in range(total) if tab.rows[i][j] != 0), None
            )
            if pivot_col is None:
                continue
            tab._pivot(i, pivot_col)
            keep.append(i)
        tab.rows = [tab.rows[i] for i in keep]
        tab.rhs = [tab.rhs[i] for i in keep]
        tab.basis = [tab.basis[i] for i in keep]
        tab.locked = set(art_cols)
        kept_rows = tuple(keep)
    else:
        kept_rows = tuple(range(nrows))

    cost = list(lp.objective) + [ZERO] * (grand_total - lp.ncols)
    tab.set_objective(cost)
    status = tab.run(bland_after)
    if status == UNBOUNDED:
        return LpOutcome(status=UNBOUNDED)

    x_ext = [ZERO] * total
    for i, bcol in enumerate(tab.basis):
        if bcol < total:
            x_ext[bcol] = tab.rhs[i]
    x = tuple(x_ext[: lp.ncols])
    objective = sum((lp.objective[j] * x[j] for j in range(lp.ncols)), ZERO)

    # Dual from the final basis: solve B^T y = c_B on the kept rows,
    # then flip signs for rows that were negated during normalization.
    size = len(tab.basis)
    bt = [[rows[ki][tab.basis[col]] for ki in kept_rows] for col in range(size)]
    cb = [cost[tab.basis[col]] for col in range(size)]
    y_kept = _solve_dual(bt, cb, size) if size else []
    dual = [ZERO] * nrows
    for pos, ki in enumerate(kept_rows):
        dual[ki] = -y_kept[pos] if negated[ki] else y_kept[pos]

    return LpOutcome(
        status=OPTIMAL,
        x=x,
        objective=objective,
        x_ext=tuple(x_ext),
        basis=tuple(tab.basis),
        kept_rows=kept_rows,
        dual=tuple(dual),
    )


def lp_of_model(model) -> LinearProgram:
    """The LP relaxation of an assembled model.

    The model must already be relaxed.  Variable upper bounds enter as
    explicit rows for the reachability indicators only: every matching
    variable appears with coefficient +1 in exactly one degree row
    whose other coefficients are also +1, so y <= 1 is implied and the
    feasible set is unchanged.
    """
    if getattr(model, "integral", False):
        raise ValueError("model still has integrality flags; call relax() first")
    ncols = len(model.objective)
    rows: list[tuple[dict[int, Fraction], str, Fraction]] = []
    for row in model.rows:
        sense = EQ if row.sense == "==" else LE
        rows.append(
            ({c: Fraction(v) for c, v in row.coeffs.items()}, sense, Fraction(row.rhs))
        )
    r = model.directory.r
    for i in range(r):
        zcol = ncols - r + i
        rows.append(({zcol: ONE}, LE, ONE))
    return LinearProgram(ncols=ncols, objective=list(model.objective), rows=rows)


def solve_lp(model) -> LpOutcome:
    """Solve the LP relaxation of an assembled model."""
    return solve(lp_of_model(model))


def assert_integral(outcome: LpOutcome) -> tuple[bool, Optional[int]]:
    """Check every structural coordinate is exactly 0 or 1.

    Returns (True, None) on success, else (False, first bad column).
    On grouped instances a failure here is a bug, not a recoverable
    state: the constraint matrix is totally unimodular and the solver
    only returns vertices.
    """
    if outcome.status != OPTIMAL or outcome.x is None:
        raise ValueError("assert_integral needs an optimal outcome")
    for j, v in enumerate(outcome.x):
        if v != 0 and v != 1:
            return False, j
    return True, None


def verify_optimal(lp: LinearProgram, outcome: LpOutcome) -> None:
    """Re-check an optimal outcome from first principles.

    Raises ValueError unless the point is exactly feasible, is the
    basic solution of its reported basis (a vertex), and the reported
    dual is feasible with matching objective (strong duality).
    """
    if outcome.status != OPTIMAL:
        raise ValueError("outcome is not optimal")
    x = outcome.x
    if x is None or len(x) != lp.ncols:
        raise ValueError("missing or wrong-size solution vector")
    if any(v < 0 for v in x):
        raise ValueError("negative coordinate")
    for idx, (coeffs, sense, b) in enumerate(lp.rows):
        lhs = sum((v * x[c] for c, v in coeffs.items()), ZERO)
        if sense == LE and lhs > b:
            raise ValueError(f"row {idx} violated: {lhs} > {b}")
        if sense == GE and lhs < b:
            raise ValueError(f"row {idx} violated: {lhs} < {b}")
        if sense == EQ and lhs != b:
            raise ValueError(f"row {idx} violated: {lhs} != {b}")
    obj = sum((lp.objective[j] * x[j] for j in range(lp.ncols)), ZERO)
    if obj != outcome.objective:
        raise ValueError(f"objective mismatch: {obj} != {outcome.objective}")

    total, rows, rhs, negated, _slack = _normalize(lp)
    x_ext = outcome.x_ext
    if x_ext is None or len(x_ext) != total:
        raise ValueError("missing extended vector")
    if tuple(x_ext[: lp.ncols]) != tuple(x):
        raise ValueError("extended vector disagrees with x")
    for i, row in enumerate(rows):
        lhs = sum((row[j] * x_ext[j] for j in range(total)), ZERO)
        if lhs != rhs[i]:
            raise ValueError(f"equality form row {i} violated")

    basis = outcome.basis
    kept = outcome.kept_rows
    if basis is None or kept is None or len(basis) != len(kept):
        raise ValueError("missing basis description")
    if len(set(basis)) != len(basis):
        raise ValueError("repeated basic column")
    in_basis = set(basis)
    for j in range(total):
        if j not in in_basis and x_ext[j] != 0:
            raise ValueError(f"nonbasic column {j} at nonzero value; not a vertex")
    size = len(basis)
    if size:
        bmat = [[rows[ki][basis[c]] for c in range(size)] for ki in kept]
        bvec = [rhs[ki] for ki in kept]
        # Solving B xB = b must reproduce the basic coordinates.
        xb = _solve_dual(bmat, bvec, size)
        for c in range(size):
            if xb[c] != x_ext[basis[c]]:
                raise ValueError("basis system does not reproduce the vertex")

    dual = outcome.dual
    if dual is None or len(dual) != len(lp.rows):
        raise ValueError("missing dual vector")
    cost_ext = list(lp.objective) + [ZERO] * (total - lp.ncols)
    for j in range(total):
        reduced = cost_ext[j]
        for i, (row, flip) in enumerate(zip(rows, negated)):
            a = -row[j] if flip else row[j]
            reduced -= dual[i] * a
        if reduced < 0:
            raise ValueError(f"dual infeasible at column {j}: reduced cost {reduced}")
    strong = ZERO
    for i, (_c, _s, b) in enumerate(lp.rows):
        strong += dual[i] * b
    if strong != outcome.objective:
        raise ValueError(f"strong duality fails: {strong} != {outcome.objective}")
