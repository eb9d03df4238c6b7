"""Augmented incidence matrices and total unimodularity certification.

The matrix M stacks the vertex-edge incidence of the bipartite graph
with one reach row per source group (-1 on the group's input-edge
columns, +1 on its slack column); M-hat appends a cardinality row.
Certification is exhaustive minimal-submatrix search or the row-subset
signing criterion, both desk-scale by design.

The search kernels live in _tucore (compiled) with _tupure as the
drop-in fallback; whichever imported is reported in KERNEL_NAME.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import GroupingViolation, TooLarge
from .graphs import SccDecomposition, SystemBipartite

try:
    from . import _tucore as _kernel

    KERNEL_NAME = "compiled"
except ImportError:
    from . import _tupure as _kernel

    KERNEL_NAME = "pure"

EXHAUSTIVE_LIMIT = 14
GH_LIMIT = 22
DET_LIMIT = 20


@dataclass(frozen=True)
class AugmentedIncidence:
    """Small dense {0, +-1} matrix with labeled rows and columns."""

    entries: tuple[tuple[int, ...], ...]
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.entries) != len(self.row_labels):
            raise ValueError("row label count mismatch")
        for row in self.entries:
            if len(row) != len(self.col_labels):
                raise ValueError("ragged rows or column label count mismatch")

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.col_labels)

    def to_text(self) -> str:
        lines = ["cols: " + " ".join(self.col_labels)]
        for label, row in zip(self.row_labels, self.entries):
            lines.append(f"{label}: " + " ".join(str(v) for v in row))
        return "\n".join(lines) + "\n"


def build_incidence_m(
    bg: SystemBipartite, scc: SccDecomposition, strict: bool = False
) -> AugmentedIncidence:
    """The (n_V + r) x (n_E + r) augmented incidence matrix.

    Row order: left states, right states, inputs, then one reach row
    per source group.  Column order: E_XX edges, E_UX edges (both in
    canonical edge order), then the r slack columns.  The reach rows
    depend only on each edge's target state, so the matrix is still
    well defined for systems violating the source-grouped constraint;
    strict mode refuses those instead.
    """
    if strict:
        witness = scc.grouping_violation(bg.eux)
        if witness is not None:
            raise GroupingViolation(*witness)
    n, m, r = bg.n, bg.m, scc.r
    nrows = 2 * n + m + r
    ncols = bg.n_edges + r
    cells = [[0] * ncols for _ in range(nrows)]
    col_labels: list[str] = []
    for c, (i, j) in enumerate(bg.exx):
        cells[i - 1][c] = 1
        cells[n + j - 1][c] = 1
        col_labels.append(f"a:{i},{j}")
    base = len(bg.exx)
    for t, (i, j) in enumerate(bg.eux):
        c = base + t
        cells[i - 1][c] = 1
        cells[2 * n + j - 1][c] = 1
        src = scc.source_of_state(i)
        if src is not None:
            cells[2 * n + m + src - 1][c] = -1
        col_labels.append(f"b:{i},{j}")
    for l in range(1, r + 1):
        cells[2 * n + m + l - 1][bg.n_edges + l - 1] = 1
        col_labels.append(f"s:{l}")
    row_labels = (
        [f"xL{i}" for i in range(1, n + 1)]
        + [f"xR{j}" for j in range(1, n + 1)]
        + [f"u{j}" for j in range(1, m + 1)]
        + [f"reach{l}" for l in range(1, r + 1)]
    )
    return AugmentedIncidence(
        entries=tuple(tuple(row) for row in cells),
        row_labels=tuple(row_labels),
        col_labels=tuple(col_labels),
    )


def build_incidence_m_hat(
    bg: SystemBipartite, scc: SccDecomposition, strict: bool = False
) -> AugmentedIncidence:
    """M plus the cardinality row: +1 on every E_UX column, -1 on slacks."""
    m = build_incidence_m(bg, scc, strict=strict)
    extra = [0] * m.ncols
    for c in range(len(bg.exx), bg.n_edges):
        extra[c] = 1
    for c in range(bg.n_edges, m.ncols):
        extra[c] = -1
    return AugmentedIncidence(
        entries=m.entries + (tuple(extra),),
        row_labels=m.row_labels + ("card",),
        col_labels=m.col_labels,
    )


@dataclass(frozen=True)
class TuVerdict:
    """Certification outcome, with a re-verifiable witness on refutation.

    witness_rows/witness_cols index a square submatrix whose signed
    determinant lands outside {-1, 0, 1}.  For the signing method,
    gh_subset records the minimal unsignable subset along gh_axis
    ("rows" or "cols" of the matrix as given; the criterion transposes
    internally to the smaller side).
    """

    is_tu: bool
    method: str
    witness_rows: Optional[tuple[int, ...]] = None
    witness_cols: Optional[tuple[int, ...]] = None
    determinant: Optional[int] = None
    gh_subset: Optional[tuple[int, ...]] = None
    gh_axis: Optional[str] = None


def _entries_of(mat) -> tuple[tuple[int, ...], ...]:
    if isinstance(mat, AugmentedIncidence):
        return mat.entries
    entries = tuple(tuple(int(v) for v in row) for row in mat)
    widths = {len(row) for row in entries}
    if len(widths) > 1:
        raise ValueError("ragged matrix")
    return entries


def _entry_violation(entries) -> Optional[tuple[int, int, int]]:
    for i, row in enumerate(entries):
        for j, v in enumerate(row):
            if v not in (-1, 0, 1):
                return i, j, v
    return None


def submatrix_det(mat, rows: Sequence[int], cols: Sequence[int]) -> int:
    """Signed determinant of the selected square submatrix.

    Memoized cofactor expansion over column masks; independent of the
    elimination used by the search kernels, so it serves as the
    witness re-verification path.
    """
    entries = _entries_of(mat)
    rows = tuple(rows)
    cols = tuple(cols)
    if len(rows) != len(cols):
        raise ValueError("submatrix must be square")
    k = len(rows)
    if k > DET_LIMIT:
        raise TooLarge(f"cofactor expansion capped at {DET_LIMIT}x{DET_LIMIT}")
    if k == 0:
        return 1
    sub = [[entries[r][c] for c in cols] for r in rows]
    memo: dict[int, int] = {}

    def expand(mask: int) -> int:
        if mask == 0:
            return 1
        cached = memo.get(mask)
        if cached is not None:
            return cached
        d = k - mask.bit_count()
        total = 0
        sign = 1
        rest = mask
        while rest:
            low = rest & -rest
            c = low.bit_length() - 1
            a = sub[d][c]
            if a:
                total += sign * a * expand(mask ^ low)
            sign = -sign
            rest ^= low
        memo[mask] = total
        return total

    return expand((1 << k) - 1)


def tu_exhaustive(mat) -> TuVerdict:
    """Certify or refute by scanning square submatrices, smallest first.

    A hit is a minimal violation, so its determinant is +-2 exactly;
    the stored value is recomputed independently before returning.
    """
    entries = _entries_of(mat)
    nr = len(entries)
    nc = len(entries[0]) if nr else 0
    if min(nr, nc) > EXHAUSTIVE_LIMIT:
        raise TooLarge(
            f"min(rows, cols) = {min(nr, nc)} exceeds the exhaustive bound {EXHAUSTIVE_LIMIT}"
        )
    bad = _entry_violation(entries)
    if bad is not None:
        i, j, v = bad
        return TuVerdict(
            is_tu=False,
            method="exhaustive",
            witness_rows=(i,),
            witness_cols=(j,),
            determinant=v,
        )
    found = _kernel.find_violation(entries)
    if found is None:
        return TuVerdict(is_tu=True, method="exhaustive")
    rows, cols, absdet = found
    det = submatrix_det(entries, rows, cols)
    if abs(det) != absdet:
        raise AssertionError(
            f"witness recomputation mismatch: |{det}| != {absdet} at {rows}x{cols}"
        )
    return TuVerdict(
        is_tu=False,
        method="exhaustive",
        witness_rows=tuple(rows),
        witness_cols=tuple(cols),
        determinant=det,
    )


def tu_ghouila_houri(mat) -> TuVerdict:
    """Certify or refute by the row-subset +-1 signing criterion.

    The criterion is transpose-invariant, so the subset side is the
    smaller dimension.  A failing subset is converted to a determinant
    witness by running the exhaustive search inside it; minimality of
    the subset guarantees the witness spans all of it.
    """
    entries = _entries_of(mat)
    nr = len(entries)
    nc = len(entries[0]) if nr else 0
    if min(nr, nc) > GH_LIMIT:
        raise TooLarge(
            f"min(rows, cols) = {min(nr, nc)} exceeds the signing bound {GH_LIMIT}"
        )
    bad = _entry_violation(entries)
    if bad is not None:
        i, j, v = bad
        return TuVerdict(
            is_tu=False,
            method="ghouila-houri",
            witness_rows=(i,),
            witness_cols=(j,),
            determinant=v,
            gh_subset=(i,),
            gh_axis="rows",
        )
    axis = "rows"
    work = entries
    if nc < nr:
        axis = "cols"
        work = tuple(tuple(entries[i][j] for i in range(nr)) for j in range(nc))
    subset = _kernel.gh_failing_subset(work)
    if subset is None:
        return TuVerdict(is_tu=True, method="ghouila-houri")
    sub = [work[i] for i in subset]
    found = _kernel.find_violation(sub)
    if found is None:
        raise AssertionError(f"unsignable subset {subset} yielded no determinant witness")
    wrows, wcols, absdet = found
    lifted = tuple(subset[p] for p in wrows)
    if axis == "rows":
        orig_rows, orig_cols = lifted, tuple(wcols)
    else:
        orig_rows, orig_cols = tuple(wcols), lifted
    det = submatrix_det(entries, orig_rows, orig_cols)
    if abs(det) != absdet:
        raise AssertionError(
            f"witness recomputation mismatch: |{det}| != {absdet} at {orig_rows}x{orig_cols}"
        )
    return TuVerdict(
        is_tu=False,
        method="ghouila-houri",
        witness_rows=orig_rows,
        witness_cols=orig_cols,
        determinant=det,
        gh_subset=tuple(subset),
        gh_axis=axis,
    )


def build_standard_form_matrix(model) -> tuple[AugmentedIncidence, tuple[Fraction, ...]]:
    """Inequality-form constraint matrix of a relaxed model, with its rhs.

    Stacks the model rows as written, then the negated equality rows,
    then an identity block for the variable upper bounds, describing
    the region {x : Ax <= b, x >= 0}.  The equality rows sit in the
    leading block, so for p1/p2 that block is exactly M, and for p3 it
    is M-hat (the cardinality row arrives last in the model).
    """
    d = model.directory
    ncols = d.ncols
    cells: list[list[int]] = []
    labels: list[str] = []
    rhs: list[Fraction] = []
    for row in model.rows:
        vec = [0] * ncols
        for c, v in row.coeffs.items():
            vec[c] = v
        cells.append(vec)
        labels.append(row.tag)
        rhs.append(Fraction(row.rhs))
    for row in model.rows:
        if row.sense == "==":
            vec = [0] * ncols
            for c, v in row.coeffs.items():
                vec[c] = -v
            cells.append(vec)
            labels.append(f"neg[{row.tag}]")
            rhs.append(Fraction(-row.rhs))
    for c in range(ncols):
        vec = [0] * ncols
        vec[c] = 1
        cells.append(vec)
        labels.append(f"box[{d.tag(c)}]")
        rhs.append(Fraction(1))
    col_labels = tuple(d.tag(c) for c in range(ncols))
    matrix = AugmentedIncidence(
        entries=tuple(tuple(row) for row in cells),
        row_labels=tuple(labels),
        col_labels=col_labels,
    )
    return matrix, tuple(rhs)
