"""Pure-Python search kernels for total unimodularity checking.

The compiled twin in _tucore exposes the same two entry points with
the same search order, so both give bit-identical answers; this module
is the fallback when the extension is not built.  Matrices arrive as
sequences of equal-length rows with entries in {-1, 0, 1}; callers
validate entries beforehand.

Arithmetic stays in small integers throughout: sizes are searched in
ascending order, so by the time size k runs, every smaller minor is
known to lie in {-1, 0, 1}, and the fraction-free elimination below
only ever divides by previous pivots of absolute value 1.
"""

from itertools import combinations


def _bareiss_reduce(row, ech, pivots, pivcols):
    """Reduce a row against the echelon, fraction-free.

    ech[t] was reduced against ech[:t]; the update keeps every entry an
    integer minor of the original matrix (Sylvester's identity), so the
    divisions are exact.
    """
    prev = 1
    for t, base in enumerate(ech):
        piv = pivots[t]
        c = pivcols[t]
        f = row[c]
        row = [(piv * a - f * b) // prev for a, b in zip(row, base)]
        prev = piv
    return row


def _search_size(mat, nr, nc, k):
    """First size-k violation in lexicographic (cols, rows) order, or None."""
    col_vectors = [tuple(mat[i][j] for i in range(nr)) for j in range(nc)]

    hit = []

    def extend_cols(start, chosen, ech, pivots, pivcols):
        if len(chosen) == k:
            if _scan_rows(chosen):
                return True
            return False
        for j in range(start, nc - (k - len(chosen)) + 1):
            vec = _bareiss_reduce(list(col_vectors[j]), ech, pivots, pivcols)
            pc = next((t for t, v in enumerate(vec) if v), None)
            if pc is None:
                # dependent columns give zero determinants here and in
                # every superset, so skip the column outright
                continue
            chosen.append(j)
            ech.append(vec)
            pivots.append(vec[pc])
            pivcols.append(pc)
            if extend_cols(j + 1, chosen, ech, pivots, pivcols):
                return True
            chosen.pop()
            ech.pop()
            pivots.pop()
            pivcols.pop()
        return False

    def _scan_rows(cols):
        rows_of = [tuple(mat[i][j] for j in cols) for i in range(nr)]

        def extend_rows(start, chosen, ech, pivots, pivcols):
            depth = len(chosen)
            if depth == k:
                det = abs(pivots[-1])
                if det >= 2:
                    hit.append((tuple(chosen), tuple(cols), det))
                    return True
                return False
            for i in range(start, nr - (k - depth) + 1):
                vec = _bareiss_reduce(list(rows_of[i]), ech, pivots, pivcols)
                pc = next((t for t, v in enumerate(vec) if v), None)
                if pc is None:
                    continue
                chosen.append(i)
                ech.append(vec)
                pivots.append(vec[pc])
                pivcols.append(pc)
                if extend_rows(i + 1, chosen, ech, pivots, pivcols):
                    return True
                chosen.pop()
                ech.pop()
                pivots.pop()
                pivcols.pop()
            return False

        return extend_rows(0, [], [], [], [])

    if extend_cols(0, [], [], [], []):
        return hit[0]
    return None


def find_violation(mat):
    """Smallest square submatrix with determinant outside {-1, 0, 1}.

    Returns (row_indices, col_indices, |det|) or None when the matrix
    is totally unimodular.  The ascending-size sweep makes any hit a
    minimal violation, which pins |det| to exactly 2.
    """
    nr = len(mat)
    nc = len(mat[0]) if nr else 0
    if nr == 0 or nc == 0:
        return None
    transposed = False
    work = [list(r) for r in mat]
    if nc > nr:
        work = [[mat[i][j] for i in range(nr)] for j in range(nc)]
        nr, nc = nc, nr
        transposed = True
    for k in range(2, nc + 1):
        found = _search_size(work, nr, nc, k)
        if found is not None:
            rows, cols, det = found
            if transposed:
                rows, cols = cols, rows
            return rows, cols, det
    return None


def _signable(rows, nc):
    """Is there a +-1 signing of the rows with column sums in {-1,0,1}?"""
    remaining = [0] * nc
    for row in rows:
        for j, v in enumerate(row):
            remaining[j] += abs(v)

    def assign(idx, sums):
        if idx == len(rows):
            return True
        row = rows[idx]
        for j, v in enumerate(row):
            remaining[j] -= abs(v)
        # global sign flip symmetry: the first row only tries +1
        signs = (1,) if idx == 0 else (1, -1)
        ok = False
        for sign in signs:
            nxt = [s + sign * v for s, v in zip(sums, row)]
            if all(abs(s) - r <= 1 for s, r in zip(nxt, remaining)):
                if assign(idx + 1, nxt):
                    ok = True
                    break
        for j, v in enumerate(row):
            remaining[j] += abs(v)
        return ok

    return assign(0, [0] * nc)


def gh_failing_subset(mat):
    """Smallest row subset with no valid +-1 signing, or None.

    Subsets are tried in ascending cardinality, lexicographically
    within each size.  Singletons cannot fail for {-1,0,1} entries, so
    the sweep starts at pairs.
    """
    nr = len(mat)
    nc = len(mat[0]) if nr else 0
    for s in range(2, nr + 1):
        for subset in combinations(range(nr), s):
            if not _signable([mat[i] for i in subset], nc):
                return subset
    return None
