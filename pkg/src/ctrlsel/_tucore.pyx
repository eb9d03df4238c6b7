# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels for total unimodularity checking.

Twin of _tupure: identical entry points, identical search order,
bit-identical answers.  All the algorithm notes live over there.
Entries must already be validated to {-1, 0, 1}; every intermediate
value is a minor bounded by the submatrix size, far inside int64.
"""

from libc.stdlib cimport free, malloc

ctypedef long long i64

cdef int MAXDIM = 160


cdef struct VioState:
    i64 *mat          # oriented working matrix, row-major nr x nc
    int nr
    int nc
    int k
    # column DFS
    int *ccols        # chosen column indices
    i64 *cech         # echelon of column vectors, k rows of length nr
    i64 *cpiv
    int *cpivcol
    i64 *ctmp         # scratch vector, length nr
    # row DFS over the chosen columns
    int *rrows
    i64 *rech         # echelon rows, k rows of length k
    i64 *rpiv
    int *rpivcol
    i64 *rtmp         # scratch vector, length k
    i64 *sub          # rows restricted to chosen columns, nr x k
    i64 det


cdef int _reduce(i64 *vec, int length, i64 *ech, i64 *pivots, int *pivcols,
                 int depth):
    """Fraction-free reduction in place; returns the pivot column or -1.

    Divisions are exact (Sylvester), so C truncation equals floor here.
    """
    cdef i64 prev = 1
    cdef i64 piv, f
    cdef int t, j
    for t in range(depth):
        piv = pivots[t]
        f = vec[pivcols[t]]
        for j in range(length):
            vec[j] = (piv * vec[j] - f * ech[t * length + j]) / prev
        prev = piv
    for j in range(length):
        if vec[j] != 0:
            return j
    return -1


cdef bint _extend_rows(VioState *s, int start, int depth):
    cdef int i, j, pc
    cdef int k = s.k
    cdef i64 *vec = s.rtmp
    if depth == k:
        s.det = s.rpiv[k - 1]
        if s.det < 0:
            s.det = -s.det
        return s.det >= 2
    for i in range(start, s.nr - (k - depth) + 1):
        for j in range(k):
            vec[j] = s.sub[i * k + j]
        pc = _reduce(vec, k, s.rech, s.rpiv, s.rpivcol, depth)
        if pc < 0:
            continue
        s.rrows[depth] = i
        for j in range(k):
            s.rech[depth * k + j] = vec[j]
        s.rpiv[depth] = vec[pc]
        s.rpivcol[depth] = pc
        if _extend_rows(s, i + 1, depth + 1):
            return True
    return False


cdef bint _scan_rows(VioState *s):
    cdef int i, j
    cdef int k = s.k
    for i in range(s.nr):
        for j in range(k):
            s.sub[i * k + j] = s.mat[i * s.nc + s.ccols[j]]
    return _extend_rows(s, 0, 0)


cdef bint _extend_cols(VioState *s, int start, int depth):
    cdef int i, j, pc
    cdef int k = s.k
    cdef i64 *vec = s.ctmp
    if depth == k:
        return _scan_rows(s)
    for j in range(start, s.nc - (k - depth) + 1):
        for i in range(s.nr):
            vec[i] = s.mat[i * s.nc + j]
        pc = _reduce(vec, s.nr, s.cech, s.cpiv, s.cpivcol, depth)
        if pc < 0:
            # dependent columns give zero determinants here and in
            # every superset, so skip the column outright
            continue
        s.ccols[depth] = j
        for i in range(s.nr):
            s.cech[depth * s.nr + i] = vec[i]
        s.cpiv[depth] = vec[pc]
        s.cpivcol[depth] = pc
        if _extend_cols(s, j + 1, depth + 1):
            return True
    return False


def find_violation(mat):
    """Smallest square submatrix with determinant outside {-1, 0, 1}.

    Returns (row_indices, col_indices, |det|) or None; see _tupure.
    """
    rows = [list(r) for r in mat]
    cdef int nr0 = len(rows)
    cdef int nc0 = len(rows[0]) if nr0 else 0
    cdef bint transposed = False
    cdef int nr, nc, i, j, k
    cdef VioState s
    if nr0 == 0 or nc0 == 0:
        return None
    if nc0 > nr0:
        rows = [[rows[i][j] for i in range(nr0)] for j in range(nc0)]
        transposed = True
    nr = len(rows)
    nc = len(rows[0])
    if nr > MAXDIM or nc > MAXDIM:
        raise ValueError("matrix side exceeds compiled cap %d" % MAXDIM)

    s.nr = nr
    s.nc = nc
    s.mat = <i64 *> malloc(nr * nc * sizeof(i64))
    s.ccols = <int *> malloc(nc * sizeof(int))
    s.cech = <i64 *> malloc(nc * nr * sizeof(i64))
    s.cpiv = <i64 *> malloc(nc * sizeof(i64))
    s.cpivcol = <int *> malloc(nc * sizeof(int))
    s.ctmp = <i64 *> malloc(nr * sizeof(i64))
    s.rrows = <int *> malloc(nc * sizeof(int))
    s.rech = <i64 *> malloc(nc * nc * sizeof(i64))
    s.rpiv = <i64 *> malloc(nc * sizeof(i64))
    s.rpivcol = <int *> malloc(nc * sizeof(int))
    s.rtmp = <i64 *> malloc(nc * sizeof(i64))
    s.sub = <i64 *> malloc(nr * nc * sizeof(i64))
    try:
        if not (s.mat and s.ccols and s.cech and s.cpiv and s.cpivcol
                and s.ctmp and s.rrows and s.rech and s.rpiv and s.rpivcol
                and s.rtmp and s.sub):
            raise MemoryError
        for i in range(nr):
            for j in range(nc):
                s.mat[i * nc + j] = rows[i][j]
        for k in range(2, nc + 1):
            s.k = k
            if _extend_cols(&s, 0, 0):
                out_rows = []
                out_cols = []
                for i in range(k):
                    out_rows.append(s.rrows[i])
                    out_cols.append(s.ccols[i])
                if transposed:
                    out_rows, out_cols = out_cols, out_rows
                return tuple(out_rows), tuple(out_cols), int(s.det)
        return None
    finally:
        free(s.mat)
        free(s.ccols)
        free(s.cech)
        free(s.cpiv)
        free(s.cpivcol)
        free(s.ctmp)
        free(s.rrows)
        free(s.rech)
        free(s.rpiv)
        free(s.rpivcol)
        free(s.rtmp)
        free(s.sub)


cdef bint _assign(i64 *rows, int nrows, int nc, int idx, i64 *sums,
                  i64 *remaining):
    cdef int j, t, nsigns
    cdef i64 v, snew, sign
    cdef bint ok, feasible
    if idx == nrows:
        return True
    for j in range(nc):
        v = rows[idx * nc + j]
        remaining[j] -= v if v >= 0 else -v
    # global sign flip symmetry: the first row only tries +1
    nsigns = 1 if idx == 0 else 2
    ok = False
    for t in range(nsigns):
        sign = 1 if t == 0 else -1
        for j in range(nc):
            sums[j] += sign * rows[idx * nc + j]
        feasible = True
        for j in range(nc):
            snew = sums[j] if sums[j] >= 0 else -sums[j]
            if snew - remaining[j] > 1:
                feasible = False
                break
        if feasible and _assign(rows, nrows, nc, idx + 1, sums, remaining):
            ok = True
        for j in range(nc):
            sums[j] -= sign * rows[idx * nc + j]
        if ok:
            break
    for j in range(nc):
        v = rows[idx * nc + j]
        remaining[j] += v if v >= 0 else -v
    return ok


def gh_failing_subset(mat):
    """Smallest row subset with no valid +-1 signing, or None; see _tupure."""
    rows = [list(r) for r in mat]
    cdef int nr = len(rows)
    cdef int nc = len(rows[0]) if nr else 0
    cdef int size, i, j, t, pos
    cdef i64 v
    cdef bint more
    if nr > MAXDIM or nc > MAXDIM:
        raise ValueError("matrix side exceeds compiled cap %d" % MAXDIM)
    cdef i64 *flat = <i64 *> malloc((nr * nc + 1) * sizeof(i64))
    cdef i64 *chosen = <i64 *> malloc((nr * nc + 1) * sizeof(i64))
    cdef i64 *sums = <i64 *> malloc((nc + 1) * sizeof(i64))
    cdef i64 *remaining = <i64 *> malloc((nc + 1) * sizeof(i64))
    cdef int *idxs = <int *> malloc((nr + 1) * sizeof(int))
    try:
        if not (flat and chosen and sums and remaining and idxs):
            raise MemoryError
        for i in range(nr):
            for j in range(nc):
                flat[i * nc + j] = rows[i][j]
        for size in range(2, nr + 1):
            # lexicographic combination enumeration, as itertools does
            for i in range(size):
                idxs[i] = i
            while True:
                for t in range(size):
                    for j in range(nc):
                        chosen[t * nc + j] = flat[idxs[t] * nc + j]
                for j in range(nc):
                    sums[j] = 0
                    remaining[j] = 0
                for t in range(size):
                    for j in range(nc):
                        v = chosen[t * nc + j]
                        remaining[j] += v if v >= 0 else -v
                if not _assign(chosen, size, nc, 0, sums, remaining):
                    out = []
                    for t in range(size):
                        out.append(idxs[t])
                    return tuple(out)
                more = False
                pos = size - 1
                while pos >= 0:
                    if idxs[pos] != pos + nr - size:
                        idxs[pos] += 1
                        for t in range(pos + 1, size):
                            idxs[t] = idxs[t - 1] + 1
                        more = True
                        break
                    pos -= 1
                if not more:
                    break
        return None
    finally:
        free(flat)
        free(chosen)
        free(sums)
        free(remaining)
        free(idxs)
