# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the pure-Python enumeration kernels.

Same five functions, same signatures, same outputs as
``qlat._kernels_py`` — only the inner loops run in C.  ``qlat.kernels``
picks this module up when it is importable; the test suite checks both
backends against each other on identical inputs.
"""

from libc.stdlib cimport free, malloc

from ._kernels_py import proj_key

__all__ = [
    "isotropic_lines",
    "quadric_points_mod",
    "group_closure",
    "line_orbit",
    "brute_isometry_count",
]


cdef inline long long _q_eval(long long* hg, long long* v, int n, long long modulus) nogil:
    cdef long long total = 0, acc
    cdef int i, j
    for i in range(n):
        if v[i]:
            acc = 0
            for j in range(i, n):
                acc += hg[i * n + j] * v[j]
            total += v[i] * acc
    return total % modulus


cdef long long* _load_matrix(object rows, int n, long long modulus) except NULL:
    cdef long long* out = <long long*> malloc(n * n * sizeof(long long))
    if out == NULL:
        raise MemoryError()
    cdef int i, j
    for i in range(n):
        row = rows[i]
        for j in range(n):
            out[i * n + j] = row[j] % modulus
    return out


def isotropic_lines(p, n, half_gram, limit):
    """Normalized generators of isotropic lines of Q over F_p, sorted.

    Identical contract to the pure-Python twin: representatives have
    leading nonzero coordinate 1 and are sorted by (leading position,
    coordinates).  Raises ValueError past ``limit`` projective points.
    """
    count = (p**n - 1) // (p - 1)
    if count > limit:
        raise ValueError(f"projective space has {count} points, exceeds limit {limit}")
    cdef int cn = n, lead, pos, i
    cdef long long cp = p
    cdef long long* hg = _load_matrix(half_gram, cn, cp)
    cdef long long* v = <long long*> malloc(cn * sizeof(long long))
    if v == NULL:
        free(hg)
        raise MemoryError()
    out = []
    try:
        for lead in range(cn):
            for i in range(cn):
                v[i] = 0
            v[lead] = 1
            while True:
                if _q_eval(hg, v, cn, cp) == 0:
                    out.append(tuple([v[i] for i in range(cn)]))
                pos = cn - 1
                while pos > lead and v[pos] == cp - 1:
                    v[pos] = 0
                    pos -= 1
                if pos <= lead:
                    break
                v[pos] += 1
    finally:
        free(v)
        free(hg)
    out.sort(key=proj_key)
    return out


def quadric_points_mod(p, k, n, half_gram, limit):
    """Normalized unimodular solutions of Q(v) ≡ 0 mod p^k, sorted.

    Identical contract to the pure-Python twin; see there for the
    normalization and the candidate count per leading position.
    """
    q = p**k
    total = 0
    for lead_py in range(n):
        total += (p ** (k - 1)) ** lead_py * q ** (n - lead_py - 1)
    if total > limit:
        raise ValueError(f"{total} normalized vectors mod {q}, exceeds limit {limit}")
    cdef int cn = n, lead, pos, i
    cdef long long cp = p, cq = q, step
    cdef long long* hg = _load_matrix(half_gram, cn, cq)
    cdef long long* v = <long long*> malloc(cn * sizeof(long long))
    if v == NULL:
        free(hg)
        raise MemoryError()
    out = []
    try:
        for lead in range(cn):
            for i in range(cn):
                v[i] = 0
            v[lead] = 1
            while True:
                if _q_eval(hg, v, cn, cq) == 0:
                    out.append(tuple([v[i] for i in range(cn)]))
                pos = cn - 1
                while True:
                    if pos == lead:
                        pos -= 1
                        continue
                    if pos < 0:
                        break
                    step = cp if pos < lead else 1
                    if v[pos] + step >= cq:
                        v[pos] = 0
                        pos -= 1
                    else:
                        v[pos] += step
                        break
                if pos < 0:
                    break
    finally:
        free(v)
        free(hg)
    out.sort(key=proj_key)
    return out


cdef long long* _load_gens(object gens, int k, int n, long long p) except NULL:
    cdef long long* G = <long long*> malloc(k * n * n * sizeof(long long))
    if G == NULL:
        raise MemoryError()
    cdef int s, i, j
    for s in range(k):
        g = gens[s]
        for i in range(n):
            row = g[i]
            for j in range(n):
                G[(s * n + i) * n + j] = row[j] % p
    return G


def group_closure(gens, p, limit):
    """All products of the generator matrices over F_p (the generated group).

    Identical contract and BFS element order to the pure-Python twin.
    """
    if not gens:
        raise ValueError("no generators")
    cdef int cn = len(gens[0]), k = len(gens), i, j, t, s
    cdef long long cp = p, acc
    cdef long long* G = _load_gens(gens, k, cn, cp)
    cdef long long* a = <long long*> malloc(cn * cn * sizeof(long long))
    cdef long long* h = <long long*> malloc(cn * cn * sizeof(long long))
    if a == NULL or h == NULL:
        free(G)
        if a != NULL:
            free(a)
        if h != NULL:
            free(h)
        raise MemoryError()
    ident = tuple(tuple(1 if i == j else 0 for j in range(cn)) for i in range(cn))
    seen = {ident}
    order = [ident]
    frontier = [ident]
    try:
        while frontier:
            new_frontier = []
            for g in frontier:
                for i in range(cn):
                    row = g[i]
                    for j in range(cn):
                        a[i * cn + j] = row[j]
                for s in range(k):
                    for i in range(cn):
                        for j in range(cn):
                            acc = 0
                            for t in range(cn):
                                acc += a[i * cn + t] * G[(s * cn + t) * cn + j]
                            h[i * cn + j] = acc % cp
                    ht = tuple(
                        tuple([h[i * cn + j] for j in range(cn)]) for i in range(cn)
                    )
                    if ht not in seen:
                        seen.add(ht)
                        order.append(ht)
                        new_frontier.append(ht)
                        if len(seen) > limit:
                            raise ValueError(f"group closure exceeds limit {limit}")
            frontier = new_frontier
    finally:
        free(h)
        free(a)
        free(G)
    return order


cdef inline long long _pos_mod(long long a, long long p):
    cdef long long r = a % p
    return r + p if r < 0 else r


cdef long long _inv_mod_c(long long a, long long p):
    cdef long long old_r = _pos_mod(a, p), r = p
    cdef long long old_s = 1, s = 0
    cdef long long q, tmp
    while r != 0:
        q = old_r / r
        tmp = old_r - q * r
        old_r = r
        r = tmp
        tmp = old_s - q * s
        old_s = s
        s = tmp
    return _pos_mod(old_s, p)


def line_orbit(gens, seed, p, limit):
    """Orbit of the line spanned by ``seed`` under the generated group.

    Identical contract to the pure-Python twin: sorted normalized
    representatives; ValueError past ``limit``.
    """
    cdef int cn = len(seed), k = len(gens), i, j, s, lead
    cdef long long cp = p, acc, inv
    cdef long long* G = _load_gens(gens, k, cn, cp) if k else NULL
    cdef long long* v = <long long*> malloc(cn * sizeof(long long))
    cdef long long* w = <long long*> malloc(cn * sizeof(long long))
    if v == NULL or w == NULL:
        if G != NULL:
            free(G)
        if v != NULL:
            free(v)
        if w != NULL:
            free(w)
        raise MemoryError()

    def normalize_py(vec):
        lead_i = next((idx for idx, x in enumerate(vec) if x % p), None)
        if lead_i is None:
            raise ValueError("zero vector spans no line")
        inv_py = pow(vec[lead_i], p - 2, p) if p > 2 else 1
        return tuple((x * inv_py) % p for x in vec)

    start = normalize_py(seed)
    seen = {start}
    frontier = [start]
    try:
        while frontier:
            new_frontier = []
            for vec in frontier:
                for i in range(cn):
                    v[i] = vec[i]
                for s in range(k):
                    lead = -1
                    for i in range(cn):
                        acc = 0
                        for j in range(cn):
                            acc += G[(s * cn + i) * cn + j] * v[j]
                        w[i] = acc % cp
                        if lead < 0 and w[i] != 0:
                            lead = i
                    if lead < 0:
                        raise ValueError("zero vector spans no line")
                    inv = _inv_mod_c(w[lead], cp)
                    for i in range(cn):
                        w[i] = (w[i] * inv) % cp
                    wt = tuple([w[i] for i in range(cn)])
                    if wt not in seen:
                        seen.add(wt)
                        new_frontier.append(wt)
                        if len(seen) > limit:
                            raise ValueError(f"line orbit exceeds limit {limit}")
            frontier = new_frontier
    finally:
        free(w)
        free(v)
        if G != NULL:
            free(G)
    return sorted(seen, key=proj_key)


cdef long long _det_mod_c(long long* m, int n, long long p):
    cdef long long det = 1, inv, f
    cdef int col, piv, i, j
    for col in range(n):
        piv = -1
        for i in range(col, n):
            if m[i * n + col] % p:
                piv = i
                break
        if piv < 0:
            return 0
        if piv != col:
            for j in range(n):
                f = m[col * n + j]
                m[col * n + j] = m[piv * n + j]
                m[piv * n + j] = f
            det = -det
        det = _pos_mod(det * m[col * n + col], p)
        inv = _inv_mod_c(m[col * n + col], p)
        for i in range(col + 1, n):
            if m[i * n + col] % p:
                f = _pos_mod(m[i * n + col] * inv, p)
                for j in range(n):
                    m[i * n + j] = _pos_mod(m[i * n + j] - f * m[col * n + j], p)
    return _pos_mod(det, p)


cdef int _rank_mod_c(long long* m, int n, long long p):
    cdef int rank = 0, col, piv, i, j
    cdef long long inv, f
    for col in range(n):
        piv = -1
        for i in range(rank, n):
            if m[i * n + col] % p:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for j in range(n):
                f = m[rank * n + j]
                m[rank * n + j] = m[piv * n + j]
                m[piv * n + j] = f
        inv = _inv_mod_c(m[rank * n + col], p)
        for j in range(n):
            m[rank * n + j] = _pos_mod(m[rank * n + j] * inv, p)
        for i in range(n):
            if i != rank and m[i * n + col] % p:
                f = m[i * n + col]
                for j in range(n):
                    m[i * n + j] = _pos_mod(m[i * n + j] - f * m[rank * n + j], p)
        rank += 1
        if rank == n:
            break
    return rank


cdef class _BruteSearch:
    """Backtracking state for the exhaustive isometry count."""

    cdef int n, special_only, count_vecs
    cdef long long p
    cdef long long* B        # full Gram, n*n
    cdef long long* qdiag    # Q(e_j), n entries
    cdef long long* vecs     # every vector of F_p^n, count*n
    cdef long long* bvecs    # B @ v per vector, count*n
    cdef int* bucket_start   # per Q value in [0, p)
    cdef int* bucket_len
    cdef int* order          # vector indices grouped by Q value
    cdef int* cols           # chosen column vector indices
    cdef long long* scratch  # n*n leaf workspace

    def __cinit__(self):
        self.B = NULL
        self.qdiag = NULL
        self.vecs = NULL
        self.bvecs = NULL
        self.bucket_start = NULL
        self.bucket_len = NULL
        self.order = NULL
        self.cols = NULL
        self.scratch = NULL

    def __dealloc__(self):
        free(self.B)
        free(self.qdiag)
        free(self.vecs)
        free(self.bvecs)
        free(self.bucket_start)
        free(self.bucket_len)
        free(self.order)
        free(self.cols)
        free(self.scratch)

    cdef long long extend(self, int j):
        cdef int n = self.n, i, t, idx, vi, start, length
        cdef long long p = self.p, count = 0, acc
        cdef long long* g = self.scratch
        cdef bint ok
        if j == n:
            for i in range(n):
                for t in range(n):
                    g[i * n + t] = self.vecs[self.cols[t] * n + i]
            if self.special_only:
                if p == 2:
                    for i in range(n):
                        g[i * n + i] = (g[i * n + i] + 1) % 2
                    if _rank_mod_c(g, n, 2) % 2 != 0:
                        return 0
                else:
                    if _det_mod_c(g, n, p) != 1:
                        return 0
            return 1
        start = self.bucket_start[self.qdiag[j]]
        length = self.bucket_len[self.qdiag[j]]
        for idx in range(start, start + length):
            vi = self.order[idx]
            ok = True
            for i in range(j):
                acc = 0
                for t in range(n):
                    acc += self.vecs[self.cols[i] * n + t] * self.bvecs[vi * n + t]
                if acc % p != self.B[i * n + j]:
                    ok = False
                    break
            if ok:
                self.cols[j] = vi
                count += self.extend(j + 1)
        return count


def brute_isometry_count(p, n, half_gram, special_only, limit):
    """Exhaustively count isometries of a nondegenerate form over F_p.

    Identical contract to the pure-Python twin, including the
    p^(n^2) > limit guard and the special-isometry conventions
    (det = 1 for odd p, even rank(g - 1) for p = 2).
    """
    if p ** (n * n) > limit:
        raise ValueError(f"search space p^(n^2) = {p ** (n * n)} exceeds limit {limit}")
    cdef _BruteSearch st = _BruteSearch()
    cdef int cn = n, count_vecs = p**n, i, j, t
    cdef long long cp = p, acc
    st.n = cn
    st.p = cp
    st.special_only = 1 if special_only else 0
    st.count_vecs = count_vecs
    st.B = <long long*> malloc(cn * cn * sizeof(long long))
    st.qdiag = <long long*> malloc(cn * sizeof(long long))
    st.vecs = <long long*> malloc(count_vecs * cn * sizeof(long long))
    st.bvecs = <long long*> malloc(count_vecs * cn * sizeof(long long))
    st.bucket_start = <int*> malloc(cp * sizeof(int))
    st.bucket_len = <int*> malloc(cp * sizeof(int))
    st.order = <int*> malloc(count_vecs * sizeof(int))
    st.cols = <int*> malloc(cn * sizeof(int))
    st.scratch = <long long*> malloc(cn * cn * sizeof(long long))
    if (st.B == NULL or st.qdiag == NULL or st.vecs == NULL or st.bvecs == NULL
            or st.bucket_start == NULL or st.bucket_len == NULL
            or st.order == NULL or st.cols == NULL or st.scratch == NULL):
        raise MemoryError()
    cdef long long* hg = _load_matrix(half_gram, cn, cp)
    try:
        for i in range(cn):
            for j in range(cn):
                st.B[i * cn + j] = (hg[i * cn + j] + hg[j * cn + i]) % cp
            st.qdiag[i] = hg[i * cn + i] % cp
        # every vector of F_p^n in odometer order, with Q value per vector
        qvals = <long long*> malloc(count_vecs * sizeof(long long))
        if qvals == NULL:
            raise MemoryError()
        try:
            for i in range(cn):
                st.vecs[i] = 0
            t = 0
            while True:
                if t:
                    for i in range(cn):
                        st.vecs[t * cn + i] = st.vecs[(t - 1) * cn + i]
                    i = cn - 1
                    while st.vecs[t * cn + i] == cp - 1:
                        st.vecs[t * cn + i] = 0
                        i -= 1
                    st.vecs[t * cn + i] += 1
                qvals[t] = _q_eval(hg, st.vecs + t * cn, cn, cp)
                for i in range(cn):
                    acc = 0
                    for j in range(cn):
                        acc += st.B[i * cn + j] * st.vecs[t * cn + j]
                    st.bvecs[t * cn + i] = acc % cp
                t += 1
                if t == count_vecs:
                    break
            for i in range(cp):
                st.bucket_len[i] = 0
            for t in range(count_vecs):
                st.bucket_len[qvals[t]] += 1
            acc = 0
            for i in range(cp):
                st.bucket_start[i] = acc
                acc += st.bucket_len[i]
                st.bucket_len[i] = 0
            for t in range(count_vecs):
                st.order[st.bucket_start[qvals[t]] + st.bucket_len[qvals[t]]] = t
                st.bucket_len[qvals[t]] += 1
        finally:
            free(qvals)
    finally:
        free(hg)
    return st.extend(0)
