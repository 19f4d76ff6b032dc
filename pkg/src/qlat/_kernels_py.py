"""Pure-Python reference implementations of the enumeration kernels.

These are the inner loops the package spends nearly all of its time in:
projective quadric enumeration over F_p and Z/p^k, finite matrix-group
closure, line-orbit breadth-first search, and exhaustive isometry counting.
``qlat.kernels`` re-exports either this module or the compiled
``qlat._speedups`` twin; both expose identical signatures and must produce
identical output.

Vectors are tuples of ints in [0, p); matrices are tuples of row tuples.
"""

from __future__ import annotations

from itertools import product

__all__ = [
    "isotropic_lines",
    "quadric_points_mod",
    "group_closure",
    "line_orbit",
    "brute_isometry_count",
]


def _q_value(half_gram, v, modulus):
    total = 0
    n = len(v)
    for i in range(n):
        vi = v[i]
        if vi:
            row = half_gram[i]
            acc = 0
            for j in range(i, n):
                acc += row[j] * v[j]
            total += vi * acc
    return total % modulus


def proj_key(v):
    """Canonical sort key for a normalized projective representative."""
    lead = next(i for i, x in enumerate(v) if x)
    return (lead, v)


def isotropic_lines(p, n, half_gram, limit):
    """Normalized generators of isotropic lines of Q over F_p, sorted.

    Representatives have leading nonzero coordinate 1.  They are returned
    sorted by (leading position, remaining coordinates), so the first entry
    is the canonical smallest isotropic vector.  Raises ValueError if the
    projective space has more than ``limit`` points.
    """
    count = (p**n - 1) // (p - 1)
    if count > limit:
        raise ValueError(f"projective space has {count} points, exceeds limit {limit}")
    out = []
    for lead in range(n):
        tail_len = n - lead - 1
        for tail in product(range(p), repeat=tail_len):
            v = (0,) * lead + (1,) + tail
            if _q_value(half_gram, v, p) == 0:
                out.append(v)
    out.sort(key=proj_key)
    return out


def quadric_points_mod(p, k, n, half_gram, limit):
    """Normalized unimodular solutions of Q(v) ≡ 0 mod p^k, sorted.

    A unimodular vector over Z/p^k (some coordinate a unit) has a unique
    representative with leading unit coordinate equal to 1 and all earlier
    coordinates divisible by p.  Counting representatives: there are
    p^{(k-1)·lead} · (p^k)^{n-lead-1} with leading unit at position
    ``lead``.  Raises ValueError if the total candidate count exceeds
    ``limit``.
    """
    q = p**k
    total = 0
    for lead in range(n):
        total += (p ** (k - 1)) ** lead * q ** (n - lead - 1)
    if total > limit:
        raise ValueError(f"{total} normalized vectors mod {q}, exceeds limit {limit}")
    out = []
    head_choices = tuple(range(0, q, p))
    for lead in range(n):
        tail_len = n - lead - 1
        for head in product(head_choices, repeat=lead):
            for tail in product(range(q), repeat=tail_len):
                v = head + (1,) + tail
                if _q_value(half_gram, v, q) == 0:
                    out.append(v)
    out.sort(key=proj_key)
    return out


def _mat_mul(A, B, p):
    n = len(A)
    m = len(B[0])
    k = len(B)
    Bt = tuple(zip(*B))
    return tuple(
        tuple(sum(A[i][t] * Bt[j][t] for t in range(k)) % p for j in range(m))
        for i in range(n)
    )


def group_closure(gens, p, limit):
    """All products of the generator matrices over F_p (the generated group).

    The generators must be invertible mod p; since the group is finite the
    closure under right-multiplication by generators is the full subgroup.
    Returns the elements as a list (identity first, then BFS order).
    Raises ValueError if the closure exceeds ``limit`` elements.
    """
    if not gens:
        raise ValueError("no generators")
    n = len(gens[0])
    ident = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    seen = {ident}
    order = [ident]
    frontier = [ident]
    while frontier:
        new_frontier = []
        for g in frontier:
            for s in gens:
                h = _mat_mul(g, s, p)
                if h not in seen:
                    seen.add(h)
                    order.append(h)
                    new_frontier.append(h)
                    if len(seen) > limit:
                        raise ValueError(f"group closure exceeds limit {limit}")
        frontier = new_frontier
    return order


def _normalize_line(v, p):
    lead = next((i for i, x in enumerate(v) if x % p), None)
    if lead is None:
        raise ValueError("zero vector spans no line")
    inv = pow(v[lead], p - 2, p) if p > 2 else 1
    return tuple((x * inv) % p for x in v)


def line_orbit(gens, seed, p, limit):
    """Orbit of the line spanned by ``seed`` under the generated group.

    Returns normalized representatives sorted by the canonical projective
    key.  Raises ValueError if the orbit exceeds ``limit``.
    """
    start = _normalize_line(seed, p)
    seen = {start}
    frontier = [start]
    while frontier:
        new_frontier = []
        for v in frontier:
            for g in gens:
                w = tuple(sum(row[j] * v[j] for j in range(len(v))) % p for row in g)
                w = _normalize_line(w, p)
                if w not in seen:
                    seen.add(w)
                    new_frontier.append(w)
                    if len(seen) > limit:
                        raise ValueError(f"line orbit exceeds limit {limit}")
        frontier = new_frontier
    return sorted(seen, key=proj_key)


def _rank_mod(rows, p):
    m = [list(r) for r in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    rank = 0
    for col in range(n_cols):
        piv = next((i for i in range(rank, n_rows) if m[i][col] % p), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], p - 2, p) if p > 2 else 1
        m[rank] = [(x * inv) % p for x in m[rank]]
        for i in range(n_rows):
            if i != rank and m[i][col] % p:
                f = m[i][col]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[rank])]
        rank += 1
        if rank == n_rows:
            break
    return rank


def brute_isometry_count(p, n, half_gram, special_only, limit):
    """Exhaustively count isometries of a nondegenerate form over F_p.

    Counts invertible g with Q(g·e_j) = Q(e_j) and B(g·e_i, g·e_j) =
    B(e_i, e_j); for a nondegenerate bilinear form any Q-compatible
    endomorphism is automatically invertible.  ``special_only`` restricts
    to det = 1 (p odd) or rank(g - 1) even (p = 2).  The search space is
    p^(n²) matrices; raises ValueError if that exceeds ``limit``.  The
    enumeration itself backtracks column by column, which prunes most of
    the space but visits every solution.
    """
    if p ** (n * n) > limit:
        raise ValueError(f"search space p^(n^2) = {p**(n*n)} exceeds limit {limit}")
    B = [[(half_gram[i][j] + half_gram[j][i]) % p for j in range(n)] for i in range(n)]
    q_diag = [half_gram[j][j] % p for j in range(n)]
    vectors = list(product(range(p), repeat=n))
    by_q = {}
    for v in vectors:
        by_q.setdefault(_q_value(half_gram, v, p), []).append(v)

    def b_val(x, y):
        return sum(x[i] * sum(B[i][j] * y[j] for j in range(n)) for i in range(n)) % p

    count = 0
    cols: list[tuple[int, ...]] = []

    def extend(j):
        nonlocal count
        if j == n:
            g_rows = tuple(tuple(cols[c][r] for c in range(n)) for r in range(n))
            if special_only:
                if p == 2:
                    delta = tuple(
                        tuple((g_rows[i][j2] - (1 if i == j2 else 0)) % p for j2 in range(n))
                        for i in range(n)
                    )
                    if _rank_mod(delta, p) % 2 != 0:
                        return
                else:
                    if _det_mod(g_rows, p) != 1:
                        return
            count += 1
            return
        for v in by_q.get(q_diag[j], ()):
            ok = True
            for i in range(j):
                if b_val(cols[i], v) != B[i][j]:
                    ok = False
                    break
            if ok:
                cols.append(v)
                extend(j + 1)
                cols.pop()

    extend(0)
    return count


def _det_mod(rows, p):
    m = [list(r) for r in rows]
    n = len(m)
    det = 1
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] % p), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = (det * m[col][col]) % p
        inv = pow(m[col][col], p - 2, p) if p > 2 else 1
        for i in range(col + 1, n):
            if m[i][col] % p:
                f = (m[i][col] * inv) % p
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[col])]
    return det % p
