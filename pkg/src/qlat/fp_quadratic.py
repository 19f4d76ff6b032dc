"""Quadratic spaces over prime fields F_p, including p = 2.

A space is presented by an upper-triangular half-Gram matrix mod p:
``Q(x) = x^T U x`` and ``B = U + U^T``, so the theory is uniform in the
characteristic — at p = 2 the quadratic form carries strictly more
information than the (alternating) bilinear form.

Provided here: radicals, Witt decomposition, isotropic-line enumeration,
reflections and Eichler transvections, the Dickson invariant, special
orthogonal group orders, Witt-style extension of subspace isometries to
special isometries of the whole space, constructive reflection
factorization with spinor norms (odd p), and orbits of isotropic lines
under the stabilizer of a subspace.

Canonical vector order
----------------------
Normalized projective representatives (leading nonzero coordinate 1) are
ordered by (position of the leading 1, then the coordinate tuple).  The
first nonzero vector in this order is (1, 0, ..., 0).  All "smallest" and
"sorted" guarantees in this module refer to that order.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from . import kernels
from .errors import InvariantViolationError, PreconditionError, SizeGuardError

__all__ = [
    "FpQuadSpace",
    "FpIsometry",
    "ProjLine",
    "radicals",
    "find_isotropic_vector",
    "witt_decomposition",
    "enumerate_isotropic_lines",
    "reflection",
    "eichler_transvection",
    "dickson_invariant",
    "witt_extension",
    "reflection_factorization",
    "spinor_norm",
    "stabilizer_orbit",
    "so_order",
    "line_sort_key",
]

Vector = tuple[int, ...]
Matrix = tuple[Vector, ...]

_MAX_PROJ_POINTS = 10**7
_MAX_GROUP_ELEMENTS = 10**6


# ---------------------------------------------------------------------------
# F_p linear algebra on tuple matrices (rows)
# ---------------------------------------------------------------------------


def _inv_mod(a: int, p: int) -> int:
    return pow(a % p, -1, p)


def _mat_vec(M: Matrix, v: Sequence[int], p: int) -> Vector:
    return tuple(sum(row[j] * v[j] for j in range(len(v))) % p for row in M)


def _mat_mul(A: Matrix, B: Matrix, p: int) -> Matrix:
    Bt = tuple(zip(*B))
    return tuple(
        tuple(sum(a * b for a, b in zip(row, col)) % p for col in Bt) for row in A
    )


def _identity_mat(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _rref(rows: Iterable[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    m = [[x % p for x in r] for r in rows]
    pivots: list[int] = []
    if not m:
        return m, pivots
    n_rows, n_cols = len(m), len(m[0])
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = _inv_mod(m[r][c], p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return m, pivots


def _rank_mod(rows: Iterable[Sequence[int]], p: int) -> int:
    return len(_rref(rows, p)[1])


def _kernel_basis(rows: Iterable[Sequence[int]], p: int, n_cols: int) -> list[Vector]:
    m, pivots = _rref(rows, p)
    pivot_set = set(pivots)
    free = [c for c in range(n_cols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [0] * n_cols
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = (-m[r][fc]) % p
        basis.append(tuple(v))
    return basis


def _solve_matrix(A: Matrix, B: Matrix, p: int) -> Matrix:
    """Solve A @ X = B for full-column-rank A; raises if inconsistent."""
    n_rows = len(A)
    r = len(A[0]) if A else 0
    k = len(B[0]) if B else 0
    aug = [list(A[i]) + list(B[i]) for i in range(n_rows)]
    m, pivots = _rref(aug, p)
    if any(pc >= r for pc in pivots):
        raise InvariantViolationError("inconsistent linear system")
    if len(pivots) != r:
        raise PreconditionError("coefficient matrix does not have full column rank")
    X = [[0] * k for _ in range(r)]
    for row_idx, pc in enumerate(pivots):
        for j in range(k):
            X[pc][j] = m[row_idx][r + j]
    return tuple(tuple(row) for row in X)


def _inv_mat(M: Matrix, p: int) -> Matrix:
    return _solve_matrix(M, _identity_mat(len(M)), p)


def _det_mod(rows: Matrix, p: int) -> int:
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
        inv = _inv_mod(m[col][col], p)
        for i in range(col + 1, n):
            if m[i][col] % p:
                f = (m[i][col] * inv) % p
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[col])]
    return det % p


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _sqrt_mod(a: int, p: int) -> int | None:
    """A square root of a mod p (odd p), or None if a is a nonsquare."""
    a %= p
    if a == 0:
        return 0
    if _legendre(a, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Tonelli–Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = next(z for z in range(2, p) if _legendre(z, p) == -1)
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = (t2 * t2) % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, (b * b) % p
        t, r = (t * c) % p, (r * b) % p
    return r


# ---------------------------------------------------------------------------
# core types
# ---------------------------------------------------------------------------


def _check_prime(p: int) -> None:
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise PreconditionError(f"{p} is not prime")


@dataclass(frozen=True)
class FpQuadSpace:
    """Quadratic space over F_p given by an upper-triangular half-Gram."""

    p: int
    half_gram: Matrix

    def __post_init__(self) -> None:
        _check_prime(self.p)
        hg = tuple(tuple(int(x) % self.p for x in row) for row in self.half_gram)
        n = len(hg)
        for row in hg:
            if len(row) != n:
                raise PreconditionError("half-Gram matrix must be square")
        for i in range(n):
            if any(hg[i][j] for j in range(i)):
                raise PreconditionError("half-Gram matrix must be upper triangular")
        object.__setattr__(self, "half_gram", hg)

    @property
    def dim(self) -> int:
        return len(self.half_gram)

    def gram(self) -> Matrix:
        return _gram_rows(self)

    def q(self, v: Sequence[int]) -> int:
        hg = self.half_gram
        p = self.p
        total = 0
        for i, vi in enumerate(v):
            if vi % p:
                row = hg[i]
                total += vi * sum(row[j] * v[j] for j in range(i, len(v)))
        return total % p

    def b(self, x: Sequence[int], y: Sequence[int]) -> int:
        B = self.gram()
        return sum(xi * sum(B[i][j] * y[j] for j in range(len(y))) for i, xi in enumerate(x)) % self.p

    def is_nondegenerate(self) -> bool:
        """True iff the bilinear form B has zero radical."""
        return _det_mod(self.gram(), self.p) != 0


@lru_cache(maxsize=None)
def _gram_rows(V: FpQuadSpace) -> Matrix:
    hg = V.half_gram
    n = V.dim
    return tuple(
        tuple((hg[i][j] + hg[j][i]) % V.p for j in range(n)) for i in range(n)
    )


@dataclass(frozen=True)
class ProjLine:
    """A line in F_p^n, stored by its normalized generator.

    The generator's leading nonzero coordinate is 1; two ProjLine values
    are equal iff they are the same line of the same space.
    """

    space: FpQuadSpace
    generator: Vector

    def __post_init__(self) -> None:
        p = self.space.p
        v = tuple(int(x) % p for x in self.generator)
        if len(v) != self.space.dim:
            raise PreconditionError("line generator has wrong dimension")
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            raise PreconditionError("zero vector spans no line")
        inv = _inv_mod(v[lead], p)
        object.__setattr__(self, "generator", tuple((x * inv) % p for x in v))

    def is_isotropic(self) -> bool:
        return self.space.q(self.generator) == 0


def line_sort_key(line: ProjLine) -> tuple[int, Vector]:
    return kernels.proj_key(line.generator)


@dataclass(frozen=True)
class FpIsometry:
    """An isometry of a quadratic space, stored as a matrix acting on columns."""

    space: FpQuadSpace
    matrix: Matrix

    def __post_init__(self) -> None:
        p = self.space.p
        n = self.space.dim
        m = tuple(tuple(int(x) % p for x in row) for row in self.matrix)
        if len(m) != n or any(len(r) != n for r in m):
            raise PreconditionError("isometry matrix has wrong shape")
        object.__setattr__(self, "matrix", m)
        if _det_mod(m, p) == 0:
            raise PreconditionError("isometry matrix is singular")
        cols = [tuple(m[i][j] for i in range(n)) for j in range(n)]
        V = self.space
        B = V.gram()
        for j in range(n):
            if V.q(cols[j]) != V.half_gram[j][j]:
                raise PreconditionError("matrix does not preserve the quadratic form")
            for i in range(j):
                if V.b(cols[i], cols[j]) != B[i][j]:
                    raise PreconditionError("matrix does not preserve the bilinear form")

    def apply(self, v: Sequence[int]) -> Vector:
        return _mat_vec(self.matrix, v, self.space.p)

    def apply_line(self, line: ProjLine) -> ProjLine:
        return ProjLine(self.space, self.apply(line.generator))

    def __matmul__(self, other: "FpIsometry") -> "FpIsometry":
        if other.space != self.space:
            raise PreconditionError("isometries of different spaces")
        return FpIsometry(self.space, _mat_mul(self.matrix, other.matrix, self.space.p))

    def inverse(self) -> "FpIsometry":
        return FpIsometry(self.space, _inv_mat(self.matrix, self.space.p))

    def det(self) -> int:
        return _det_mod(self.matrix, self.space.p)

    def dickson(self) -> int:
        return dickson_invariant(self.space, self.matrix)

    def is_special(self) -> bool:
        if self.space.p == 2:
            return self.dickson() == 0
        return self.det() == 1


# ---------------------------------------------------------------------------
# radicals, isotropic vectors, Witt decomposition
# ---------------------------------------------------------------------------


def radicals(V: FpQuadSpace) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
    """(basis of the bilinear radical, basis of the isotropic radical).

    The bilinear radical is ker B.  The isotropic radical is its subspace
    of vectors with Q = 0; for odd p the two coincide, while at p = 2 the
    restriction of Q to ker B is F_2-linear and the isotropic radical is
    its kernel.
    """
    p = V.p
    rad = _kernel_basis(V.gram(), p, V.dim)
    if not rad:
        return (), ()
    if p != 2:
        return tuple(rad), tuple(rad)
    # Q restricted to ker B is linear over F_2: Q(sum c_i v_i) = sum c_i Q(v_i)
    qrow = [V.q(v) for v in rad]
    coeff_kernel = _kernel_basis([qrow], 2, len(rad))
    iso = [_combine(rad, c, p) for c in coeff_kernel]
    return tuple(rad), tuple(iso)


def _combine(basis: Sequence[Vector], coeffs: Sequence[int], p: int) -> Vector:
    n = len(basis[0])
    return tuple(
        sum(c * b[i] for c, b in zip(coeffs, basis)) % p for i in range(n)
    )


def _normalized_reps(p: int, n: int):
    """Normalized projective representatives in canonical order."""
    for lead in range(n):
        for tail in product(range(p), repeat=n - lead - 1):
            yield (0,) * lead + (1,) + tail


def find_isotropic_vector(V: FpQuadSpace, max_exhaustive: int = 10**6) -> Vector | None:
    """The canonically smallest nonzero vector with Q(v) = 0, or None.

    Searches normalized representatives in canonical order (exhaustive and
    deterministic while the projective space has at most ``max_exhaustive``
    points).  Beyond the guard a deterministic structured search over
    coordinate pairs runs first, then a seeded random search; existence is
    guaranteed when the nondegenerate part has dimension >= 3, and at the
    densities that implies, the fallback search fails with negligible
    probability.
    """
    p, n = V.p, V.dim
    if n == 0:
        return None
    if (p**n - 1) // (p - 1) <= max_exhaustive:
        for v in _normalized_reps(p, n):
            if V.q(v) == 0:
                return v
        return None
    # structured search: single basis vectors, then planes <e_i, e_j>
    unit = lambda i: tuple(1 if k == i else 0 for k in range(n))
    for i in range(n):
        if V.half_gram[i][i] % p == 0:
            return unit(i)
    B = V.gram()
    for i in range(n):
        qi = V.half_gram[i][i] % p
        for j in range(n):
            if j == i:
                continue
            qj = V.half_gram[j][j] % p
            bij = B[i][j]
            # Q(e_i + t e_j) = qi + t bij + t^2 qj, qi, qj != 0 here
            if p == 2:
                candidates = (1,) if (qi + bij + qj) % 2 == 0 else ()
            else:
                disc = (bij * bij - 4 * qi * qj) % p
                root = _sqrt_mod(disc, p)
                if root is None:
                    continue
                inv = _inv_mod(2 * qj, p)
                candidates = ((-bij + root) * inv % p, (-bij - root) * inv % p)
            for t in candidates:
                v = tuple(
                    (1 if k == i else 0) + (t if k == j else 0) for k in range(n)
                )
                v = tuple(x % p for x in v)
                if V.q(v) == 0:
                    return v
    rng = random.Random(0x51A7)
    for _ in range(200000):
        v = tuple(rng.randrange(p) for _ in range(n))
        if any(v) and V.q(v) == 0:
            lead = next(i for i, x in enumerate(v) if x)
            inv = _inv_mod(v[lead], p)
            return tuple((x * inv) % p for x in v)
    return None


def _restrict(V: FpQuadSpace, basis: Sequence[Vector]) -> FpQuadSpace:
    k = len(basis)
    p = V.p
    hg = [[0] * k for _ in range(k)]
    for i in range(k):
        hg[i][i] = V.q(basis[i])
        for j in range(i + 1, k):
            hg[i][j] = V.b(basis[i], basis[j])
    return FpQuadSpace(p, tuple(tuple(r) for r in hg))


def witt_decomposition(
    V: FpQuadSpace,
) -> tuple[tuple[tuple[Vector, Vector], ...], tuple[Vector, ...], tuple[Vector, ...]]:
    """Split V into hyperbolic pairs, an anisotropic part, and the radical.

    Returns ``(pairs, anisotropic_basis, radical_basis)`` where each pair
    (u, v) satisfies Q(u) = Q(v) = 0, [u, v] = 1, all blocks are mutually
    orthogonal, the restriction of Q to the anisotropic basis has no
    nonzero isotropic vector, and ``radical_basis`` spans ker B.  The Witt
    index is ``len(pairs)``.
    """
    p, n = V.p, V.dim
    rad = list(_kernel_basis(V.gram(), p, n))
    comp: list[Vector] = []
    stack = [list(v) for v in rad]
    for i in range(n):
        e = tuple(1 if k == i else 0 for k in range(n))
        if _rank_mod(stack + [list(e)], p) > len(stack):
            stack.append(list(e))
            comp.append(e)
    pairs: list[tuple[Vector, Vector]] = []
    work = comp
    while work:
        Vs = _restrict(V, work)
        u_s = find_isotropic_vector(Vs)
        if u_s is None:
            break
        Bs = Vs.gram()
        bu = _mat_vec(Bs, u_s, p)
        j = next(i for i, x in enumerate(bu) if x)  # exists: B nondeg on work
        c_inv = _inv_mod(bu[j], p)
        w_s = tuple((c_inv if k == j else 0) for k in range(len(work)))
        qw = Vs.q(w_s)
        v_s = tuple((w_s[k] - qw * u_s[k]) % p for k in range(len(work)))
        u_amb = _combine(work, u_s, p)
        v_amb = _combine(work, v_s, p)
        pairs.append((u_amb, v_amb))
        rows = [_mat_vec(Bs, u_s, p), _mat_vec(Bs, v_s, p)]
        new_coeffs = _kernel_basis(rows, p, len(work))
        work = [_combine(work, c, p) for c in new_coeffs]
    return tuple(pairs), tuple(work), tuple(rad)


def enumerate_isotropic_lines(
    V: FpQuadSpace, max_points: int = _MAX_PROJ_POINTS
) -> tuple[ProjLine, ...]:
    """All isotropic lines of V, sorted in canonical order."""
    try:
        reps = kernels.isotropic_lines(V.p, V.dim, V.half_gram, max_points)
    except ValueError as exc:
        raise SizeGuardError(str(exc)) from None
    return tuple(ProjLine(V, v) for v in reps)


# ---------------------------------------------------------------------------
# reflections, transvections, Dickson invariant
# ---------------------------------------------------------------------------


def reflection(V: FpQuadSpace, v: Sequence[int]) -> FpIsometry:
    """The reflection (orthogonal transvection for p = 2) in v:
    ``x -> x - ([x, v]/Q(v)) v``.  Requires Q(v) != 0; at p = 2 also
    requires B(v, ·) nonzero, otherwise the formula degenerates to the
    identity.
    """
    p, n = V.p, V.dim
    v = tuple(int(x) % p for x in v)
    qv = V.q(v)
    if qv == 0:
        raise PreconditionError("reflection vector must be anisotropic")
    bv = _mat_vec(V.gram(), v, p)
    if p == 2 and not any(bv):
        raise PreconditionError("reflection vector pairs trivially with the space")
    inv = _inv_mod(qv, p)
    m = tuple(
        tuple(((1 if i == j else 0) - inv * bv[j] * v[i]) % p for j in range(n))
        for i in range(n)
    )
    return FpIsometry(V, m)


def eichler_transvection(V: FpQuadSpace, u: Sequence[int], w: Sequence[int]) -> FpIsometry:
    """The Eichler transvection E_{u,w}: requires Q(u) = 0, u != 0, [u, w] = 0.

    ``E(x) = x + [x, u] w - [x, w] u - Q(w) [x, u] u``.  It preserves Q,
    fixes u, has determinant 1 and Dickson invariant 0.
    """
    p, n = V.p, V.dim
    u = tuple(int(x) % p for x in u)
    w = tuple(int(x) % p for x in w)
    if not any(u):
        raise PreconditionError("transvection direction must be nonzero")
    if V.q(u) != 0:
        raise PreconditionError("transvection direction must be isotropic")
    if V.b(u, w) != 0:
        raise PreconditionError("transvection arguments must pair to zero")
    B = V.gram()
    bu = _mat_vec(B, u, p)
    bw = _mat_vec(B, w, p)
    qw = V.q(w)
    m = tuple(
        tuple(
            ((1 if i == j else 0) + bu[j] * w[i] - bw[j] * u[i] - qw * bu[j] * u[i]) % p
            for j in range(n)
        )
        for i in range(n)
    )
    return FpIsometry(V, m)


def dickson_invariant(V: FpQuadSpace, matrix: Matrix) -> int:
    """The Dickson invariant of g, computed as rank(g - 1) mod 2.

    For a nondegenerate bilinear form this is the Dickson invariant in
    every characteristic; its kernel is the special orthogonal group (for
    odd p the invariant agrees with det parity).
    """
    p, n = V.p, V.dim
    delta = [
        [(matrix[i][j] - (1 if i == j else 0)) % p for j in range(n)] for i in range(n)
    ]
    return _rank_mod(delta, p) % 2


# ---------------------------------------------------------------------------
# group orders
# ---------------------------------------------------------------------------


def so_order(V: FpQuadSpace) -> int:
    """|SO(V)(F_p)| for nondegenerate V, by the closed product formulas.

    Split/non-split type is read off the Witt decomposition.  For dim
    2m+1: p^{m^2} * prod_{i=1..m} (p^{2i} - 1).  For dim 2k of type
    epsilon: p^{k(k-1)} (p^k - epsilon) prod_{i=1..k-1} (p^{2i} - 1).
    """
    p = V.p
    pairs, aniso, rad = witt_decomposition(V)
    if rad:
        raise PreconditionError("group order requires a nondegenerate bilinear form")
    m = len(pairs)
    a = len(aniso)
    if a == 1:
        return p ** (m * m) * math.prod(p ** (2 * i) - 1 for i in range(1, m + 1))
    if a == 0:
        k, eps = m, 1
    elif a == 2:
        k, eps = m + 1, -1
    else:
        raise InvariantViolationError("anisotropic kernel of dimension > 2 over F_p")
    if k == 0:
        return 1
    return (
        p ** (k * (k - 1))
        * (p**k - eps)
        * math.prod(p ** (2 * i) - 1 for i in range(1, k))
    )


# ---------------------------------------------------------------------------
# full orthogonal group materialization (small spaces)
# ---------------------------------------------------------------------------

_GROUP_CACHE: dict[FpQuadSpace, dict] = {}


def _orthogonal_generators(V: FpQuadSpace) -> list[tuple[Matrix, int]]:
    """Reflection/transvection generators of O(V) with their Dickson parity.

    For odd p the reflections alone generate O(V).  At p = 2 the Eichler
    transvections in all isotropic directions are added; the one space
    where even that falls short (the four-dimensional split space over
    F_2) is completed by exhaustive search in ``_full_group``.
    """
    p, n = V.p, V.dim
    gens: list[tuple[Matrix, int]] = []
    for v in _normalized_reps(p, n):
        if V.q(v) != 0:
            try:
                gens.append((reflection(V, v).matrix, 1))
            except PreconditionError:
                continue
    if p == 2:
        B = V.gram()
        for u in _normalized_reps(p, n):
            if V.q(u) != 0:
                continue
            bu = _mat_vec(B, u, p)
            perp = _kernel_basis([bu], p, n)
            for w in perp:
                E = eichler_transvection(V, u, w)
                if E.matrix != _identity_mat(n):
                    gens.append((E.matrix, 0))
    return gens


def _all_isometries_bruteforce(V: FpQuadSpace) -> list[Matrix]:
    """Every isometry matrix of V by backtracking over columns (tiny spaces)."""
    p, n = V.p, V.dim
    B = V.gram()
    vectors = list(product(range(p), repeat=n))
    by_q: dict[int, list[Vector]] = {}
    for v in vectors:
        by_q.setdefault(V.q(v), []).append(v)
    out: list[Matrix] = []
    cols: list[Vector] = []

    def extend(j: int) -> None:
        if j == n:
            m = tuple(tuple(cols[c][r] for c in range(n)) for r in range(n))
            if _det_mod(m, p) != 0:
                out.append(m)
            return
        for v in by_q.get(V.half_gram[j][j] % p, ()):
            if all(V.b(cols[i], v) == B[i][j] for i in range(j)):
                cols.append(v)
                extend(j + 1)
                cols.pop()

    extend(0)
    return out


def _full_group(V: FpQuadSpace, limit: int) -> list[Matrix]:
    """All of O(V) as matrices, asserted against the closed-form order."""
    target = 2 * so_order(V)
    if target > limit:
        raise SizeGuardError(f"|O(V)| = {target} exceeds group guard {limit}")
    gens = [g for g, _ in _orthogonal_generators(V)]
    if not gens:
        raise InvariantViolationError("no orthogonal generators found")
    grp = kernels.group_closure(gens, V.p, limit)
    if len(grp) < target and V.p ** (V.dim**2) <= 10**7:
        # generator completion: the split 4-dimensional space over F_2 is
        # the one nondegenerate case where transvections generate a proper
        # subgroup; enumerate the group outright.
        grp = _all_isometries_bruteforce(V)
    if len(grp) != target:
        raise InvariantViolationError(
            f"materialized group has order {len(grp)}, expected {target}"
        )
    return grp


def _is_special_matrix(V: FpQuadSpace, m: Matrix) -> bool:
    if V.p == 2:
        return dickson_invariant(V, m) == 0
    return _det_mod(m, V.p) == 1


def _group_limit() -> int:
    return _MAX_GROUP_ELEMENTS if kernels.backend_name() == "compiled" else 20000


# ---------------------------------------------------------------------------
# Witt extension of isometries
# ---------------------------------------------------------------------------


def _tuple_type_key(V: FpQuadSpace, vectors: Sequence[Vector]):
    k = len(vectors)
    qs = tuple(V.q(v) for v in vectors)
    bs = tuple(V.b(vectors[i], vectors[j]) for i in range(k) for j in range(i + 1, k))
    return (k, qs, bs)


def _witness_from_group(V: FpQuadSpace, X: tuple[Vector, ...], Y: tuple[Vector, ...], limit: int) -> Matrix:
    # Tuples with the same Gram data can still fall into several
    # special-orthogonal orbits (maximal totally isotropic subspaces of a
    # split space split into two families), so the cache keeps one image
    # index per orbit discovered for each Gram type.  The index containing
    # X is found by membership (X = identity . X always lands in the index
    # seeded on X); only a Y missing from that same index certifies that no
    # special witness exists.
    cache = _GROUP_CACHE.setdefault(V, {})
    if "so" not in cache:
        grp = _full_group(V, limit)
        cache["so"] = [g for g in grp if _is_special_matrix(V, g)]
        cache["orbits"] = {}
    key = _tuple_type_key(V, X)
    indices = cache["orbits"].setdefault(key, [])
    index = None
    for candidate in indices:
        if X in candidate:
            index = candidate
            break
    if index is None:
        index = {}
        for g in cache["so"]:
            img = tuple(_mat_vec(g, x, V.p) for x in X)
            if img not in index:
                index[img] = g
        indices.append(index)
    gx = index[X]
    gy = index.get(Y)
    if gy is None:
        raise InvariantViolationError(
            "isometric tuples lie in different special-orthogonal orbits"
        )
    return _mat_mul(gy, _inv_mat(gx, V.p), V.p)


def _witness_by_bfs(
    V: FpQuadSpace, X: tuple[Vector, ...], Y: tuple[Vector, ...], limit: int
) -> Matrix:
    """Search a special isometry X -> Y by BFS over (tuple, parity) states."""
    p = V.p
    gens = _orthogonal_generators(V)
    start = (X, 0)
    goal = (Y, 0)
    if start == goal:
        return _identity_mat(V.dim)
    parents: dict = {start: None}
    frontier = [start]
    while frontier:
        next_frontier = []
        for state in frontier:
            tup, par = state
            for gi, (g, gpar) in enumerate(gens):
                img = tuple(_mat_vec(g, x, p) for x in tup)
                new_state = (img, par ^ gpar)
                if new_state in parents:
                    continue
                parents[new_state] = (state, gi)
                if new_state == goal:
                    m = _identity_mat(V.dim)
                    cur = new_state
                    while parents[cur] is not None:
                        prev, gidx = parents[cur]
                        m = _mat_mul(m, gens[gidx][0], p)
                        cur = prev
                    return m
                next_frontier.append(new_state)
                if len(parents) > 2 * limit:
                    raise SizeGuardError("tuple orbit exceeds the search guard")
        frontier = next_frontier
    raise InvariantViolationError(
        "isometric tuples lie in different special-orthogonal orbits"
    )


def witt_extension(
    V: FpQuadSpace,
    w1_basis: Sequence[Sequence[int]],
    w2_basis: Sequence[Sequence[int]],
    f: Sequence[Sequence[int]] | None = None,
    max_group: int | None = None,
) -> FpIsometry:
    """Extend an isometry between subspaces to a special isometry of V.

    ``w1_basis`` and ``w2_basis`` are bases (lists of vectors) of two
    subspaces; ``f`` gives the isometry in coordinates (column j of f holds
    the w2-basis coefficients of the image of the j-th w1 vector), default
    the basis-to-basis map.  Requires: nondegenerate V, independent bases,
    codimension >= 2, and the Gram data of the two tuples must match.

    Returns g in SO(V) with g(x_j) = y_j for every basis vector; raises
    InvariantViolationError if no special isometry exists (which the
    codimension bound rules out mathematically — such a failure would be a
    genuine counterexample).
    """
    p, n = V.p, V.dim
    if not V.is_nondegenerate():
        raise PreconditionError("Witt extension requires a nondegenerate space")
    X = tuple(tuple(int(c) % p for c in v) for v in w1_basis)
    W2 = tuple(tuple(int(c) % p for c in v) for v in w2_basis)
    k = len(X)
    if len(W2) != k:
        raise PreconditionError("subspace bases have different sizes")
    if k and _rank_mod(list(X), p) != k:
        raise PreconditionError("first subspace basis is dependent")
    if k and _rank_mod(list(W2), p) != k:
        raise PreconditionError("second subspace basis is dependent")
    if n - k < 2:
        raise PreconditionError("codimension must be at least 2")
    if f is None:
        Y = W2
    else:
        fm = tuple(tuple(int(c) % p for c in row) for row in f)
        if len(fm) != k or any(len(r) != k for r in fm):
            raise PreconditionError("isometry coefficient matrix has wrong shape")
        if k and _det_mod(fm, p) == 0:
            raise PreconditionError("isometry coefficient matrix is singular")
        Y = tuple(
            tuple(sum(fm[i][j] * W2[i][t] for i in range(k)) % p for t in range(n))
            for j in range(k)
        )
    for j in range(k):
        if V.q(X[j]) != V.q(Y[j]):
            raise PreconditionError("map does not preserve the quadratic form")
        for i in range(j):
            if V.b(X[i], X[j]) != V.b(Y[i], Y[j]):
                raise PreconditionError("map does not preserve the bilinear form")
    if k == 0:
        return FpIsometry(V, _identity_mat(n))
    limit = max_group if max_group is not None else _group_limit()
    if 2 * so_order(V) <= limit:
        m = _witness_from_group(V, X, Y, limit)
    else:
        m = _witness_by_bfs(V, X, Y, _MAX_PROJ_POINTS)
    iso = FpIsometry(V, m)
    if not iso.is_special():
        raise InvariantViolationError("witness is not special")
    for xj, yj in zip(X, Y):
        if iso.apply(xj) != yj:
            raise InvariantViolationError("witness does not extend the given map")
    return iso


# ---------------------------------------------------------------------------
# reflection factorization and spinor norm (odd p)
# ---------------------------------------------------------------------------


def reflection_factorization(V: FpQuadSpace, g: FpIsometry | Matrix) -> list[Vector]:
    """Vectors v_1, ..., v_k with g = τ_{v_1} ∘ ... ∘ τ_{v_k} (odd p).

    Constructive Cartan–Dieudonné: at most 2·dim reflections.  Each step
    either descends to the orthogonal complement of a fixed anisotropic
    vector or applies one or two reflections to create such a vector (if
    Q(gx - x) = 0 for an anisotropic x moved by g, then Q(gx + x) =
    4Q(x) - Q(gx - x) != 0 and τ_x ∘ τ_{gx+x} fixes x).
    """
    p = V.p
    if p == 2:
        raise PreconditionError("reflection factorization implemented for odd p only")
    if not V.is_nondegenerate():
        raise PreconditionError("factorization requires a nondegenerate space")
    h = g.matrix if isinstance(g, FpIsometry) else tuple(tuple(int(x) % p for x in r) for r in g)
    FpIsometry(V, h)  # validates h is an isometry
    n = V.dim
    sub_basis: list[Vector] = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]
    Vs = V
    out: list[Vector] = []
    while True:
        k = len(sub_basis)
        if k == 0:
            break
        ident = _identity_mat(k)
        if h == ident:
            break
        # look for an anisotropic vector fixed by h (in subspace coordinates)
        fixed = None
        moved_aniso = None
        for v in _normalized_reps(p, k):
            if Vs.q(v) == 0:
                continue
            if _mat_vec(h, v, p) == v:
                fixed = v
                break
            if moved_aniso is None:
                moved_aniso = v
        if fixed is not None:
            # descend to the complement of the fixed vector
            bv = _mat_vec(Vs.gram(), fixed, p)
            comp_coeffs = _kernel_basis([bv], p, k)
            T = tuple(tuple(c[i] for c in comp_coeffs) for i in range(k))  # k x (k-1)
            hT = _mat_mul(h, T, p)
            h = _solve_matrix(T, hT, p)
            sub_basis = [_combine(sub_basis, c, p) for c in comp_coeffs]
            Vs = _restrict(V, sub_basis)
            continue
        x = moved_aniso
        if x is None:
            raise InvariantViolationError("no anisotropic vector in a nondegenerate space")
        hx = _mat_vec(h, x, p)
        d = tuple((a - b) % p for a, b in zip(hx, x))
        if Vs.q(d) != 0:
            out.append(_combine(sub_basis, d, p))
            h = _mat_mul(reflection(Vs, d).matrix, h, p)
        else:
            s = tuple((a + b) % p for a, b in zip(hx, x))
            # h <- τ_x ∘ τ_s ∘ h; τ_s applied first
            out.append(_combine(sub_basis, s, p))
            out.append(_combine(sub_basis, x, p))
            h = _mat_mul(reflection(Vs, x).matrix, _mat_mul(reflection(Vs, s).matrix, h, p), p)
    return out


def spinor_norm(V: FpQuadSpace, g: FpIsometry | Matrix) -> int:
    """Spinor norm of g in F_p^× / squares, as +1 (trivial) or -1 (odd p).

    Computed from a reflection factorization: the class of the product of
    Q-values of the reflection vectors.  The identity has norm +1.
    """
    vectors = reflection_factorization(V, g)
    m = g.matrix if isinstance(g, FpIsometry) else g
    total = 1
    for v in vectors:
        total = (total * V.q(v)) % V.p
    # parity consistency: det = (-1)^(number of reflections)
    det = _det_mod(m, V.p)
    expected = (V.p - 1) if len(vectors) % 2 else 1
    if det != expected:
        raise InvariantViolationError("reflection count parity disagrees with det")
    return _legendre(total, V.p)


# ---------------------------------------------------------------------------
# stabilizer orbits of isotropic lines
# ---------------------------------------------------------------------------


def stabilizer_orbit(
    V: FpQuadSpace,
    w_basis: Sequence[Sequence[int]],
    seed: ProjLine,
    universe: Iterable[ProjLine] | None = None,
    max_points: int = _MAX_PROJ_POINTS,
) -> tuple[ProjLine, ...]:
    """Orbit of an isotropic line under reflections/transvections fixing W.

    Generators are all reflections in anisotropic vectors of W^⊥ together
    with all Eichler transvections E_{u,w} for isotropic u in W^⊥ and w in
    a basis of W^⊥ ∩ u^⊥ — every generator fixes W pointwise.  Returns the
    orbit sorted canonically, intersected with ``universe`` when given.
    """
    p, n = V.p, V.dim
    if seed.space != V:
        raise PreconditionError("seed line belongs to a different space")
    if not seed.is_isotropic():
        raise PreconditionError("seed line must be isotropic")
    W = [tuple(int(c) % p for c in v) for v in w_basis]
    B = V.gram()
    if W:
        rows = [_mat_vec(B, w, p) for w in W]
        perp = _kernel_basis(rows, p, n)
    else:
        perp = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]
    gens: list[Matrix] = []
    if perp:
        kperp = len(perp)
        if (p**kperp - 1) // (p - 1) > max_points:
            raise SizeGuardError("perpendicular space too large to enumerate")
        iso_dirs: list[Vector] = []
        for coeffs in _normalized_reps(p, kperp):
            v = _combine(perp, coeffs, p)
            if V.q(v) != 0:
                bv = _mat_vec(B, v, p)
                if p == 2 and not any(bv):
                    continue
                gens.append(reflection(V, v).matrix)
            else:
                iso_dirs.append(v)
        for u in iso_dirs:
            bu = _mat_vec(B, u, p)
            rows = [_mat_vec(B, w, p) for w in W] + [bu]
            sub = _kernel_basis(rows, p, n)
            for w in sub:
                E = eichler_transvection(V, u, w)
                if E.matrix != _identity_mat(n):
                    gens.append(E.matrix)
    if not gens:
        orbit_vecs = [seed.generator]
    else:
        try:
            orbit_vecs = kernels.line_orbit(gens, seed.generator, p, max_points)
        except ValueError as exc:
            raise SizeGuardError(str(exc)) from None
    orbit = [ProjLine(V, v) for v in orbit_vecs]
    if universe is not None:
        allowed = set(universe)
        orbit = [line for line in orbit if line in allowed]
    return tuple(sorted(orbit, key=line_sort_key))
