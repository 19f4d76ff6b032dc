"""Self-dual p-power-commensurable lattices and the isotropic-line correspondence.

Fix an even lattice N = Z^n that is self-dual at a prime p.  Inside
N[1/p] the lattices commensurable with N at p that are again self-dual
and exchange index p with N in both directions ("p-neighbors") correspond
bijectively to isotropic lines of the reduction N/pN.  This module builds
both directions of that correspondence explicitly:

* ``lattice_from_line`` lifts an isotropic line to a vector v with
  Q(v) ≡ 0 mod p², and forms  Ñ = Z·(v/p) + {x ∈ N : [x, v] ≡ 0 mod p}.
* ``line_from_lattice`` recovers the line as the image of pÑ ∩ N in N/pN.

On top of the correspondence sit the typed-line filters (genericity with
respect to a sublattice W), the shrinking construction mapping a minimal
pair (W, W̃) to a fiber of neighbors, its brute-force double-check, and
the uniqueness-based inverse ``recover_lattice``.

Rational lattices are represented by :class:`PLattice`: an integer matrix
of numerator columns together with a power k, the lattice being spanned by
p^{-k} times the columns.  The representation is canonical (Hermite form,
minimal power), so dataclass equality is lattice equality.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvariantViolationError, PreconditionError, SizeGuardError
from .exact_linalg import (
    IntMatrix,
    hnf_basis,
    integer_kernel,
    lattices_equal,
    quotient_structure,
    sublattice_in_span,
)
from .fp_quadratic import FpQuadSpace, ProjLine, enumerate_isotropic_lines, line_sort_key
from .quad_lattice import (
    QuadLattice,
    Sublattice,
    bilinear_value,
    is_self_dual_at,
    quad_value,
    sublattice_gram,
)

__all__ = [
    "PLattice",
    "LambdaSplitting",
    "default_precision",
    "reduction",
    "hensel_lift_line",
    "splitting_from_line",
    "lattice_from_line",
    "line_from_lattice",
    "enumerate_neighbors",
    "neighbors_of",
    "plattice_gram",
    "plattice_quadlattice",
    "plattice_sort_key",
    "w_generic_lines",
    "shrink_set",
    "shrink_set_bruteforce",
    "recover_lattice",
]

_MAX_PROJ_POINTS = 10**7


def default_precision() -> int:
    """Default working precision k for mod-p^k lifts.

    Read from the QLAT_PRECISION environment variable (default 2).  The
    canonical lattice outputs do not depend on k — any admissible lift
    yields the same neighbor — so raising it only deepens intermediate
    certificates such as splittings.
    """
    raw = os.environ.get("QLAT_PRECISION", "2")
    try:
        k = int(raw)
    except ValueError:
        raise PreconditionError(f"QLAT_PRECISION must be an integer, got {raw!r}") from None
    if k < 1:
        raise PreconditionError("QLAT_PRECISION must be at least 1")
    return k


@dataclass(frozen=True)
class PLattice:
    """A lattice p^{-power} · (column span) inside ambient coordinates.

    Canonical form: the numerator basis is the full-rank Hermite basis and
    ``power`` is minimal (if power > 0, not every entry is divisible by
    p), so equal lattices compare equal as dataclasses.  ``power = 0`` and
    the identity basis is the ambient lattice itself.
    """

    ambient: QuadLattice
    p: int
    power: int
    numerator_basis: IntMatrix

    def __post_init__(self) -> None:
        if self.power < 0:
            raise PreconditionError("negative power in lattice denominator")
        n = self.ambient.rank
        numer = hnf_basis(self.numerator_basis)
        if numer.cols != n or numer.rows != n:
            raise PreconditionError("lattice basis must have full rank")
        power = self.power
        while power > 0 and all(
            x % self.p == 0 for row in numer.entries for x in row
        ):
            numer = IntMatrix.from_rows(
                [[x // self.p for x in row] for row in numer.entries]
            )
            power -= 1
        numer = hnf_basis(numer)
        object.__setattr__(self, "numerator_basis", numer)
        object.__setattr__(self, "power", power)

    @property
    def rank(self) -> int:
        return self.ambient.rank

    def scale_denominator(self) -> int:
        return self.p**self.power

    def contains_integer_vector(self, v: tuple[int, ...]) -> bool:
        """Membership test for a vector of the ambient Z^n."""
        target = [Fraction(x * self.scale_denominator()) for x in v]
        cols = self.numerator_basis.columns()
        n = len(target)
        a = [[Fraction(cols[j][i]) for j in range(n)] + [target[i]] for i in range(n)]
        for col in range(n):
            piv = next((i for i in range(col, n) if a[i][col] != 0), None)
            if piv is None:
                return False
            a[col], a[piv] = a[piv], a[col]
            inv = 1 / a[col][col]
            a[col] = [x * inv for x in a[col]]
            for i in range(n):
                if i != col and a[i][col] != 0:
                    f = a[i][col]
                    a[i] = [x - f * y for x, y in zip(a[i], a[col])]
        return all(a[i][n].denominator == 1 for i in range(n))


def plattice_sort_key(L: PLattice):
    return (L.power, L.numerator_basis.entries)


def plattice_gram(L: PLattice) -> IntMatrix:
    """Gram matrix of the lattice in its own basis (must be integral)."""
    S = L.numerator_basis
    G = S.transpose() @ L.ambient.gram() @ S
    d = L.scale_denominator() ** 2
    out = []
    for row in G.entries:
        out_row = []
        for x in row:
            if x % d:
                raise PreconditionError("lattice is not integral for the form")
            out_row.append(x // d)
        out.append(out_row)
    return IntMatrix.from_rows(out)


def plattice_quadlattice(L: PLattice) -> QuadLattice:
    """The lattice as an abstract even lattice in its own coordinates."""
    S = L.numerator_basis
    cols = S.columns()
    d = L.scale_denominator() ** 2
    n = L.rank
    hg = [[0] * n for _ in range(n)]
    for i in range(n):
        q = quad_value(L.ambient, cols[i])
        if q % d:
            raise PreconditionError("lattice quadratic form is not integral")
        hg[i][i] = q // d
        for j in range(i + 1, n):
            b = bilinear_value(L.ambient, cols[i], cols[j])
            if b % d:
                raise PreconditionError("lattice bilinear form is not integral")
            hg[i][j] = b // d
    return QuadLattice(IntMatrix.from_rows(hg))


# ---------------------------------------------------------------------------
# reduction and Hensel lifting
# ---------------------------------------------------------------------------


def reduction(N: QuadLattice, p: int) -> FpQuadSpace:
    """The quadratic space N/pN over F_p."""
    return FpQuadSpace(p, tuple(tuple(x % p for x in row) for row in N.half_gram.entries))


def _check_line(N: QuadLattice, line: ProjLine) -> int:
    p = line.space.p
    if line.space != reduction(N, p):
        raise PreconditionError("line does not live in the reduction of the lattice")
    return p


def hensel_lift_line(N: QuadLattice, line: ProjLine, k: int | None = None) -> tuple[int, ...]:
    """Lift an isotropic line to v with Q(v) ≡ 0 mod p^k, v mod p spanning it.

    Newton iteration along a fixed basis direction pairing to a unit with
    v;  requires the line to be isotropic and to pair nontrivially with
    the lattice (it must avoid the radical of the reduction — otherwise
    the point is singular and no correction direction exists).  When k is
    omitted it comes from :func:`default_precision`.
    """
    p = _check_line(N, line)
    if k is None:
        k = default_precision()
    if k < 1:
        raise PreconditionError("precision must be at least 1")
    if not line.is_isotropic():
        raise PreconditionError("line is not isotropic")
    n = N.rank
    v = list(line.generator)
    brow = [bilinear_value(N, v, _unit(n, i)) % p for i in range(n)]
    idx = next((i for i, x in enumerate(brow) if x), None)
    if idx is None:
        raise PreconditionError("singular point: line pairs trivially with the lattice")
    w = _unit(n, idx)
    for j in range(1, k):
        qv = quad_value(N, v)
        c = (qv // p**j) % p
        if qv % p**j:
            raise InvariantViolationError("lost precision during Hensel lifting")
        lam = (-c * pow(bilinear_value(N, v, w), -1, p)) % p
        v = [(a + p**j * lam * b) for a, b in zip(v, w)]
    return tuple(a % p**k for a in v)


def _unit(n: int, i: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(n))


@dataclass(frozen=True)
class LambdaSplitting:
    """A mod-p^k weight splitting attached to an isotropic line.

    ``minus`` and ``plus`` satisfy Q ≡ 0 and [minus, plus] ≡ 1 mod p^k;
    the columns of ``zero_basis`` pair to 0 with both mod p^k and reduce
    mod p to a complement of the plane spanned by the pair.
    """

    ambient: QuadLattice
    p: int
    precision: int
    minus: tuple[int, ...]
    plus: tuple[int, ...]
    zero_basis: IntMatrix

    def __post_init__(self) -> None:
        N, p, k = self.ambient, self.p, self.precision
        q = p**k
        if quad_value(N, self.minus) % q or quad_value(N, self.plus) % q:
            raise PreconditionError("splitting vectors are not isotropic mod p^k")
        if bilinear_value(N, self.minus, self.plus) % q != 1:
            raise PreconditionError("splitting pair does not pair to 1 mod p^k")
        if self.zero_basis.cols != N.rank - 2:
            raise PreconditionError("weight-zero block has wrong rank")
        for col in self.zero_basis.columns():
            if bilinear_value(N, col, self.minus) % q or bilinear_value(N, col, self.plus) % q:
                raise PreconditionError("weight-zero block does not pair to zero mod p^k")


def splitting_from_line(
    N: QuadLattice, line: ProjLine, k: int | None = None, seed: int | None = None
) -> LambdaSplitting:
    """Hyperbolic pair plus complement attached to an isotropic line, mod p^k.

    Deterministic by default; ``seed`` permutes the choice of dual vector
    among valid candidates (different seeds may give different splittings,
    but ``lattice_from_line`` does not depend on the choice).  When k is
    omitted it comes from :func:`default_precision`.
    """
    p = _check_line(N, line)
    if k is None:
        k = default_precision()
    if not is_self_dual_at(N, p):
        raise PreconditionError("lattice is not self-dual at p")
    v = list(hensel_lift_line(N, line, k))
    n = N.rank
    q = p**k
    candidates = [i for i in range(n) if bilinear_value(N, v, _unit(n, i)) % p]
    if seed is not None:
        import random

        rng = random.Random(seed)
        rng.shuffle(candidates)
    idx = candidates[0]
    w1 = list(_unit(n, idx))
    c = pow(bilinear_value(N, v, w1), -1, q)
    w1 = [(c * x) % q for x in w1]
    # make the dual vector isotropic mod p^k: Q(w1 + t v) = Q(w1) + t  (mod p^k)
    t = (-quad_value(N, w1)) % q
    w = [(a + t * b) % q for a, b in zip(w1, v)]
    zero_cols = []
    taken: list[list[int]] = []
    for i in range(n):
        x = _unit(n, i)
        zx = [
            (x[j] - bilinear_value(N, x, w) * v[j] - bilinear_value(N, x, v) * w[j]) % q
            for j in range(n)
        ]
        red = [[e % p for e in row] for row in taken] + [[e % p for e in zx]]
        if _fp_rank(red, p) > len(taken):
            taken.append(zx)
            zero_cols.append(zx)
        if len(zero_cols) == n - 2:
            break
    if len(zero_cols) != n - 2:
        raise InvariantViolationError("could not complete the weight-zero block")
    return LambdaSplitting(
        N, p, k, tuple(a % q for a in v), tuple(a % q for a in w),
        IntMatrix.from_columns(zero_cols, rows=n),
    )


def _fp_rank(rows: list[list[int]], p: int) -> int:
    m = [row[:] for row in rows]
    if not m:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if m[i][c] % p), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] % p:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        r += 1
    return r


# ---------------------------------------------------------------------------
# the line <-> lattice correspondence
# ---------------------------------------------------------------------------


def lattice_from_line(N: QuadLattice, line: ProjLine) -> PLattice:
    """The self-dual p-neighbor attached to an isotropic line.

    With v a lift satisfying Q(v) ≡ 0 mod p², the lattice is
    Z·(v/p) + {x ∈ N : [x, v] ≡ 0 mod p}.  The result does not depend on
    the choice of admissible lift (two lifts differ by p·w with w in the
    second summand's dual behaviour), and is asserted to be even and
    self-dual before returning.
    """
    p = _check_line(N, line)
    if not is_self_dual_at(N, p):
        raise PreconditionError("lattice is not self-dual at p")
    n = N.rank
    v = hensel_lift_line(N, line, max(2, default_precision()))
    B = N.gram()
    row = [sum(B.entries[i][j] * v[j] for j in range(n)) % p for i in range(n)]
    K = _fp_kernel_lift(row, p, n)
    Lv = hnf_basis(K.hstack(IntMatrix.identity(n).scale(p)))
    if quotient_structure(n, Lv).order() != p:
        raise InvariantViolationError("orthogonal-mod-p sublattice has wrong index")
    vcol = IntMatrix.from_columns([v])
    S = hnf_basis(vcol.hstack(Lv.scale(p)))
    det = S.det()
    if abs(det) != p**n:
        raise InvariantViolationError("neighbor lattice is not self-dual (determinant)")
    G = S.transpose() @ B @ S
    if any(x % p**2 for r in G.entries for x in r):
        raise InvariantViolationError("neighbor lattice is not integral")
    for col in S.columns():
        if quad_value(N, col) % p**2:
            raise InvariantViolationError("neighbor lattice is not even")
    return PLattice(N, p, 1, S)


def _fp_kernel_lift(row: list[int], p: int, n: int) -> IntMatrix:
    """Integer lift of the mod-p kernel of a single covector row."""
    idx = next((i for i, x in enumerate(row) if x % p), None)
    if idx is None:
        return IntMatrix.identity(n)
    inv = pow(row[idx], -1, p)
    cols = []
    for i in range(n):
        if i == idx:
            continue
        e = [0] * n
        e[i] = 1
        e[idx] = (-row[i] * inv) % p
        cols.append(tuple(e))
    return IntMatrix.from_columns(cols, rows=n)


def line_from_lattice(Nt: PLattice) -> ProjLine:
    """The isotropic line recovered from a p-neighbor:  image of pÑ ∩ N.

    Validates that the input genuinely is a p-neighbor of its ambient
    lattice (index p in both directions, integral, even, self-dual); the
    ambient lattice itself and lattices further away than one p-step are
    rejected.
    """
    N, p = Nt.ambient, Nt.p
    if not is_self_dual_at(N, p):
        raise PreconditionError("ambient lattice is not self-dual at p")
    if Nt.power != 1:
        raise PreconditionError("lattice is not a p-neighbor of the ambient lattice")
    S = Nt.numerator_basis
    n = N.rank
    if abs(S.det()) != p**n:
        raise PreconditionError("lattice is not self-dual (determinant)")
    plattice_gram(Nt)  # integrality check
    V = reduction(N, p)
    red = [[x % p for x in S.column(j)] for j in range(n)]
    if _fp_rank(red, p) != 1:
        raise PreconditionError("lattice does not exchange index p with the ambient")
    gen = next(rowvec for rowvec in red if any(e % p for e in rowvec))
    line = ProjLine(V, tuple(gen))
    if not line.is_isotropic():
        raise InvariantViolationError("recovered line is not isotropic")
    return line


def enumerate_neighbors(
    N: QuadLattice, p: int, max_points: int = _MAX_PROJ_POINTS
) -> tuple[PLattice, ...]:
    """All p-neighbors of N, one per isotropic line of the reduction, sorted."""
    if not is_self_dual_at(N, p):
        raise PreconditionError("lattice is not self-dual at p")
    V = reduction(N, p)
    lines = enumerate_isotropic_lines(V, max_points)
    out = [lattice_from_line(N, line) for line in lines]
    return tuple(sorted(out, key=plattice_sort_key))


def neighbors_of(L: PLattice, max_points: int = _MAX_PROJ_POINTS) -> tuple[PLattice, ...]:
    """All p-neighbors of an arbitrary self-dual lattice in N[1/p].

    Computed in the lattice's own coordinates and mapped back, so the
    ambient representation stays exact.  The ambient lattice N appears
    among the neighbors of any neighbor of N.
    """
    p = L.p
    Lq = plattice_quadlattice(L)
    if not is_self_dual_at(Lq, p):
        raise PreconditionError("lattice is not self-dual at p")
    inner = enumerate_neighbors(Lq, p, max_points)
    S = L.numerator_basis
    out = [
        PLattice(L.ambient, p, L.power + 1, S @ M.numerator_basis) for M in inner
    ]
    return tuple(sorted(out, key=plattice_sort_key))


# ---------------------------------------------------------------------------
# typed (W-generic) lines and the shrinking construction
# ---------------------------------------------------------------------------


def w_generic_lines(
    N: QuadLattice,
    W: Sublattice,
    p: int,
    U: Sublattice | None = None,
    max_points: int = _MAX_PROJ_POINTS,
) -> tuple[ProjLine, ...]:
    """Isotropic lines generic for W (and exactly typed for U when given).

    A line ⟨v̄⟩ qualifies when (i) v̄ does not lie in the reduction of W,
    (ii) some w in W pairs with v̄ nontrivially, and — when U is given —
    (iii) every u in U pairs with v̄ trivially.  For W = 0 conditions (i)
    and (ii) are vacuous and every isotropic line qualifies.
    """
    if W.ambient != N or (U is not None and U.ambient != N):
        raise PreconditionError("sublattice belongs to a different lattice")
    V = reduction(N, p)
    lines = enumerate_isotropic_lines(V, max_points)
    if W.rank == 0:
        return lines
    Wred = [[x % p for x in W.basis.column(j)] for j in range(W.rank)]
    w_rank = _fp_rank([row[:] for row in Wred], p)
    B = N.gram()
    wb_rows = [
        [sum(B.entries[i][j] * W.basis.entries[i][c] for i in range(N.rank)) % p for j in range(N.rank)]
        for c in range(W.rank)
    ]
    ub_rows = []
    if U is not None:
        ub_rows = [
            [sum(B.entries[i][j] * U.basis.entries[i][c] for i in range(N.rank)) % p for j in range(N.rank)]
            for c in range(U.rank)
        ]
    out = []
    for line in lines:
        v = line.generator
        if _fp_rank(Wred + [list(v)], p) == w_rank:
            continue  # v lies in the reduction of W
        if all(sum(r[j] * v[j] for j in range(len(v))) % p == 0 for r in wb_rows):
            continue  # W pairs trivially with v
        if ub_rows and any(
            sum(r[j] * v[j] for j in range(len(v))) % p for r in ub_rows
        ):
            continue  # U must pair trivially
        out.append(line)
    return tuple(out)


def _integral_coefficients(basis: IntMatrix, targets: IntMatrix) -> IntMatrix:
    """Solve basis @ C = targets with integer C; raises if not contained."""
    n, r = basis.rows, basis.cols
    k = targets.cols
    a = [
        [Fraction(basis.entries[i][j]) for j in range(r)]
        + [Fraction(targets.entries[i][j]) for j in range(k)]
        for i in range(n)
    ]
    rank = 0
    pivots = []
    for col in range(r):
        piv = next((i for i in range(rank, n) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = 1 / a[rank][col]
        a[rank] = [x * inv for x in a[rank]]
        for i in range(n):
            if i != rank and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        pivots.append(col)
        rank += 1
    if rank != r:
        raise PreconditionError("basis columns are dependent")
    for i in range(rank, n):
        if any(a[i][r + j] != 0 for j in range(k)):
            raise PreconditionError("target vectors lie outside the span")
    C = [[Fraction(0)] * k for _ in range(r)]
    for row_idx, pc in enumerate(pivots):
        for j in range(k):
            C[pc][j] = a[row_idx][r + j]
    out = []
    for row in C:
        out_row = []
        for x in row:
            if x.denominator != 1:
                raise PreconditionError("target vectors are not integral in the basis")
            out_row.append(int(x))
        out.append(out_row)
    return IntMatrix.from_rows(out)


def _shrink_preconditions(
    N: QuadLattice, W: Sublattice, Wt: Sublattice, p: int, min_corank: int
) -> Sublattice:
    """Validate a minimal pair (W, W̃) and derive the exact-type subgroup U."""
    from .exact_linalg import saturate, smith_normal_form, unimodular_inverse

    if not is_self_dual_at(N, p):
        raise PreconditionError("lattice is not self-dual at p")
    if W.ambient != N or Wt.ambient != N:
        raise PreconditionError("sublattice belongs to a different lattice")
    r = W.rank
    if r == 0:
        raise PreconditionError("W must be nonzero")
    _, summand = saturate(N.rank, W.basis)
    if not summand:
        raise PreconditionError("W is not a direct summand")
    if 2 * r > N.rank - min_corank:
        raise PreconditionError("W has rank too large for the construction")
    if sublattice_gram(W).det() == 0:
        raise PreconditionError("form restricted to W is degenerate")
    C = _integral_coefficients(W.basis, Wt.basis)
    if Wt.rank != r or quotient_structure(r, C).order() != p:
        raise PreconditionError("W̃ must have index exactly p in W")
    A, D, _ = smith_normal_form(C)
    divisors = [D.entries[i][i] for i in range(r)]
    if divisors != [1] * (r - 1) + [p]:
        raise InvariantViolationError("index-p subgroup has unexpected divisors")
    Ainv = unimodular_inverse(A)
    U_basis = (W.basis @ Ainv).take_columns(range(r - 1))
    return Sublattice(N, hnf_basis(U_basis)) if r > 1 else Sublattice(
        N, IntMatrix.zero(N.rank, 0)
    )


def shrink_set(
    N: QuadLattice,
    W: Sublattice,
    Wt: Sublattice,
    p: int,
    max_points: int = _MAX_PROJ_POINTS,
) -> tuple[PLattice, ...]:
    """Neighbors Ñ with Ñ ∩ span(W) = W̃, by the typed-line construction.

    Preconditions: N self-dual at p, W a nondegenerate direct summand with
    2·rank(W) ≤ rank(N) - 3, and W̃ ⊂ W of index exactly p.  The fiber is
    computed as the neighbor lattices of the W-generic lines whose type
    subgroup matches the pair; ``shrink_set_bruteforce`` computes the same
    set by filtering all neighbors and exists as an independent check.
    """
    U = _shrink_preconditions(N, W, Wt, p, min_corank=3)
    lines = w_generic_lines(N, W, p, U, max_points)
    out = [lattice_from_line(N, line) for line in lines]
    return tuple(sorted(out, key=plattice_sort_key))


def shrink_set_bruteforce(
    N: QuadLattice,
    W: Sublattice,
    Wt: Sublattice,
    p: int,
    max_points: int = _MAX_PROJ_POINTS,
) -> tuple[PLattice, ...]:
    """The same fiber as :func:`shrink_set`, by exhaustive filtering.

    Enumerates every p-neighbor of N and keeps those whose intersection
    with span(W) equals W̃.  Independent of the typed-line route.
    """
    _shrink_preconditions(N, W, Wt, p, min_corank=3)
    out = []
    for Nt in enumerate_neighbors(N, p, max_points):
        T = sublattice_in_span(Nt.numerator_basis, W.basis)
        # Ñ ∩ span(W) = p^{-1}·T; compare against W̃ as integer lattices
        if lattices_equal(T, Wt.basis.scale(p)):
            out.append(Nt)
    return tuple(sorted(out, key=plattice_sort_key))


def recover_lattice(Nt: PLattice, W: Sublattice, max_points: int = _MAX_PROJ_POINTS) -> PLattice:
    """The unique p-neighbor L of Ñ with L ∩ span(W) = W.

    Preconditions: W is a direct summand of the ambient lattice and
    Ñ ∩ span(W) has index exactly p in W (in particular Ñ itself, whose
    intersection is all of W, is rejected).  Enumerates the neighbors of
    Ñ, filters on the intersection condition, and insists on exactly one
    survivor — any other count falsifies the uniqueness this package is
    built around and raises InvariantViolationError.
    """
    N, p = Nt.ambient, Nt.p
    if W.ambient != N:
        raise PreconditionError("sublattice belongs to a different lattice")
    from .exact_linalg import saturate

    _, summand = saturate(N.rank, W.basis)
    if not summand:
        raise PreconditionError("W is not a direct summand")
    T = sublattice_in_span(Nt.numerator_basis, W.basis)
    denom = Nt.scale_denominator()
    C = _integral_coefficients(W.basis.scale(denom), T)
    idx = quotient_structure(W.rank, C).order()
    if idx != p:
        raise PreconditionError(
            f"intersection with span(W) has index {idx} in W, expected {p}"
        )
    survivors = []
    for L in neighbors_of(Nt, max_points):
        TL = sublattice_in_span(L.numerator_basis, W.basis)
        if lattices_equal(TL, W.basis.scale(L.scale_denominator())):
            survivors.append(L)
    if len(survivors) != 1:
        raise InvariantViolationError(
            f"expected a unique recovery candidate, found {len(survivors)}"
        )
    return survivors[0]
