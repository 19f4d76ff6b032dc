"""Exact integer linear algebra.

Everything here runs over arbitrary-precision integers (and Fractions
internally where division is unavoidable), so results are exact: Smith and
Hermite normal forms with their unimodular transforms, integer kernels,
quotient structure of Z^n by a generating set, saturation, and lattice
intersection.

Conventions
-----------
* Matrices are immutable, row-major :class:`IntMatrix` values.
* Lattices and subgroups of Z^n are presented by the *columns* of a matrix.
* The Hermite normal form used throughout is column-style: ``M @ T == H``
  with ``T`` unimodular, pivots positive, entries to the left of a pivot
  reduced into ``[0, pivot)``, zero columns trailing.  Two column spans are
  equal iff their ``hnf_basis`` matrices are equal, which is the canonical
  equality test used by the rest of the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PreconditionError

__all__ = [
    "IntMatrix",
    "AbelianQuotient",
    "smith_normal_form",
    "hermite_normal_form",
    "hnf_basis",
    "lattices_equal",
    "integer_kernel",
    "unimodular_inverse",
    "quotient_structure",
    "saturate",
    "lattice_intersection",
    "sublattice_in_span",
]


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix (row-major tuple of row tuples)."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not isinstance(self.entries, tuple):
            object.__setattr__(self, "entries", tuple(tuple(r) for r in self.entries))
        width = {len(r) for r in self.entries}
        if len(width) > 1:
            raise PreconditionError("ragged rows in matrix")
        for row in self.entries:
            for x in row:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise PreconditionError(f"non-integer entry {x!r}")

    # -- construction -------------------------------------------------

    @staticmethod
    def from_rows(rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return IntMatrix(tuple(tuple(int(x) for x in r) for r in rows))

    @staticmethod
    def from_columns(cols: Iterable[Iterable[int]], rows: int | None = None) -> "IntMatrix":
        cols = [tuple(int(x) for x in c) for c in cols]
        if not cols:
            if rows is None:
                raise PreconditionError("row count required for a matrix with no columns")
            return IntMatrix.zero(rows, 0)
        n = len(cols[0])
        if any(len(c) != n for c in cols):
            raise PreconditionError("ragged columns")
        return IntMatrix(tuple(tuple(c[i] for c in cols) for i in range(n)))

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @staticmethod
    def zero(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    # -- shape and access ---------------------------------------------

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def take_columns(self, indices: Sequence[int]) -> "IntMatrix":
        return IntMatrix(tuple(tuple(r[j] for j in indices) for r in self.entries))

    def take_rows(self, indices: Sequence[int]) -> "IntMatrix":
        return IntMatrix(tuple(self.entries[i] for i in indices))

    # -- arithmetic ----------------------------------------------------

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.entries)) if self.entries else ())

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise PreconditionError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ot = list(zip(*other.entries)) if other.entries else []
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in ot)
                for row in self.entries
            )
        )

    def mul_vector(self, v: Sequence[int]) -> tuple[int, ...]:
        if self.cols != len(v):
            raise PreconditionError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(c * x for x in r) for r in self.entries))

    def neg(self) -> "IntMatrix":
        return self.scale(-1)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise PreconditionError("row count mismatch in hstack")
        return IntMatrix(tuple(a + b for a, b in zip(self.entries, other.entries)))

    def is_upper_triangular(self) -> bool:
        return all(self.entries[i][j] == 0 for i in range(self.rows) for j in range(min(i, self.cols)))

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        n = self.rows
        if n != self.cols:
            raise PreconditionError("determinant of a non-square matrix")
        if n == 0:
            return 1
        a = [list(r) for r in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def rank(self) -> int:
        _, D, _ = smith_normal_form(self)
        return sum(1 for i in range(min(D.rows, D.cols)) if D.entries[i][i] != 0)


@dataclass(frozen=True)
class AbelianQuotient:
    """Isomorphism type of a finitely generated abelian group.

    ``free_rank`` copies of Z plus cyclic factors Z/d for each d in
    ``torsion`` (each d > 1, ascending divisibility chain d1 | d2 | ...).
    """

    free_rank: int
    torsion: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise PreconditionError("negative free rank")
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        for d in self.torsion:
            if d <= 1:
                raise PreconditionError("torsion entries must exceed 1")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise PreconditionError("torsion must form a divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int:
        if not self.is_finite:
            raise PreconditionError("infinite group has no order")
        return math.prod(self.torsion) if self.torsion else 1


# ---------------------------------------------------------------------------
# elementary row/column operations with transform tracking
# ---------------------------------------------------------------------------


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _swap_rows(A: list[list[int]], U: list[list[int]], i: int, j: int) -> None:
    A[i], A[j] = A[j], A[i]
    U[i], U[j] = U[j], U[i]


def _add_row(A: list[list[int]], U: list[list[int]], i: int, j: int, c: int) -> None:
    # row_i += c * row_j
    Ai, Aj = A[i], A[j]
    for k in range(len(Ai)):
        Ai[k] += c * Aj[k]
    Ui, Uj = U[i], U[j]
    for k in range(len(Ui)):
        Ui[k] += c * Uj[k]


def _negate_row(A: list[list[int]], U: list[list[int]], i: int) -> None:
    A[i] = [-x for x in A[i]]
    U[i] = [-x for x in U[i]]


def _two_row_transform(
    A: list[list[int]], U: list[list[int]], i: int, j: int, a: int, b: int, c: int, d: int
) -> None:
    # (row_i, row_j) <- (a*row_i + b*row_j, c*row_i + d*row_j); ad - bc = +-1
    for M in (A, U):
        ri, rj = M[i], M[j]
        M[i] = [a * x + b * y for x, y in zip(ri, rj)]
        M[j] = [c * x + d * y for x, y in zip(ri, rj)]


def _swap_cols(A: list[list[int]], V: list[list[int]], i: int, j: int) -> None:
    for M in (A, V):
        for row in M:
            row[i], row[j] = row[j], row[i]


def _add_col(A: list[list[int]], V: list[list[int]], i: int, j: int, c: int) -> None:
    # col_i += c * col_j
    for M in (A, V):
        for row in M:
            row[i] += c * row[j]


def _two_col_transform(
    A: list[list[int]], V: list[list[int]], i: int, j: int, a: int, b: int, c: int, d: int
) -> None:
    # (col_i, col_j) <- (a*col_i + b*col_j, c*col_i + d*col_j)
    for M in (A, V):
        for row in M:
            x, y = row[i], row[j]
            row[i] = a * x + b * y
            row[j] = c * x + d * y


def _ident_list(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# normal forms
# ---------------------------------------------------------------------------


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form with transforms: returns (U, D, V), U @ M @ V == D.

    U and V are unimodular; D is diagonal with non-negative entries forming
    a divisibility chain d1 | d2 | ... (zeros trailing).
    """
    n, m = M.rows, M.cols
    A = [list(r) for r in M.entries]
    U = _ident_list(n)
    V = _ident_list(m)
    t = 0
    while t < min(n, m):
        # locate a pivot of minimal absolute value in the trailing block
        piv = None
        best = None
        for i in range(t, n):
            for j in range(t, m):
                x = A[i][j]
                if x != 0 and (best is None or abs(x) < best):
                    piv, best = (i, j), abs(x)
        if piv is None:
            break
        _swap_rows(A, U, t, piv[0])
        _swap_cols(A, V, t, piv[1])
        while True:
            for i in range(t + 1, n):
                x = A[i][t]
                if x == 0:
                    continue
                d = A[t][t]
                if x % d == 0:
                    _add_row(A, U, i, t, -(x // d))
                else:
                    g, s, u = _xgcd(d, x)
                    _two_row_transform(A, U, t, i, s, u, -(x // g), d // g)
            for j in range(t + 1, m):
                x = A[t][j]
                if x == 0:
                    continue
                d = A[t][t]
                if x % d == 0:
                    _add_col(A, V, j, t, -(x // d))
                else:
                    g, s, u = _xgcd(d, x)
                    _two_col_transform(A, V, t, j, s, u, -(x // g), d // g)
            if any(A[i][t] != 0 for i in range(t + 1, n)):
                continue  # column transforms re-dirtied the pivot column
            d = A[t][t]
            offender = None
            for i in range(t + 1, n):
                if any(A[i][j] % d != 0 for j in range(t + 1, m)):
                    offender = i
                    break
            if offender is None:
                break
            _add_row(A, U, t, offender, 1)
        if A[t][t] < 0:
            _negate_row(A, U, t)
        t += 1
    return (
        IntMatrix.from_rows(U),
        IntMatrix.from_rows(A),
        IntMatrix.from_rows(V),
    )


def _row_hnf(M: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form: returns (H, U) with U @ M == H."""
    n, m = M.rows, M.cols
    A = [list(r) for r in M.entries]
    U = _ident_list(n)
    pivot_row = 0
    for col in range(m):
        if pivot_row == n:
            break
        nz = [i for i in range(pivot_row, n) if A[i][col] != 0]
        if not nz:
            continue
        _swap_rows(A, U, pivot_row, nz[0])
        for i in range(pivot_row + 1, n):
            while A[i][col] != 0:
                d, x = A[pivot_row][col], A[i][col]
                if x % d == 0:
                    _add_row(A, U, i, pivot_row, -(x // d))
                else:
                    g, s, u = _xgcd(d, x)
                    _two_row_transform(A, U, pivot_row, i, s, u, -(x // g), d // g)
        if A[pivot_row][col] < 0:
            _negate_row(A, U, pivot_row)
        d = A[pivot_row][col]
        for i in range(pivot_row):
            q = A[i][col] // d  # floor division reduces into [0, d)
            if q:
                _add_row(A, U, i, pivot_row, -q)
        pivot_row += 1
    return IntMatrix.from_rows(A), IntMatrix.from_rows(U)


def hermite_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Column-style Hermite normal form: returns (H, T) with M @ T == H.

    T is unimodular.  H is the canonical column form: each nonzero column
    has a positive pivot, entries to the left of a pivot in its row lie in
    ``[0, pivot)``, and zero columns come last.
    """
    if M.cols == 0:
        return M, IntMatrix.identity(0)
    Hr, Ur = _row_hnf(M.transpose())
    # transposing an r x n matrix with r > 0 preserves the column count
    H = IntMatrix.from_columns(list(Hr.entries), rows=M.rows)
    return H, Ur.transpose()


def hnf_basis(M: IntMatrix) -> IntMatrix:
    """Canonical basis of the column span of M (nonzero HNF columns).

    Equal column spans produce equal results, so this is the lattice
    equality normal form.
    """
    H, _ = hermite_normal_form(M)
    keep = [j for j in range(H.cols) if any(H.entries[i][j] != 0 for i in range(H.rows))]
    return H.take_columns(keep)


def lattices_equal(A: IntMatrix, B: IntMatrix) -> bool:
    """True iff the columns of A and B span the same subgroup of Z^n."""
    if A.rows != B.rows:
        return False
    return hnf_basis(A) == hnf_basis(B)


def integer_kernel(M: IntMatrix) -> IntMatrix:
    """Basis of {x in Z^m : M @ x == 0} (a saturated subgroup of Z^m)."""
    _, D, V = smith_normal_form(M)
    r = sum(1 for i in range(min(D.rows, D.cols)) if D.entries[i][i] != 0)
    return V.take_columns(range(r, M.cols))


def unimodular_inverse(M: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular integer matrix."""
    n = M.rows
    if n != M.cols:
        raise PreconditionError("inverse of a non-square matrix")
    a = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
         for i, row in enumerate(M.entries)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise PreconditionError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    out = []
    for i in range(n):
        row = []
        for j in range(n, 2 * n):
            v = a[i][j]
            if v.denominator != 1:
                raise PreconditionError("matrix is not unimodular")
            row.append(int(v))
        out.append(row)
    return IntMatrix.from_rows(out)


# ---------------------------------------------------------------------------
# quotients, saturation, intersection
# ---------------------------------------------------------------------------


def quotient_structure(ambient_rank: int, gens: IntMatrix) -> AbelianQuotient:
    """Isomorphism type of Z^ambient_rank / (column span of gens)."""
    if gens.rows != ambient_rank:
        raise PreconditionError(
            f"generators live in Z^{gens.rows}, expected Z^{ambient_rank}"
        )
    if gens.cols == 0:
        return AbelianQuotient(ambient_rank, ())
    _, D, _ = smith_normal_form(gens)
    divisors = [D.entries[i][i] for i in range(min(D.rows, D.cols)) if D.entries[i][i] != 0]
    free = ambient_rank - len(divisors)
    torsion = tuple(d for d in divisors if d > 1)
    return AbelianQuotient(free, torsion)


def saturate(ambient_rank: int, gens: IntMatrix) -> tuple[IntMatrix, bool]:
    """Saturation of the column span inside Z^ambient_rank.

    Returns ``(basis, is_direct_summand)`` where ``basis`` is the canonical
    (HNF) basis of ``(span ⊗ Q) ∩ Z^n`` and ``is_direct_summand`` is True
    iff the span already equals its saturation (all nonzero elementary
    divisors are 1).
    """
    if gens.rows != ambient_rank:
        raise PreconditionError("ambient rank mismatch")
    if gens.cols == 0:
        return IntMatrix.zero(ambient_rank, 0), True
    U, D, _ = smith_normal_form(gens)
    divisors = [D.entries[i][i] for i in range(min(D.rows, D.cols)) if D.entries[i][i] != 0]
    r = len(divisors)
    Uinv = unimodular_inverse(U)
    basis = hnf_basis(Uinv.take_columns(range(r)))
    return basis, all(d == 1 for d in divisors)


def lattice_intersection(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    """Canonical basis of (column span of A) ∩ (column span of B) in Z^n.

    Both inputs must have full column rank.  The intersection of two
    subgroups of Z^n presented this way is again free; the result may have
    fewer columns (down to zero) than either input.
    """
    if A.rows != B.rows:
        raise PreconditionError("ambient dimension mismatch")
    for name, M in (("first", A), ("second", B)):
        if M.cols and M.rank() != M.cols:
            raise PreconditionError(f"{name} basis matrix does not have full column rank")
    if A.cols == 0 or B.cols == 0:
        return IntMatrix.zero(A.rows, 0)
    C = A.hstack(B.neg())
    K = integer_kernel(C)
    X = K.take_rows(range(A.cols))
    return hnf_basis(A @ X)


def sublattice_in_span(basis: IntMatrix, span_gens: IntMatrix) -> IntMatrix:
    """Canonical basis of {x in span_Z(basis) : x in span_Q(span_gens)}.

    ``basis`` must have full column rank.  The rational span of
    ``span_gens`` is cut out by its integral annihilator, so the result is
    exact.
    """
    if basis.rows != span_gens.rows:
        raise PreconditionError("ambient dimension mismatch")
    if basis.cols and basis.rank() != basis.cols:
        raise PreconditionError("basis matrix does not have full column rank")
    if span_gens.cols == 0:
        return IntMatrix.zero(basis.rows, 0)
    ann = integer_kernel(span_gens.transpose())  # covectors vanishing on the span
    if ann.cols == 0:
        return hnf_basis(basis)
    K = integer_kernel(ann.transpose() @ basis)
    return hnf_basis(basis @ K)
