"""Polarized K3 lattices and prime-degree polarization change.

The central construction: inside the rank-22 lattice H³ ⊕ E8², fix the
first hyperbolic plane with basis (e, f) and the degree-d polarization
class ξ = e + d·f (so Q(ξ) = d).  Rescaling that plane by
(e, f) ↦ (p·e, p⁻¹·f) is an isometry of quadratic spaces over Q that
preserves the lattice's Gram matrix — the rescaled basis is again a basis
of an abstract copy of the same lattice — but moves the polarization class
to ξ' = p(e + d·f), which in the rescaled basis has coordinates
(1, p²·d, 0, ..., 0) and degree Q(ξ') = p²·d.

Around this sit the finite-index machinery (index-p sublattice
enumeration as minimal pairs) and the fiber/uniqueness constructions that
transport a shrunk sublattice pair through the p-neighbor correspondence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvariantViolationError, PreconditionError, SizeGuardError
from .exact_linalg import (
    IntMatrix,
    hnf_basis,
    lattices_equal,
    quotient_structure,
    saturate,
    sublattice_in_span,
)
from .padic_lattice import (
    PLattice,
    _integral_coefficients,
    neighbors_of,
    shrink_set,
)
from .quad_lattice import (
    QuadLattice,
    Sublattice,
    bilinear_value,
    k3_lattice,
    quad_value,
    signature,
)

__all__ = [
    "MinimalPair",
    "PolarizedK3Lattice",
    "enumerate_index_p_sublattices",
    "k3_isogeny",
    "shrink_fiber",
    "grow_unique",
]


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


@dataclass(frozen=True)
class MinimalPair:
    """A positive-definite lattice Λ with a sublattice Λ̃ of prime index.

    ``tilde_basis`` holds the Λ-coordinates of a basis of Λ̃ (columns).
    """

    lattice: QuadLattice
    tilde_basis: IntMatrix

    def __post_init__(self) -> None:
        r = self.lattice.rank
        if not isinstance(self.tilde_basis, IntMatrix):
            object.__setattr__(self, "tilde_basis", IntMatrix.from_rows(self.tilde_basis))
        tb = self.tilde_basis
        if tb.rows != r or tb.cols != r:
            raise PreconditionError("index sublattice basis must be square of full rank")
        pos, neg = signature(self.lattice)
        if neg != 0 or pos != r:
            raise PreconditionError("lattice of a minimal pair must be positive definite")
        q = quotient_structure(r, tb)
        if not q.is_finite or len(q.torsion) != 1 or not _is_prime(q.torsion[0]):
            raise PreconditionError("sublattice index must be a single prime")

    @property
    def index(self) -> int:
        """The prime index [Λ : Λ̃]."""
        return quotient_structure(self.lattice.rank, self.tilde_basis).order()


@dataclass(frozen=True)
class PolarizedK3Lattice:
    """The even unimodular rank-22 lattice with a primitive class ξ, Q(ξ) > 0."""

    lattice: QuadLattice
    xi: tuple[int, ...]

    def __post_init__(self) -> None:
        xi = tuple(int(x) for x in self.xi)
        object.__setattr__(self, "xi", xi)
        if self.lattice.rank != 22:
            raise PreconditionError("polarized lattice must have rank 22")
        if abs(self.lattice.gram().det()) != 1:
            raise PreconditionError("polarized lattice must be unimodular")
        if len(xi) != 22:
            raise PreconditionError("polarization class has wrong length")
        if math.gcd(*xi) != 1:
            raise PreconditionError("polarization class must be primitive")
        if quad_value(self.lattice, xi) <= 0:
            raise PreconditionError("polarization degree must be positive")

    @property
    def degree(self) -> int:
        return quad_value(self.lattice, self.xi)


def enumerate_index_p_sublattices(
    L: QuadLattice, p: int, max_count: int = 10**6
) -> tuple[MinimalPair, ...]:
    """All minimal pairs of L at p: one per nonzero functional L → F_p up
    to scaling, so (p^r - 1)/(p - 1) of them, in a deterministic order
    with canonical (column-HNF) bases.
    """
    r = L.rank
    pos, neg = signature(L)
    if neg != 0 or pos != r:
        raise PreconditionError("index-p enumeration expects a positive-definite lattice")
    if not _is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    count = (p**r - 1) // (p - 1)
    if count > max_count:
        raise SizeGuardError(f"{count} sublattices exceeds the guard {max_count}")
    out = []
    for rep in _proj_reps(p, r):
        idx = next(i for i, x in enumerate(rep) if x)
        inv = pow(rep[idx], -1, p)
        cols = []
        for i in range(r):
            if i == idx:
                continue
            e = [0] * r
            e[i] = 1
            e[idx] = (-rep[i] * inv) % p
            cols.append(tuple(e))
        K = IntMatrix.from_columns(cols, rows=r)
        basis = hnf_basis(K.hstack(IntMatrix.identity(r).scale(p)))
        out.append(MinimalPair(L, basis))
    return tuple(out)


def _proj_reps(p: int, n: int):
    from itertools import product

    for lead in range(n):
        for tail in product(range(p), repeat=n - lead - 1):
            yield (0,) * lead + (1,) + tail


def k3_isogeny(d: int, p: int) -> PolarizedK3Lattice:
    """Change a degree-d K3 polarization into a degree p²·d one.

    Returns the K3 lattice together with ξ' = (1, p²d, 0, ..., 0), the
    image of ξ = e + d·f under the plane rescaling (e, f) ↦ (pe, p⁻¹f)
    expressed in the rescaled basis.  The rescaled basis has the same Gram
    matrix, which is why the output lattice is again the standard one; the
    class ξ' is primitive with Q(ξ') = p²d, and its orthogonal complement
    has discriminant group Z/2p²d.
    """
    if d < 1:
        raise PreconditionError("polarization degree must be positive")
    if not _is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    L = k3_lattice()
    xi = (1, p * p * d) + (0,) * (L.rank - 2)
    return PolarizedK3Lattice(L, xi)


def shrink_fiber(
    N: QuadLattice,
    embedding: IntMatrix,
    pair: MinimalPair,
    max_points: int = 10**7,
) -> tuple[PLattice, ...]:
    """Neighbors of N whose intersection with span(Λ) is the shrunk Λ̃.

    ``embedding`` columns give an isometric embedding of the pair's
    lattice Λ onto a direct summand of N, with
    rank(Λ) ≤ (rank(N) - 4)/2; the neighbor prime is the pair's index.
    Delegates the fiber computation to the typed-line construction.
    """
    if not isinstance(embedding, IntMatrix):
        embedding = IntMatrix.from_rows(embedding)
    lam = pair.lattice
    p = pair.index
    r = lam.rank
    if embedding.rows != N.rank or embedding.cols != r:
        raise PreconditionError("embedding matrix has wrong shape")
    cols = embedding.columns()
    for i in range(r):
        if quad_value(N, cols[i]) != lam.half_gram.entries[i][i]:
            raise PreconditionError("embedding does not preserve the quadratic form")
        for j in range(i + 1, r):
            if bilinear_value(N, cols[i], cols[j]) != lam.gram().entries[i][j]:
                raise PreconditionError("embedding does not preserve the bilinear form")
    _, summand = saturate(N.rank, embedding)
    if not summand:
        raise PreconditionError("embedding image is not a direct summand")
    if 2 * r > N.rank - 4:
        raise PreconditionError("pair rank too large for the ambient lattice")
    W = Sublattice(N, embedding)
    Wt = Sublattice(N, embedding @ pair.tilde_basis)
    return shrink_set(N, W, Wt, p, max_points)


def grow_unique(
    Nt: PLattice, tilde_embedding: IntMatrix, max_points: int = 10**7
) -> PLattice:
    """The unique neighbor of Ñ meeting span(Λ̃) in an index-p enlargement.

    ``tilde_embedding`` embeds Λ̃ onto a direct summand of Ñ (ambient
    integer coordinates).  Candidate enlargements W' are the index-p
    superlattices of W̃ = image(Λ̃) inside its rational span — one for each
    line of W̃/pW̃, not necessarily integral — and the neighbors L of Ñ
    are filtered on L ∩ span = W'.  Exactly one (L, W') pair may survive;
    any other count raises InvariantViolationError.
    """
    if not isinstance(tilde_embedding, IntMatrix):
        tilde_embedding = IntMatrix.from_rows(tilde_embedding)
    N, p = Nt.ambient, Nt.p
    n = N.rank
    if tilde_embedding.rows != n:
        raise PreconditionError("embedding matrix has wrong ambient dimension")
    rt = tilde_embedding.cols
    if rt == 0:
        raise PreconditionError("embedded sublattice must be nonzero")
    if 2 * rt > n - 4:
        raise PreconditionError("embedded rank too large for the ambient lattice")
    Wt = hnf_basis(tilde_embedding)
    if Wt.cols != rt:
        raise PreconditionError("embedding columns are dependent")
    denom = Nt.scale_denominator()
    # membership and direct-summand check inside Ñ
    coeffs = _integral_coefficients(Nt.numerator_basis, Wt.scale(denom))
    _, summand = saturate(n, coeffs)
    if not summand:
        raise PreconditionError("embedded sublattice is not a direct summand")
    # the intersection of Ñ with the rational span must be exactly W̃
    T = sublattice_in_span(Nt.numerator_basis, Wt)
    if not lattices_equal(T, Wt.scale(denom)):
        raise PreconditionError("lattice does not meet the span in the embedded sublattice")
    candidates = []
    for rep in _proj_reps(p, rt):
        x = Wt.mul_vector(rep)
        cand = hnf_basis(Wt.scale(p).hstack(IntMatrix.from_columns([x])))
        candidates.append(cand)  # W' = p^{-1} · (column span of cand)
    survivors = []
    for L in neighbors_of(Nt, max_points):
        TL = sublattice_in_span(L.numerator_basis, Wt)
        dL = L.scale_denominator()
        for cand in candidates:
            # L ∩ span = p^{-pow}·TL and W' = p^{-1}·cand
            if lattices_equal(TL.scale(p), cand.scale(dL)):
                survivors.append(L)
                break
    if len(survivors) != 1:
        raise InvariantViolationError(
            f"expected a unique enlargement, found {len(survivors)}"
        )
    return survivors[0]
