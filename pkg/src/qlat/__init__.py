"""Exact arithmetic for quadratic lattices over Z, F_p, and Z_p.

The package computes, with no floating point anywhere:

* integer linear algebra — Smith/Hermite normal forms, saturations,
  intersections, finite quotient structure (:mod:`qlat.exact_linalg`);
* quadratic lattices and their invariants — signatures, discriminant
  groups, orthogonal complements, standard lattices H, E8, and the K3
  lattice (:mod:`qlat.quad_lattice`);
* quadratic spaces over F_p — Witt decomposition, isotropic-line
  enumeration, reflection factorization, spinor norms, and constructive
  extension of subspace isometries (:mod:`qlat.fp_quadratic`);
* the p-neighbor correspondence between isotropic lines and self-dual
  lattices, with its typed refinement and unique-recovery guarantee
  (:mod:`qlat.padic_lattice`);
* index-p Hecke moves of polarized K3 lattices (:mod:`qlat.hecke_k3`);
* character-lattice kernels and cokernels of diagonalizable-group maps
  (:mod:`qlat.deformation_tori`).

Hot enumeration kernels run on a compiled backend when the optional
extension is built, with an equivalent pure-Python fallback
(``QLAT_PURE=1`` forces the fallback).  The ``qlat`` command exposes the
enumerations and the verification suites.
"""

from .errors import InvariantViolationError, PreconditionError, SizeGuardError
from .exact_linalg import (
    AbelianQuotient,
    IntMatrix,
    hermite_normal_form,
    hnf_basis,
    integer_kernel,
    lattice_intersection,
    lattices_equal,
    quotient_structure,
    saturate,
    smith_normal_form,
    sublattice_in_span,
    unimodular_inverse,
)
from .quad_lattice import (
    QuadLattice,
    Sublattice,
    bilinear_value,
    direct_sum,
    discriminant_group,
    e8_lattice,
    hyperbolic_plane,
    is_self_dual_at,
    k3_lattice,
    orthogonal_complement,
    quad_value,
    rank_one,
    rescale,
    restricted_lattice,
    signature,
    standard_lattice,
    sublattice_gram,
)
from .fp_quadratic import (
    FpIsometry,
    FpQuadSpace,
    ProjLine,
    dickson_invariant,
    eichler_transvection,
    enumerate_isotropic_lines,
    find_isotropic_vector,
    line_sort_key,
    radicals,
    reflection,
    reflection_factorization,
    so_order,
    spinor_norm,
    stabilizer_orbit,
    witt_decomposition,
    witt_extension,
)
from .padic_lattice import (
    LambdaSplitting,
    PLattice,
    default_precision,
    enumerate_neighbors,
    hensel_lift_line,
    lattice_from_line,
    line_from_lattice,
    neighbors_of,
    plattice_gram,
    plattice_quadlattice,
    plattice_sort_key,
    recover_lattice,
    reduction,
    shrink_set,
    shrink_set_bruteforce,
    splitting_from_line,
    w_generic_lines,
)
from .hecke_k3 import (
    MinimalPair,
    PolarizedK3Lattice,
    enumerate_index_p_sublattices,
    grow_unique,
    k3_isogeny,
    shrink_fiber,
)
from .deformation_tori import (
    CharLattice,
    DiagGroupKernel,
    cokernel_M,
    qisog_kernel_char,
    serre_tate_torus,
    tgm_kernel,
)
from .verify import SUITES, VerifyReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "AbelianQuotient",
    "CharLattice",
    "DiagGroupKernel",
    "FpIsometry",
    "FpQuadSpace",
    "IntMatrix",
    "InvariantViolationError",
    "LambdaSplitting",
    "MinimalPair",
    "PLattice",
    "PolarizedK3Lattice",
    "PreconditionError",
    "ProjLine",
    "QuadLattice",
    "SizeGuardError",
    "Sublattice",
    "SUITES",
    "VerifyReport",
    "bilinear_value",
    "cokernel_M",
    "default_precision",
    "dickson_invariant",
    "direct_sum",
    "discriminant_group",
    "e8_lattice",
    "eichler_transvection",
    "enumerate_index_p_sublattices",
    "enumerate_isotropic_lines",
    "enumerate_neighbors",
    "find_isotropic_vector",
    "grow_unique",
    "hensel_lift_line",
    "hermite_normal_form",
    "hnf_basis",
    "hyperbolic_plane",
    "integer_kernel",
    "is_self_dual_at",
    "k3_isogeny",
    "k3_lattice",
    "lattice_from_line",
    "line_sort_key",
    "lattice_intersection",
    "lattices_equal",
    "line_from_lattice",
    "neighbors_of",
    "orthogonal_complement",
    "qisog_kernel_char",
    "quad_value",
    "quotient_structure",
    "radicals",
    "rank_one",
    "recover_lattice",
    "reduction",
    "reflection",
    "reflection_factorization",
    "rescale",
    "restricted_lattice",
    "run_suite",
    "saturate",
    "serre_tate_torus",
    "shrink_fiber",
    "shrink_set",
    "shrink_set_bruteforce",
    "signature",
    "smith_normal_form",
    "so_order",
    "spinor_norm",
    "splitting_from_line",
    "stabilizer_orbit",
    "standard_lattice",
    "sublattice_gram",
    "sublattice_in_span",
    "tgm_kernel",
    "unimodular_inverse",
    "w_generic_lines",
    "witt_decomposition",
    "witt_extension",
    "__version__",
]
