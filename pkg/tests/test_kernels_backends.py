"""The compiled and pure-Python enumeration kernels must agree exactly."""

import pytest

from qlat import _kernels_py as pure
from qlat import kernels

compiled = pytest.importorskip("qlat._speedups")

BACKENDS = [pure, compiled]
IDS = ["pure", "compiled"]

H = ((0, 1), (0, 0))
H2 = ((0, 1, 0, 0), (0, 0, 0, 0), (0, 0, 0, 1), (0, 0, 0, 0))
CONIC = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
ANISO2 = ((1, 1), (0, 1))  # x^2 + xy + y^2, anisotropic over F_2


def test_facade_exposes_a_backend():
    assert kernels.backend_name() in {"compiled", "pure-python"}
    assert kernels.isotropic_lines(2, 2, H, 10**6) == pure.isotropic_lines(2, 2, H, 10**6)


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
@pytest.mark.parametrize(
    "p,n,half_gram,count",
    [
        (2, 2, H, 2),
        (3, 2, H, 2),
        (5, 2, H, 2),
        (2, 4, H2, 9),       # (p+1)^2
        (3, 4, H2, 16),
        (3, 3, CONIC, 4),
        (2, 2, ANISO2, 0),
    ],
)
def test_isotropic_line_counts(impl, p, n, half_gram, count):
    lines = impl.isotropic_lines(p, n, half_gram, 10**6)
    assert len(lines) == count


@pytest.mark.parametrize(
    "p,n,half_gram",
    [(2, 2, H), (3, 2, H), (5, 2, H), (2, 4, H2), (3, 4, H2), (3, 3, CONIC)],
)
def test_isotropic_lines_identical(p, n, half_gram):
    assert pure.isotropic_lines(p, n, half_gram, 10**6) == compiled.isotropic_lines(
        p, n, half_gram, 10**6
    )


def test_isotropic_lines_sorted_lead_first():
    lines = compiled.isotropic_lines(2, 2, H, 10**6)
    assert lines == [(1, 0), (0, 1)]


@pytest.mark.parametrize(
    "p,k,n,half_gram",
    [(2, 2, 2, H), (3, 2, 2, H), (2, 2, 3, CONIC), (3, 2, 3, CONIC), (5, 2, 2, H)],
)
def test_quadric_points_identical(p, k, n, half_gram):
    assert pure.quadric_points_mod(p, k, n, half_gram, 10**7) == compiled.quadric_points_mod(
        p, k, n, half_gram, 10**7
    )


def test_quadric_points_on_plane_mod_four():
    pts = compiled.quadric_points_mod(2, 2, 2, H, 10**6)
    # all normalized (head ≡ 0 mod 2 before the leading 1) with xy ≡ 0 mod 4
    assert all(v[0] % 4 in (0, 1, 2) for v in pts)
    assert all((v[0] * v[1]) % 4 == 0 for v in pts)
    assert pts == sorted(pts, key=pure.proj_key)


@pytest.mark.parametrize(
    "gens,p",
    [
        ([((0, 1), (1, 0))], 2),
        ([((0, 1), (1, 0)), ((2, 0), (0, 2))], 3),
        ([((1, 1), (0, 1)), ((1, 0), (1, 1))], 3),  # generates SL_2(F_3), order 24
    ],
)
def test_group_closure_identical(gens, p):
    a = pure.group_closure(gens, p, 10**6)
    b = compiled.group_closure(gens, p, 10**6)
    assert a == b
    ident = tuple(tuple(1 if i == j else 0 for j in range(len(gens[0]))) for i in range(len(gens[0])))
    assert a[0] == ident


def test_group_closure_order_sl2_f3():
    gens = [((1, 1), (0, 1)), ((1, 0), (1, 1))]
    assert len(pure.group_closure(gens, 3, 10**6)) == 24


@pytest.mark.parametrize("p,seed", [(3, (1, 0)), (3, (1, 1)), (5, (0, 1))])
def test_line_orbit_identical(p, seed):
    gens = [((1, 1), (0, 1)), ((1, 0), (1, 1))]
    a = pure.line_orbit(gens, seed, p, 10**6)
    b = compiled.line_orbit(gens, seed, p, 10**6)
    assert a == b
    assert a == sorted(a, key=pure.proj_key)
    assert len(a) == p + 1  # SL_2 is transitive on the projective line


@pytest.mark.parametrize(
    "p,n,half_gram,full,special",
    [
        (2, 2, H, 2, 1),
        (3, 2, H, 4, 2),
        (2, 4, H2, 72, 36),
        (3, 3, CONIC, 48, 24),
    ],
)
def test_brute_isometry_counts(p, n, half_gram, full, special):
    for impl in BACKENDS:
        assert impl.brute_isometry_count(p, n, half_gram, False, 10**7) == full
        assert impl.brute_isometry_count(p, n, half_gram, True, 10**7) == special


def test_brute_isometry_large_case_needs_bigger_limit():
    for impl in BACKENDS:
        with pytest.raises(ValueError):
            impl.brute_isometry_count(3, 4, H2, False, 10**6)  # 3^16 > 10^6
    assert compiled.brute_isometry_count(3, 4, H2, False, 10**8) == 1152
    assert compiled.brute_isometry_count(3, 4, H2, True, 10**8) == 576


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_size_guards_raise(impl):
    with pytest.raises(ValueError):
        impl.isotropic_lines(5, 12, tuple(tuple(0 for _ in range(12)) for _ in range(12)), 10**3)
    with pytest.raises(ValueError):
        impl.quadric_points_mod(5, 3, 4, ((0,) * 4,) * 4, 10**3)
    with pytest.raises(ValueError):
        impl.group_closure([((1, 1), (0, 1)), ((1, 0), (1, 1))], 13, 100)
