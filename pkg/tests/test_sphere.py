"""Core geometry: normalization, projection, lift, angles, conformality.

Frozen literals in this file were produced by tests/_oracle.py (mpmath at
40 digits) and are compared against the float64 implementation with a few
ulp of slack.
"""

import math

import numpy as np
import pytest

from stereochain import (
    DEFAULT_TOLERANCES,
    NormOverflowError,
    PoleBandError,
    PoleProximityError,
    PoleRayError,
    SpherePoint,
    ToleranceConfig,
    ZeroVectorError,
    angle_between,
    as_vector,
    conformality_check,
    inverse_conformality_check,
    normalize,
    stereo_lift,
    stereo_project,
    tangent_basis,
)

from _oracle import as_floats, o_lift, o_normalize, o_project

RT = 1e-15  # relative slack for frozen oracle literals, a few ulp

NORM_111 = 0.5773502691896257
PROJ_NORM_111 = 1.3660254037844386
LIFT_34 = (0.23076923076923078, 0.3076923076923077, 0.9230769230769231)
SCALE_NORM_111 = 2.366025403784439
INV_SCALE_34 = 0.07692307692307693


def test_as_vector_accepts_sequences():
    v = as_vector([1, 2, 3])
    assert v.dtype == np.float64
    assert v.shape == (3,)


@pytest.mark.parametrize("bad", [[[1.0, 2.0]], [], [1.0, np.nan], [1.0, np.inf]])
def test_as_vector_rejects(bad):
    with pytest.raises(ValueError):
        as_vector(bad)


def test_tolerance_config_defaults():
    tol = ToleranceConfig()
    assert tol.eps_unit == 1e-12
    assert tol.eps_pole == 1e-12
    assert tol.eps_zero == 1e-300
    assert tol.fd_step == 1e-6
    assert tol == DEFAULT_TOLERANCES


@pytest.mark.parametrize("field", ["eps_unit", "eps_pole", "eps_zero", "fd_step"])
def test_tolerance_config_rejects_nonpositive(field):
    with pytest.raises(ValueError):
        ToleranceConfig(**{field: 0.0})


def test_sphere_point_validates_unit_norm():
    p = SpherePoint([0.0, 0.0, -1.0])
    assert p.ambient_dim == 3
    with pytest.raises(ValueError):
        SpherePoint([0.5, 0.5, 0.5])
    with pytest.raises(ValueError):
        SpherePoint([1.0])


def test_sphere_point_rejects_pole_band():
    with pytest.raises(PoleBandError):
        SpherePoint([0.0, 0.0, 1.0])
    with pytest.raises(PoleBandError):
        SpherePoint([1e-7, 0.0, math.sqrt(1.0 - 1e-14)])


def test_sphere_point_coords_are_read_only():
    p = SpherePoint([1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        p.coords[0] = 2.0


def test_normalize_frozen_value():
    p = normalize([1.0, 1.0, 1.0])
    assert np.allclose(p.coords, NORM_111, rtol=RT, atol=0.0)


def test_normalize_idempotent():
    rng = np.random.default_rng(7)
    for _ in range(200):
        v = rng.normal(size=rng.integers(2, 9))
        if abs(v[-1]) / np.linalg.norm(v) > 0.99:
            continue
        once = normalize(v).coords
        twice = normalize(once).coords
        assert np.max(np.abs(twice - once)) <= 1e-15


def test_normalize_errors():
    with pytest.raises(ZeroVectorError):
        normalize([0.0, 0.0, 0.0])
    with pytest.raises(PoleRayError):
        normalize([0.0, 0.0, 5.0])
    with pytest.raises(NormOverflowError):
        normalize([1e300, 1e300])


def test_normalize_scale_invariant():
    rng = np.random.default_rng(11)
    for _ in range(100):
        v = rng.normal(size=4)
        if v[-1] / np.linalg.norm(v) > 0.9:
            continue
        a = normalize(v).coords
        b = normalize(1e6 * v).coords
        assert np.max(np.abs(a - b)) <= 1e-15


def test_project_frozen_value():
    p = normalize([1.0, 1.0, 1.0])
    out = stereo_project(p)
    assert out.shape == (2,)
    assert np.allclose(out, PROJ_NORM_111, rtol=RT, atol=0.0)


def test_lift_frozen_value():
    p = stereo_lift([3.0, 4.0])
    assert np.allclose(p.coords, LIFT_34, rtol=RT, atol=0.0)


def test_lift_of_origin_is_south_pole():
    p = stereo_lift([0.0, 0.0])
    assert np.array_equal(p.coords, [0.0, 0.0, -1.0])


def test_lift_overflow():
    with pytest.raises(NormOverflowError):
        stereo_lift([1e300, 1e300])


def test_lift_huge_norm_lands_in_pole_band():
    # A large but finite input maps numerically onto the pole itself.
    with pytest.raises(PoleBandError):
        stereo_lift([1e9, 1e9])


def test_roundtrip_flat_to_sphere_to_flat():
    rng = np.random.default_rng(3)
    for dim in range(1, 17):
        for _ in range(60):
            v = rng.uniform(-100.0, 100.0, size=dim)
            w = stereo_project(stereo_lift(v))
            rel = np.abs(w - v) / np.maximum(np.abs(v), 1e-300)
            assert np.max(rel) < 1e-9


def test_roundtrip_sphere_to_flat_to_sphere():
    rng = np.random.default_rng(4)
    for dim in range(2, 10):
        count = 0
        while count < 40:
            v = rng.normal(size=dim)
            n = np.linalg.norm(v)
            if n < 1e-12 or v[-1] / n > 0.9:
                continue
            count += 1
            p = SpherePoint(v / n)
            q = stereo_lift(stereo_project(p))
            assert np.max(np.abs(q.coords - p.coords)) < 1e-10


def test_roundtrip_matches_oracle():
    rng = np.random.default_rng(5)
    for _ in range(25):
        v = rng.uniform(-5.0, 5.0, size=3)
        ours = stereo_lift(v).coords
        ref = as_floats(o_lift(v.tolist()))
        assert np.allclose(ours, ref, rtol=1e-14, atol=1e-16)
        back = stereo_project(stereo_lift(v))
        ref_back = as_floats(o_project(o_lift(v.tolist())))
        assert np.allclose(back, ref_back, rtol=1e-13, atol=1e-15)


def test_project_oracle_batch():
    rng = np.random.default_rng(6)
    for _ in range(25):
        v = rng.normal(size=4)
        n = np.linalg.norm(v)
        if n < 1e-12 or v[-1] / n > 0.9:
            continue
        ours = stereo_project(normalize(v))
        ref = as_floats(o_project(o_normalize(v.tolist())))
        assert np.allclose(ours, ref, rtol=1e-13, atol=1e-15)


def test_angle_between_quarter_turn():
    assert angle_between([1.0, 0.0], [1.0, 1.0]) == pytest.approx(
        0.7853981633974483, rel=RT
    )
    assert angle_between([1.0, 0.0, 0.0], [1.0, 1.0, 0.0]) == pytest.approx(
        0.7853981633974483, rel=RT
    )


def test_angle_between_scale_invariant():
    rng = np.random.default_rng(9)
    for _ in range(200):
        u = rng.normal(size=5)
        v = rng.normal(size=5)
        base = angle_between(u, v)
        scaled = angle_between(1e8 * u, 1e-8 * v)
        assert abs(base - scaled) <= 1e-12


def test_angle_between_clamps_parallel():
    u = np.array([1.0, 1.0, 1.0])
    assert angle_between(u, 2.0 * u) == 0.0
    assert angle_between(u, -3.0 * u) == pytest.approx(math.pi, rel=RT)


def test_angle_between_errors():
    with pytest.raises(ZeroVectorError):
        angle_between([0.0, 0.0], [1.0, 0.0])
    with pytest.raises(ValueError):
        angle_between([1.0, 0.0], [1.0, 0.0, 0.0])


def test_tangent_basis_orthonormal_and_tangent():
    rng = np.random.default_rng(12)
    for dim in (2, 3, 5, 8):
        for _ in range(20):
            v = rng.normal(size=dim)
            n = np.linalg.norm(v)
            if n < 1e-12 or v[-1] / n > 0.9:
                continue
            p = SpherePoint(v / n)
            basis = tangent_basis(p)
            assert basis.shape == (dim - 1, dim)
            gram = basis @ basis.T
            assert np.max(np.abs(gram - np.eye(dim - 1))) < 1e-12
            assert np.max(np.abs(basis @ p.coords)) < 1e-12


def test_conformality_frozen_scale():
    rep = conformality_check(normalize([1.0, 1.0, 1.0]))
    assert rep.scale_factor_predicted == pytest.approx(SCALE_NORM_111, rel=RT)
    assert rep.scale_factor_observed == pytest.approx(rep.scale_factor_predicted, rel=1e-4)
    assert rep.off_diagonal_residual < 1e-5


def test_conformality_random_points():
    rng = np.random.default_rng(13)
    for dim in (3, 4, 6):
        count = 0
        while count < 30:
            v = rng.normal(size=dim)
            n = np.linalg.norm(v)
            if n < 1e-12 or v[-1] / n > 0.9:
                continue
            count += 1
            rep = conformality_check(SpherePoint(v / n))
            assert rep.off_diagonal_residual < 1e-5
            rel = abs(rep.scale_factor_observed - rep.scale_factor_predicted)
            assert rel / rep.scale_factor_predicted < 1e-4


def test_conformality_near_pole_refused():
    # within four finite-difference steps of the pole band the check refuses
    chi = math.sqrt(1.0 - (2.5e-6) ** 2)
    p = SpherePoint([2.5e-6, 0.0, chi])
    with pytest.raises(PoleProximityError):
        conformality_check(p)


def test_inverse_conformality_frozen_scale():
    rep = inverse_conformality_check([3.0, 4.0])
    assert rep.scale_factor_predicted == pytest.approx(INV_SCALE_34, rel=RT)
    assert rep.scale_factor_observed == pytest.approx(rep.scale_factor_predicted, rel=1e-4)
    assert rep.off_diagonal_residual < 1e-5


def test_inverse_conformality_at_origin():
    rep = inverse_conformality_check([0.0, 0.0, 0.0])
    assert rep.scale_factor_predicted == pytest.approx(2.0, rel=RT)
    assert rep.scale_factor_observed == pytest.approx(2.0, rel=1e-4)


def test_inverse_conformality_random_points():
    rng = np.random.default_rng(14)
    for dim in (1, 2, 4, 7):
        for _ in range(30):
            v = rng.uniform(-3.0, 3.0, size=dim)
            rep = inverse_conformality_check(v)
            assert rep.off_diagonal_residual < 1e-5
            rel = abs(rep.scale_factor_observed - rep.scale_factor_predicted)
            assert rel / rep.scale_factor_predicted < 1e-4


def test_unit_norm_after_lift():
    rng = np.random.default_rng(15)
    for _ in range(500):
        v = rng.uniform(-50.0, 50.0, size=rng.integers(1, 9))
        p = stereo_lift(v)
        assert abs(np.linalg.norm(p.coords) - 1.0) <= 1e-12
