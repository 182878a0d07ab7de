import math

import pytest

from nash_sharp import constants


def test_unit_ball_volume_gamma_formula():
    for n in range(1, 13):
        exact = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
        assert abs(constants.unit_ball_volume(n) - exact) < 1e-12
    with pytest.raises(ValueError):
        constants.unit_ball_volume(0)


def test_unit_sphere_area():
    assert abs(constants.unit_sphere_area(1) - 2 * math.pi) < 1e-12
    assert abs(constants.unit_sphere_area(2) - 4 * math.pi) < 1e-12


def test_constants_composed_from_fields(consts_by_dim):
    for n in (1, 2, 3, 4):
        c = consts_by_dim(n)
        a0 = (n + 2) ** ((n + 2) / n) / (
            2 ** (2 / n) * n * c.lambda1 * c.vol_unit_ball ** (2 / n))
        assert c.a0 == a0
        lam0_sq = ((n + 2) / 2) ** (-2 / n) * c.vol_unit_ball ** (2 / n)
        assert abs(c.lambda0**2 - lam0_sq) < 1e-15 * lam0_sq
        assert c.a0 > 0 and c.lambda0 > 0 and c.threshold_coeff >= 0


def test_compute_constants_dimension_mismatch(eig_by_dim):
    with pytest.raises(ValueError):
        constants.compute_constants(3, eig_by_dim(2))


def test_model_invariants():
    s = constants.round_sphere(2, 3.0)
    assert s.volume == 3.0**2 * constants.unit_sphere_area(2)
    assert s.max_scalar_curvature == 2 * 1 / 9.0

    t = constants.flat_torus(3, 2.0)
    assert t.volume == 8.0
    assert t.max_scalar_curvature == 0.0

    c = constants.circle(5.0)
    assert c.dim == 1
    assert c.volume == 5.0
    assert c.max_scalar_curvature == 0.0

    for bad in (constants.circle, ):
        with pytest.raises(ValueError):
            bad(-1.0)
    with pytest.raises(ValueError):
        constants.round_sphere(2, 0.0)
    with pytest.raises(ValueError):
        constants.flat_torus(2, 0.0)


def test_threshold_and_corollary(consts_by_dim):
    c2 = consts_by_dim(2)
    sphere = constants.round_sphere(2, 1.0)
    t = constants.threshold(2, c2, sphere)
    assert t > 0
    verdict, margin = constants.corollary_check(c2, sphere)
    assert verdict == "holds"
    assert abs(margin - (sphere.volume ** (-1.0) - t)) < 1e-15

    torus = constants.flat_torus(2, 1.0)
    assert constants.threshold(2, c2, torus) == 0.0

    with pytest.raises(ValueError):
        constants.threshold(3, c2, sphere)
