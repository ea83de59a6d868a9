"""Field catalog: values, analytic gradients, gauge machinery."""

import numpy as np
import pytest

from pdmlab import (
    FieldError,
    PhysicalConstants,
    gauge_transform,
    make_mass_profile,
    make_potential,
    make_scalar_field,
    make_vector_potential,
)


def test_constants_defaults_and_validation():
    c = PhysicalConstants()
    assert c.hbar == 1.0 and c.charge == 1.0
    with pytest.raises(FieldError):
        PhysicalConstants(hbar=-1.0)


def test_constant_mass_value_and_gradient():
    m = make_mass_profile("constant", m0=2.0)
    assert m.evaluate(3.7, -1.0) == pytest.approx(2.0)
    gx, gy = m.gradient(3.7, -1.0)
    assert gx == 0.0 and gy == 0.0


def test_quadratic_mass_value_and_gradient():
    m = make_mass_profile("quadratic", m0=1.0, lam=1.0)
    assert m.evaluate(1.0, 0.0) == pytest.approx(2.0)
    gx, gy = m.gradient(1.0, 0.0)
    assert gx == pytest.approx(2.0) and gy == pytest.approx(0.0)


def test_rational_bump_value_and_gradient():
    # hand-differentiated: M = m0/(1 + r^2/a^2), dM/dx = -2 m0 x / a^2 / (1+r^2/a^2)^2
    m = make_mass_profile("rational-bump", m0=1.0, a=1.0)
    assert m.evaluate(1.0, 0.0) == pytest.approx(0.5)
    gx, gy = m.gradient(1.0, 0.0)
    assert gx == pytest.approx(-0.5) and gy == pytest.approx(0.0)


def test_mass_profile_rejects_bad_parameters():
    with pytest.raises(FieldError):
        make_mass_profile("constant", m0=-1.0)
    with pytest.raises(FieldError):
        make_mass_profile("rational-bump", m0=1.0, a=0.0)
    with pytest.raises(FieldError):
        make_mass_profile("no-such-profile")


@pytest.mark.parametrize(
    "field_factory",
    [
        lambda: make_mass_profile("constant", m0=2.0).field,
        lambda: make_mass_profile("quadratic", m0=1.0, lam=0.7).field,
        lambda: make_mass_profile("rational-bump", m0=1.5, a=1.2).field,
        lambda: make_potential("harmonic", k=0.8),
        lambda: make_scalar_field("bilinear", c=0.5),
        lambda: make_scalar_field("linear", cx=1.0, cy=-2.0),
    ],
)
def test_gradient_matches_central_differences(field_factory):
    """Catalog gradients agree with finite differences on a 10x10 lattice."""
    field = field_factory()
    step = 1e-5
    pts = np.linspace(-2.0, 2.0, 10)
    for x in pts:
        for y in pts:
            gx, gy = field.gradient(x, y)
            fx = (field.evaluate(x + step, y) - field.evaluate(x - step, y)) / (2 * step)
            fy = (field.evaluate(x, y + step) - field.evaluate(x, y - step)) / (2 * step)
            scale = max(abs(fx), abs(fy), 1.0)
            assert abs(gx - fx) <= 1e-6 * scale
            assert abs(gy - fy) <= 1e-6 * scale


def test_vector_potential_symmetric_gauge():
    A = make_vector_potential("symmetric", 1.0)
    ax, ay = A.evaluate(2.0, 4.0)
    assert ax == pytest.approx(-2.0) and ay == pytest.approx(1.0)


def test_vector_potential_landau_gauge():
    A = make_vector_potential("landau-x", 1.0)
    ax, ay = A.evaluate(2.0, 4.0)
    assert ax == pytest.approx(-4.0) and ay == pytest.approx(0.0)


def test_vector_potential_zero_field():
    A = make_vector_potential("symmetric", 0.0)
    ax, ay = A.evaluate(0.3, -0.7)
    assert ax == 0.0 and ay == 0.0


def test_vector_potential_curl_is_uniform():
    for gauge in ("symmetric", "landau-x"):
        A = make_vector_potential(gauge, 1.7)
        for x, y in ((0.0, 0.0), (1.2, -0.4), (-2.0, 3.0)):
            assert A.curl(x, y) == pytest.approx(1.7, abs=1e-12)


def test_unknown_gauge_rejected():
    with pytest.raises(FieldError):
        make_vector_potential("coulomb", 1.0)


def test_gauge_transform_gradient_of_xy():
    A0 = make_vector_potential("symmetric", 0.0)
    chi = make_scalar_field("bilinear", c=1.0)
    A1 = gauge_transform(A0, chi)
    ax, ay = A1.evaluate(2.0, 5.0)
    assert ax == pytest.approx(5.0) and ay == pytest.approx(2.0)


def test_gauge_transform_connects_catalog_gauges():
    """symmetric + grad(-B x y / 2) = landau-x."""
    B = 1.3
    A = make_vector_potential("symmetric", B)
    chi = make_scalar_field("bilinear", c=-B / 2)
    A2 = gauge_transform(A, chi)
    ref = make_vector_potential("landau-x", B)
    for x, y in ((0.5, -1.0), (2.0, 3.0)):
        got = A2.evaluate(x, y)
        want = ref.evaluate(x, y)
        assert got[0] == pytest.approx(want[0], abs=1e-12)
        assert got[1] == pytest.approx(want[1], abs=1e-12)


def test_gauge_transform_constant_chi_is_identity():
    A = make_vector_potential("symmetric", 0.9)
    chi = make_scalar_field("constant", c=4.2)
    A2 = gauge_transform(A, chi)
    for x, y in ((0.0, 0.0), (1.0, -2.0)):
        assert A2.evaluate(x, y)[0] == pytest.approx(A.evaluate(x, y)[0], abs=1e-14)
        assert A2.evaluate(x, y)[1] == pytest.approx(A.evaluate(x, y)[1], abs=1e-14)


def test_gauge_transform_preserves_curl():
    A = make_vector_potential("symmetric", 2.1)
    for chi in (make_scalar_field("bilinear", c=0.7), make_scalar_field("harmonic", k=1.1)):
        A2 = gauge_transform(A, chi)
        pts = np.linspace(-2, 2, 5)
        for x in pts:
            for y in pts:
                assert abs(A2.curl(x, y) - A.curl(x, y)) <= 1e-10


def test_fields_evaluate_on_arrays():
    m = make_mass_profile("rational-bump", m0=1.0, a=1.0)
    xs = np.array([0.0, 1.0, 2.0])
    ys = np.zeros(3)
    np.testing.assert_allclose(m.evaluate(xs, ys), [1.0, 0.5, 0.2])
