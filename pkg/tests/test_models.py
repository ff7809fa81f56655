import math

import numpy as np
import pytest

from strengthci.models import (
    DomainError,
    ModelKind,
    ModelSpec,
    SubcriticalEigenvalueError,
    lambda_of_theta,
    lambda_prime,
    model_constants,
    noise_scales,
    numeric_kappas,
    theta_of_lambda,
    v_of_theta,
)


def test_wigner_constants():
    c = model_constants(ModelSpec("wigner", 100))
    assert (c.theta_c, c.lambda_minus, c.lambda_plus) == (1.0, -2.0, 2.0)
    assert (c.kappa1, c.kappa2, c.kappa3) == (1.0, 1.0, -1.5)


def test_covariance_and_factor_edges():
    g = math.sqrt(117 / 139)
    cov = model_constants(ModelSpec("cov", 117, 139))
    fac = model_constants(ModelSpec("factor", 117, 139))
    assert cov.lambda_plus == pytest.approx((1 + g) ** 2, rel=1e-15)
    assert cov.theta_c == pytest.approx(1 + g)
    assert fac.theta_c == pytest.approx(g)
    assert fac.kappa3 == pytest.approx(-1.5 * g * (1 + g) ** 2)


def test_cca_threshold_for_equal_ratios():
    c = model_constants(ModelSpec("cca", 80, 520, 80))
    assert c.theta_c == pytest.approx(1 / 5.5, rel=1e-14)
    assert c.theta_admissible_max == 1.0


def test_shape_normalization_swaps_roles():
    assert ModelSpec("cov", 500, 200).N == 200
    s = ModelSpec("cca", 90, 520, 80)
    assert (s.N, s.M) == (80, 90)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="wigner", N=0),
        dict(kind="wigner", N=10, S=5),
        dict(kind="cov", N=10),
        dict(kind="cca", N=10, S=15, M=10),
        dict(kind="cca", N=10, S=50, M=10, sigma2=2.0),
        dict(kind="factor", N=10, S=20, sigma2=-1.0),
        dict(kind="nonsense", N=10),
    ],
)
def test_invalid_specs_raise(kwargs):
    with pytest.raises(DomainError):
        ModelSpec(**kwargs)


def test_spec_json_round_trip():
    s = ModelSpec("factor", 117, 139, sigma2=0.5)
    assert ModelSpec.from_json(s.to_json()) == s
    with pytest.raises(DomainError):
        ModelSpec.from_dict({"kind": "wigner", "N": 3, "extra": 1})


def test_kind_aliases():
    assert ModelKind.parse("Covariance") is ModelKind.COVARIANCE


def test_inverse_round_trip(any_spec):
    c = model_constants(any_spec)
    top = min(c.theta_c + 20, c.theta_admissible_max)
    for theta in np.linspace(c.theta_c + 1e-3, top - 1e-6, 50):
        lam = lambda_of_theta(any_spec, theta)
        assert abs(theta_of_lambda(any_spec, lam) - theta) < 1e-10 * max(1, theta)


def test_edge_values_at_threshold(any_spec):
    c = model_constants(any_spec)
    assert lambda_of_theta(any_spec, c.theta_c) == pytest.approx(c.lambda_plus, rel=1e-14)
    assert abs(lambda_prime(any_spec, c.theta_c)) < 1e-12
    assert v_of_theta(any_spec, c.theta_c) == 0.0


def test_numeric_kappas_match_closed_form(any_spec):
    c = model_constants(any_spec)
    k1, k2 = numeric_kappas(any_spec)
    assert k1 == pytest.approx(c.kappa1, rel=1e-5)
    assert k2 == pytest.approx(c.kappa2, rel=1e-5)


def test_subcritical_eigenvalue_has_no_estimate():
    with pytest.raises(SubcriticalEigenvalueError):
        theta_of_lambda(ModelSpec("wigner", 10), 1.99)
    with pytest.raises(DomainError):
        v_of_theta(ModelSpec("wigner", 10), 0.5)


def test_wigner_lambda_pole():
    with pytest.raises(DomainError):
        lambda_of_theta(ModelSpec("wigner", 10), 0.0)


def test_noise_scales():
    assert noise_scales(ModelSpec("wigner", 10, sigma2=4.0)) == (2.0, 2.0)
    assert noise_scales(ModelSpec("cov", 10, 20, sigma2=4.0)) == (4.0, 4.0)
    assert noise_scales(ModelSpec("cca", 10, 50, 10)) == (1.0, 1.0)
