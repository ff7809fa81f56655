import math

import numpy as np
import pytest
from scipy import integrate

from strengthci import densities
from strengthci.densities import LimitDensity, UnsupportedModelError
from strengthci.models import ModelSpec, model_constants
from strengthci.rmt import sample_goe_dense, simulate_spiked_model


def test_unit_mass(any_spec):
    assert densities.integrate_density(any_spec, -np.inf, np.inf) == pytest.approx(1.0, abs=1e-10)


def test_cdf_quantile_inverse(any_spec):
    for p in (0.1, 0.25, 0.5, 0.9):
        assert densities.cdf(any_spec, densities.quantile(any_spec, p)) == pytest.approx(p, abs=1e-11)


def test_semicircle_values():
    spec = ModelSpec("wigner", 10)
    assert densities.density(spec, 0.0) == pytest.approx(1 / math.pi)
    assert densities.density(spec, 2.5) == 0.0
    assert densities.quantile(spec, 0.5) == pytest.approx(0.0, abs=1e-12)


def test_stieltjes_matches_quadrature(any_spec):
    lo, hi = model_constants(any_spec).lambda_minus, model_constants(any_spec).lambda_plus
    for z in (hi + 0.3, lo - 0.5, complex(0.5 * (lo + hi), 0.4)):
        re = densities.integrate_density(any_spec, lo, hi, lambda x: (1 / (z - x)).real)
        im = densities.integrate_density(any_spec, lo, hi, lambda x: (1 / (z - x)).imag)
        assert densities.stieltjes(any_spec, z) == pytest.approx(complex(re, im), abs=1e-9)


def test_stieltjes_rejects_support():
    with pytest.raises(densities.DomainError):
        densities.stieltjes(ModelSpec("wigner", 5), 0.3)


def test_trim_calibration_wigner():
    cal = densities.trim_calibration(ModelSpec("wigner", 10))
    assert cal.upper_cut == pytest.approx(-cal.lower_cut, abs=1e-12)
    # trimmed second moment of the semicircle between its quartiles
    direct, _ = integrate.quad(lambda x: x * x * math.sqrt(4 - x * x) / (2 * math.pi), cal.lower_cut, cal.upper_cut)
    assert cal.sigma0_sq == pytest.approx(direct, rel=1e-10)


def test_cca_has_no_variance():
    with pytest.raises(UnsupportedModelError):
        densities.trim_calibration(ModelSpec("cca", 10, 50, 10))


def test_estimate_sigma2_recovers_scale():
    eigs = sample_goe_dense(400, 1.5, 3).eigenvalues
    assert densities.estimate_sigma2(ModelSpec("wigner", 400), eigs) == pytest.approx(2.25, rel=0.03)
    s = simulate_spiked_model(ModelSpec("cov", 300, 600, sigma2=0.5), [], rng=4)
    assert densities.estimate_sigma2(ModelSpec("cov", 300, 600), s.eigenvalues) == pytest.approx(0.5, rel=0.03)


def test_estimate_needs_enough_eigenvalues():
    with pytest.raises(densities.DomainError):
        densities.estimate_sigma2(ModelSpec("wigner", 5), np.ones(5))


def test_limit_density_curve_and_kolmogorov():
    spec = ModelSpec("wigner", 300)
    curve = LimitDensity(spec).curve(50)
    assert curve.shape == (50, 2) and curve[0, 1] == 0.0
    eigs = sample_goe_dense(300, 1.0, 1).eigenvalues
    assert densities.kolmogorov_distance(spec, eigs) < 0.08
