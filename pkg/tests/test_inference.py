import math

import numpy as np
import pytest

from strengthci import airy
from strengthci.inference import (
    Classification,
    StrengthInterval,
    classify,
    confidence_interval,
    coverage_experiment,
    gaussian_interval,
    t_hat,
    t_hat_many,
)
from strengthci.models import DomainError, ModelSpec, lambda_of_theta, model_constants, theta_of_lambda
from strengthci.tables import AlphaNotTabulatedError, tracy_widom_quantile

WIGNER_1000 = ModelSpec("wigner", 1000)


def test_gaussian_direct_reference_interval():
    ci = gaussian_interval(ModelSpec("wigner", 100), 3.0, 0.05)
    assert ci.theta_lower == pytest.approx(2.318, abs=5e-4)
    assert ci.theta_upper == pytest.approx(2.918, abs=5e-4)
    assert ci.theta_hat == pytest.approx((3 + math.sqrt(5)) / 2)


def test_gaussian_direct_diverges_at_edge():
    spec = WIGNER_1000
    widths = [gaussian_interval(spec, 2 + eps).width for eps in (1e-2, 1e-5, 1e-8, 1e-12)]
    assert np.all(np.diff(widths) > 0) and widths[-1] > 50
    ci = gaussian_interval(spec, 1.99)
    assert ci.diverged and math.isinf(ci.theta_upper)


def _scaled(spec, factor):
    return ModelSpec(spec.kind, spec.N * factor, spec.S and spec.S * factor, spec.M and spec.M * factor)


def test_transposed_differs_from_direct_at_order_one_over_n(any_spec):
    gaps = []
    for factor in (1, 16):
        spec = _scaled(any_spec, factor)
        c = model_constants(spec)
        theta = c.theta_c + 0.6 * (min(c.theta_admissible_max, c.theta_c + 4) - c.theta_c)
        lam = lambda_of_theta(spec, theta)
        d = gaussian_interval(spec, lam, method="direct")
        t = gaussian_interval(spec, lam, method="transposed")
        gaps.append(spec.N * max(abs(d.theta_lower - t.theta_lower), abs(d.theta_upper - t.theta_upper)))
    # N times the gap stays bounded as N grows sixteenfold
    assert gaps[1] < 1.5 * gaps[0] + 1e-3


def test_t_hat_continuous_at_threshold(any_spec):
    c = model_constants(any_spec)
    scale = c.kappa1 * any_spec.N ** (-2 / 3)
    for side in ("plus", "minus"):
        lo = t_hat(any_spec, c.theta_c - 1e-8, 0.05, side)
        hi = t_hat(any_spec, c.theta_c + 1e-8, 0.05, side)
        assert abs(hi - lo) < 1e-6 * max(scale, 1.0)


def test_t_hat_sides_ordered(any_spec):
    c = model_constants(any_spec)
    grid = np.linspace(c.theta_admissible_min, min(c.theta_c + 3, c.theta_admissible_max), 200)
    plus, minus = t_hat_many(any_spec, grid, 0.05, "plus"), t_hat_many(any_spec, grid, 0.05, "minus")
    assert np.all(plus >= minus)
    # the CCA curves meet at perfect correlation, where the fluctuation variance vanishes
    assert np.all(plus[:-1] > minus[:-1])


def test_t_hat_deep_subcritical_limit():
    N = 1000
    theta = 1 - 5 / N ** (1 / 3)  # Theta = -5
    expected = 2 + N ** (-2 / 3) * (tracy_widom_quantile(0.975) + 0.2) - 1.5 / N
    assert t_hat(WIGNER_1000, theta, 0.05, "plus") == pytest.approx(expected, abs=1e-14)


def test_untabulated_level_propagates():
    with pytest.raises(AlphaNotTabulatedError):
        t_hat(WIGNER_1000, 1.2, 0.5, "plus")


def test_round_trip_through_lower_curve(any_spec):
    c = model_constants(any_spec)
    for frac in (0.3, 0.7):
        star = c.theta_c + frac * (min(c.theta_c + 2, c.theta_admissible_max) - c.theta_c)
        lam = t_hat(any_spec, star, 0.05, "minus")
        assert confidence_interval(any_spec, lam).theta_upper == pytest.approx(star, abs=1e-8)


def test_endpoints_nondecreasing_in_lambda():
    lams = np.linspace(1.95, 3.5, 60)
    cis = [confidence_interval(WIGNER_1000, lam) for lam in lams]
    lower = np.array([ci.theta_lower for ci in cis])
    upper = np.array([ci.theta_upper for ci in cis])
    assert np.all(np.diff(lower) >= -1e-12) and np.all(np.diff(upper) >= -1e-12)


def test_transition_matches_gaussian_far_above(any_spec):
    c = model_constants(any_spec)
    N = any_spec.N
    theta = c.theta_c + 30 / c.kappa2 * N ** (-1 / 3)
    if theta >= c.theta_admissible_max:
        theta = 0.5 * (c.theta_c + c.theta_admissible_max)
    lam = lambda_of_theta(any_spec, theta)
    ci, gi = confidence_interval(any_spec, lam), gaussian_interval(any_spec, lam)
    half = gi.width / 2
    assert abs(ci.theta_lower - gi.theta_lower) < 0.15 * half
    assert abs(ci.theta_upper - gi.theta_upper) < 0.15 * half


def test_reference_case_n1000():
    ci, gi = confidence_interval(WIGNER_1000, 3.0), gaussian_interval(WIGNER_1000, 3.0)
    half = gi.width / 2
    assert abs(ci.theta_lower - gi.theta_lower) < 0.1 * half and abs(ci.theta_upper - gi.theta_upper) < 0.1 * half


def test_near_edge_interval_contains_threshold():
    spec = ModelSpec("wigner", 117)
    ci = confidence_interval(spec, 2.01)
    assert ci.one_sided or ci.clamped_lower
    assert ci.contains(1.0) and ci.theta_lower == 0.0
    assert classify(ci) is Classification.NOISE_COMPATIBLE


def test_far_below_edge_is_one_sided():
    ci = confidence_interval(WIGNER_1000, 1.5)
    assert ci.one_sided and ci.theta_lower == 0.0


def test_cca_upper_bound_capped():
    spec = ModelSpec("cca", 80, 520, 80)
    ci = confidence_interval(spec, 0.999)
    assert ci.theta_upper <= 1.0
    assert ci.theta_lower > model_constants(spec).theta_c


def test_noise_scale_is_applied():
    base = confidence_interval(ModelSpec("wigner", 500), 2.6)
    scaled = confidence_interval(ModelSpec("wigner", 500, sigma2=4.0), 5.2)
    assert scaled.theta_lower == pytest.approx(2 * base.theta_lower, rel=1e-9)
    assert scaled.theta_upper == pytest.approx(2 * base.theta_upper, rel=1e-9)


def test_non_finite_eigenvalue():
    with pytest.raises(DomainError):
        confidence_interval(WIGNER_1000, float("nan"))


def _interval(lo, hi, **flags):
    return StrengthInterval(lo, hi, 0.05, flags.get("one_sided", False), flags.get("clamped", False),
                            ModelSpec("factor", 117, 139))


def test_classification_rules():
    c = model_constants(ModelSpec("factor", 117, 139))
    assert classify(_interval(0.0, 1.5, clamped=True), c) is Classification.NOISE_COMPATIBLE
    assert classify(_interval(0.3, 1.5), c) is Classification.SUBCRITICAL_COMPATIBLE
    assert classify(_interval(1.1, 2.0), c) is Classification.INFORMATIVE


def test_interval_invariants():
    with pytest.raises(DomainError):
        _interval(2.0, 1.0)
    with pytest.raises(DomainError):
        _interval(-0.5, 1.0)


def test_report_fields():
    rep = confidence_interval(WIGNER_1000, 2.5).to_report()
    assert set(rep) == {"model", "N", "shape", "sigma2_used", "lambda", "alpha", "theta_hat", "theta_lower",
                        "theta_upper", "one_sided", "clamped", "classification"}


def test_coverage_is_deterministic():
    spec = ModelSpec("wigner", 200)
    a = coverage_experiment(spec, [1.5], reps=100, seed=4)
    b = coverage_experiment(spec, [1.5], reps=100, seed=4)
    assert a.to_rows() == b.to_rows() and np.array_equal(a.top_eigenvalues, b.top_eigenvalues)
    with pytest.raises(DomainError):
        coverage_experiment(spec, [1.5], reps=50)


def test_coverage_at_median_level_with_regenerated_table():
    # alpha = 0.5 needs the 0.25 and 0.75 quantiles, which the published table lacks
    cfg = airy.TransitionSimConfig(N=10**6, mc=2000, theta_grid=tuple(np.arange(-3.0, 6.01, 0.5).round(1)))
    table = airy.build_quantile_table(cfg, alphas=(0.25, 0.5, 0.75), bootstrap_reps=20).table
    rep = coverage_experiment(ModelSpec("wigner", 400), [2.0], alpha=0.5, reps=400, seed=1, table=table)
    assert abs(rep.rows[0].coverage_transition - 0.5) < 3 * 0.025
