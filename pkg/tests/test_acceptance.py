"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import math

import numpy as np
import pytest
from scipy import stats

from strengthci import airy, rmt
from strengthci.densities import estimate_sigma2
from strengthci.inference import coverage_experiment
from strengthci.models import (
    ModelSpec,
    lambda_of_theta,
    lambda_prime,
    model_constants,
    numeric_kappas,
    theta_of_lambda,
    v_of_theta,
)
from strengthci.tables import embedded_table, tracy_widom_quantile

pytestmark = pytest.mark.acceptance

ZOO = [ModelSpec("wigner", 400), ModelSpec("cov", 200, 500), ModelSpec("factor", 117, 139), ModelSpec("cca", 80, 520, 80)]


def test_table_regeneration(acceptance):
    cfg = airy.TransitionSimConfig(N=10**6, corner_m=1000, mc=20_000, theta_grid=(-2.0, 0.0, 2.0, 4.0))
    alphas = (0.05, 0.5, 0.95)
    build = airy.build_quantile_table(cfg, alphas=alphas)
    ref = embedded_table()
    worst, misses = 0.0, []
    for i, theta in enumerate(cfg.theta_grid):
        row = int(np.argmin(np.abs(ref.theta_grid - theta)))
        for j, a in enumerate(alphas):
            got = build.table.values[i, j]
            want = ref.values[row, int(np.argmin(np.abs(ref.alphas - a)))]
            tol = max(0.1, 3 * build.standard_errors[i, j])
            worst = max(worst, abs(got - want) / tol)
            if abs(got - want) > tol:
                misses.append(f"({theta:g}, {a:g}) {got:.3f} vs {want:.2f}")
    median0 = build.table.values[1, 1]
    acceptance("1 table regeneration", not misses,
               f"worst |diff|/tol = {worst:.2f}; T(0) median {median0:.3f}" + (f"; misses {misses}" if misses else ""))


def test_tail_stitching(acceptance):
    ref = embedded_table()
    col = ref.column(0.5)
    gauss = abs(col[ref.theta_grid == 6.0][0] - 36.0)
    tw = abs(col[ref.theta_grid == -3.0][0] - (tracy_widom_quantile(0.5) + 1 / 3))
    ok = round(gauss, 10) == 0.03 and tw <= 0.05
    acceptance("2 tail stitching", ok, f"|T(6) - 36| = {gauss:.4f}; TW tail gap at -3 = {tw:.4f}")


def test_two_route_equivalence(acceptance):
    thetas = (-1.0, 0.0, 1.0)
    corner = airy.transition_samples(airy.TransitionSimConfig(N=10**6, mc=10_000, theta_grid=thetas))
    green = airy.green_transition_samples(airy.GreenSimConfig(n=500, J=250, mc=10_000, master_seed=1), thetas)
    pvals = [stats.ks_2samp(corner[:, k], green[:, k]).pvalue for k in range(len(thetas))]
    acceptance("3 two-route equivalence", min(pvals) > 0.01,
               "KS p-values " + ", ".join(f"{t:g}: {p:.3f}" for t, p in zip(thetas, pvals)))


def test_coverage(acceptance):
    thetas = (0.8, 1.0, 1.2, 1.5, 2.0)
    rep = coverage_experiment(ModelSpec("wigner", 400), thetas, alpha=0.05, reps=2000, seed=0)
    trans = [r.coverage_transition for r in rep.rows]
    gauss = {r.theta: r.coverage_gaussian for r in rep.rows}
    ok = all(0.92 <= c <= 0.975 for c in trans) and any(not 0.92 <= gauss[t] <= 0.975 for t in (1.0, 1.2))
    acceptance("4 coverage", ok,
               "transition " + ", ".join(f"{c:.3f}" for c in trans)
               + "; gaussian " + ", ".join(f"{gauss[t]:.3f}" for t in thetas))


def test_model_zoo_exactness(acceptance):
    worst_trip, worst_kappa, worst_edge = 0.0, 0.0, 0.0
    for spec in ZOO:
        c = model_constants(spec)
        top = min(c.theta_admissible_max, c.theta_c + 10)
        for theta in np.linspace(c.theta_c, top, 52)[1:-1]:
            worst_trip = max(worst_trip, abs(theta_of_lambda(spec, lambda_of_theta(spec, theta)) - theta))
        k1, k2 = numeric_kappas(spec)
        worst_kappa = max(worst_kappa, abs(k1 / c.kappa1 - 1), abs(k2 / c.kappa2 - 1))
        worst_edge = max(worst_edge, abs(v_of_theta(spec, c.theta_c)), abs(lambda_prime(spec, c.theta_c)))
    ok = worst_trip < 1e-10 and worst_kappa < 1e-5 and worst_edge < 1e-10
    acceptance("5 model zoo", ok,
               f"round trip {worst_trip:.1e}; kappa rel err {worst_kappa:.1e}; V and lambda' at threshold {worst_edge:.1e}")


def _wigner_oracle(g, N=50, theta=1.5):
    B, A, u = rmt.dense_spiked_wigner(N, theta, g.standard_normal(N), g)
    base, vecs = np.linalg.eigh(B)
    spiked = np.linalg.eigvalsh(A)[::-1]
    res = abs(rmt.secular_residual(theta, spiked[0], base, vecs.T @ u))
    return res, rmt.interlaces(spiked, base[::-1])


def _covariance_oracle(g, N=50, S=120, theta=3.0):
    X = g.standard_normal((N, S))
    X[0] *= math.sqrt(theta)
    _, sv, Vt = np.linalg.svd(X[1:], full_matrices=True)
    base = np.zeros(S)
    base[: sv.size] = sv**2
    row = X[0]
    spiked = np.linalg.svd(X, compute_uv=False) ** 2
    res = abs(rmt.covariance_secular_residual(spiked[0], row @ row, base, Vt @ (row / np.linalg.norm(row))))
    return res, rmt.interlaces(spiked, sv**2)


def _factor_oracle(g, N=50, S=120, theta=2.0):
    u = g.standard_normal(N)
    v = g.standard_normal(S)
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    Z = g.standard_normal((N, S))
    X = math.sqrt(theta) * np.outer(u, v) + Z
    P, s, Qt = np.linalg.svd(Z, full_matrices=True)
    base = np.zeros(S)
    base[:N] = s**2
    spiked = np.linalg.svd(X, compute_uv=False) ** 2
    res = abs(rmt.factor_secular_residual(spiked[0], theta, base, P.T @ u, Qt @ v))
    # XX^T - ZZ^T has rank two with one eigenvalue of each sign; adding the
    # negative part to ZZ^T gives a matrix interlacing with both spectra
    w, E = np.linalg.eigh(X @ X.T - Z @ Z.T)
    mid = np.linalg.eigvalsh(Z @ Z.T + w[0] * np.outer(E[:, 0], E[:, 0]))
    full, noise = np.linalg.eigvalsh(X @ X.T), np.linalg.eigvalsh(Z @ Z.T)
    return res, rmt.interlaces(full[::-1], mid[::-1]) and rmt.interlaces(noise[::-1], mid[::-1])


def _cca_oracle(g, N=20, M=20, S=100, rho=0.8):
    U, V = g.standard_normal((N, S)), g.standard_normal((M, S))
    V[0] = rho * U[0] + math.sqrt(1 - rho * rho) * V[0]
    ub, vb, corr = rmt.cca_canonical_basis(U[1:], V[1:])
    full = rmt.squared_canonical_correlations(U, V)
    res = abs(rmt.cca_secular_residual(full[0], U[0], V[0], ub, vb, corr))
    # dropping one row of U, then one row of V, interlaces at each step
    mid = rmt.squared_canonical_correlations(U[1:], V)
    sub = rmt.squared_canonical_correlations(U[1:], V[1:])
    return res, rmt.interlaces(full, mid) and rmt.interlaces(mid, sub)


def test_secular_oracles(acceptance):
    g = np.random.default_rng(20)
    results = {name: f(g) for name, f in
               [("wigner", _wigner_oracle), ("cov", _covariance_oracle), ("factor", _factor_oracle), ("cca", _cca_oracle)]}
    ok = all(res < 1e-8 and inter for res, inter in results.values())
    acceptance("6 secular oracles", ok,
               "; ".join(f"{k} residual {r:.1e} interlace {i}" for k, (r, i) in results.items()))


def test_empirical_anchors(acceptance):
    factor = model_constants(ModelSpec("factor", 117, 139))
    cca = model_constants(ModelSpec("cca", 80, 520, 80))
    ok = abs(factor.lambda_plus - 3.68) <= 0.01 and abs(factor.theta_c - 0.92) <= 0.005 and abs(cca.theta_c - 0.1818) <= 0.002
    acceptance("7 empirical anchors", ok,
               f"factor lambda+ {factor.lambda_plus:.4f} theta_c {factor.theta_c:.4f}; cca theta_c {cca.theta_c:.4f}")


def test_variance_estimator(acceptance):
    reps = 200
    goe_spec, wish_spec = ModelSpec("wigner", 500), ModelSpec("cov", 500, 1000)
    goe, wish = [], []
    for k in range(reps):
        goe.append(estimate_sigma2(goe_spec, rmt.sample_goe_dense(500, 1.0, rmt.RngStream(8, k)).eigenvalues))
        X = rmt.RngStream(9, k).generator().standard_normal((500, 1000))
        wish.append(estimate_sigma2(wish_spec, np.linalg.eigvalsh(X @ X.T / 1000)))
    hit_goe = np.mean(np.abs(np.array(goe) - 1) <= 0.02)
    hit_wish = np.mean(np.abs(np.array(wish) - 1) <= 0.02)
    acceptance("8 variance estimator", hit_goe >= 0.95 and hit_wish >= 0.95,
               f"within 2%: GOE {hit_goe:.3f}, Wishart {hit_wish:.3f}")


def test_tridiagonal_fidelity(acceptance):
    reps = 5000
    tri = np.array([rmt.tridiag_top_eigs(rmt.sample_tridiag_corner(100, 100, 0.0, rmt.RngStream(10, k)), 1)[0]
                    for k in range(reps)])
    dense = np.array([rmt.sample_goe_dense(100, 1.0, rmt.RngStream(11, k)).eigenvalues.max() for k in range(reps)])
    ks = stats.ks_2samp(tri, dense).statistic
    # couple the two truncations: the m-corner is the leading block of the 2m-corner
    cfg = airy.TransitionSimConfig(N=10**6, corner_m=2000)
    thetas = np.array([-2.0, 0.0, 2.0])
    shifts = []
    for k in range(300):
        big = airy.draw_corner(cfg, rmt.RngStream(12, k))
        small = airy.CornerDraw(big.corner.truncate(1000), big.weight, big.shift)
        shifts.append(airy.transition_from_corner(big, thetas, cfg) - airy.transition_from_corner(small, thetas, cfg))
    med = float(np.max(np.median(np.abs(shifts), axis=0)))
    acceptance("9 tridiagonal fidelity", ks < 0.05 and med < 1e-3,
               f"KS statistic vs dense GOE {ks:.4f}; median |T(2m) - T(m)| {med:.1e}")
