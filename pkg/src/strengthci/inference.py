"""Confidence intervals for signal strength, classification and coverage studies."""

from __future__ import annotations

import enum
import math
import warnings as _warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .models import (
    DomainError,
    ModelConstants,
    ModelKind,
    ModelSpec,
    _v_raw,
    lambda_of_theta,
    lambda_prime,
    model_constants,
    noise_scales,
    theta_of_lambda,
)
from .tables import QuantileTable, embedded_table, normal_quantile, transition_quantiles

THETA_XTOL = 1e-9
SCAN_POINTS = 257


class RootFindingError(DomainError):
    """A confidence bound could not be bracketed."""


class Side(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"


class Classification(str, enum.Enum):
    NOISE_COMPATIBLE = "NoiseCompatible"
    SUBCRITICAL_COMPATIBLE = "SubcriticalCompatible"
    INFORMATIVE = "Informative"


@dataclass
class StrengthInterval:
    """Confidence interval for theta, in the data's units.

    When ``one_sided`` is set no finite lower bound exists and
    ``theta_lower`` holds the smallest admissible strength instead;
    ``clamped_lower`` marks a lower bound that fell below that minimum.
    ``diverged`` marks Gaussian intervals whose width blew up.
    """

    theta_lower: float
    theta_upper: float
    alpha: float
    one_sided: bool
    clamped_lower: bool
    spec: ModelSpec
    lam: float = math.nan
    theta_hat: float = math.nan
    method: str = "transition"
    diverged: bool = False
    clamped_upper: bool = False
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        if not self.theta_lower <= self.theta_upper:
            raise DomainError(f"interval [{self.theta_lower}, {self.theta_upper}] is reversed")
        const = model_constants(self.spec)
        scale, _ = noise_scales(self.spec)
        slack = 1e-12 * max(1.0, abs(self.theta_upper))
        if self.theta_lower < const.theta_admissible_min * scale - slack:
            raise DomainError("lower bound below the admissible minimum")
        if self.theta_upper > const.theta_admissible_max * scale + slack:
            raise DomainError("upper bound above the admissible maximum")

    @property
    def width(self) -> float:
        return self.theta_upper - self.theta_lower

    def contains(self, theta: float) -> bool:
        return self.theta_lower <= theta <= self.theta_upper

    def to_report(self) -> dict:
        return {
            "model": self.spec.kind.value,
            "N": self.spec.N,
            "shape": self.spec.shape(),
            "sigma2_used": self.spec.sigma2,
            "lambda": self.lam,
            "alpha": self.alpha,
            "theta_hat": self.theta_hat,
            "theta_lower": self.theta_lower,
            "theta_upper": self.theta_upper,
            "one_sided": self.one_sided,
            "clamped": self.clamped_lower,
            "classification": classify(self).value,
        }


def _lambda_array(spec: ModelSpec, theta: np.ndarray) -> np.ndarray:
    return np.array([lambda_of_theta(spec, t) for t in theta])


def _v_array(spec: ModelSpec, theta: np.ndarray) -> np.ndarray:
    return np.maximum(np.array([_v_raw(spec, t) for t in theta]), 0.0)


def _unit(spec: ModelSpec) -> ModelSpec:
    return spec if spec.sigma2 == 1.0 else ModelSpec(spec.kind, spec.N, spec.S, spec.M, 1.0)


def _level(alpha: float, side: Side) -> float:
    return 1 - alpha / 2 if Side(side) is Side.PLUS else alpha / 2


def t_hat_many(spec: ModelSpec, theta, alpha: float, side: Side, table: QuantileTable | None = None) -> np.ndarray:
    """Vectorized :func:`t_hat`."""
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    spec = _unit(spec)
    table = embedded_table() if table is None else table
    c = model_constants(spec)
    theta = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    if not np.all(np.isfinite(theta)):
        raise DomainError("theta must be finite")
    N = spec.N
    q = transition_quantiles(c.kappa2 * N ** (1 / 3) * (theta - c.theta_c), _level(alpha, side), table)
    out = c.lambda_plus + c.kappa1 * N ** (-2 / 3) * q + c.kappa3 / N
    sup = theta > c.theta_c
    if sup.any():
        th = theta[sup]
        d = th - c.theta_c
        v = _v_array(spec, th)
        out[sup] = (
            _lambda_array(spec, th)
            - 0.5 * c.kappa2**1.5 * np.sqrt(v * d**3)
            + 0.5 * c.kappa2**-0.5 * N ** (-2 / 3) * np.sqrt(v / d) * q[sup]
            + c.kappa3 / N
        )
    return out


def t_hat(spec: ModelSpec, theta: float, alpha: float, side: Side, table: QuantileTable | None = None) -> float:
    """Upper (``plus``) or lower (``minus``) quantile of the top eigenvalue at strength theta.

    Works at unit noise variance. ``alpha`` is the total miss probability,
    so the quantile levels are 1 - alpha/2 and alpha/2. Above theta_c the
    unified transition/Gaussian form is used, at or below it the pure
    edge form; the two agree at theta_c.
    """
    return float(t_hat_many(spec, [theta], alpha, side, table)[0])


def _crossings(grid: np.ndarray, values: np.ndarray) -> list[tuple[float, float]]:
    """Brackets where ``values`` changes sign from negative to non-negative."""
    neg = values < 0
    idx = np.flatnonzero(neg[:-1] & ~neg[1:])
    return [(grid[i], grid[i + 1]) for i in idx]


def _solve_curve(curve, lam: float, lo: float, hi: float, label: str):
    """Outermost crossing of an increasing curve with the level ``lam`` on [lo, hi].

    Returns (root, warning); root is None when the curve starts at or
    above ``lam``. Kinks that do not create extra crossings are ignored.
    """
    grid = np.linspace(lo, hi, SCAN_POINTS)
    vals = curve(grid) - lam
    if not np.all(np.isfinite(vals)):
        raise RootFindingError(f"{label}: non-finite curve values on [{lo}, {hi}]")
    if vals[0] >= 0:
        return None, None
    brackets = _crossings(grid, vals)
    if not brackets:
        raise RootFindingError(f"{label}: no crossing on [{lo}, {hi}] (curve max {vals.max() + lam}, level {lam})")
    warning = None
    if len(brackets) > 1:
        warning = f"{label}: curve is not monotone in theta; the outermost crossing was used"
    a, b = brackets[-1] if label.endswith("upper") else brackets[0]

    def g(t):
        return float(curve(np.array([t]))[0]) - lam

    root = optimize.brentq(g, a, b, xtol=THETA_XTOL, rtol=4 * np.finfo(float).eps)
    return root, warning


def _search_ceiling(spec: ModelSpec, c: ModelConstants, lam: float, lower_curve) -> tuple[float, bool]:
    """Upper end of the theta search and whether the admissible maximum was hit."""
    start = theta_of_lambda(spec, lam) + 1 if lam > c.lambda_plus else c.theta_c + 1
    top = min(start, c.theta_admissible_max)
    for _ in range(200):
        if top >= c.theta_admissible_max:
            return c.theta_admissible_max, lower_curve(np.array([c.theta_admissible_max]))[0] <= lam
        if lower_curve(np.array([top]))[0] > lam:
            return top, False
        top = min(c.theta_c + 2 * (top - c.theta_c), c.theta_admissible_max)
    raise RootFindingError("upper search bound did not converge after 200 doublings")


def _interval_from_curves(spec, c, lam, alpha, upper_curve, lower_curve, method, theta_hat):
    """Invert a pair of quantile curves at the observed eigenvalue (unit scale)."""
    notes = []
    ceiling, capped = _search_ceiling(spec, c, lam, lower_curve)
    floor = c.theta_admissible_min
    if capped:
        theta_up = ceiling
    else:
        theta_up, w = _solve_curve(lower_curve, lam, floor, ceiling, f"{method} upper")
        notes += [w] if w else []
        if theta_up is None:
            theta_up = floor
            notes.append("the observed eigenvalue is below the lowest attainable quantile")
    if upper_curve(np.array([ceiling]))[0] < lam:
        notes.append("the observed eigenvalue exceeds every attainable quantile")
        return ceiling, ceiling, False, capped, notes
    theta_lo, w = _solve_curve(upper_curve, lam, floor, ceiling, f"{method} lower")
    notes += [w] if w else []
    clamped = theta_lo is None
    theta_lo = floor if clamped else min(theta_lo, theta_up)
    return theta_lo, theta_up, clamped, capped, notes


def confidence_interval(spec: ModelSpec, lam: float, alpha: float = 0.05, table: QuantileTable | None = None) -> StrengthInterval:
    """Transition-based confidence interval for the strength behind eigenvalue ``lam``.

    ``lam`` is in data units; ``spec.sigma2`` is used to standardize it and
    the returned bounds are converted back.
    """
    lam = float(lam)
    if not math.isfinite(lam):
        raise DomainError("eigenvalue must be finite")
    theta_scale, lam_scale = noise_scales(spec)
    unit = _unit(spec)
    c = model_constants(unit)
    x = lam / lam_scale
    table = embedded_table() if table is None else table

    def upper_curve(t):
        return t_hat_many(unit, t, alpha, Side.PLUS, table)

    def lower_curve(t):
        return t_hat_many(unit, t, alpha, Side.MINUS, table)

    theta_hat = theta_of_lambda(unit, x) if x > c.lambda_plus else math.nan
    lo, hi, clamped, capped, notes = _interval_from_curves(unit, c, x, alpha, upper_curve, lower_curve, "transition", theta_hat)
    # below the Theta -> -infinity limit of the upper curve no lower bound exists at all
    q_limit = table.tracy_widom(1 - alpha / 2)
    one_sided = clamped and x <= c.lambda_plus + c.kappa1 * unit.N ** (-2 / 3) * q_limit + c.kappa3 / unit.N
    return StrengthInterval(
        lo * theta_scale,
        hi * theta_scale,
        alpha,
        one_sided,
        clamped and not one_sided,
        spec,
        lam=lam,
        theta_hat=theta_hat * theta_scale,
        method="transition",
        clamped_upper=capped,
        warnings=notes,
    )


def gaussian_interval(spec: ModelSpec, lam: float, alpha: float = 0.05, method: str = "direct") -> StrengthInterval:
    """Gaussian-approximation interval for the strength behind ``lam``.

    ``direct`` is the plug-in interval theta(lam) +- z sigma(lam)/sqrt(N)
    with sigma(lam) = sqrt(V(theta))/lambda'(theta) at theta = theta(lam).
    ``transposed`` inverts the Gaussian quantile curves
    lambda(theta) +- z sqrt(V(theta)/N) instead. A ``direct`` interval for
    an eigenvalue at or below the bulk edge is reported as diverged and
    spans the whole admissible range.
    """
    lam = float(lam)
    if not math.isfinite(lam):
        raise DomainError("eigenvalue must be finite")
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    theta_scale, lam_scale = noise_scales(spec)
    unit = _unit(spec)
    c = model_constants(unit)
    x = lam / lam_scale
    z = normal_quantile(1 - alpha / 2)
    N = unit.N
    adm_max = c.theta_admissible_max

    if method == "direct":
        if x <= c.lambda_plus:
            return StrengthInterval(
                c.theta_admissible_min * theta_scale,
                adm_max * theta_scale if math.isfinite(adm_max) else math.inf,
                alpha, True, False, spec, lam=lam, method="gaussian-direct", diverged=True,
                warnings=["eigenvalue does not exceed the bulk edge; the Gaussian interval diverges"],
            )
        th = theta_of_lambda(unit, x)
        slope = lambda_prime(unit, th)
        half = z * math.sqrt(max(_v_raw(unit, th), 0.0)) / slope / math.sqrt(N) if slope > 0 else math.inf
        lo, hi = th - half, th + half
        notes = []
        diverged = not math.isfinite(half)
        clamped = lo < c.theta_admissible_min
        capped = hi > adm_max
        if clamped or capped:
            notes.append("interval clipped to the admissible range")
        return StrengthInterval(
            max(lo, c.theta_admissible_min) * theta_scale,
            min(hi, adm_max) * theta_scale,
            alpha, False, clamped, spec, lam=lam, theta_hat=th * theta_scale,
            method="gaussian-direct", diverged=diverged, clamped_upper=capped, warnings=notes,
        )
    if method != "transposed":
        raise DomainError("method must be 'direct' or 'transposed'")

    def gauss_curve(sign):
        def curve(t):
            t = np.asarray(t, dtype=np.float64)
            out = np.full(t.shape, c.lambda_plus)
            sup = t > c.theta_c
            if sup.any():
                out[sup] = _lambda_array(unit, t[sup]) + sign * z * np.sqrt(_v_array(unit, t[sup]) / N)
            return out

        return curve

    theta_hat = theta_of_lambda(unit, x) if x > c.lambda_plus else math.nan
    lo, hi, clamped, capped, notes = _interval_from_curves(
        unit, c, x, alpha, gauss_curve(+1), gauss_curve(-1), "gaussian-transposed", theta_hat
    )
    return StrengthInterval(
        lo * theta_scale, hi * theta_scale, alpha, clamped, False, spec, lam=lam,
        theta_hat=theta_hat * theta_scale, method="gaussian-transposed", clamped_upper=capped, warnings=notes,
    )


def classify(interval: StrengthInterval, constants: ModelConstants | None = None) -> Classification:
    """Whether a signal is indistinguishable from noise, possibly subcritical, or informative.

    ``constants`` are the unit-variance model constants; they default to
    those of the interval's model.
    """
    c = model_constants(_unit(interval.spec)) if constants is None else constants
    scale, _ = noise_scales(interval.spec)
    floor = c.theta_admissible_min * scale
    if interval.one_sided or interval.clamped_lower or interval.theta_lower <= floor:
        return Classification.NOISE_COMPATIBLE
    if interval.theta_lower <= c.theta_c * scale:
        return Classification.SUBCRITICAL_COMPATIBLE
    return Classification.INFORMATIVE


# --- coverage harness ------------------------------------------------------


@dataclass
class CoverageRow:
    theta: float
    coverage_transition: float
    coverage_gaussian: float
    coverage_gaussian_lenient: float
    mean_width_transition: float
    mean_width_gaussian: float
    diverged_gaussian: int
    mc_se: float


@dataclass
class CoverageReport:
    spec: ModelSpec
    alpha: float
    reps: int
    rows: list
    top_eigenvalues: np.ndarray = field(repr=False)
    histogram: list = field(default_factory=list)

    def to_rows(self) -> list[dict]:
        return [vars(r) for r in self.rows]


def _replicate_top_eig(spec: ModelSpec, theta: float, index: int, seed: int, noise: str, signal: str) -> float:
    from . import rmt

    stream = rmt.RngStream(seed, index)
    if spec.kind is ModelKind.WIGNER and noise == "gaussian":
        s = math.sqrt(spec.sigma2)
        return s * rmt.wigner_edge_top_eig(spec.N, theta / s, stream.generator())
    return float(rmt.simulate_spiked_model(spec, [theta], noise, signal, stream.generator()).eigenvalues[0])


def _coverage_at(args) -> tuple[CoverageRow, np.ndarray]:
    spec, k, theta, alpha, reps, noise, signal, seed, table = args
    hit_t = hit_g = hit_lenient = 0
    widths_t, widths_g, diverged = [], [], 0
    tops = np.empty(reps)
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore", RuntimeWarning)
        for j in range(reps):
            lam = _replicate_top_eig(spec, theta, (k << 32) + j, seed, noise, signal)
            tops[j] = lam
            ci = confidence_interval(spec, lam, alpha, table)
            gi = gaussian_interval(spec, lam, alpha, "direct")
            hit_t += ci.contains(theta)
            widths_t.append(ci.width)
            if gi.diverged or not math.isfinite(gi.width):
                diverged += 1
                hit_lenient += 1
            else:
                widths_g.append(gi.width)
                hit_g += gi.contains(theta)
                hit_lenient += gi.contains(theta)
    cov_t = hit_t / reps
    row = CoverageRow(
        theta, cov_t, hit_g / reps, hit_lenient / reps, float(np.mean(widths_t)),
        float(np.mean(widths_g)) if widths_g else math.inf, diverged,
        math.sqrt(max(cov_t * (1 - cov_t), 1e-12) / reps),
    )
    return row, tops


def coverage_experiment(
    spec: ModelSpec,
    theta_true,
    alpha: float = 0.05,
    reps: int = 2000,
    noise: str = "gaussian",
    signal: str = "localized",
    seed: int = 0,
    table: QuantileTable | None = None,
    bins: int = 40,
    workers: int = 1,
) -> CoverageReport:
    """Monte Carlo coverage of the transition and Gaussian ``direct`` intervals.

    A diverged Gaussian interval (eigenvalue at or below the bulk edge) is
    a failure of the method and counts as a miss in ``coverage_gaussian``;
    ``coverage_gaussian_lenient`` counts it as covering instead. Replicate
    j at the k-th strength uses random stream k * 2**32 + j, so results do
    not depend on the number of workers.
    """
    if reps < 100:
        raise DomainError("reps must be at least 100")
    thetas = [float(t) for t in theta_true]
    jobs = [(spec, k, t, alpha, reps, noise, signal, seed, table) for k, t in enumerate(thetas)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_coverage_at, jobs))
    else:
        results = [_coverage_at(job) for job in jobs]
    rows = [r for r, _ in results]
    tops = np.vstack([t for _, t in results])
    hist = []
    for k, theta in enumerate(thetas):
        counts, edges = np.histogram(tops[k], bins=bins)
        hist.append({"theta": theta, "counts": counts.tolist(), "edges": edges.tolist()})
    return CoverageReport(spec, alpha, reps, rows, tops, hist)
