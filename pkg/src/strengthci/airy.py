"""Simulation of the transition process T(Theta) by two independent routes.

The corner route samples the top-left corner of the tridiagonal GOE model
and locates its largest eigenvalue under a rank-one spike at the critical
scale. The Green route samples Airy points and chi-square weights and
solves G(w) = -Theta for the random Airy-Green function G.
"""

from __future__ import annotations

import math
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import linalg, optimize

from . import __version__, kernels
from .models import DomainError
from .rmt import RngStream, TridiagonalCorner, chi_variates, sample_tridiag_corner
from .tables import DEFAULT_ALPHAS, QuantileTable, bootstrap_quantile_se

SCALINGS = ("centered", "plain")
GREEN_STREAM_OFFSET = 1 << 62


@dataclass(frozen=True)
class TransitionSimConfig:
    """Settings for corner-route sampling of T(Theta).

    ``scaling="plain"`` uses the spike 1 + Theta N^{-1/3} and reports
    N^{2/3}(lambda_1 - 2). ``scaling="centered"`` (default) solves the
    secular equation of the corner after subtracting the exact semicircle
    mean and restoring the eigenvector-normalization and bulk variance
    lost at finite N, which removes the O(N^{-1/3}) bias of the plain map.
    """

    N: int = 100_000_000
    corner_m: int | None = None
    mc: int = 20_000
    theta_grid: tuple = tuple(round(-3.0 + 0.1 * i, 1) for i in range(91))
    master_seed: int = 0
    scaling: str = "centered"

    def __post_init__(self):
        if self.N < 2:
            raise DomainError("N must be at least 2")
        m = self.m
        if not 1 <= m <= self.N:
            raise DomainError(f"corner size {m} must lie in [1, N]")
        if self.mc < 100:
            raise DomainError("mc must be at least 100")
        grid = np.asarray(self.theta_grid, dtype=np.float64)
        if grid.size == 0 or np.any(np.diff(grid) <= 0) or not np.all(np.isfinite(grid)):
            raise DomainError("theta_grid must be finite and strictly ascending")
        if self.scaling not in SCALINGS:
            raise DomainError(f"scaling must be one of {SCALINGS}")
        object.__setattr__(self, "theta_grid", tuple(float(t) for t in grid))

    @property
    def m(self) -> int:
        return self.corner_m if self.corner_m is not None else math.isqrt(self.N - 1) + 1

    @property
    def tol(self) -> float:
        return 1e-7 * self.N ** (-2 / 3)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["corner_m"] = self.m
        out["theta_grid"] = list(self.theta_grid)
        return out


@dataclass(frozen=True)
class CornerDraw:
    """One replicate of the corner route: the corner plus correction variates."""

    corner: TridiagonalCorner
    weight: float
    shift: float


def draw_corner(cfg: TransitionSimConfig, rng) -> CornerDraw:
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    N = cfg.N
    weight = float(gen.chisquare(N)) / N
    shift = float(gen.standard_normal()) / math.sqrt(N)
    corner = sample_tridiag_corner(N, cfg.m, 0.0, gen)
    return CornerDraw(corner, weight, shift)


def transition_from_corner(draw: CornerDraw, thetas, cfg: TransitionSimConfig) -> np.ndarray:
    """T(Theta) for each Theta from a single corner (shared randomness)."""
    thetas = np.ascontiguousarray(thetas, dtype=np.float64)
    N = draw.corner.source_N
    scale = N ** (-1 / 3)
    d, e = draw.corner.diag, draw.corner.offdiag
    if cfg.scaling == "plain":
        top = kernels.largest_eigenvalue_spiked(d, e, 1.0 + thetas * scale, cfg.tol)
    else:
        if np.any(thetas * scale >= 1):
            raise DomainError("Theta too large for this N: spike scale must stay below 1")
        top = kernels.centered_secular_roots(d, e, thetas, scale, cfg.tol, draw.weight, draw.shift)
    return N ** (2 / 3) * (top - 2.0)


def tracy_widom_from_corner(draw: CornerDraw, cfg: TransitionSimConfig) -> float:
    """Rescaled largest eigenvalue of the unspiked corner."""
    top = kernels.largest_eigenvalue_spiked(draw.corner.diag, draw.corner.offdiag, np.zeros(1), cfg.tol)[0]
    return draw.corner.source_N ** (2 / 3) * (top - 2.0)


def sample_transition(theta: float, cfg: TransitionSimConfig, rng) -> float:
    """One draw of T(Theta) by the corner route."""
    if not math.isfinite(theta):
        raise DomainError("Theta must be finite")
    return float(transition_from_corner(draw_corner(cfg, rng), [theta], cfg)[0])


def _corner_chunk(args):
    cfg, thetas, start, stop, with_tw = args
    out = np.empty((stop - start, len(thetas) + int(with_tw)))
    for k, i in enumerate(range(start, stop)):
        draw = draw_corner(cfg, RngStream(cfg.master_seed, i))
        out[k, : len(thetas)] = transition_from_corner(draw, thetas, cfg)
        if with_tw:
            out[k, -1] = tracy_widom_from_corner(draw, cfg)
    return out


def _run_chunks(func, make_args, total: int, workers: int, chunk: int = 250) -> np.ndarray:
    bounds = [(s, min(s + chunk, total)) for s in range(0, total, chunk)]
    jobs = [make_args(s, e) for s, e in bounds]
    if workers <= 1:
        parts = [func(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(func, jobs))
    return np.concatenate(parts, axis=0)


def transition_samples(cfg: TransitionSimConfig, thetas=None, workers: int = 1, with_tracy_widom: bool = False) -> np.ndarray:
    """Corner-route samples, shape (mc, len(thetas)); replicate i uses stream i."""
    thetas = list(cfg.theta_grid if thetas is None else thetas)
    return _run_chunks(
        _corner_chunk,
        lambda s, e: (cfg, thetas, s, e, with_tracy_widom),
        cfg.mc,
        workers,
    )


def _git_revision() -> str:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


@dataclass
class TableBuild:
    table: QuantileTable
    standard_errors: np.ndarray
    samples: np.ndarray = field(repr=False)


def build_quantile_table(cfg: TransitionSimConfig, alphas=DEFAULT_ALPHAS, workers: int = 1, bootstrap_reps: int = 200) -> TableBuild:
    """Empirical (type 7) quantiles of T(Theta) on the configured grid."""
    alphas = np.asarray(alphas, dtype=np.float64)
    if alphas.size == 0 or np.any(np.diff(alphas) <= 0) or np.any((alphas <= 0) | (alphas >= 1)):
        raise DomainError("alphas must be strictly ascending inside (0, 1)")
    tail = float(min(alphas.min(), 1 - alphas.max()))
    if cfg.mc < 10 / tail:
        raise DomainError(f"mc={cfg.mc} is too small for alpha={tail}: need at least {math.ceil(10 / tail)}")
    raw = transition_samples(cfg, workers=workers, with_tracy_widom=True)
    samples, tw = raw[:, :-1], raw[:, -1]
    values = np.quantile(samples, alphas, axis=0).T
    se = np.vstack([bootstrap_quantile_se(samples[:, j], alphas, bootstrap_reps, seed=j) for j in range(samples.shape[1])])
    tw_q = np.quantile(tw, alphas)
    provenance = {
        "source": "simulated",
        "generator": f"strengthci {__version__}",
        "revision": _git_revision(),
        "N": cfg.N,
        "m": cfg.m,
        "mc": cfg.mc,
        "seed": cfg.master_seed,
        "scaling": cfg.scaling,
        "quantile_type": 7,
        "tracy_widom": {repr(float(a)): float(q) for a, q in zip(alphas, tw_q)},
    }
    if len(cfg.theta_grid) < 2:
        raise DomainError("a quantile table needs at least two Theta values")
    table = QuantileTable(np.asarray(cfg.theta_grid), alphas, values, provenance)
    if table.alpha_monotonicity_violations():
        raise DomainError("simulated quantiles are not strictly increasing in alpha; increase mc")
    if table.theta_monotonicity_violations():
        raise DomainError("simulated quantiles decrease in Theta; check the simulation settings")
    return TableBuild(table, se, samples)


# --- Green route -----------------------------------------------------------


@dataclass(frozen=True)
class AirySample:
    """Descending approximate Airy points a_1 > ... > a_J with their source."""

    points: np.ndarray
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.size < 10:
            raise DomainError("an Airy sample needs at least 10 points")
        if np.any(np.diff(pts) >= 0):
            raise DomainError("Airy points must be strictly descending")
        object.__setattr__(self, "points", pts)

    @property
    def J(self) -> int:
        return self.points.shape[0]

    def head(self, J: int) -> "AirySample":
        return AirySample(self.points[:J], dict(self.source, J=J))


def semicircle_upper_mass(lam: np.ndarray) -> np.ndarray:
    """Semicircle mass above ``lam``."""
    t = np.arcsin(np.clip(lam, -2.0, 2.0) / 2.0)
    return 0.5 - (t + np.sin(t) * np.cos(t)) / np.pi


def unfold_edge(lam: np.ndarray, n: int) -> np.ndarray:
    """Map eigenvalues of an n-dimensional GOE to the Airy scale.

    Points inside the bulk are placed where the Airy counting function
    (2/(3 pi)) |x|^{3/2} matches n times the semicircle mass above them, so
    that the semicircle curvature does not distort deep points; points
    beyond the edge use the matching expansion n^{2/3} d (1 + d/20).
    """
    lam = np.asarray(lam, dtype=np.float64)
    inside = -(1.5 * np.pi * n * semicircle_upper_mass(lam)) ** (2 / 3)
    d = lam - 2.0
    outside = n ** (2 / 3) * d * (1 + d / 20)
    return np.where(lam < 2.0, inside, outside)


def sample_airy_points(n: int = 1000, J: int | None = None, rng=0) -> AirySample:
    """Approximate Airy points from the full n-dimensional tridiagonal model.

    Eigenvalues are divided by sqrt(1 - 1/(2n)), which places the finite-n
    edge at 2, and then unfolded. Points in the bottom tenth of the
    spectral range are never used.
    """
    if n < 20:
        raise DomainError("n must be at least 20")
    J = min(500, n // 2) if J is None else J
    gen = rng.generator() if isinstance(rng, RngStream) else np.random.default_rng(rng) if isinstance(rng, int) else rng
    diag = gen.normal(0.0, math.sqrt(2.0 / n), n)
    offdiag = chi_variates(n - np.arange(1, n, dtype=np.float64), gen) / math.sqrt(n)
    lam = linalg.eigvalsh_tridiagonal(diag, offdiag, lapack_driver="stev")[::-1]
    lam = lam / math.sqrt(1 - 0.5 / n)
    floor = lam[-1] + 0.1 * (lam[0] - lam[-1])
    reliable = int(np.count_nonzero(lam > floor))
    J = min(J, reliable)
    return AirySample(unfold_edge(lam[:J], n), {"n": n, "J": J})


def tail_cutoff(a_J: float, refine: bool = True) -> float:
    """Depth where the continuum replaces the discrete points (midpoint rule)."""
    u0 = -a_J
    if u0 <= 0:
        raise DomainError("the last Airy point must be negative")
    return u0 + 0.5 * math.pi / math.sqrt(u0) if refine else u0


def green_tail_mean(w: float, u0: float) -> float:
    """Counterterm plus the integral of sqrt(u)/pi / (w + u) over u > u0."""
    if w > 0:
        return -(2 / math.pi) * math.sqrt(u0) - math.sqrt(w) + (2 / math.pi) * math.sqrt(w) * math.atan(math.sqrt(u0 / w))
    if w == 0:
        return -(2 / math.pi) * math.sqrt(u0)
    v = -w
    if v >= u0:
        raise DomainError("w lies inside the continuum part of the spectrum")
    return -(2 / math.pi) * math.sqrt(u0) + (2 / math.pi) * math.sqrt(v) * math.atanh(math.sqrt(v / u0))


def green_tail_variance(w: float, u0: float) -> float:
    """Variance of sum (xi_j^2 - 1)/(w - a_j) over the points beyond u0."""
    if w > 0:
        r = math.sqrt(u0) / (w + u0) + math.atan(math.sqrt(w / u0)) / math.sqrt(w)
    elif w == 0:
        r = 2 / math.sqrt(u0)
    else:
        v = -w
        r = math.sqrt(u0) / (u0 - v) + math.atanh(math.sqrt(v / u0)) / math.sqrt(v)
    return (2 / math.pi) * r


def airy_green(w: float, sample: AirySample, weights, tail_noise: float = 0.0, refine: bool = True) -> float:
    """Truncated Airy-Green function with its deterministic tail completion.

    ``tail_noise`` is a standard normal variate scaling the fluctuation of
    the discarded points; zero gives the conditional mean given the kept points.
    """
    a = sample.points
    if w <= a[0]:
        raise DomainError("w must exceed the largest Airy point")
    weights = np.asarray(weights, dtype=np.float64)
    u0 = tail_cutoff(a[-1], refine)
    value = float(np.sum(weights / (w - a))) + green_tail_mean(w, u0)
    if tail_noise:
        value += tail_noise * math.sqrt(green_tail_variance(w, u0))
    return value


def solve_transition_from_green(theta: float, sample: AirySample, weights, tail_noise: float = 0.0, refine: bool = True) -> float:
    """The unique w > a_1 with G(w) = -Theta."""
    if not math.isfinite(theta):
        raise DomainError("Theta must be finite")
    a1 = sample.points[0]

    def f(w):
        return airy_green(w, sample, weights, tail_noise, refine) + theta

    step = 1.0
    lo, hi = a1 + 1e-300 + 1e-15 * max(1.0, abs(a1)), a1 + step
    for _ in range(200):
        if f(hi) < 0:
            break
        lo = hi
        step *= 2.0
        hi = a1 + step
    else:
        raise DomainError("no sign change of G(w) + Theta after 200 doublings")
    return optimize.brentq(f, lo, hi, xtol=1e-9, rtol=4 * np.finfo(float).eps)


@dataclass(frozen=True)
class GreenSimConfig:
    n: int = 1000
    J: int | None = None
    mc: int = 10_000
    master_seed: int = 0


def green_draw(cfg: GreenSimConfig, index: int):
    """Airy points, weights and tail variate for one replicate."""
    gen = RngStream(cfg.master_seed, GREEN_STREAM_OFFSET + index).generator()
    sample = sample_airy_points(cfg.n, cfg.J, gen)
    weights = gen.chisquare(1.0, sample.J)
    return sample, weights, float(gen.standard_normal())


def _green_chunk(args):
    cfg, thetas, start, stop = args
    out = np.empty((stop - start, len(thetas)))
    for k, i in enumerate(range(start, stop)):
        sample, weights, z = green_draw(cfg, i)
        out[k] = [solve_transition_from_green(t, sample, weights, z) for t in thetas]
    return out


def green_transition_samples(cfg: GreenSimConfig, thetas, workers: int = 1) -> np.ndarray:
    """Green-route samples, shape (mc, len(thetas))."""
    thetas = list(thetas)
    return _run_chunks(_green_chunk, lambda s, e: (cfg, thetas, s, e), cfg.mc, workers, chunk=100)
