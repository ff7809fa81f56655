"""Limit spectral densities, Stieltjes transforms and noise-variance estimation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from .models import DomainError, ModelKind, ModelSpec, model_constants

QUAD_TOL = 1e-12


class UnsupportedModelError(DomainError):
    """The operation is not defined for this model."""


def _support(spec: ModelSpec) -> tuple[float, float]:
    const = model_constants(spec)
    return const.lambda_minus, const.lambda_plus


def density(spec: ModelSpec, x: float) -> float:
    """Semicircle, Marchenko-Pastur or Wachter density at ``x``."""
    lo, hi = _support(spec)
    if not lo < x < hi:
        return 0.0
    root = math.sqrt((hi - x) * (x - lo))
    if spec.kind is ModelKind.WIGNER:
        return root / (2 * math.pi)
    if spec.kind is ModelKind.CCA:
        return spec.tau_n * root / (2 * math.pi * x * (1 - x))
    return root / (2 * math.pi * spec.gamma2 * x)


def _angle_integrand(spec: ModelSpec, g):
    # x = lo + (hi - lo)(1 - cos t)/2 turns both square-root edges into
    # smooth endpoints: rho(x) dx = f(t) dt with f bounded.
    lo, hi = _support(spec)
    half = (hi - lo) / 2

    def f(t):
        x = lo + half * (1 - math.cos(t))
        if x <= lo or x >= hi:
            return 0.0
        return density(spec, x) * half * math.sin(t) * g(x)

    return f, lo, half


def _angle_of(spec: ModelSpec, x: float) -> float:
    lo, hi = _support(spec)
    u = 1 - 2 * (x - lo) / (hi - lo)
    return math.acos(min(1.0, max(-1.0, u)))


def integrate_density(spec: ModelSpec, a: float, b: float, g=lambda x: 1.0) -> float:
    """Integral of g(x) rho(x) over [a, b] by adaptive Gauss-Kronrod."""
    lo, hi = _support(spec)
    a, b = max(a, lo), min(b, hi)
    if b <= a:
        return 0.0
    f, _, _ = _angle_integrand(spec, g)
    val, _ = integrate.quad(f, _angle_of(spec, a), _angle_of(spec, b), epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
    return val


def cdf(spec: ModelSpec, x: float) -> float:
    lo, hi = _support(spec)
    if x <= lo:
        return 0.0
    if x >= hi:
        return 1.0
    return min(1.0, max(0.0, integrate_density(spec, lo, x)))


def quantile(spec: ModelSpec, p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability {p} outside [0, 1]")
    lo, hi = _support(spec)
    if p == 0.0:
        return lo
    if p == 1.0:
        return hi
    return optimize.brentq(lambda x: cdf(spec, x) - p, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps)


def _edge_root(z: complex, lo: float, hi: float) -> complex:
    # product of principal roots: analytic off [lo, hi] and ~ z at infinity
    return np.sqrt(complex(z) - lo) * np.sqrt(complex(z) - hi)


def stieltjes(spec: ModelSpec, z: complex) -> complex:
    """m(z) = integral of rho(x)/(z - x), normalized so m(z) ~ 1/z at infinity."""
    z = complex(z)
    lo, hi = _support(spec)
    if z.imag == 0 and lo <= z.real <= hi:
        raise DomainError("z lies on the support of the density")
    q = _edge_root(z, lo, hi)
    if spec.kind is ModelKind.WIGNER:
        return (z - q) / 2
    if spec.kind is ModelKind.CCA:
        tn = spec.tau_n
        return ((1 - tn / 2) * z + (tn / 2) * math.sqrt(lo * hi) + (tn / 2) * q) / (z * (z - 1))
    g2 = spec.gamma2
    return (z - 1 + g2 - q) / (2 * g2 * z)


@dataclass(frozen=True)
class TrimCalibration:
    lower_cut: float
    upper_cut: float
    sigma0_sq: float


@lru_cache(maxsize=64)
def _trim_calibration(spec: ModelSpec) -> TrimCalibration:
    lower, upper = quantile(spec, 0.25), quantile(spec, 0.75)
    if spec.kind is ModelKind.WIGNER:
        sigma0_sq = integrate_density(spec, lower, upper, lambda x: x * x)
    else:
        sigma0_sq = integrate_density(spec, lower, upper, lambda x: x)
    return TrimCalibration(lower, upper, sigma0_sq)


def trim_calibration(spec: ModelSpec) -> TrimCalibration:
    """Quartile cut points and the trimmed moment of the limit density.

    The second moment is used for Wigner matrices, the first moment for
    sample covariance matrices.
    """
    if spec.kind is ModelKind.CCA:
        raise UnsupportedModelError("canonical correlations do not depend on the noise variance")
    return _trim_calibration(_unit_spec(spec))


def _unit_spec(spec: ModelSpec) -> ModelSpec:
    return ModelSpec(spec.kind, spec.N, spec.S, spec.M, 1.0)


def estimate_sigma2(spec: ModelSpec, eigs) -> float:
    """Noise variance from the middle half of the spectrum.

    Eigenvalues are sorted in descending order; indices floor(N/4)+1
    through floor(3N/4) (one-based) are kept.
    """
    if spec.kind is ModelKind.CCA:
        raise UnsupportedModelError("canonical correlations do not depend on the noise variance")
    lam = np.sort(np.asarray(eigs, dtype=np.float64))[::-1]
    n = lam.shape[0]
    if n < 8:
        raise DomainError("at least 8 eigenvalues are needed")
    middle = lam[n // 4 : (3 * n) // 4]
    cal = trim_calibration(spec)
    if spec.kind is ModelKind.WIGNER:
        return float(np.sum(middle * middle) / (n * cal.sigma0_sq))
    return float(np.sum(middle) / (n * cal.sigma0_sq))


@dataclass(frozen=True)
class LimitDensity:
    """Limit density of a model with its support and cached calibration."""

    spec: ModelSpec

    @property
    def support(self) -> tuple[float, float]:
        return _support(self.spec)

    def __call__(self, x):
        return np.vectorize(lambda t: density(self.spec, t), otypes=[float])(x)

    def cdf(self, x: float) -> float:
        return cdf(self.spec, x)

    def quantile(self, p: float) -> float:
        return quantile(self.spec, p)

    def stieltjes(self, z: complex) -> complex:
        return stieltjes(self.spec, z)

    @property
    def calibration(self) -> TrimCalibration:
        return trim_calibration(self.spec)

    def curve(self, n: int = 400) -> np.ndarray:
        """(x, rho(x)) samples across the support, for plotting or CSV export."""
        lo, hi = self.support
        x = np.linspace(lo, hi, n)
        return np.column_stack([x, self(x)])


def kolmogorov_distance(spec: ModelSpec, eigs) -> float:
    """Sup distance between the empirical spectral cdf and the limit cdf."""
    lam = np.sort(np.asarray(eigs, dtype=np.float64))
    n = lam.shape[0]
    F = np.array([cdf(spec, x) for x in lam])
    upper = np.arange(1, n + 1) / n - F
    lower = F - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))
