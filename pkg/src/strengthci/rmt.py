"""Random-matrix samplers, tridiagonal eigensolvers and secular-equation oracles."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import linalg

from . import kernels
from .models import DomainError, ModelKind, ModelSpec, model_constants, noise_scales

_MASK64 = (1 << 64) - 1
CHI_EXACT_MAX_DOF = 10_000


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by ``(master_seed, stream_index)``.

    The pair is packed into the 128-bit Philox key, so distinct stream
    indices never overlap and any replicate can be regenerated alone.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= int(value) <= _MASK64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value!r}")

    def generator(self) -> np.random.Generator:
        key = (int(self.master_seed) << 64) | int(self.stream_index)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, index: int) -> "RngStream":
        return RngStream(self.master_seed, index)


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return RngStream(int(rng)).generator()


def chi_variates(dof: np.ndarray, gen: np.random.Generator, exact_max_dof: float = CHI_EXACT_MAX_DOF) -> np.ndarray:
    """Chi variates; exact through gamma draws up to ``exact_max_dof``.

    Above that the normal approximation ``sqrt(k - 1/2) + Z/sqrt(2)`` is used.
    """
    dof = np.asarray(dof, dtype=np.float64)
    out = np.empty_like(dof)
    exact = dof <= exact_max_dof
    out[exact] = np.sqrt(2.0 * gen.standard_gamma(dof[exact] / 2.0))
    approx = ~exact
    out[approx] = np.sqrt(dof[approx] - 0.5) + gen.standard_normal(int(approx.sum())) / math.sqrt(2.0)
    return out


@dataclass(frozen=True)
class TridiagonalCorner:
    """Top-left m-by-m corner of the N-by-N tridiagonal GOE model."""

    diag: np.ndarray
    offdiag: np.ndarray
    source_N: int

    def __post_init__(self):
        if self.offdiag.shape[0] != self.diag.shape[0] - 1:
            raise DomainError("offdiag must have length m - 1")
        if self.diag.shape[0] > self.source_N:
            raise DomainError("corner size exceeds the source dimension")

    @property
    def m(self) -> int:
        return self.diag.shape[0]

    def truncate(self, m: int) -> "TridiagonalCorner":
        """The smaller corner sharing this corner's entries."""
        if not 1 <= m <= self.m:
            raise DomainError(f"cannot truncate an {self.m}-corner to size {m}")
        return TridiagonalCorner(self.diag[:m].copy(), self.offdiag[: m - 1].copy(), self.source_N)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def sample_tridiag_corner(N: int, m: int, spike: float, rng) -> TridiagonalCorner:
    """Corner of the tridiagonal model whose eigenvalues fill [-2, 2].

    Diagonal entries are N(0, 2/N), the k-th off-diagonal entry is
    chi_{N-k}/sqrt(N), and ``spike`` is added to entry (1, 1).
    """
    if N < 2:
        raise DomainError("N must be at least 2")
    if not 1 <= m <= N:
        raise DomainError(f"corner size m={m} must lie in [1, N={N}]")
    gen = as_generator(rng)
    diag = gen.normal(0.0, math.sqrt(2.0 / N), m)
    offdiag = chi_variates(N - np.arange(1, m, dtype=np.float64), gen) / math.sqrt(N)
    diag[0] += spike
    return TridiagonalCorner(diag, offdiag, N)


def tridiag_top_eigs(T: TridiagonalCorner, k: int, tol: float = 1e-12) -> np.ndarray:
    """The k largest eigenvalues by Sturm counting and bisection, descending."""
    if not 1 <= k <= T.m:
        raise DomainError(f"k={k} must lie in [1, m={T.m}]")
    if tol <= 0:
        raise DomainError("tol must be positive")
    if not (np.all(np.isfinite(T.diag)) and np.all(np.isfinite(T.offdiag))):
        raise DomainError("tridiagonal entries must be finite")
    if T.m == 1:
        return T.diag.copy()
    return kernels.top_eigenvalues(T.diag, T.offdiag, k, tol)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order together with their model context."""

    eigenvalues: np.ndarray
    spec: ModelSpec | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        eigs = np.sort(np.asarray(self.eigenvalues, dtype=np.float64))[::-1]
        object.__setattr__(self, "eigenvalues", eigs)

    def __len__(self):
        return self.eigenvalues.shape[0]

    def standardized(self, sigma2: float) -> "Spectrum":
        """Spectrum rescaled to unit noise variance."""
        if self.spec is None:
            raise DomainError("standardizing needs a model spec")
        spec = ModelSpec(self.spec.kind, self.spec.N, self.spec.S, self.spec.M, sigma2)
        _, lam_scale = noise_scales(spec)
        return Spectrum(self.eigenvalues / lam_scale, self.spec, dict(self.meta, sigma2_used=sigma2))

    def save(self, path) -> None:
        """Write one eigenvalue per line plus a JSON sidecar with the spec."""
        path = Path(path)
        path.write_text("".join(f"{x!r}\n" for x in self.eigenvalues.tolist()))
        header = {"spec": self.spec.to_dict() if self.spec else None, "meta": self.meta}
        path.with_name(path.name + ".json").write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "Spectrum":
        path = Path(path)
        eigs = read_eigenvalues(path)
        sidecar = path.with_name(path.name + ".json")
        spec, meta = None, {}
        if sidecar.exists():
            header = json.loads(sidecar.read_text())
            spec = ModelSpec.from_dict(header["spec"]) if header.get("spec") else None
            meta = header.get("meta", {})
        return cls(eigs, spec, meta)


def read_eigenvalues(path) -> np.ndarray:
    values = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise DomainError(f"{path}:{lineno}: not a number: {line!r}") from None
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{path}: non-finite eigenvalue")
    return arr


def sample_goe_dense(N: int, sigma: float, rng) -> Spectrum:
    """Eigenvalues of (Z + Z^T)/sqrt(2N) with Z i.i.d. N(0, sigma^2)."""
    if N < 1:
        raise DomainError("N must be positive")
    gen = as_generator(rng)
    Z = gen.normal(0.0, sigma, (N, N))
    E = (Z + Z.T) / math.sqrt(2 * N)
    return Spectrum(np.linalg.eigvalsh(E), ModelSpec("wigner", N, sigma2=sigma * sigma))


class NoiseFamily(str, enum.Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"
    BERNOULLI_HALF = "bernoulli_half"
    BINOMIAL_2_03 = "binomial_2_0.3"


class SignalKind(str, enum.Enum):
    LOCALIZED = "localized"
    DELOCALIZED = "delocalized"


def standardized_noise(family: NoiseFamily, shape, gen: np.random.Generator) -> np.ndarray:
    """I.i.d. entries with mean 0 and variance 1 from the given family."""
    family = NoiseFamily(family)
    if family is NoiseFamily.GAUSSIAN:
        return gen.standard_normal(shape)
    if family is NoiseFamily.UNIFORM:
        return (gen.random(shape) - 0.5) * math.sqrt(12.0)
    if family is NoiseFamily.BERNOULLI_HALF:
        return 2.0 * gen.integers(0, 2, shape) - 1.0
    return (gen.binomial(2, 0.3, shape) - 0.6) / math.sqrt(0.42)


def signal_vectors(dim: int, r: int, kind: SignalKind) -> np.ndarray:
    """Orthonormal signal directions as columns of a dim-by-r matrix."""
    kind = SignalKind(kind)
    if r > dim:
        raise DomainError("more spikes than dimensions")
    out = np.zeros((dim, r))
    if kind is SignalKind.LOCALIZED:
        out[np.arange(r), np.arange(r)] = 1.0
        return out
    if r > 0:
        out[:, 0] = 1.0 / math.sqrt(dim)
    grid = np.arange(dim)
    for i in range(1, r):
        col = np.cos(2 * np.pi * i * grid / dim + np.pi / 4)
        out[:, i] = col / np.linalg.norm(col)
    q, _ = np.linalg.qr(out)
    # keep the sign convention of the constructed vectors
    return q * np.sign(np.sum(q * out, axis=0))


def simulate_spiked_model(spec: ModelSpec, thetas, noise="gaussian", signal="localized", rng=0) -> Spectrum:
    """Spectrum of one draw from the spiked model described by ``spec``.

    ``thetas`` are in data units: the Wigner noise has entry variance
    sigma^2, covariance and factor noise has variance sigma^2.
    """
    thetas = np.asarray(list(thetas), dtype=np.float64)
    noise, signal = NoiseFamily(noise), SignalKind(signal)
    if thetas.size > 1 and np.any(np.diff(thetas) >= 0):
        raise DomainError("thetas must be strictly decreasing")
    const = model_constants(spec)
    theta_scale, _ = noise_scales(spec)
    std = thetas / theta_scale
    if std.size and (np.any(std <= const.theta_admissible_min) or np.any(std > const.theta_admissible_max)):
        raise DomainError("thetas outside the admissible range")
    if noise is not NoiseFamily.GAUSSIAN and spec.kind not in (ModelKind.WIGNER, ModelKind.FACTOR):
        raise DomainError(f"non-Gaussian noise is supported for Wigner and factor models, not {spec.kind.value}")
    gen = as_generator(rng)
    N, r = spec.N, thetas.size
    sigma = math.sqrt(spec.sigma2)
    if spec.kind is ModelKind.WIGNER:
        Z = sigma * standardized_noise(noise, (N, N), gen)
        U = signal_vectors(N, r, signal)
        A = (Z + Z.T) / math.sqrt(2 * N) + (U * thetas) @ U.T
        return Spectrum(np.linalg.eigvalsh(A), spec)
    if spec.kind is ModelKind.COVARIANCE:
        S = spec.S
        U = signal_vectors(N, r, signal)
        root = sigma * np.eye(N) + (U * (np.sqrt(thetas) - sigma)) @ U.T
        X = root @ gen.standard_normal((N, S))
        return Spectrum(_sample_cov_eigs(X, S), spec)
    if spec.kind is ModelKind.FACTOR:
        S = spec.S
        U = signal_vectors(N, r, signal)
        V = signal_vectors(S, r, signal)
        X = (U * np.sqrt(thetas * S)) @ V.T + sigma * standardized_noise(noise, (N, S), gen)
        return Spectrum(_sample_cov_eigs(X, S), spec)
    Uc, Vc = _cca_samples(spec, thetas, gen)
    return Spectrum(squared_canonical_correlations(Uc, Vc), spec)


def _sample_cov_eigs(X: np.ndarray, S: int) -> np.ndarray:
    return np.linalg.svd(X, compute_uv=False) ** 2 / S


def _cca_samples(spec: ModelSpec, thetas: np.ndarray, gen: np.random.Generator):
    N, M, S = spec.N, spec.M, spec.S
    Uc = gen.standard_normal((N, S))
    Vc = gen.standard_normal((M, S))
    r = thetas.size
    # pair i: v_i = sqrt(theta) u_i + sqrt(1 - theta) noise, correlation^2 = theta
    Vc[:r] = np.sqrt(thetas)[:, None] * Uc[:r] + np.sqrt(1 - thetas)[:, None] * Vc[:r]
    return Uc, Vc


def squared_canonical_correlations(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Squared sample canonical correlations between the row spaces of U and V."""
    qu, _ = np.linalg.qr(U.T)
    qv, _ = np.linalg.qr(V.T)
    c = np.linalg.svd(qu.T @ qv, compute_uv=False)
    k = min(U.shape[0], V.shape[0])
    return np.clip(c[:k], 0.0, 1.0) ** 2


def canonical_correlations_direct(U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Squared canonical correlations from the defining eigenvalue problem.

    Eigenvalues of (U U^T)^{-1} U V^T (V V^T)^{-1} V U^T; used only to
    cross-check the orthonormalization route on small instances.
    """
    Suu, Svv, Suv = U @ U.T, V @ V.T, U @ V.T
    mat = np.linalg.solve(Suu, Suv) @ np.linalg.solve(Svv, Suv.T)
    return np.sort(np.linalg.eigvals(mat).real)[::-1]


def secular_residual(theta: float, a: float, base_eigs, overlaps, relative: bool = False) -> float:
    """Residual of 1/theta = sum_i overlaps_i^2 / (a - base_eigs_i).

    Vanishes when ``a`` is an eigenvalue of base + theta u u^T with
    ``overlaps`` the coordinates of u in the base eigenbasis. With
    ``relative`` the residual is divided by the magnitude of the terms.
    """
    lam = np.asarray(base_eigs, dtype=np.float64)
    w = np.asarray(overlaps, dtype=np.float64) ** 2
    gaps = a - lam
    if np.any(gaps == 0):
        raise ZeroDivisionError("a coincides with a base eigenvalue")
    terms = w / gaps
    res = 1.0 / theta - terms.sum()
    if relative:
        return res / (abs(1.0 / theta) + np.abs(terms).sum())
    return float(res)


def covariance_secular_residual(a: float, row_sq_norm: float, base_eigs, overlaps) -> float:
    """Relative residual of the one-row update equation for sample covariances.

    ``row_sq_norm`` is the squared length of the added row, ``base_eigs``
    the squared singular values of the remaining rows and ``overlaps`` the
    coordinates of the added row's direction in their right singular basis.
    """
    lam = np.asarray(base_eigs, dtype=np.float64)
    w = np.asarray(overlaps, dtype=np.float64) ** 2
    terms = lam * w / (a - lam)
    lhs = row_sq_norm * (1.0 + terms.sum())
    scale = abs(row_sq_norm) * (1.0 + np.abs(terms).sum()) + abs(a)
    return float((lhs - a) / scale)


def factor_secular_residual(a: float, theta: float, base_eigs, u_overlaps, v_overlaps) -> float:
    """Relative residual of the rank-one signal-plus-noise singular value equation.

    ``base_eigs`` has length S with zeros past the N noise singular values;
    ``u_overlaps`` has length N and ``v_overlaps`` length S.
    """
    lam = np.asarray(base_eigs, dtype=np.float64)
    pu = np.asarray(u_overlaps, dtype=np.float64)
    pv = np.asarray(v_overlaps, dtype=np.float64)
    n = pu.shape[0]
    gaps = a - lam
    cross = np.sqrt(lam[:n]) * pu * pv[:n] / gaps[:n]
    left = (1.0 - math.sqrt(theta) * cross.sum()) ** 2
    su = pu**2 / gaps[:n]
    sv = pv**2 / gaps
    right = a * theta * su.sum() * sv.sum()
    scale = (1.0 + math.sqrt(theta) * np.abs(cross).sum()) ** 2 + a * theta * np.abs(su).sum() * np.abs(sv).sum()
    return float((left - right) / scale)


def cca_secular_residual(a: float, u_star, v_star, u_basis, v_basis, corr) -> float:
    """Relative residual of the one-pair update equation for canonical correlations.

    ``u_star`` and ``v_star`` are the added rows (length S); ``u_basis``
    (S by N-1) and ``v_basis`` (S by M-1) hold the sample canonical
    variables of the remaining rows, with ``<u_i, v_j> = corr_i`` on the
    diagonal. ``corr`` has length M-1, zero past N-1.
    """
    us, vs = np.asarray(u_star, float), np.asarray(v_star, float)
    Ub, Vb = np.asarray(u_basis, float), np.asarray(v_basis, float)
    c = np.asarray(corr, dtype=np.float64)
    n1 = Ub.shape[1]
    ci = c[:n1]
    uu, vu = us @ Ub, vs @ Ub
    uv, vv = us @ Vb, vs @ Vb
    dj, di = a - c**2, a - ci**2
    uu_pad = np.zeros_like(c)
    uu_pad[:n1] = uu
    vu_pad = np.zeros_like(c)
    vu_pad[:n1] = vu
    t1 = uv * (c * vu_pad - a * vv) / dj
    t2 = a * uu * (vu - ci * vv[:n1]) / di
    left = (us @ vs + t1.sum() - t2.sum()) ** 2
    f1 = (uv**2 - 2 * c * uv * uu_pad) / dj
    f2 = a * uu**2 / di
    g1 = (vu**2 - 2 * ci * vu * vv[:n1]) / di
    g2 = a * vv**2 / dj
    first = -(us @ us) + f1.sum() + f2.sum()
    second = -(vs @ vs) + g1.sum() + g2.sum()
    right = a * first * second
    scale_l = (abs(us @ vs) + np.abs(t1).sum() + np.abs(t2).sum()) ** 2
    scale_r = a * ((us @ us) + np.abs(f1).sum() + np.abs(f2).sum()) * ((vs @ vs) + np.abs(g1).sum() + np.abs(g2).sum())
    return float((left - right) / (scale_l + scale_r))


def cca_canonical_basis(U: np.ndarray, V: np.ndarray):
    """Canonical variables of two row spaces.

    Returns ``(u_basis, v_basis, corr)`` with orthonormal columns spanning
    the row spaces and ``u_basis.T @ v_basis`` diagonal with entries ``corr``.
    """
    qu, _ = np.linalg.qr(U.T)
    qv, _ = np.linalg.qr(V.T)
    P, c, Rt = np.linalg.svd(qu.T @ qv)
    corr = np.zeros(qv.shape[1])
    corr[: c.shape[0]] = c
    return qu @ P, qv @ Rt.T, corr


def interlaces(upper, lower, tol: float = 1e-10) -> bool:
    """Check upper_1 >= lower_1 >= upper_2 >= ... for descending sequences."""
    up = np.sort(np.asarray(upper, dtype=np.float64))[::-1]
    lo = np.sort(np.asarray(lower, dtype=np.float64))[::-1]
    if not (lo.shape[0] in (up.shape[0], up.shape[0] - 1)):
        raise DomainError("sequence lengths cannot interlace")
    scale = tol * max(1.0, float(np.max(np.abs(up))) if up.size else 1.0)
    if np.any(lo > up[: lo.shape[0]] + scale):
        return False
    n_next = min(lo.shape[0], up.shape[0] - 1)
    return not np.any(up[1 : 1 + n_next] > lo[:n_next] + scale)


def wigner_edge_top_eig(N: int, theta: float, rng, tol: float = 1e-12) -> float:
    """Largest eigenvalue of a Gaussian spiked Wigner matrix via its tridiagonal form.

    Householder tridiagonalization fixes the first basis vector, so the
    full (m = N) tridiagonal model with the spike on entry (1, 1) has the
    same law as the dense matrix with a rank-one spike in any direction.
    """
    T = sample_tridiag_corner(N, N, theta, rng)
    return float(kernels.largest_eigenvalue_spiked(T.diag, T.offdiag, np.zeros(1), tol)[0])


def dense_spiked_wigner(N: int, theta: float, direction: np.ndarray, rng):
    """Base matrix, spiked matrix and the spike direction for oracle checks."""
    gen = as_generator(rng)
    Z = gen.standard_normal((N, N))
    B = (Z + Z.T) / math.sqrt(2 * N)
    u = np.asarray(direction, dtype=np.float64)
    u = u / np.linalg.norm(u)
    return B, B + theta * np.outer(u, u), u


def tridiagonal_eigvals_dense(T: TridiagonalCorner) -> np.ndarray:
    """All eigenvalues of the corner from LAPACK, descending."""
    if T.m == 1:
        return T.diag.copy()
    return linalg.eigvalsh_tridiagonal(T.diag, T.offdiag)[::-1]
