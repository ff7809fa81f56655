"""Spiked-model parameter zoo.

Closed-form maps between the spike strength ``theta`` and the location
``lambda`` of the corresponding outlier eigenvalue, the Gaussian variance
``V(theta)`` of that outlier, and the critical constants of each model.
Every formula here works at unit noise variance; data are standardized
before they reach this module.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is valid."""


class SubcriticalEigenvalueError(DomainError):
    """The eigenvalue does not exceed the bulk edge, so no point estimate exists."""


class ModelKind(str, enum.Enum):
    WIGNER = "wigner"
    COVARIANCE = "cov"
    FACTOR = "factor"
    CCA = "cca"

    @classmethod
    def parse(cls, value: "ModelKind | str") -> "ModelKind":
        if isinstance(value, ModelKind):
            return value
        aliases = {"covariance": "cov", "spikedcovariance": "cov"}
        key = str(value).lower()
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise DomainError(f"unknown model kind {value!r}") from None


@dataclass(frozen=True)
class ModelSpec:
    """Model kind, dimensions and noise variance.

    ``N`` is the dimension of the observed matrix, ``S`` the number of
    samples (covariance, factor, CCA) and ``M`` the second dimension in CCA.
    Shapes outside the canonical convention are normalized by swapping
    roles, so a covariance/factor spec always has ``N <= S`` and a CCA spec
    always has ``N <= M``.
    """

    kind: ModelKind
    N: int
    S: int | None = None
    M: int | None = None
    sigma2: float = 1.0

    def __post_init__(self):
        kind = ModelKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        if not _is_positive_int(self.N):
            raise DomainError(f"N must be a positive integer, got {self.N!r}")
        if not (isinstance(self.sigma2, (int, float)) and math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise DomainError(f"sigma2 must be positive and finite, got {self.sigma2!r}")
        object.__setattr__(self, "sigma2", float(self.sigma2))
        if kind is ModelKind.WIGNER:
            if self.S is not None or self.M is not None:
                raise DomainError("the Wigner model takes only N")
        elif kind in (ModelKind.COVARIANCE, ModelKind.FACTOR):
            if self.M is not None:
                raise DomainError(f"the {kind.value} model takes N and S only")
            if not _is_positive_int(self.S):
                raise DomainError(f"S must be a positive integer, got {self.S!r}")
            if self.N > self.S:
                n, s = self.N, self.S
                object.__setattr__(self, "N", s)
                object.__setattr__(self, "S", n)
        else:
            if not (_is_positive_int(self.S) and _is_positive_int(self.M)):
                raise DomainError("CCA needs positive integers N, M and S")
            if self.sigma2 != 1.0:
                raise DomainError("CCA does not depend on the noise level; sigma2 must be 1")
            if self.N > self.M:
                n, m = self.N, self.M
                object.__setattr__(self, "N", m)
                object.__setattr__(self, "M", n)
            tau_n, tau_m = self.S / self.N, self.S / self.M
            if not (tau_n > 1 and tau_m > 1):
                raise DomainError("CCA requires S > N and S > M (tau_N > 1, tau_M > 1)")
            if not (1 / tau_n + 1 / tau_m < 1):
                raise DomainError("CCA requires N + M < S (1/tau_N + 1/tau_M < 1)")

    @property
    def gamma2(self) -> float:
        if self.kind not in (ModelKind.COVARIANCE, ModelKind.FACTOR):
            raise DomainError("gamma^2 is defined for the covariance and factor models")
        return self.N / self.S

    @property
    def gamma(self) -> float:
        return math.sqrt(self.gamma2)

    @property
    def tau_n(self) -> float:
        self._require_cca()
        return self.S / self.N

    @property
    def tau_m(self) -> float:
        self._require_cca()
        return self.S / self.M

    def _require_cca(self):
        if self.kind is not ModelKind.CCA:
            raise DomainError("tau_N and tau_M are defined for CCA only")

    def shape(self) -> dict:
        """Shape parameters as a plain dictionary."""
        if self.kind is ModelKind.WIGNER:
            return {}
        if self.kind is ModelKind.CCA:
            return {"tau_N": self.tau_n, "tau_M": self.tau_m}
        return {"gamma2": self.gamma2}

    def to_dict(self) -> dict:
        out = asdict(self)
        out["kind"] = self.kind.value
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        unknown = set(data) - {"kind", "N", "S", "M", "sigma2"}
        if unknown:
            raise DomainError(f"unknown ModelSpec fields: {sorted(unknown)}")
        if "kind" not in data or "N" not in data:
            raise DomainError("ModelSpec needs at least 'kind' and 'N'")
        return cls(
            kind=data["kind"],
            N=data["N"],
            S=data.get("S"),
            M=data.get("M"),
            sigma2=data.get("sigma2", 1.0) if data.get("sigma2") is not None else 1.0,
        )

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        return cls.from_dict(json.loads(text))


def _is_positive_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value > 0


@dataclass(frozen=True)
class ModelConstants:
    theta_c: float
    lambda_minus: float
    lambda_plus: float
    kappa1: float
    kappa2: float
    kappa3: float
    theta_admissible_min: float
    theta_admissible_max: float


def model_constants(spec: ModelSpec) -> ModelConstants:
    """Critical threshold, bulk edges and edge-scaling constants."""
    kind = spec.kind
    if kind is ModelKind.WIGNER:
        return ModelConstants(1.0, -2.0, 2.0, 1.0, 1.0, -1.5, 0.0, math.inf)
    if kind in (ModelKind.COVARIANCE, ModelKind.FACTOR):
        g = spec.gamma
        k1 = g * (1 + g) ** (4 / 3)
        k2 = 1 / (g * (1 + g) ** (2 / 3))
        k3 = -1.5 * g * (1 + g) ** 2
        if kind is ModelKind.COVARIANCE:
            return ModelConstants(1 + g, (1 - g) ** 2, (1 + g) ** 2, k1, k2, k3, 1.0, math.inf)
        return ModelConstants(g, (1 - g) ** 2, (1 + g) ** 2, k1, k2, k3, 0.0, math.inf)
    tn, tm = spec.tau_n, spec.tau_m
    a, b = math.sqrt(tn - 1), math.sqrt(tm - 1)
    theta_c = 1 / (a * b)
    root_m = math.sqrt((1 - 1 / tn) / tm)
    root_n = math.sqrt((1 - 1 / tm) / tn)
    lam_minus, lam_plus = (root_m - root_n) ** 2, (root_m + root_n) ** 2
    c = (a * b - 1) * (a + b)
    k1 = c ** (4 / 3) / (tn ** (5 / 3) * tm * ((tn - 1) * (tm - 1)) ** (1 / 6))
    k2 = tn ** (1 / 3) * ((tn - 1) * (tm - 1)) ** (5 / 6) / c ** (2 / 3)
    k3 = -1.5 * c**2 / (tn**2 * tm * a * b)
    return ModelConstants(theta_c, lam_minus, lam_plus, k1, k2, k3, 0.0, 1.0)


def lambda_of_theta(spec: ModelSpec, theta: float) -> float:
    """Outlier location lambda(theta) at unit noise variance."""
    theta = float(theta)
    kind = spec.kind
    if kind is ModelKind.WIGNER:
        if theta == 0:
            raise DomainError("lambda(theta) has a pole at theta = 0")
        return theta + 1 / theta
    if kind is ModelKind.COVARIANCE:
        if theta == 1:
            raise DomainError("lambda(theta) has a pole at theta = 1 in the covariance model")
        return theta + spec.gamma2 * theta / (theta - 1)
    if kind is ModelKind.FACTOR:
        if theta == 0:
            raise DomainError("lambda(theta) has a pole at theta = 0")
        g2 = spec.gamma2
        return (theta + 1) * (1 + g2 / theta)
    if theta == 0:
        raise DomainError("lambda(theta) has a pole at theta = 0")
    tn, tm = spec.tau_n, spec.tau_m
    return ((tn - 1) * theta + 1) * ((tm - 1) * theta + 1) / (theta * tn * tm)


def lambda_prime(spec: ModelSpec, theta: float) -> float:
    """Derivative of lambda(theta)."""
    kind = spec.kind
    if kind is ModelKind.WIGNER:
        return 1 - 1 / theta**2
    if kind is ModelKind.COVARIANCE:
        return 1 - spec.gamma2 / (theta - 1) ** 2
    if kind is ModelKind.FACTOR:
        return 1 - spec.gamma2 / theta**2
    tn, tm = spec.tau_n, spec.tau_m
    return ((tn - 1) * (tm - 1) - 1 / theta**2) / (tn * tm)


def _v_raw(spec: ModelSpec, theta: float) -> float:
    kind = spec.kind
    if kind is ModelKind.WIGNER:
        return 2 * (theta**2 - 1) / theta**2
    if kind is ModelKind.COVARIANCE:
        g2 = spec.gamma2
        return 2 * theta**2 * g2 * (1 - g2 / (theta - 1) ** 2)
    if kind is ModelKind.FACTOR:
        g2 = spec.gamma2
        return 2 * g2 * (2 * theta + 1 + g2) * (theta**2 - g2) / theta**2
    tn, tm = spec.tau_n, spec.tau_m
    p = (tn - 1) * (tm - 1)
    return (
        2 * (1 - theta) ** 2 / (theta**2 * tm**2 * tn**3)
        * (2 * p * theta + tn + tm - 2)
        * (p * theta**2 - 1)
    )


def v_of_theta(spec: ModelSpec, theta: float) -> float:
    """Variance V(theta) of the Gaussian fluctuation of a supercritical outlier."""
    theta = float(theta)
    theta_c = model_constants(spec).theta_c
    if theta < theta_c:
        raise DomainError(f"V(theta) needs theta >= theta_c = {theta_c}")
    if theta == theta_c:
        return 0.0
    return max(_v_raw(spec, theta), 0.0)


def theta_of_lambda(spec: ModelSpec, lam: float) -> float:
    """Inverse of lambda(theta) on the supercritical branch."""
    lam = float(lam)
    const = model_constants(spec)
    if not math.isfinite(lam):
        raise DomainError("eigenvalue must be finite")
    if lam <= const.lambda_plus:
        raise SubcriticalEigenvalueError(
            f"eigenvalue {lam} does not exceed the bulk edge {const.lambda_plus}"
        )
    kind = spec.kind
    if kind is ModelKind.WIGNER:
        return (lam + math.sqrt(lam * lam - 4)) / 2
    if kind is ModelKind.COVARIANCE:
        b = 1 + lam - spec.gamma2
        return (b + math.sqrt(max(b * b - 4 * lam, 0.0))) / 2
    if kind is ModelKind.FACTOR:
        g2 = spec.gamma2
        return (lam - 1 - g2 + math.sqrt(max((1 + g2 - lam) ** 2 - 4 * g2, 0.0))) / 2
    tn, tm = spec.tau_n, spec.tau_m
    p = (tn - 1) * (tm - 1)
    b = lam * tn * tm - (tn + tm - 2)
    return (b + math.sqrt(max(b * b - 4 * p, 0.0))) / (2 * p)


def numeric_kappas(spec: ModelSpec) -> tuple[float, float]:
    """Edge constants from finite differences of lambda and V at theta_c."""
    theta_c = model_constants(spec).theta_c
    h = 1e-4 * max(1.0, theta_c)
    lam2 = (
        lambda_of_theta(spec, theta_c + h)
        - 2 * lambda_of_theta(spec, theta_c)
        + lambda_of_theta(spec, theta_c - h)
    ) / h**2
    # second-order one-sided stencil; V only exists to the right of theta_c
    v1 = (
        -3 * _v_raw(spec, theta_c)
        + 4 * _v_raw(spec, theta_c + h)
        - _v_raw(spec, theta_c + 2 * h)
    ) / (2 * h)
    kappa1 = 0.5 * (v1**2 / lam2) ** (1 / 3)
    kappa2 = (lam2**2 / v1) ** (1 / 3)
    return kappa1, kappa2


def noise_scales(spec: ModelSpec) -> tuple[float, float]:
    """Factors converting unit-variance (theta, lambda) back to data units."""
    if spec.kind is ModelKind.WIGNER:
        s = math.sqrt(spec.sigma2)
        return s, s
    if spec.kind is ModelKind.CCA:
        return 1.0, 1.0
    return spec.sigma2, spec.sigma2
