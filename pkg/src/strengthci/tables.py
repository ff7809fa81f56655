"""Quantile tables of the transition process and the stitched quantile function."""

from __future__ import annotations

import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from statistics import NormalDist

import numpy as np

from . import _table_data
from .models import DomainError

DEFAULT_ALPHAS = (0.005, 0.025, 0.05, 0.5, 0.95, 0.975, 0.995)
_ALPHA_MATCH = 1e-12


class TableError(DomainError):
    """A quantile table is malformed or cannot answer a query."""


class AlphaNotTabulatedError(TableError):
    """The requested level is not one of the tabulated levels."""


@dataclass
class QuantileTable:
    """Quantiles of T(Theta) on a Theta grid (rows) for several levels (columns)."""

    theta_grid: np.ndarray
    alphas: np.ndarray
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.theta_grid = np.asarray(self.theta_grid, dtype=np.float64)
        self.alphas = np.asarray(self.alphas, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.theta_grid.size, self.alphas.size):
            raise TableError("values must have shape (len(theta_grid), len(alphas))")
        if self.theta_grid.size < 2 or np.any(np.diff(self.theta_grid) <= 0):
            raise TableError("theta grid must be strictly ascending with at least two rows")
        if np.any(np.diff(self.alphas) <= 0) or np.any((self.alphas <= 0) | (self.alphas >= 1)):
            raise TableError("alphas must be strictly ascending inside (0, 1)")
        if not np.all(np.isfinite(self.values)):
            raise TableError("table values must be finite")

    @property
    def theta_min(self) -> float:
        return float(self.theta_grid[0])

    @property
    def theta_max(self) -> float:
        return float(self.theta_grid[-1])

    def column(self, alpha: float) -> np.ndarray:
        hits = np.flatnonzero(np.abs(self.alphas - alpha) < _ALPHA_MATCH)
        if hits.size == 0:
            raise AlphaNotTabulatedError(
                f"alpha={alpha} is not tabulated; available levels: {self.alphas.tolist()}"
            )
        return self.values[:, hits[0]]

    def tracy_widom(self, alpha: float) -> float:
        """Tracy-Widom quantile used for the deep-subcritical tail."""
        own = self.provenance.get("tracy_widom")
        if own:
            for key, value in own.items():
                if abs(float(key) - alpha) < _ALPHA_MATCH:
                    return float(value)
        return tracy_widom_quantile(alpha)

    def alpha_monotonicity_violations(self) -> list[tuple[float, int]]:
        """Rows whose quantiles fail to increase strictly in alpha."""
        bad = np.argwhere(np.diff(self.values, axis=1) <= 0)
        return [(float(self.theta_grid[i]), int(j)) for i, j in bad]

    def theta_monotonicity_violations(self) -> list[tuple[float, float]]:
        """(Theta, alpha) pairs where a column decreases on the next grid step."""
        bad = np.argwhere(np.diff(self.values, axis=0) < 0)
        return [(float(self.theta_grid[i]), float(self.alphas[j])) for i, j in bad]

    def to_csv(self) -> str:
        out = io.StringIO()
        meta = json.dumps(self.provenance, sort_keys=True, separators=(",", ":"))
        out.write(f"# {meta}\n")
        out.write(",".join(["theta"] + [f"q{a!r}" for a in self.alphas.tolist()]) + "\n")
        for theta, row in zip(self.theta_grid.tolist(), self.values.tolist()):
            out.write(",".join(repr(v) for v in [theta] + row) + "\n")
        return out.getvalue()

    def save(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    @classmethod
    def from_csv(cls, text: str) -> "QuantileTable":
        meta: dict = {}
        rows, header = [], None
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body:
                    try:
                        meta.update(json.loads(body))
                    except json.JSONDecodeError:
                        raise TableError(f"line {lineno}: metadata is not JSON") from None
                continue
            cells = [c.strip() for c in line.split(",")]
            if header is None:
                header = cells
                if header[0] != "theta" or not all(c.startswith("q") for c in header[1:]):
                    raise TableError("header must be 'theta,q<alpha>,...'")
                continue
            if len(cells) != len(header):
                raise TableError(f"line {lineno}: expected {len(header)} fields")
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                raise TableError(f"line {lineno}: non-numeric field") from None
        if header is None or not rows:
            raise TableError("table has no data rows")
        data = np.array(rows)
        alphas = [float(c[1:]) for c in header[1:]]
        return cls(data[:, 0], alphas, data[:, 1:], meta)

    @classmethod
    def load(cls, path) -> "QuantileTable":
        return cls.from_csv(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=1)
def embedded_table() -> QuantileTable:
    """The published quantile table, checked against its stored digest."""
    text = _table_data.TRANSITION_QUANTILES_CSV
    digest = hashlib.sha256(text.encode()).hexdigest()
    if digest != _table_data.TRANSITION_QUANTILES_SHA256:
        raise TableError("embedded quantile table failed its checksum")
    table = QuantileTable.from_csv(text)
    table.provenance = {"source": "published", "mc": 1_000_000, "N": 100_000_000, "sha256": digest}
    return table


def tracy_widom_quantile(alpha: float) -> float:
    for key, value in _table_data.TRACY_WIDOM_QUANTILES.items():
        if abs(key - alpha) < _ALPHA_MATCH:
            return value
    raise AlphaNotTabulatedError(
        f"Tracy-Widom quantile for alpha={alpha} is not tabulated; "
        f"available levels: {sorted(_table_data.TRACY_WIDOM_QUANTILES)}"
    )


def normal_quantile(alpha: float) -> float:
    return NormalDist().inv_cdf(alpha)


def transition_quantile(theta: float, alpha: float, table: QuantileTable | None = None) -> float:
    """Level-alpha quantile of T(theta) with Gaussian and Tracy-Widom tails.

    Inside the tabulated range the table is interpolated linearly in theta;
    above it T is approximated by N(theta^2, 4 theta) and below it by a
    Tracy-Widom variable shifted by -1/theta.
    """
    return float(transition_quantiles(np.array([theta], dtype=np.float64), alpha, table)[0])


def transition_quantiles(thetas, alpha: float, table: QuantileTable | None = None) -> np.ndarray:
    """Vectorized :func:`transition_quantile`."""
    table = embedded_table() if table is None else table
    thetas = np.asarray(thetas, dtype=np.float64)
    if not np.all(np.isfinite(thetas)):
        raise DomainError("theta must be finite")
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    out = np.empty_like(thetas)
    high = thetas > table.theta_max
    low = thetas < table.theta_min
    mid = ~(high | low)
    if mid.any():
        out[mid] = np.interp(thetas[mid], table.theta_grid, table.column(alpha))
    if high.any():
        t = thetas[high]
        out[high] = t * t + 2 * np.sqrt(t) * normal_quantile(alpha)
    if low.any():
        out[low] = table.tracy_widom(alpha) - 1 / thetas[low]
    return out


def bootstrap_quantile_se(samples: np.ndarray, alphas, reps: int = 200, seed: int = 0) -> np.ndarray:
    """Bootstrap standard errors of type-7 empirical quantiles."""
    samples = np.asarray(samples, dtype=np.float64)
    gen = np.random.Generator(np.random.Philox(key=seed))
    n = samples.shape[0]
    boot = np.empty((reps, len(alphas)))
    for b in range(reps):
        boot[b] = np.quantile(samples[gen.integers(0, n, n)], alphas)
    return boot.std(axis=0, ddof=1)
