"""(De)localization measures of a discrete probability density.

All logarithms are natural.  Each function takes the inside-cavity
intensities only; they must be nonnegative and sum to one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

#: Renyi orders reported by default.
DEFAULT_ALPHAS = (2.0, 1.8, 1.6, 1.4, 1.2, 1.001)
SUM_TOL = 1e-10


@dataclass(frozen=True)
class ProbabilityVector:
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float).ravel()
        if rho.size == 0:
            raise DomainError("probability vector is empty")
        if not np.all(np.isfinite(rho)) or np.any(rho < 0):
            raise DomainError("probabilities must be finite and nonnegative")
        if abs(rho.sum() - 1.0) > SUM_TOL:
            raise DomainError(f"probabilities sum to {rho.sum():.15g}, not 1")
        object.__setattr__(self, "rho", rho)

    @property
    def N(self) -> int:
        return self.rho.size

    @classmethod
    def from_intensity(cls, values):
        """Normalize arbitrary nonnegative intensities to unit sum."""
        v = np.asarray(values, dtype=float).ravel()
        if v.size == 0 or np.any(v < 0) or not np.all(np.isfinite(v)):
            raise DomainError("intensities must be finite and nonnegative")
        total = v.sum()
        if not total > 0:
            raise DomainError("intensities sum to zero")
        return cls(v / total)


def _as_prob(p) -> np.ndarray:
    if isinstance(p, ProbabilityVector):
        return p.rho
    return ProbabilityVector(p).rho


def ipr(p) -> float:
    """Inverse participation ratio ``sum rho_i^2``."""
    rho = _as_prob(p)
    return float(np.dot(rho, rho))


def shannon_entropy(p) -> float:
    """``-sum rho_i log rho_i`` with ``0 log 0 = 0``."""
    rho = _as_prob(p)
    nz = rho[rho > 0]
    return float(-np.dot(nz, np.log(nz)))


def renyi_entropy(p, alpha: float) -> float:
    """Renyi entropy ``log(sum rho_i^alpha) / (1 - alpha)``.

    Undefined at ``alpha = 1``; use :func:`shannon_entropy` for the limit.
    """
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    if abs(alpha - 1.0) <= 1e-9:
        raise DomainError("alpha = 1 is the Shannon limit; call shannon_entropy")
    rho = _as_prob(p)
    nz = rho[rho > 0]
    if alpha == 2.0:
        s = np.dot(nz, nz)
    else:
        s = np.sum(nz ** alpha)
    return float(np.log(s) / (1.0 - alpha))


def rms_contrast(p) -> float:
    """Root-mean-square contrast of the intensities relative to their mean."""
    rho = _as_prob(p)
    mean = rho.mean()
    return float(np.sqrt(np.mean(((rho - mean) / mean) ** 2)))


@dataclass
class LocalizationReport:
    ipr: float
    shannon: float
    shannon_inv: float
    renyi: dict = field(default_factory=dict)
    rms_contrast: float = 0.0
    N: int = 0


def report(p, alphas=DEFAULT_ALPHAS) -> LocalizationReport:
    prob = p if isinstance(p, ProbabilityVector) else ProbabilityVector(p)
    hs = shannon_entropy(prob)
    return LocalizationReport(
        ipr=ipr(prob),
        shannon=hs,
        shannon_inv=1.0 / hs if hs > 0 else float("inf"),
        renyi={float(a): renyi_entropy(prob, a) for a in alphas},
        rms_contrast=rms_contrast(prob),
        N=prob.N,
    )


def normalize_series(values):
    """Divide a curve by its maximum, as done before comparing measures."""
    v = np.asarray(values, dtype=float)
    top = v.max() if v.size else 0.0
    if not top > 0:
        raise DomainError("series has no positive value to normalize by")
    return v / top
