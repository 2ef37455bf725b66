"""Spectrum of ``p'' + p`` on ``[0, h_inf]`` with ``p'(0) = p(h_inf) = 0``.

This is the linearisation about the vanishing state.  Eigenpairs are
explicit, so the module mostly evaluates formulas and classifies the interval
length against the critical value ``pi / 2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

MARGINAL_TOL = 1e-12


class Verdict(str, enum.Enum):
    STABLE = "Stable"
    MARGINAL = "Marginal"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class VanishingSpectrum:
    h_inf: float
    eigenvalues: tuple

    @property
    def n_max(self) -> int:
        return len(self.eigenvalues)

    def to_rows(self):
        return [(n, lam) for n, lam in enumerate(self.eigenvalues, start=1)]


def _check(n, h_inf):
    if int(n) != n or n < 1:
        raise ValueError(f"mode index must be an integer >= 1, got {n}")
    if not h_inf > 0:
        raise ValueError(f"interval length must be positive, got {h_inf}")


def eigenvalue(n: int, h_inf: float) -> float:
    """``1 - (n - 1/2)**2 pi**2 / h_inf**2``."""
    _check(n, h_inf)
    # (n - 1/2) pi / h is exactly 1.0 at h = pi/2, n = 1
    return 1.0 - ((n - 0.5) * math.pi / h_inf) ** 2


def eigenfunction(n: int, h_inf: float, x):
    """``cos((2n - 1) pi x / (2 h_inf))`` for ``0 <= x <= h_inf``."""
    _check(n, h_inf)
    x_arr = np.asarray(x, dtype=float)
    slack = 1e-12 * max(1.0, h_inf)
    if np.any(x_arr < -slack) or np.any(x_arr > h_inf + slack):
        raise ValueError(f"x must lie in [0, {h_inf}]")
    val = np.cos((2 * n - 1) * math.pi * x_arr / (2.0 * h_inf))
    return float(val) if val.ndim == 0 else val


def spectrum(h_inf: float, n_max: int) -> VanishingSpectrum:
    _check(1, h_inf)
    if int(n_max) != n_max or n_max < 1:
        raise ValueError("n_max must be a positive integer")
    return VanishingSpectrum(
        h_inf=float(h_inf),
        eigenvalues=tuple(eigenvalue(n, h_inf) for n in range(1, int(n_max) + 1)),
    )


def classify_vanishing(h_inf: float, tol: float = MARGINAL_TOL) -> tuple[Verdict, float]:
    """Classify the zero state by the sign of the leading eigenvalue."""
    lam1 = eigenvalue(1, h_inf)
    if abs(lam1) <= tol:
        return Verdict.MARGINAL, lam1
    if lam1 < 0:
        return Verdict.STABLE, lam1
    return Verdict.UNSTABLE, lam1


def critical_length(lo: float = 1.0, hi: float = 2.0) -> float:
    """Interval length at which the leading eigenvalue vanishes (root bracketing)."""
    return brentq(lambda h: eigenvalue(1, h), lo, hi, xtol=1e-15)


def discrete_residual(n: int, h_inf: float, nx: int = 2048) -> float:
    """Max nodal error of ``(D2 + 1) phi_n - lambda_n phi_n`` on an ``nx``-point grid.

    ``D2`` is the three-point second difference; the error is ``O(dx**2)``.
    """
    x = np.linspace(0.0, h_inf, nx)
    dx = x[1] - x[0]
    phi = eigenfunction(n, h_inf, x)
    lap = (phi[2:] - 2.0 * phi[1:-1] + phi[:-2]) / dx**2
    resid = lap + phi[1:-1] - eigenvalue(n, h_inf) * phi[1:-1]
    return float(np.max(np.abs(resid)))
