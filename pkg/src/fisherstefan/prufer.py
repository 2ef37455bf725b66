"""Point spectrum of the wave linearisation via Prufer angles.

With ``q = p e^{cz/2}`` the eigenvalue problem becomes the self-adjoint
equation ``q'' + (1 - c**2/4 - 2 u_c - lambda) q = 0``, ``q(-inf) = q(0) = 0``.
Writing ``q = r sin(theta)``, ``q' = r cos(theta)`` gives

    theta' = 1 - (c**2/4 + 2 u_c + lambda) sin(theta)**2
    (log r)' = (c**2/4 + 2 u_c + lambda) sin(theta) cos(theta)

and ``lambda`` is an eigenvalue exactly when the decaying solution has
``theta(0) in pi * Z``.  Angles are kept as a continuous lift; since
``theta' = 1`` wherever ``sin(theta) = 0``, multiples of pi are only ever crossed
upwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import NumericalFailure
from .essential import q_essential_border
from .profile import WaveProfile, shoot_profile

DEFAULT_L = 40.0
DEFAULT_LAMBDA_INF = 100.0
NO_POINT_SPECTRUM = "no point spectrum with lambda >= 0"


@dataclass
class PruferTrajectory:
    c: float
    lam: float
    z: np.ndarray
    theta: np.ndarray
    log_r: np.ndarray
    theta_start: float
    L: float

    @property
    def r(self) -> np.ndarray:
        """Radius with ``r(-L) = 1``; may overflow for large ``lambda * L``."""
        with np.errstate(over="ignore"):
            return np.exp(self.log_r)

    @property
    def theta_end(self) -> float:
        return float(self.theta[-1])

    @property
    def winding(self) -> int:
        """Multiples of pi crossed since ``z = -L``."""
        return int(math.floor(float(np.max(self.theta)) / math.pi))

    def pi_distance(self) -> float:
        """Smallest distance from ``theta`` to ``pi * Z`` along the trajectory."""
        frac = np.mod(self.theta, math.pi)
        return float(np.min(np.minimum(frac, math.pi - frac)))

    def to_rows(self):
        # radius rescaled to a maximum of 1 so the export never overflows
        r = np.exp(self.log_r - np.max(self.log_r))
        return list(zip(self.z.tolist(), self.theta.tolist(), r.tolist(), self.log_r.tolist()))


@dataclass
class OscillationReport:
    c: float
    lambda_grid: np.ndarray
    lambda_inf: float
    L: float
    theta_end: np.ndarray
    pi_distance: np.ndarray
    crossing_free: np.ndarray
    monotone_pairs: list = field(default_factory=list)
    squeeze_ok: bool = True
    tol: float = 1e-8

    @property
    def all_monotone(self) -> bool:
        return all(pair["ok"] for pair in self.monotone_pairs)

    @property
    def all_crossing_free(self) -> bool:
        return bool(np.all(self.crossing_free))

    @property
    def verdict(self) -> str:
        if self.all_monotone and self.all_crossing_free and self.squeeze_ok:
            return NO_POINT_SPECTRUM
        return "candidate eigenvalue locus detected"

    def to_dict(self) -> dict:
        return {
            "c": float(self.c),
            "lambda_inf": float(self.lambda_inf),
            "L": float(self.L),
            "verdict": self.verdict,
            "all_monotone": self.all_monotone,
            "all_crossing_free": self.all_crossing_free,
            "squeeze_ok": bool(self.squeeze_ok),
            "per_lambda": [
                {
                    "lambda": float(lam),
                    "theta_at_0": float(th),
                    "pi_distance": float(d),
                    "crossing_free": bool(ok),
                }
                for lam, th, d, ok in zip(
                    self.lambda_grid, self.theta_end, self.pi_distance, self.crossing_free
                )
            ],
            "monotone_pairs": self.monotone_pairs,
        }


def theta_minus_infinity(c: float, lam: float) -> float:
    """Far-field angle ``arctan(2 / sqrt(c**2 + 4 (lambda + 1)))`` of the decaying solution."""
    if lam <= q_essential_border(c):
        raise ValueError(
            f"lambda={lam} lies in the essential spectrum (-inf, {q_essential_border(c)}]"
        )
    return math.atan(2.0 / math.sqrt(c * c + 4.0 * (lam + 1.0)))


def _prepare_profile(c, profile, L):
    if profile is None:
        return shoot_profile(c, length=L)
    if abs(profile.c - c) > 1e-12:
        raise ValueError(f"profile has c={profile.c}, expected {c}")
    if not profile.covers(L):
        raise ValueError(
            f"profile covers [{profile.z_min:g}, 0] but the truncation needs [-{L:g}, 0]"
        )
    return profile


def _integrate_angles(c, lams, profile, L, z_eval, rtol=1e-11, atol=1e-13):
    lams = np.asarray(lams, dtype=float)
    m = lams.size
    theta0 = np.array([theta_minus_infinity(c, lam) for lam in lams])
    shift = c * c / 4.0 + lams

    def rhs(z, y):
        ub = float(profile(z)[0])
        th = y[:m]
        s, co = np.sin(th), np.cos(th)
        k = shift + 2.0 * ub
        return np.concatenate((1.0 - k * s * s, k * s * co))

    sol = solve_ivp(
        rhs,
        (-L, 0.0),
        np.concatenate((theta0, np.zeros(m))),
        method="DOP853",
        t_eval=z_eval,
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise NumericalFailure(f"Prufer integration failed: {sol.message}")
    return theta0, sol.y[:m], sol.y[m:]


def integrate_prufer(
    c: float,
    lam: float,
    profile: WaveProfile | None = None,
    L: float = DEFAULT_L,
    n: int = 4000,
) -> PruferTrajectory:
    """Angle and radius of the decaying solution on ``[-L, 0]``.

    ``theta(-L)`` is set to the far-field angle; ``r(-L) = 1``.  The wave
    profile is built by shooting when not supplied.
    """
    profile = _prepare_profile(c, profile, L)
    z = np.linspace(-L, 0.0, int(n) + 1)
    theta0, theta, log_r = _integrate_angles(c, [lam], profile, L, z)
    return PruferTrajectory(
        c=float(c), lam=float(lam), z=z, theta=theta[0], log_r=log_r[0],
        theta_start=float(theta0[0]), L=float(L),
    )


def integrate_prufer_batch(c, lams, profile=None, L=DEFAULT_L, n=4000):
    """Same as :func:`integrate_prufer` for several ``lambda`` at once."""
    profile = _prepare_profile(c, profile, L)
    z = np.linspace(-L, 0.0, int(n) + 1)
    theta0, theta, log_r = _integrate_angles(c, lams, profile, L, z)
    return [
        PruferTrajectory(
            c=float(c), lam=float(lam), z=z, theta=theta[i], log_r=log_r[i],
            theta_start=float(theta0[i]), L=float(L),
        )
        for i, lam in enumerate(np.asarray(lams, dtype=float))
    ]


def oscillation_check(
    c: float,
    lambda_grid=None,
    lambda_inf: float = DEFAULT_LAMBDA_INF,
    profile: WaveProfile | None = None,
    L: float = DEFAULT_L,
    n: int = 4000,
    tol: float = 1e-8,
) -> OscillationReport:
    """Check ordering and absence of pi-crossings of the angles on ``[0, lambda_inf]``.

    For every adjacent pair ``lam1 < lam2`` of the grid the angles must obey
    ``theta(z; lam2) <= theta(z; lam1) + tol`` at each sample; every angle must
    also stay between ``theta(z; lambda_inf)`` and ``theta(z; 0)``.  A
    trajectory that reaches a multiple of pi is reported, not raised.
    """
    if not lambda_inf > 0:
        raise ValueError("lambda_inf must be positive")
    if lambda_grid is None:
        lambda_grid = np.linspace(0.0, lambda_inf, 41)
    grid = np.asarray(lambda_grid, dtype=float)
    if np.any(grid < 0) or np.any(grid > lambda_inf):
        raise ValueError("lambda grid must lie in [0, lambda_inf]")
    grid = np.sort(np.concatenate((grid, [0.0, lambda_inf])))
    grid = grid[np.concatenate(([True], np.diff(grid) > 0))]

    trajs = integrate_prufer_batch(c, grid, profile=profile, L=L, n=n)
    theta = np.array([t.theta for t in trajs])
    dist = np.array([t.pi_distance() for t in trajs])
    crossing_free = np.array([t.winding == 0 for t in trajs]) & (dist > 0)

    pairs = []
    for i in range(grid.size - 1):
        gap = float(np.max(theta[i + 1] - theta[i]))
        pairs.append(
            {"lambda_1": float(grid[i]), "lambda_2": float(grid[i + 1]),
             "max_excess": gap, "ok": bool(gap <= tol)}
        )
    squeeze_ok = bool(
        np.all(theta[-1] <= theta + tol) and np.all(theta <= theta[0] + tol)
    )
    return OscillationReport(
        c=float(c), lambda_grid=grid, lambda_inf=float(lambda_inf), L=float(L),
        theta_end=theta[:, -1].copy(), pi_distance=dist, crossing_free=crossing_free,
        monotone_pairs=pairs, squeeze_ok=squeeze_ok, tol=tol,
    )


def _theta_at_zero(c, lams, profile, L):
    _, theta, _ = _integrate_angles(c, np.atleast_1d(lams), profile, L, np.array([0.0]))
    return theta[:, -1]


def eigenvalue_scan(
    c: float,
    lambda_lo: float,
    lambda_hi: float,
    profile: WaveProfile | None = None,
    n_grid: int = 201,
    L: float = DEFAULT_L,
) -> list[float]:
    """Eigenvalues in ``[lambda_lo, lambda_hi]`` where ``theta(0; lambda)`` meets ``pi * Z``.

    The scan samples ``theta(0; .)`` on a uniform grid, brackets every change in
    ``floor(theta(0) / pi)`` and refines each bracket with Brent's method.
    """
    border = q_essential_border(c)
    if not lambda_lo > border:
        raise ValueError(
            f"scan interval must lie right of the essential spectrum edge {border:g}"
        )
    if not lambda_hi > lambda_lo:
        raise ValueError("lambda_hi must exceed lambda_lo")
    profile = _prepare_profile(c, profile, L)
    grid = np.linspace(lambda_lo, lambda_hi, int(n_grid))
    th0 = _theta_at_zero(c, grid, profile, L)
    branch = np.floor(th0 / math.pi)

    found = []
    for i in np.flatnonzero(np.diff(branch) != 0):
        # theta(0; .) decreases in lambda; one root per multiple of pi passed
        for k in range(int(branch[i + 1]) + 1, int(branch[i]) + 1):
            target = k * math.pi
            root = brentq(
                lambda lam: _theta_at_zero(c, lam, profile, L)[0] - target,
                grid[i], grid[i + 1], xtol=1e-12,
            )
            found.append(float(root))
    return sorted(found)


def line_angle(c: float, L: float = 50.0, L_left: float = DEFAULT_L, n: int = 4000):
    """Angle at ``lambda = 0`` along the full-line Fisher-KPP front on ``[-L_left, L]``.

    Left of ``z = 0`` the line front coincides with the half-line wave; past
    the first zero of ``u`` the orbit and the angle are continued together.
    """
    if not 0 <= c < 2:
        raise ValueError("the line front oscillates only for 0 <= c < 2")
    half = integrate_prufer(c, 0.0, L=L_left, n=n)
    profile = shoot_profile(c, length=L_left)
    quarter = c * c / 4.0

    def rhs(z, y):
        u, v, th = y
        return [v, -c * v - u * (1.0 - u), 1.0 - (quarter + 2.0 * u) * math.sin(th) ** 2]

    z_right = np.linspace(0.0, L, int(n) + 1)
    sol = solve_ivp(
        rhs, (0.0, L), [0.0, profile.front_slope, half.theta_end],
        method="DOP853", t_eval=z_right, rtol=1e-11, atol=1e-13,
    )
    if not sol.success:
        raise NumericalFailure(f"line continuation failed: {sol.message}")
    z = np.concatenate((half.z, z_right[1:]))
    theta = np.concatenate((half.theta, sol.y[2][1:]))
    return z, theta


def kpp_line_winding_demo(c: float, L: float = 50.0) -> int:
    """Number of multiples of pi crossed by the line-front angle up to ``z = L``."""
    _, theta = line_angle(c, L)
    return int(math.floor(float(np.max(theta)) / math.pi))


def half_line_winding(c: float, L: float = DEFAULT_L) -> int:
    """Same count for the half-line wave, which stops at ``z = 0``."""
    return integrate_prufer(c, 0.0, L=L).winding


def q_transform(c: float, z, p):
    """``q = p e^{cz/2}``."""
    return np.asarray(p) * np.exp(0.5 * c * np.asarray(z))


def q_operator_residual(c: float, lam: float, z, q, ubar) -> np.ndarray:
    """Three-point residual of ``q'' + (1 - c**2/4 - 2 u_c - lambda) q`` at interior nodes."""
    z = np.asarray(z, dtype=float)
    q = np.asarray(q, dtype=float)
    h = z[1] - z[0]
    d2 = (q[2:] - 2.0 * q[1:-1] + q[:-2]) / h**2
    pot = 1.0 - c * c / 4.0 - 2.0 * np.asarray(ubar)[1:-1] - lam
    return d2 + pot * q[1:-1]
