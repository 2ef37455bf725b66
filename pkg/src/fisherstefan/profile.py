"""Half-line travelling waves of the Fisher-KPP equation.

The wave of speed ``c`` is the piece of the unstable manifold of the saddle
``(u, v) = (1, 0)`` of

    u' = v,    v' = -c v - u (1 - u)

that runs through the fourth quadrant until ``u`` first vanishes; that point
is placed at ``z = 0``.  The manifold is built two ways: by shooting from the
saddle along its unstable eigenvector, and as a power series ``y = J(w)`` in
shifted and sheared coordinates

    w = u - 1,    y = v - nu (u - 1),

in which the vector field reads ``w' = nu w + y``, ``y' = w**2 - y / nu``.
The front slope is ``v(0) = J(-1) - nu``, so the Stefan coefficient that
selects speed ``c`` is ``mu = c / (nu - J(-1))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline, pade
from scipy.optimize import brentq

from .errors import NoCrossing, NumericalFailure, OutOfRange, SeriesDivergenceWarning

C_CRITICAL = 2.0
SQRT3 = math.sqrt(3.0)

# Default seed abscissa for the series-seeded crossing; the series converges
# geometrically there for every 0 < c < 2.
_SEED_W = -0.25


@dataclass(frozen=True)
class WaveParameters:
    """Wave speed ``c`` and Stefan coefficient ``mu`` with ``d = a = b = 1``."""

    c: float
    mu: float

    def __post_init__(self):
        if not self.c >= 0:
            raise ValueError(f"wave speed must be non-negative, got c={self.c}")
        if not self.mu > 0:
            raise ValueError(f"Stefan coefficient must be positive, got mu={self.mu}")

    @classmethod
    def from_c(cls, c: float, order: int = 20) -> "WaveParameters":
        return cls(c=c, mu=mu_from_c(c, order=order))

    @classmethod
    def from_mu(cls, mu: float, order: int = 20) -> "WaveParameters":
        return cls(c=c_from_mu(mu, order=order), mu=mu)


@dataclass
class WaveProfile:
    """Samples ``(z, u, v)`` of the wave on ``[z_min, 0]``, ``v = u'``.

    Calling the profile interpolates ``(u, v)`` with cubic Hermite pieces that
    use the exact derivatives ``u' = v`` and ``v' = -c v - u (1 - u)``.
    """

    c: float
    z: np.ndarray
    u: np.ndarray
    v: np.ndarray
    dense_output: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if not (self.z.shape == self.u.shape == self.v.shape) or self.z.ndim != 1:
            raise ValueError("z, u and v must be 1-d arrays of equal length")
        if self.z.size < 2 or np.any(np.diff(self.z) <= 0):
            raise ValueError("z samples must be strictly increasing")
        dv = -self.c * self.v - self.u * (1.0 - self.u)
        self._u_spline = CubicHermiteSpline(self.z, self.u, self.v, extrapolate=False)
        self._v_spline = CubicHermiteSpline(self.z, self.v, dv, extrapolate=False)

    @property
    def z_min(self) -> float:
        return float(self.z[0])

    @property
    def nu(self) -> float:
        return unstable_eigenvalue(self.c)

    @property
    def front_slope(self) -> float:
        """``u'(0)``, the quantity entering ``c = -mu u'(0)``."""
        return float(self.v[-1])

    def covers(self, length: float) -> bool:
        return self.z_min <= -length + 1e-9

    def __call__(self, z):
        z_arr = np.asarray(z, dtype=float)
        if np.any(z_arr < self.z_min - 1e-9) or np.any(z_arr > 1e-9):
            raise ValueError(
                f"profile sampled on [{self.z_min:g}, 0]; requested z outside that range"
            )
        z_arr = np.clip(z_arr, self.z_min, 0.0)
        return self._u_spline(z_arr), self._v_spline(z_arr)

    def sheared(self):
        """Samples in the shifted and sheared coordinates ``(w, y)``."""
        return to_sheared(self.u, self.v, self.nu)

    def to_dict(self) -> dict:
        return {
            "c": float(self.c),
            "z": self.z.tolist(),
            "u": self.u.tolist(),
            "v": self.v.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WaveProfile":
        return cls(c=float(data["c"]), z=data["z"], u=data["u"], v=data["v"])


@dataclass
class ManifoldSeries:
    """Coefficients ``a_2 .. a_N`` of ``J(w) = sum_j a_j w**j``."""

    nu: float
    coeffs: np.ndarray
    c: float | None = None

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)

    @property
    def order(self) -> int:
        return self.coeffs.size + 1

    def coefficient(self, j: int) -> float:
        if j < 2 or j > self.order:
            return 0.0
        return float(self.coeffs[j - 2])

    def full_coefficients(self) -> np.ndarray:
        """Coefficients indexed by power, ``[0, 0, a_2, ..., a_N]``."""
        return np.concatenate(([0.0, 0.0], self.coeffs))

    def terms(self, w: float) -> np.ndarray:
        powers = np.arange(2, self.order + 1)
        return self.coeffs * float(w) ** powers

    def to_dict(self) -> dict:
        return {
            "c": None if self.c is None else float(self.c),
            "nu": float(self.nu),
            "order": self.order,
            "j": list(range(2, self.order + 1)),
            "a_j": self.coeffs.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ManifoldSeries":
        return cls(nu=float(data["nu"]), coeffs=data["a_j"], c=data.get("c"))


def unstable_eigenvalue(c: float) -> float:
    """Positive root of ``nu**2 + c nu - 1 = 0``, i.e. ``(-c + sqrt(c**2 + 4)) / 2``."""
    if not c >= 0:
        raise ValueError(f"wave speed must be non-negative, got c={c}")
    # rationalised form avoids cancellation for large c
    return 2.0 / (c + math.sqrt(c * c + 4.0))


def to_sheared(u, v, nu):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    w = u - 1.0
    return w, v - nu * w


def from_sheared(w, y, nu):
    w = np.asarray(w, dtype=float)
    y = np.asarray(y, dtype=float)
    return 1.0 + w, y + nu * w


def _series_coefficients(nu: float, order: int) -> np.ndarray:
    # Matching w**n in (nu w + J) J' = w**2 - J / nu gives
    #   (n nu + 1/nu) a_n = [n == 2] - sum_{i + j = n + 1; i, j >= 2} j a_i a_j
    a = np.zeros(order + 1)
    for n in range(2, order + 1):
        acc = 1.0 if n == 2 else 0.0
        for i in range(2, n):
            j = n + 1 - i
            if j >= 2:
                acc -= j * a[i] * a[j]
        a[n] = acc / (n * nu + 1.0 / nu)
    return a[2:]


def manifold_series(c: float, order: int) -> ManifoldSeries:
    """Power series of the unstable manifold, ``a_2 .. a_order``."""
    if int(order) != order or order < 2:
        raise ValueError(f"series order must be an integer >= 2, got {order}")
    nu = unstable_eigenvalue(c)
    coeffs = _series_coefficients(nu, int(order))
    if not np.all(np.isfinite(coeffs)):
        raise NumericalFailure(f"non-finite series coefficient for c={c}, order={order}")
    return ManifoldSeries(nu=nu, coeffs=coeffs, c=float(c))


def evaluate_manifold(series: ManifoldSeries, w, method: str = "horner"):
    """Evaluate ``J(w)``.

    ``method="horner"`` sums the truncated series; ``"pade"`` evaluates the
    diagonal Pade approximant built from the same coefficients.  A
    :class:`SeriesDivergenceWarning` is emitted when the trailing terms at
    ``w`` do not shrink.
    """
    w_arr = np.asarray(w, dtype=float)
    if np.any(np.abs(w_arr) > 1.0 + 1e-12):
        raise ValueError("the manifold series is only evaluated for |w| <= 1")
    full = series.full_coefficients()

    if series.order >= 5:
        w_max = float(np.max(np.abs(w_arr))) if w_arr.size else 0.0
        if w_max > 0:
            mags = np.abs(series.terms(w_max))
            head, tail = mags[-4:-2].sum(), mags[-2:].sum()
            if tail >= head and tail > 0:
                warnings.warn(
                    f"manifold series terms do not contract at |w|={w_max:g} "
                    f"(order {series.order})",
                    SeriesDivergenceWarning,
                    stacklevel=2,
                )

    if method == "horner":
        y = np.zeros_like(w_arr)
        for a in full[::-1]:
            y = y * w_arr + a
    elif method == "pade":
        m = series.order // 2
        p, q = pade(full, m, series.order - m)
        y = p(w_arr) / q(w_arr)
    else:
        raise ValueError(f"unknown evaluation method {method!r}")
    return float(y) if y.ndim == 0 else y


def _rhs(c):
    def f(z, y):
        return [y[1], -c * y[1] - y[0] * (1.0 - y[0])]

    return f


def _crossing_event(z, y):
    return y[0]


_crossing_event.terminal = True
_crossing_event.direction = -1


def _collapse_event(floor):
    def event(z, y):
        return math.hypot(y[0], y[1]) - floor

    event.terminal = True
    event.direction = -1
    return event


def shoot_profile(
    c: float,
    tol: float = 1e-10,
    z_span: float = 400.0,
    *,
    step: float = 0.01,
    delta: float = 1e-8,
    length: float | None = None,
    floor: float = 1e-10,
) -> WaveProfile:
    """Shoot the wave of speed ``c`` from the saddle ``(1, 0)``.

    Integration starts a distance ``delta`` from the saddle on the unstable
    eigenvector, inside quadrant IV, and stops when ``u`` crosses zero.  The
    crossing becomes ``z = 0`` and the dense output is resampled on a uniform
    grid of spacing ``step``.  If ``length`` exceeds the integrated range, the
    far field is filled in with the linear asymptotics
    ``1 - u ~ exp(nu z)``.

    ``tol`` is the integrator's relative tolerance (absolute is ``tol/1000``).
    Raises :class:`NoCrossing` when the orbit decays into the origin without
    changing sign (``c >= 2``).
    """
    if not c >= 0:
        raise ValueError(f"wave speed must be non-negative, got c={c}")
    if not tol > 0 or not step > 0 or not delta > 0:
        raise ValueError("tol, step and delta must be positive")
    nu = unstable_eigenvalue(c)
    sol = solve_ivp(
        _rhs(c),
        (0.0, z_span),
        [1.0 - delta, -nu * delta],
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-3,
        dense_output=True,
        events=[_crossing_event, _collapse_event(floor)],
    )
    if sol.status == -1:
        raise NumericalFailure(f"integration failed for c={c}: {sol.message}")
    if sol.t_events[0].size == 0:
        if sol.t_events[1].size:
            raise NoCrossing(
                f"c={c}: the unstable manifold decays into (0, 0) without u changing sign"
            )
        raise NoCrossing(f"c={c}: no crossing of u = 0 within z_span={z_span}")

    z_cross = float(sol.t_events[0][0])
    k_max = int(math.floor(z_cross / step + 1e-9))
    z = -step * np.arange(k_max, -1, -1, dtype=float)
    uv = sol.sol(z_cross + z)
    u, v = uv[0], uv[1]
    u[-1] = 0.0

    if length is not None and -z[0] < length:
        k_tail = int(math.ceil(length / step - 1e-9))
        z_tail = -step * np.arange(k_tail, k_max, -1, dtype=float)
        gap = (1.0 - u[0]) * np.exp(nu * (z_tail - z[0]))
        z = np.concatenate((z_tail, z))
        u = np.concatenate((1.0 - gap, u))
        v = np.concatenate((-nu * gap, v))

    dense = sol.sol

    def dense_output(zq):
        return dense(z_cross + np.asarray(zq, dtype=float))

    return WaveProfile(c=float(c), z=z, u=u, v=v, dense_output=dense_output)


def closed_form_u0(z):
    """Exact standing wave (``c = 0``) with ``u(0) = 0``, valid for ``z <= 0``."""
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr > 1e-12):
        raise ValueError("the standing wave is defined for z <= 0")
    with np.errstate(over="ignore"):
        denom = 1.0 + 2.0 * np.cosh(z_arr) - SQRT3 * np.sinh(z_arr)
        val = 1.0 - 3.0 / denom
    return float(val) if val.ndim == 0 else val


def shooting_crossing(c: float, tol: float = 1e-12) -> float:
    """``J(-1)`` read off the shot trajectory: ``v(0) + nu``."""
    prof = shoot_profile(c, tol=tol, step=0.05)
    return prof.front_slope + unstable_eigenvalue(c)


def _seeded_crossing(series: ManifoldSeries, c: float, w_seed: float, tol: float) -> float:
    # shrink the seed until the last retained term is negligible
    w0 = w_seed
    while abs(series.coeffs[-1] * w0**series.order) > 1e-15 and abs(w0) > 1e-3:
        w0 *= 0.5
    y0 = evaluate_manifold(series, w0)
    u0, v0 = from_sheared(w0, y0, series.nu)
    sol = solve_ivp(
        _rhs(c),
        (0.0, 400.0),
        [float(u0), float(v0)],
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-3,
        events=[_crossing_event, _collapse_event(1e-13)],
    )
    if sol.t_events[0].size == 0:
        raise NoCrossing(f"c={c}: seeded trajectory does not reach u = 0")
    v_front = float(sol.y_events[0][0][1])
    return v_front + series.nu


def axis_crossing(c: float, order: int = 20, method: str = "seeded") -> float:
    """Estimate ``J(-1)``, the sheared height where the manifold meets ``u = 0``.

    ``"sum"`` and ``"pade"`` use the truncated series alone.  ``"seeded"``
    evaluates the series at a point close to the saddle where it converges
    geometrically, then follows the flow to ``u = 0``.
    """
    series = manifold_series(c, order)
    if method == "sum":
        return evaluate_manifold(series, -1.0, method="horner")
    if method == "pade":
        return evaluate_manifold(series, -1.0, method="pade")
    if method == "seeded":
        return _seeded_crossing(series, c, _SEED_W, tol=1e-12)
    raise ValueError(f"unknown method {method!r}")


def mu_from_c(c: float, order: int = 20, method: str = "seeded") -> float:
    """Stefan coefficient ``mu = c / (nu - J(-1))`` selecting speed ``c``."""
    if not 0 < c < C_CRITICAL:
        raise ValueError(f"mu(c) is defined for 0 < c < 2, got c={c}")
    nu = unstable_eigenvalue(c)
    gap = nu - axis_crossing(c, order=order, method=method)
    if not gap > 0:
        raise NumericalFailure(
            f"c={c}: J(-1) >= nu with method={method!r}, order={order}; "
            "the truncated series is not resolving the front slope"
        )
    return c / gap


@lru_cache(maxsize=16)
def _mu_table(order: int, c_max: float, method: str, n: int = 40):
    cs = np.concatenate(([1e-9], np.linspace(c_max / n, c_max, n)))
    mus = np.array([mu_from_c(float(ci), order=order, method=method) for ci in cs])
    return cs, mus


def mu_curve_is_monotone(order: int = 20, c_max: float = 1.95, method: str = "seeded") -> bool:
    _, mus = _mu_table(order, c_max, method)
    return bool(np.all(np.diff(mus) > 0))


def c_from_mu(
    mu: float, order: int = 20, c_max: float = 1.95, method: str = "seeded"
) -> float:
    """Invert ``mu(c)`` by bracketing on a sampled table, then Brent's method."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    cs, mus = _mu_table(order, float(c_max), method)
    if mu > mus[-1]:
        raise OutOfRange(
            f"mu={mu:g} exceeds mu(c_max={c_max:g})={mus[-1]:.6g}; "
            f"largest resolvable speed is c={c_max:g}",
            limit=c_max,
        )
    if mu <= mus[0]:
        lo, hi = 0.0, cs[0]
    else:
        sign = np.sign(mus - mu)
        cells = np.flatnonzero(sign[:-1] * sign[1:] <= 0)
        if not np.all(np.diff(mus) > 0):
            warnings.warn("mu(c) is not monotone on the sampled grid", RuntimeWarning)
            if cells.size > 1:
                raise NumericalFailure(f"mu={mu:g} is attained at more than one speed")
        i = int(cells[0])
        lo, hi = cs[i], cs[i + 1]
        if mus[i] == mu:
            return float(cs[i])

    def resid(ci):
        if ci <= 0:
            return -1.0
        return mu_from_c(ci, order=order, method=method) / mu - 1.0

    return float(brentq(resid, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=200))
