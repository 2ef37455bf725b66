"""Fisher-Stefan moving-boundary solver and wave-frame decay experiments.

The free-boundary problem

    u_t = u_xx + u (1 - u),  0 < x < h(t),   u_x(t, 0) = u(t, h) = 0,
    h' = -mu u_x(t, h)

is solved on the fixed grid ``xi = x / h(t) in [0, 1]``, where it reads

    u_t = u_xixi / h**2 + xi (h' / h) u_xi + u (1 - u).

Each step first advances ``h`` with the front slope from a second-order
one-sided stencil, then takes a linearly implicit step: diffusion and the
(now known) advection are solved with a tridiagonal system, the reaction is
explicit.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded
from scipy.stats import linregress

from .errors import NumericalFailure, Undecided
from .profile import WaveProfile, shoot_profile

BLOWUP = 10.0
VANISH_THRESHOLD = 1e-4
TAIL_FRACTION = 0.2
SWAY_TOL = 0.01
SATURATION_TOL = 0.02


@dataclass
class StefanState:
    t: float
    h: float
    u: np.ndarray

    @property
    def xi(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.u.size)

    @property
    def x(self) -> np.ndarray:
        return self.h * self.xi


@dataclass
class StefanRun:
    """Saved states plus per-step histories of ``t, h, h', max u``."""

    states: list
    t: np.ndarray
    h: np.ndarray
    hdot: np.ndarray
    umax: np.ndarray
    mu: float
    dt: float
    nx: int

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.states[i]

    def __iter__(self):
        return iter(self.states)

    @property
    def final(self) -> StefanState:
        return self.states[-1]

    def history_rows(self):
        return list(zip(self.t.tolist(), self.h.tolist(), self.hdot.tolist(), self.umax.tolist()))


@dataclass
class RunOutcome:
    kind: str
    value: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def h_inf_est(self) -> float | None:
        return self.value if self.kind == "Vanishing" else None

    @property
    def c_est(self) -> float | None:
        return self.value if self.kind == "Spreading" else None

    def to_dict(self) -> dict:
        key = "h_inf_est" if self.kind == "Vanishing" else "c_est"
        return {"kind": self.kind, key: float(self.value), **self.diagnostics}


@dataclass
class DecayReport:
    c: float
    amplitude: float
    times: np.ndarray
    h1_norms: np.ndarray
    fitted_rate: float
    r_squared: float
    growing: bool = False

    def to_dict(self) -> dict:
        return {
            "c": float(self.c),
            "amplitude": float(self.amplitude),
            "fitted_rate": float(self.fitted_rate),
            "r_squared": float(self.r_squared),
            "growing": bool(self.growing),
            "initial_norm": float(self.h1_norms[0]),
            "final_norm": float(self.h1_norms[-1]),
        }


def front_slope(u: np.ndarray, h: float) -> float:
    """Second-order one-sided ``u_x`` at ``x = h`` for nodal values on ``xi``."""
    dxi = 1.0 / (u.size - 1)
    return (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * dxi * h)


def _initial_samples(u0, h0, nx):
    if callable(u0):
        vals = np.asarray(u0(np.linspace(0.0, h0, nx)), dtype=float)
    else:
        vals = np.asarray(u0, dtype=float).copy()
        if vals.shape != (nx,):
            raise ValueError(f"u0 must have nx={nx} samples, got shape {vals.shape}")
    if abs(vals[-1]) > 1e-12:
        raise ValueError("u0 must vanish at the front x = h0")
    if np.any(vals < 0):
        raise ValueError("u0 must be non-negative")
    if abs(vals[1] - vals[0]) > 1e-3 * max(1.0, float(np.max(vals))):
        warnings.warn("u0 does not look flat at x = 0 (u_x(0) = 0 is imposed)", RuntimeWarning)
    vals[-1] = 0.0
    return vals


def cosine_data(h0: float, amplitude: float):
    """``amplitude * cos(pi x / (2 h0))``, a profile compatible with the boundary data."""

    def u0(x):
        vals = amplitude * np.cos(math.pi * np.asarray(x) / (2.0 * h0))
        return np.where(np.asarray(x) >= h0, 0.0, np.clip(vals, 0.0, None))

    return u0


def simulate(
    u0,
    h0: float,
    mu: float,
    T: float,
    dt: float = 1e-3,
    nx: int = 801,
    save_every: float = 0.1,
) -> StefanRun:
    """Evolve the Fisher-Stefan problem to time ``T``.

    ``u0`` is a callable of ``x`` or ``nx`` nodal values on ``[0, h0]``.  A
    state is stored every ``save_every`` time units (and at ``T``); scalar
    histories are kept at every step.
    """
    if not (h0 > 0 and mu > 0 and T > 0 and dt > 0):
        raise ValueError("h0, mu, T and dt must be positive")
    if nx < 3:
        raise ValueError("nx must be at least 3")
    u = _initial_samples(u0, h0, nx)
    n_steps = max(1, int(round(T / dt)))
    stride = max(1, int(round(save_every / dt)))
    dxi = 1.0 / (nx - 1)
    xi = np.linspace(0.0, 1.0, nx)[:-1]
    m = nx - 1

    t_hist = np.empty(n_steps + 1)
    h_hist = np.empty(n_steps + 1)
    hd_hist = np.empty(n_steps + 1)
    um_hist = np.empty(n_steps + 1)
    states = [StefanState(0.0, float(h0), u.copy())]
    h = float(h0)
    ab = np.zeros((3, m))

    for k in range(n_steps + 1):
        hdot = -mu * front_slope(u, h)
        t_hist[k], h_hist[k], hd_hist[k], um_hist[k] = k * dt, h, hdot, u.max()
        if k == n_steps:
            break

        h_new = h + dt * hdot
        if not h_new > 1e-8:
            raise NumericalFailure(f"front collapsed (h={h_new:g}) at t={k * dt:g}")
        diff = dt / (h_new * h_new * dxi * dxi)
        adv = dt * xi * hdot / (h_new * 2.0 * dxi)
        ab[1, :] = 1.0 + 2.0 * diff
        ab[0, 1:] = -(diff + adv[:-1])
        ab[2, :-1] = -(diff - adv[1:])
        ab[0, 1] = -2.0 * diff  # Neumann mirror at xi = 0
        rhs = u[:-1] + dt * u[:-1] * (1.0 - u[:-1])
        u = np.append(solve_banded((1, 1), ab, rhs), 0.0)
        h = h_new

        if not np.all(np.isfinite(u)) or u.max() > BLOWUP:
            raise NumericalFailure(f"blow-up guard tripped at t={(k + 1) * dt:g}")
        if (k + 1) % stride == 0 or k + 1 == n_steps:
            states.append(StefanState((k + 1) * dt, h, u.copy()))

    return StefanRun(states, t_hist, h_hist, hd_hist, um_hist, float(mu), float(dt), int(nx))


def detect_outcome(
    run: StefanRun,
    vanish_threshold: float = VANISH_THRESHOLD,
    tail_fraction: float = TAIL_FRACTION,
    sway_tol: float = SWAY_TOL,
    saturation_tol: float = SATURATION_TOL,
) -> RunOutcome:
    """Vanishing if ``max u`` fell below the threshold; spreading if ``h'`` settled.

    Spreading also needs ``u(0, t)`` within ``saturation_tol`` of 1, since the
    spreading solution tends to 1 on compact sets.  Otherwise :class:`Undecided`.
    """
    final = run.final
    if run.umax[-1] < vanish_threshold:
        return RunOutcome(
            "Vanishing", float(final.h),
            {"final_max_u": float(run.umax[-1]), "t_end": float(run.t[-1])},
        )
    t_end = run.t[-1]
    tail = run.t >= t_end - tail_fraction * t_end
    speeds = run.hdot[tail]
    mean = float(np.mean(speeds))
    sway = float((speeds.max() - speeds.min()) / abs(mean)) if mean != 0 else math.inf
    saturated = abs(final.u[0] - 1.0) <= saturation_tol
    if sway < sway_tol and saturated and mean > 0:
        return RunOutcome(
            "Spreading", mean,
            {"relative_sway": sway, "u_at_origin": float(final.u[0]), "t_end": float(t_end)},
        )
    raise Undecided(
        f"run to T={t_end:g} is inconclusive: max u={run.umax[-1]:.3g}, "
        f"tail speed sway={sway:.3g}, u(0)={final.u[0]:.3g}"
    )


def moving_frame_compare(
    run: StefanRun, c: float, profile: WaveProfile | None = None, L: float = 40.0
):
    """Sup-norm of ``u - u_c`` in the frame ``z = x - h(t)`` on ``[-min(h, L), 0]``.

    Returns ``(times, sup_norms)`` for the saved states; states with ``h < 1``
    are skipped with a warning.
    """
    if profile is None:
        profile = shoot_profile(c, length=L)
    elif not profile.covers(L):
        raise ValueError(f"profile must cover [-{L:g}, 0]")
    times, sups = [], []
    for state in run.states:
        if state.h < 1.0:
            warnings.warn(f"frame misaligned: h={state.h:.3g} < 1 at t={state.t:g}")
            continue
        z = state.x - state.h
        window = z >= -min(state.h, L)
        ubar, _ = profile(z[window])
        times.append(state.t)
        sups.append(float(np.max(np.abs(state.u[window] - ubar))))
    return np.array(times), np.array(sups)


def h1_norm(w: np.ndarray, dz: float) -> float:
    """Discrete ``sqrt(sum w**2 dz + sum (dw/dz)**2 dz)``."""
    grad = np.diff(w) / dz
    return math.sqrt(float(np.sum(w * w) * dz + np.sum(grad * grad) * dz))


def default_bump(z):
    """``(z/2)**2 e^{z + 2}``: peak 1 at ``z = -2``, zero at ``z = 0``."""
    z = np.asarray(z, dtype=float)
    return (z / 2.0) ** 2 * np.exp(z + 2.0)


def _wave_frame_matrix(c, dz, m):
    # D2 + c D1 on interior nodes, banded storage
    a_lo = 1.0 / dz**2 - c / (2.0 * dz)
    a_hi = 1.0 / dz**2 + c / (2.0 * dz)
    return a_lo, -2.0 / dz**2, a_hi


def discrete_wave(c: float, z: np.ndarray, guess: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    """Steady state of the discretised wave-frame problem, by Newton from ``guess``.

    Boundary values ``U(-L) = 1`` and ``U(0) = 0`` are taken from ``guess``.
    """
    dz = z[1] - z[0]
    a_lo, a_mid, a_hi = _wave_frame_matrix(c, dz, z.size - 2)
    U = guess.astype(float).copy()
    for _ in range(50):
        inner = U[1:-1]
        F = a_lo * U[:-2] + a_mid * inner + a_hi * U[2:] + inner * (1.0 - inner)
        ab = np.zeros((3, inner.size))
        ab[0, 1:] = a_hi
        ab[1, :] = a_mid + 1.0 - 2.0 * inner
        ab[2, :-1] = a_lo
        step = solve_banded((1, 1), ab, -F)
        U[1:-1] += step
        if np.max(np.abs(step)) < tol:
            return U
    raise NumericalFailure("Newton iteration for the discrete wave did not converge")


def perturb_decay_experiment(
    c: float,
    perturbation=None,
    amplitude: float = 0.01,
    T: float = 10.0,
    L: float = 40.0,
    nz: int = 801,
    dt: float = 1e-3,
    tail_fraction: float = 0.5,
    profile: WaveProfile | None = None,
) -> DecayReport:
    """Evolve ``U_t = U_zz + c U_z + U (1 - U)`` from a perturbed wave on ``[-L, 0]``.

    ``U(0) = 0`` and the far end is clamped to 1.  The distance to the
    discrete steady wave is measured in a discrete H^1 norm and a log-linear
    decay rate is fitted over the last ``tail_fraction`` of the run.
    """
    z = np.linspace(-L, 0.0, nz)
    dz = z[1] - z[0]
    if profile is None:
        profile = shoot_profile(c, length=L)
    guess, _ = profile(z)
    guess[0], guess[-1] = 1.0, 0.0
    wave = discrete_wave(c, z, guess)

    if perturbation is None:
        perturbation = default_bump
    phi = np.asarray(perturbation(z) if callable(perturbation) else perturbation, dtype=float)
    if phi.shape != z.shape:
        raise ValueError(f"perturbation must have nz={nz} samples")
    if abs(phi[-1]) > 1e-12:
        raise ValueError("perturbation must vanish at z = 0")
    phi = phi.copy()
    phi[0] = 0.0

    U = wave + amplitude * phi
    a_lo, a_mid, a_hi = _wave_frame_matrix(c, dz, nz - 2)
    m = nz - 2
    ab = np.zeros((3, m))
    ab[0, 1:] = -dt * a_hi
    ab[1, :] = 1.0 - dt * a_mid
    ab[2, :-1] = -dt * a_lo

    n_steps = int(round(T / dt))
    times = np.arange(n_steps + 1) * dt
    norms = np.empty(n_steps + 1)
    norms[0] = h1_norm(U - wave, dz)
    for k in range(n_steps):
        inner = U[1:-1]
        rhs = inner + dt * inner * (1.0 - inner)
        rhs[0] += dt * a_lo * U[0]
        U[1:-1] = solve_banded((1, 1), ab, rhs)
        norms[k + 1] = h1_norm(U - wave, dz)
    if not np.all(np.isfinite(norms)):
        raise NumericalFailure("non-finite perturbation norm")

    if norms[0] == 0.0:
        return DecayReport(float(c), float(amplitude), times, norms, math.nan, math.nan)
    growing = bool(norms[-1] > norms[0])
    if growing:
        warnings.warn("perturbation grew: the wave looks unstable at this resolution")
    tail = times >= (1.0 - tail_fraction) * T
    fit = linregress(times[tail], np.log(norms[tail]))
    return DecayReport(
        float(c), float(amplitude), times, norms,
        fitted_rate=float(-fit.slope), r_squared=float(fit.rvalue**2), growing=growing,
    )
