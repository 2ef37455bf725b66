"""Essential spectrum of the wave linearisation.

Far from the front the linearised operator tends to

    L_inf p = p'' + c p' - p,    p'(-inf) = 0 = p(0),

whose Fredholm border is the parabola ``lambda = -k**2 - 1 + i c k``.  A value
``lambda`` lies in the resolvent set exactly when the characteristic root
``s_+ = (-c + sqrt(c**2 + 4 lambda + 4)) / 2`` has positive real part, which is
tested as ``Re sqrt(c**2 + 4 lambda + 4) > c`` with the principal root.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import lfilter

from .errors import NumericalFailure

BORDER_TOL = 1e-12


class Region(str, enum.Enum):
    RESOLVENT = "Resolvent"
    BORDER = "Border"
    ESSENTIAL_INTERIOR = "EssentialInterior"


@dataclass(frozen=True)
class SpectralQuery:
    c: float
    lam: complex


@dataclass
class BorderCurve:
    c: float
    k: np.ndarray
    lam: np.ndarray

    def to_rows(self):
        return [(float(k), float(l.real), float(l.imag)) for k, l in zip(self.k, self.lam)]


def fredholm_border(c: float, k):
    """``-k**2 - 1 + i c k``."""
    k_arr = np.asarray(k, dtype=float)
    lam = -(k_arr**2) - 1.0 + 1j * c * k_arr
    return complex(lam) if lam.ndim == 0 else lam


def border_curve(c: float, k_max: float = 5.0, n: int = 201) -> BorderCurve:
    k = np.linspace(-k_max, k_max, n)
    return BorderCurve(c=float(c), k=k, lam=fredholm_border(c, k))


def _root(c, lam):
    # grouping lambda + 1 keeps border points exact: c**2 + 4 (lambda + 1) = (c + 2ik)**2
    return np.sqrt(complex(c * c + 4.0 * (lam + 1.0)))


def classify_lambda(c: float, lam: complex, tol: float = BORDER_TOL) -> Region:
    """Resolvent, Border or EssentialInterior for the far-field operator.

    The test is conditioned like ``eps / |s|``, so border points are only
    resolved reliably when ``sqrt(c**2 + 4 (lambda + 1))`` is not tiny.
    """
    s = _root(c, complex(lam))
    gap = s.real - c
    if abs(gap) <= tol * max(1.0, abs(s)):
        return Region.BORDER
    return Region.RESOLVENT if gap > 0 else Region.ESSENTIAL_INTERIOR


def q_essential_border(c: float) -> float:
    """Right end ``-1 - c**2/4`` of the essential spectrum after ``q = p e^{cz/2}``."""
    if not c >= 0:
        raise ValueError(f"wave speed must be non-negative, got c={c}")
    return -1.0 - c * c / 4.0


def _resolvent_root(c, lam):
    if classify_lambda(c, lam) is not Region.RESOLVENT:
        raise ValueError(
            f"lambda={lam} is not in the resolvent set for c={c}; "
            "the Green's function does not decay there"
        )
    return _root(c, complex(lam))


def _lower(c, s, x, y):
    # branch for x < y
    return (np.exp(x * (s - c) / 2 + y * (s + c) / 2) - np.exp((x - y) * (s - c) / 2)) / s


def _upper(c, s, x, y):
    # branch for y < x
    return (np.exp(x * (s - c) / 2 + y * (s + c) / 2) - np.exp((y - x) * (s + c) / 2)) / s


def _real_if(lam, val):
    if np.imag(lam) == 0:
        val = np.real(val)
    return val.item() if np.ndim(val) == 0 else val


def greens_function(c: float, lam: complex, x, y):
    """Green's function of ``L_inf - lambda`` on the half line ``z <= 0``.

    Written in a form whose exponents are all non-positive, so it can be
    evaluated far from the boundary without overflow.
    """
    s = _resolvent_root(c, lam)
    x_arr, y_arr = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    if np.any(x_arr > 0) or np.any(y_arr > 0):
        raise ValueError("x and y must be <= 0")
    # both branches are evaluated; only the selected one is guaranteed finite
    with np.errstate(over="ignore", invalid="ignore"):
        val = np.where(x_arr < y_arr, _lower(c, s, x_arr, y_arr), _upper(c, s, x_arr, y_arr))
    return _real_if(lam, val)


def greens_dx(c: float, lam: complex, x, y):
    """Analytic ``dG/dx`` away from the diagonal (upper branch used on it)."""
    s = _resolvent_root(c, lam)
    x_arr, y_arr = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    with np.errstate(over="ignore", invalid="ignore"):
        return _real_if(lam, _dx_branches(c, s, x_arr, y_arr))


def _dx_branches(c, s, x_arr, y_arr):
    lower = (
        (s - c) / 2 * np.exp(x_arr * (s - c) / 2 + y_arr * (s + c) / 2)
        - (s - c) / 2 * np.exp((x_arr - y_arr) * (s - c) / 2)
    ) / s
    upper = (
        (s - c) / 2 * np.exp(x_arr * (s - c) / 2 + y_arr * (s + c) / 2)
        + (s + c) / 2 * np.exp((y_arr - x_arr) * (s + c) / 2)
    ) / s
    return np.where(x_arr < y_arr, lower, upper)


def derivative_jump(c: float, lam: complex, y: float, eps: float = 1e-4) -> complex:
    """Jump of ``dG/dx`` across ``x = y`` from centred differences of each branch.

    Each branch is an analytic function of ``x``, so it is differenced
    symmetrically about ``y`` and the two slopes are subtracted.
    """
    s = _resolvent_root(c, lam)
    up = (_upper(c, s, y + eps, y) - _upper(c, s, y - eps, y)) / (2 * eps)
    lo = (_lower(c, s, y + eps, y) - _lower(c, s, y - eps, y)) / (2 * eps)
    return complex(up - lo)


def far_field_operator(c: float, lam: complex, z, p, order: int = 4):
    """Apply ``p'' + c p' - (1 + lambda) p`` at interior nodes of a uniform grid.

    ``order=4`` uses five-point stencils (two nodes trimmed at each end),
    ``order=2`` three-point ones (one node trimmed).
    """
    z = np.asarray(z, dtype=float)
    p = np.asarray(p)
    dz = z[1] - z[0]
    if order == 2:
        d2 = (p[2:] - 2 * p[1:-1] + p[:-2]) / dz**2
        d1 = (p[2:] - p[:-2]) / (2 * dz)
        return d2 + c * d1 - (1.0 + lam) * p[1:-1], slice(1, -1)
    if order == 4:
        d2 = (-p[4:] + 16 * p[3:-1] - 30 * p[2:-2] + 16 * p[1:-3] - p[:-4]) / (12 * dz**2)
        d1 = (-p[4:] + 8 * p[3:-1] - 8 * p[1:-3] + p[:-4]) / (12 * dz)
        return d2 + c * d1 - (1.0 + lam) * p[2:-2], slice(2, -2)
    raise ValueError("order must be 2 or 4")


def resolvent_residual(c, lam, z, f, p, order: int = 4) -> float:
    applied, inner = far_field_operator(c, lam, z, p, order=order)
    return float(np.max(np.abs(applied - np.asarray(f)[inner])))


def _quadrature(c, lam, z, f, f_mid):
    # With a = (s + c)/2 and b = (s - c)/2 the kernel separates and
    #   s p(x) = e^{x b} A(0) - A(x) - B(x),
    #   A(x) = int_{-L}^{x} e^{(y - x) a} f(y) dy,   B(x) = int_{x}^{0} e^{(x - y) b} f(y) dy.
    # Both obey one-step recurrences; each panel [z_i, z_{i+1}] is integrated by
    # Simpson's rule with the midpoint sample, so all exponents stay non-positive.
    s = _resolvent_root(c, lam)
    real = np.imag(lam) == 0 and np.isrealobj(f) and np.isrealobj(f_mid)
    if real:
        s = s.real
    a, b = (s + c) / 2, (s - c) / 2
    h = z[1] - z[0]
    w = h / 6.0
    inc_a = w * (np.exp(-h * a) * f[:-1] + 4 * np.exp(-h * a / 2) * f_mid + f[1:])
    inc_b = w * (f[:-1] + 4 * np.exp(-h * b / 2) * f_mid + np.exp(-h * b) * f[1:])
    big_a = np.concatenate(([0.0], lfilter([1.0], [1.0, -np.exp(-h * a)], inc_a)))
    big_b = lfilter([1.0], [1.0, -np.exp(-h * b)], inc_b[::-1])[::-1]
    big_b = np.concatenate((big_b, [0.0]))
    return (np.exp(z * b) * big_a[-1] - big_a - big_b) / s


def _midpoints(f, z, f_vals):
    zm = 0.5 * (z[1:] + z[:-1])
    if callable(f):
        return np.asarray(f(zm))
    if np.iscomplexobj(f_vals):
        return CubicSpline(z, f_vals.real)(zm) + 1j * CubicSpline(z, f_vals.imag)(zm)
    return CubicSpline(z, f_vals)(zm)


def apply_resolvent(
    c: float,
    lam: complex,
    f,
    z=None,
    *,
    L: float = 40.0,
    nodes: int = 4001,
    check_convergence: bool = False,
):
    """Solve ``(L_inf - lambda) p = f`` on ``[-L, 0]`` by integrating against G.

    ``f`` is either a callable or samples on the uniform grid ``z``; sampled
    data is interpolated by a cubic spline to get panel midpoints.  The
    integral is split at ``x``, where G has its kink, and accumulated with
    composite Simpson panels, so the cost is linear in the number of nodes.
    Returns ``(z, p)``.

    With ``check_convergence`` the solve is repeated on every other node and
    :class:`NumericalFailure` is raised if the finer grid does not reduce the
    operator residual.
    """
    if z is None:
        z = np.linspace(-L, 0.0, nodes)
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.size < 3 or abs(z[-1]) > 1e-12:
        raise ValueError("z must be a uniform grid ending at 0")
    if not np.allclose(np.diff(z), z[1] - z[0], rtol=1e-9, atol=0):
        raise ValueError("z must be uniform")
    f_vals = np.asarray(f(z) if callable(f) else f)
    if f_vals.shape != z.shape:
        raise ValueError("f must have one sample per grid node")

    p = _quadrature(c, lam, z, f_vals, _midpoints(f, z, f_vals))
    if check_convergence:
        if (z.size - 1) % 2:
            raise ValueError("convergence check needs an even number of intervals")
        zc = z[::2]
        p_coarse = _quadrature(c, lam, zc, f_vals[::2], _midpoints(f, zc, f_vals[::2]))
        fine = resolvent_residual(c, lam, z, f_vals, p)
        coarse = resolvent_residual(c, lam, z[::2], f_vals[::2], p_coarse)
        if not fine < coarse:
            raise NumericalFailure(
                f"resolvent quadrature not converging: residual {fine:.3e} on the fine "
                f"grid vs {coarse:.3e} on the coarse grid"
            )
    return z, p
