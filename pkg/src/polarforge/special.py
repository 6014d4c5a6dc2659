"""Scalar kernels shared by the Gaussian-approximation engine.

``phi_simplified`` / ``phi_inv`` are the erfc-based forms of the GA
phi-function obtained by hard-limiting ``tanh``; ``phi_exact`` evaluates the
original integral by quadrature and is kept as a diagnostic reference.

All functions accept Python floats or numpy arrays and return the same
shape (0-d results come back as ``float``).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special as _sp
from scipy.interpolate import PchipInterpolator

from .errors import DomainError

SQRT_PI = math.sqrt(math.pi)

#: Smallest erfc value fed to the inverse; anything below saturates.
ERFCINV_Y_MIN = 1e-300

_NEWTON_STEPS = 6

# Abramowitz & Stegun 26.2.23 rational approximation of the normal upper quantile.
_AS_C = (2.515517, 0.802853, 0.010328)
_AS_D = (1.432788, 0.189269, 0.001308)


def _out(a):
    a = np.asarray(a, dtype=float)
    return float(a) if a.ndim == 0 else a


def _check_finite(x, name):
    a = np.asarray(x, dtype=float)
    if np.isnan(a).any():
        raise DomainError(f"{name}: NaN argument")
    return a


def erfc(x):
    """Complementary error function."""
    return _out(_sp.erfc(_check_finite(x, "erfc")))


def erfc_log(x):
    """``log(erfc(x))`` without underflow; valid far beyond x = 200."""
    a = _check_finite(x, "erfc_log")
    with np.errstate(divide="ignore"):
        pos = np.log(_sp.erfcx(np.maximum(a, 0.0))) - np.maximum(a, 0.0) ** 2
        neg = np.log(_sp.erfc(np.minimum(a, 0.0)))
    return _out(np.where(a >= 0.0, pos, neg))


def _initial_erfcinv(y):
    # y in (0, 1]; p = y/2 is the normal upper-tail probability
    t = np.sqrt(-2.0 * np.log(y / 2.0))
    c0, c1, c2 = _AS_C
    d1, d2, d3 = _AS_D
    z = t - (c0 + t * (c1 + t * c2)) / (1.0 + t * (d1 + t * (d2 + t * d3)))
    return np.maximum(z, 0.0) / math.sqrt(2.0)


def _erfcinv_pair(y, s):
    """Solve ``erfc(x) = y`` for y in (0, 1] given ``s = 1 - y`` accurately.

    Far tail: Newton on ``log erfc``.  Near y = 1: Newton on ``erf(x) = s`` so
    that the tiny complement is not lost to rounding.
    """
    y = np.asarray(y, dtype=float)
    s = np.asarray(s, dtype=float)
    near_one = y > 0.5
    x = np.where(near_one, s * (SQRT_PI / 2.0), _initial_erfcinv(np.minimum(y, 1.0)))
    logy = np.log(y)
    for _ in range(_NEWTON_STEPS):
        # log-erfc residual and derivative: d/dx log erfc = -2 / (sqrt(pi) erfcx)
        ex = _sp.erfcx(x)
        r_tail = (np.log(ex) - x * x) - logy
        step_tail = r_tail * (-SQRT_PI * ex / 2.0)
        r_head = _sp.erf(x) - s
        step_head = r_head / (2.0 / SQRT_PI * np.exp(-x * x))
        x = x - np.where(near_one, step_head, step_tail)
    return np.where(s == 0.0, 0.0, x)


def erfcinv(y):
    """Inverse of :func:`erfc` on (0, 2).

    Arguments below ``ERFCINV_Y_MIN`` saturate at ``erfcinv(ERFCINV_Y_MIN)``
    (about 26.209) rather than diverging.
    """
    a = _check_finite(y, "erfcinv")
    if ((a <= 0.0) | (a >= 2.0)).any():
        raise DomainError(f"erfcinv: argument outside (0, 2): {y!r}")
    lower = np.minimum(a, 2.0 - a)
    lower = np.maximum(lower, ERFCINV_Y_MIN)
    x = _erfcinv_pair(lower, 1.0 - lower)
    return _out(np.where(a > 1.0, -x, x))


def phi_simplified(x):
    """``erfc(sqrt(x) / 2)``; the hard-limited GA phi-function."""
    a = _check_finite(x, "phi_simplified")
    if (a < 0.0).any():
        raise DomainError(f"phi_simplified: negative argument {x!r}")
    return _out(_sp.erfc(np.sqrt(a) / 2.0))


def phi_inv(y):
    """``4 erfcinv(y)^2`` on (0, 1]; inverse of :func:`phi_simplified`."""
    a = _check_finite(y, "phi_inv")
    if ((a <= 0.0) | (a > 1.0)).any():
        raise DomainError(f"phi_inv: argument outside (0, 1]: {y!r}")
    lower = np.maximum(a, ERFCINV_Y_MIN)
    r = _erfcinv_pair(lower, 1.0 - lower)
    return _out(4.0 * r * r)


def phi_inv_complement(y, s):
    """:func:`phi_inv` of ``y`` when ``s = 1 - y`` is known more accurately than y."""
    y = np.maximum(np.asarray(y, dtype=float), ERFCINV_Y_MIN)
    r = _erfcinv_pair(y, np.asarray(s, dtype=float))
    return _out(4.0 * r * r)


#: Lower clamp for evolved LLR means (error probability is 1/2 to double precision).
LLR_MIN = 1e-12
#: Upper clamp: the largest mean whose phi value is still representable.
LLR_MAX = float(phi_inv(ERFCINV_Y_MIN))


# --- exact phi by quadrature ------------------------------------------------

_V_LIMIT = 8.0
_QUAD_TOL = 1e-10
_MAX_DEPTH = 40


@lru_cache(maxsize=None)
def _gauss_legendre(m):
    return np.polynomial.legendre.leggauss(m)


def _panel(func, a, b, m):
    nodes, weights = _gauss_legendre(m)
    half = 0.5 * (b - a)
    return half * float(np.dot(weights, func(0.5 * (a + b) + half * nodes)))


def _adaptive(func, a, b, tol):
    # Deterministic depth-first bisection; 10-point vs 20-point Gauss-Legendre.
    total = 0.0
    stack = [(a, b, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        coarse = _panel(func, lo, hi, 10)
        fine = _panel(func, lo, hi, 20)
        width_tol = tol * (hi - lo) / (b - a)
        if abs(fine - coarse) <= width_tol or depth >= _MAX_DEPTH:
            total += fine
        else:
            mid = 0.5 * (lo + hi)
            stack.append((mid, hi, depth + 1))
            stack.append((lo, mid, depth + 1))
    return total


def _phi_exact_scalar(x):
    if x == 0.0:
        return 1.0
    r = math.sqrt(x)

    # 1 - tanh(u/2) = 2 expit(-u), with u = x + 2 sqrt(x) v
    def integrand(v):
        return 2.0 * _sp.expit(-(x + 2.0 * r * v)) * np.exp(-v * v) / SQRT_PI

    return _adaptive(integrand, -_V_LIMIT, _V_LIMIT, _QUAD_TOL)


def phi_exact(x):
    """The GA phi-function ``1 - E[tanh(u/2)]``, ``u ~ N(x, 2x)``, by quadrature."""
    a = _check_finite(x, "phi_exact")
    if (a < 0.0).any():
        raise DomainError(f"phi_exact: negative argument {x!r}")
    if a.ndim == 0:
        return _phi_exact_scalar(float(a))
    return np.array([_phi_exact_scalar(float(v)) for v in a.ravel()]).reshape(a.shape)


# --- optional lookup table --------------------------------------------------


class PhiTable:
    """Monotone-cubic lookup tables for phi and its inverse.

    Both tables live in log-log coordinates, ``log x`` against
    ``log(-log phi(x))``, which is smooth with slope 1/2 at small x and slope
    1 at large x.  Immutable after construction, so one instance can be
    shared freely.
    """

    X_MIN = 1e-14

    def __init__(self, knots=4096):
        self.knots = int(knots)
        lx = np.linspace(math.log(self.X_MIN), math.log(LLR_MAX), self.knots)
        lphi = erfc_log(np.sqrt(np.exp(lx)) / 2.0)
        eta = np.log(-lphi)
        self._fwd = PchipInterpolator(lx, eta, extrapolate=True)
        self._inv = PchipInterpolator(eta, lx, extrapolate=True)

    def phi(self, x):
        a = np.clip(np.asarray(x, dtype=float), 0.0, LLR_MAX)
        with np.errstate(divide="ignore"):
            eta = self._fwd(np.log(a))
        return _out(np.where(a > 0.0, np.exp(-np.exp(eta)), 1.0))

    def phi_inv(self, y):
        a = np.clip(np.asarray(y, dtype=float), ERFCINV_Y_MIN, 1.0)
        with np.errstate(divide="ignore"):
            lx = self._inv(np.log(-np.log(a)))
        return _out(np.where(a < 1.0, np.minimum(np.exp(lx), LLR_MAX), 0.0))


@lru_cache(maxsize=4)
def phi_table(knots=4096) -> PhiTable:
    """Shared table instance for a given knot count."""
    return PhiTable(knots)
