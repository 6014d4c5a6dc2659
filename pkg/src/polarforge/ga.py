"""Simplified Gaussian-approximation density evolution.

Each synthetic channel's LLR is modeled as ``N(L, 2L)`` and only the mean
``L`` is tracked.  The ``+`` transform doubles it; the ``-`` transform is

    f2(L) = phi_inv(1 - (1 - phi(L))^2)

with the erfc-based ``phi``.  ``evolve`` and ``full_profile`` share one
vectorized kernel, so a profile entry and the matching single-path
evolution are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy import special as _sp

from . import special
from .errors import GeometryError, UnsupportedSpecError, ValidationError
from .index import ChannelSpec, PolarIndex, check_levels, parse_index
from .special import LLR_MAX, LLR_MIN

HALF_PI = math.pi / 2.0
PI = math.pi


@dataclass(frozen=True)
class LlrMean:
    """Mean of a consistent-Gaussian LLR; ``clamped`` records saturation."""

    value: float
    clamped: bool = False

    def __float__(self):
        return float(self.value)


def _as_value(L):
    if isinstance(L, LlrMean):
        return L.value, L.clamped
    v = float(L)
    if math.isnan(v) or v < 0.0:
        raise ValidationError(f"LLR mean must be a non-negative real, got {L!r}")
    return v, False


def _clamp(x):
    # Zero is the exact fixed point of both transforms and is kept as is.
    lo = (x > 0.0) & (x < LLR_MIN)
    hi = x > LLR_MAX
    return np.where(lo, LLR_MIN, np.where(hi, LLR_MAX, x)), lo | hi


def _plus_kernel(x):
    return _clamp(2.0 * x)


def _minus_kernel(x, table=None):
    r = np.sqrt(x) / 2.0
    if table is None:
        phi = _sp.erfc(r)
        # 1 - (1 - phi)^2 = phi (2 - phi); its complement is erf(r)^2
        q = _sp.erf(r)
        out = special.phi_inv_complement(phi * (2.0 - phi), q * q)
    else:
        phi = table.phi(x)
        out = table.phi_inv(phi * (2.0 - phi))
    out = np.where(x == 0.0, 0.0, np.asarray(out, dtype=float))
    return _clamp(out)


def init_llr(spec: ChannelSpec) -> LlrMean:
    """Initial LLR mean ``2 / sigma^2`` of a BPSK-AWGN channel."""
    if not isinstance(spec, ChannelSpec) or spec.kind != "AWGN":
        raise UnsupportedSpecError(f"GA initialization needs an AWGN channel, got {spec}")
    value = 2.0 / (spec.param * spec.param)
    if value > LLR_MAX:
        return LlrMean(LLR_MAX, True)
    if value < LLR_MIN:
        return LlrMean(LLR_MIN, True)
    return LlrMean(value)


def update_plus(L, table=None) -> LlrMean:
    """The ``+`` transform: ``L -> 2L``."""
    v, c = _as_value(L)
    out, clamped = _plus_kernel(np.array([v]))
    return LlrMean(float(out[0]), c or bool(clamped[0]))


def update_minus(L, table=None) -> LlrMean:
    """The ``-`` transform ``f2``; ``table`` selects the lookup-table phi."""
    v, c = _as_value(L)
    out, clamped = _minus_kernel(np.array([v]), table)
    return LlrMean(float(out[0]), c or bool(clamped[0]))


def _bits_of(k):
    if isinstance(k, PolarIndex):
        return k.bits
    if isinstance(k, str):
        return parse_index(k, len(k)).bits if k else ""
    raise ValidationError(f"expected PolarIndex or bit string, got {type(k).__name__}")


def evolve(base, k, table=None) -> LlrMean:
    """Evolve ``base`` along index ``k``, applying bits left to right."""
    v, clamped = _as_value(base)
    x = np.array([v])
    for b in _bits_of(k):
        x, c = _plus_kernel(x) if b == "1" else _minus_kernel(x, table)
        clamped = clamped or bool(c[0])
    return LlrMean(float(x[0]), clamped)


def error_prob(L):
    """Bit-error probability ``erfc(sqrt(L)/2) / 2`` of a channel with mean ``L``."""
    if isinstance(L, LlrMean):
        L = L.value
    a = np.asarray(L, dtype=float)
    if np.isnan(a).any() or (a < 0.0).any():
        raise ValidationError("error_prob needs non-negative LLR means")
    out = 0.5 * _sp.erfc(np.sqrt(a) / 2.0)
    return float(out) if out.ndim == 0 else out


@dataclass
class ReliabilityProfile:
    """Per-index reliability for all ``2^n`` synthetic channels.

    ``metric`` is ``"llr_mean"`` (GA) or ``"bhattacharyya"`` (BEC erasure
    probability).  ``values[i]`` belongs to the index with integer value i.
    """

    n: int
    metric: str
    values: np.ndarray
    error_prob: np.ndarray
    channel: ChannelSpec | None = None
    base: float | None = None
    clamped: int = 0
    updates: int = 0
    clamped_mask: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.values)

    def value(self, k) -> float:
        idx = k.value if isinstance(k, PolarIndex) else int(k, 2)
        return float(self.values[idx])

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "metric": self.metric,
            "channel": None if self.channel is None else self.channel.to_json(),
            "base": self.base,
            "clamped": int(self.clamped),
            "updates": int(self.updates),
            "indices": [format(i, f"0{self.n}b") for i in range(len(self.values))],
            "values": [float(v) for v in self.values],
            "error_prob": [float(v) for v in self.error_prob],
        }

    def csv_rows(self):
        header = ("index", "index_bits", "value", "error_prob")
        rows = [
            (i, format(i, f"0{self.n}b"), float(v), float(p))
            for i, (v, p) in enumerate(zip(self.values, self.error_prob))
        ]
        return header, rows


def evolve_tree(base, n, table=None):
    """Breadth-first profile over all 2^n leaves; returns (values, clamped, updates)."""
    v, c = _as_value(base)
    vals = np.array([v])
    clamped = np.array([c])
    updates = 0
    for _ in range(n):
        lo, clo = _minus_kernel(vals, table)
        hi, chi = _plus_kernel(vals)
        nxt = np.empty(2 * len(vals))
        nc = np.empty(2 * len(vals), dtype=bool)
        nxt[0::2], nxt[1::2] = lo, hi
        nc[0::2], nc[1::2] = clamped | clo, clamped | chi
        updates += 2 * len(vals)
        vals, clamped = nxt, nc
    return vals, clamped, updates


def full_profile(spec, n, table=None) -> ReliabilityProfile:
    """GA profile of all ``2^n`` synthetic channels of an AWGN channel.

    ``spec`` may also be an :class:`LlrMean` or float giving the base mean.
    """
    check_levels(n)
    if isinstance(spec, ChannelSpec):
        base = init_llr(spec)
        channel = spec
    else:
        v, c = _as_value(spec)
        base, channel = LlrMean(v, c), None
    vals, clamped, updates = evolve_tree(base, n, table)
    return ReliabilityProfile(
        n=n,
        metric="llr_mean",
        values=vals,
        error_prob=error_prob(vals),
        channel=channel,
        base=base.value,
        clamped=int(clamped.sum()),
        updates=updates,
        clamped_mask=clamped,
    )


def _minus_value(x):
    return float(_minus_kernel(np.array([x]))[0][0])


def find_fixed_point(lo=0.5, hi=8.0, grid=200, xtol=1e-9) -> float:
    """Crossing of ``f2(x)`` and ``x/2`` in ``(lo, hi]``.

    Also checks that ``f2(x) < x/2`` on a uniform grid below the crossing.
    Raises :class:`GeometryError` when the geometry does not hold.
    """

    def g(x):
        return _minus_value(x) - x / 2.0

    glo, ghi = g(lo), g(hi)
    if not (glo < 0.0 < ghi):
        raise GeometryError(f"no sign change of f2(x) - x/2 on ({lo}, {hi}]: {glo}, {ghi}")
    root = optimize.brentq(g, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
    xs = np.linspace(0.05, root, grid + 2)[1:-1]
    ys, _ = _minus_kernel(xs)
    bad = xs[ys >= xs / 2.0]
    if bad.size:
        raise GeometryError(f"f2(x) >= x/2 below the crossing at x = {bad[0]}")
    return float(root)


def _phi_exact_inv(y):
    # phi_exact is decreasing on [0, LLR_MAX]; bracket in sqrt(x)
    def h(s):
        return special.phi_exact(s * s) - y

    s = optimize.brentq(h, 0.0, 40.0, xtol=1e-12)
    return s * s


def minus_exact(x) -> float:
    """``f2`` evaluated with the quadrature phi instead of the erfc form."""
    p = special.phi_exact(float(x))
    return _phi_exact_inv(1.0 - (1.0 - p) ** 2)


def find_fixed_point_exact(lo=0.5, hi=8.0, xtol=1e-7) -> float:
    """Crossing of ``f2`` and ``x/2`` with the exact GA phi-function (diagnostic)."""

    def g(x):
        return minus_exact(x) - x / 2.0

    return float(optimize.brentq(g, lo, hi, xtol=xtol))
