"""The no-11 attractor set and its closure under the partial order.

Indices without two adjacent ``1`` bits are counted by Fibonacci numbers
and are less reliable than the natural channel for small base means.
``bad_set`` extends the attractor downward with the partial order and
records which operator order first reached each extra member.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, ValidationError
from .index import PolarIndex, check_levels
from .order import max_order as _max_order
from .order import poset

REGIMES = ("below_half_pi", "below_pi")
_REGIME_ALIASES = {
    "below_half_pi": "below_half_pi",
    "half-pi": "below_half_pi",
    "half_pi": "below_half_pi",
    "below_pi": "below_pi",
    "pi": "below_pi",
}


def regime_name(regime) -> str:
    try:
        return _REGIME_ALIASES[str(regime)]
    except KeyError:
        raise ValidationError(f"unknown regime {regime!r}; expected one of {REGIMES}") from None


def fib(i) -> int:
    """Fibonacci number with ``F_0 = 0``, ``F_1 = 1``."""
    if i < 0:
        raise ValidationError(f"fib index must be >= 0, got {i}")
    a, b = 0, 1
    for _ in range(i):
        a, b = b, a + b
    return a


def _no11_values(n):
    # prefix recursion: '0' + A(l-1)  and  '10' + A(l-2)
    levels = [[""], ["0", "1"]]
    for length in range(2, n + 1):
        levels.append(["0" + s for s in levels[length - 1]] + ["10" + s for s in levels[length - 2]])
    return sorted(int(s, 2) for s in levels[n])


def attractor_set(n):
    """All length-``n`` indices without adjacent ones, sorted by value."""
    check_levels(n)
    return [PolarIndex(n, v) for v in _no11_values(n)]


def attractor_count(n) -> int:
    check_levels(n)
    return fib(n + 2)


def attractor_set_below_pi(n):
    """Attractor members whose first bit is 0."""
    check_levels(n)
    return [PolarIndex(n, v) for v in _no11_values(n) if not v >> (n - 1)]


def alternating_exception(n):
    """The index ``1(01)^m`` for odd ``n``, else ``None``.

    It is the one attractor member that can beat the natural channel at
    base means below pi/2 (``1`` always does; ``10101`` does at L = 1.5),
    so it is excluded from universal seeding.
    """
    check_levels(n)
    if n % 2 == 0:
        return None
    return PolarIndex(n, int("1" + "01" * ((n - 1) // 2), 2))


def universal_seed(n, regime):
    """Seeds used for universal worse-than-natural classification."""
    regime = regime_name(regime)
    if regime == "below_pi":
        return attractor_set_below_pi(n)
    skip = alternating_exception(n)
    return [k for k in attractor_set(n) if k != skip]


def rate1(n) -> float:
    """Fraction of indices outside the attractor."""
    return float(1 - Fraction(attractor_count(n), 1 << n))


@dataclass(frozen=True)
class DeltaBreakdown:
    """Count of indices containing ``11``, split by where the first ``11`` sits."""

    n: int
    delta1: int
    delta2: int

    @property
    def delta(self) -> int:
        return self.delta1 + self.delta2

    @property
    def ratio(self) -> float:
        return self.delta / (1 << self.n)

    @property
    def closed_form(self) -> Fraction:
        """``2^(n-1) * sum_{t<n} F_t / 2^t``."""
        return (1 << (self.n - 1)) * sum(Fraction(fib(t), 1 << t) for t in range(self.n))

    def to_json(self):
        return {
            "n": self.n,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "delta": self.delta,
            "ratio": self.ratio,
            "closed_form": float(self.closed_form),
        }


def delta_formula(n) -> DeltaBreakdown:
    """Strings with a ``11`` whose first occurrence starts after position 1 (delta1)
    or at position 1 (delta2)."""
    check_levels(n)
    if n < 2:
        return DeltaBreakdown(n, 0, 0)

    def prefix_count(t):
        # no-11 prefixes of length t that can be followed by '0'; t = 0 is the empty prefix
        return 1 if t == 0 else attractor_count(t)

    d1 = sum(prefix_count(t) * (1 << (n - t - 3)) for t in range(n - 2))
    return DeltaBreakdown(n, d1, 1 << (n - 2))


def fibonacci_series_partial(k, terms) -> float:
    """``sum_{t=0}^{terms-1} F_t / k^t``; converges to ``k / (k^2 - k - 1)`` for k >= 2."""
    if k < 2:
        raise DomainError(f"series diverges for k = {k} < 2")
    if terms < 0:
        raise ValidationError(f"terms must be >= 0, got {terms}")
    return float(sum(Fraction(fib(t), k**t) for t in range(terms)))


def fibonacci_series_limit(k) -> Fraction:
    if k < 2:
        raise DomainError(f"series diverges for k = {k} < 2")
    return Fraction(k, k * k - k - 1)


@dataclass
class AttractorReport:
    """Attractor statistics and its partial-order closure for one length."""

    n: int
    regime: str
    max_order: int
    attractor: list
    seed: list
    members: dict = field(default_factory=dict)  # value -> provenance tag
    excluded: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.attractor)

    @property
    def rate1(self) -> float:
        return float(1 - Fraction(self.count, 1 << self.n))

    @property
    def po_extra(self) -> int:
        return sum(1 for tag in self.members.values() if tag != "attractor")

    @property
    def closure_size(self) -> int:
        return len(self.members)

    @property
    def rate2(self) -> float:
        return float(1 - Fraction(self.closure_size, 1 << self.n))

    def by_provenance(self) -> dict:
        out = {}
        for tag in self.members.values():
            out[tag] = out.get(tag, 0) + 1
        return dict(sorted(out.items()))

    def to_json(self):
        fmt = f"0{self.n}b"
        return {
            "n": self.n,
            "regime": self.regime,
            "max_order": self.max_order,
            "count": self.count,
            "rate1": self.rate1,
            "attractor": [k.bits for k in self.attractor],
            "seed_size": len(self.seed),
            "excluded": [k.bits for k in self.excluded],
            "closure_size": self.closure_size,
            "po_extra": self.po_extra,
            "rate2": self.rate2,
            "provenance_counts": self.by_provenance(),
            "members": {format(v, fmt): tag for v, tag in sorted(self.members.items())},
        }


def bad_set(n, llr_regime="below_half_pi", max_order=None, block_gap=True) -> AttractorReport:
    """Attractor seeds plus everything they dominate.

    Each closure member is tagged ``attractor`` or ``po<i>``, the lowest
    operator order among the steps that first reached it.
    """
    check_levels(n)
    regime = regime_name(llr_regime)
    top = _max_order(n) if max_order is None else min(int(max_order), _max_order(n))
    seed = universal_seed(n, regime)
    full = attractor_set(n) if regime == "below_half_pi" else attractor_set_below_pi(n)
    excluded = [k for k in full if k not in set(seed)]
    info = poset(n, top, block_gap).closure([k.value for k in seed], upward=False)
    seed_values = {k.value for k in seed}
    members = {}
    for v, (_, order) in info.items():
        members[v] = "attractor" if v in seed_values else f"po{order}"
    return AttractorReport(
        n=n,
        regime=regime,
        max_order=top,
        attractor=attractor_set(n),
        seed=seed,
        members=members,
        excluded=excluded,
    )
