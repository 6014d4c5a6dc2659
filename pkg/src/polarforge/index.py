"""Synthetic-channel indices and natural-channel descriptions.

An index is an n-bit polarization string read MSB-first: bit 1 is the
first polarization step, ``1`` stands for the ``+`` transform and ``0``
for the ``-`` transform.  So ``W^{+--+}`` is ``1001`` and has value 9.

Every other module relies on this convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .errors import ValidationError

#: Default upper bound on the number of polarization levels.
N_CAP = 24


def check_levels(n, cap=None):
    """Validate a level count against the configured cap and return it."""
    cap = N_CAP if cap is None else cap
    if isinstance(n, bool) or not isinstance(n, int):
        raise ValidationError(f"level count must be an integer, got {n!r}")
    if n < 1:
        raise ValidationError(f"level count must be >= 1, got {n}")
    if n > cap:
        raise ValidationError(f"level count {n} exceeds cap {cap}")
    return n


@dataclass(frozen=True, order=True)
class PolarIndex:
    """Fixed-length synthetic-channel index.

    Ordered by ``(n, value)`` so sorting a same-length collection sorts by
    integer value.
    """

    n: int
    value: int

    def __post_init__(self):
        check_levels(self.n)
        if isinstance(self.value, bool) or not isinstance(self.value, int):
            raise ValidationError(f"index value must be an integer, got {self.value!r}")
        if not 0 <= self.value < (1 << self.n):
            raise ValidationError(f"index value {self.value} outside [0, 2^{self.n})")

    @cached_property
    def bits(self) -> str:
        return format(self.value, f"0{self.n}b")

    def bit(self, position: int) -> int:
        """Bit at 1-based ``position`` (1 = MSB = first polarization step)."""
        if not 1 <= position <= self.n:
            raise ValidationError(f"position {position} outside [1, {self.n}]")
        return (self.value >> (self.n - position)) & 1

    @property
    def signs(self) -> str:
        """The +/- superscript string, e.g. ``'+--+'`` for 1001."""
        return self.bits.replace("1", "+").replace("0", "-")

    def to_json(self) -> dict:
        return {"n": self.n, "bits": self.bits}

    @classmethod
    def from_json(cls, obj) -> "PolarIndex":
        return parse_index(obj["bits"], obj["n"])

    def __str__(self):
        return self.bits


def parse_index(text, n) -> PolarIndex:
    """Parse a ``'0'``/``'1'`` string of length ``n`` into a PolarIndex."""
    check_levels(n)
    if not isinstance(text, str):
        raise ValidationError(f"index text must be a string, got {type(text).__name__}")
    for pos, ch in enumerate(text, start=1):
        if ch not in "01":
            raise ValidationError(f"invalid symbol {ch!r} at position {pos} in index {text!r}")
    if len(text) != n:
        raise ValidationError(
            f"index {text!r} has length {len(text)}, expected {n} "
            f"(first offending position {min(len(text), n) + 1})"
        )
    return PolarIndex(n, int(text, 2))


def has_adjacent_ones(k: PolarIndex) -> bool:
    return bool(k.value & (k.value >> 1))


def hamming_weight(k: PolarIndex) -> int:
    return bin(k.value).count("1")


def all_indices(n):
    """All 2^n indices of length n in ascending order."""
    check_levels(n)
    return [PolarIndex(n, v) for v in range(1 << n)]


_KINDS = ("BEC", "BSC", "AWGN")


@dataclass(frozen=True)
class ChannelSpec:
    """Natural channel: ``BEC(eps)``, ``BSC(p)`` or BPSK-AWGN with noise std ``sigma``."""

    kind: str
    param: float

    def __post_init__(self):
        kind = str(self.kind).upper()
        object.__setattr__(self, "kind", kind)
        if kind not in _KINDS:
            raise ValidationError(f"unknown channel kind {self.kind!r}; expected one of {_KINDS}")
        try:
            p = float(self.param)
        except (TypeError, ValueError):
            raise ValidationError(f"channel parameter must be real, got {self.param!r}") from None
        object.__setattr__(self, "param", p)
        if math.isnan(p):
            raise ValidationError("channel parameter is NaN")
        if kind == "BEC" and not 0.0 <= p <= 1.0:
            raise ValidationError(f"BEC erasure probability {p} outside [0, 1]")
        if kind == "BSC" and not 0.0 <= p <= 0.5:
            raise ValidationError(f"BSC crossover probability {p} outside [0, 1/2]")
        if kind == "AWGN" and not (p > 0.0 and math.isfinite(p)):
            raise ValidationError(f"AWGN noise std must be positive and finite, got {p}")

    @classmethod
    def bec(cls, epsilon):
        return cls("BEC", epsilon)

    @classmethod
    def bsc(cls, p):
        return cls("BSC", p)

    @classmethod
    def awgn(cls, sigma):
        return cls("AWGN", sigma)

    @classmethod
    def awgn_from_snr_db(cls, snr_db, rate=1.0):
        """AWGN channel for BPSK at ``Eb/N0 = snr_db`` with code rate ``rate``.

        ``sigma^2 = 1 / (2 R 10^(snr/10))``; ``rate=1`` gives the Es/N0 convention.
        """
        if not 0.0 < rate <= 1.0:
            raise ValidationError(f"rate for SNR conversion must lie in (0, 1], got {rate}")
        ebn0 = 10.0 ** (float(snr_db) / 10.0)
        return cls("AWGN", math.sqrt(1.0 / (2.0 * rate * ebn0)))

    def to_json(self) -> dict:
        return {"kind": self.kind, "param": self.param}

    @classmethod
    def from_json(cls, obj) -> "ChannelSpec":
        return cls(obj["kind"], obj["param"])

    def __str__(self):
        return f"{self.kind}({self.param:g})"
