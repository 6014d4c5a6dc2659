"""Exact BEC recursion and Monte Carlo successive-cancellation decoding.

The encoder is the plain ``F^{(x)n}`` butterfly without bit reversal, so
decoding position ``i`` sees the synthetic channel whose MSB-first index
is the binary expansion of ``i``.

Random numbers come from counter-based Philox streams, one per fixed-size
chunk of trials.  Worker blocks only decide which chunks they run, and
the per-chunk integer counts are summed, so results depend on the seed and
nothing else.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .ga import ReliabilityProfile
from .index import ChannelSpec, check_levels
from .special import LLR_MAX

DEFAULT_SEED = 0x5EED
CHUNK_TRIALS = 8192
_Z95 = 1.959963984540054


def bec_profile(epsilon, n) -> ReliabilityProfile:
    """Erasure probabilities of all ``2^n`` synthetic channels of ``BEC(epsilon)``.

    ``Z+ = Z^2`` and ``Z- = 2Z - Z^2``; the error probability of an erasure
    channel under random guessing is ``Z/2``.  The complement ``1 - Z`` is
    carried alongside (``meta["complement"]``) so both stay accurate near
    0 and near 1.
    """
    check_levels(n)
    spec = epsilon if isinstance(epsilon, ChannelSpec) else ChannelSpec.bec(epsilon)
    if spec.kind != "BEC":
        raise ValidationError(f"bec_profile needs a BEC channel, got {spec}")
    z = np.array([spec.param])
    c = np.array([1.0 - spec.param])
    for _ in range(n):
        nz = np.empty(2 * len(z))
        nc = np.empty(2 * len(z))
        # minus: 1 - Z' = (1 - Z)^2;  plus: Z' = Z^2
        nz[0::2], nc[0::2] = z * (1.0 + c), c * c
        nz[1::2], nc[1::2] = z * z, c * (1.0 + z)
        z, c = nz, nc
    return ReliabilityProfile(
        n=n,
        metric="bhattacharyya",
        values=z,
        error_prob=z / 2.0,
        channel=spec,
        base=spec.param,
        updates=(1 << (n + 1)) - 2,
        meta={"complement": c},
    )


def encode(u):
    """``x = u F^{(x)n}`` over GF(2); ``u`` has shape ``(..., 2^n)``."""
    x = np.array(u, dtype=np.uint8, copy=True)
    size = x.shape[-1]
    if size < 1 or size & (size - 1):
        raise ValidationError(f"block length must be a power of two, got {size}")
    lead = x.shape[:-1]
    h = size // 2
    while h >= 1:
        view = x.reshape(lead + (size // (2 * h), 2, h))
        view[..., 0, :] ^= view[..., 1, :]
        h //= 2
    return x


def _f_exact(a, b):
    return (
        np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
        + np.log1p(np.exp(-np.abs(a + b)))
        - np.log1p(np.exp(-np.abs(a - b)))
    )


def _f_minsum(a, b):
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


@dataclass
class DecodeResult:
    """Decisions ``u_hat`` and, in genie mode, per-position error flags."""

    u_hat: np.ndarray
    errors: np.ndarray | None = None

    @property
    def first_error(self):
        """Position of the first error per trial, ``-1`` if none (genie mode only)."""
        if self.errors is None:
            return None
        hit = self.errors.any(axis=-1)
        return np.where(hit, self.errors.argmax(axis=-1), -1)


def sc_decode(channel_llrs, frozen=None, true_u=None, min_sum=False) -> DecodeResult:
    """Successive-cancellation decoding of a batch of received words.

    Parameters
    ----------
    channel_llrs : array, shape (N,) or (trials, N)
        Channel LLRs, positive favouring bit 0.
    frozen : bool array of length N, optional
        Frozen positions are decided as 0.  Ignored in genie mode.
    true_u : array like ``channel_llrs``, optional
        Genie mode: every decision is replaced by the true bit after
        recording whether the LLR pointed the wrong way.  A zero LLR counts
        as an error.
    min_sum : bool
        Use the min-sum check-node rule instead of the exact one.
    """
    llr = np.asarray(channel_llrs, dtype=float)
    single = llr.ndim == 1
    if single:
        llr = llr[None, :]
    trials, size = llr.shape
    if size < 1 or size & (size - 1):
        raise ValidationError(f"block length must be a power of two, got {size}")
    if frozen is None:
        frozen = np.zeros(size, dtype=bool)
    frozen = np.asarray(frozen, dtype=bool)
    if frozen.shape != (size,):
        raise ValidationError(f"frozen mask must have length {size}")
    genie = None
    errors = None
    if true_u is not None:
        genie = np.asarray(true_u, dtype=np.uint8).reshape(trials, size)
        errors = np.zeros((trials, size), dtype=bool)
    fnode = _f_minsum if min_sum else _f_exact

    def rec(L, lo):
        m = L.shape[1]
        if m == 1:
            value = L[:, 0]
            if genie is not None:
                t = genie[:, lo]
                errors[:, lo] = np.where(t == 0, value <= 0.0, value >= 0.0)
                u = t.copy()
            elif frozen[lo]:
                u = np.zeros(trials, dtype=np.uint8)
            else:
                # ties resolve to 1, which counts against the all-zero word
                u = (value <= 0.0).astype(np.uint8)
            return u[:, None], u[:, None]
        h = m // 2
        a, b = L[:, :h], L[:, h:]
        u1, x1 = rec(fnode(a, b), lo)
        u2, x2 = rec(b + (1.0 - 2.0 * x1) * a, lo + h)
        return np.concatenate([u1, u2], axis=1), np.concatenate([x1 ^ x2, x2], axis=1)

    u_hat, _ = rec(llr, 0)
    if single:
        u_hat = u_hat[0]
        errors = None if errors is None else errors[0]
    return DecodeResult(u_hat, errors)


def channel_llrs(spec: ChannelSpec, codeword, rng) -> np.ndarray:
    """Transmit ``codeword`` bits over ``spec`` and return channel LLRs."""
    x = np.asarray(codeword, dtype=np.uint8)
    sign = 1.0 - 2.0 * x
    shape = x.shape
    if spec.kind == "BEC":
        erased = rng.random(shape) < spec.param
        return np.where(erased, 0.0, LLR_MAX * sign)
    if spec.kind == "BSC":
        p = spec.param
        mag = LLR_MAX if p == 0.0 else math.log((1.0 - p) / p)
        flips = rng.random(shape) < p
        return np.where(flips, -sign, sign) * mag
    sigma = spec.param
    y = sign + sigma * rng.standard_normal(shape)
    return 2.0 * y / (sigma * sigma)


def interval(count, trials):
    """Wilson score 95% interval for a binomial rate.

    Unlike the normal-approximation interval it keeps its coverage when the
    rate is near 0 or 1, including counts of exactly 0 or ``trials``.
    """
    r = count / trials
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / trials
    centre = (r + z2 / (2.0 * trials)) / denom
    hw = _Z95 * math.sqrt(r * (1.0 - r) / trials + z2 / (4.0 * trials * trials)) / denom
    lo = 0.0 if count == 0 else max(0.0, centre - hw)
    hi = 1.0 if count == trials else min(1.0, centre + hw)
    return lo, hi


@dataclass
class SimConfig:
    """Monte Carlo settings; ``blocks`` only controls parallelism."""

    spec: ChannelSpec
    n: int
    trials: int
    seed: int = DEFAULT_SEED
    blocks: int = 1
    min_sum: bool = False

    def __post_init__(self):
        check_levels(self.n, cap=16)
        if not isinstance(self.spec, ChannelSpec):
            raise ValidationError("SimConfig.spec must be a ChannelSpec")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.blocks < 1:
            raise ValidationError(f"blocks must be >= 1, got {self.blocks}")
        if self.seed < 0:
            raise ValidationError(f"seed must be non-negative, got {self.seed}")


@dataclass
class SimResult:
    """Monte Carlo counts.

    For ``kind == "genie"``, ``counts[i]`` is the number of trials where
    position i was decided wrongly given a correct past.  For ``"fer"``,
    ``counts[i]`` is the number of frames whose first error is at i, and
    ``frame_errors`` is their total.
    """

    kind: str
    channel: ChannelSpec
    n: int
    trials: int
    seed: int
    counts: np.ndarray
    frame_errors: int | None = None
    elapsed: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def rates(self) -> np.ndarray:
        return self.counts / self.trials

    def interval(self, i):
        return interval(int(self.counts[i]), self.trials)

    @property
    def fer(self):
        return None if self.frame_errors is None else self.frame_errors / self.trials

    @property
    def fer_interval(self):
        return None if self.frame_errors is None else interval(self.frame_errors, self.trials)

    def to_json(self, timing=False):
        out = {
            "kind": self.kind,
            "channel": self.channel.to_json(),
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "counts": [int(c) for c in self.counts],
            "rates": [float(r) for r in self.rates],
            "intervals": [list(self.interval(i)) for i in range(len(self.counts))],
        }
        if self.frame_errors is not None:
            out["frame_errors"] = int(self.frame_errors)
            out["fer"] = self.fer
            out["fer_interval"] = list(self.fer_interval)
        out.update(self.meta)
        if timing:
            out["elapsed_s"] = self.elapsed
        return out


def _chunk_rng(seed, chunk):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _chunks(trials):
    return [(c, min(CHUNK_TRIALS, trials - c * CHUNK_TRIALS)) for c in range(-(-trials // CHUNK_TRIALS))]


def _thread_cap():
    env = os.environ.get("POLARFORGE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"POLARFORGE_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _run(cfg: SimConfig, work):
    chunks = _chunks(cfg.trials)
    blocks = [chunks[b :: cfg.blocks] for b in range(cfg.blocks)]
    size = 1 << cfg.n

    def run_block(block):
        acc = np.zeros(size, dtype=np.int64)
        for chunk, count in block:
            acc += work(_chunk_rng(cfg.seed, chunk), count)
        return acc

    workers = min(cfg.blocks, _thread_cap())
    if workers <= 1:
        parts = [run_block(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_block, blocks))
    return np.sum(parts, axis=0)


def genie_channel_error_rates(cfg: SimConfig) -> SimResult:
    """Per-position genie-aided SC error rates under all-zero transmission."""
    size = 1 << cfg.n
    zeros_word = np.zeros(size, dtype=np.uint8)

    def work(rng, count):
        llr = channel_llrs(cfg.spec, np.broadcast_to(zeros_word, (count, size)), rng)
        res = sc_decode(llr, true_u=np.zeros((count, size), dtype=np.uint8), min_sum=cfg.min_sum)
        return res.errors.sum(axis=0)

    start = time.perf_counter()
    counts = _run(cfg, work)
    return SimResult("genie", cfg.spec, cfg.n, cfg.trials, cfg.seed, counts,
                     elapsed=time.perf_counter() - start)


def simulate_fer(frozen, cfg: SimConfig) -> SimResult:
    """Frame error rate of plain SC decoding for the given frozen set.

    ``frozen`` is a boolean mask of length ``2^n`` or an object with a
    ``frozen_mask()`` method.  The all-zero codeword is sent, which is
    without loss of generality for these symmetric channels.
    """
    size = 1 << cfg.n
    mask = frozen.frozen_mask() if hasattr(frozen, "frozen_mask") else np.asarray(frozen, dtype=bool)
    if mask.shape != (size,):
        raise ValidationError(f"frozen mask must have length {size}")
    zeros_word = np.zeros(size, dtype=np.uint8)

    def work(rng, count):
        llr = channel_llrs(cfg.spec, np.broadcast_to(zeros_word, (count, size)), rng)
        u_hat = sc_decode(llr, frozen=mask, min_sum=cfg.min_sum).u_hat
        wrong = u_hat.astype(bool)
        hit = wrong.any(axis=1)
        first = wrong.argmax(axis=1)[hit]
        return np.bincount(first, minlength=size)

    start = time.perf_counter()
    counts = _run(cfg, work)
    return SimResult("fer", cfg.spec, cfg.n, cfg.trials, cfg.seed, counts,
                     frame_errors=int(counts.sum()), elapsed=time.perf_counter() - start)
