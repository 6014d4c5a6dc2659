"""Code construction from universal classification plus GA ranking.

``design_code`` marks the partial-order closure of the attractor as
worse than the natural channel, evaluates the remaining indices with the
GA and keeps the ``K`` most reliable.  ``classify_vs_natural`` labels
every index relative to the natural channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .attractor import bad_set
from .errors import ConsistencyError, ValidationError
from .ga import HALF_PI, PI, _minus_kernel, _plus_kernel, error_prob, full_profile, init_llr
from .index import ChannelSpec, PolarIndex, check_levels, parse_index
from .order import poset

#: Largest n for which the dominance-edge audit runs by default.
AUDIT_EDGE_MAX_N = 12


def regime_for(L):
    """Universal regime usable at base mean ``L``, or ``None`` above pi."""
    if L < HALF_PI:
        return "below_half_pi"
    if L < PI:
        return "below_pi"
    return None


def union_bound(profile, info) -> float:
    """Sum of the error probabilities over ``info``, clamped to [0, 1]."""
    p = profile.error_prob if hasattr(profile, "error_prob") else np.asarray(profile, dtype=float)
    idx = [k.value if isinstance(k, PolarIndex) else int(k) for k in info]
    total = float(np.sum(p[idx])) if idx else 0.0
    return min(1.0, max(0.0, total))


@dataclass
class DesignResult:
    n: int
    channel: ChannelSpec
    base_llr: float
    regime: str | None
    rate: float
    K: int
    information: list
    provenance: list
    bound: float
    omega_size: int
    computed_worse: int
    updates: int
    evaluations: int
    lazy: bool
    values: np.ndarray = field(repr=False, default=None)
    meta: dict = field(default_factory=dict)

    @property
    def N(self):
        return 1 << self.n

    @property
    def frozen(self):
        info = set(self.information)
        return [v for v in range(self.N) if v not in info]

    def frozen_mask(self):
        mask = np.ones(self.N, dtype=bool)
        mask[self.information] = False
        return mask

    @property
    def worse_total(self):
        return self.omega_size + self.computed_worse

    def to_json(self):
        fmt = f"0{self.n}b"
        counts = {}
        for tag in self.provenance:
            counts[tag] = counts.get(tag, 0) + 1
        return {
            "n": self.n,
            "channel": self.channel.to_json(),
            "base_llr": self.base_llr,
            "regime": self.regime,
            "rate": self.rate,
            "K": self.K,
            "information": [format(v, fmt) for v in self.information],
            "frozen": [format(v, fmt) for v in self.frozen],
            "provenance": {format(v, fmt): t for v, t in enumerate(self.provenance)},
            "provenance_counts": dict(sorted(counts.items())),
            "omega_size": self.omega_size,
            "computed_worse": self.computed_worse,
            "worse_total": self.worse_total,
            "rate2_closure": 1.0 - self.omega_size / self.N,
            "rate2_computed": 1.0 - self.worse_total / self.N,
            "bound": self.bound,
            "updates": self.updates,
            "evaluations": self.evaluations,
            "lazy": self.lazy,
        }


def _lazy_values(base, n, needed_leaves, table=None):
    """Evolve only prefix-tree nodes with a needed leaf below them."""
    vals = np.array([base])
    updates = 0
    for level in range(1, n + 1):
        need = needed_leaves.reshape(1 << level, -1).any(axis=1)
        nxt = np.full(1 << level, np.nan)
        lo_idx = np.flatnonzero(need[0::2])
        hi_idx = np.flatnonzero(need[1::2])
        if lo_idx.size:
            nxt[2 * lo_idx] = _minus_kernel(vals[lo_idx], table)[0]
        if hi_idx.size:
            nxt[2 * hi_idx + 1] = _plus_kernel(vals[hi_idx])[0]
        updates += lo_idx.size + hi_idx.size
        vals = nxt
    return vals, updates


#: Largest n for which tie-breaking uses precomputed reachability bitsets.
REACH_MAX_N = 14


def _select(perr, K, n, ps):
    # error probability, then fewer dominators, then smaller value
    order = sorted(range(len(perr)), key=lambda i: (perr[i], i))
    if K == 0 or K == len(order):
        return sorted(order[:K])
    cut = perr[order[K - 1]]
    if perr[order[K]] != cut:
        return sorted(order[:K])
    tied = [i for i in order if perr[i] == cut]
    head = [i for i in order[:K] if perr[i] != cut]
    if n <= REACH_MAX_N:
        reach = ps.reach()
        tied.sort(key=lambda i: (reach[i].bit_count(), i))
    else:
        tied.sort(key=lambda i: (len(ps.closure([i], upward=True)), i))
    return sorted(head + tied[: K - len(head)])


def audit(values, base, n, omega, edges=True, max_order=None, clamped=None):
    """Check the universal classification against GA values.

    Edges touching a clamped value are skipped, since saturation can
    reorder values that are decision-irrelevant anyway.  Returns a list of
    violation strings; empty means consistent.
    """
    fmt = f"0{n}b"
    out = []
    for v in sorted(omega):
        if values[v] > base:
            out.append(f"{format(v, fmt)} classified worse but GA {values[v]:.17g} > {base:.17g}")
    if edges:
        ps = poset(n, max_order)
        sat = np.zeros(1 << n, dtype=bool) if clamped is None else clamped
        for v in range(1 << n):
            if sat[v]:
                continue
            for step, w in ps.up(v):
                if not sat[w] and values[w] < values[v]:
                    out.append(
                        f"{format(w, fmt)} dominates {format(v, fmt)} via {step} but "
                        f"GA {values[w]:.17g} < {values[v]:.17g}"
                    )
    return out


def design_code(spec: ChannelSpec, n, rate, lazy=False, check=True, table=None,
                max_order=None) -> DesignResult:
    """Pick ``K = round(rate * 2^n)`` information positions for an AWGN channel.

    Parameters
    ----------
    lazy : bool
        Only evolve prefix-tree nodes that lead to indices outside the
        universally-worse set.  Falls back to the full profile when a pick
        lies below the base mean, since a universally-worse index could
        then outrank it.

    ``updates`` counts single-node transform applications and
    ``evaluations`` the leaves whose GA value was computed.
    check : bool
        Audit the universal classification against the GA profile and raise
        :class:`ConsistencyError` on any disagreement (full mode only).
    """
    check_levels(n)
    rate = float(rate)
    if math.isnan(rate) or not 0.0 <= rate <= 1.0:
        raise ValidationError(f"rate must lie in [0, 1], got {rate}")
    base = init_llr(spec)
    L = base.value
    N = 1 << n
    K = int(math.floor(rate * N + 0.5))
    regime = regime_for(L)
    tags = bad_set(n, regime, max_order).members if regime else {}
    omega = np.zeros(N, dtype=bool)
    omega[list(tags)] = True
    complement = N - int(omega.sum())

    values = None
    updates = 0
    evaluations = 0
    if lazy and K <= complement:
        values, updates = _lazy_values(L, n, ~omega, table)
        evaluations = complement
        perr = np.where(omega, 1.0, error_prob(np.nan_to_num(values, nan=0.0)))
        info = _select(list(np.where(omega, np.inf, perr)), K, n, poset(n, max_order))
        # every member of omega is below L, so picks at or above L cannot be outranked
        if K and np.min(values[info]) < L:
            values = None
    if values is None:
        lazy = False
        prof = full_profile(base, n, table)
        values = prof.values
        updates += prof.updates
        evaluations = N
        if check:
            problems = audit(values, L, n, tags, edges=n <= AUDIT_EDGE_MAX_N,
                             max_order=max_order, clamped=prof.clamped_mask)
            if problems:
                raise ConsistencyError(
                    f"{len(problems)} disagreement(s) between universal order and GA", problems
                )
        perr = prof.error_prob
        info = _select(list(perr), K, n, poset(n, max_order))

    provenance = []
    computed_worse = 0
    for v in range(N):
        if v in tags:
            provenance.append(tags[v])
        elif values[v] < L:
            provenance.append("computed")
            computed_worse += 1
        else:
            provenance.append("default")
    return DesignResult(
        n=n,
        channel=spec,
        base_llr=L,
        regime=regime,
        rate=rate,
        K=K,
        information=info,
        provenance=provenance,
        bound=union_bound(perr, info),
        omega_size=int(omega.sum()),
        computed_worse=computed_worse,
        updates=updates,
        evaluations=evaluations,
        lazy=lazy,
        values=values,
    )


def write_frozen(result, path):
    """Write frozen positions as ascending decimal integers, one per line."""
    frozen = result.frozen if hasattr(result, "frozen") else sorted(int(v) for v in result)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("".join(f"{v}\n" for v in frozen))


def read_frozen(path, n):
    """Read a frozen-set file and return a boolean mask of length ``2^n``."""
    N = 1 << check_levels(n)
    mask = np.zeros(N, dtype=bool)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                v = int(text)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: not an integer: {text!r}") from None
            if not 0 <= v < N:
                raise ValidationError(f"{path}:{lineno}: index {v} outside [0, {N})")
            mask[v] = True
    return mask


# --- classification against the natural channel -----------------------------

LABELS = ("worse", "computed-worse", "computed-better", "better-or-equal")


@dataclass
class Classification:
    n: int
    channel: ChannelSpec
    base_llr: float
    regime: str | None
    labels: list
    witnesses: dict
    values: np.ndarray = field(repr=False, default=None)

    def counts(self):
        out = {label: 0 for label in LABELS}
        for label in self.labels:
            out[label] += 1
        return out

    def label(self, k):
        v = k.value if isinstance(k, PolarIndex) else parse_index(k, self.n).value
        return self.labels[v]

    def to_json(self):
        fmt = f"0{self.n}b"
        return {
            "n": self.n,
            "channel": self.channel.to_json(),
            "base_llr": self.base_llr,
            "regime": self.regime,
            "counts": self.counts(),
            "labels": {format(v, fmt): lab for v, lab in enumerate(self.labels)},
            "witnesses": {
                format(v, fmt): {"seed": format(seed, fmt), "steps": [s.to_json() for s in chain]}
                for v, (seed, chain) in sorted(self.witnesses.items())
            },
        }


def _witness_to_seed(ps, v, seeds):
    # BFS upward from v until a seed is met; returns (seed, chain)
    if v in seeds:
        return v, ()
    parent = {v: None}
    frontier = [v]
    while frontier:
        nxt = []
        for x in frontier:
            for step, w in ps.up(x):
                if w in parent:
                    continue
                parent[w] = (x, step)
                if w in seeds:
                    chain = []
                    y = w
                    while parent[y] is not None:
                        y, st = parent[y]
                        chain.append(st)
                    return w, tuple(chain)
                nxt.append(w)
        frontier = nxt
    raise ConsistencyError(f"no seed dominates member {v}")


def classify_vs_natural(spec: ChannelSpec, n, max_order=None) -> Classification:
    """Label every index relative to the natural channel.

    ``worse``: universally worse, with a witness chain from the index up to
    an attractor seed.  The rest is evaluated by the GA: ``computed-worse``
    when its mean is below the base; otherwise ``computed-better`` if no
    other unclassified index lies below it in the partial order, and
    ``better-or-equal`` if one does.
    """
    check_levels(n)
    base = init_llr(spec)
    L = base.value
    N = 1 << n
    regime = regime_for(L)
    report = bad_set(n, regime, max_order) if regime else None
    tags = report.members if report else {}
    seeds = {k.value for k in report.seed} if report else set()
    ps = poset(n, max_order)
    values = full_profile(base, n).values
    labels = []
    witnesses = {}
    for v in range(N):
        if v in tags:
            labels.append("worse")
            witnesses[v] = _witness_to_seed(ps, v, seeds)
        elif values[v] < L:
            labels.append("computed-worse")
        elif any(w not in tags for _, w in ps.down(v)):
            labels.append("better-or-equal")
        else:
            labels.append("computed-better")
    return Classification(n, spec, L, regime, labels, witnesses, values)
