"""Universal partial orders on synthetic-channel indices.

Operators of order ``i`` rewrite a less-reliable pattern into a more
reliable one:

* order 1 (addition): set one ``0`` bit to ``1``;
* order 2 (left swap): ``0 ... 1`` becomes ``1 ... 0`` at any distance;
* order i >= 3: block swap of the Thue-Morse words ``A_{i-1}`` and
  ``B_{i-1}``, so ``A B`` becomes ``B A``.

With ``block_gap=True`` (the default) the two blocks of an order-``i``
swap may be separated by arbitrary bits, which makes order 2 the block
length 1 case.  ``block_gap=False`` restricts order >= 3 to contiguous
patterns.

Every step strictly increases the integer value of an index, so ascending
value is a linear extension of the resulting order.  Moves are generated
on integers; the public functions wrap them in :class:`PolarIndex`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .errors import ValidationError
from .index import PolarIndex, check_levels, parse_index


@dataclass(frozen=True)
class OrderOperator:
    """Operator of a given order with its less/more reliable patterns."""

    order: int
    less_pattern: str
    more_pattern: str

    @property
    def block(self) -> int:
        """Length of each swapped block (0 for addition)."""
        return 0 if self.order == 1 else 1 << (self.order - 2)


def thue_morse_pair(i):
    """Return ``(A_i, B_i)`` with ``A_1 = '0'``, ``B_1 = '1'``."""
    if i < 1:
        raise ValidationError(f"Thue-Morse level must be >= 1, got {i}")
    a, b = "0", "1"
    for _ in range(i - 1):
        a, b = a + b, b + a
    return a, b


def max_order(n) -> int:
    """Highest operator order usable at length ``n``: ``1 + floor(log2 n)``."""
    check_levels(n)
    return n.bit_length()


def generate_operators(n):
    """Operators of orders ``1 .. 1 + floor(log2 n)``."""
    ops = [OrderOperator(1, "0", "1")]
    for order in range(2, max_order(n) + 1):
        a, b = thue_morse_pair(order - 1)
        ops.append(OrderOperator(order, a + b, b + a))
    return ops


@dataclass(frozen=True)
class Step:
    """One operator application: ``position`` is the 1-based start of the
    first block and ``gap`` the number of bits strictly between the blocks."""

    order: int
    position: int
    gap: int = 0

    def to_json(self):
        return {"order": self.order, "position": self.position, "gap": self.gap}


def _index(k, n=None):
    if isinstance(k, PolarIndex):
        return k
    if isinstance(k, str):
        return parse_index(k, len(k) if n is None else n)
    raise ValidationError(f"expected PolarIndex or bit string, got {type(k).__name__}")


def _field(v, n, start, length):
    # bits [start, start+length) counted from the MSB, 0-based
    shift = n - start - length
    return (v >> shift) & ((1 << length) - 1)


def _set_field(v, n, start, length, pattern):
    shift = n - start - length
    mask = ((1 << length) - 1) << shift
    return (v & ~mask) | (pattern << shift)


def _swap(v, n, h, p, s, src, dst):
    if _field(v, n, p, h) != src or _field(v, n, s, h) != dst:
        return None
    return _set_field(_set_field(v, n, p, h, dst), n, s, h, src)


def apply_addition(k, position):
    """Set the 0 bit at 1-based ``position`` to 1; ``None`` if it is already 1."""
    k = _index(k)
    if not 1 <= position <= k.n:
        raise ValidationError(f"position {position} outside [1, {k.n}]")
    bit = 1 << (k.n - position)
    return None if k.value & bit else PolarIndex(k.n, k.value | bit)


def apply_left_swap(k, i, t):
    """Move a 1 at position ``i + t`` to a 0 at position ``i``; ``None`` if inapplicable."""
    k = _index(k)
    if t < 1 or not 1 <= i or i + t > k.n:
        raise ValidationError(f"left swap ({i}, {t}) outside a length-{k.n} index")
    w = _swap(k.value, k.n, 1, i - 1, i - 1 + t, 0, 1)
    return None if w is None else PolarIndex(k.n, w)


def apply_multiple(k, op, position, gap=0):
    """Apply an order >= 3 block swap at 1-based ``position``.

    The first block spans ``position .. position+h-1`` and must read
    ``A``; the second starts ``gap`` bits later and must read ``B``.
    Returns ``None`` when the pattern does not match.
    """
    k = _index(k)
    if op.order < 3:
        raise ValidationError(f"apply_multiple needs order >= 3, got {op.order}")
    h = op.block
    if position < 1 or gap < 0 or position - 1 + 2 * h + gap > k.n:
        raise ValidationError(
            f"order-{op.order} swap at position {position} with gap {gap} "
            f"does not fit a length-{k.n} index"
        )
    a = int(op.less_pattern[:h], 2)
    b = int(op.less_pattern[h:], 2)
    p = position - 1
    w = _swap(k.value, k.n, h, p, p + h + gap, a, b)
    return None if w is None else PolarIndex(k.n, w)


class Poset:
    """Reachability structure for one ``(n, max_order, block_gap)`` setting.

    Move lists are memoized per node.  The memo only ever stores values
    that are pure functions of the key, so sharing one instance between
    threads yields identical results.
    """

    def __init__(self, n, max_order_=None, block_gap=True):
        self.n = check_levels(n)
        top = max_order(n)
        self.max_order = top if max_order_ is None else int(max_order_)
        if not 1 <= self.max_order:
            raise ValidationError(f"max_order must be >= 1, got {max_order_}")
        self.max_order = min(self.max_order, top)
        self.block_gap = bool(block_gap)
        self._patterns = []
        for order in range(2, self.max_order + 1):
            a, b = thue_morse_pair(order - 1)
            self._patterns.append((order, 1 << (order - 2), int(a, 2), int(b, 2)))
        self._up = {}
        self._down = {}
        self._reach = None

    def _moves(self, v, upward):
        n = self.n
        out = []
        for pos in range(n):
            bit = 1 << (n - 1 - pos)
            if upward and not v & bit:
                out.append((Step(1, pos + 1, 0), v | bit))
            elif not upward and v & bit:
                out.append((Step(1, pos + 1, 0), v & ~bit))
        for order, h, a, b in self._patterns:
            src, dst = (a, b) if upward else (b, a)
            gapped = self.block_gap or order == 2
            for p in range(n - 2 * h + 1):
                if _field(v, n, p, h) != src:
                    continue
                last = n - h if gapped else p + h
                for s in range(p + h, last + 1):
                    w = _swap(v, n, h, p, s, src, dst)
                    if w is not None:
                        out.append((Step(order, p + 1, s - p - h), w))
        return out

    def up(self, v):
        """Single-step successors of ``v`` (all strictly larger integers)."""
        moves = self._up.get(v)
        if moves is None:
            moves = self._up[v] = self._moves(v, True)
        return moves

    def down(self, v):
        """Single-step predecessors of ``v``."""
        moves = self._down.get(v)
        if moves is None:
            moves = self._down[v] = self._moves(v, False)
        return moves

    def witness(self, more, less):
        """Shortest step chain from ``less`` up to ``more``, or ``None``."""
        if more == less:
            return ()
        if more < less:
            return None
        parent = {less: None}
        queue = deque([less])
        while queue:
            v = queue.popleft()
            for step, w in self.up(v):
                if w in parent or w > more:
                    continue
                parent[w] = (v, step)
                if w == more:
                    chain = []
                    while parent[w] is not None:
                        w, st = parent[w]
                        chain.append(st)
                    return tuple(reversed(chain))
                queue.append(w)
        return None

    def closure(self, seeds, upward):
        """Closure of ``seeds`` with the BFS round and order of first reach.

        Returns a dict ``value -> (round, order)`` where ``order`` is the
        operator order of the step that first reached the value (0 for seeds).
        """
        info = {}
        frontier = []
        for v in sorted(set(seeds)):
            info[v] = (0, 0)
            frontier.append(v)
        rnd = 0
        while frontier:
            rnd += 1
            found = {}
            for v in frontier:
                for step, w in (self.up(v) if upward else self.down(v)):
                    if w in info:
                        continue
                    if w not in found or step.order < found[w]:
                        found[w] = step.order
            for w, order in found.items():
                info[w] = (rnd, order)
            frontier = sorted(found)
        return info

    def reach(self):
        """``reach()[v]`` is a bitset of all w with ``v`` dominated by w (inclusive)."""
        if self._reach is None:
            size = 1 << self.n
            r = [0] * size
            for v in range(size - 1, -1, -1):
                acc = 1 << v
                for _, w in self.up(v):
                    acc |= r[w]
                r[v] = acc
            self._reach = r
        return self._reach


@lru_cache(maxsize=64)
def poset(n, max_order_=None, block_gap=True) -> Poset:
    """Shared :class:`Poset` for a given setting."""
    return Poset(n, max_order_, block_gap)


@dataclass(frozen=True)
class DominanceRelation:
    """``less`` is dominated by ``more``; ``witness`` replays the steps."""

    less: PolarIndex
    more: PolarIndex
    witness: tuple

    def replay(self):
        """Apply the witness to ``less`` and return the final index."""
        ops = {op.order: op for op in generate_operators(self.less.n)}
        k = self.less
        for st in self.witness:
            if st.order == 1:
                k = apply_addition(k, st.position)
            elif st.order == 2:
                k = apply_left_swap(k, st.position, st.gap + 1)
            else:
                k = apply_multiple(k, ops[st.order], st.position, st.gap)
            if k is None:
                raise ValidationError(f"witness step {st} does not apply")
        return k

    def to_json(self):
        return {
            "less": self.less.bits,
            "more": self.more.bits,
            "witness": [s.to_json() for s in self.witness],
        }


def dominates(more, less, max_order=None, block_gap=True):
    """Return a :class:`DominanceRelation` if ``more`` dominates ``less``, else ``None``.

    Reflexive: an index dominates itself with an empty witness.
    """
    more = _index(more)
    less = _index(less)
    if more.n != less.n:
        raise ValidationError(f"length mismatch: {more.n} vs {less.n}")
    chain = poset(more.n, max_order, block_gap).witness(more.value, less.value)
    if chain is None:
        return None
    return DominanceRelation(less, more, chain)


def _closure(seed, max_order, block_gap, upward):
    seed = [_index(k) for k in seed]
    if not seed:
        return []
    n = seed[0].n
    if any(k.n != n for k in seed):
        raise ValidationError("closure seeds must share one length")
    info = poset(n, max_order, block_gap).closure([k.value for k in seed], upward)
    return [PolarIndex(n, v) for v in sorted(info)]


def upward_closure(seed, max_order=None, block_gap=True):
    """All indices dominating some seed, sorted by value."""
    return _closure(seed, max_order, block_gap, True)


def downward_closure(seed, max_order=None, block_gap=True):
    """All indices dominated by some seed, sorted by value."""
    return _closure(seed, max_order, block_gap, False)
