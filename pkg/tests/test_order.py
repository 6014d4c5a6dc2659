from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarforge.errors import ValidationError
from polarforge.index import hamming_weight, parse_index
from polarforge.order import (
    OrderOperator,
    apply_addition,
    apply_left_swap,
    apply_multiple,
    dominates,
    downward_closure,
    generate_operators,
    poset,
    thue_morse_pair,
    upward_closure,
)


def P(bits):
    return parse_index(bits, len(bits))


def _tm(i):
    a, b = "0", "1"
    for _ in range(i - 1):
        a, b = a + b, b + a
    return a, b


def oracle_up(s, max_order, gapped=True):
    """String-rewriting successors, written independently of the bit-level moves."""
    n = len(s)
    out = set()
    for i, ch in enumerate(s):
        if ch == "0":
            out.add(s[:i] + "1" + s[i + 1:])
    for order in range(2, max_order + 1):
        a, b = _tm(order - 1)
        h = len(a)
        for i in range(n - 2 * h + 1):
            if s[i:i + h] != a:
                continue
            starts = range(i + h, n - h + 1) if (gapped or order == 2) else [i + h]
            for j in starts:
                if s[j:j + h] == b:
                    out.add(s[:i] + b + s[i + h:j] + a + s[j + h:])
    return out


def oracle_reach(n, max_order, gapped=True):
    strings = [format(v, f"0{n}b") for v in range(1 << n)]
    reach = {}
    for s in strings:
        seen = {s}
        q = deque([s])
        while q:
            x = q.popleft()
            for y in oracle_up(x, max_order, gapped):
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        reach[s] = seen
    return reach


def test_operator_patterns():
    ops = generate_operators(16)
    assert [(o.less_pattern, o.more_pattern) for o in ops] == [
        ("0", "1"),
        ("01", "10"),
        ("0110", "1001"),
        ("01101001", "10010110"),
        ("0110100110010110", "1001011001101001"),
    ]
    assert ops[2] == OrderOperator(3, "0110", "1001")
    assert len(generate_operators(6)) == 3
    assert len(generate_operators(4)) == 3
    assert len(generate_operators(1)) == 1


@pytest.mark.parametrize("n", range(1, 25))
def test_operator_count(n):
    assert len(generate_operators(n)) == 1 + n.bit_length() - 1


def test_thue_morse():
    assert thue_morse_pair(3) == ("0110", "1001")
    with pytest.raises(ValidationError):
        thue_morse_pair(0)


def test_addition():
    assert apply_addition(P("0100"), 4) == P("0101")
    assert apply_addition(P("0001"), 2) == P("0101")
    assert all(apply_addition(P("1111"), i) is None for i in range(1, 5))
    with pytest.raises(ValidationError):
        apply_addition(P("0100"), 5)


def test_left_swap():
    assert apply_left_swap(P("0011"), 2, 1) == P("0101")
    assert apply_left_swap(P("0001"), 1, 3) == P("1000")
    assert apply_left_swap(P("0110"), 1, 1) == P("1010")
    assert apply_left_swap(P("1010"), 1, 1) is None
    with pytest.raises(ValidationError):
        apply_left_swap(P("0110"), 3, 2)
    with pytest.raises(ValidationError):
        apply_left_swap(P("0110"), 1, 0)


def test_multiple():
    ops = generate_operators(8)
    assert apply_multiple(P("0110"), ops[2], 1) == P("1001")
    assert apply_multiple(P("01101001"), ops[3], 1) == P("10010110")
    assert apply_multiple(P("011100"), ops[2], 2) is None
    assert apply_multiple(P("011010"), ops[2], 1, gap=2) == P("101001")
    with pytest.raises(ValidationError):
        apply_multiple(P("0110"), ops[1], 1)
    with pytest.raises(ValidationError):
        apply_multiple(P("01100"), ops[2], 3)


def test_dominates_examples():
    rel = dominates(P("1001"), P("0110"), 3)
    assert rel is not None and [s.order for s in rel.witness] == [3]
    assert dominates(P("0100"), P("0011"), 2) is None
    assert dominates(P("0011"), P("0100"), 2) is None
    assert dominates(P("1010"), P("0101"), 2) is not None
    assert dominates(P("0110"), P("0110")).witness == ()
    assert dominates(P("101010"), P("011100"), 3) is not None
    with pytest.raises(ValidationError):
        dominates(P("10"), P("010"))


def test_closures():
    assert len(upward_closure([P("0000")])) == 16
    assert len(downward_closure([P("1111")])) == 16
    assert upward_closure([P("1111")]) == [P("1111")]
    assert [k.bits for k in upward_closure([P("0000")], max_order=1)][-1] == "1111"
    assert P("011000") in downward_closure([P("101000")], max_order=2)
    assert upward_closure([]) == []


@pytest.mark.parametrize("gapped", [True, False])
@pytest.mark.parametrize("n", range(1, 8))
def test_reachability_matches_string_oracle(n, gapped):
    top = n.bit_length()
    ref = oracle_reach(n, top, gapped)
    reach = poset(n, top, gapped).reach()
    for v in range(1 << n):
        s = format(v, f"0{n}b")
        got = {format(w, f"0{n}b") for w in range(1 << n) if reach[v] >> w & 1}
        assert got == ref[s]


def test_bfs_dominates_agrees_with_bitsets():
    n = 6
    reach = poset(n).reach()
    for v in range(1 << n):
        for w in range(1 << n):
            rel = dominates(parse_index(format(w, "06b"), n), parse_index(format(v, "06b"), n))
            assert (rel is not None) == bool(reach[v] >> w & 1)


@pytest.mark.parametrize("n", range(1, 9))
def test_antisymmetry(n):
    reach = poset(n).reach()
    for v in range(1 << n):
        for w in range(v + 1, 1 << n):
            assert not (reach[v] >> w & 1 and reach[w] >> v & 1)


def test_weight_never_drops():
    n = 8
    reach = poset(n).reach()
    for v in range(1 << n):
        r = reach[v]
        for w in range(1 << n):
            if r >> w & 1:
                assert bin(w).count("1") >= bin(v).count("1")


def test_higher_orders_never_contradict_lower():
    # any order-3 relation must not be reversed by the order-1/2 closure
    n = 8
    low = poset(n, 2).reach()
    full = poset(n).reach()
    for v in range(1 << n):
        for w in range(1 << n):
            if full[v] >> w & 1 and w != v:
                assert not low[w] >> v & 1


def test_contiguous_is_a_refinement():
    for n in range(4, 9):
        c = poset(n, None, False).reach()
        g = poset(n, None, True).reach()
        assert all(c[v] & ~g[v] == 0 for v in range(1 << n))


idx8 = st.integers(min_value=0, max_value=255).map(lambda v: parse_index(format(v, "08b"), 8))


@settings(max_examples=150, deadline=None)
@given(idx8, idx8)
def test_witness_replays(a, b):
    rel = dominates(a, b)
    if rel is not None:
        assert rel.replay() == a
        assert hamming_weight(a) >= hamming_weight(b)


@settings(max_examples=100, deadline=None)
@given(idx8, idx8, idx8)
def test_transitivity(a, b, c):
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c) is not None
