from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from eqcsm.polyarith import LinearForm, MultiPoly, parse_poly
from eqcsm.symfunc import (NotSymmetric, Partition, SchurTable, expand_schur, expand_two_alphabets,
                           hook_degree, is_symmetric, parse_partition, partitions_in_rectangle,
                           schur, schur_decompose)


def P(text, n):
    return parse_poly(text, n)


# --- partitions -----------------------------------------------------------------

def test_partition_normalizes_trailing_zeros():
    assert Partition([2, 1, 0, 0]) == Partition([2, 1])
    assert Partition([2, 1]).padded(4) == (2, 1, 0, 0)
    with pytest.raises(ValueError):
        Partition([1, 2])


def test_conjugate_and_labels():
    assert Partition([3, 1]).conjugate() == Partition([2, 1, 1])
    assert Partition().label() == "0"
    assert Partition([3, 3, 2]).label() == "332"
    assert parse_partition("21") == Partition([2, 1])
    assert parse_partition("10,2") == Partition([10, 2])
    assert parse_partition("0") == Partition()


def test_partitions_in_rectangle():
    assert partitions_in_rectangle(1, 1) == [Partition(), Partition([1])]
    assert partitions_in_rectangle(2, 2) == [Partition(p) for p in
                                             [(), (1,), (2,), (1, 1), (2, 1), (2, 2)]]
    assert len(partitions_in_rectangle(3, 4)) == 35


@given(st.integers(0, 4), st.integers(0, 4))
def test_rectangle_count_is_binomial(rows, cols):
    from math import comb
    parts = partitions_in_rectangle(rows, cols)
    assert len(parts) == comb(rows + cols, rows) == len(set(parts))


def test_hook_degree():
    assert hook_degree(3, 7) == 462
    assert hook_degree(1, 2) == 1
    assert hook_degree(2, 4) == 2


# --- Schur polynomials ----------------------------------------------------------

def test_schur_examples():
    assert schur((), [1, 2]) == MultiPoly.const(2, 1)
    assert schur((1,), [1, 2]) == P("t1 + t2", 2)
    assert schur((2, 1), [1, 2]) == P("t1^2*t2 + t1*t2^2", 2)


def test_schur_negated_alphabet():
    assert schur((1,), [1, 2], negate=True) == P("-t1 - t2", 2)
    assert schur((1, 1), [1, 2], negate=True) == P("t1*t2", 2)


def test_schur_embeds_in_larger_ring():
    assert schur((1,), [3, 4], 4) == P("t3 + t4", 4)


def test_schur_too_long_partition():
    with pytest.raises(ValueError):
        schur((1, 1, 1), [1, 2])


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_bialternant_is_exact_and_symmetric(k):
    # every partition in the 3x3 box, alphabets of size up to 4
    for I in partitions_in_rectangle(min(3, k), 3):
        s = schur(I, range(1, k + 1))
        assert is_symmetric(s, range(1, k + 1))
        assert s.is_homogeneous() and s.degree() == I.weight


def test_pieri_spot_check():
    for k in (2, 3):
        vs = range(1, k + 1)
        assert schur((1,), vs) * schur((1,), vs) == schur((2,), vs) + schur((1, 1), vs)


def test_schur_single_variable_is_power():
    assert schur((4,), [1]) == P("t1^4", 1)


# --- expansions -----------------------------------------------------------------

def test_expand_schur_examples():
    assert expand_schur(P("t1^2 + t1*t2 + t2^2", 2), [1, 2]).entries == {(Partition([2]),): 1}
    assert expand_schur(P("t1*t2", 2), [1, 2]).entries == {(Partition([1, 1]),): 1}
    s1 = P("t1 + t2 + t3", 3)
    s2 = P("t1*t2 + t1*t3 + t2*t3", 3)
    assert expand_schur(s1 * s1 - s2, [1, 2, 3]).entries == {(Partition([2]),): 1}


def test_expand_requires_symmetry():
    with pytest.raises(NotSymmetric):
        expand_schur(P("t1^2", 2), [1, 2])


def cells(entries):
    return {tuple(p.label() for p in k): c for k, c in entries.items()}


def test_two_alphabets_degree_one():
    table = expand_two_alphabets(P("t3 + t4 - t1 - t2", 4), [1, 2], [3, 4])
    assert cells(table.entries) == {("0", "1"): 1, ("1", "0"): 1}


def test_two_alphabets_square():
    table = expand_two_alphabets(P("t3 + t4 - t1 - t2", 4) ** 2, [1, 2], [3, 4])
    assert cells(table.entries) == {("0", "2"): 1, ("0", "11"): 1, ("1", "1"): 2,
                                    ("2", "0"): 1, ("11", "0"): 1}


@pytest.mark.parametrize("m", [2, 3])
def test_dual_cauchy(m):
    n = 2 * m
    e = MultiPoly.const(n, 1)
    for i in range(1, m + 1):
        for j in range(m + 1, n + 1):
            e = e * LinearForm.diff(n, j, i).to_poly()
    table = expand_two_alphabets(e, range(1, m + 1), range(m + 1, n + 1))
    assert set(table.entries.values()) == {1}
    box = partitions_in_rectangle(m, m)
    assert len(table.entries) == len(box)
    for I, J in table.entries:
        # J is the complement of the conjugate of I in the m x m box
        Ic = I.conjugate().padded(m)
        assert J == Partition(m - x for x in reversed(Ic))


@st.composite
def symmetric_polys(draw, k):
    """Random combinations of monomial symmetric functions in k variables."""
    n = k
    out = MultiPoly.zero(n)
    for _ in range(draw(st.integers(0, 4))):
        lam = sorted(draw(st.lists(st.integers(0, 3), min_size=k, max_size=k)), reverse=True)
        c = draw(st.integers(-3, 3))
        out = out + MultiPoly.from_terms(n, {e: c for e in set(permutations(lam))})
    return out


@given(st.integers(1, 4).flatmap(lambda k: st.tuples(st.just(k), symmetric_polys(k))))
def test_schur_round_trip(case):
    k, p = case
    table = expand_schur(p, range(1, k + 1))
    assert table.to_poly() == p
    neg = expand_schur(p, range(1, k + 1), negate=True)
    assert neg.to_poly() == p


@given(symmetric_polys(2), symmetric_polys(2))
def test_two_alphabet_round_trip(a, b):
    p = a.embed(4, [1, 2]) * b.embed(4, [3, 4]) + b.embed(4, [1, 2])
    table = expand_two_alphabets(p, [1, 2], [3, 4])
    assert table.to_poly() == p


def test_schur_decompose_leaves_other_variables():
    p = P("t1*t3 + t2*t3", 3)
    assert schur_decompose(p, [1, 2]) == {Partition([1]): P("t3", 3)}


def test_schur_table_json_round_trip():
    table = expand_two_alphabets(P("t3 + t4 - t1 - t2", 4) ** 3, [1, 2], [3, 4])
    back = SchurTable.from_json(table.to_json())
    assert back.entries == table.entries and back.to_poly() == table.to_poly()
    assert table[(Partition([1]), Partition([1]))] == table.get(((1,), (1,)))
