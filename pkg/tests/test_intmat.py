import random

import pytest
from hypothesis import given, settings, strategies as st

from hcork.intmat import (ComplexInvalid, HomologyGroups, IntMatrix, NonUnimodular, RowColOp,
                          apply_ops, cokernel, determinant, format_matrix, homology_from_complex,
                          parse_matrix, smith_normal_form, unimodular_reduce)

from oracles import minor_gcd_divisors, permutation_det, random_unimodular

small = st.integers(1, 4).flatmap(lambda n: st.integers(1, 4).flatmap(
    lambda m: st.lists(st.lists(st.integers(-6, 6), min_size=m, max_size=m), min_size=n, max_size=n)))
square = st.integers(1, 4).flatmap(lambda n: st.lists(
    st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=n, max_size=n))


def test_unimodular_examples():
    ops, out = unimodular_reduce(IntMatrix.identity(3))
    assert ops == [] and out.is_identity()
    ops, out = unimodular_reduce(IntMatrix.from_rows([[1, 1], [0, 1]]))
    assert ops == [RowColOp("add_col", 2, 1, -1)]
    with pytest.raises(NonUnimodular) as e:
        unimodular_reduce(IntMatrix.from_rows([[2]]))
    assert e.value.det == 2


def test_unimodular_swap():
    m = IntMatrix.from_rows([[0, 1], [1, 0]])
    ops, out = unimodular_reduce(m)
    assert out.is_identity()
    assert apply_ops(m, ops).is_identity()
    assert all(op.kind.startswith("swap") for op in ops)


def test_empty_matrix():
    ops, out = unimodular_reduce(IntMatrix.zeros(0, 0))
    assert ops == [] and out.shape == (0, 0)


def test_non_square_rejected():
    with pytest.raises(ValueError):
        unimodular_reduce(IntMatrix.from_rows([[1, 0]]))


def test_random_unimodular_replay():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 6)
        rows = random_unimodular(rng, n, rng.randint(0, 12))
        m = IntMatrix.from_rows(rows)
        ops, out = unimodular_reduce(m)
        assert out.is_identity()
        assert apply_ops(m, ops).is_identity()
        for op in ops:
            unit = apply_ops(IntMatrix.identity(n), [op])
            assert abs(determinant(unit)) == 1


@given(square)
def test_determinant_matches_permutation_expansion(rows):
    assert determinant(IntMatrix.from_rows(rows)) == permutation_det(rows)


@settings(max_examples=150)
@given(small)
def test_snf_against_minor_oracle(rows):
    m = IntMatrix.from_rows(rows)
    snf = smith_normal_form(m)
    nonzero = [d for d in snf.divisors if d]
    assert nonzero == minor_gcd_divisors(rows)
    for a, b in zip(nonzero, nonzero[1:]):
        assert b % a == 0
    assert snf.reconstruct() == m


@given(square)
def test_snf_product_is_abs_det(rows):
    divs = smith_normal_form(IntMatrix.from_rows(rows)).divisors
    prod = 1
    for d in divs:
        prod *= d
    assert prod == abs(permutation_det(rows))


def test_snf_examples():
    assert smith_normal_form(IntMatrix.from_rows([[0, 1], [1, 0]])).divisors == [1, 1]
    assert smith_normal_form(IntMatrix.from_rows([[2, 0], [0, 3]])).divisors == [1, 6]
    assert smith_normal_form(IntMatrix.zeros(2, 3)).divisors == [0, 0]


def test_op_inverse_round_trip():
    m = IntMatrix.from_rows([[1, 2, 3], [4, 5, 6], [7, 8, 10]])
    ops = [RowColOp("add_row", 1, 3, 4), RowColOp("swap_cols", 1, 2), RowColOp("negate_row", 2)]
    back = apply_ops(apply_ops(m, ops), [op.inverse() for op in reversed(ops)])
    assert back == m
    for op in ops:
        assert RowColOp.from_json(op.to_json()) == op


def test_homology_examples():
    h = homology_from_complex({2: IntMatrix.from_rows([[1]])})
    assert h.is_zero(1) and h.is_zero(2)
    h = homology_from_complex({}, ranks={1: 0, 2: 2, 3: 0})
    assert h.group(2) == (2, ()) and h.describe(2) == "Z^2"
    with pytest.raises(ComplexInvalid):
        homology_from_complex({1: IntMatrix.from_rows([[1]]), 2: IntMatrix.from_rows([[1]])})


def test_homology_torsion():
    h = homology_from_complex({1: IntMatrix.zeros(1, 1), 2: IntMatrix.from_rows([[4]])})
    assert h.group(1) == (0, (4,))
    assert h.describe(1) == "Z/4"
    assert h.group(0) == (1, ())


def test_homology_divisibility_enforced():
    with pytest.raises(ValueError):
        HomologyGroups({1: 0}, {1: (2, 3)})


def test_cokernel():
    assert cokernel(IntMatrix.from_rows([[0, 1], [1, 0]])) == (0, ())
    assert cokernel(IntMatrix.from_rows([[0]])) == (1, ())
    assert cokernel(IntMatrix.from_rows([[2, 0], [0, 0]])) == (1, (2,))


def test_matrix_text_round_trip():
    m = IntMatrix.from_rows([[1, -2], [0, 3], [5, 5]])
    assert parse_matrix(format_matrix(m)) == m
    with pytest.raises(ValueError):
        parse_matrix("2 2\n1 2\n")
