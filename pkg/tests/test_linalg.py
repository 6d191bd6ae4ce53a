"""Exact linear algebra over Q and Q(sqrt(r))."""

from fractions import Fraction

import pytest

from qktwist.errors import Unsolvable
from qktwist.linalg import matrix_inverse, mat_mul, nullspace, rank, signature, solve_affine
from qktwist.scalars import Polynomial, ScalarRing

F = Fraction


def test_rank_and_nullspace():
    A = [[F(1), F(2), F(3)], [F(2), F(4), F(6)], [F(0), F(1), F(1)]]
    assert rank(A) == 2
    ns = nullspace(A)
    assert len(ns) == 1
    v = ns[0]
    for row in A:
        assert sum(a * b for a, b in zip(row, v)) == 0


def test_solve_affine_consistent_and_not():
    A = [[F(1), F(1)], [F(1), F(-1)]]
    part, basis, free = solve_affine(A, [F(3), F(1)])
    assert part == [F(2), F(1)]
    assert basis == [] and free == []
    A2 = [[F(1), F(1)], [F(2), F(2)]]
    assert solve_affine(A2, [F(1), F(3)]) is None
    part, basis, free = solve_affine([[F(1), F(2)]], [F(4)])
    assert part == [F(4), F(0)] and free == [1]
    assert basis == [[F(-2), F(1)]]


def test_matrix_inverse():
    A = [[F(2), F(1)], [F(5), F(3)]]
    Ainv = matrix_inverse(A)
    assert mat_mul(A, Ainv) == [[F(1), F(0)], [F(0), F(1)]]
    with pytest.raises(Unsolvable):
        matrix_inverse([[F(1), F(2)], [F(2), F(4)]])


def test_signature_diagonal_and_indefinite():
    assert signature([[F(2), F(0)], [F(0), F(3)]]) == (2, 0)
    assert signature([[F(-1), F(0)], [F(0), F(5)]]) == (1, 1)
    # hyperbolic plane: zero diagonal, off-diagonal pivot path
    assert signature([[F(0), F(1)], [F(1), F(0)]]) == (1, 1)
    # degenerate: plus + minus < n
    p, m = signature([[F(1), F(1)], [F(1), F(1)]])
    assert (p, m) == (1, 0)


def test_signature_quadratic_field():
    ring = ScalarRing(
        ["l"], relations=[(0, [((0,), F(0)), ((0,) * 1, F(0))])], algebraic=[]
    )
    # build Q(sqrt(3)) properly
    ring = ScalarRing(["l"], relations=[(0, [(ring.zero_mono(), F(3))])], algebraic=[(0, F(3))])
    l = Polynomial.var(ring, "l")
    one = Polynomial.const(ring, 1)
    # [[l, 1], [1, l]] has eigen-signs sign(l-1)>0 and sign(l+1)>0 -> (2, 0)
    assert signature([[l, one], [one, l]]) == (2, 0)
    # [[1, l], [l, 1]]: pivots 1 and 1 - l^2 = -2 -> (1, 1)
    assert signature([[one, l], [l, one]]) == (1, 1)
