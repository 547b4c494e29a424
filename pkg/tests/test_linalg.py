from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ncsym import linalg
from ncsym.linalg import FieldError, Quotient, Subspace, prime_field

PRIMES = [2, 3, 7, 101]


def matrices(p, max_side=7):
    entries = st.integers(-9, 9) if p == 0 else st.integers(0, p - 1)
    return st.integers(0, max_side).flatmap(
        lambda m: st.integers(0, max_side).flatmap(
            lambda n: st.lists(st.lists(entries, min_size=n, max_size=n), min_size=m, max_size=m).map(
                lambda rows: (m, n, rows))))


def _as_array(F, shape_rows):
    m, n, rows = shape_rows
    return F.array(rows).reshape(m, n) if m and n else F.zeros((m, n))


def _sympy_rank(p, a):
    if a.size == 0:
        return 0
    if p == 0:
        return sympy.Matrix(a.tolist()).rank()
    from sympy.polys.matrices import DomainMatrix
    from sympy import GF
    dm = DomainMatrix([[GF(p)(int(x)) for x in row] for row in a.tolist()], a.shape, GF(p))
    return dm.rank()


@pytest.mark.parametrize("p", [0] + PRIMES)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_rank_matches_sympy(p, data):
    F = prime_field(p)
    a = _as_array(F, data.draw(matrices(p)))
    assert F.rank(a) == _sympy_rank(p, a)


@pytest.mark.parametrize("p", [0] + PRIMES)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_sparse_rank_matches_sympy(p, data):
    F = prime_field(p)
    a = _as_array(F, data.draw(matrices(p)))
    cols = [{r: a[r, c] for r in range(a.shape[0]) if a[r, c]} for c in range(a.shape[1])]
    assert F.sparse_rank(cols) == _sympy_rank(p, a)


@pytest.mark.parametrize("p", [0, 7])
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_kernel_and_rank_nullity(p, data):
    F = prime_field(p)
    a = _as_array(F, data.draw(matrices(p)))
    K = F.kernel(a)
    assert K.shape == (a.shape[1], a.shape[1] - F.rank(a))
    if K.size and a.size:
        assert F.is_zero(F.matmul(a, K))
    assert F.rank(K) == K.shape[1]


@pytest.mark.parametrize("p", [0, 5])
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_solve_consistent(p, data):
    F = prime_field(p)
    a = _as_array(F, data.draw(matrices(p, 6)))
    if a.size == 0:
        return
    rng = np.random.default_rng(data.draw(st.integers(0, 10**6)))
    x = F.random(a.shape[1], rng)
    b = F.matmul(a, x)
    y = F.solve(a, b)
    assert y is not None
    assert F.is_zero(F.sub(F.matmul(a, y), b))


def test_solve_inconsistent():
    F = prime_field(7)
    a = F.array([[1, 0], [1, 0]])
    assert F.solve(a, F.array([1, 2])) is None


@pytest.mark.parametrize("p", [0, 3, 7])
def test_inverse_and_det(p):
    F = prime_field(p)
    rng = np.random.default_rng(1)
    for _ in range(10):
        a = F.random((4, 4), rng)
        if not F.is_invertible(a):
            assert F.det(a) == 0
            continue
        assert F.is_zero(F.sub(F.matmul(a, F.inverse(a)), F.eye(4)))
        det_ref = sympy.Matrix(a.tolist()).det()
        assert F(det_ref) == F.det(a)


@pytest.mark.parametrize("p", [0, 7])
def test_flint_agrees_with_own_elimination(p, monkeypatch):
    if linalg._flint is None:
        pytest.skip("python-flint not installed")
    F = prime_field(p)
    rng = np.random.default_rng(3)
    # low-rank product so the echelon form is nontrivial
    a = F.matmul(F.random((60, 9), rng), F.random((9, 50), rng))
    own = F._rref_dense(a)
    fl = F._rref_flint(a)
    assert own[1] == fl[1]
    assert np.array_equal(np.asarray(own[0], dtype=object), np.asarray(fl[0], dtype=object))
    monkeypatch.setattr(linalg, "FLINT_THRESHOLD", 0)
    assert F.rank(a) == len(own[1]) == 9


def test_subspace_and_quotient():
    F = prime_field(7)
    V = Subspace(F, F.array([[1, 0], [1, 0], [0, 1]]), 3)
    assert V.dim == 2
    assert V.contains(F.array([2, 2, 5]))
    assert not V.contains(F.array([1, 0, 0]))
    Q = Quotient(F, 3, F.array([[1], [1], [0]]))
    assert Q.dim == 2
    assert F.is_zero(F.matmul(Q.proj, F.array([[1], [1], [0]])))
    assert F.is_zero(F.sub(F.matmul(Q.proj, Q.sect), F.eye(2)))


def test_rational_entries_are_exact():
    F = prime_field(0)
    a = F.array([[Fraction(1, 3), 1], [1, 3]])
    assert F.rank(a) == 1
    assert F.det(a) == 0


def test_bad_characteristic():
    with pytest.raises(FieldError):
        prime_field(6)
