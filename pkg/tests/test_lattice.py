import numpy as np
from hypothesis import given, settings, strategies as st
import sympy as sp

from rigidlab import lattice as LA

mats = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@given(mats)
@settings(max_examples=80, deadline=None)
def test_hnf_transform(a):
    h, u, rank = LA.hnf_with_transform(a)
    assert LA.matmul(u, a) == h
    assert abs(LA.det_int(u)) == 1
    assert rank == sp.Matrix(a).rank()
    assert all(not any(row) for row in h[rank:])
    last = -1
    for row in h[:rank]:
        piv = next(j for j, x in enumerate(row) if x)
        assert piv > last and row[piv] > 0
        last = piv


@given(mats)
@settings(max_examples=60, deadline=None)
def test_integer_kernel(a):
    ker = LA.integer_kernel(a)
    n = len(a[0])
    assert len(ker) == n - sp.Matrix(a).rank()
    for v in ker:
        assert all(x == 0 for x in LA.matvec(a, v))
    if ker:
        # primitive: the kernel lattice is saturated
        assert LA.saturate(ker) == LA.hnf(ker)


def test_saturate_example():
    assert LA.saturate([[2, 4]]) == [[1, 2]]
    assert LA.saturate([[2, 0], [0, 2]]) == [[1, 0], [0, 1]]


def test_inverse_and_powers():
    m = [[2, 1], [1, 1]]
    inv = LA.inverse_rational(m)
    assert LA.matmul(m, inv) == LA.identity(2)
    p = LA.int_matrix_power(LA.as_object_array(m), 10)
    ref = np.linalg.matrix_power(np.array(m, dtype=object), 10)
    assert (p == ref).all()
    assert LA.sup_norm(p) == max(sum(abs(int(x)) for x in row) for row in ref)
