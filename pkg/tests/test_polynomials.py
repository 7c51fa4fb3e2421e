from fractions import Fraction

import sympy as sp
from hypothesis import given, settings, strategies as st

from oracles import sylvester_resultant
from rigidlab import polynomials as P

X = sp.Symbol("x")
small_polys = st.lists(st.integers(-9, 9), min_size=2, max_size=6).filter(lambda c: c[-1] != 0)


def to_sympy(p):
    return sp.Poly(list(reversed([sp.Rational(str(c)) for c in p])), X)


@given(small_polys, small_polys)
@settings(max_examples=60, deadline=None)
def test_resultant_matches_sylvester_determinant(f, g):
    assert P.resultant(f, g) == sylvester_resultant(list(reversed(f)), list(reversed(g)))


def test_resultant_monomial_sign():
    # Res(x + 1, x^3) = (-1)^3
    assert P.resultant([1, 1], [0, 0, 0, 1]) == -1


@given(small_polys, small_polys)
@settings(max_examples=60, deadline=None)
def test_divmod_reconstructs(p, q):
    quo, rem = P.divmod_poly(p, q)
    assert P.add(P.mul(quo, q), rem) == P.trim(p)
    assert P.degree(rem) < P.degree(q)


@given(small_polys)
@settings(max_examples=40, deadline=None)
def test_discriminant_matches_sympy(f):
    if P.degree(f) < 1:
        return
    assert P.discriminant(f) == sp.discriminant(to_sympy(f).as_expr(), X)


@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=4, max_size=4))
@settings(max_examples=40, deadline=None)
def test_charpoly_matches_sympy(m):
    ours = P.charpoly(m)
    ref = sp.Matrix(m).charpoly(X).all_coeffs()
    assert P.to_descending(ours) == [Fraction(int(c)) for c in ref]


def test_cyclotomic_against_sympy():
    for n in range(1, 40):
        assert P.cyclotomic(n) == [int(c) for c in reversed(sp.cyclotomic_poly(n, X).as_poly().all_coeffs())]
        assert P.euler_phi(n) == sp.totient(n)


def test_squarefree_part():
    p = P.mul(P.mul([-2, 0, 1], [-2, 0, 1]), [1, 1])
    assert P.monic(P.squarefree_part(p)) == P.monic(P.mul([-2, 0, 1], [1, 1]))


def test_power_sums_roundtrip():
    f = [Fraction(c) for c in [1, 32, 96, 144, 132, 80, 32, 8, 1]]
    s = P.power_sums_from_poly(f, 8)
    assert P.poly_from_power_sums(s, 8) == f


def test_ratio_polynomial_roots_are_ratios():
    # roots 1, 2: the four ratios a/b are 1, 1, 2, 1/2
    rp = P.ratio_polynomial([2, -3, 1])
    expected = P.mul(P.mul([-1, 1], [-1, 1]), P.mul([-2, 1], [Fraction(-1, 2), 1]))
    assert P.monic(rp) == P.monic(expected)


def test_factor_degrees_mod_p():
    # (x^2+1)(x^3+x+1) mod 3: x^2+1 irreducible, x^3+x+1 irreducible? over F_3 check with sympy
    f = P.to_integer_primitive(P.mul([1, 0, 1], [1, 1, 0, 1]))
    for p in (3, 5, 7):
        ours = sorted(P.factor_degrees_mod_p(f, p))
        ref = sorted(
            sp.Poly(fac, X).degree()
            for fac, e in sp.factor_list(to_sympy(f).as_expr(), modulus=p)[1]
            for _ in range(e)
        )
        assert ours == ref


def test_separation_bound_is_below_true_separation():
    f = [-2, 0, 1]
    assert P.separation_bound(f) < 2 * 2**0.5
