"""Independent oracles: sympy algebra, mpmath closed forms, brute force.

Nothing here imports the code under test except to read inputs.
"""

from __future__ import annotations

import itertools

import mpmath
import numpy as np
import sympy as sp

OCTIC = [1, 8, 32, 80, 132, 144, 96, 32, 1]
X = sp.Symbol("x")
Y = sp.Symbol("y")


def octic_real_roots(dps: int = 60):
    """sigma_1(theta), sigma_2(theta) from the nested-radical closed form."""
    with mpmath.workdps(dps):
        s = (mpmath.sqrt(6) + mpmath.sqrt(2)) / 2
        r = mpmath.sqrt(s - 1)
        return r - 1, -r - 1


def polyroots(desc_coeffs, dps: int = 60):
    with mpmath.workdps(dps):
        return mpmath.polyroots(desc_coeffs, maxsteps=400, extraprec=4 * dps)


def sylvester_resultant(f_desc, g_desc):
    """Res(f, g) as the determinant of the Sylvester matrix.

    sympy.resultant returns the wrong sign when g is a monomial (e.g.
    Res(x+1, x^3) comes back as 1), so the determinant is formed directly.
    """
    f = [sp.Rational(str(c)) for c in f_desc]
    g = [sp.Rational(str(c)) for c in g_desc]
    while len(g) > 1 and g[0] == 0:
        g = g[1:]
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    if size == 0:
        return sp.Integer(1)
    rows = []
    for i in range(n):
        rows.append([0] * i + f + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + g + [0] * (size - n - 1 - i))
    return sp.Matrix(rows).det()


def sympy_norm(min_poly_desc, coeffs_asc) -> sp.Rational:
    """N(g(theta)) = Res(f, g) for monic f."""
    return sylvester_resultant(min_poly_desc, list(reversed([sp.Rational(str(c)) for c in coeffs_asc])))


def sympy_minpoly(min_poly_desc, coeffs_asc):
    """Minimal polynomial of g(theta): the irreducible factor of Res_x(f(x), y - g(x)) vanishing at a numeric root."""
    f = sp.Poly(min_poly_desc, X).as_expr()
    g = sum(sp.Rational(str(c)) * X**k for k, c in enumerate(coeffs_asc))
    res = sp.resultant(f, Y - g, X)
    roots = [complex(r) for r in sp.Poly(min_poly_desc, X).nroots(n=30)]
    value = complex(sp.lambdify(X, g)(roots[0]))
    best = None
    for fac, _ in sp.factor_list(res, Y)[1]:
        p = sp.Poly(fac, Y)
        v = abs(complex(p.eval(value)))
        if best is None or v < best[0]:
            best = (v, p.monic())
    return best[1]


def brute_slice(lyap: np.ndarray, S, eps: float, N: int, offset=None, basis=None):
    """Every n in the box with |lambda_i(n)| < eps for i in S (no pruning)."""
    r = lyap.shape[1]
    out = set()
    if basis is None:
        box = itertools.product(range(-N, N + 1), repeat=r)
        for n in box:
            v = lyap[list(S)] @ np.array(n, dtype=float) if S else np.zeros(0)
            if np.all(np.abs(v) < eps):
                out.add(tuple(n))
        return out
    raise NotImplementedError


def brute_box(r: int, N: int) -> np.ndarray:
    ax = np.arange(-N, N + 1)
    return np.stack(np.meshgrid(*([ax] * r), indexing="ij"), -1).reshape(-1, r)
