"""Integer lattices: Hermite normal form, kernels, exact matrix helpers.

Matrices are lists of rows of Python ints (or Fractions where stated).
A lattice is represented by the row span of its basis matrix.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

Matrix = list


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def hnf_with_transform(rows: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, int]:
    """Row Hermite normal form.

    Returns ``(H, U, rank)`` with ``U`` unimodular, ``U @ A == H``, the first
    ``rank`` rows of H in echelon form with positive pivots and reduced
    entries above each pivot, and the remaining rows zero.
    """
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    u = identity(m)
    piv_row = 0
    for col in range(n):
        if piv_row >= m:
            break
        # Euclid down the column
        while True:
            nz = [r for r in range(piv_row, m) if a[r][col] != 0]
            if not nz:
                break
            best = min(nz, key=lambda r: abs(a[r][col]))
            a[piv_row], a[best] = a[best], a[piv_row]
            u[piv_row], u[best] = u[best], u[piv_row]
            done = True
            for r in range(piv_row + 1, m):
                if a[r][col]:
                    q = a[r][col] // a[piv_row][col]
                    a[r] = [x - q * y for x, y in zip(a[r], a[piv_row])]
                    u[r] = [x - q * y for x, y in zip(u[r], u[piv_row])]
                    if a[r][col]:
                        done = False
            if done:
                break
        if a[piv_row][col] == 0:
            continue
        if a[piv_row][col] < 0:
            a[piv_row] = [-x for x in a[piv_row]]
            u[piv_row] = [-x for x in u[piv_row]]
        p = a[piv_row][col]
        for r in range(piv_row):
            q = a[r][col] // p
            if q:
                a[r] = [x - q * y for x, y in zip(a[r], a[piv_row])]
                u[r] = [x - q * y for x, y in zip(u[r], u[piv_row])]
        piv_row += 1
    return a, u, piv_row


def hnf(rows: Sequence[Sequence[int]]) -> Matrix:
    """Nonzero rows of the row-style HNF (a basis of the row lattice)."""
    h, _, rank = hnf_with_transform(rows)
    return h[:rank]


def integer_kernel(a: Sequence[Sequence]) -> Matrix:
    """Basis (as rows) of {x in Z^n : A x = 0} for a rational matrix A."""
    a = [[Fraction(x) for x in row] for row in a]
    n = len(a[0])
    den = 1
    for row in a:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [[int(x * den) for x in row] for row in a]
    # rows of A^T; transform U with U A^T = H, zero rows of H give kernel vectors
    h, u, rank = hnf_with_transform(transpose(ints) if ints else [[0]] * n)
    return [u[i] for i in range(rank, n)]


def saturate(rows: Sequence[Sequence[int]]) -> Matrix:
    """Basis of (R-span of rows) intersected with Z^n."""
    n = len(rows[0])
    perp = integer_kernel(rows)
    if not perp:
        return identity(n)
    return hnf(integer_kernel(perp))


def rational_hnf(rows: Sequence[Sequence[Fraction]]) -> tuple[Matrix, int]:
    """HNF basis of the Z-module spanned by rational rows, returned as (integer rows, denominator)."""
    den = 1
    for row in rows:
        for x in row:
            x = Fraction(x)
            den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [[int(Fraction(x) * den) for x in row] for row in rows]
    return hnf(ints), den


def inverse_rational(a: Sequence[Sequence]) -> Matrix:
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def det_int(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant via fraction-free Bareiss elimination."""
    m = [list(map(int, r)) for r in a]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def as_object_array(a: Sequence[Sequence[int]]) -> np.ndarray:
    out = np.empty((len(a), len(a[0])), dtype=object)
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            out[i, j] = int(x)
    return out


def int_matrix_power(m: np.ndarray, k: int) -> np.ndarray:
    """Exact power of a square object-dtype integer matrix (k >= 0)."""
    n = m.shape[0]
    result = as_object_array(identity(n))
    base = m
    while k:
        if k & 1:
            result = result.dot(base)
        base = base.dot(base)
        k >>= 1
    return result


def sup_norm(m: np.ndarray) -> int:
    """Max absolute row sum (the operator norm for the sup-norm)."""
    return max(sum(abs(int(x)) for x in row) for row in m)
