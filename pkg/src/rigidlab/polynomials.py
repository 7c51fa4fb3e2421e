"""Exact univariate polynomial arithmetic over Q (and over Z/pZ for screening).

Polynomials are plain lists of coefficients in ascending order of degree,
``p[k]`` being the coefficient of ``x**k``.  Coefficients are ``int`` or
``Fraction``; the zero polynomial is ``[]``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

Poly = list


def trim(p: Sequence) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Sequence) -> int:
    return len(trim(p)) - 1


def from_descending(coeffs: Sequence[int]) -> Poly:
    """Convert a leading-coefficient-first list to the internal ascending form."""
    return trim(list(reversed(list(coeffs))))


def to_descending(p: Sequence) -> list:
    return list(reversed(trim(p)))


def add(p: Sequence, q: Sequence) -> Poly:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p: Sequence, q: Sequence) -> Poly:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)])


def scale(p: Sequence, c) -> Poly:
    return trim([c * a for a in p])


def mul(p: Sequence, q: Sequence) -> Poly:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def divmod_poly(p: Sequence, q: Sequence) -> tuple[Poly, Poly]:
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(a) for a in trim(p)]
    dq = len(q) - 1
    lead = Fraction(q[-1])
    if len(r) <= dq:
        return [], trim(r)
    quot = [Fraction(0)] * (len(r) - dq)
    for k in range(len(r) - 1, dq - 1, -1):
        c = r[k] / lead
        if c:
            quot[k - dq] = c
            for j in range(dq + 1):
                r[k - dq + j] -= c * q[j]
    return trim(quot), trim(r[:dq])


def exact_quotient(p: Sequence, q: Sequence) -> Poly:
    quo, rem = divmod_poly(p, q)
    if rem:
        raise ArithmeticError("polynomial division is not exact")
    return quo


def monic(p: Sequence) -> Poly:
    p = trim(p)
    if not p:
        return []
    lead = Fraction(p[-1])
    return [Fraction(a) / lead for a in p]


def gcd(p: Sequence, q: Sequence) -> Poly:
    a, b = trim(p), trim(q)
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, r
    return monic(a)


def derivative(p: Sequence) -> Poly:
    return trim([k * p[k] for k in range(1, len(p))])


def evaluate(p: Sequence, x):
    acc = 0
    for a in reversed(list(p)):
        acc = acc * x + a
    return acc


def compose_linear(p: Sequence, a, b) -> Poly:
    """Return p(a*x + b)."""
    out: Poly = []
    lin = [b, a]
    for c in reversed(list(p)):
        out = add(mul(out, lin), [c])
    return out


def squarefree_part(p: Sequence) -> Poly:
    g = gcd(p, derivative(p))
    return monic(exact_quotient(p, g))


def to_integer_primitive(p: Sequence) -> list[int]:
    """Scale a rational polynomial to a primitive integer one with positive leading term."""
    p = [Fraction(a) for a in trim(p)]
    if not p:
        return []
    den = 1
    for a in p:
        den = den * a.denominator // math.gcd(den, a.denominator)
    ints = [int(a * den) for a in p]
    g = 0
    for a in ints:
        g = math.gcd(g, a)
    ints = [a // g for a in ints]
    if ints[-1] < 0:
        ints = [-a for a in ints]
    return ints


def is_integral(p: Sequence) -> bool:
    return all(Fraction(a).denominator == 1 for a in p)


def resultant(f: Sequence, g: Sequence) -> Fraction:
    """Res(f, g) by the Euclidean recursion over Q."""
    f, g = [Fraction(a) for a in trim(f)], [Fraction(a) for a in trim(g)]
    if not f or not g:
        return Fraction(0)
    res = Fraction(1)
    while True:
        m, n = len(f) - 1, len(g) - 1
        if n == 0:
            return res * g[0] ** m
        if m < n:
            if (m * n) % 2:
                res = -res
            f, g = g, f
            continue
        _, r = divmod_poly(f, g)
        if not r:
            return Fraction(0)
        k = len(r) - 1
        # Res(f, g) = (-1)^{mn} lc(g)^{m-k} Res(g, r)
        res *= g[-1] ** (m - k)
        if (m * n) % 2:
            res = -res
        f, g = g, r


def discriminant(f: Sequence) -> Fraction:
    f = trim(f)
    n = len(f) - 1
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(f, derivative(f)) / Fraction(f[-1])


def charpoly(matrix: Sequence[Sequence]) -> Poly:
    """Characteristic polynomial det(x I - A) by Berkowitz (division free).

    Works for int and Fraction entries; returns ascending coefficients.
    """
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return [1]
    # vector of coefficients, descending, for the leading principal minors
    poly = [1, -a[0][0]]
    for k in range(1, n):
        r = [a[i][k] for i in range(k)]  # column above diagonal
        s = a[k][:k]  # row left of diagonal
        sub_a = [row[:k] for row in a[:k]]
        # Toeplitz column: 1, -a_kk, -s r, -s A r, -s A^2 r, ...
        col = [1, -a[k][k]]
        v = r
        for _ in range(k):
            col.append(-sum(si * vi for si, vi in zip(s, v)))
            v = [sum(sub_a[i][j] * v[j] for j in range(k)) for i in range(k)]
        new = [0] * (k + 2)
        for i in range(k + 2):
            acc = 0
            for j in range(min(i, len(poly) - 1) + 1):
                if i - j < len(col):
                    acc += col[i - j] * poly[j]
            new[i] = acc
        poly = new
    return from_descending(poly)


def power_sums_from_poly(f: Sequence, count: int) -> list[Fraction]:
    """Power sums s_1..s_count of the roots of f (Newton identities)."""
    f = monic(f)
    n = len(f) - 1
    # e-like coefficients: f = x^n + c1 x^{n-1} + ... + cn
    c = [f[n - i] for i in range(n + 1)]
    s: list[Fraction] = []
    for k in range(1, count + 1):
        acc = Fraction(-k) * c[k] if k <= n else Fraction(0)
        for i in range(1, min(k - 1, n) + 1):
            acc -= c[i] * s[k - i - 1]
        s.append(acc)
    return s


def poly_from_power_sums(s: Sequence, n: int) -> Poly:
    """Monic degree-n polynomial whose roots have power sums s_1..s_n."""
    c = [Fraction(1)]
    for k in range(1, n + 1):
        acc = Fraction(s[k - 1])
        for i in range(1, k):
            acc += c[i] * s[k - i - 1]
        c.append(-acc / k)
    return from_descending(c)


def ratio_polynomial(f: Sequence) -> Poly:
    """Monic polynomial whose roots are all a/b for roots a, b of f (with multiplicity)."""
    f = monic(f)
    n = len(f) - 1
    if f[0] == 0:
        raise ValueError("zero is a root; ratios undefined")
    rev = monic(list(reversed(f)))
    m = n * n
    ps = power_sums_from_poly(f, m)
    pinv = power_sums_from_poly(rev, m)
    ratio_sums = [ps[k] * pinv[k] for k in range(m)]
    return poly_from_power_sums(ratio_sums, m)


def euler_phi(n: int) -> int:
    result, k, m = n, 2, n
    while k * k <= m:
        if m % k == 0:
            while m % k == 0:
                m //= k
            result -= result // k
        k += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def _cyclotomic(n: int) -> tuple:
    p: Poly = [-1] + [0] * (n - 1) + [1]
    for k in range(1, n):
        if n % k == 0:
            p = exact_quotient(p, list(_cyclotomic(k)))
    return tuple(int(a) for a in p)


def cyclotomic(n: int) -> list[int]:
    return list(_cyclotomic(n))


def cyclotomic_orders(max_degree: int) -> list[int]:
    """All n with phi(n) <= max_degree (phi(n) >= sqrt(n/2) bounds the search)."""
    limit = 2 * max_degree * max_degree + 2
    return [n for n in range(1, limit + 1) if euler_phi(n) <= max_degree]


def separation_bound(p: Sequence) -> float:
    """Mahler lower bound on the distance between distinct roots of squarefree p."""
    ints = to_integer_primitive(p)
    n = len(ints) - 1
    if n < 2:
        return math.inf
    disc = abs(discriminant(ints))
    if disc == 0:
        raise ValueError("polynomial is not squarefree")
    norm2 = math.sqrt(sum(float(a) ** 2 for a in ints))
    log_bound = (
        0.5 * (math.log(3) + _log_fraction(disc))
        - (n + 2) / 2 * math.log(n)
        - (n - 1) * math.log(norm2)
    )
    return math.exp(log_bound)


def _log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


# -- arithmetic modulo a prime, used only for irreducibility screening --------


def _trim_p(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _mod_p(a: Sequence[int], p: int) -> list[int]:
    return _trim_p([x % p for x in a])


def _mulmod_p(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim_p(out)


def _divmod_p(a, b, p):
    a = list(a)
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    q = [0] * max(len(a) - db, 0)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] * inv % p
        if c:
            q[k - db] = c
            for j in range(db + 1):
                a[k - db + j] = (a[k - db + j] - c * b[j]) % p
    return _trim_p(q), _trim_p(a[:db])


def _gcd_p(a, b, p):
    while b:
        _, r = _divmod_p(a, b, p)
        a, b = b, r
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _powmod_p(base, e, f, p):
    result = [1]
    base = _divmod_p(base, f, p)[1]
    while e:
        if e & 1:
            result = _divmod_p(_mulmod_p(result, base, p), f, p)[1]
        base = _divmod_p(_mulmod_p(base, base, p), f, p)[1]
        e >>= 1
    return result


def factor_degrees_mod_p(f: Sequence[int], p: int) -> list[int]:
    """Degrees of the irreducible factors of squarefree f modulo p (distinct-degree)."""
    g = _mod_p(f, p)
    inv = pow(g[-1], -1, p)
    g = [x * inv % p for x in g]
    degrees: list[int] = []
    h = [0, 1]
    i = 0
    while len(g) - 1 >= 2 * (i + 1):
        i += 1
        h = _powmod_p(h, p, g, p)
        diff = _trim_p([(a - b) % p for a, b in _zip_pad(h, [0, 1])])
        common = _gcd_p(g, diff, p) if diff else list(g)
        k = len(common) - 1
        if k > 0:
            degrees.extend([i] * (k // i))
            g = _divmod_p(g, common, p)[0]
            h = _divmod_p(h, g, p)[1] if len(g) > 1 else h
    if len(g) - 1 > 0:
        degrees.append(len(g) - 1)
    return sorted(degrees)


def _zip_pad(a, b):
    n = max(len(a), len(b))
    return [((a[i] if i < len(a) else 0), (b[i] if i < len(b) else 0)) for i in range(n)]


def small_primes(count: int, start: int = 3) -> list[int]:
    out, k = [], start
    while len(out) < count:
        if all(k % q for q in range(2, int(k**0.5) + 1)):
            out.append(k)
        k += 1
    return out
