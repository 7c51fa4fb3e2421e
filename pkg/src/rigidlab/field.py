"""Number fields given by an integer minimal polynomial.

Elements are kept exactly, as rational coordinates in the power basis
1, theta, ..., theta^(d-1).  Embeddings are evaluated at certified root
enclosures and carry explicit error radii.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import mpmath

from . import polynomials as P
from .errors import (
    InvalidPolynomial,
    PrecisionExhausted,
    ReduciblePolynomial,
    RepeatedRoot,
    ZeroElement,
)
from .roots import RootEnclosure, certified_roots

DEFAULT_PRECISION = 128


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or 'p/q' string")
    return Fraction(x)


@dataclass(frozen=True, eq=False)
class NumberField:
    min_poly: tuple[int, ...]  # ascending, monic
    r1: int
    r2: int
    roots: tuple[RootEnclosure, ...]  # r1 real, then r2 upper-half-plane roots
    working_precision: int = DEFAULT_PRECISION

    @property
    def d(self) -> int:
        return len(self.min_poly) - 1

    @property
    def places(self) -> range:
        """Indices 0..r1+r2-1 of the places (the set I, zero based)."""
        return range(self.r1 + self.r2)

    @property
    def min_poly_descending(self) -> list[int]:
        return list(reversed(self.min_poly))

    def __eq__(self, other):
        return (
            isinstance(other, NumberField)
            and self.min_poly == other.min_poly
            and self.working_precision == other.working_precision
        )

    def __hash__(self):
        return hash((self.min_poly, self.working_precision))

    def __repr__(self):
        return f"NumberField(min_poly={self.min_poly_descending}, r1={self.r1}, r2={self.r2})"

    @cached_property
    def discriminant(self) -> int:
        return int(P.discriminant(list(self.min_poly)))

    @cached_property
    def _reduction(self) -> list[list[Fraction]]:
        # powers theta^d .. theta^(2d-2) expressed in the power basis
        d = self.d
        low = [Fraction(-c) for c in self.min_poly[:d]]
        table = [low]
        for _ in range(d - 2):
            prev = table[-1]
            shifted = [Fraction(0)] + prev[:-1]
            top = prev[-1]
            table.append([s + top * l for s, l in zip(shifted, low)])
        return table

    def element(self, coeffs: Iterable) -> "FieldElement":
        c = [_as_fraction(x) for x in coeffs]
        if len(c) > self.d:
            c = self._reduce(c)
        c = c + [Fraction(0)] * (self.d - len(c))
        return FieldElement(self, tuple(c))

    def _reduce(self, c: list) -> list[Fraction]:
        d = self.d
        out = [Fraction(x) for x in c[:d]] + [Fraction(0)] * max(0, d - len(c))
        for k in range(d, len(c)):
            if c[k]:
                row = self._reduction[k - d]
                for j in range(d):
                    out[j] += c[k] * row[j]
        return out

    def one(self) -> "FieldElement":
        return self.element([1])

    def zero(self) -> "FieldElement":
        return self.element([])

    def gen(self) -> "FieldElement":
        return self.element([0, 1])

    def all_roots(self) -> list[mpmath.mpc]:
        """All d root centres; index r1+r2+j is the conjugate of index r1+j."""
        centers = [e.center for e in self.roots]
        return centers + [mpmath.conj(z) for z in centers[self.r1:]]

    def with_precision(self, bits: int) -> "NumberField":
        return build_field(self.min_poly_descending, bits)


@dataclass(frozen=True)
class FieldElement:
    field: NumberField = dc_field(repr=False, compare=False)
    coeffs: tuple[Fraction, ...]

    def __eq__(self, other):
        return (
            isinstance(other, FieldElement)
            and self.field.min_poly == other.field.min_poly
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field.min_poly, self.coeffs))

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return multiply(self.field, self, self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.field.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            return other
        return self.field.element([_as_fraction(other)])

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def multiplication_matrix(self) -> list[list[Fraction]]:
        """Matrix of x -> self*x in the power basis (columns are images of theta^j)."""
        d = self.field.d
        cols = []
        img = self
        theta = self.field.gen()
        for _ in range(d):
            cols.append(img.coeffs)
            img = img * theta
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroElement("zero has no inverse")
        # solve M c = e_0 exactly
        m = self.multiplication_matrix()
        sol = solve_rational(m, [Fraction(1)] + [Fraction(0)] * (self.field.d - 1))
        return FieldElement(self.field, tuple(sol))

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*t^{k}")
        return "FieldElement(" + (" + ".join(terms) or "0") + ")"


def solve_rational(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Gauss-Jordan solve of a square nonsingular rational system."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def _parse_min_poly(min_poly: Sequence) -> list[int]:
    coeffs = []
    for c in min_poly:
        try:
            f = Fraction(str(c).strip()) if isinstance(c, str) else Fraction(c)
        except (TypeError, ValueError) as exc:
            raise InvalidPolynomial(f"bad coefficient {c!r}") from exc
        if f.denominator != 1:
            raise InvalidPolynomial(f"coefficient {c!r} is not an integer")
        coeffs.append(int(f))
    if not coeffs:
        raise InvalidPolynomial("empty polynomial")
    return coeffs


def _subset_sums(degs: list[int], d: int) -> set[int]:
    sums = {0}
    for k in degs:
        sums |= {s + k for s in sums}
    return {s for s in sums if 0 < s < d}


def _screen_irreducible(poly: list[int], disc: int) -> set[int]:
    """Candidate degrees of rational factors that survive screening modulo primes."""
    d = len(poly) - 1
    candidates = set(range(1, d))
    for p in P.small_primes(40):
        if disc % p == 0 or poly[-1] % p == 0:
            continue
        candidates &= _subset_sums(P.factor_degrees_mod_p(poly, p), d)
        if not candidates:
            break
    return candidates


def _root_subset_factor(poly: list[int], roots: list, degrees: set[int], prec: int):
    """Search for an integer factor as a product over a subset of the roots."""
    d = len(poly) - 1
    conj_of = {}
    r_total = len(roots)
    for i, z in enumerate(roots):
        for j, w in enumerate(roots):
            if abs(mpmath.conj(z) - w) < mpmath.ldexp(1, -prec // 2):
                conj_of[i] = j
    tol = mpmath.ldexp(1, -prec // 4)
    for k in sorted(k for k in degrees if k <= d // 2):
        for subset in itertools.combinations(range(r_total), k):
            s = set(subset)
            if any(conj_of.get(i, i) not in s for i in s):
                continue
            prod = [mpmath.mpc(1)]
            for i in subset:
                nxt = [mpmath.mpc(0)] * (len(prod) + 1)
                for j, c in enumerate(prod):
                    nxt[j + 1] += c
                    nxt[j] -= c * roots[i]
                prod = nxt
            ints = [mpmath.nint(c.real) for c in prod]
            if all(abs(c - n) < tol for c, n in zip(prod, ints)):
                cand = [int(n) for n in ints]
                try:
                    P.exact_quotient(poly, cand)
                except ArithmeticError:
                    continue
                return cand
    return None


def build_field(min_poly: Sequence, precision: int = DEFAULT_PRECISION) -> NumberField:
    """Construct K = Q[x]/(min_poly); ``min_poly`` is leading-coefficient first."""
    coeffs = _parse_min_poly(min_poly)
    poly = P.from_descending(coeffs)
    if len(poly) - 1 < 2:
        raise InvalidPolynomial("degree must be at least 2")
    if poly[-1] != 1:
        raise InvalidPolynomial("minimal polynomial must be monic")
    if precision < 32:
        raise InvalidPolynomial("precision must be at least 32 bits")
    disc = int(P.discriminant(poly))
    if disc == 0:
        raise RepeatedRoot("zero discriminant: repeated root")
    encl = certified_roots(poly, precision)
    d = len(poly) - 1
    real = [e for e in encl if e.is_real]
    upper = [e for e in encl if not e.is_real and e.center.imag > 0]
    lower = [e for e in encl if not e.is_real and e.center.imag < 0]
    if len(upper) != len(lower) or len(real) + 2 * len(upper) != d:
        raise PrecisionExhausted("root enclosures are not conjugation-consistent")
    candidates = _screen_irreducible(poly, disc)
    if candidates:
        with mpmath.workprec(2 * precision):
            factor = _root_subset_factor(poly, [e.center for e in encl], candidates, 2 * precision)
        if factor is not None:
            raise ReduciblePolynomial(
                f"polynomial is reducible: factor {P.to_descending(factor)}"
            )
    # real roots descending, complex roots by (real part, imaginary part)
    real.sort(key=lambda e: e.center.real, reverse=True)
    # real parts equal up to the enclosures (e.g. symmetric roots) tie-break on the imaginary part
    scale = mpmath.ldexp(1, precision // 4)
    upper.sort(key=lambda e: (int(mpmath.nint(e.center.real * scale)), e.center.imag))
    return NumberField(
        min_poly=tuple(poly),
        r1=len(real),
        r2=len(upper),
        roots=tuple(real + upper),
        working_precision=precision,
    )


# -- operations ---------------------------------------------------------------


@dataclass(frozen=True)
class EmbeddingVector:
    """sigma_i(u) for i in I, with per-entry error radii."""

    values: tuple  # mpf for real places, mpc for complex places
    radii: tuple
    r1: int

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def full(self) -> list:
        """All d conjugates, conjugate pairs appended after the r1+r2 entries."""
        return list(self.values) + [mpmath.conj(v) for v in self.values[self.r1:]]

    def split(self) -> list:
        """Real coordinates: real places, then (Re, Im) per complex place."""
        out = list(self.values[: self.r1])
        for v in self.values[self.r1:]:
            out.extend([v.real, v.imag])
        return out

    def as_complex(self):
        import numpy as np

        return np.array([complex(v) for v in self.values])

    @property
    def max_radius(self):
        return max(self.radii)


def embed(field: NumberField, u: FieldElement) -> EmbeddingVector:
    prec = 2 * field.working_precision
    limit = mpmath.ldexp(1, -(field.working_precision // 2))
    vals, rads = [], []
    with mpmath.workprec(prec):
        u_rat = [mpmath.mpf(c.numerator) / c.denominator for c in u.coeffs]
        abs_c = [abs(c) for c in u_rat]
        unit = mpmath.ldexp(1, -prec + 2)
        for idx, e in enumerate(field.roots):
            z = e.center if not e.is_real else mpmath.mpf(e.center.real)
            acc = mpmath.mpf(0) if e.is_real else mpmath.mpc(0)
            for c in reversed(u_rat):
                acc = acc * z + c
            az = abs(z) + e.radius
            # |sum c_k (rho^k - z^k)| <= sum |c_k| k az^(k-1) rad
            deriv_bound = sum(k * abs_c[k] * az ** (k - 1) for k in range(1, len(abs_c)))
            rounding = 4 * (field.d + 1) * unit * sum(abs_c[k] * az**k for k in range(len(abs_c)))
            rad = deriv_bound * e.radius + rounding
            if rad > limit:
                raise PrecisionExhausted(
                    f"embedding error radius {mpmath.nstr(rad, 3)} exceeds 2^-{field.working_precision // 2}"
                )
            vals.append(acc)
            rads.append(rad)
    return EmbeddingVector(tuple(vals), tuple(rads), field.r1)


def multiply(field: NumberField, u: FieldElement, v: FieldElement) -> FieldElement:
    d = field.d
    prod = [Fraction(0)] * (2 * d - 1)
    for i, a in enumerate(u.coeffs):
        if a:
            for j, b in enumerate(v.coeffs):
                if b:
                    prod[i + j] += a * b
    return FieldElement(field, tuple(field._reduce(prod)))


def characteristic_polynomial(field: NumberField, u: FieldElement) -> list[Fraction]:
    return P.charpoly(u.multiplication_matrix())


def norm_and_unit_test(field: NumberField, u: FieldElement) -> tuple[Fraction, bool]:
    if u.is_zero():
        raise ZeroElement("norm of zero requested")
    norm = P.resultant(list(field.min_poly), list(u.coeffs))
    is_integer = P.is_integral(characteristic_polynomial(field, u))
    return norm, is_integer and abs(norm) == 1


def minimal_polynomial_of(field: NumberField, u: FieldElement) -> tuple[list[Fraction], int]:
    """Exact minimal polynomial over Q (ascending) and its degree."""
    cp = characteristic_polynomial(field, u)
    mp = P.squarefree_part(cp)
    return mp, len(mp) - 1


def parse_element(field: NumberField, coeffs: Sequence) -> FieldElement:
    """Element from a list of rationals or 'p/q' strings (power-basis order)."""
    if len(coeffs) != field.d:
        raise ValueError(f"expected {field.d} coordinates, got {len(coeffs)}")
    return field.element(coeffs)


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}" if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def lcm_denominator(values: Iterable[Fraction]) -> int:
    q = 1
    for v in values:
        q = q * v.denominator // math.gcd(q, v.denominator)
    return q
