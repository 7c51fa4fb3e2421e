"""Points of T^d, the action on them, and partial orbits over slices."""

from __future__ import annotations

import csv
import decimal
import io
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .action import ActionSpec, conjugacy_map, group_matrix
from .errors import DegradedPrecision, PrecisionExhausted

DEGRADED = mpmath.mpf(2) ** -32


@dataclass(frozen=True)
class TorusPoint:
    """A point of T^d in lattice-basis coordinates, reduced into [0, 1).

    Exact points keep integer numerators over a common denominator ``q``;
    guarded-real points keep mpf coordinates and one shared error radius.
    """

    kind: str  # "exact" or "real"
    numerators: tuple[int, ...] = ()
    q: int = 1
    values: tuple = ()
    radius: mpmath.mpf = mpmath.mpf(0)
    precision: int = 128

    @classmethod
    def exact(cls, coords: Sequence) -> "TorusPoint":
        fr = [Fraction(c) for c in coords]
        q = 1
        for f in fr:
            q = q * f.denominator // math.gcd(q, f.denominator)
        q = int(q)
        return cls("exact", tuple(int(f * q) % q for f in fr), q)

    @classmethod
    def real(cls, values: Sequence, radius=0, precision: int = 128) -> "TorusPoint":
        with mpmath.workprec(precision):
            vals = tuple(_to_mpf(v) % 1 for v in values)
            rad = mpmath.mpf(radius) + mpmath.mpf(2) ** (1 - precision)
        return cls("real", values=vals, radius=rad, precision=precision)

    @property
    def d(self) -> int:
        return len(self.numerators) if self.is_exact else len(self.values)

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"

    @property
    def degraded(self) -> bool:
        return not self.is_exact and self.radius >= DEGRADED

    @property
    def coords(self) -> tuple:
        if self.is_exact:
            return tuple(Fraction(n, self.q) for n in self.numerators)
        return self.values

    @property
    def order(self) -> int:
        """Exact order of the torsion point (the reduced common denominator)."""
        if not self.is_exact:
            raise ValueError("order is defined for exact points only")
        g = self.q
        for n in self.numerators:
            g = math.gcd(g, n)
        return self.q // g

    def as_float(self) -> np.ndarray:
        if self.is_exact:
            return np.array([n / self.q for n in self.numerators])
        return np.array([float(v) for v in self.values])

    def key(self):
        return ("exact", self.numerators, self.q) if self.is_exact else ("real", self.values)


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def act(action: ActionSpec, n, x: TorusPoint) -> TorusPoint:
    """alpha^n . x, with M^n formed exactly and applied once."""
    m = group_matrix(action, n)
    if x.is_exact:
        y = m.dot(np.array(x.numerators, dtype=object))
        return TorusPoint("exact", tuple(int(v) % x.q for v in y), x.q)
    norm = max(sum(abs(int(v)) for v in row) for row in m)
    with mpmath.workprec(x.precision):
        vals = []
        for row in m:
            s = mpmath.fsum(int(a) * b for a, b in zip(row, x.values))
            vals.append(s - mpmath.floor(s))
        ulp = mpmath.mpf(2) ** (1 - x.precision)
        radius = norm * x.radius + (x.d + 2) * norm * ulp
    if radius >= DEGRADED:
        raise DegradedPrecision(
            f"error radius {mpmath.nstr(radius, 3)} exceeds 2^-32 at n={tuple(int(v) for v in n)}; raise precision",
            tuple(int(v) for v in n),
        )
    return TorusPoint("real", values=tuple(vals), radius=radius, precision=x.precision)


@dataclass
class OrbitSample:
    action: ActionSpec
    elements: list  # tuples n
    points: list  # TorusPoint
    matrix_norms: list  # ||M^n||_inf, big ints
    metadata: dict = dc_field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    @property
    def radii(self) -> list:
        return [p.radius for p in self.points]

    @property
    def exact(self) -> bool:
        return all(p.is_exact for p in self.points)

    def distinct_points(self) -> list[TorusPoint]:
        seen, out = set(), []
        for p in self.points:
            k = p.key()
            if k not in seen:
                seen.add(k)
                out.append(p)
        return out

    def as_array(self) -> np.ndarray:
        if not self.points:
            return np.zeros((0, self.action.d))
        return np.array([p.as_float() for p in self.points])

    def embedding_array(self) -> np.ndarray:
        """Split embedding coordinates of the lifts in [0,1)^d (float)."""
        return self.as_array() @ conjugacy_map(self.action).psi_np.T

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        r, d = self.action.r, self.action.d
        w.writerow([f"n_{k + 1}" for k in range(r)] + [f"x_{k + 1}" for k in range(d)] + ["err_radius", "denominator"])
        for n, p in zip(self.elements, self.points):
            w.writerow(
                list(n)
                + [_decimal(c) for c in p.coords]
                + [mpmath.nstr(p.radius, 6) if not p.is_exact else "0", p.q if p.is_exact else 0]
            )
        return buf.getvalue()


def _decimal(v) -> str:
    if isinstance(v, Fraction):
        with decimal.localcontext() as ctx:
            ctx.prec = 30
            return str(decimal.Decimal(v.numerator) / decimal.Decimal(v.denominator))
    return mpmath.nstr(v, 30)


def partial_orbit(action: ActionSpec, x: TorusPoint, slice_result, metadata: dict | None = None) -> OrbitSample:
    elements = [tuple(int(v) for v in n) for n in slice_result]
    points, norms = [], []
    for n in elements:
        points.append(act(action, n, x))
        m = group_matrix(action, n)
        norms.append(max(sum(abs(int(v)) for v in row) for row in m))
    meta = dict(metadata or {})
    query = getattr(slice_result, "query", None)
    if query is not None:
        meta.setdefault("eps", query.eps)
        meta.setdefault("S", tuple(sorted(query.context.S)))
        meta.setdefault("N", query.N)
        meta.setdefault("angle_constrained", query.angle_constrained)
    return OrbitSample(action, elements, points, norms, meta)


@dataclass(frozen=True)
class FramePoint:
    """Split embedding coordinates (r1 reals, then (Re, Im) per complex place)."""

    coords: tuple
    radius: mpmath.mpf
    place_coords: tuple

    def component(self, place: int):
        idx = self.place_coords[place]
        if len(idx) == 1:
            return self.coords[idx[0]]
        return mpmath.mpc(self.coords[idx[0]], self.coords[idx[1]])

    def components(self) -> list:
        return [self.component(i) for i in range(len(self.place_coords))]


def to_embedding_frame(action: ActionSpec, x: TorusPoint | Sequence, lift: Sequence[int] | None = None) -> FramePoint:
    """psi-tilde of the lift x + lift (lift defaults to 0, i.e. coordinates in [0,1))."""
    cm = conjugacy_map(action)
    d = action.d
    prec = action.field.working_precision
    if isinstance(x, TorusPoint):
        coords, xrad = x.coords, (x.radius if not x.is_exact else mpmath.mpf(0))
    else:
        coords, xrad = tuple(x), mpmath.mpf(0)
    with mpmath.workprec(prec):
        v = [mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mpmath.mpf(c) for c in coords]
        if lift is not None:
            v = [a + int(b) for a, b in zip(v, lift)]
        out = tuple(mpmath.fsum(cm.psi[i, j] * v[j] for j in range(d)) for i in range(d))
        row_norm = max(mpmath.fsum(abs(cm.psi[i, j]) for j in range(d)) for i in range(d))
        radius = cm.entry_error * mpmath.fsum(abs(t) for t in v) + row_norm * xrad
    if radius > mpmath.mpf(2) ** (-prec // 2) and xrad == 0:
        raise PrecisionExhausted("embedding-frame radius exceeds the working-precision budget")
    return FramePoint(out, radius, cm.place_coords)


def point_from_element(action: ActionSpec, u) -> TorusPoint:
    """pi(sigma(u)) as an exact torus point: lattice coordinates of u reduced mod 1."""
    return TorusPoint.exact(action.to_lattice_coords(u))


def orbit_of_points(action: ActionSpec, elements: Iterable, x: TorusPoint) -> list[TorusPoint]:
    return [act(action, n, x) for n in elements]
