"""Z^r-actions by toral automorphisms built from units of a number field.

The generators are multiplied into an invariant lattice Gamma (saturation
of the power-basis order under the generators and their inverses), which
makes each generator an integer matrix with integer inverse.  Lyapunov
data log|sigma_i(u_k)| and argument data arg sigma_j(u_k) are tabulated at
the field's working precision.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from . import lattice as LA
from . import polynomials as P
from .errors import DependentGenerators, LatticeSaturationError, NonUnitGenerator
from .field import (
    FieldElement,
    NumberField,
    embed,
    minimal_polynomial_of,
    norm_and_unit_test,
)

RANK_CUTOFF = 1e-9
BETA_RECOMPUTE_L1 = 1000


@dataclass(frozen=True, eq=False)
class ActionSpec:
    field: NumberField
    generators: tuple[FieldElement, ...]
    lattice_basis: tuple[tuple[Fraction, ...], ...]  # d x d, columns span Gamma
    gen_matrices: tuple[tuple[tuple[int, ...], ...], ...]
    lyapunov: tuple[tuple[mpmath.mpf, ...], ...]  # (r1+r2) x r
    args: tuple[tuple[mpmath.mpf, ...], ...]  # (r1+r2) x r, values in (-pi, pi]
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = dc_field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def r(self) -> int:
        return len(self.generators)

    @property
    def d(self) -> int:
        return self.field.d

    @property
    def places(self) -> int:
        return self.field.r1 + self.field.r2

    @property
    def place_weights(self) -> np.ndarray:
        """1 for real places, 2 for complex places."""
        return np.array([1] * self.field.r1 + [2] * self.field.r2)

    @property
    def lyap_np(self) -> np.ndarray:
        if "lyap_np" not in self._cache:
            self._cache["lyap_np"] = np.array([[float(x) for x in row] for row in self.lyapunov])
        return self._cache["lyap_np"]

    @property
    def args_np(self) -> np.ndarray:
        if "args_np" not in self._cache:
            self._cache["args_np"] = np.array([[float(x) for x in row] for row in self.args])
        return self._cache["args_np"]

    def matrix(self, k: int) -> np.ndarray:
        return LA.as_object_array(self.gen_matrices[k])

    def basis_element(self, j: int) -> FieldElement:
        return self.field.element([row[j] for row in self.lattice_basis])

    def to_lattice_coords(self, u: FieldElement) -> list[Fraction]:
        """Coordinates of u with respect to the basis of Gamma (exact)."""
        inv = self._cached("basis_inv", lambda: LA.inverse_rational(self.lattice_basis))
        return LA.matvec(inv, u.coeffs)

    def from_lattice_coords(self, x: Sequence) -> FieldElement:
        return self.field.element(LA.matvec(self.lattice_basis, [Fraction(v) for v in x]))

    def _cached(self, key, fn):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = fn()
            return self._cache[key]


def _lattice_saturation(mats: list[list[list[Fraction]]], d: int, bound: int) -> list[list[Fraction]]:
    """Smallest lattice containing Z^d (power basis) stable under every matrix."""
    rows = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    current, den = LA.rational_hnf(rows)
    for _ in range(64 * d):
        basis = [[Fraction(x, den) for x in row] for row in current]
        images = list(basis)
        for m in mats:
            for row in basis:
                images.append(LA.matvec(m, row))
        new, new_den = LA.rational_hnf(images)
        if new_den > bound:
            raise LatticeSaturationError(
                f"lattice denominators exceed the discriminant bound {bound}"
            )
        if [[Fraction(x, new_den) for x in row] for row in new] == basis:
            return basis
        current, den = new, new_den
    raise LatticeSaturationError("lattice saturation did not stabilise")


def _log_and_arg(values, radii=None) -> tuple[list, list]:
    """log|v| and arg v in (-pi, pi]; values whose imaginary part is inside
    the error radius are real up to certification and get argument 0 or pi."""
    radii = radii if radii is not None else [0] * len(values)
    lam, arg = [], []
    for v, rad in zip(values, radii):
        lam.append(mpmath.log(abs(v)))
        if isinstance(v, mpmath.mpc) and abs(v.imag) > rad:
            arg.append(mpmath.arg(v))
        else:
            arg.append(mpmath.mpf(0) if mpmath.re(v) > 0 else +mpmath.pi)
    return lam, arg


def is_root_of_unity(field: NumberField, u: FieldElement) -> bool:
    mp, deg = minimal_polynomial_of(field, u)
    if not P.is_integral(mp):
        return False
    ints = [int(c) for c in mp]
    for k in P.cyclotomic_orders(deg):
        if P.euler_phi(k) == deg and P.cyclotomic(k) == ints:
            return True
    return False


def build_action(field: NumberField, generators: Sequence[FieldElement]) -> ActionSpec:
    gens = tuple(generators)
    if not gens:
        raise ValueError("at least one generator is required")
    for k, g in enumerate(gens):
        if g.is_zero():
            raise NonUnitGenerator(f"generator {k + 1} is zero")
        _, unit = norm_and_unit_test(field, g)
        if not unit:
            raise NonUnitGenerator(f"generator {k + 1} is not a unit")
    emb = [embed(field, g) for g in gens]
    with mpmath.workprec(field.working_precision):
        cols = [_log_and_arg(e.values, e.radii) for e in emb]
        lyap = tuple(tuple(cols[k][0][i] for k in range(len(gens))) for i in field.places)
        args = tuple(tuple(cols[k][1][i] for k in range(len(gens))) for i in field.places)
    _check_independence(field, gens, np.array([[float(x) for x in row] for row in lyap]))

    d = field.d
    mats = []
    for g in gens:
        mats.append(g.multiplication_matrix())
        mats.append(g.inverse().multiplication_matrix())
    basis_rows = _lattice_saturation(mats, d, abs(field.discriminant))
    basis = LA.transpose(basis_rows)  # columns are the lattice vectors
    basis_inv = LA.inverse_rational(basis)
    gen_mats = []
    for g in gens:
        m = LA.matmul(LA.matmul(basis_inv, g.multiplication_matrix()), basis)
        if any(Fraction(x).denominator != 1 for row in m for x in row):
            raise LatticeSaturationError("generator matrix is not integral on Gamma")
        gen_mats.append(tuple(tuple(int(x) for x in row) for row in m))
    for m in gen_mats:
        if abs(LA.det_int(m)) != 1:
            raise LatticeSaturationError("generator matrix is not unimodular")
    return ActionSpec(
        field=field,
        generators=gens,
        lattice_basis=tuple(tuple(row) for row in basis),
        gen_matrices=tuple(gen_mats),
        lyapunov=lyap,
        args=args,
    )


def _check_independence(field: NumberField, gens, lyap: np.ndarray) -> None:
    r = len(gens)
    sv = np.linalg.svd(lyap, compute_uv=False) if lyap.size else np.zeros(0)
    top = sv[0] if sv.size and sv[0] > 0 else 0.0
    rank = int(np.sum(sv > RANK_CUTOFF * max(top, 1.0))) if top > 0 else 0
    if rank == r:
        return
    # a relation n with lambda(n) = 0 gives a root of unity; try to exhibit it
    _, _, vt = np.linalg.svd(lyap if lyap.size else np.zeros((1, r)))
    null = vt[-1]
    certificate = None
    scale = np.max(np.abs(null)) or 1.0
    for mult in range(1, 41):
        cand = np.rint(null / scale * mult).astype(int)
        if not cand.any():
            continue
        u = field.one()
        for g, e in zip(gens, cand):
            u = u * g ** int(e)
        if is_root_of_unity(field, u):
            certificate = tuple(int(x) for x in cand)
            break
    raise DependentGenerators(
        f"generators are multiplicatively dependent (Lyapunov rank {rank} < {r})",
        certificate=certificate,
    )


def _as_int_vector(n, r: int) -> tuple[int, ...]:
    n = tuple(int(x) for x in n)
    if len(n) != r:
        raise ValueError(f"expected an integer vector of length {r}")
    return n


def group_matrix(action: ActionSpec, n) -> np.ndarray:
    """Exact M^n = prod M_k^{n_k} as an object-dtype integer matrix (memoised)."""
    n = _as_int_vector(n, action.r)
    key = ("M", n)
    with action._lock:
        hit = action._cache.get(key)
    if hit is not None:
        return hit
    result = LA.as_object_array(LA.identity(action.d))
    for k, e in enumerate(n):
        if e:
            result = result.dot(_generator_power(action, k, e))
    with action._lock:
        if len(action._cache) > 200_000:
            action._cache.clear()
        action._cache[key] = result
    return result


def _generator_power(action: ActionSpec, k: int, e: int) -> np.ndarray:
    key = ("P", k, e)
    with action._lock:
        hit = action._cache.get(key)
    if hit is not None:
        return hit
    if e > 0:
        out = LA.int_matrix_power(action.matrix(k), e)
    else:
        inv = action._cached(
            ("inv", k),
            lambda: LA.as_object_array(
                [[int(x) for x in row] for row in LA.inverse_rational(action.gen_matrices[k])]
            ),
        )
        out = LA.int_matrix_power(inv, -e)
    with action._lock:
        action._cache[key] = out
    return out


def group_element(action: ActionSpec, n) -> tuple[FieldElement, np.ndarray]:
    n = _as_int_vector(n, action.r)
    u = action.field.one()
    for g, e in zip(action.generators, n):
        if e:
            u = u * g ** e
    return u, group_matrix(action, n)


def reduce_angle(x):
    """Reduce to (-pi, pi]."""
    two_pi = 2 * mpmath.pi
    y = x - two_pi * mpmath.floor(x / two_pi)
    if y > mpmath.pi:
        y -= two_pi
    return y


def lyapunov_of(action: ActionSpec, n) -> tuple[list, list]:
    """lambda_i(n) and beta_j(n) (reduced to (-pi, pi]) for every place."""
    n = _as_int_vector(n, action.r)
    with mpmath.workprec(action.field.working_precision):
        lam = [mpmath.fsum(c * x for c, x in zip(row, n)) for row in action.lyapunov]
        if sum(abs(x) for x in n) > BETA_RECOMPUTE_L1:
            u, _ = group_element(action, n)
            ev = embed(action.field, u)
            _, beta = _log_and_arg(ev.values, ev.radii)
        else:
            beta = [reduce_angle(mpmath.fsum(c * x for c, x in zip(row, n))) for row in action.args]
    return lam, beta


def lyapunov_np(action: ActionSpec, ns: np.ndarray) -> np.ndarray:
    """Vectorised float lambda_i(n) for an (m, r) integer array; returns (m, places)."""
    return np.asarray(ns, dtype=float) @ action.lyap_np.T


def arg_norms_np(action: ActionSpec, ns: np.ndarray) -> np.ndarray:
    """Vectorised float ||beta_j(n)|| (distance to 0 in R/2piZ); returns (m, places)."""
    raw = np.asarray(ns, dtype=float) @ action.args_np.T
    wrapped = np.mod(raw + np.pi, 2 * np.pi) - np.pi
    return np.abs(wrapped)


@dataclass(frozen=True)
class IrreducibilityReport:
    degree: int
    irreducible: bool
    totally_irreducible_certificate: bool
    detail: str = ""


def _ratio_candidates(field: NumberField, u: FieldElement, max_order_degree: int):
    """Pairs (i, j, k): sigma_i(u)/sigma_j(u) is within error of a k-th root of unity."""
    ev = embed(field, u)
    vals = ev.full()
    rads = list(ev.radii) + list(ev.radii[field.r1:])
    orders = P.cyclotomic_orders(max_order_degree)
    out = []
    with mpmath.workprec(2 * field.working_precision):
        for i in range(len(vals)):
            for j in range(len(vals)):
                if i == j:
                    continue
                a, b = vals[i], vals[j]
                ra, rb = rads[i], rads[j]
                if abs(b) <= rb:
                    continue
                ratio = a / b
                err = (ra + abs(ratio) * rb) / (abs(b) - rb)
                if abs(abs(ratio) - 1) > err:
                    continue
                turn = mpmath.arg(ratio) / (2 * mpmath.pi)
                for k in orders:
                    frac = turn * k
                    dist = abs(frac - mpmath.nint(frac)) * 2 * mpmath.pi / k
                    if dist <= 2 * err + mpmath.ldexp(1, -field.working_precision // 2):
                        out.append((i, j, k))
                        break
    return out


def irreducibility_report(action: ActionSpec, n) -> IrreducibilityReport:
    n = _as_int_vector(n, action.r)
    if not any(n):
        raise ValueError("n = 0 has no irreducibility report")
    field = action.field
    u, _ = group_element(action, n)
    mp, deg = minimal_polynomial_of(field, u)
    irreducible = deg == field.d
    if not irreducible:
        return IrreducibilityReport(deg, False, False, "element lies in a proper subfield")
    max_deg = field.d * field.d
    candidates = _ratio_candidates(field, u, max_deg)
    if not candidates:
        return IrreducibilityReport(deg, True, True, "no conjugate ratio is a root of unity")
    # confirm exactly: a flagged order k is real iff Phi_k divides the ratio polynomial
    ratio_poly = P.ratio_polynomial(mp)
    for _ in range(deg):
        ratio_poly = P.exact_quotient(ratio_poly, [-1, 1])
    for i, j, k in candidates:
        _, rem = P.divmod_poly(ratio_poly, P.cyclotomic(k))
        if not rem:
            return IrreducibilityReport(
                deg, True, False, f"sigma_{i + 1}/sigma_{j + 1} is a root of unity of order {k}"
            )
    return IrreducibilityReport(deg, True, True, "flagged ratios excluded exactly")


@dataclass(frozen=True)
class ConjugacyMap:
    psi: mpmath.matrix  # d x d real; lattice coordinates -> split embedding coordinates
    psi_inv: mpmath.matrix
    psi_np: np.ndarray
    psi_inv_np: np.ndarray
    entry_error: float
    residuals: tuple[float, ...]  # per generator block-diagonalisation residual
    place_coords: tuple[tuple[int, ...], ...]  # real coordinate indices of each place

    def coords_of_places(self, places) -> list[int]:
        out: list[int] = []
        for i in sorted(places):
            out.extend(self.place_coords[i])
        return out


def _place_coords(field: NumberField) -> tuple[tuple[int, ...], ...]:
    out, pos = [], 0
    for i in field.places:
        if i < field.r1:
            out.append((pos,))
            pos += 1
        else:
            out.append((pos, pos + 1))
            pos += 2
    return tuple(out)


def multiplier_block(field: NumberField, values) -> mpmath.matrix:
    """Real d x d block-diagonal matrix of multiplication by (sigma_i(u))_i."""
    d = field.d
    m = mpmath.zeros(d, d)
    pos = 0
    for i, v in enumerate(values):
        if i < field.r1:
            m[pos, pos] = mpmath.re(v)
            pos += 1
        else:
            a, b = mpmath.re(v), mpmath.im(v)
            m[pos, pos], m[pos, pos + 1] = a, -b
            m[pos + 1, pos], m[pos + 1, pos + 1] = b, a
            pos += 2
    return m


def conjugacy_map(action: ActionSpec) -> ConjugacyMap:
    def build():
        field = action.field
        d = field.d
        with mpmath.workprec(field.working_precision):
            psi = mpmath.zeros(d, d)
            err = mpmath.mpf(0)
            for j in range(d):
                e = embed(field, action.basis_element(j))
                for i, x in enumerate(e.split()):
                    psi[i, j] = x
                err = max(err, e.max_radius)
            psi_inv = mpmath.inverse(psi)
            residuals = []
            for k, g in enumerate(action.generators):
                mk = mpmath.matrix([[int(x) for x in row] for row in action.gen_matrices[k]])
                conj = psi * mk * psi_inv
                block = multiplier_block(field, embed(field, g).values)
                diff = conj - block
                residuals.append(max(float(abs(diff[i, j])) for i in range(d) for j in range(d)))
            to_np = lambda m: np.array([[float(m[i, j]) for j in range(d)] for i in range(d)])
            return ConjugacyMap(
                psi=psi,
                psi_inv=psi_inv,
                psi_np=to_np(psi),
                psi_inv_np=to_np(psi_inv),
                entry_error=float(err),
                residuals=tuple(residuals),
                place_coords=_place_coords(field),
            )

    return action._cached("conjugacy", build)


def l1(n) -> int:
    return sum(abs(int(x)) for x in n)


def integer_vector(values) -> tuple[int, ...]:
    return tuple(int(v) for v in values)


def lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)
