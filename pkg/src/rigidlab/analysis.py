"""Point classification, orbit density, and the confinement checks."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np
from scipy.linalg import qr
from scipy.spatial import cKDTree

from . import lattice as LA
from .action import ActionSpec, conjugacy_map, group_matrix
from .errors import NotTranslatedTorsion, ResolutionTooFine
from .orbit import OrbitSample, TorusPoint, act
from .slices import SliceContext, disc_constant

GRID_CAP = 2**26
DEFAULT_QMAX = 512
EXACT_TOL = 1e-9
REAL_TOL = 1e-6


# -- the isometric subspace W ---------------------------------------------------


@dataclass(frozen=True)
class IsometricFrame:
    """W = psi^{-1}(V_<S>) in lattice coordinates, with the split-frame indices."""

    w_coords: tuple[int, ...]
    perp_coords: tuple[int, ...]
    W: np.ndarray  # d x k, columns in lattice coordinates
    psi: np.ndarray
    psi_inv: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.w_coords)

    def split(self, lattice_vecs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(W-part, orthogonal part) in embedding coordinates."""
        e = np.atleast_2d(lattice_vecs) @ self.psi.T
        return e[:, list(self.w_coords)], e[:, list(self.perp_coords)]


def isometric_frame(action: ActionSpec, context: SliceContext) -> IsometricFrame:
    cm = conjugacy_map(action)
    w = tuple(cm.coords_of_places(context.closure_S))
    perp = tuple(i for i in range(action.d) if i not in w)
    return IsometricFrame(w, perp, cm.psi_inv_np[:, list(w)], cm.psi_np, cm.psi_inv_np)


def nearest_lift(diff: np.ndarray) -> np.ndarray:
    return diff - np.round(diff)


# -- classification ----------------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    kind: str  # "torsion", "translated_torsion", "generic"
    q: int | None = None
    torsion_point: TorusPoint | None = None
    v: np.ndarray | None = None  # W-part in embedding coordinates (over <S> places)
    v_norm: float = 0.0
    w_lattice: np.ndarray | None = None
    Qmax: int = DEFAULT_QMAX
    tol: float = EXACT_TOL

    def describe(self) -> str:
        if self.kind == "torsion":
            return f"torsion (order {self.q})"
        if self.kind == "translated_torsion":
            return f"translated_torsion (q={self.q}, |v|={self.v_norm:.6g})"
        return f"generic-up-to(Qmax={self.Qmax}, tol={self.tol:g})"


def _as_mp(x: TorusPoint) -> list:
    return [mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mpmath.mpf(c) for c in x.coords]


def classify_point(
    action: ActionSpec,
    context: SliceContext,
    x: TorusPoint,
    Qmax: int = DEFAULT_QMAX,
    tol: float | None = None,
    vmax: float = 0.1,
) -> Classification:
    """Torsion / V_<S>-translated torsion / generic, qualified by (Qmax, tol).

    The translated search solves C z = q C x for integer z, with C the
    orthogonal-to-W rows of psi; the k = dim W free coordinates of z are
    enumerated inside the q*vmax tube and the rest are solved and rounded.
    """
    if tol is None:
        tol = EXACT_TOL if x.is_exact else REAL_TOL
    if x.is_exact:
        return Classification("torsion", x.order, x, np.zeros(0), 0.0, np.zeros(action.d), Qmax, tol)
    coords = np.array([float(c) for c in x.coords])
    frame = isometric_frame(action, context)
    # plain torsion
    rats = [Fraction(float(c)).limit_denominator(Qmax) for c in x.coords]
    q = 1
    for f in rats:
        q = q * f.denominator // math.gcd(q, f.denominator)
    if q <= Qmax:
        diff = nearest_lift(coords - np.array([float(f) for f in rats]))
        if np.linalg.norm(diff @ frame.psi.T) < tol:
            return Classification("torsion", q, TorusPoint.exact(rats), np.zeros(0), 0.0, diff, Qmax, tol)
    k, d = frame.dim, action.d
    if k == 0:
        return Classification("generic", Qmax=Qmax, tol=tol)
    if k == d:
        w = nearest_lift(coords)
        v = w @ frame.psi.T
        return Classification(
            "translated_torsion", 1, TorusPoint.exact([0] * d), v, float(np.linalg.norm(v)), w, Qmax, tol
        )
    C = frame.psi[list(frame.perp_coords)]  # (d-k) x d
    free, dep = _narrow_free_coords(C, frame.W, k)
    cd_inv = np.linalg.inv(C[:, dep])
    wb = vmax * np.abs(frame.W[free]).sum(axis=1) if len(free) else np.zeros(0)
    cx = C @ coords
    for qq in range(1, Qmax + 1):
        lo = np.floor(qq * (coords[free] - wb)).astype(np.int64)
        hi = np.ceil(qq * (coords[free] + wb)).astype(np.int64)
        axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
        zf = np.stack([m.reshape(-1) for m in np.meshgrid(*axes, indexing="ij")], axis=1)
        zd = (cd_inv @ (qq * cx[:, None] - C[:, free] @ zf.T)).T
        zd_r = np.round(zd)
        z = np.zeros((len(zf), d))
        z[:, free] = zf
        z[:, dep] = zd_r
        resid = np.linalg.norm((coords[None, :] - z / qq) @ C.T, axis=1)
        ok = np.nonzero(resid < tol)[0]
        if len(ok):
            best = ok[np.argmin(resid[ok])]
            zstar = [Fraction(int(v), qq) for v in z[best]]
            star = TorusPoint.exact(zstar)
            w = coords - z[best] / qq
            # refine the W-part at full precision
            xs = _as_mp(x)
            with mpmath.workprec(action.field.working_precision):
                wm = [a - mpmath.mpf(int(b)) / qq for a, b in zip(xs, z[best])]
                cm = conjugacy_map(action)
                v = np.array(
                    [float(mpmath.fsum(cm.psi[i, j] * wm[j] for j in range(d))) for i in frame.w_coords]
                )
            vn = float(np.linalg.norm(v))
            if vn <= vmax:
                return Classification("translated_torsion", star.order, star, v, vn, w, Qmax, tol)
    return Classification("generic", Qmax=Qmax, tol=tol)


def _narrow_free_coords(C: np.ndarray, W: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """k free coordinates with the thinnest W-tube, keeping the solved block well conditioned."""
    d = C.shape[1]
    widths = np.abs(W).sum(axis=1)
    best = None
    for free in itertools.combinations(np.argsort(widths), k):
        dep = np.array(sorted(set(range(d)) - set(free)))
        cond = np.linalg.cond(C[:, dep])
        if cond < 1e8:
            cost = float(np.prod(widths[list(free)] + 1e-3))
            if best is None or cost < best[0]:
                best = (cost, np.array(sorted(free)), dep)
    if best is None:
        _, _, piv = qr(C, pivoting=True)
        dep = np.sort(piv[: d - k])
        return np.array(sorted(set(range(d)) - set(dep))), dep
    return best[1], best[2]


def translated_point(action: ActionSpec, context: SliceContext, star: TorusPoint, v: Sequence[float], precision: int | None = None) -> TorusPoint:
    """x_* + psi^{-1}(v) for v given over the V_<S> split coordinates."""
    frame = isometric_frame(action, context)
    cm = conjugacy_map(action)
    prec = precision or action.field.working_precision
    with mpmath.workprec(prec):
        full = [mpmath.mpf(0)] * action.d
        for idx, val in zip(frame.w_coords, v):
            full[idx] = mpmath.mpf(val)
        w = [mpmath.fsum(cm.psi_inv[i, j] * full[j] for j in range(action.d)) for i in range(action.d)]
        base = _as_mp(star)
        vals = [a + b for a, b in zip(base, w)]
    return TorusPoint.real(vals, radius=mpmath.mpf(cm.entry_error) * 10, precision=prec)


# -- disc confinement -----------------------------------------------------------------


@dataclass
class ConfinementVerdict:
    checked: bool
    c: float
    eps: float
    max_excess: float
    worst_n: tuple | None
    tol: float
    angle_ratio: float | None = None  # max |zeta^n v - v| / (2(c+1) eps |v|)
    angle_applicable: bool = False

    @property
    def ok(self) -> bool:
        good = self.max_excess <= self.tol
        if self.angle_applicable and self.angle_ratio is not None:
            good = good and self.angle_ratio <= 1 + 1e-9
        return good


def disc_confinement_check(
    action: ActionSpec,
    context: SliceContext,
    orbit: OrbitSample,
    x_star: TorusPoint,
    w_lattice: Sequence[float],
    eps: float,
    tol: float = EXACT_TOL,
    classification: Classification | None = None,
) -> ConfinementVerdict:
    """Every zeta^n.(x_* + w) lies within e^{c eps}|w| + tol of zeta^n.x_* + W."""
    if classification is not None and classification.kind not in ("translated_torsion", "torsion"):
        raise NotTranslatedTorsion("point is not classified as translated torsion")
    frame = isometric_frame(action, context)
    c = disc_constant(action, context)
    w_lattice = np.asarray(w_lattice, dtype=float)
    v0 = w_lattice @ frame.psi.T
    v_w = v0[list(frame.w_coords)]
    if np.linalg.norm(v0[list(frame.perp_coords)]) > tol:
        raise NotTranslatedTorsion("the translation is not in W")
    vnorm = float(np.linalg.norm(v_w))
    radius = math.exp(c * eps) * vnorm
    worst, worst_n = 0.0, None
    angle_ratio = 0.0
    angle_flag = bool(orbit.metadata.get("angle_constrained")) and eps < 1 / (c + 1)
    for n, y in zip(orbit.elements, orbit.points):
        z = act(action, n, x_star)
        ys = _as_mp(y)
        diff = nearest_lift(np.array([float(a - mpmath.mpf(b.numerator) / b.denominator) for a, b in zip(ys, z.coords)]))
        part_w, part_perp = frame.split(diff)
        radial = max(0.0, float(np.linalg.norm(part_w)) - radius)
        excess = math.hypot(float(np.linalg.norm(part_perp)), radial)
        if worst_n is None or excess > worst:
            worst, worst_n = excess, n
        if angle_flag and vnorm > 0:
            angle_ratio = max(angle_ratio, float(np.linalg.norm(part_w[0] - v_w)) / (2 * (c + 1) * eps * vnorm))
    return ConfinementVerdict(True, c, eps, worst, worst_n, tol, angle_ratio if angle_flag else None, angle_flag)


# -- density ---------------------------------------------------------------------------


@dataclass
class DensityRecord:
    grid_fraction: dict
    mc_covering_radius: float | None
    mc_samples: int
    distinct_points: int


def _cells(points: OrbitSample, delta: Fraction) -> int:
    """Number of occupied cells of side delta (exact arithmetic for exact points)."""
    inv = Fraction(1) / delta
    if inv.denominator == 1 and points.exact:
        m = inv.numerator
        keys = {tuple((n * m) // p.q for n in p.numerators) for p in points.points}
        return len(keys)
    arr = points.as_array()
    idx = np.floor(arr / float(delta)).astype(np.int64)
    idx = np.minimum(idx, int(math.ceil(float(inv))) - 1)
    return len(np.unique(idx, axis=0))


def grid_fraction(orbit: OrbitSample, delta, force: bool = True) -> float | None:
    delta = Fraction(delta).limit_denominator(10**9)
    if delta <= 0:
        raise ValueError("delta must be positive")
    per_axis = math.ceil(1 / delta)
    total = per_axis ** orbit.action.d
    if total > GRID_CAP:
        if force:
            raise ResolutionTooFine(f"{per_axis}^{orbit.action.d} cells exceed the 2^26 cap")
        return None
    if not len(orbit):
        return 0.0
    return _cells(orbit, delta) / total


def torus_points(orbit: OrbitSample) -> np.ndarray:
    arr = np.mod(orbit.as_array(), 1.0)
    arr[arr >= 1.0] = 0.0
    return arr


def mc_covering_radius(points: np.ndarray, samples: int, seed: int = 0) -> float:
    """Max over uniform samples of the flat-torus distance to the nearest point."""
    points = np.mod(np.asarray(points, dtype=float), 1.0)
    points[points >= 1.0] = 0.0
    d = points.shape[1]
    rng = np.random.default_rng(seed)
    probe = rng.random((samples, d))
    tree = cKDTree(points, boxsize=1.0)
    dist, _ = tree.query(probe)
    return float(np.max(dist))


def density_metrics(
    action: ActionSpec,
    orbit: OrbitSample,
    delta_schedule: Sequence = (Fraction(1, 8),),
    mc_samples: int = 10_000,
    seed: int = 0,
    force_grid: bool = False,
) -> DensityRecord:
    if not len(orbit):
        raise ValueError("orbit is empty")
    fractions = {}
    for delta in delta_schedule:
        fractions[Fraction(delta).limit_denominator(10**9)] = grid_fraction(orbit, delta, force=force_grid)
    radius = mc_covering_radius(torus_points(orbit), mc_samples, seed) if mc_samples else None
    return DensityRecord(fractions, radius, mc_samples, len(orbit.distinct_points()))


# -- subtorus confinement ---------------------------------------------------------------


@dataclass
class SubtorusVerdict:
    confined: bool
    membership: list  # per orbit point: sorted list of shifts a whose translate contains it
    hit_counts: dict  # a -> number of points on that translate
    max_residual: float
    translate_bases: dict  # a -> integer d x k basis (columns) of the translate

    def unconfined(self) -> list[int]:
        return [i for i, m in enumerate(self.membership) if not m]


def subfield_subtorus(action: ActionSpec, subfield_basis: Sequence) -> list[list[int]]:
    """Integer basis (rows) of the saturated lattice of the rational span of sigma(F)."""
    rows = [action.to_lattice_coords(u) for u in subfield_basis]
    den = 1
    for r in rows:
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [[int(x * den) for x in r] for r in rows]
    if len(LA.hnf(ints)) != len(ints):
        raise ValueError("subfield basis is not Q-linearly independent")
    return LA.saturate(ints)


def subtorus_confinement_check(
    action: ActionSpec,
    orbit: OrbitSample,
    subfield_basis: Sequence,
    shift_elements: Sequence[int],
    shift_generator: int = 0,
    tol: float = EXACT_TOL,
) -> SubtorusVerdict:
    """Membership of each orbit point in zeta^{a e_k}.Y for the allowed shifts a.

    Y is the subtorus spanned by sigma(F); zeta^{a e_k}.Y is cut out by the
    integer annihilator of M_k^a Y, so exact points are tested exactly.
    """
    base = subfield_subtorus(action, subfield_basis)
    translates, annihilators = {}, {}
    for a in shift_elements:
        e = [0] * action.r
        e[shift_generator] = int(a)
        m = group_matrix(action, e)
        img = [[int(v) for v in m.dot(np.array(row, dtype=object))] for row in base]
        sat = LA.saturate(img)
        translates[a] = LA.transpose(sat)
        annihilators[a] = LA.integer_kernel(sat)
    membership, counts, worst = [], {a: 0 for a in shift_elements}, 0.0
    for p in orbit.points:
        hits = []
        best = math.inf
        for a in shift_elements:
            ann = annihilators[a]
            if p.is_exact:
                on = all(sum(c * n for c, n in zip(row, p.numerators)) % p.q == 0 for row in ann)
                res = 0.0 if on else 1.0
            else:
                vals = p.as_float()
                t = np.array(ann, dtype=float) @ vals
                res = float(np.max(np.abs(t - np.round(t)))) if len(ann) else 0.0
                on = res < tol
            if on:
                hits.append(a)
                counts[a] += 1
                best = min(best, res)
        if hits:
            worst = max(worst, best)
        membership.append(sorted(hits))
    confined = all(membership)
    return SubtorusVerdict(confined, membership, counts, worst, translates)


def envelope_floor(
    action: ActionSpec,
    verdict: SubtorusVerdict,
    samples: int,
    seed: int = 0,
    per_axis: int | None = None,
) -> float:
    """MC covering radius of the union of the subtorus translates themselves (sampled on a grid)."""
    pts = []
    for basis in verdict.translate_bases.values():
        b = np.array(basis, dtype=float)  # d x k
        k = b.shape[1]
        m = per_axis or max(2, int(round((200_000 / max(len(verdict.translate_bases), 1)) ** (1 / k))))
        ax = (np.arange(m) + 0.5) / m
        grid = np.stack([g.reshape(-1) for g in np.meshgrid(*([ax] * k), indexing="ij")], axis=1)
        pts.append(np.mod(grid @ b.T, 1.0))
    return mc_covering_radius(np.concatenate(pts), samples, seed)


# -- pattern probe ------------------------------------------------------------------------


@dataclass
class PatternVerdict:
    found: bool
    radius: float | None
    witness: tuple | None  # (index_i, index_j)
    transverse: float
    searched: bool = True


def pattern_probe(
    action: ActionSpec,
    orbit: OrbitSample,
    context: SliceContext,
    radius_schedule: Sequence[float] = (0.05,),
    tol: float = EXACT_TOL,
) -> PatternVerdict:
    """Heuristic: close pairs whose difference leaves W by more than 10 * tol."""
    distinct = orbit.distinct_points()
    if len(distinct) < 2:
        return PatternVerdict(False, None, None, 0.0)
    pts = np.mod(np.array([p.as_float() for p in distinct]), 1.0)
    pts[pts >= 1.0] = 0.0
    frame = isometric_frame(action, context)
    tree = cKDTree(pts, boxsize=1.0)
    for radius in sorted(radius_schedule):
        pairs = tree.query_pairs(radius, output_type="ndarray")
        if not len(pairs):
            continue
        diff = nearest_lift(pts[pairs[:, 0]] - pts[pairs[:, 1]])
        _, perp = frame.split(diff)
        trans = np.linalg.norm(perp, axis=1) if perp.shape[1] else np.zeros(len(pairs))
        k = int(np.argmax(trans))
        if trans[k] > 10 * tol:
            return PatternVerdict(True, radius, (int(pairs[k, 0]), int(pairs[k, 1])), float(trans[k]))
    return PatternVerdict(False, None, None, 0.0)


# -- line density ---------------------------------------------------------------------------


@dataclass
class LineDensityRow:
    n: tuple
    covering_radius: float
    dense: bool


@dataclass
class LineDensityReport:
    rows: list
    first_dense: tuple | None
    direction_generic: bool  # every place component nonzero


def line_density_experiment(
    action: ActionSpec,
    direction: Sequence[float],
    n_schedule: Sequence,
    delta: float,
    samples_per_line: int = 20_000,
    mc_samples: int = 2_000,
    seed: int = 0,
) -> LineDensityReport:
    """Is the projected line R.(zeta^n . direction) delta-dense in X?"""
    direction = np.asarray(direction, dtype=float)
    if direction.shape != (action.d,) or not np.any(direction):
        raise ValueError("direction must be a nonzero vector of split embedding coordinates")
    cm = conjugacy_map(action)
    generic = all(np.linalg.norm(direction[list(idx)]) > 0 for idx in cm.place_coords)
    rows, first = [], None
    for n in n_schedule:
        n = tuple(int(v) for v in n)
        moved = _multiply_split(action, n, direction)
        vel = cm.psi_inv_np @ moved
        speed = np.linalg.norm(vel)
        step = (delta / 2) / speed
        t = (np.arange(samples_per_line) - samples_per_line // 2) * step
        pts = np.mod(t[:, None] * vel[None, :], 1.0)
        rad = mc_covering_radius(pts, mc_samples, seed)
        dense = rad < delta
        rows.append(LineDensityRow(n, rad, dense))
        if dense and first is None:
            first = n
    return LineDensityReport(rows, first, generic)


def _multiply_split(action: ActionSpec, n, vec: np.ndarray) -> np.ndarray:
    lam = action.lyap_np @ np.array(n, dtype=float)
    beta = action.args_np @ np.array(n, dtype=float)
    out = np.array(vec, dtype=float)
    cm = conjugacy_map(action)
    for i, idx in enumerate(cm.place_coords):
        scale = math.exp(lam[i])
        if len(idx) == 1:
            sign = 1.0 if abs(math.cos(beta[i]) - 1) < 1e-6 else -1.0
            out[idx[0]] = vec[idx[0]] * scale * sign
        else:
            z = complex(vec[idx[0]], vec[idx[1]]) * scale * complex(math.cos(beta[i]), math.sin(beta[i]))
            out[idx[0]], out[idx[1]] = z.real, z.imag
    return out


# -- recurrence ----------------------------------------------------------------------------


@dataclass(frozen=True)
class TorsionCertificate:
    q: int
    pair: tuple
    numeric: bool
    lift: tuple  # the exact rational solution of (M^m - M^n) x = k


def recurrence_torsion_witness(
    action: ActionSpec, x: TorusPoint, pairs: Sequence, tol: float = REAL_TOL
) -> TorsionCertificate | None:
    for m, n in pairs:
        m, n = tuple(int(v) for v in m), tuple(int(v) for v in n)
        if m == n:
            raise ValueError("pair entries must differ")
        a, b = act(action, m, x), act(action, n, x)
        diffm = group_matrix(action, m) - group_matrix(action, n)
        ints = [[int(v) for v in row] for row in diffm]
        if x.is_exact:
            if a != b:
                continue
            k = [sum(c * Fraction(v) for c, v in zip(row, x.coords)) for row in ints]
            numeric = False
        else:
            gap = nearest_lift(a.as_float() - b.as_float())
            if np.max(np.abs(gap)) > tol:
                continue
            xs = np.array(x.as_float())
            k = [Fraction(round(float(np.dot(row, xs)))) for row in ints]
            numeric = True
        if LA.det_int(ints) == 0:
            continue
        inv = LA.inverse_rational(ints)
        lift = [sum(c * v for c, v in zip(row, k)) for row in inv]
        q = 1
        for f in lift:
            q = q * f.denominator // math.gcd(q, f.denominator)
        return TorsionCertificate(q, (m, n), numeric, tuple(lift))
    return None


# -- report --------------------------------------------------------------------------------


@dataclass
class AnalysisReport:
    classification: Classification | None = None
    density: DensityRecord | None = None
    confinement: ConfinementVerdict | None = None
    pattern: PatternVerdict | None = None
    extra: dict = dc_field(default_factory=dict)

    def items(self) -> list[tuple[str, str]]:
        out: list[tuple[str, str]] = []
        if self.classification is not None:
            out.append(("classification", self.classification.describe()))
        if self.density is not None:
            for delta, frac in self.density.grid_fraction.items():
                out.append((f"grid_fraction[delta={delta}]", "n/a" if frac is None else f"{frac:.6g}"))
            if self.density.mc_covering_radius is not None:
                out.append(("mc_covering_radius", f"{self.density.mc_covering_radius:.6f}"))
                out.append(("mc_samples", str(self.density.mc_samples)))
            out.append(("distinct_points", str(self.density.distinct_points)))
        if self.confinement is not None:
            out.append(("confinement_checked", str(self.confinement.checked).lower()))
            out.append(("confinement_c", f"{self.confinement.c:.6g}"))
            out.append(("confinement_max_excess", f"{self.confinement.max_excess:.3e}"))
        if self.pattern is not None:
            out.append(("pattern_found", str(self.pattern.found).lower()))
            if self.pattern.found:
                out.append(("pattern_witness", f"{self.pattern.witness} at radius {self.pattern.radius}"))
        for k, v in self.extra.items():
            out.append((k, str(v)))
        return out

    def to_text(self) -> str:
        return "".join(f"{k}: {v}\n" for k, v in self.items())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(self.items())
        return buf.getvalue()
