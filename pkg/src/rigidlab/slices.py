"""Linear skeleton of non-hyperbolicity and enumeration of epsilon-slices.

Place indices are zero based throughout the Python API; the CLI and CSV
headers use one-based labels, so place ``i`` here is place ``i + 1`` there.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
import numpy as np
from scipy.linalg import qr
from scipy.spatial import cKDTree

from . import lattice as LA
from . import polynomials as P
from .action import (
    ActionSpec,
    arg_norms_np,
    group_element,
    group_matrix,
    lyapunov_np,
    lyapunov_of,
)
from .errors import HypothesisViolation, PrecisionExhausted
from .field import embed

SPAN_TOL = 1e-9
CLASS_DOT = 1 - 1e-8
BORDER = 1e-9


@dataclass(frozen=True)
class CoarseClass:
    members: tuple[int, ...]
    direction: np.ndarray  # unit vector in R^r (inside P_S); zeros for the [0]-class
    is_zero: bool
    projection_norm: float  # largest P_S-projection norm among members


@dataclass(frozen=True)
class SliceContext:
    S: frozenset
    dim_LS: int
    closure_S: frozenset
    PS_basis: np.ndarray  # r x (r - dim_LS), orthonormal columns
    coarse_classes: tuple[CoarseClass, ...]
    rank_condition_ok: bool
    tolerance: float
    r: int

    @property
    def nonzero_classes(self) -> tuple[CoarseClass, ...]:
        return tuple(c for c in self.coarse_classes if not c.is_zero)

    @property
    def zero_class(self) -> frozenset:
        for c in self.coarse_classes:
            if c.is_zero:
                return frozenset(c.members)
        return frozenset()


def _numerical_rank(m: np.ndarray, tol: float) -> int:
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * max(sv[0], 1.0)))


def build_context(action: ActionSpec, S: Iterable[int], tolerance: float = SPAN_TOL) -> SliceContext:
    S = frozenset(int(i) for i in S)
    places = action.places
    if any(i < 0 or i >= places for i in S):
        raise ValueError(f"S must be a subset of 0..{places - 1}")
    lam = action.lyap_np
    r = action.r
    rows = lam[sorted(S)] if S else np.zeros((0, r))
    dim = _numerical_rank(rows, tolerance)
    if dim:
        _, sv, vt = np.linalg.svd(rows)
        ps = vt[dim:].T
    else:
        ps = np.eye(r)
    # restriction of lambda_i to P_S, in P_S-basis coordinates
    proj = lam @ ps
    norms = np.linalg.norm(lam, axis=1)
    pnorms = np.linalg.norm(proj, axis=1)
    zero = [i for i in range(places) if pnorms[i] < tolerance * norms[i] or norms[i] < tolerance]
    closure = frozenset(zero) | S
    classes: list[CoarseClass] = []
    if closure:
        classes.append(
            CoarseClass(tuple(sorted(closure)), np.zeros(r), True, float(max(pnorms[list(closure)], default=0.0)))
        )
    remaining = [i for i in range(places) if i not in closure]
    units = {i: proj[i] / pnorms[i] for i in remaining}
    while remaining:
        seed = remaining[0]
        members = [i for i in remaining if float(units[i] @ units[seed]) > CLASS_DOT]
        remaining = [i for i in remaining if i not in members]
        classes.append(
            CoarseClass(
                tuple(members),
                ps @ units[seed],
                False,
                float(max(pnorms[members])),
            )
        )
    return SliceContext(
        S=S,
        dim_LS=dim,
        closure_S=closure,
        PS_basis=ps,
        coarse_classes=tuple(classes),
        rank_condition_ok=dim <= r - 2,
        tolerance=tolerance,
        r=r,
    )


def span_coefficients(action: ActionSpec, context: SliceContext) -> dict[int, dict[int, mpmath.mpf]]:
    """c_ij with lambda_j = sum_{i in S} c_ij lambda_i, for j in the closure of S.

    Least squares at the working precision; the residual must vanish to 1e-20.
    """
    S = sorted(context.S)
    out: dict[int, dict[int, mpmath.mpf]] = {}
    if not S:
        for j in context.closure_S:
            out[j] = {}
        return out
    with mpmath.workprec(action.field.working_precision):
        a = mpmath.matrix([[action.lyapunov[i][k] for i in S] for k in range(action.r)])
        # restrict to an independent subset of S so the normal equations are regular
        basis_idx = independent_rows(action.lyap_np, S)
        ab = mpmath.matrix([[action.lyapunov[i][k] for i in basis_idx] for k in range(action.r)])
        for j in sorted(context.closure_S):
            b = mpmath.matrix([action.lyapunov[j][k] for k in range(action.r)])
            sol, res = mpmath.qr_solve(ab, b)
            if res > mpmath.mpf("1e-20"):
                raise PrecisionExhausted(f"lambda_{j + 1} is not in L_S to 1e-20 (residual {mpmath.nstr(res, 3)})")
            coeffs = {i: mpmath.mpf(0) for i in S}
            for i, c in zip(basis_idx, sol):
                coeffs[i] = c
            out[j] = coeffs
        del a
    return out


def disc_constant(action: ActionSpec, context: SliceContext) -> float:
    """c = max_{j in <S>} sum_{i in S} |c_ij|."""
    coeffs = span_coefficients(action, context)
    if not coeffs:
        return 0.0
    return float(max(sum(abs(c) for c in row.values()) for row in coeffs.values()))


def independent_rows(lam: np.ndarray, S: Sequence[int], tol: float = SPAN_TOL) -> list[int]:
    """Greedy choice of indices from S whose Lyapunov rows are independent."""
    chosen: list[int] = []
    for i in sorted(S):
        trial = chosen + [i]
        if _numerical_rank(lam[trial], tol) == len(trial):
            chosen = trial
    return chosen


# -- lattice points in a slab --------------------------------------------------


def slab_points(
    a: np.ndarray, offset: np.ndarray, bound: float, lo: np.ndarray, hi: np.ndarray, chunk: int = 200_000
) -> np.ndarray:
    """Integer m with lo <= m <= hi and |a @ m + offset|_inf <= bound (up to a tiny margin).

    A subset of columns is solved for (the best-conditioned square block of a
    row-orthonormalised ``a``); the remaining coordinates are enumerated and the
    solved ones are restricted to the interval hull of the slab.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    offset = np.asarray(offset, dtype=float).reshape(-1)
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    h = len(lo)
    if np.any(hi < lo):
        return np.zeros((0, h), dtype=np.int64)
    k = _numerical_rank(a, SPAN_TOL) if a.size else 0
    margin = BORDER * (1 + bound)
    if k == 0:
        grid = _box(lo, hi)
        if a.size:
            ok = np.all(np.abs(grid @ a.T + offset) <= bound + margin, axis=1)
            grid = grid[ok]
        return grid
    u, sv, _ = np.linalg.svd(a, full_matrices=False)
    uk = u[:, :k]
    g = uk.T @ a  # k x h, rank k
    c = uk.T @ offset
    # |uk^T (a m + offset)|_2 <= |a m + offset|_2 <= sqrt(rows) * bound
    radius = np.sqrt(a.shape[0]) * bound + margin
    _, _, piv = qr(g, pivoting=True)
    dep = np.sort(piv[:k])
    free = np.array(sorted(set(range(h)) - set(dep)), dtype=int)
    gd_inv = np.linalg.inv(g[:, dep])
    half = radius * np.abs(gd_inv).sum(axis=1) + 1e-9
    free_grid = _box(lo[free], hi[free]) if len(free) else np.zeros((1, 0), dtype=np.int64)
    out = []
    for start in range(0, len(free_grid), max(1, chunk // 8)):
        fg = free_grid[start : start + max(1, chunk // 8)]
        center = -(gd_inv @ (c[:, None] + g[:, free] @ fg.T.astype(float))).T  # (#f, k)
        dlo = np.maximum(np.ceil(center - half).astype(np.int64), lo[dep])
        dhi = np.minimum(np.floor(center + half).astype(np.int64), hi[dep])
        span = np.max(dhi - dlo + 1, axis=0) if len(fg) else np.zeros(k, dtype=np.int64)
        if np.any(span <= 0):
            keep_any = np.all(dhi >= dlo, axis=1)
            if not keep_any.any():
                continue
        span = np.maximum(span, 1)
        offsets = _box(np.zeros(k, dtype=np.int64), span - 1)
        for ostart in range(0, len(offsets), max(1, chunk // max(len(fg), 1))):
            ofs = offsets[ostart : ostart + max(1, chunk // max(len(fg), 1))]
            cand_d = dlo[:, None, :] + ofs[None, :, :]
            valid = np.all(cand_d <= dhi[:, None, :], axis=2)
            fi, oi = np.nonzero(valid)
            if not len(fi):
                continue
            m = np.zeros((len(fi), h), dtype=np.int64)
            m[:, dep] = cand_d[fi, oi]
            if len(free):
                m[:, free] = fg[fi]
            vals = m.astype(float) @ a.T + offset
            ok = np.all(np.abs(vals) <= bound + margin, axis=1)
            out.append(m[ok])
    if not out:
        return np.zeros((0, h), dtype=np.int64)
    return np.concatenate(out)


def _box(lo, hi) -> np.ndarray:
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    if len(lo) == 0:
        return np.zeros((1, 0), dtype=np.int64)
    axes = [np.arange(l, u + 1, dtype=np.int64) for l, u in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


# -- slices --------------------------------------------------------------------


@dataclass(frozen=True)
class SliceQuery:
    context: SliceContext
    eps: float
    N: int
    offset: tuple[int, ...] = ()
    H: np.ndarray | None = None  # r x h integer basis (columns); None means Z^r
    angle_constrained: bool = False

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.N < 0:
            raise ValueError("N must be non-negative")
        r = self.context.r
        if self.offset and len(self.offset) != r:
            raise ValueError("coset offset has the wrong length")
        if self.H is not None:
            h = np.asarray(self.H)
            if h.shape[0] != r or _numerical_rank(h.astype(float), 1e-12) != h.shape[1]:
                raise ValueError("H basis columns must be independent vectors of length r")

    @property
    def sigma(self) -> np.ndarray:
        return np.array(self.offset if self.offset else [0] * self.context.r, dtype=np.int64)

    @property
    def basis(self) -> np.ndarray:
        return np.eye(self.context.r, dtype=np.int64) if self.H is None else np.asarray(self.H, dtype=np.int64)


@dataclass
class SliceResult:
    query: SliceQuery
    elements: np.ndarray  # (m, r) int
    lam_S: np.ndarray  # (m, |S|)
    max_arg: np.ndarray  # (m,)
    in_angle: np.ndarray  # (m,) bool
    S_order: tuple[int, ...] = ()

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return (tuple(int(x) for x in n) for n in self.elements)

    def as_set(self) -> set[tuple[int, ...]]:
        return set(iter(self))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        r = self.elements.shape[1] if self.elements.ndim == 2 else self.query.context.r
        w.writerow(
            [f"n_{k + 1}" for k in range(r)]
            + [f"lambda_{i + 1}" for i in self.S_order]
            + ["max_arg_norm", "in_angle_slice"]
        )
        for n, lam, ma, ia in zip(self.elements, self.lam_S, self.max_arg, self.in_angle):
            w.writerow(
                [int(x) for x in n]
                + [f"{v:.17g}" for v in lam]
                + [f"{ma:.17g}", int(bool(ia))]
            )
        return buf.getvalue()


def _coset_box(sigma: np.ndarray, basis: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer bounds on m so that sigma + basis @ m can lie in the box |n| <= N."""
    pinv = np.linalg.pinv(basis.astype(float))
    center = -pinv @ sigma
    half = np.abs(pinv).sum(axis=1) * N
    return np.floor(center - half - 1e-9).astype(np.int64), np.ceil(center + half + 1e-9).astype(np.int64)


def _exact_check(action: ActionSpec, n, S, eps, angles: bool) -> tuple[bool, bool]:
    lam, beta = lyapunov_of(action, n)
    lyap_ok = all(abs(lam[i]) < eps for i in S)
    ang_ok = all(abs(b) < eps for b in beta)
    return lyap_ok, ang_ok


def enumerate_slice(action: ActionSpec, query: SliceQuery) -> SliceResult:
    ctx = query.context
    S = sorted(ctx.S)
    sigma, basis = query.sigma, query.basis
    lam = action.lyap_np
    eps, N = float(query.eps), int(query.N)
    rows = lam[S] if S else np.zeros((0, action.r))
    a = rows @ basis.astype(float) if S else np.zeros((0, basis.shape[1]))
    off = rows @ sigma.astype(float) if S else np.zeros(0)
    lo, hi = _coset_box(sigma, basis, N)
    if S:
        ms = slab_points(a, off, eps, lo, hi)
    else:
        ms = _box(lo, hi)
    ns = sigma[None, :] + ms @ basis.T
    ns = ns[np.all(np.abs(ns) <= N, axis=1)]
    lam_all = lyapunov_np(action, ns)
    args = arg_norms_np(action, ns)
    lam_S = lam_all[:, S] if S else np.zeros((len(ns), 0))
    max_lam = np.max(np.abs(lam_S), axis=1) if S else np.zeros(len(ns))
    max_arg = np.max(args, axis=1) if args.size else np.zeros(len(ns))
    lyap_ok = max_lam < eps
    ang_ok = max_arg < eps
    # borderline values are decided at the working precision
    border = (np.abs(max_lam - eps) < BORDER * (1 + eps)) | (np.abs(max_arg - eps) < BORDER * (1 + eps))
    for idx in np.nonzero(border)[0]:
        lyap_ok[idx], ang_ok[idx] = _exact_check(action, ns[idx], S, eps, True)
    keep = lyap_ok & ang_ok if query.angle_constrained else lyap_ok
    ns, lam_S, max_arg, ang_ok = ns[keep], lam_S[keep], max_arg[keep], ang_ok[keep]
    if len(ns):
        order = np.lexsort(tuple(ns[:, k] for k in reversed(range(ns.shape[1]))) + (np.max(np.abs(ns), axis=1),))
        ns, lam_S, max_arg, ang_ok = ns[order], lam_S[order], max_arg[order], ang_ok[order]
    return SliceResult(query, ns.astype(np.int64), lam_S, max_arg, ang_ok.astype(bool), tuple(S))


# -- compatibility, covering constant --------------------------------------------


@dataclass(frozen=True)
class CompatibilityRow:
    eps: float
    first_N: int | None
    witness: tuple[int, ...] | None
    N_max: int


def compatibility_evidence(
    action: ActionSpec,
    context: SliceContext,
    offset: Sequence[int],
    H: np.ndarray | None,
    eps_schedule: Sequence[float],
    N_schedule: Sequence[int],
    angle_constrained: bool = True,
) -> list[CompatibilityRow]:
    if not eps_schedule or not N_schedule:
        raise ValueError("schedules must be nonempty")
    rows = []
    for eps in eps_schedule:
        found = None
        for N in sorted(N_schedule):
            res = enumerate_slice(
                action, SliceQuery(context, eps, N, tuple(offset), H, angle_constrained)
            )
            if len(res):
                found = (N, tuple(int(x) for x in res.elements[0]))
                break
        rows.append(
            CompatibilityRow(eps, found[0] if found else None, found[1] if found else None, max(N_schedule))
        )
    return rows


@dataclass(frozen=True)
class CoveringEstimate:
    C_by_N: dict
    saturated: bool
    unbounded: bool
    worst_eta: np.ndarray | None

    @property
    def C(self) -> float:
        return self.C_by_N[max(self.C_by_N)]


def covering_constant(
    action: ActionSpec,
    context: SliceContext,
    eps: float,
    sample_count: int,
    N: int | Sequence[int],
    seed: int = 0,
    angle_constrained: bool = True,
) -> CoveringEstimate:
    schedule = sorted(N) if isinstance(N, (list, tuple)) else sorted({max(1, int(N) // 2), int(N)})
    rng = np.random.default_rng(seed)
    ps = context.PS_basis
    dim = ps.shape[1]
    result: dict[int, float] = {}
    worst = None
    unbounded = False
    for n_box in schedule:
        res = enumerate_slice(action, SliceQuery(context, eps, n_box, angle_constrained=angle_constrained))
        if not len(res):
            unbounded = True
            result[n_box] = float("inf")
            continue
        tree = cKDTree(res.elements.astype(float))
        half = n_box / 2
        etas = [np.zeros(action.r)]
        while len(etas) < sample_count and dim:
            t = rng.uniform(-half * np.sqrt(action.r), half * np.sqrt(action.r), size=(4 * sample_count, dim))
            pts = t @ ps.T
            pts = pts[np.all(np.abs(pts) <= half, axis=1)]
            etas.extend(pts[: sample_count - len(etas)])
        etas = np.array(etas)
        dist, _ = tree.query(etas)
        result[n_box] = float(np.max(dist))
        worst = etas[int(np.argmax(dist))]
    finite = [v for v in result.values() if np.isfinite(v)]
    saturated = (
        not unbounded
        and len(finite) >= 2
        and result[schedule[-1]] <= 1.1 * result[schedule[-2]] + 1e-9
    )
    return CoveringEstimate(result, saturated, unbounded, worst)


# -- the logarithm map --------------------------------------------------------------


@dataclass
class LogmapProbe:
    indices: tuple[int, ...]  # i_1..i_{r_S}
    i0: int
    class_members: tuple[int, ...]
    min_norm_by_N: dict
    argmin_by_N: dict
    probed_by_N: dict
    rank_condition_ok: bool
    injective_on_probe: bool
    warning: str = ""

    def value(self, action: ActionSpec, n) -> np.ndarray:
        return logmap_value(action, self.indices + (self.i0,), n)


def logmap_value(action: ActionSpec, rows: Sequence[int], n) -> np.ndarray:
    n = np.atleast_2d(np.asarray(n, dtype=float))
    lin = n @ action.lyap_np[list(rows)].T
    ang = arg_norms_np(action, n)
    return np.concatenate([lin, ang], axis=1)


def logmap_probe(
    action: ActionSpec,
    context: SliceContext,
    class_choice: int | None = None,
    N: int | Sequence[int] = 8,
) -> LogmapProbe:
    nonzero = context.nonzero_classes
    if not nonzero:
        raise HypothesisViolation("no nonzero coarse Lyapunov class: <S> = I")
    if class_choice is None:
        cls = max(nonzero, key=lambda c: c.projection_norm)
    else:
        cls = nonzero[class_choice]
    lam = action.lyap_np
    indices = tuple(independent_rows(lam, sorted(context.S)))
    i0 = min(cls.members)
    rows = list(indices) + [i0]
    a = lam[rows]
    schedule = sorted(N) if isinstance(N, (list, tuple)) else [int(N)]
    r = action.r
    # a starting bound from a tiny exhaustive box
    start = _box(-np.ones(r, dtype=np.int64) * min(2, schedule[0]), np.ones(r, dtype=np.int64) * min(2, schedule[0]))
    start = start[np.any(start != 0, axis=1)]
    vals = np.linalg.norm(logmap_value(action, rows, start), axis=1)
    best = float(vals.min())
    argbest = tuple(int(x) for x in start[int(vals.argmin())])
    mins, args, probed = {}, {}, {}
    injective = True
    for n_box in schedule:
        lo, hi = -np.full(r, n_box, dtype=np.int64), np.full(r, n_box, dtype=np.int64)
        cand = slab_points(a, np.zeros(len(rows)), best, lo, hi)
        cand = cand[np.any(cand != 0, axis=1)]
        if len(cand):
            norms = np.linalg.norm(logmap_value(action, rows, cand), axis=1)
            k = int(norms.argmin())
            if norms[k] < best or (norms[k] == best and np.max(np.abs(cand[k])) <= n_box):
                best, argbest = float(norms[k]), tuple(int(x) for x in cand[k])
            probed[n_box] = len(cand)
            if np.any(norms == 0):
                injective = False
        else:
            probed[n_box] = 0
        mins[n_box], args[n_box] = best, argbest
    # the minimiser is nonzero and zeta^n != 1 exactly
    for n in set(args.values()):
        u, _ = group_element(action, n)
        if u == action.field.one():
            injective = False
    warning = "" if context.rank_condition_ok else "rank condition dim L_S <= r-2 fails; non-isolation is not guaranteed"
    return LogmapProbe(indices, i0, cls.members, mins, args, probed, context.rank_condition_ok, injective, warning)


# -- ratio map -------------------------------------------------------------------------


@dataclass
class RatioProfile:
    count: int
    indices: tuple[int, ...]
    class_of: dict  # n -> representative n
    relation_basis: list  # exact kernel generators checked to give Psi = 1


def _place_and_sign(action: ActionSpec, idx: int) -> tuple[int, int]:
    """Embedding index in 0..d-1 -> (place, +1 or -1 for a conjugate)."""
    places = action.places
    if idx < places:
        return idx, 1
    j = idx - places
    return action.field.r1 + j, -1


def _log_psi(action: ActionSpec, indices: Sequence[int], n) -> list[tuple]:
    i0 = indices[0]
    p0, s0 = _place_and_sign(action, i0)
    out = []
    for ih in indices[1:]:
        p, s = _place_and_sign(action, ih)
        re = mpmath.fsum((action.lyapunov[p][k] - action.lyapunov[p0][k]) * n[k] for k in range(action.r))
        im = mpmath.fsum((s * action.args[p][k] - s0 * action.args[p0][k]) * n[k] for k in range(action.r))
        im = im - 2 * mpmath.pi * mpmath.floor(im / (2 * mpmath.pi))
        out.append((re, im))
    return out


def conjugates_equal(action: ActionSpec, n, i: int, j: int) -> bool:
    """Exact test sigma_i(zeta^n) == sigma_j(zeta^n) for embedding indices in 0..d-1.

    Both values are roots of the minimal polynomial of zeta^n; they coincide
    iff their certified distance is below the root separation bound.
    """
    if i == j:
        return True
    m = group_matrix(action, n)
    cp = P.charpoly([[int(x) for x in row] for row in m])
    mp = P.squarefree_part(cp)
    if len(mp) - 1 <= 1:
        return True
    sep = P.separation_bound(mp)
    field = action.field
    while True:
        u, _ = group_element(action, n)
        ev = embed(field, u)
        vals = ev.full()
        rads = list(ev.radii) + list(ev.radii[field.r1:])
        gap = abs(vals[i] - vals[j])
        slack = rads[i] + rads[j]
        if gap + slack < sep / 2:
            return True
        if gap > slack:
            return False
        if field.working_precision >= 4096:
            raise PrecisionExhausted("cannot separate conjugates")
        field = field.with_precision(2 * field.working_precision)
        action = _rebased(action, field)


def _rebased(action: ActionSpec, field) -> ActionSpec:
    from .action import build_action

    gens = [field.element(g.coeffs) for g in action.generators]
    return build_action(field, gens)


def ratio_profile(action: ActionSpec, slice_elements: Iterable, indices: Sequence[int]) -> RatioProfile:
    indices = tuple(int(i) for i in indices)
    if len(indices) < 2 or len(set(indices)) != len(indices):
        raise ValueError("need at least two distinct embedding indices")
    if any(i < 0 or i >= action.d for i in indices):
        raise ValueError(f"embedding indices must lie in 0..{action.d - 1}")
    elems = [tuple(int(x) for x in n) for n in slice_elements]
    width = mpmath.mpf("1e-20")
    two_pi = 2 * mpmath.pi
    cells_per_turn = int(mpmath.ceil(two_pi / width))
    buckets: dict[tuple, list[int]] = {}
    logs = []
    with mpmath.workprec(action.field.working_precision):
        for idx, n in enumerate(elems):
            lp = _log_psi(action, indices, n)
            logs.append(lp)
            key = (int(mpmath.floor(lp[0][0] / width)), int(mpmath.floor(lp[0][1] / width)))
            buckets.setdefault(key, []).append(idx)

        def close(a, b):
            for (ra, ia), (rb, ib) in zip(a, b):
                if abs(ra - rb) > width:
                    return False
                dth = abs(ia - ib)
                if min(dth, two_pi - dth) > width:
                    return False
            return True

        rep: list[int] = list(range(len(elems)))

        def find(x):
            while rep[x] != x:
                rep[x] = rep[rep[x]]
                x = rep[x]
            return x

        for key, members in buckets.items():
            near = []
            for dr, di in itertools.product((-1, 0, 1), repeat=2):
                nk = (key[0] + dr, (key[1] + di) % cells_per_turn)
                near.extend(buckets.get(nk, []))
            for a_idx in members:
                for b_idx in near:
                    if b_idx < a_idx and find(a_idx) != find(b_idx) and close(logs[a_idx], logs[b_idx]):
                        rep[find(a_idx)] = find(b_idx)
    roots = {find(i) for i in range(len(elems))}
    # exact confirmation of every merge through the lattice of differences
    diffs = []
    for i in range(len(elems)):
        root = find(i)
        if root != i:
            diffs.append([a - b for a, b in zip(elems[i], elems[root])])
    relation_basis = LA.hnf(diffs) if diffs else []
    for b in relation_basis:
        for ih in indices[1:]:
            if not conjugates_equal(action, b, ih, indices[0]):
                raise PrecisionExhausted("numerically equal ratios are not exactly equal")
    class_of = {elems[i]: elems[find(i)] for i in range(len(elems))}
    return RatioProfile(len(roots), indices, class_of, relation_basis)
