"""End-to-end pipelines: the octic counterexample and the density dichotomy."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from . import lattice as LA
from .action import ActionSpec, irreducibility_report
from .analysis import (
    classify_point,
    envelope_floor,
    grid_fraction,
    mc_covering_radius,
    subtorus_confinement_check,
    torus_points,
)
from .field import norm_and_unit_test, parse_element
from .orbit import TorusPoint, partial_orbit, point_from_element
from .slices import SliceQuery, build_context, enumerate_slice
from .specfile import load_preset, read_preset


def random_point(d: int, seed: int, precision: int = 128) -> TorusPoint:
    """Guarded-real point with independent 64-bit dyadic coordinates."""
    rng = np.random.default_rng(seed)
    vals = [Fraction(int(rng.integers(0, 2**63)) * 2 + int(rng.integers(0, 2)), 2**64) for _ in range(d)]
    return TorusPoint.real(vals, precision=precision)


def generic_subtorus_point(action: ActionSpec, basis: Sequence, seed: int) -> TorusPoint:
    """A real point of pi(sigma(F)): random real combination of the F-basis."""
    rng = np.random.default_rng(seed)
    coords = [action.to_lattice_coords(u) for u in basis]
    prec = action.field.working_precision
    with mpmath.workprec(prec):
        ts = [mpmath.mpf(int(rng.integers(1, 2**62))) / 2**62 for _ in basis]
        vals = [mpmath.fsum(t * mpmath.mpf(c[j].numerator) / c[j].denominator for t, c in zip(ts, coords)) for j in range(action.d)]
    return TorusPoint.real(vals, precision=prec)


def slice_a_values(elements) -> list[int]:
    return [int(n[0]) for n in elements]


@dataclass
class Stage:
    name: str
    passed: bool
    detail: str


@dataclass
class CounterexampleRun:
    stages: list = dc_field(default_factory=list)
    warnings: list = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.stages)

    @property
    def first_failure(self) -> Stage | None:
        return next((s for s in self.stages if not s.passed), None)


def run_counterexample(
    eps0: float = 3.4, N: int = 6, tol: float = 1e-9, mc_samples: int = 10_000, seed: int = 0
) -> CounterexampleRun:
    run = CounterexampleRun()
    data = read_preset("octic")
    action = load_preset("octic")
    field = action.field

    def stage(name, ok, detail):
        run.stages.append(Stage(name, bool(ok), detail))

    stage("field", (field.d, field.r1, field.r2) == (8, 2, 3), f"d={field.d} r1={field.r1} r2={field.r2}")
    norms = [norm_and_unit_test(field, g) for g in action.generators]
    mats = [list(map(list, m)) for m in action.gen_matrices]
    commute = all(
        LA.matmul(a, b) == LA.matmul(b, a) for i, a in enumerate(mats) for b in mats[i + 1 :]
    )
    dets = [LA.det_int(m) for m in mats]
    stage(
        "units",
        all(u for _, u in norms) and commute and all(abs(x) == 1 for x in dets),
        f"norms={[str(n) for n, _ in norms]} commute={commute} dets={dets}",
    )
    rep = irreducibility_report(action, (1, 0, 0, 0))
    stage("total_irreducibility_e1", rep.irreducible and rep.totally_irreducible_certificate, rep.detail)
    S = {i - 1 for i in data["S"]}
    ctx = build_context(action, S)
    stage(
        "context",
        ctx.dim_LS == 2 and ctx.closure_S == frozenset(S) and ctx.rank_condition_ok,
        f"dim L_S={ctx.dim_LS} <S>={sorted(i + 1 for i in ctx.closure_S)}",
    )
    if N == 0:
        run.warnings.append("N = 0: the slice is {0}; every stage below is trivial")
    res = enumerate_slice(action, SliceQuery(ctx, eps0, N))
    a_vals = slice_a_values(res.elements)
    bound = int(2 * eps0 / abs(action.lyap_np[0, 0] - action.lyap_np[1, 0]))
    allowed = list(range(-bound, bound + 1))
    stage(
        "bounded_a",
        all(abs(a) <= bound for a in a_vals),
        f"{len(res)} slice elements, a in {sorted(set(a_vals))}, bound |a| <= {bound}",
    )
    basis = [parse_element(field, b) for b in data["subfield_basis"]]
    y_exact = point_from_element(action, basis[1] / 7)
    orbit = partial_orbit(action, y_exact, res)
    verdict = subtorus_confinement_check(action, orbit, basis, allowed, tol=tol)
    consistent = all(a in m for a, m in zip(a_vals, verdict.membership))
    y_real = generic_subtorus_point(action, basis, seed)
    orbit_real = partial_orbit(action, y_real, res)
    verdict_real = subtorus_confinement_check(action, orbit_real, basis, allowed, tol=tol)
    stage(
        "subtorus_confinement",
        verdict.confined and consistent and verdict_real.confined,
        f"hits={verdict.hit_counts} generic-point max residual={verdict_real.max_residual:.2e}",
    )
    floor = envelope_floor(action, verdict, mc_samples, seed)
    radius = mc_covering_radius(torus_points(orbit), mc_samples, seed)
    radius_real = mc_covering_radius(torus_points(orbit_real), mc_samples, seed)
    stage(
        "non_density",
        min(radius, radius_real) >= 0.9 * floor and floor > 0,
        f"mc radius exact={radius:.4f} generic={radius_real:.4f} envelope floor={floor:.4f}",
    )
    cls = classify_point(action, ctx, y_real)
    stage("not_translated_torsion", cls.kind == "generic", cls.describe())
    return run


@dataclass
class DichotomyRow:
    label: str
    classification: str
    grid_fractions: list
    orbit_sizes: list
    consistent: bool
    note: str = ""


def run_dichotomy(
    preset: str,
    N_schedule: Sequence[int] = (4, 8, 12),
    delta=Fraction(1, 8),
    seed: int = 0,
    eps: float = 0.1,
) -> list[DichotomyRow]:
    data = read_preset(preset)
    action = load_preset(preset)
    d = action.d
    S = {i - 1 for i in data.get("S", [])}
    ctx = build_context(action, S)
    rows: list[DichotomyRow] = []
    rng = np.random.default_rng(seed)
    if preset == "octic":
        eps = data["eps0"]
        basis = [parse_element(action.field, b) for b in data["subfield_basis"]]
        points = [(f"Y-point #{k}", generic_subtorus_point(action, basis, seed + k)) for k in range(2)]
        delta = Fraction(1, 2)
    else:
        points = []
        for q in (2, 3, 5, 7):
            points.append((f"torsion q={q}", TorusPoint.exact([Fraction(int(rng.integers(1, q)), q) for _ in range(d)])))
        for k in range(3):
            points.append((f"random({seed + k})", random_point(d, seed + k)))
    for label, x in points:
        cls = classify_point(action, ctx, x)
        fracs, sizes = [], []
        for N in N_schedule:
            res = enumerate_slice(action, SliceQuery(ctx, eps, N))
            orbit = partial_orbit(action, x, res)
            fracs.append(grid_fraction(orbit, delta))
            sizes.append(len(orbit.distinct_points()))
        monotone = all(b >= a for a, b in zip(fracs, fracs[1:]))
        if cls.kind in ("torsion", "translated_torsion") and preset != "octic":
            q = cls.q or 1
            consistent = max(sizes) <= q**d and fracs[-1] < 1
            note = "finite orbit, non-dense"
        elif preset == "octic":
            bound = int(2 * eps / abs(action.lyap_np[0, 0] - action.lyap_np[1, 0]))
            verdict = subtorus_confinement_check(action, orbit, basis, list(range(-bound, bound + 1)), tol=1e-9)
            floor = envelope_floor(action, verdict, 2000, seed)
            radius = mc_covering_radius(torus_points(orbit), 2000, seed)
            consistent = cls.kind == "generic" and verdict.confined and radius >= 0.9 * floor
            note = f"non-dense (mc radius {radius:.3f} >= floor {floor:.3f}) yet not translated torsion: assumption (2) violated at this eps - expected"
        else:
            consistent = monotone and fracs[-1] > fracs[0]
            note = "grid fraction increasing"
        rows.append(DichotomyRow(label, cls.describe(), fracs, sizes, consistent, note))
    return rows
