from fractions import Fraction

import numpy as np
import pytest

from rigidlab.analysis import (
    classify_point,
    density_metrics,
    disc_confinement_check,
    grid_fraction,
    isometric_frame,
    line_density_experiment,
    mc_covering_radius,
    pattern_probe,
    recurrence_torsion_witness,
    subtorus_confinement_check,
    translated_point,
)
from rigidlab.errors import NotTranslatedTorsion, ResolutionTooFine
from rigidlab.experiments import random_point
from rigidlab.field import parse_element
from rigidlab.orbit import OrbitSample, TorusPoint, partial_orbit, point_from_element
from rigidlab.slices import SliceQuery, build_context, enumerate_slice
from rigidlab.specfile import read_preset


def test_classify_torsion_and_generic(cubic, octic):
    ctx = build_context(cubic, set())
    assert classify_point(cubic, ctx, TorusPoint.exact([0, 0, 0])).kind == "torsion"
    assert classify_point(cubic, ctx, TorusPoint.exact([Fraction(1, 3)] * 3)).q == 3
    near = TorusPoint.real([Fraction(2, 7), Fraction(3, 7), Fraction(6, 7)])
    cls = classify_point(cubic, ctx, near)
    assert cls.kind == "torsion" and cls.q == 7
    for seed in range(3):
        cls = classify_point(octic, build_context(octic, {0, 1}), random_point(8, seed), Qmax=1000, tol=1e-9)
        assert cls.kind == "generic" and "Qmax=1000" in cls.describe()


def test_translated_roundtrip(octic):
    ctx = build_context(octic, {0, 1})
    star = TorusPoint.exact([Fraction(1, 3)] * 8)
    rng = np.random.default_rng(0)
    for _ in range(100):
        v = rng.normal(size=2)
        v *= rng.uniform(1e-4, 0.05) / np.linalg.norm(v)
        x = translated_point(octic, ctx, star, v)
        cls = classify_point(octic, ctx, x, Qmax=3)
        assert cls.kind == "translated_torsion" and cls.q == 3
        assert abs(cls.v_norm - np.linalg.norm(v)) < 1e-9


def test_grid_fraction_examples(quad, cubic):
    single = OrbitSample(quad, [(0,)], [TorusPoint.exact([0, 0])], [1])
    assert grid_fraction(single, Fraction(1, 4)) == Fraction(1, 16)
    with pytest.raises(ResolutionTooFine):
        grid_fraction(OrbitSample(cubic, [], [], []), Fraction(1, 1000))
    with pytest.raises(ValueError):
        grid_fraction(single, 0)


def test_density_metrics(cubic):
    ctx = build_context(cubic, set())
    res = enumerate_slice(cubic, SliceQuery(ctx, 0.1, 4))
    orbit = partial_orbit(cubic, random_point(3, 0), res)
    rec = density_metrics(cubic, orbit, [Fraction(1, 4), Fraction(1, 8)], mc_samples=500)
    assert rec.grid_fraction[Fraction(1, 4)] >= rec.grid_fraction[Fraction(1, 8)] > 0
    assert 0 < rec.mc_covering_radius < 0.87


def test_mc_covering_radius_wraps():
    pts = np.array([[0.0, 0.0]])
    r = mc_covering_radius(pts, 2000)
    assert r <= np.sqrt(0.5) + 1e-12 and r > 0.6


def test_disc_confinement(octic):
    ctx = build_context(octic, {0, 1})
    frame = isometric_frame(octic, ctx)
    star = TorusPoint.exact([Fraction(1, 5)] * 8)
    v = np.array([6e-4, -8e-4])
    x = translated_point(octic, ctx, star, v)
    cls = classify_point(octic, ctx, x, Qmax=5)
    res = enumerate_slice(octic, SliceQuery(ctx, 0.2, 3))
    orbit = partial_orbit(octic, x, res)
    verdict = disc_confinement_check(octic, ctx, orbit, cls.torsion_point, cls.w_lattice, 0.2, classification=cls)
    assert verdict.ok and verdict.checked
    assert frame.dim == 2
    with pytest.raises(NotTranslatedTorsion):
        disc_confinement_check(octic, ctx, orbit, star, np.eye(8)[0] * 1e-3, 0.2)


def test_subtorus_confinement(octic):
    data = read_preset("octic")
    basis = [parse_element(octic.field, b) for b in data["subfield_basis"]]
    ctx = build_context(octic, {0, 1})
    res = enumerate_slice(octic, SliceQuery(ctx, 3.4, 3))
    zero = partial_orbit(octic, TorusPoint.exact([0] * 8), res)
    assert subtorus_confinement_check(octic, zero, basis, [-1, 0, 1]).confined
    y = partial_orbit(octic, point_from_element(octic, basis[1] / 7), res)
    assert subtorus_confinement_check(octic, y, basis, [-1, 0, 1]).confined
    assert not subtorus_confinement_check(octic, y, basis, [0]).confined


def test_pattern_probe(cubic):
    ctx = build_context(cubic, set())
    res = enumerate_slice(cubic, SliceQuery(ctx, 0.1, 12))
    torsion = partial_orbit(cubic, TorusPoint.exact([Fraction(1, 3)] * 3), res)
    # S empty: W = 0, so any two distinct torsion points differ transversally; close pairs only at the lattice spacing
    assert not pattern_probe(cubic, torsion, ctx, [0.05]).found
    generic = partial_orbit(cubic, random_point(3, 1), res)
    assert pattern_probe(cubic, generic, ctx, [0.05]).found
    single = partial_orbit(cubic, random_point(3, 1), enumerate_slice(cubic, SliceQuery(ctx, 0.1, 0)))
    assert not pattern_probe(cubic, single, ctx, [0.05]).found


def test_line_density(quad):
    rep = line_density_experiment(quad, [1.0, 0.0], [(0,)], delta=0.1, samples_per_line=5000, mc_samples=500)
    assert rep.rows[0].dense and not rep.direction_generic
    rep = line_density_experiment(quad, [1.0, 1.0], [(0,)], delta=0.1, samples_per_line=5000, mc_samples=500)
    assert rep.direction_generic and not rep.rows[0].dense
    with pytest.raises(ValueError):
        line_density_experiment(quad, [0.0, 0.0], [(0,)], delta=0.1)


def test_recurrence_witness(quad):
    zero = TorusPoint.exact([0, 0])
    assert recurrence_torsion_witness(quad, zero, [((1,), (2,))]).q == 1
    x = TorusPoint.exact([Fraction(1, 5), Fraction(2, 5)])
    pairs = [((m,), (n,)) for m in range(0, 13) for n in range(m + 1, 13)]
    cert = recurrence_torsion_witness(quad, x, pairs)
    assert cert is not None and 5 % cert.q == 0 and not cert.numeric
    assert recurrence_torsion_witness(quad, random_point(2, 0), pairs[:30]) is None
    with pytest.raises(ValueError):
        recurrence_torsion_witness(quad, x, [((1,), (1,))])
