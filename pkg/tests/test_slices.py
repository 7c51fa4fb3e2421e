import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_slice
from rigidlab.errors import HypothesisViolation
from rigidlab.slices import (
    SliceQuery,
    build_context,
    compatibility_evidence,
    covering_constant,
    enumerate_slice,
    logmap_probe,
    ratio_profile,
    slab_points,
)

H234 = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_octic_context(octic):
    ctx = build_context(octic, {0, 1})
    assert ctx.dim_LS == 2 and ctx.closure_S == frozenset({0, 1}) and ctx.rank_condition_ok
    assert ctx.PS_basis.shape == (4, 2)
    assert np.allclose(octic.lyap_np[[0, 1]] @ ctx.PS_basis, 0, atol=1e-12)
    members = sorted(i for c in ctx.coarse_classes for i in c.members)
    assert members == list(range(octic.places))


def test_cubic_context_empty_S(cubic):
    ctx = build_context(cubic, set())
    assert ctx.dim_LS == 0 and ctx.closure_S == frozenset() and ctx.rank_condition_ok
    assert len(ctx.nonzero_classes) == 3


def test_context_rejects_bad_places(octic):
    with pytest.raises(ValueError):
        build_context(octic, {7})


@pytest.mark.parametrize("S,eps,N", [({0, 1}, 3.4, 3), ({0}, 0.5, 3), ({2}, 1.0, 2), ({0, 1, 2}, 2.0, 2)])
def test_slice_matches_brute_force(octic, S, eps, N):
    res = enumerate_slice(octic, SliceQuery(build_context(octic, S), eps, N))
    assert res.as_set() == brute_slice(octic.lyap_np, sorted(S), eps, N)


def test_slice_properties(octic):
    ctx = build_context(octic, {0, 1})
    small = enumerate_slice(octic, SliceQuery(ctx, 3.4, 3)).as_set()
    big = enumerate_slice(octic, SliceQuery(ctx, 3.4, 4)).as_set()
    assert (0, 0, 0, 0) in small
    assert small <= big
    assert {tuple(-x for x in n) for n in small} == small
    tight = enumerate_slice(octic, SliceQuery(ctx, 1.7, 4)).as_set()
    # H_eps + H_eps lies in H_{2 eps}
    for a in list(tight)[:40]:
        for b in list(tight)[:40]:
            s = tuple(x + y for x, y in zip(a, b))
            if max(map(abs, s)) <= 4:
                assert s in big


def test_quadratic_slice_is_trivial(quad):
    res = enumerate_slice(quad, SliceQuery(build_context(quad, {0}), 0.5, 10))
    assert res.as_set() == {(0,)}


def test_coset_and_subgroup(octic):
    ctx = build_context(octic, {0, 1})
    res = enumerate_slice(octic, SliceQuery(ctx, 3.4, 4, offset=(1, 0, 0, 0), H=H234))
    assert all(n[0] == 1 for n in res)
    full = enumerate_slice(octic, SliceQuery(ctx, 3.4, 4)).as_set()
    assert res.as_set() == {n for n in full if n[0] == 1}


def test_angle_constraint_subset(cubic):
    ctx = build_context(cubic, {0})
    free = enumerate_slice(cubic, SliceQuery(ctx, 0.5, 6))
    ang = enumerate_slice(cubic, SliceQuery(ctx, 0.5, 6, angle_constrained=True))
    assert ang.as_set() <= free.as_set()
    assert np.all(ang.max_arg < 0.5)


def test_query_validation(octic):
    ctx = build_context(octic, {0, 1})
    with pytest.raises(ValueError):
        SliceQuery(ctx, 0, 3)
    with pytest.raises(ValueError):
        SliceQuery(ctx, 1.0, -1)
    with pytest.raises(ValueError):
        SliceQuery(ctx, 1.0, 3, offset=(1, 0))


def test_slice_csv(octic):
    res = enumerate_slice(octic, SliceQuery(build_context(octic, {0, 1}), 3.4, 1))
    lines = res.to_csv().splitlines()
    assert lines[0].startswith("n_1,n_2,n_3,n_4,lambda_1,lambda_2")
    assert len(lines) == len(res) + 1


@given(
    st.lists(st.floats(-3, 3), min_size=3, max_size=3),
    st.floats(0.1, 2.0),
    st.integers(1, 4),
)
@settings(max_examples=40, deadline=None)
def test_slab_points_complete(row, bound, N):
    a = np.array([row])
    lo, hi = -np.full(3, N), np.full(3, N)
    got = {tuple(m) for m in slab_points(a, np.zeros(1), bound, lo, hi)}
    ax = np.arange(-N, N + 1)
    grid = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), -1).reshape(-1, 3)
    vals = np.abs(grid @ a[0])
    sure = {tuple(m) for m, v in zip(grid, vals) if v <= bound - 1e-9}
    maybe = {tuple(m) for m, v in zip(grid, vals) if v <= bound + 1e-6}
    assert sure <= got <= maybe


def test_compatibility_negative(octic):
    ctx = build_context(octic, {0, 1})
    rows = compatibility_evidence(octic, ctx, (1, 0, 0, 0), H234, [0.05], [2, 4])
    assert rows[0].first_N is None and rows[0].witness is None


def test_compatibility_positive(octic):
    ctx = build_context(octic, {0, 1})
    rows = compatibility_evidence(octic, ctx, (0, 0, 0, 0), None, [0.5], [2], angle_constrained=False)
    assert rows[0].first_N == 2 and rows[0].witness == (0, 0, 0, 0)


def test_covering_constant(cubic):
    ctx = build_context(cubic, {0})
    est = covering_constant(cubic, ctx, 0.5, 200, [4, 8], seed=0, angle_constrained=False)
    assert set(est.C_by_N) == {4, 8}
    assert 0 < est.C < np.inf and not est.unbounded


def test_logmap_probe(cubic, octic):
    probe = logmap_probe(cubic, build_context(cubic, set()), N=[4, 8])
    vals = [probe.min_norm_by_N[k] for k in (4, 8)]
    assert vals[0] >= vals[1] > 0 and probe.injective_on_probe
    probe = logmap_probe(octic, build_context(octic, {0, 1}), N=[4])
    assert probe.indices == (0, 1) and probe.warning == ""
    with pytest.raises(HypothesisViolation):
        logmap_probe(octic, build_context(octic, set(range(5))), N=[2])


def test_logmap_rank_warning(quad):
    # r = 1: the rank condition fails for every S, even S empty
    ctx = build_context(quad, set())
    probe = logmap_probe(quad, ctx, N=[4])
    assert probe.warning


def test_ratio_profile(octic):
    ctx = build_context(octic, {0, 1})
    res = enumerate_slice(octic, SliceQuery(ctx, 3.4, 2))
    prof = ratio_profile(octic, res, (0, 2))
    assert 1 < prof.count <= len(res)
    assert ratio_profile(octic, [(0, 0, 0, 0)], (0, 2)).count == 1
    sub = enumerate_slice(octic, SliceQuery(ctx, 3.4, 4, H=H234))
    assert ratio_profile(octic, sub, (0, 1)).count == 1
    with pytest.raises(ValueError):
        ratio_profile(octic, res, (0,))


@pytest.mark.parametrize("S", [{0, 1}, {0}, {2}, set()])
def test_coarse_classes_are_positive_proportionality_classes(octic, S):
    ctx = build_context(octic, S)
    proj = octic.lyap_np @ ctx.PS_basis
    unit = {i: proj[i] / np.linalg.norm(proj[i]) for c in ctx.nonzero_classes for i in c.members}
    label = {i: k for k, c in enumerate(ctx.nonzero_classes) for i in c.members}
    for i in unit:
        for j in unit:
            same = float(unit[i] @ unit[j]) > 1 - 1e-8
            assert same == (label[i] == label[j])
    for i in ctx.zero_class:
        assert np.linalg.norm(proj[i]) < 1e-9 * max(1.0, np.linalg.norm(octic.lyap_np[i]))
