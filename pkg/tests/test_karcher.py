import numpy as np
import pytest

from srvshape.alignment import act_rotation, align, shape_distance
from srvshape.curve import TWO_PI, Srvf, normalize_length
from srvshape.errors import EmptyInput, NoConvergence
from srvshape.karcher import KarcherConfig, karcher_mean, lift_to_tangent, medoid_index
from srvshape.sphere import exp_map, geodesic_distance, inner, tangent_norm

from conftest import random_rotation, random_srvf

ROT_ONLY = KarcherConfig(reparam=False)


def cluster(rng, N=8, m=60, n=2, spread=0.15):
    """Noisy copies of one base shape."""
    base = random_srvf(rng, m, n)
    out = []
    for _ in range(N):
        noisy = base.values + spread * rng.normal(size=base.values.shape).cumsum(axis=0) / np.sqrt(m)
        out.append(normalize_length(Srvf(noisy)))
    return out


def assert_monotone(trace):
    assert all(b <= a + 1e-10 for a, b in zip(trace, trace[1:]))


def test_single_input(rng):
    q = random_srvf(rng)
    res = karcher_mean([q], ROT_ONLY)
    assert res.mu is q
    assert res.iterations == 1 and res.converged
    np.testing.assert_array_equal(res.tangents[0].values, 0.0)


def test_two_point_midpoint():
    # m = 2, n = 1: the sampled functions live on a weighted 2-sphere
    rng = np.random.default_rng(7)
    q1 = normalize_length(Srvf(rng.normal(size=(3, 1))))
    q2 = normalize_length(Srvf(q1.values + 0.8 * rng.normal(size=(3, 1))))
    s = q1.values + q2.values
    midpoint = s * np.sqrt(TWO_PI / inner(s, s))
    cfg = KarcherConfig(rotation=False, reparam=False, tol=1e-9, max_iter=200)
    res = karcher_mean([q1, q2], cfg)
    assert np.max(np.abs(res.mu.values - midpoint)) <= 1e-6
    assert abs(geodesic_distance(res.mu, q1) - geodesic_distance(res.mu, q2)) <= 1e-6


def test_duplicates_fixed_point(rng):
    q = random_srvf(rng)
    res = karcher_mean([q, q, q], KarcherConfig())
    assert np.max(np.abs(res.mu.values - q.values)) <= 1e-9


def test_trace_monotone_rotation_only(rng):
    qs = [random_srvf(rng, 60) for _ in range(10)]
    res = karcher_mean(qs, ROT_ONLY)
    assert res.converged
    assert_monotone(res.objective_trace)


def test_trace_monotone_with_reparam(rng):
    qs = cluster(rng, N=5, m=50)
    res = karcher_mean(qs, KarcherConfig(grid=25))
    assert_monotone(res.objective_trace)


def test_tangents_at_mean(rng):
    qs = cluster(rng, N=6)
    res = karcher_mean(qs, ROT_ONLY)
    for v in res.tangents:
        assert v.basepoint is res.mu
        assert abs(inner(v, res.mu)) <= 1e-8
    mean = np.mean([v.values for v in res.tangents], axis=0)
    assert tangent_norm(mean) <= ROT_ONLY.tol


def test_permutation_invariance(rng):
    qs = [random_srvf(rng, 60) for _ in range(7)]
    a = karcher_mean(qs, ROT_ONLY).mu
    perm = rng.permutation(len(qs))
    b = karcher_mean([qs[i] for i in perm], ROT_ONLY).mu
    assert np.max(np.abs(a.values - b.values)) <= 1e-9


@pytest.mark.parametrize("n", [2, 3])
def test_rotation_equivariance(rng, n):
    qs = cluster(rng, N=6, n=n)
    O = random_rotation(rng, n)
    mu = karcher_mean(qs, ROT_ONLY).mu
    mu_rot = karcher_mean([act_rotation(O, q) for q in qs], ROT_ONLY).mu
    assert shape_distance(act_rotation(O, mu), mu_rot, reparam=False) <= 1e-6


def test_lift_properties(rng):
    qs = cluster(rng, N=5)
    mu = karcher_mean(qs, ROT_ONLY).mu
    assert np.max(np.abs(lift_to_tangent(mu, [mu], ROT_ONLY)[0].values)) <= 1e-12
    lifts = lift_to_tangent(mu, qs, ROT_ONLY)
    for q, v in zip(qs, lifts):
        target = align(mu, q, **ROT_ONLY.align_opts())
        assert np.max(np.abs(exp_map(mu, v).values - target.values)) <= 1e-8
    assert tangent_norm(np.mean([v.values for v in lifts], axis=0)) <= ROT_ONLY.tol


def test_medoid(rng):
    qs = cluster(rng, N=4)
    far = random_srvf(rng, 60)
    assert medoid_index(qs + [far]) != 4


def test_empty_input():
    with pytest.raises(EmptyInput):
        karcher_mean([], ROT_ONLY)


def test_no_convergence_carries_result(rng):
    qs = [random_srvf(rng, 60) for _ in range(6)]
    with pytest.raises(NoConvergence) as info:
        karcher_mean(qs, KarcherConfig(reparam=False, max_iter=2, tol=1e-14))
    partial = info.value.result
    assert partial.iterations == 2 and not partial.converged
    assert len(partial.objective_trace) == 2
