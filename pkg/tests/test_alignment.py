import numpy as np
import pytest

from srvshape.alignment import (
    STEPS,
    act_reparam,
    act_rotation,
    align,
    check_gamma,
    compose,
    dp_path,
    optimal_reparam,
    optimal_rotation,
    segment_cost,
    shape_distance,
)
from srvshape.curve import TWO_PI, Srvf, knots
from srvshape.errors import (
    DegenerateCovarianceWarning,
    DimensionMismatch,
    GridTooSmall,
    NonMonotoneGamma,
)
from srvshape.sphere import geodesic_distance, inner

from conftest import random_rotation, random_srvf, smooth_warp


def rot2(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


# --- group actions -----------------------------------------------------------


def test_slope_candidates():
    assert len(STEPS) == 11
    assert all(np.gcd(a, b) == 1 and 1 <= a <= 4 and 1 <= b <= 4 for a, b in STEPS)


@pytest.mark.parametrize("n", [2, 3])
def test_act_rotation(rng, n):
    q = random_srvf(rng, n=n)
    np.testing.assert_array_equal(act_rotation(np.eye(n), q).values, q.values)
    O1, O2 = random_rotation(rng, n), random_rotation(rng, n)
    out = act_rotation(O1, q)
    assert abs(inner(out, out) - inner(q, q)) <= 1e-12
    np.testing.assert_allclose(
        act_rotation(O1, act_rotation(O2, q)).values, act_rotation(O1 @ O2, q).values, atol=1e-12
    )
    with pytest.raises(DimensionMismatch):
        act_rotation(np.eye(n + 1), q)


def test_act_reparam_identity(rng):
    q = random_srvf(rng)
    out = act_reparam(knots(q.m), q)
    assert np.max(np.abs(out.values - q.values)) <= 1e-12


def test_act_reparam_norm_before_renormalization(rng):
    q = random_srvf(rng, 200)
    out = act_reparam(smooth_warp(200), q, renormalize=False)
    assert abs(inner(out, out) - TWO_PI) <= 1e-3 * TWO_PI
    assert abs(inner(act_reparam(smooth_warp(200), q), act_reparam(smooth_warp(200), q)) - TWO_PI) <= 1e-12


def test_act_reparam_composition(rng):
    m = 200
    q = random_srvf(rng, m)
    g1, g2 = smooth_warp(m, 0.5), smooth_warp(m, -0.3)
    # ((q o g1) sqrt g1') o g2 ... = q o (g1 o g2)
    two_step = act_reparam(g2, act_reparam(g1, q))
    once = act_reparam(compose(g1, g2), q)
    assert geodesic_distance(two_step, once) <= 1e-3


def test_check_gamma_rejects():
    t = knots(10)
    with pytest.raises(NonMonotoneGamma):
        check_gamma(t[::-1], 10)
    bad = t.copy()
    bad[-1] = 6.0
    with pytest.raises(NonMonotoneGamma):
        check_gamma(bad, 10)
    with pytest.raises(DimensionMismatch):
        check_gamma(t, 11)


# --- optimal rotation --------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3])
def test_optimal_rotation_self_is_identity(rng, n):
    q = random_srvf(rng, n=n)
    O, out = optimal_rotation(q, q)
    np.testing.assert_allclose(O, np.eye(n), atol=1e-10)


@pytest.mark.parametrize("n", [2, 3])
def test_optimal_rotation_recovers_known(rng, n):
    q = random_srvf(rng, n=n)
    O = random_rotation(rng, n)
    Ostar, out = optimal_rotation(q, act_rotation(O, q))
    assert np.max(np.abs(Ostar - O.T)) <= 1e-8
    assert geodesic_distance(q, out) <= 1e-8
    assert abs(np.linalg.det(Ostar) - 1.0) <= 1e-10


def test_optimal_rotation_never_increases_distance(rng):
    for _ in range(500):
        n = int(rng.integers(2, 4))
        q1, q2 = random_srvf(rng, 40, n), random_srvf(rng, 40, n)
        _, out = optimal_rotation(q1, q2)
        assert geodesic_distance(q1, out) <= geodesic_distance(q1, q2) + 1e-12


def test_optimal_rotation_matches_sweep(rng):
    q1, q2 = random_srvf(rng), random_srvf(rng)
    sweep = np.deg2rad(np.arange(360))
    dists = [geodesic_distance(q1, act_rotation(rot2(a), q2)) for a in sweep]
    O, out = optimal_rotation(q1, q2)
    best = np.arctan2(O[1, 0], O[0, 0]) % TWO_PI
    gap = np.abs((sweep[int(np.argmin(dists))] - best + np.pi) % TWO_PI - np.pi)
    assert gap <= np.deg2rad(1.0)
    assert geodesic_distance(q1, out) <= min(dists) + 1e-12


def test_optimal_rotation_degenerate():
    z = Srvf(np.zeros((11, 2)))
    with pytest.warns(DegenerateCovarianceWarning):
        O, out = optimal_rotation(z, z)
    np.testing.assert_array_equal(O, np.eye(2))


# --- dynamic programming -----------------------------------------------------


def exhaustive_min(q_ref, q, grid, sub):
    """Minimum over every lattice path, summed in path order like the DP."""
    qa, qb = q_ref.values, q.values
    best = np.inf

    def walk(i, j, acc):
        nonlocal best
        if (i, j) == (grid, grid):
            best = min(best, acc)
            return
        for a, b in STEPS:
            k, l = i + int(a), j + int(b)
            if k <= grid and l <= grid:
                walk(k, l, acc + segment_cost(qa, qb, grid, sub, i, j, k, l))

    walk(0, 0, 0.0)
    return best


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_dp_matches_exhaustive_6x6(seed):
    rng = np.random.default_rng(seed)
    q1, q2 = random_srvf(rng, 30), random_srvf(rng, 30)
    _, energy = dp_path(q1, q2, 6)
    assert energy == exhaustive_min(q1, q2, 6, 5)


def test_dp_identity(rng):
    q = random_srvf(rng)
    gamma, out = optimal_reparam(q, q, grid=50)
    assert np.max(np.abs(gamma - knots(q.m))) <= TWO_PI / 50
    assert geodesic_distance(q, out) <= 1e-6


@pytest.mark.parametrize("a", [0.4, 0.8, -0.6])
def test_dp_recovers_known_warp(rng, a):
    m = 100
    q = random_srvf(rng, m)
    warped = act_reparam(smooth_warp(m, a), q)
    before = geodesic_distance(q, warped)
    _, out = optimal_reparam(q, warped, grid=m)
    assert geodesic_distance(q, out) <= 0.1 * before


def test_dp_never_worse_than_identity(rng):
    for _ in range(20):
        q1, q2 = random_srvf(rng, 40), random_srvf(rng, 40)
        gamma, out = optimal_reparam(q1, q2, grid=20)
        check_gamma(gamma, 40)
        assert geodesic_distance(q1, out) <= geodesic_distance(q1, q2) + 1e-12


def test_refinement_beats_lattice_warp(rng):
    m = 100
    q = random_srvf(rng, m)
    warped = act_reparam(smooth_warp(m, 0.4), q)
    _, plain = optimal_reparam(q, warped, refine=False)
    _, polished = optimal_reparam(q, warped)
    assert geodesic_distance(q, polished) <= geodesic_distance(q, plain)


def test_grid_too_small(rng):
    q = random_srvf(rng)
    with pytest.raises(GridTooSmall):
        optimal_reparam(q, q, grid=7)


# --- joint alignment and distance --------------------------------------------


def test_align_already_aligned(rng):
    q = random_srvf(rng)
    assert np.max(np.abs(align(q, q, grid=50).values - q.values)) <= 1e-6


def test_align_never_increases(rng):
    for _ in range(10):
        q1, q2 = random_srvf(rng, 60), random_srvf(rng, 60)
        assert geodesic_distance(q1, align(q1, q2, grid=30)) <= geodesic_distance(q1, q2) + 1e-12


def test_align_rotated_warped_copy(rng):
    m = 100
    q = random_srvf(rng, m)
    moved = act_rotation(rot2(1.1), act_reparam(smooth_warp(m, 0.6), q))
    assert geodesic_distance(q, align(q, moved)) <= 0.05


def test_shape_distance_basics(rng):
    q1, q2 = random_srvf(rng), random_srvf(rng)
    assert shape_distance(q1, q1, grid=50) == 0.0
    assert shape_distance(q1, q2, grid=50) <= geodesic_distance(q1, q2)
    assert shape_distance(q1, act_rotation(rot2(2.0), q1), reparam=False) <= 1e-6


@pytest.mark.parametrize("n", [2, 3])
def test_shape_distance_rotation_invariance(rng, n):
    q1, q2 = random_srvf(rng, n=n), random_srvf(rng, n=n)
    O = random_rotation(rng, n)
    for opts in ({"reparam": False}, {"grid": 50}):
        d = shape_distance(q1, q2, **opts)
        assert abs(shape_distance(q1, act_rotation(O, q2), **opts) - d) <= 1e-6


def test_shape_distance_reparam_invariance(rng):
    m, grid = 100, 100
    q1, q2 = random_srvf(rng, m), random_srvf(rng, m)
    d = shape_distance(q1, q2, grid=grid)
    dw = shape_distance(q1, act_reparam(smooth_warp(m, 0.5), q2), grid=grid)
    assert abs(dw - d) <= 2 * TWO_PI / grid
