"""Rotation and reparametrization alignment of SRVFs.

Rotations are solved in closed form from the SVD of a cross-covariance.
Reparametrizations are searched by dynamic programming over piecewise
linear warps on a ``grid x grid`` lattice.
"""
import warnings
from math import gcd

import numpy as np
from numba import njit
from scipy.integrate import cumulative_trapezoid
from scipy.ndimage import uniform_filter1d
from scipy.optimize import minimize

from .curve import TWO_PI, Srvf, knots, normalize_length, trapezoid_weights
from .errors import (
    DegenerateCovarianceWarning,
    DimensionMismatch,
    GridTooSmall,
    NonMonotoneGamma,
)
from .sphere import geodesic_distance

MAX_STEP = 4
MIN_GRID = 8
COV_EPS = 1e-12
REFINE_HARMONICS = 8
REFINE_MAXITER = 30
LOG_SLOPE_CAP = 20.0


def slope_candidates(max_step=MAX_STEP):
    """Lattice steps (a, b), 1 <= a, b <= max_step, with gcd(a, b) == 1."""
    return np.array(
        [(a, b) for a in range(1, max_step + 1) for b in range(1, max_step + 1) if gcd(a, b) == 1],
        dtype=np.int64,
    )


STEPS = slope_candidates()


def check_rotation(O, atol=1e-10):
    O = np.asarray(O, dtype=float)
    n = O.shape[0]
    if O.shape != (n, n):
        raise DimensionMismatch(f"rotation must be square, got {O.shape}")
    if np.max(np.abs(O.T @ O - np.eye(n))) > atol or abs(np.linalg.det(O) - 1.0) > atol:
        raise ValueError("matrix is not in SO(n)")
    return O


def check_gamma(gamma, m):
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (m + 1,):
        raise DimensionMismatch(f"gamma must have {m + 1} samples, got {gamma.shape}")
    if gamma[0] != 0.0 or gamma[-1] != TWO_PI:
        raise NonMonotoneGamma("gamma must fix the endpoints 0 and 2*pi exactly")
    if np.any(np.diff(gamma) < 0.0):
        raise NonMonotoneGamma("gamma must be nondecreasing")
    return gamma


def act_rotation(O, q):
    O = np.asarray(O, dtype=float)
    if O.shape != (q.dim, q.dim):
        raise DimensionMismatch(f"{O.shape} rotation cannot act on R^{q.dim}")
    return Srvf(q.values @ O.T, normalized=q.normalized)


def act_reparam(gamma, q, renormalize=True):
    """(q o gamma) * sqrt(gamma'), optionally projected back onto the sphere."""
    gamma = check_gamma(gamma, q.m)
    t = knots(q.m)
    warped = np.column_stack([np.interp(gamma, t, q.values[:, a]) for a in range(q.dim)])
    # one-sided first-order ends keep gamma' >= 0 for piecewise-linear warps
    dgamma = np.gradient(gamma, TWO_PI / q.m, edge_order=1)
    out = Srvf(warped * np.sqrt(np.clip(dgamma, 0.0, None))[:, None])
    return normalize_length(out) if renormalize else out


def compose(gamma_outer, gamma_inner):
    """(gamma_outer o gamma_inner) sampled on the same knots."""
    t = knots(len(gamma_inner) - 1)
    out = np.interp(gamma_inner, t, gamma_outer)
    out[0], out[-1] = 0.0, TWO_PI
    return out


def optimal_rotation(q_ref, q):
    """Rotation O in SO(n) minimizing |q_ref - O q|, and the rotated q."""
    if q_ref.values.shape != q.values.shape:
        raise DimensionMismatch("SRVFs must share a discretization")
    w = trapezoid_weights(q.m)
    A = (q_ref.values * w[:, None]).T @ q.values
    U, s, Vt = np.linalg.svd(A)
    if s[0] < COV_EPS:
        warnings.warn("cross-covariance is numerically zero; using identity", DegenerateCovarianceWarning)
        return np.eye(q.dim), q
    D = np.eye(q.dim)
    D[-1, -1] = np.sign(np.linalg.det(U @ Vt)) or 1.0
    O = U @ D @ Vt
    return O, act_rotation(O, q)


@njit(cache=True)
def segment_cost(q_ref, q, grid, sub, k, l, i, j):
    """Integral of |q_ref(t) - sqrt(slope) q(gamma(t))|^2 over one linear warp piece.

    The piece runs from lattice node (k, l) to (i, j); ``sub`` quadrature
    intervals are used per lattice cell along t.
    """
    m = q.shape[0] - 1
    n = q.shape[1]
    cell = 2.0 * np.pi / grid
    t0 = k * cell
    slope = (j - l) / (i - k)
    root = np.sqrt(slope)
    npts = (i - k) * sub
    h = (i - k) * cell / npts
    # positions in units of knot spacing
    scale = m / (2.0 * np.pi)
    total = 0.0
    for p in range(npts + 1):
        t = t0 + p * h
        pa = t * scale
        ia = min(max(int(pa), 0), m - 1)
        fa = pa - ia
        pb = (l * cell + slope * (t - t0)) * scale
        ib = min(max(int(pb), 0), m - 1)
        fb = pb - ib
        d = 0.0
        for c in range(n):
            e = ((1.0 - fa) * q_ref[ia, c] + fa * q_ref[ia + 1, c]) - root * (
                (1.0 - fb) * q[ib, c] + fb * q[ib + 1, c]
            )
            d += e * e
        if p == 0 or p == npts:
            d *= 0.5
        total += d
    return total * h


@njit(cache=True)
def _dp_table(q_ref, q, grid, sub, steps):
    energy = np.full((grid + 1, grid + 1), np.inf)
    pred = np.full((grid + 1, grid + 1, 2), -1, dtype=np.int64)
    energy[0, 0] = 0.0
    for i in range(1, grid + 1):
        for j in range(1, grid + 1):
            best = np.inf
            bk = -1
            bl = -1
            for s in range(steps.shape[0]):
                k = i - steps[s, 0]
                l = j - steps[s, 1]
                if k < 0 or l < 0 or energy[k, l] == np.inf:
                    continue
                cand = energy[k, l] + segment_cost(q_ref, q, grid, sub, k, l, i, j)
                if cand < best:
                    best = cand
                    bk = k
                    bl = l
            energy[i, j] = best
            pred[i, j, 0] = bk
            pred[i, j, 1] = bl
    return energy, pred


def dp_path(q_ref, q, grid, sub=None, steps=STEPS):
    """Minimum-energy lattice path from (0, 0) to (grid, grid).

    Returns the list of visited nodes and the path energy.
    """
    if sub is None:
        sub = max(1, -(-q.m // grid))
    energy, pred = _dp_table(
        np.ascontiguousarray(q_ref.values), np.ascontiguousarray(q.values), grid, sub, steps
    )
    path = [(grid, grid)]
    while path[-1] != (0, 0):
        i, j = path[-1]
        path.append((int(pred[i, j, 0]), int(pred[i, j, 1])))
    return path[::-1], float(energy[grid, grid])


def path_to_gamma(path, grid, m):
    nodes = np.asarray(path, dtype=float) * (TWO_PI / grid)
    gamma = np.interp(knots(m), nodes[:, 0], nodes[:, 1])
    gamma[0], gamma[-1] = 0.0, TWO_PI
    return np.maximum.accumulate(gamma)


def _sq_dist(a, b):
    d = a.values - b.values
    return float(trapezoid_weights(a.m) @ np.einsum("ij,ij->i", d, d))


def _log_slope_design(m, harmonics):
    t = knots(m)
    return np.column_stack([fn(h * t) for h in range(1, harmonics + 1) for fn in (np.cos, np.sin)])


def _warp_from_log_slope(f, m):
    """Diffeomorphism with gamma' proportional to exp(f)."""
    f = np.nan_to_num(f, nan=0.0, posinf=LOG_SLOPE_CAP, neginf=-LOG_SLOPE_CAP)
    e = np.exp(np.clip(f, -LOG_SLOPE_CAP, LOG_SLOPE_CAP))
    g = cumulative_trapezoid(e, knots(m), initial=0.0)
    g = np.clip(np.maximum.accumulate(g * (TWO_PI / g[-1])), 0.0, TWO_PI)
    g[0], g[-1] = 0.0, TWO_PI
    return g


@njit(cache=True)
def _warp_energy(f, q_ref, q, w):
    """Squared distance from q_ref to the renormalized warp of q with gamma' ~ exp(f).

    Same arithmetic as ``_warp_from_log_slope`` followed by ``act_reparam``,
    without the per-call array bookkeeping.
    """
    m = q.shape[0] - 1
    n = q.shape[1]
    h = 2.0 * np.pi / m
    e = np.exp(np.minimum(np.maximum(f, -LOG_SLOPE_CAP), LOG_SLOPE_CAP))
    g = np.empty(m + 1)
    g[0] = 0.0
    for r in range(1, m + 1):
        g[r] = g[r - 1] + 0.5 * h * (e[r - 1] + e[r])
    scale = 2.0 * np.pi / g[m]
    for r in range(m + 1):
        g[r] = min(g[r] * scale, 2.0 * np.pi)
    g[0] = 0.0
    g[m] = 2.0 * np.pi
    out = np.empty((m + 1, n))
    norm = 0.0
    for r in range(m + 1):
        if r == 0:
            d = (g[1] - g[0]) / h
        elif r == m:
            d = (g[m] - g[m - 1]) / h
        else:
            d = (g[r + 1] - g[r - 1]) / (2.0 * h)
        root = np.sqrt(max(d, 0.0))
        p = g[r] / h
        i = min(int(p), m - 1)
        fr = p - i
        for c in range(n):
            out[r, c] = root * ((1.0 - fr) * q[i, c] + fr * q[i + 1, c])
            norm += w[r] * out[r, c] * out[r, c]
    k = np.sqrt(2.0 * np.pi / norm)
    total = 0.0
    for r in range(m + 1):
        for c in range(n):
            diff = q_ref[r, c] - k * out[r, c]
            total += w[r] * diff * diff
    return total


def refine_reparam(q_ref, q, gamma0, harmonics=REFINE_HARMONICS):
    """Continuous polish of a lattice warp.

    The lattice only offers a few rational slopes, so a DP warp tracks a
    smooth optimum in position but not in slope. Here gamma' = exp(f) with
    f a short trigonometric series, started from a lightly smoothed gamma0.
    """
    m = q.m
    t = knots(m)
    w = trapezoid_weights(m)
    X = _log_slope_design(m, harmonics)
    smoothed = t + uniform_filter1d(gamma0 - t, 5, mode="constant")
    f0 = np.log(np.clip(np.gradient(smoothed, t), 0.05, None))
    sw = np.sqrt(w)[:, None]
    c0 = np.linalg.lstsq(X * sw, (f0 - f0 @ w / TWO_PI) * sw[:, 0], rcond=None)[0]
    qa, qb, wc = (np.ascontiguousarray(a) for a in (q_ref.values, q.values, w))
    res = minimize(
        lambda c: _warp_energy(X @ c, qa, qb, wc), c0, method="L-BFGS-B", options={"maxiter": REFINE_MAXITER}
    )
    return _warp_from_log_slope(X @ res.x, m)


def optimal_reparam(q_ref, q, grid=None, refine=True):
    """Warp gamma (approximately) minimizing |q_ref - (q o gamma) sqrt(gamma')|.

    The lattice DP result is optionally polished by ``refine_reparam``; the
    best of identity, DP and polished warps is returned, so the objective
    never exceeds the identity objective.
    """
    if q_ref.values.shape != q.values.shape:
        raise DimensionMismatch("SRVFs must share a discretization")
    grid = q.m if grid is None else int(grid)
    if grid < MIN_GRID:
        raise GridTooSmall(f"DP grid {grid} < {MIN_GRID}")
    path, _ = dp_path(q_ref, q, grid)
    gamma = path_to_gamma(path, grid, q.m)
    best = (_sq_dist(q_ref, q), knots(q.m).copy(), q)
    candidates = [gamma]
    if refine:
        candidates.append(refine_reparam(q_ref, q, gamma))
    for g in candidates:
        warped = act_reparam(g, q)
        e = _sq_dist(q_ref, warped)
        if e < best[0]:
            best = (e, g, warped)
    return best[1], best[2]


def align(q_ref, q, iters=2, rotation=True, reparam=True, grid=None, tol=1e-8, refine=True):
    """Alternate optimal rotation and reparametrization of ``q`` onto ``q_ref``.

    The geodesic distance to ``q_ref`` never increases; iteration stops
    early once a sweep improves it by less than ``tol``.
    """
    current = q
    dist = geodesic_distance(q_ref, current)
    for _ in range(iters):
        start = dist
        if rotation:
            _, cand = optimal_rotation(q_ref, current)
            d = geodesic_distance(q_ref, cand)
            if d <= dist:
                current, dist = cand, d
        if reparam:
            _, cand = optimal_reparam(q_ref, current, grid, refine)
            d = geodesic_distance(q_ref, cand)
            if d <= dist:
                current, dist = cand, d
        if start - dist < tol:
            break
    return current


def shape_distance(q1, q2, **align_opts):
    """Distance between the orbits of q1 and q2 (q2 is moved onto q1)."""
    return geodesic_distance(q1, align(q1, q2, **align_opts))
