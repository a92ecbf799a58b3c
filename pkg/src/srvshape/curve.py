"""Discrete open curves and their square-root velocity functions.

Every curve lives on the parameter interval [0, 2*pi] sampled at m+1
equispaced knots. Points are stored row-wise, shape ``(m + 1, n)``.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DataError, ZeroLengthCurve, ZeroNorm

TWO_PI = 2.0 * np.pi
SPEED_EPS = 1e-8
NORM_EPS = 1e-8


@lru_cache(maxsize=64)
def _knots(m):
    t = np.linspace(0.0, TWO_PI, m + 1)
    t.setflags(write=False)
    return t


@lru_cache(maxsize=64)
def _weights(m):
    w = np.full(m + 1, TWO_PI / m)
    w[0] *= 0.5
    w[-1] *= 0.5
    w.setflags(write=False)
    return w


def knots(m):
    """Equispaced knots ``t_r = 2*pi*r/m`` for r = 0..m."""
    return _knots(int(m))


def trapezoid_weights(m):
    """Trapezoidal quadrature weights on ``knots(m)``."""
    return _weights(int(m))


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Curve:
    points: np.ndarray

    def __post_init__(self):
        pts = _frozen(self.points)
        if pts.ndim != 2 or pts.shape[1] not in (2, 3):
            raise DataError(f"curve points must have shape (m+1, 2|3), got {pts.shape}")
        if pts.shape[0] < 3:
            raise DataError("a curve needs at least 3 samples (m >= 2)")
        if not np.all(np.isfinite(pts)):
            raise DataError("curve has non-finite coordinates")
        if not np.any(np.diff(pts, axis=0)):
            raise ZeroLengthCurve("curve has zero discrete length")
        object.__setattr__(self, "points", pts)

    @property
    def m(self):
        return self.points.shape[0] - 1

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def length(self):
        return float(np.sum(np.linalg.norm(np.diff(self.points, axis=0), axis=1)))


@dataclass(frozen=True, eq=False)
class Srvf:
    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 2 or v.shape[0] < 3:
            raise DataError(f"SRVF values must have shape (m+1, n), got {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def m(self):
        return self.values.shape[0] - 1

    @property
    def dim(self):
        return self.values.shape[1]


def curve_from_function(func, m):
    """Sample ``func(t)`` (returning an (m+1, n) array) on the standard knots."""
    return Curve(np.asarray(func(knots(m)), dtype=float))


def resample(curve, m):
    """Re-sample to ``m + 1`` points equispaced in arc length (piecewise linear)."""
    if m < 2:
        raise DataError("m must be at least 2")
    pts = curve.points
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    if total <= 0.0:
        raise ZeroLengthCurve("curve has zero discrete length")
    # duplicate samples give flat stretches of s; drop them for interpolation
    keep = np.concatenate([[True], seg > 0.0])
    s, pts = s[keep], pts[keep]
    target = np.linspace(0.0, total, m + 1)
    out = np.column_stack([np.interp(target, s, pts[:, a]) for a in range(pts.shape[1])])
    out[0] = pts[0]
    out[-1] = pts[-1]
    return Curve(out)


def derivative(values):
    """d/dt on the standard knots: central interior, second-order one-sided ends."""
    values = np.asarray(values, dtype=float)
    m = values.shape[0] - 1
    return np.gradient(values, TWO_PI / m, axis=0, edge_order=2)


def to_srvf(curve):
    """q(t) = beta'(t) / sqrt(|beta'(t)|), zero where the speed is below 1e-8."""
    vel = derivative(curve.points)
    speed = np.linalg.norm(vel, axis=1)
    q = np.zeros_like(vel)
    moving = speed >= SPEED_EPS
    q[moving] = vel[moving] / np.sqrt(speed[moving])[:, None]
    return Srvf(q)


def from_srvf(q, origin=None):
    """Integrate q|q| from ``origin`` (cumulative trapezoid)."""
    v = q.values
    if origin is None:
        origin = np.zeros(v.shape[1])
    integrand = v * np.linalg.norm(v, axis=1)[:, None]
    pts = cumulative_trapezoid(integrand, knots(q.m), axis=0, initial=0.0)
    return Curve(pts + np.asarray(origin, dtype=float))


def l2_norm_squared(values):
    values = np.asarray(values)
    return float(trapezoid_weights(values.shape[0] - 1) @ np.einsum("ij,ij->i", values, values))


def normalize_length(q):
    """Scale q so that its discrete L2 norm squared equals 2*pi."""
    nsq = l2_norm_squared(q.values)
    if nsq < NORM_EPS:
        raise ZeroNorm(f"SRVF norm {nsq:.3g} is below the floor {NORM_EPS}")
    return Srvf(q.values * np.sqrt(TWO_PI / nsq), normalized=True)


def preprocess(curve, m):
    """Arc-length resample, transform and length-normalize.

    Samples read from any parameter range are treated as equispaced on
    [0, 2*pi], so only their order matters.
    """
    return normalize_length(to_srvf(resample(curve, m)))
