"""Geometry of the preshape sphere of length-normalized SRVFs.

The sphere has L2 radius sqrt(2*pi). Angles, tangent norms and the
exponential/logarithm maps all use the rescaled inner product
``<f, g> / (2*pi)`` so the usual unit-sphere formulas apply.
"""
from dataclasses import dataclass

import numpy as np

from .curve import TWO_PI, Srvf, _frozen, trapezoid_weights
from .errors import AntipodalPoints, DimensionMismatch

ANTIPODAL_TOL = 1e-6
ZERO_TANGENT = 1e-12


@dataclass(frozen=True, eq=False)
class TangentVector:
    values: np.ndarray
    basepoint: Srvf

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.shape != self.basepoint.values.shape:
            raise DimensionMismatch(
                f"tangent shape {self.values.shape} != basepoint shape {self.basepoint.values.shape}"
            )

    @property
    def norm(self):
        """Length in the unit-sphere metric (an angle for log-map outputs)."""
        return tangent_norm(self)


def _vals(x):
    return x.values if hasattr(x, "values") else np.asarray(x, dtype=float)


def inner(f, g):
    """Trapezoidal L2 inner product of two sampled functions on [0, 2*pi]."""
    a, b = _vals(f), _vals(g)
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot pair samples of shape {a.shape} and {b.shape}")
    if a.ndim == 1:
        return float(trapezoid_weights(a.shape[0] - 1) @ (a * b))
    return float(trapezoid_weights(a.shape[0] - 1) @ np.einsum("ij,ij->i", a, b))


def tangent_norm(v):
    return float(np.sqrt(max(inner(v, v), 0.0) / TWO_PI))


def project_tangent(q, w):
    """Remove the component of ``w`` along ``q``."""
    qv, wv = _vals(q), _vals(w)
    out = wv - (inner(wv, qv) / inner(qv, qv)) * qv
    return TangentVector(out, q)


def exp_map(q, v):
    """Follow the great circle from ``q`` with initial velocity ``v``."""
    theta = tangent_norm(v)
    if theta <= ZERO_TANGENT:
        return q
    vv = _vals(v)
    out = np.cos(theta) * q.values + (np.sin(theta) / theta) * vv
    return Srvf(out, normalized=True)


def cos_angle(q1, q2):
    return float(np.clip(inner(q1, q2) / TWO_PI, -1.0, 1.0))


def angle(q1, q2):
    """Angle between two sphere points.

    Same value as arccos(<q1, q2> / 2pi) on the sphere, but the half-angle
    form keeps full precision near 0 and pi where arccos loses ~8 digits.
    """
    a, b = _vals(q1), _vals(q2)
    diff, summ = inner(a - b, a - b), inner(a + b, a + b)
    return float(2.0 * np.arctan2(np.sqrt(max(diff, 0.0)), np.sqrt(max(summ, 0.0))))


def log_map(q1, q2):
    """Initial velocity of the great circle from ``q1`` to ``q2``."""
    c = cos_angle(q1, q2)
    theta = angle(q1, q2)
    if theta > np.pi - ANTIPODAL_TOL:
        raise AntipodalPoints(f"points are antipodal (angle {theta:.9f}); log map undefined")
    if theta < ZERO_TANGENT:
        return TangentVector(np.zeros_like(q1.values), q1)
    out = (theta / np.sin(theta)) * (q2.values - c * q1.values)
    return TangentVector(out, q1)


def geodesic_distance(q1, q2):
    """Great-circle distance in [0, pi]."""
    return angle(q1, q2)


def gram(a, b=None):
    """Matrix of pairwise inner products between stacks of shape (k, m+1, n)."""
    a = np.asarray(a)
    b = a if b is None else np.asarray(b)
    w = trapezoid_weights(a.shape[1] - 1)
    return np.einsum("irn,jrn,r->ij", a, b, w)
