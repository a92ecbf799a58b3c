"""Truncated Fourier bases of the horizontal tangent space at a mean shape.

The ambient trigonometric system is projected onto the tangent space of the
preshape sphere at ``mu``, the vertical directions generated by rotations and
reparametrizations are removed, and the survivors are orthonormalized by
modified Gram-Schmidt. Tangent vectors are then represented by their
coefficients in this basis (the columns of the data matrix).
"""
from dataclasses import dataclass, field

import numpy as np

from .curve import TWO_PI, derivative, knots, trapezoid_weights
from .errors import AliasRisk, BasepointMismatch, DimensionMismatch, InsufficientRank
from .sphere import TangentVector, gram, inner

DROP_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class AmbientBasis:
    elements: np.ndarray  # (d, m+1, n)
    harmonics: int

    @property
    def d(self):
        return self.elements.shape[0]


@dataclass(frozen=True, eq=False)
class VerticalBasis:
    elements: np.ndarray  # (k, m+1, n)
    rotation_fields: int
    warp_fields: int
    dropped: int = 0

    @property
    def k(self):
        return self.elements.shape[0]


@dataclass(frozen=True, eq=False)
class TangentBasis:
    mu: object
    elements: np.ndarray  # (K, m+1, n)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", trapezoid_weights(self.elements.shape[1] - 1))

    @property
    def K(self):
        return self.elements.shape[0]


@dataclass(frozen=True, eq=False)
class DataMatrix:
    entries: np.ndarray  # (K, N)
    labels: tuple | None = None

    @property
    def K(self):
        return self.entries.shape[0]

    @property
    def N(self):
        return self.entries.shape[1]


def ambient_fourier_basis(n, H, m):
    """Orthonormal trigonometric system of L2([0, 2*pi], R^n), low frequencies first.

    Order: the constants for every axis, then for h = 1..H the sine and
    cosine of harmonic h for every axis. ``d = n * (2H + 1)``.
    """
    if m < 8 * H:
        raise AliasRisk(f"m = {m} samples cannot resolve {H} harmonics (need m >= {8 * H})")
    t = knots(m)
    scalars = [np.full(m + 1, 1.0 / np.sqrt(TWO_PI))]
    for h in range(1, H + 1):
        scalars.append(np.sin(h * t) / np.sqrt(np.pi))
        scalars.append(np.cos(h * t) / np.sqrt(np.pi))
    elements = np.zeros((len(scalars) * n, m + 1, n))
    for s, f in enumerate(scalars):
        for a in range(n):
            elements[s * n + a, :, a] = f
    return AmbientBasis(elements, H)


def so_generators(n):
    """Basis E_ab - E_ba (a < b) of the skew-symmetric n x n matrices."""
    gens = []
    for a in range(n):
        for b in range(a + 1, n):
            B = np.zeros((n, n))
            B[a, b], B[b, a] = -1.0, 1.0
            gens.append(B)
    return gens


def warp_generators(L, m):
    """Warp velocity fields g_l(t) = sin(l t / 2) / sqrt(pi), zero at both ends, and g_l'."""
    t = knots(m)
    g = np.array([np.sin(l * t / 2.0) for l in range(1, L + 1)]) / np.sqrt(np.pi)
    dg = np.array([(l / 2.0) * np.cos(l * t / 2.0) for l in range(1, L + 1)]) / np.sqrt(np.pi)
    return g, dg


def _project_out(v, mu_vals, mu_sq):
    return v - (inner(v, mu_vals) / mu_sq) * mu_vals


def _gram_schmidt(candidates, against, w, limit=None, tol=DROP_TOL):
    """Modified Gram-Schmidt (two passes) of ``candidates`` against an orthonormal set.

    Returns the accepted orthonormal vectors and the number dropped.
    """
    accepted = []
    dropped = 0
    basis = list(against)
    for v in candidates:
        start = np.sqrt(inner(v, v))
        if start == 0.0:
            dropped += 1
            continue
        u = v.copy()
        for _ in range(2):
            for e in basis:
                u = u - np.einsum("rn,rn,r->", u, e, w) * e
        nrm = np.sqrt(inner(u, u))
        if nrm <= tol * start:
            dropped += 1
            continue
        u = u / nrm
        accepted.append(u)
        basis.append(u)
        if limit is not None and len(accepted) == limit:
            break
    return accepted, dropped


def vertical_basis(mu, L=10):
    """Orthonormal basis of the directions along the orbit of ``mu``.

    Rotation fields B mu for B in so(n), and warp fields
    mu' g + mu g' / 2 for the generators of :func:`warp_generators`.
    """
    m, n = mu.m, mu.dim
    mu_vals = mu.values
    mu_sq = inner(mu_vals, mu_vals)
    fields = [mu_vals @ B.T for B in so_generators(n)]
    n_rot = len(fields)
    dmu = derivative(mu_vals)
    g, dg = warp_generators(L, m)
    for gl, dgl in zip(g, dg):
        fields.append(dmu * gl[:, None] + 0.5 * mu_vals * dgl[:, None])
    unit_mu = mu_vals / np.sqrt(mu_sq)
    w = trapezoid_weights(m)
    candidates = [_project_out(f, mu_vals, mu_sq) for f in fields]
    accepted, dropped = _gram_schmidt(candidates, [unit_mu], w)
    elements = np.array(accepted) if accepted else np.zeros((0, m + 1, n))
    return VerticalBasis(elements, rotation_fields=n_rot, warp_fields=L, dropped=dropped)


def horizontal_basis(mu, ambient, vertical, K):
    """First ``K`` orthonormal horizontal directions, in ambient (low-frequency) order."""
    if K > ambient.d - 1 - vertical.k:
        raise InsufficientRank(
            f"K = {K} exceeds the available dimension {ambient.d - 1 - vertical.k}"
        )
    if ambient.elements.shape[1:] != mu.values.shape:
        raise DimensionMismatch("ambient basis and mean use different discretizations")
    mu_vals = mu.values
    mu_sq = inner(mu_vals, mu_vals)
    unit_mu = mu_vals / np.sqrt(mu_sq)
    w = trapezoid_weights(mu.m)
    projected = [_project_out(b, mu_vals, mu_sq) for b in ambient.elements]
    against = [unit_mu, *vertical.elements]
    accepted, _ = _gram_schmidt(projected, against, w, limit=K)
    if len(accepted) < K:
        raise InsufficientRank(f"only {len(accepted)} horizontal directions survive; K = {K}")
    return TangentBasis(mu, np.array(accepted))


def build_tangent_basis(mu, H=10, K=20, L=10):
    ambient = ambient_fourier_basis(mu.dim, H, mu.m)
    vertical = vertical_basis(mu, L)
    return horizontal_basis(mu, ambient, vertical, K)


def _check_basepoint(basis, v, index=None):
    base = getattr(v, "basepoint", None)
    if base is not None and base is not basis.mu and not np.array_equal(base.values, basis.mu.values):
        where = "" if index is None else f" (observation {index})"
        raise BasepointMismatch(f"tangent vector is not based at the basis mean{where}", index=index)


def project_coefficients(basis, v):
    """Coefficients <v, g_i> of a tangent vector in the basis."""
    _check_basepoint(basis, v)
    vals = v.values if hasattr(v, "values") else np.asarray(v)
    return np.einsum("krn,rn,r->k", basis.elements, vals, basis.weights)


def reconstruct(basis, coefficients):
    c = np.asarray(coefficients, dtype=float)
    if c.shape != (basis.K,):
        raise DimensionMismatch(f"expected {basis.K} coefficients, got {c.shape}")
    return TangentVector(np.einsum("k,krn->rn", c, basis.elements), basis.mu)


def build_data_matrix(basis, tangents, labels=None):
    """K x N matrix whose column j holds the coefficients of tangent j."""
    tangents = list(tangents)
    for j, v in enumerate(tangents):
        _check_basepoint(basis, v, j)
    if labels is not None:
        labels = tuple(labels)
        if len(labels) != len(tangents):
            raise DimensionMismatch("one label per tangent vector is required")
    if not tangents:
        return DataMatrix(np.zeros((basis.K, 0)), labels)
    stack = np.stack([v.values for v in tangents])
    entries = np.einsum("krn,jrn,r->kj", basis.elements, stack, basis.weights)
    return DataMatrix(entries, labels)


def basis_gram(basis):
    return gram(basis.elements)
