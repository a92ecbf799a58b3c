"""Karcher mean of SRVFs under joint rotation/reparametrization alignment."""
import logging
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .alignment import align, optimal_rotation
from .errors import AntipodalPoints, DimensionMismatch, EmptyInput, NoConvergence
from .sphere import TangentVector, exp_map, geodesic_distance, gram, log_map, tangent_norm

log = logging.getLogger(__name__)

MAX_BACKTRACK = 30


@dataclass(frozen=True)
class KarcherConfig:
    tol: float = 1e-6
    max_iter: int = 50
    step: float = 0.5
    rotation: bool = True
    reparam: bool = True
    grid: int | None = None
    align_iters: int = 2
    n_jobs: int = 1

    def align_opts(self):
        return dict(iters=self.align_iters, rotation=self.rotation, reparam=self.reparam, grid=self.grid)


@dataclass
class MeanResult:
    mu: object
    tangents: list
    aligned: list
    objective_trace: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def medoid_index(qs):
    """Input with the smallest sum of squared sphere distances to the others."""
    stack = np.stack([q.values for q in qs])
    cosines = np.clip(gram(stack) / (2.0 * np.pi), -1.0, 1.0)
    cost = np.sum(np.arccos(cosines) ** 2, axis=1)
    return int(np.argmin(cost))


def _realign(mu, q, previous, opts):
    # the previously aligned copy (re-rotated) guards against DP regressions
    cand = align(mu, q, **opts)
    d = geodesic_distance(mu, cand)
    if previous is not None:
        if opts["rotation"]:
            _, previous = optimal_rotation(mu, previous)
        if geodesic_distance(mu, previous) < d:
            return previous
    return cand


def _lift(mu, aligned):
    out = []
    for i, a in enumerate(aligned):
        try:
            out.append(log_map(mu, a))
        except AntipodalPoints as exc:
            raise AntipodalPoints(f"observation {i}: {exc}", index=i) from exc
    return out


def _mean_tangent(mu, tangents):
    total = np.zeros_like(mu.values)
    for v in tangents:
        total += v.values
    return TangentVector(total / len(tangents), mu)


def _frechet(mu, aligned):
    return float(sum(geodesic_distance(mu, a) ** 2 for a in aligned))


def karcher_mean(qs, config=KarcherConfig()):
    """Iterative Karcher mean of normalized SRVFs.

    Each sweep aligns every observation to the current estimate, lifts it
    with the log map and moves the estimate along the averaged tangent.
    The step is halved while it would increase the objective, so the trace
    is nonincreasing. Raises :class:`NoConvergence` (carrying the partial
    result) when ``max_iter`` sweeps do not bring the mean tangent below
    ``tol``.
    """
    qs = list(qs)
    if not qs:
        raise EmptyInput("Karcher mean of an empty set")
    shape = qs[0].values.shape
    if any(q.values.shape != shape for q in qs):
        raise DimensionMismatch("all SRVFs must share a discretization")

    opts = config.align_opts()
    pool = Parallel(n_jobs=config.n_jobs, prefer="threads") if config.n_jobs != 1 else None

    def align_all(mu, previous):
        if pool is None:
            return [_realign(mu, q, p, opts) for q, p in zip(qs, previous)]
        return pool(delayed(_realign)(mu, q, p, opts) for q, p in zip(qs, previous))

    mu = qs[medoid_index(qs)]
    aligned = align_all(mu, [None] * len(qs))
    result = MeanResult(mu=mu, tangents=[], aligned=aligned)
    for it in range(1, config.max_iter + 1):
        tangents = _lift(mu, aligned)
        objective = float(sum(v.norm**2 for v in tangents))
        result.mu, result.tangents, result.aligned = mu, tangents, aligned
        result.objective_trace.append(objective)
        result.iterations = it
        vbar = _mean_tangent(mu, tangents)
        if tangent_norm(vbar) < config.tol:
            result.converged = True
            return result

        step = config.step
        for _ in range(MAX_BACKTRACK):
            cand = exp_map(mu, TangentVector(step * vbar.values, mu))
            if _frechet(cand, aligned) <= objective:
                break
            step *= 0.5
        else:
            log.debug("no descent step found at iteration %d", it)
            result.converged = True
            return result
        mu = cand
        aligned = align_all(mu, aligned)

    raise NoConvergence(
        f"Karcher mean did not converge in {config.max_iter} iterations "
        f"(|mean tangent| = {tangent_norm(vbar):.3g})",
        result=result,
    )


def lift_to_tangent(mu, qs, config=KarcherConfig()):
    """Align each SRVF to ``mu`` and map it into the tangent space at ``mu``."""
    opts = config.align_opts()
    return _lift(mu, [align(mu, q, **opts) for q in qs])
