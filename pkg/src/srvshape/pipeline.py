"""End-to-end training and prediction: curves -> mean -> tangent coefficients -> classifier."""
import logging
from dataclasses import asdict, dataclass

import numpy as np

from . import discriminant as da
from .alignment import align
from .basis import build_data_matrix, build_tangent_basis, project_coefficients
from .curve import preprocess
from .errors import NoConvergence
from .karcher import KarcherConfig, karcher_mean, lift_to_tangent
from .sphere import log_map

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineSettings:
    m: int = 100
    H: int = 10
    K: int = 20
    L: int = 10
    ridge: float | None = None
    classifier: str = "qda"
    rotation: bool = True
    # elastic (DP) alignment is opt-in: it costs ~25x the rotation-only fit
    reparam: bool = False
    grid: int | None = None
    align_iters: int = 2
    karcher_tol: float = 1e-6
    karcher_max_iter: int = 50
    karcher_step: float = 0.5

    def karcher_config(self, n_jobs=1):
        return KarcherConfig(
            tol=self.karcher_tol,
            max_iter=self.karcher_max_iter,
            step=self.karcher_step,
            rotation=self.rotation,
            reparam=self.reparam,
            grid=self.grid,
            align_iters=self.align_iters,
            n_jobs=n_jobs,
        )

    def align_opts(self):
        return self.karcher_config().align_opts()

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass(frozen=True, eq=False)
class ShapeModel:
    """Everything needed to classify a new curve without refitting."""

    settings: PipelineSettings
    mu: object
    basis: object
    classifier: da.Classifier


@dataclass(eq=False)
class FitResult:
    model: ShapeModel
    data: object
    mean: object

    @property
    def training_predictions(self):
        return da.predict(self.model.classifier, self.data.entries.T)

    @property
    def training_accuracy(self):
        preds = self.training_predictions
        return float(np.mean([p == y for p, y in zip(preds, self.data.labels)]))


def mean_of(qs, settings, n_jobs=1):
    """Karcher mean, accepting the partial result if the iteration cap is hit."""
    try:
        return karcher_mean(qs, settings.karcher_config(n_jobs))
    except NoConvergence as exc:
        log.warning("%s; using the last iterate", exc)
        return exc.result


def fit_srvfs(qs, labels, settings=PipelineSettings(), n_jobs=1):
    """Train on preprocessed SRVFs (mean, basis, data matrix, discriminant)."""
    mean = mean_of(qs, settings, n_jobs)
    mu = mean.mu
    basis = build_tangent_basis(mu, H=settings.H, K=settings.K, L=settings.L)
    tangents = lift_to_tangent(mu, qs, settings.karcher_config())
    data = build_data_matrix(basis, tangents, labels)
    clf = da.fit(data, settings.classifier, settings.ridge)
    return FitResult(ShapeModel(settings, mu, basis, clf), data, mean)


def fit_curves(curves, labels, settings=PipelineSettings(), n_jobs=1):
    return fit_srvfs([preprocess(c, settings.m) for c in curves], labels, settings, n_jobs)


def coefficients_of(model, q):
    aligned = align(model.mu, q, **model.settings.align_opts())
    return project_coefficients(model.basis, log_map(model.mu, aligned))


def classify_srvf(model, q):
    return da.classify(model.classifier, coefficients_of(model, q))


def classify_curve(model, curve):
    """Label and per-class scores for a raw curve."""
    return classify_srvf(model, preprocess(curve, model.settings.m))


def predict_srvfs(model, qs):
    if not qs:
        return []
    X = np.array([coefficients_of(model, q) for q in qs])
    return da.predict(model.classifier, X)
