"""Gaussian discriminant analysis (QDA / LDA) on basis coefficients."""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import DataError, SingletonClass, SingularCovariance, UnknownLabel

TIE_TOL = 1e-12
RIDGE_SCALE = 1e-6


@dataclass(frozen=True, eq=False)
class ClassModel:
    label: object
    mean: np.ndarray
    covariance: np.ndarray
    prior: float
    log_det: float
    precision: np.ndarray

    @classmethod
    def from_moments(cls, label, mean, covariance, prior):
        covariance = np.asarray(covariance, dtype=float)
        try:
            factor = cho_factor(covariance, lower=True)
        except LinAlgError as exc:
            raise SingularCovariance(f"class {label!r}: covariance is not positive definite") from exc
        log_det = 2.0 * float(np.sum(np.log(np.diag(factor[0]))))
        precision = cho_solve(factor, np.eye(covariance.shape[0]))
        precision = 0.5 * (precision + precision.T)
        return cls(label, np.asarray(mean, dtype=float), covariance, float(prior), log_det, precision)


@dataclass(frozen=True, eq=False)
class Classifier:
    kind: str
    classes: tuple
    pooled_covariance: np.ndarray | None = None

    @property
    def labels(self):
        return [c.label for c in self.classes]

    def model(self, label):
        for c in self.classes:
            if c.label == label:
                return c
        raise UnknownLabel(f"no class labelled {label!r}")


def sample_covariance(X):
    """Unbiased covariance of the columns of a K x N matrix."""
    centered = X - X.mean(axis=1, keepdims=True)
    return centered @ centered.T / (X.shape[1] - 1)


def default_ridge(cov):
    return RIDGE_SCALE * float(np.trace(cov)) / cov.shape[0]


def _regularize(cov, ridge):
    r = default_ridge(cov) if ridge is None else float(ridge)
    out = cov + r * np.eye(cov.shape[0])
    out = 0.5 * (out + out.T)
    if np.linalg.eigvalsh(out)[0] <= 0.0:
        raise SingularCovariance(f"covariance is singular after adding ridge {r:.3g}")
    return out


def _label_key(label):
    return (str(type(label).__name__), str(label))


def fit(data, kind="qda", ridge=None):
    """Per-class means, (regularized) covariances and priors from a DataMatrix.

    ``ridge`` is added to every covariance diagonal; ``None`` means
    1e-6 * trace(cov) / K.
    """
    kind = kind.lower()
    if kind not in ("qda", "lda"):
        raise DataError(f"unknown classifier kind {kind!r}")
    if data.labels is None:
        raise DataError("data matrix has no labels")
    X = np.asarray(data.entries, dtype=float)
    labels = np.array(data.labels, dtype=object)
    classes = sorted(set(data.labels), key=_label_key)
    if len(classes) < 2:
        raise DataError("at least two classes are required")
    N = X.shape[1]
    groups = {}
    for c in classes:
        Xc = X[:, labels == c]
        if Xc.shape[1] < 2:
            raise SingletonClass(f"class {c!r} has {Xc.shape[1]} observation(s); need >= 2")
        groups[c] = Xc

    if kind == "qda":
        models = tuple(
            ClassModel.from_moments(
                c, Xc.mean(axis=1), _regularize(sample_covariance(Xc), ridge), Xc.shape[1] / N
            )
            for c, Xc in groups.items()
        )
        return Classifier("qda", models)

    pooled = sum((Xc.shape[1] - 1) * sample_covariance(Xc) for Xc in groups.values())
    pooled = _regularize(pooled / (N - len(classes)), ridge)
    shared = ClassModel.from_moments(None, np.zeros(X.shape[0]), pooled, 1.0)
    models = tuple(
        ClassModel(c, Xc.mean(axis=1), shared.covariance, Xc.shape[1] / N, shared.log_det, shared.precision)
        for c, Xc in groups.items()
    )
    return Classifier("lda", models, pooled_covariance=shared.covariance)


def discriminant(model, x):
    """-0.5 ln det S - 0.5 (x - m)' S^-1 (x - m) + ln prior, for one or many rows of x."""
    x = np.asarray(x, dtype=float)
    d = x - model.mean
    maha = np.einsum("...i,ij,...j->...", d, model.precision, d)
    out = -0.5 * model.log_det - 0.5 * maha + np.log(model.prior)
    return float(out) if out.ndim == 0 else out


def scores(clf, X):
    """Discriminant values, one column per class (in ``clf.labels`` order)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return np.column_stack([discriminant(c, X) for c in clf.classes])


def _pick(labels, row):
    best = np.max(row)
    tied = [lab for lab, s in zip(labels, row) if s >= best - TIE_TOL]
    return min(tied, key=_label_key)


def classify(clf, x):
    """Label with the largest discriminant (ties to the smallest label) and all scores."""
    row = scores(clf, x)[0]
    return _pick(clf.labels, row), dict(zip(clf.labels, row.tolist()))


def predict(clf, X):
    """Labels for the rows of an (N, K) array."""
    S = scores(clf, X)
    return [_pick(clf.labels, row) for row in S]


def decision_boundary_residual(clf, x, a, b):
    """delta_a(x) - delta_b(x); zero on the decision boundary between a and b."""
    return discriminant(clf.model(a), x) - discriminant(clf.model(b), x)
