"""Repeated stratified k-fold cross-validation and Table-style reports."""
import csv
import hashlib
import io
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from sklearn.model_selection import RepeatedStratifiedKFold

from .curve import preprocess
from .errors import TooFewPerClass
from .pipeline import PipelineSettings, fit_srvfs, predict_srvfs

CSV_COLUMNS = ("example", "classifier", "N", "training_accuracy", "testing_accuracy", "cv_error", "seed")


@dataclass
class CvReport:
    folds: int
    repeats: int
    seed: int
    per_fold_accuracy: list
    training_error: float
    confusion: dict
    n: int = 0
    classifier: str = "qda"
    fold_mu_digests: list = field(default_factory=list)
    global_mu_digest: str = ""

    @property
    def mean_accuracy(self):
        return float(np.mean(self.per_fold_accuracy))

    @property
    def mean_cv_error(self):
        return 1.0 - self.mean_accuracy

    @property
    def training_accuracy(self):
        return 1.0 - self.training_error


def mu_digest(mu):
    return hashlib.sha256(np.ascontiguousarray(mu.values).tobytes()).hexdigest()[:16]


def _run_fold(qs, labels, train, test, settings):
    fit = fit_srvfs([qs[i] for i in train], [labels[i] for i in train], settings)
    preds = predict_srvfs(fit.model, [qs[i] for i in test])
    truth = [labels[i] for i in test]
    acc = float(np.mean([p == y for p, y in zip(preds, truth)]))
    return acc, list(zip(truth, preds)), mu_digest(fit.model.mu)


def fold_splits(labels, k=10, repeats=10, seed=0):
    """Stratified (train, test) index pairs, ``k`` per repeat, repeat-major."""
    labels = list(labels)
    counts = Counter(labels)
    if min(counts.values()) < k:
        raise TooFewPerClass(
            f"{k} folds need at least {k} curves per class; smallest class has {min(counts.values())}"
        )
    splitter = RepeatedStratifiedKFold(n_splits=k, n_repeats=repeats, random_state=seed)
    return list(splitter.split(np.zeros(len(labels)), labels))


def kfold_cv(curves, labels, settings=PipelineSettings(), k=10, repeats=10, seed=0, n_jobs=1, srvfs=None):
    """Repeated stratified k-fold CV; the mean, basis and classifier are refit per fold.

    ``srvfs`` may carry already-preprocessed curves (preprocessing is
    per-curve, so sharing it across folds leaks nothing).
    """
    labels = list(labels)
    splits = fold_splits(labels, k, repeats, seed)
    qs = srvfs if srvfs is not None else [preprocess(c, settings.m) for c in curves]
    results = Parallel(n_jobs=n_jobs)(
        delayed(_run_fold)(qs, labels, train, test, settings) for train, test in splits
    )
    confusion = {}
    for _, pairs, _ in results:
        for truth, pred in pairs:
            row = confusion.setdefault(str(truth), {})
            row[str(pred)] = row.get(str(pred), 0) + 1
    full = fit_srvfs(qs, labels, settings)
    return CvReport(
        folds=k,
        repeats=repeats,
        seed=seed,
        per_fold_accuracy=[acc for acc, _, _ in results],
        training_error=1.0 - full.training_accuracy,
        confusion=confusion,
        n=len(labels),
        classifier=settings.classifier,
        fold_mu_digests=[d for _, _, d in results],
        global_mu_digest=mu_digest(full.model.mu),
    )


@dataclass(frozen=True)
class ExperimentRow:
    example: str
    classifier: str
    N: int
    training_accuracy: float
    testing_accuracy: float
    cv_error: float
    seed: int

    @classmethod
    def from_report(cls, example, rep):
        return cls(example, rep.classifier, rep.n, rep.training_accuracy, rep.mean_accuracy, rep.mean_cv_error, rep.seed)


def report(rows):
    """CSV text and an aligned plain-text table for a list of experiments."""
    rows = list(rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(
            [r.example, r.classifier, r.N, f"{r.training_accuracy:.6f}", f"{r.testing_accuracy:.6f}",
             f"{r.cv_error:.6f}", r.seed]
        )
    header = ("Example", "Classifier", "N (size)", "Training Accuracy", "Testing Accuracy")
    body = [
        (r.example, r.classifier, str(r.N), f"{100 * r.training_accuracy:.2f}%", f"{100 * r.testing_accuracy:.2f}%")
        for r in rows
    ]
    widths = [max(len(x) for x in col) for col in zip(header, *body)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() for line in (header, *body)]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return buf.getvalue(), "\n".join(lines) + "\n"
