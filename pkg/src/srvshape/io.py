"""Dataset manifests, curve CSVs and model documents.

Model documents are canonical JSON: sorted keys, floats written with 17
significant digits, so ``dumps(loads(text)) == text`` byte for byte.
"""
import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import TangentBasis
from .curve import Curve, Srvf
from .discriminant import ClassModel, Classifier
from .errors import DataError, DimensionMismatch, VersionMismatch
from .pipeline import PipelineSettings, ShapeModel

DATASET_FORMAT = "srvshape-dataset"
MODEL_FORMAT = "srvshape-model"
FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"


def format_float(x):
    x = float(x)
    if not math.isfinite(x):
        raise DataError(f"cannot serialize non-finite value {x}")
    text = format(x, ".17g")
    if "." not in text and "e" not in text:
        text += ".0"
    return text


def canonical_dumps(obj):
    """Deterministic JSON text (sorted keys, 17-digit floats, one-space separators)."""
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {canonical_dumps(v)}" for k, v in sorted(obj.items()))
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(canonical_dumps(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return canonical_dumps(obj.tolist())
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_text_atomic(path, text):
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- curves and datasets ---------------------------------------------------

AXES = ("x", "y", "z")


def curve_csv(points):
    points = np.asarray(points)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(AXES[: points.shape[1]])
    for row in points:
        writer.writerow([format_float(v) for v in row])
    return buf.getvalue()


def read_curve_csv(path):
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from exc
    if not rows or tuple(c.strip() for c in rows[0]) not in (AXES[:2], AXES):
        raise DataError(f"{path}: expected a header x,y[,z]")
    try:
        pts = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
    if pts.ndim != 2 or pts.shape[1] != len(rows[0]):
        raise DataError(f"{path}: ragged rows")
    return pts


@dataclass(frozen=True, eq=False)
class CurveRecord:
    id: str
    label: object
    curve: Curve


def _manifest_path(path):
    path = Path(path)
    return path / MANIFEST_NAME if path.is_dir() else path


def load_dataset(path):
    """Read a manifest (or a directory holding ``manifest.json``)."""
    manifest = _manifest_path(path)
    try:
        doc = json.loads(manifest.read_text())
    except OSError as exc:
        raise DataError(f"{manifest}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{manifest}: invalid JSON ({exc})") from exc
    if doc.get("format") != DATASET_FORMAT:
        raise DataError(f"{manifest}: not a {DATASET_FORMAT} manifest")
    if doc.get("version") != FORMAT_VERSION:
        raise VersionMismatch(f"{manifest}: unsupported dataset version {doc.get('version')!r}")
    root = manifest.parent
    records = []
    dims = set()
    for entry in doc.get("curves", []):
        if "points" in entry:
            pts = np.asarray(entry["points"], dtype=float)
        elif "path" in entry:
            pts = read_curve_csv(root / entry["path"])
        else:
            raise DataError(f"{manifest}: curve {entry.get('id')!r} has neither points nor path")
        dim = entry.get("dim", pts.shape[1] if pts.ndim == 2 else None)
        if pts.ndim != 2 or pts.shape[1] != dim:
            raise DimensionMismatch(f"{manifest}: curve {entry.get('id')!r} is not {dim}-dimensional")
        dims.add(dim)
        records.append(CurveRecord(str(entry["id"]), entry.get("label"), Curve(pts)))
    if len(dims) > 1:
        raise DimensionMismatch(f"{manifest}: mixed curve dimensions {sorted(dims)}")
    if "dim" in doc and dims and dims != {doc["dim"]}:
        raise DimensionMismatch(f"{manifest}: header dim {doc['dim']} disagrees with curves")
    return records


def save_dataset(records, out_dir, inline=False):
    """Write per-curve CSVs under ``curves/`` plus the manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    entries = []
    dims = set()
    for rec in records:
        dims.add(rec.curve.dim)
        entry = {"id": rec.id, "label": rec.label, "dim": rec.curve.dim}
        if inline:
            entry["points"] = rec.curve.points
        else:
            rel = f"curves/{rec.id}.csv"
            write_text_atomic(out_dir / rel, curve_csv(rec.curve.points))
            entry["path"] = rel
        entries.append(entry)
    doc = {"format": DATASET_FORMAT, "version": FORMAT_VERSION, "curves": entries}
    if len(dims) == 1:
        doc["dim"] = dims.pop()
    manifest = out_dir / MANIFEST_NAME
    write_text_atomic(manifest, canonical_dumps(doc) + "\n")
    return manifest


# -- models ----------------------------------------------------------------

def model_to_dict(model):
    clf = model.classifier
    return {
        "format": MODEL_FORMAT,
        "version": FORMAT_VERSION,
        "settings": model.settings.to_dict(),
        "dim": model.mu.dim,
        "K": model.basis.K,
        "mu": model.mu.values,
        "basis": model.basis.elements,
        "classifier": {
            "kind": clf.kind,
            "classes": [
                {"label": c.label, "mean": c.mean, "covariance": c.covariance, "prior": c.prior}
                for c in clf.classes
            ],
        },
    }


def model_from_dict(doc):
    if doc.get("format") != MODEL_FORMAT:
        raise DataError("not a srvshape model document")
    if doc.get("version") != FORMAT_VERSION:
        raise VersionMismatch(f"model version {doc.get('version')!r}; this build reads {FORMAT_VERSION}")
    settings = PipelineSettings.from_dict(doc["settings"])
    mu = Srvf(np.asarray(doc["mu"], dtype=float), normalized=True)
    basis = TangentBasis(mu, np.asarray(doc["basis"], dtype=float))
    kind = doc["classifier"]["kind"]
    entries = doc["classifier"]["classes"]
    if kind == "lda":
        shared = ClassModel.from_moments(None, np.zeros(basis.K), entries[0]["covariance"], 1.0)
        classes = tuple(
            ClassModel(e["label"], np.asarray(e["mean"], dtype=float), shared.covariance,
                       float(e["prior"]), shared.log_det, shared.precision)
            for e in entries
        )
        clf = Classifier("lda", classes, pooled_covariance=shared.covariance)
    else:
        classes = tuple(ClassModel.from_moments(e["label"], e["mean"], e["covariance"], e["prior"]) for e in entries)
        clf = Classifier(kind, classes)
    return ShapeModel(settings, mu, basis, clf)


def dumps_model(model):
    return canonical_dumps(model_to_dict(model)) + "\n"


def loads_model(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid model JSON ({exc})") from exc
    return model_from_dict(doc)


def save_model(model, path):
    write_text_atomic(path, dumps_model(model))


def load_model(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from exc
    return loads_model(text)
