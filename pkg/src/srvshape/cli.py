"""Command-line interface: ``srvshape synth|mean|train|predict|cv|boundary``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""
import csv
import io
import logging
from functools import wraps
from pathlib import Path

import click
import numpy as np

from . import discriminant as da
from .curve import from_srvf, preprocess
from .errors import DataError, DimensionMismatch, NoConvergence, NumericalError, UnknownLabel
from .evaluation import ExperimentRow, kfold_cv, report
from .figures import plot_boundary, plot_cv_report, population_svg
from .io import (
    CurveRecord,
    canonical_dumps,
    curve_csv,
    load_dataset,
    load_model,
    save_dataset,
    save_model,
    write_text_atomic,
)
from .karcher import karcher_mean
from .pipeline import PipelineSettings, coefficients_of, fit_srvfs
from .synthetic import SynthConfig, generate_synthetic

EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 2, 3, 4

log = logging.getLogger("srvshape")


class _Cli(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (DataError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_DATA)
        except NumericalError as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            ctx.exit(EXIT_NUMERICAL)


@click.group(cls=_Cli)
@click.option("-v", "--verbose", count=True, help="Increase logging verbosity.")
def cli(verbose):
    """Elastic shape analysis and discriminant classification of open curves."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def pipeline_options(func):
    @click.option("--m", "m", type=click.IntRange(min=2), default=100, show_default=True, help="Samples per curve minus one.")
    @click.option("--H", "H", type=click.IntRange(min=1), default=10, show_default=True, help="Fourier harmonics.")
    @click.option("--K", "K", type=click.IntRange(min=1), default=20, show_default=True, help="Retained basis size.")
    @click.option("--L", "L", type=click.IntRange(min=0), default=10, show_default=True, help="Warp generators removed.")
    @click.option("--ridge", type=float, default=None, help="Covariance ridge (default 1e-6 * trace / K).")
    @click.option("--classifier", type=click.Choice(["qda", "lda"]), default="qda", show_default=True)
    @click.option("--reparam/--no-reparam", default=False, show_default=True, help="Elastic (DP) reparametrization alignment.")
    @click.option("--rotation/--no-rotation", default=True, show_default=True, help="Rotation alignment.")
    @click.option("--grid", type=int, default=None, help="DP lattice size (default m).")
    @wraps(func)
    def wrapper(*args, m, H, K, L, ridge, classifier, reparam, rotation, grid, **kwargs):
        settings = PipelineSettings(
            m=m, H=H, K=K, L=L, ridge=ridge, classifier=classifier, reparam=reparam, rotation=rotation, grid=grid
        )
        return func(*args, settings=settings, **kwargs)

    return wrapper


def _srvfs(records, m):
    return [preprocess(r.curve, m) for r in records]


@cli.command()
@click.option("--n", "n_per_class", type=click.IntRange(min=1), default=100, show_default=True, help="Curves per class.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--m", "m", type=click.IntRange(min=2), default=100, show_default=True)
@click.option("--width-range", nargs=2, type=float, default=(0.15, 0.45), show_default=True)
@click.option("--power-range", nargs=2, type=float, default=(1.0, 4.0), show_default=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
def synth(n_per_class, seed, m, width_range, power_range, out):
    """Generate the two-bump synthetic dataset."""
    cfg = SynthConfig(n_per_class=n_per_class, m=m, width_range=tuple(width_range), power_range=tuple(power_range), seed=seed)
    records = [CurveRecord(i, lab, c) for i, lab, c in generate_synthetic(cfg)]
    manifest = save_dataset(records, out)
    click.echo(f"wrote {len(records)} curves to {manifest}")


def _write_mean(prefix, label, res, title):
    mu_curve = from_srvf(res.mu)
    write_text_atomic(prefix.with_suffix(".csv"), curve_csv(mu_curve.points))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iteration", "objective"])
    for i, obj in enumerate(res.objective_trace, 1):
        w.writerow([i, repr(obj)])
    write_text_atomic(prefix.with_name(prefix.name + "_trace.csv"), buf.getvalue())
    population = [from_srvf(a).points for a in res.aligned]
    write_text_atomic(prefix.with_suffix(".svg"), population_svg(population, mu_curve.points, title))
    click.echo(f"{label}: {len(res.aligned)} curves, {res.iterations} iterations, objective {res.objective_trace[-1]:.6g}")


@cli.command()
@click.argument("dataset", type=click.Path(exists=True, path_type=Path))
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--per-class", is_flag=True, help="Also compute one mean per class.")
@pipeline_options
def mean(dataset, out, per_class, settings):
    """Karcher mean shape; writes mean CSV, objective trace and SVG overlay."""
    records = load_dataset(dataset)
    if not records:
        raise DataError(f"{dataset}: no curves")
    qs = _srvfs(records, settings.m)
    groups = [("all", "mean", qs)]
    if per_class:
        for lab in sorted({r.label for r in records}, key=str):
            groups.append((lab, f"mean_{lab}", [q for q, r in zip(qs, records) if r.label == lab]))
    for label, stem, group in groups:
        try:
            res = karcher_mean(group, settings.karcher_config())
        except NoConvergence as exc:
            log.warning("%s", exc)
            res = exc.result
        title = "mean shape of the population" if label == "all" else f"mean shape of class {label}"
        _write_mean(out / stem, label, res, title)


@cli.command()
@click.argument("dataset", type=click.Path(exists=True, path_type=Path))
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True, help="Model file to write.")
@pipeline_options
def train(dataset, out, settings):
    """Fit mean, tangent basis and discriminant; write a model file."""
    records = load_dataset(dataset)
    fit = fit_srvfs(_srvfs(records, settings.m), [r.label for r in records], settings)
    save_model(fit.model, out)
    click.echo(f"training accuracy: {fit.training_accuracy:.6f}")
    click.echo(f"wrote {out}")


@cli.command()
@click.argument("model_path", metavar="MODEL", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("dataset", type=click.Path(exists=True, path_type=Path))
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None, help="CSV path (default stdout).")
def predict(model_path, dataset, out):
    """Classify every curve of a dataset with a saved model."""
    model = load_model(model_path)
    records = load_dataset(dataset)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "label", "score"])
    for rec in records:
        if rec.curve.dim != model.mu.dim:
            raise DimensionMismatch(f"curve {rec.id} is {rec.curve.dim}-D; model expects {model.mu.dim}-D")
        label, scores = da.classify(model.classifier, coefficients_of(model, preprocess(rec.curve, model.settings.m)))
        w.writerow([rec.id, label, repr(scores[label])])
    if out is None:
        click.echo(buf.getvalue(), nl=False)
    else:
        write_text_atomic(out, buf.getvalue())


@cli.command()
@click.argument("dataset", type=click.Path(exists=True, path_type=Path))
@click.option("--folds", type=click.IntRange(min=2), default=10, show_default=True)
@click.option("--repeats", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--example", default=None, help="Row name in the report (default: dataset directory name).")
@click.option("--n-jobs", type=int, default=1, show_default=True, help="Parallel folds.")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None, help="Report directory.")
@pipeline_options
def cv(dataset, folds, repeats, seed, example, n_jobs, out, settings):
    """Repeated stratified k-fold cross-validation with a summary report."""
    records = load_dataset(dataset)
    labels = [r.label for r in records]
    qs = _srvfs(records, settings.m)
    rep = kfold_cv(None, labels, settings, k=folds, repeats=repeats, seed=seed, n_jobs=n_jobs, srvfs=qs)
    name = example or (dataset if dataset.is_dir() else dataset.parent).resolve().name
    csv_text, table = report([ExperimentRow.from_report(name, rep)])
    click.echo(table, nl=False)
    click.echo(f"mean cv accuracy {rep.mean_accuracy:.4f} (error {rep.mean_cv_error:.4f})")
    if out is not None:
        write_text_atomic(out / "report.csv", csv_text)
        details = {
            "folds": rep.folds,
            "repeats": rep.repeats,
            "seed": rep.seed,
            "per_fold_accuracy": rep.per_fold_accuracy,
            "mean_cv_error": rep.mean_cv_error,
            "training_error": rep.training_error,
            "confusion": rep.confusion,
            "settings": settings.to_dict(),
        }
        write_text_atomic(out / "cv.json", canonical_dumps(details) + "\n")
        plot_cv_report(rep, out / "cv.png", title=f"{name}: {rep.classifier.upper()}")


@cli.command()
@click.argument("model_path", metavar="MODEL", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--dataset", type=click.Path(exists=True, path_type=Path), default=None, help="Curves to overlay and to size the grid.")
@click.option("--axes", "axes", nargs=2, type=int, default=(0, 1), show_default=True, help="Coefficient indices spanning the plane.")
@click.option("--labels", "pair", nargs=2, type=str, default=None, help="Class pair (default: first two).")
@click.option("--resolution", type=click.IntRange(min=2), default=101, show_default=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
def boundary(model_path, dataset, axes, pair, resolution, out):
    """Export the 2D decision-boundary residual delta_a - delta_b on a coefficient plane."""
    model = load_model(model_path)
    clf = model.classifier
    i, j = axes
    if not (0 <= i < model.basis.K and 0 <= j < model.basis.K) or i == j:
        raise click.BadParameter(f"axes must be two distinct indices below K = {model.basis.K}", param_hint="--axes")
    if pair is None:
        a, b = clf.labels[:2]
    else:
        lookup = {str(lab): lab for lab in clf.labels}
        missing = [p for p in pair if p not in lookup]
        if missing:
            raise UnknownLabel(f"unknown label(s) {missing}; model has {list(lookup)}")
        a, b = (lookup[p] for p in pair)
    ma, mb = clf.model(a).mean, clf.model(b).mean
    base = 0.5 * (ma + mb)

    points = plabels = None
    if dataset is not None:
        records = load_dataset(dataset)
        X = np.array([coefficients_of(model, preprocess(r.curve, model.settings.m)) for r in records])
        points, plabels = X[:, [i, j]], [r.label for r in records]
        lo, hi = points.min(axis=0), points.max(axis=0)
    else:
        sd = np.sqrt(np.array([max(clf.model(a).covariance[k, k], clf.model(b).covariance[k, k]) for k in (i, j)]))
        lo = np.minimum(ma[[i, j]], mb[[i, j]]) - 3 * sd
        hi = np.maximum(ma[[i, j]], mb[[i, j]]) + 3 * sd
    margin = 0.1 * np.where(hi > lo, hi - lo, 1.0)
    xs = np.linspace(lo[0] - margin[0], hi[0] + margin[0], resolution)
    ys = np.linspace(lo[1] - margin[1], hi[1] + margin[1], resolution)
    gx, gy = np.meshgrid(xs, ys)
    probes = np.tile(base, (gx.size, 1))
    probes[:, i], probes[:, j] = gx.ravel(), gy.ravel()
    residual = (da.discriminant(clf.model(a), probes) - da.discriminant(clf.model(b), probes)).reshape(gx.shape)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"c{i}", f"c{j}", "residual"])
    for x, y, r in zip(gx.ravel(), gy.ravel(), residual.ravel()):
        w.writerow([repr(float(x)), repr(float(y)), repr(float(r))])
    write_text_atomic(out / "boundary.csv", buf.getvalue())
    plot_boundary(xs, ys, residual, out / "boundary.png", points, plabels, axes=(f"c{i}", f"c{j}"),
                  title=f"{clf.kind.upper()} boundary {a} vs {b}")
    click.echo(f"wrote {out / 'boundary.csv'}")


def main(argv=None):
    return cli.main(args=argv, prog_name="srvshape")


if __name__ == "__main__":
    main()
