"""Figures: SVG population/mean overlays and matplotlib report plots.

The SVG writer is dependency-free so the population figures are byte-stable.
Report figures (CV accuracies, decision-boundary contours) go through
matplotlib's Agg backend.
"""
import xml.etree.ElementTree as ET

import numpy as np

WIDTH, HEIGHT, PAD = 480, 360, 20
CURVE_STYLE = {"fill": "none", "stroke": "#8c8c8c", "stroke-width": "1", "stroke-opacity": "0.6"}
MEAN_STYLE = {"fill": "none", "stroke": "#d62728", "stroke-width": "3"}


def _fmt(v):
    return f"{v:.3f}"


def population_svg(curves, mean, title=""):
    """SVG text with one ``<polyline>`` per curve and a highlighted ``<path id="mean">``.

    ``curves`` and ``mean`` are point arrays of shape (m+1, n); only the
    first two coordinates are drawn.
    """
    planar = [np.asarray(c)[:, :2] for c in curves]
    mean = np.asarray(mean)[:, :2]
    allpts = np.vstack([mean, *planar]) if planar else mean
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    scale = min((WIDTH - 2 * PAD) / span[0], (HEIGHT - 2 * PAD) / span[1])

    def project(pts):
        x = PAD + (pts[:, 0] - lo[0]) * scale
        y = HEIGHT - PAD - (pts[:, 1] - lo[1]) * scale
        return x, y

    svg = ET.Element(
        "svg",
        {"xmlns": "http://www.w3.org/2000/svg", "width": str(WIDTH), "height": str(HEIGHT),
         "viewBox": f"0 0 {WIDTH} {HEIGHT}"},
    )
    if title:
        ET.SubElement(svg, "title").text = title
    group = ET.SubElement(svg, "g", {"id": "population"})
    for pts in planar:
        x, y = project(pts)
        ET.SubElement(group, "polyline", {"points": " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(x, y)), **CURVE_STYLE})
    x, y = project(mean)
    d = "M " + " L ".join(f"{_fmt(a)} {_fmt(b)}" for a, b in zip(x, y))
    ET.SubElement(svg, "path", {"id": "mean", "d": d, **MEAN_STYLE})
    return ET.tostring(svg, encoding="unicode") + "\n"


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_cv_report(rep, path, title=""):
    """Per-fold accuracies, one marker per fold, coloured by repeat."""
    plt = _pyplot()
    acc = np.asarray(rep.per_fold_accuracy).reshape(rep.repeats, rep.folds)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for r, row in enumerate(acc):
        ax.plot(np.arange(1, rep.folds + 1), row, "o-", ms=3, lw=0.8, alpha=0.7, label=f"repeat {r + 1}")
    ax.axhline(rep.mean_accuracy, color="k", ls="--", lw=1, label=f"mean {rep.mean_accuracy:.3f}")
    ax.set_xlabel("fold")
    ax.set_ylabel("test accuracy")
    ax.set_ylim(min(0.0, acc.min() - 0.05), 1.02)
    ax.set_title(title or f"{rep.classifier.upper()}, {rep.folds}-fold x {rep.repeats}")
    if rep.repeats <= 10:
        ax.legend(fontsize=6, ncol=2, loc="lower left")
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None} if str(path).endswith(".png") else None)
    plt.close(fig)


def plot_boundary(xs, ys, residual, path, points=None, labels=None, axes=("c1", "c2"), title=""):
    """Zero contour of a discriminant residual over a 2D coefficient grid."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4.5))
    # far-field residuals grow quadratically; clip so the zero contour stays readable
    lim = float(np.percentile(np.abs(residual), 50)) or 1.0
    cf = ax.contourf(xs, ys, np.clip(residual, -lim, lim), levels=np.linspace(-lim, lim, 21), cmap="RdBu_r")
    fig.colorbar(cf, ax=ax, label="residual")
    if np.min(residual) < 0 < np.max(residual):
        ax.contour(xs, ys, residual, levels=[0.0], colors="k", linewidths=1.5)
    if points is not None:
        points = np.asarray(points)
        for lab in sorted(set(labels), key=str):
            sel = np.array([l == lab for l in labels])
            ax.scatter(points[sel, 0], points[sel, 1], s=10, label=str(lab), edgecolors="k", linewidths=0.3)
        ax.legend(fontsize=8)
    ax.set_xlabel(axes[0])
    ax.set_ylabel(axes[1])
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None} if str(path).endswith(".png") else None)
    plt.close(fig)
