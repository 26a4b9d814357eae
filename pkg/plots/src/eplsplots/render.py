"""Render benchmark CSV files to static figures.

Three figure kinds, one per CSV family:

CoordinateEnvelope
    panel CSV ``j,beta_true,beta_true_unit,mean,q05,q95``: the replication
    mean of each direction coordinate with the 5-95% envelope filled
    between the q05 and q95 columns, plotted against j/p. The reference
    direction is drawn twice — raw and unit-normalized — because the two
    live on visibly different scales. Several input CSVs render as a grid
    of panels in one figure.
MeanRank
    mean-rank CSV ``alpha,method,mean_rank``: one line per method against
    the tail level, y axis fixed to [1, 6].
TailCovBand
    curve CSV ``dataset,k,method,tailcov,band_min,band_max``: one line per
    method against the threshold index k, with the random-direction
    variability range filled behind.

Rendering is a pure function of the CSV bytes and the spec: output
metadata carries no timestamps, so repeated runs write identical files.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")
# SVG element ids are salted with a uuid by default; pin them
matplotlib.rcParams["svg.hashsalt"] = "eplsplots"

import matplotlib.pyplot as plt
import numpy as np

from .figspec import FigureSpec, SpecError

ENVELOPE_COLUMNS = ("j", "beta_true", "beta_true_unit", "mean", "q05", "q95")
MEANRANK_COLUMNS = ("alpha", "method", "mean_rank")
CURVE_COLUMNS = ("dataset", "k", "method", "tailcov", "band_min", "band_max")

ENVELOPE_BAND_LABEL = "5-95% envelope"
RANDOM_BAND_LABEL = "random direction range"


class SchemaError(ValueError):
    """An input CSV that does not match the documented schema."""

    def __init__(self, path, missing):
        self.path = str(path)
        self.missing = list(missing)
        super().__init__(f"{self.path}: missing required columns: {', '.join(self.missing)}")


def _read_rows(path, required) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        fieldnames = reader.fieldnames or []
        missing = [column for column in required if column not in fieldnames]
        if missing:
            raise SchemaError(path, missing)
        return list(reader)


def _column(rows, name) -> np.ndarray:
    return np.array([float(row[name]) for row in rows])


def _title(base: str, labels: dict) -> str:
    parts = [f"{key}={labels[key]}" for key in sorted(labels)]
    return f"{base} ({', '.join(parts)})" if parts else base


# ---------------------------------------------------------------------------
# the three kinds
# ---------------------------------------------------------------------------

def _draw_envelope(ax, path) -> None:
    rows = _read_rows(path, ENVELOPE_COLUMNS)
    if not rows:
        raise SpecError(f"{path}: empty panel CSV")
    j = _column(rows, "j")
    x = j / j.size
    ax.fill_between(x, _column(rows, "q05"), _column(rows, "q95"),
                    color="lightblue", label=ENVELOPE_BAND_LABEL)
    ax.plot(x, _column(rows, "mean"), color="tab:blue", label="replication mean")
    ax.plot(x, _column(rows, "beta_true"), color="tab:orange",
            linestyle="--", label="reference (raw)")
    ax.plot(x, _column(rows, "beta_true_unit"), color="tab:red",
            linestyle=":", label="reference (unit norm)")
    ax.set_xlabel("j / p")
    ax.set_ylabel("direction coordinate")
    ax.legend(fontsize=7)
    ax.set_title(os.path.splitext(os.path.basename(path))[0], fontsize=8)


def _build_coordinate_envelope(spec: FigureSpec):
    n = len(spec.inputs)
    ncols = min(3, n)
    nrows = -(-n // ncols)
    fig, axes = plt.subplots(nrows, ncols, squeeze=False,
                             figsize=(4.2 * ncols, 3.2 * nrows))
    flat = axes.ravel()
    for ax, path in zip(flat, spec.inputs):
        _draw_envelope(ax, path)
    for ax in flat[n:]:
        ax.set_visible(False)
    fig.suptitle(_title("direction estimate per coordinate", spec.labels), fontsize=10)
    fig.tight_layout()
    return fig


def _build_mean_rank(spec: FigureSpec):
    rows = _read_rows(spec.inputs[0], MEANRANK_COLUMNS)
    if not rows:
        raise SpecError(f"{spec.inputs[0]}: empty mean-rank CSV")
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for method in sorted({row["method"] for row in rows}):
        series = sorted(
            (float(row["alpha"]), float(row["mean_rank"]))
            for row in rows
            if row["method"] == method
        )
        ax.plot([a for a, _ in series], [r for _, r in series],
                marker="o", markersize=3, label=method)
    ax.set_ylim(1.0, 6.0)
    ax.set_xlabel("tail level alpha")
    ax.set_ylabel("mean rank")
    ax.legend(fontsize=7)
    ax.set_title(_title("mean rank by tail level", spec.labels), fontsize=10)
    fig.tight_layout()
    return fig


def _build_tailcov_band(spec: FigureSpec):
    path = spec.inputs[0]
    rows = _read_rows(path, CURVE_COLUMNS)
    if not rows:
        raise SpecError(f"{path}: empty curve CSV")
    datasets = sorted({row["dataset"] for row in rows})
    wanted = spec.labels.get("dataset")
    if wanted is not None:
        if wanted not in datasets:
            raise SpecError(f"{path}: no rows for dataset {wanted!r}; has {', '.join(datasets)}")
        dataset = wanted
    elif len(datasets) == 1:
        dataset = datasets[0]
    else:
        raise SpecError(
            f"{path}: contains several datasets ({', '.join(datasets)}); "
            f"pick one with labels.dataset"
        )
    rows = [row for row in rows if row["dataset"] == dataset]

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    band = sorted(
        (float(row["k"]), float(row["band_min"]), float(row["band_max"]))
        for row in rows
        if row["band_min"] and row["band_max"]
    )
    if band:
        ax.fill_between([k for k, _, _ in band], [lo for _, lo, _ in band],
                        [hi for _, _, hi in band], color="lightgray",
                        label=RANDOM_BAND_LABEL)
    for method in sorted({row["method"] for row in rows}):
        series = sorted(
            (float(row["k"]), float(row["tailcov"]))
            for row in rows
            if row["method"] == method
        )
        ax.plot([k for k, _ in series], [c for _, c in series],
                marker="o", markersize=3, label=method)
    ax.set_xlabel("threshold index k")
    ax.set_ylabel("tail covariance")
    ax.legend(fontsize=7)
    ax.set_title(_title(f"tail covariance vs threshold: {dataset}", spec.labels), fontsize=10)
    fig.tight_layout()
    return fig


_BUILDERS = {
    "CoordinateEnvelope": _build_coordinate_envelope,
    "MeanRank": _build_mean_rank,
    "TailCovBand": _build_tailcov_band,
}


def build_figure(spec: FigureSpec):
    """The figure object for a spec; the caller owns (and must close) it."""
    return _BUILDERS[spec.kind](spec)


def _metadata_for(path) -> dict:
    # suppress the only timestamp fields the writers would embed
    suffix = os.path.splitext(path)[1].lower()
    if suffix == ".svg":
        return {"Date": None}
    if suffix == ".pdf":
        return {"CreationDate": None}
    return {"Software": "eplsplots"}


def render(spec: FigureSpec) -> str:
    """Render one spec to its output path and return that path."""
    fig = build_figure(spec)
    try:
        out_dir = os.path.dirname(os.path.abspath(spec.output))
        os.makedirs(out_dir, exist_ok=True)
        fig.savefig(spec.output, dpi=150, metadata=_metadata_for(spec.output))
    finally:
        plt.close(fig)
    return spec.output
