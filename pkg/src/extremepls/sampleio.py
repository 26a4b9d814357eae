"""File interfaces: CSV/JSON schemas shared by the CLI, the tests and any
downstream consumer (the plotting package reads only these files).

Schemas
-------
sample CSV      header ``i,y,x_1..x_p`` plus optional ``lambda_1..lambda_p``;
                one row per observation, 1-based index, floats printed with
                17 significant digits so they round-trip bit-exactly.
direction JSON  the fitted direction with its threshold bookkeeping.
panel CSV       header ``j,beta_true,beta_true_unit,mean,q05,q95``; one row
                per coordinate of an aggregated replication panel.
ranks CSV       header ``dataset,alpha,method,tailcov,rank`` (long form).
mean-rank CSV   header ``alpha,method,mean_rank``.
band CSV        header ``dataset,alpha,band_min,band_max`` (random-direction
                envelope).
run manifest    ``run_manifest.json``: command line, config, a stable
                sha256 of the config, timestamps. Exactly one manifest per
                output directory; timestamps are the only fields exempt
                from byte-for-byte reproducibility.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import os
from datetime import datetime, timezone

import numpy as np

from .errors import DataError
from .estimator import Direction
from .generators import SampleSet

MANIFEST_NAME = "run_manifest.json"


def _fmt(value: float) -> str:
    return f"{float(value):.17g}"


# ---------------------------------------------------------------------------
# sample CSV
# ---------------------------------------------------------------------------

def write_sample_csv(path, sample: SampleSet, lam=None) -> None:
    """Write ``i,y,x_1..x_p[,lambda_1..lambda_p]`` rows, 1-based index."""
    y = np.asarray(sample.y, dtype=float)
    x = np.asarray(sample.x, dtype=float)
    n, p = x.shape
    if lam is not None:
        lam = np.asarray(lam)
        if lam.shape != (n, p):
            raise DataError(f"mask shape {lam.shape} does not match covariates {(n, p)}")
    header = ["i", "y"] + [f"x_{j}" for j in range(1, p + 1)]
    if lam is not None:
        header += [f"lambda_{j}" for j in range(1, p + 1)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            fields = [str(i + 1), _fmt(y[i])] + [_fmt(v) for v in x[i]]
            if lam is not None:
                fields += [str(int(v)) for v in lam[i]]
            fh.write(",".join(fields) + "\n")


def read_sample_csv(path) -> tuple[SampleSet, np.ndarray | None]:
    """Inverse of write_sample_csv; returns (sample, mask-or-None)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        x_cols = [h for h in header if h.startswith("x_")]
        lam_cols = [h for h in header if h.startswith("lambda_")]
        p = len(x_cols)
        if header[:2] != ["i", "y"] or p == 0:
            raise DataError(f"{path}: unexpected sample CSV header {header}")
        expected = ["i", "y"] + [f"x_{j}" for j in range(1, p + 1)]
        if lam_cols:
            if len(lam_cols) != p:
                raise DataError(f"{path}: {len(lam_cols)} mask columns for {p} covariates")
            expected += [f"lambda_{j}" for j in range(1, p + 1)]
        if header != expected:
            raise DataError(f"{path}: unexpected sample CSV header {header}")
        ys, xs, lams = [], [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(f"{path}:{line_no}: expected {len(header)} fields, got {len(row)}")
            try:
                ys.append(float(row[1]))
                xs.append([float(v) for v in row[2 : 2 + p]])
                if lam_cols:
                    lams.append([int(v) for v in row[2 + p :]])
            except ValueError as exc:
                raise DataError(f"{path}:{line_no}: {exc}") from exc
    if not ys:
        raise DataError(f"{path}: no data rows")
    sample = SampleSet(y=np.asarray(ys), x=np.asarray(xs), meta={"source": str(path)})
    lam = np.asarray(lams, dtype=np.int8) if lam_cols else None
    return sample, lam


# ---------------------------------------------------------------------------
# direction JSON
# ---------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_direction_json(path, direction: Direction) -> None:
    payload = {
        "beta_hat": _jsonable(np.asarray(direction.beta_hat)),
        "threshold": float(direction.threshold),
        "method": direction.method,
        "k": None if direction.k is None else int(direction.k),
        "tail_cov": None if direction.tail_cov is None else float(direction.tail_cov),
        "diagnostics": _jsonable(direction.diagnostics),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_direction_json(path) -> Direction:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    try:
        return Direction(
            beta_hat=np.asarray(payload["beta_hat"], dtype=float),
            threshold=float(payload["threshold"]),
            method=str(payload["method"]),
            k=None if payload.get("k") is None else int(payload["k"]),
            tail_cov=None if payload.get("tail_cov") is None else float(payload["tail_cov"]),
            diagnostics=payload.get("diagnostics", {}),
        )
    except KeyError as exc:
        raise DataError(f"{path}: missing direction field {exc}") from exc


# ---------------------------------------------------------------------------
# panel and rank CSVs
# ---------------------------------------------------------------------------

def write_panel_csv(path, panel) -> None:
    """One row per coordinate: j,beta_true,beta_true_unit,mean,q05,q95."""
    p = panel.mean_beta.shape[0]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("j,beta_true,beta_true_unit,mean,q05,q95\n")
        for j in range(p):
            fh.write(
                f"{j + 1},{_fmt(panel.beta_true[j])},{_fmt(panel.beta_true_unit[j])},"
                f"{_fmt(panel.mean_beta[j])},{_fmt(panel.q05_beta[j])},{_fmt(panel.q95_beta[j])}\n"
            )


def read_panel_csv(path) -> dict:
    """Columns of a panel CSV as float arrays keyed by header name."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["j", "beta_true", "beta_true_unit", "mean", "q05", "q95"]:
            raise DataError(f"{path}: unexpected panel CSV header {header}")
        rows = [row for row in reader if row]
    try:
        data = np.asarray(rows, dtype=float)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
    if data.size == 0:
        raise DataError(f"{path}: no data rows")
    return {name: data[:, idx] for idx, name in enumerate(header)}


def write_ranks_csv(path, table) -> None:
    """Long form dataset,alpha,method,tailcov,rank from a rank table."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("dataset,alpha,method,tailcov,rank\n")
        for row in table.rows:
            fh.write(
                f"{row['dataset']},{_fmt(row['alpha'])},{row['method']},"
                f"{_fmt(row['tailcov'])},{_fmt(row['rank'])}\n"
            )


def read_ranks_csv(path) -> list[dict]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["dataset", "alpha", "method", "tailcov", "rank"]:
            raise DataError(f"{path}: unexpected ranks CSV header {reader.fieldnames}")
        for row in reader:
            out.append(
                {
                    "dataset": row["dataset"],
                    "alpha": float(row["alpha"]),
                    "method": row["method"],
                    "tailcov": float(row["tailcov"]),
                    "rank": float(row["rank"]),
                }
            )
    return out


def write_mean_rank_csv(path, table) -> None:
    """alpha,method,mean_rank, ordered by alpha then method name."""
    mean_ranks = table.mean_ranks()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("alpha,method,mean_rank\n")
        for alpha in sorted(mean_ranks):
            for method in sorted(mean_ranks[alpha]):
                fh.write(f"{_fmt(alpha)},{method},{_fmt(mean_ranks[alpha][method])}\n")


def write_random_band_csv(path, table) -> None:
    """dataset,alpha,band_min,band_max from the random-direction rows."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("dataset,alpha,band_min,band_max\n")
        for row in table.rows:
            if "band_min" not in row:
                continue
            fh.write(
                f"{row['dataset']},{_fmt(row['alpha'])},"
                f"{_fmt(row['band_min'])},{_fmt(row['band_max'])}\n"
            )


def write_tailcov_curve_csv(path, rows) -> None:
    """dataset,k,method,tailcov,band_min,band_max — the per-k score curve;
    the band columns are empty except on random-baseline rows."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("dataset,k,method,tailcov,band_min,band_max\n")
        for row in rows:
            band_min = _fmt(row["band_min"]) if "band_min" in row else ""
            band_max = _fmt(row["band_max"]) if "band_max" in row else ""
            fh.write(
                f"{row['dataset']},{row['k']},{row['method']},"
                f"{_fmt(row['tailcov'])},{band_min},{band_max}\n"
            )


# ---------------------------------------------------------------------------
# run manifest
# ---------------------------------------------------------------------------

def config_sha256(config: dict) -> str:
    """Stable digest of a config mapping: canonical JSON (sorted keys,
    no whitespace) hashed with sha256."""
    canonical = json.dumps(_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_manifest(out_dir, command: str, config: dict) -> str:
    """Write the single run_manifest.json for an output directory.

    The manifest records the subcommand, the fully resolved config, its
    sha256, and a wall-clock timestamp. The timestamp is deliberately the
    only non-reproducible field; byte-identity checks across reruns must
    exclude the manifest."""
    os.makedirs(out_dir, exist_ok=True)
    payload = {
        "command": command,
        "config": _jsonable(config),
        "config_sha256": config_sha256(config),
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    path = os.path.join(out_dir, MANIFEST_NAME)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_manifest(out_dir) -> dict:
    path = os.path.join(out_dir, MANIFEST_NAME)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise DataError(f"no {MANIFEST_NAME} in {out_dir}") from exc
