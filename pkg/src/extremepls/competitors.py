"""Baseline direction estimators scored against the masked extreme
direction: tail PCA, tail LDA, random forest importances, random
projections, and (extreme) sliced inverse regression.

All baselines are mask-free: they consume whatever covariate matrix they
are given (missing entries zero-imputed upstream). Tail variants
condition on the strict exceedance set {Y > y}; the forest classifies the
weak indicator 1{Y >= y} over all points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla
from sklearn.ensemble import RandomForestClassifier

from .errors import ConfigError, DataError, DegenerateDirectionError, InsufficientTailError
from .estimator import Direction

_ZERO_TOL = 1e-12


@dataclass
class SliceSummary:
    """Equal-frequency slice summary: per-slice mean vectors and counts."""

    slice_means: np.ndarray  # (H, p)
    counts: np.ndarray  # (H,)
    total: int


def _as_xy(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise DataError("x must be (n, p) aligned with y")
    return x, y


def _unit(v: np.ndarray, what: str) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    if norm < _ZERO_TOL:
        raise DegenerateDirectionError(f"{what} produced a zero direction")
    return v / norm


def _fix_sign(v: np.ndarray) -> np.ndarray:
    # deterministic eigenvector orientation: first nonzero component positive
    scale = float(np.max(np.abs(v)))
    nz = np.flatnonzero(np.abs(v) > _ZERO_TOL * max(scale, 1.0))
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def _strict_tail(x, y, threshold, minimum, what):
    tail = y > threshold
    n_y = int(np.count_nonzero(tail))
    if n_y < minimum:
        raise InsufficientTailError(f"{what} needs >= {minimum} strict exceedances, got {n_y}")
    return x[tail], y[tail], n_y


def equal_frequency_slices(values: np.ndarray, n_slices: int) -> np.ndarray:
    """Slice labels 0..n_slices-1 by empirical quantile edges, boundary ties
    assigned to the lower slice."""
    n = values.size
    if n_slices < 1 or n_slices > n:
        raise ConfigError(f"need 1 <= n_slices <= n, got {n_slices} for n={n}")
    srt = np.sort(values)
    levels = np.arange(1, n_slices) / n_slices
    edges = srt[np.ceil(levels * n).astype(int) - 1]
    return np.searchsorted(edges, values, side="left")


def _slice_summary(x: np.ndarray, labels: np.ndarray, n_slices: int) -> SliceSummary:
    means = np.empty((n_slices, x.shape[1]))
    counts = np.empty(n_slices, dtype=int)
    for h in range(n_slices):
        sel = labels == h
        counts[h] = int(np.count_nonzero(sel))
        if counts[h] == 0:
            raise DegenerateDirectionError(f"slice {h} is empty after equal-frequency partition")
        means[h] = x[sel].mean(axis=0)
    return SliceSummary(slice_means=means, counts=counts, total=int(labels.size))


# ---------------------------------------------------------------------------
# tail principal component
# ---------------------------------------------------------------------------

def epca_direction(x, y, threshold: float) -> Direction:
    """Top eigenvector of the tail sample covariance (1/N_y scaling),
    oriented with the first nonzero component positive."""
    x, y = _as_xy(x, y)
    x_t, _, n_y = _strict_tail(x, y, threshold, 2, "tail PCA")
    centered = x_t - x_t.mean(axis=0)
    cov = centered.T @ centered / n_y
    if float(np.max(np.abs(cov))) < _ZERO_TOL:
        raise DegenerateDirectionError("tail covariance matrix is zero")
    eigvals, eigvecs = np.linalg.eigh(cov)
    lead = _fix_sign(eigvecs[:, -1])
    return Direction(
        beta_hat=_unit(lead, "tail PCA"),
        threshold=float(threshold),
        method="epca",
        diagnostics={"n_exceed": n_y, "leading_eigenvalue": float(eigvals[-1])},
    )


# ---------------------------------------------------------------------------
# tail linear discriminant
# ---------------------------------------------------------------------------

def elda_direction(x, y, threshold: float, n_slices: int = 5) -> Direction:
    """Severity-sliced tail discriminant: the most extreme of n_slices
    equal-frequency severity slices is contrasted with the mean of the
    others, then whitened by the pseudo-inverse of the tail covariance."""
    x, y = _as_xy(x, y)
    x_t, y_t, n_y = _strict_tail(x, y, threshold, n_slices, "tail LDA")
    labels = equal_frequency_slices(y_t - threshold, n_slices)
    summary = _slice_summary(x_t, labels, n_slices)
    delta = summary.slice_means[-1] - summary.slice_means[:-1].mean(axis=0)
    if float(np.linalg.norm(delta)) < _ZERO_TOL:
        raise DegenerateDirectionError("slice means coincide: zero contrast vector")
    centered = x_t - x_t.mean(axis=0)
    cov = centered.T @ centered / n_y
    direction = np.linalg.pinv(cov) @ delta
    return Direction(
        beta_hat=_unit(direction, "tail LDA"),
        threshold=float(threshold),
        method="elda",
        diagnostics={"n_exceed": n_y, "slice_counts": summary.counts.tolist()},
    )


# ---------------------------------------------------------------------------
# random forest importances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ForestSettings:
    """Forest defaults mirroring the stock classifier configuration:
    100 trees, Gini impurity, bootstrap, no depth cap, leaves of size 1,
    all features eligible at every split."""

    n_trees: int = 100
    max_depth: int | None = None
    bootstrap: bool = True
    min_samples_leaf: int = 1
    seed: int = 0
    n_jobs: int = 1


def erf_direction(x, y, threshold: float, settings: ForestSettings = ForestSettings()) -> Direction:
    """Normalized Gini feature importances of a forest classifying the weak
    tail indicator 1{Y >= threshold} over all n points."""
    x, y = _as_xy(x, y)
    labels = (y >= threshold).astype(int)
    if labels.min() == labels.max():
        raise InsufficientTailError("both tail and bulk points are required to fit the forest")
    forest = RandomForestClassifier(
        n_estimators=settings.n_trees,
        criterion="gini",
        max_depth=settings.max_depth,
        bootstrap=settings.bootstrap,
        min_samples_leaf=settings.min_samples_leaf,
        max_features=None,
        random_state=settings.seed,
        n_jobs=settings.n_jobs,
    )
    forest.fit(x, labels)
    importances = forest.feature_importances_  # normalized to sum 1
    return Direction(
        beta_hat=_unit(importances, "forest importance"),
        threshold=float(threshold),
        method="erf",
        diagnostics={"importances": importances.tolist(), "n_tail": int(labels.sum())},
    )


# ---------------------------------------------------------------------------
# random projections
# ---------------------------------------------------------------------------

@dataclass
class RandomDirectionSet:
    """m uniformly distributed unit vectors and their mean (the mean is NOT
    renormalized); the full set is kept so the harness can report the
    min-max band of tail covariances over all m directions."""

    mean: np.ndarray
    directions: np.ndarray  # (m, p)


def random_directions(p: int, m: int = 500, rng: np.random.Generator | None = None) -> RandomDirectionSet:
    """Sample m unit vectors uniformly on the sphere in dimension p."""
    if p < 1 or m < 1:
        raise ConfigError("p and m must be positive")
    if rng is None:
        rng = np.random.default_rng()
    vecs = rng.standard_normal((m, p))
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    # a zero Gaussian vector has probability 0; guard anyway
    norms[norms == 0] = 1.0
    vecs = vecs / norms
    return RandomDirectionSet(mean=vecs.mean(axis=0), directions=vecs)


# ---------------------------------------------------------------------------
# sliced inverse regression, full-sample and tail variants
# ---------------------------------------------------------------------------

def sir_direction(x, y, n_slices: int = 10, pinv_fallback: bool = True) -> Direction:
    """Leading eigenvector of Sigma_XX^{-1} Sigma_B from equal-frequency
    slices of Y (n_slices capped at n). Singular Sigma_XX falls back to the
    pseudo-inverse when allowed (flagged in diagnostics) and errors
    otherwise."""
    x, y = _as_xy(x, y)
    n = y.size
    if n < 2:
        raise InsufficientTailError("need at least 2 points")
    h = min(n_slices, n)
    labels = equal_frequency_slices(y, h)
    summary = _slice_summary(x, labels, h)
    x_bar = x.mean(axis=0)
    centered = x - x_bar
    sigma_xx = centered.T @ centered / n
    dev = summary.slice_means - x_bar
    sigma_b = (dev * (summary.counts / n)[:, None]).T @ dev
    if float(np.max(np.abs(sigma_b))) < _ZERO_TOL:
        raise DegenerateDirectionError("between-slice covariance is zero")

    used_pinv = False
    try:
        chol = np.linalg.cholesky(sigma_xx)
    except np.linalg.LinAlgError:
        chol = None
    if chol is not None:
        eigvals, eigvecs = sla.eigh(sigma_b, sigma_xx)
        lead = eigvecs[:, -1]
    else:
        if not pinv_fallback:
            raise DegenerateDirectionError("covariate covariance is singular and the pseudo-inverse fallback is disabled")
        used_pinv = True
        eigvals, eigvecs = np.linalg.eig(np.linalg.pinv(sigma_xx) @ sigma_b)
        lead = np.real(eigvecs[:, int(np.argmax(np.real(eigvals)))])
    lead = _fix_sign(lead)
    diag = {"n_slices": h, "pinv": used_pinv}
    return Direction(beta_hat=_unit(lead, "SIR"), threshold=float("-inf"), method="sir", diagnostics=diag)


def esir_direction(x, y, threshold: float, n_slices: int = 10, pinv_fallback: bool = True) -> Direction:
    """sir_direction restricted to the strict tail {Y > threshold}."""
    x, y = _as_xy(x, y)
    x_t, y_t, n_y = _strict_tail(x, y, threshold, 2, "extreme SIR")
    inner = sir_direction(x_t, y_t, n_slices=n_slices, pinv_fallback=pinv_fallback)
    inner.threshold = float(threshold)
    inner.method = "esir"
    inner.diagnostics["n_exceed"] = n_y
    return inner
