"""Tail-moment estimators and the masked extreme direction estimator.

The target direction at a tail level y is the unit vector maximizing the
covariance between a linear projection of the covariates and the response
conditionally on the response exceeding y. Its closed form is

    w(y) = v(y) / ||v(y)||,   v(y) = MES_XY(y) - MES_X(y) * ES_Y(y),

where MES/ES are tail conditional expectations. With covariates observed
only through a multiplicative 0/1 mask Lambda, each coordinate of v is
estimated from masked tail moments,

    v_j = (m1 * m[Y*Lam_j*X_j] - m[Y] * m[Lam_j*X_j]) / m[Lam_j],

with m[Z] the empirical tail moment mean(Z * 1{Y >= y}). The automatic
threshold picks the order-statistic index k maximizing the empirical
covariance between the top-k responses and the projections of their
concomitant covariate vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DegenerateDirectionError, InsufficientTailError

K_MIN = 5


@dataclass
class TailMoments:
    """The five labeled tail moments entering the masked estimator at one
    threshold: keys "one", "y", "lam" (p,), "lam_x" (p,), "y_lam_x" (p,)."""

    m_hat: dict
    y: float
    n_exceed: int


@dataclass
class Direction:
    """A unit direction estimate with its provenance.

    beta_hat has unit Euclidean norm unless degenerate. k is the
    order-statistic index when the threshold came from one. tail_cov is
    filled by the evaluation harness, not the estimators.
    """

    beta_hat: np.ndarray
    threshold: float
    method: str
    k: int | None = None
    tail_cov: float | None = None
    diagnostics: dict = field(default_factory=dict)


def tail_moment(z, y_resp, threshold: float):
    """Empirical tail moment (1/n) * sum_i z_i * 1{y_i >= threshold}.

    z may be a vector (n,) or a matrix (n, p); the indicator always acts on
    y_resp. An empty exceedance set gives 0.
    """
    z = np.asarray(z, dtype=float)
    y_resp = np.asarray(y_resp, dtype=float)
    n = y_resp.shape[0]
    if n == 0 or z.shape[0] != n:
        raise DataError("z and y_resp must share a positive length n")
    ind = (y_resp >= threshold).astype(float)
    if z.ndim == 1:
        return float(ind @ z / n)
    return ind @ z / n


def order_statistic_threshold(y, k: int) -> float:
    """The k-th largest value of y, i.e. the descending order statistic."""
    y = np.asarray(y, dtype=float)
    if not 1 <= k <= y.size:
        raise DataError(f"k must lie in [1, n]={y.size}, got {k}")
    return float(np.sort(y)[y.size - k])


def _resolve_threshold(y, threshold, k):
    if (threshold is None) == (k is None):
        raise DataError("exactly one of threshold and k must be given")
    if k is not None:
        return order_statistic_threshold(y, int(k)), int(k)
    return float(threshold), None


def compute_tail_moments(x, y, lam, threshold: float) -> TailMoments:
    """All five masked tail moments at one threshold."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise DataError("x must be (n, p) aligned with y")
    if lam is None:
        lam = np.ones_like(x)
    else:
        lam = np.asarray(lam, dtype=float)
        if lam.shape != x.shape:
            raise DataError("mask must have the same shape as x")
    ind = y >= threshold
    return TailMoments(
        m_hat={
            "one": float(np.mean(ind)),
            "y": tail_moment(y, y, threshold),
            "lam": tail_moment(lam, y, threshold),
            "lam_x": tail_moment(lam * x, y, threshold),
            "y_lam_x": tail_moment(y[:, None] * lam * x, y, threshold),
        },
        y=float(threshold),
        n_exceed=int(np.count_nonzero(ind)),
    )


def epls_direction(x, y, lam=None, threshold=None, k=None) -> Direction:
    """Masked extreme direction estimate at a threshold (or top-k index).

    Coordinates whose mask never fires in the tail (m[Lam_j] = 0) carry no
    information there; they contribute v_j = 0 and are flagged in
    diagnostics["unobserved_coords"] rather than raising.
    """
    y = np.asarray(y, dtype=float)
    thr, k_idx = _resolve_threshold(y, threshold, k)
    mom = compute_tail_moments(x, y, lam, thr)
    if mom.n_exceed < 2:
        raise InsufficientTailError(
            f"need at least 2 exceedances of threshold {thr}, got {mom.n_exceed}"
        )
    m1 = mom.m_hat["one"]
    m_y = mom.m_hat["y"]
    m_lam = mom.m_hat["lam"]
    num = m1 * mom.m_hat["y_lam_x"] - m_y * mom.m_hat["lam_x"]
    observed = m_lam > 0
    v = np.zeros_like(num)
    np.divide(num, m_lam, where=observed, out=v)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise DegenerateDirectionError(f"zero direction vector at threshold {thr}")
    diag = {"n_exceed": mom.n_exceed, "v_norm": norm}
    if not observed.all():
        diag["unobserved_coords"] = np.flatnonzero(~observed).tolist()
    return Direction(beta_hat=v / norm, threshold=thr, method="epls", k=k_idx, diagnostics=diag)


def population_w(mes_xy, mes_x, es_y: float) -> np.ndarray:
    """Closed-form optimal direction from tail conditional moments:
    w = v/||v|| with v = mes_xy - mes_x * es_y."""
    v = np.asarray(mes_xy, dtype=float) - np.asarray(mes_x, dtype=float) * float(es_y)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise DegenerateDirectionError("tail moments give a zero direction vector")
    return v / norm


def projection_covariance(x, y, lam=None, threshold=None, k=None) -> float:
    """Empirical covariance between Y and the estimated projection over the
    exceedance set {Y >= threshold} (population form, 1/count scaling).

    This is the objective the automatic threshold search maximizes; as a
    function of a continuous threshold it is piecewise constant with jumps
    only at the sample values of Y.
    """
    y = np.asarray(y, dtype=float)
    thr, _ = _resolve_threshold(y, threshold, k)
    direction = epls_direction(x, y, lam, threshold=thr)
    x_obs = np.asarray(x, dtype=float) if lam is None else np.asarray(x, float) * np.asarray(lam, float)
    ind = y >= thr
    proj = x_obs[ind] @ direction.beta_hat
    y_tail = y[ind]
    return float(np.mean(y_tail * proj) - np.mean(y_tail) * np.mean(proj))


@dataclass
class ThresholdSelection:
    """Result of the automatic threshold search: the winning index k_hat,
    the covariance curve r_bar over k_grid (NaN where skipped), and the
    skipped indices."""

    k_hat: int
    threshold: float
    k_grid: np.ndarray
    r_bar: np.ndarray
    skipped: list


def select_threshold(x, y, lam=None, k_min: int = K_MIN, k_max: int | None = None) -> ThresholdSelection:
    """Pick the order-statistic index k maximizing r_bar(k).

    r_bar(k) is the empirical covariance (1/k scaling) between the top-k
    order statistics of Y and the projections beta(Y_{n-k+1,n})' X of their
    concomitants. The search runs over k_min <= k <= floor(n/5); ties break
    to the smallest k; indices where the direction is degenerate are
    skipped and reported.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.size
    if k_max is None:
        k_max = n // 5
    if n < 25 or k_max < k_min:
        raise InsufficientTailError(f"need n >= 25 for the k in [{k_min}, n/5] search, got n={n}")
    x_obs = x if lam is None else x * np.asarray(lam, dtype=float)

    # descending stable order: top-k rows are the k largest responses with
    # their concomitant covariate rows
    order = np.argsort(-y, kind="stable")
    y_desc = y[order]
    x_desc = x_obs[order]

    k_grid = np.arange(k_min, k_max + 1)
    r_bar = np.full(k_grid.size, np.nan)
    skipped = []
    for pos, k in enumerate(k_grid):
        try:
            direction = epls_direction(x, y, lam, k=int(k))
        except (DegenerateDirectionError, InsufficientTailError):
            skipped.append(int(k))
            continue
        proj = x_desc[:k] @ direction.beta_hat
        top = y_desc[:k]
        r_bar[pos] = np.mean(top * proj) - np.mean(top) * np.mean(proj)
    if np.all(np.isnan(r_bar)):
        raise DegenerateDirectionError("the direction was degenerate at every candidate k")
    best_pos = int(np.nanargmax(r_bar))
    k_hat = int(k_grid[best_pos])
    return ThresholdSelection(
        k_hat=k_hat,
        threshold=order_statistic_threshold(y, k_hat),
        k_grid=k_grid,
        r_bar=r_bar,
        skipped=skipped,
    )
