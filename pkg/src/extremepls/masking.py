"""Binary autoregressive (BAR) missing-data masks over covariates.

Each covariate coordinate carries a 0/1 observation mask whose success
probability decays with the response, p_i = clamp(c_j * y_i^tau, 0, 1)
with tau < 0: the larger the response, the likelier the covariate entry
is missing. Serial dependence in the mask comes from a Markov candidate
step pi_{i,j} = alpha_bar * Lambda_{i-1,j} + (1 - alpha_bar) * p_i, and an
asymmetric rejection correction flips just enough candidates to restore
the exact marginal E[Lambda_{i,j}] = p_i at every step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError


@dataclass(frozen=True)
class MaskConfig:
    """Mask recipe: tail exponent tau < 0, Markov weight alpha_bar in [0, 1),
    optional per-coordinate scales c_j > 0 (default all ones)."""

    tau: float
    alpha_bar: float = 0.0
    c: np.ndarray | None = None

    def __post_init__(self):
        if not self.tau < 0:
            raise ConfigError(f"tau must be negative, got {self.tau}")
        if not (0 <= self.alpha_bar < 1):
            raise ConfigError(f"alpha_bar must lie in [0, 1), got {self.alpha_bar}")
        if self.c is not None:
            c = np.asarray(self.c, dtype=float)
            if c.ndim != 1 or np.any(c <= 0):
                raise ConfigError("c must be a 1-D vector of positive scales")
            object.__setattr__(self, "c", c)


@dataclass
class MaskMatrix:
    """n x p observation mask with entries in {0, 1} (1 = observed)."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam)
        if lam.ndim != 2:
            raise DataError("mask must be an n x p matrix")
        if not np.isin(lam, (0, 1)).all():
            raise DataError("mask entries must be exactly 0 or 1")
        self.lam = lam.astype(np.int8)


@dataclass
class MaskedMatrix:
    """Covariates after masking: the product channel values = lam * x, plus
    the observation-status channel telling masked zeros from real zeros."""

    values: np.ndarray
    observed: np.ndarray


def lambda_fn(y, tau: float, c: float = 1.0):
    """Observation probability clamp(c * y^tau, 0, 1) for positive y."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0) or np.any(~np.isfinite(y)):
        raise DataError("lambda_fn needs strictly positive finite y")
    return np.clip(c * y**tau, 0.0, 1.0)


def correction_probs(pi, p_target):
    """Flip probabilities (gamma_plus, gamma_minus) restoring marginal p.

    gamma_plus = (p - pi)/(1 - pi) applies to 0-candidates when pi < p;
    gamma_minus = (pi - p)/pi applies to 1-candidates when pi > p. The
    branch that does not apply is 0. pi = 1 forces pi >= p and pi = 0
    forces pi <= p, so the guarded divisions never see a zero denominator.
    """
    pi = np.asarray(pi, dtype=float)
    p_target = np.asarray(p_target, dtype=float)
    if np.any((pi < 0) | (pi > 1)) or np.any((p_target < 0) | (p_target > 1)):
        raise DataError("pi and p_target must be probabilities in [0, 1]")
    up = pi < p_target
    down = pi > p_target
    gamma_plus = np.where(up, np.divide(p_target - pi, 1.0 - pi, where=up, out=np.zeros_like(pi)), 0.0)
    gamma_minus = np.where(down, np.divide(pi - p_target, pi, where=down, out=np.zeros_like(pi)), 0.0)
    if pi.ndim == 0:
        return float(gamma_plus), float(gamma_minus)
    return gamma_plus, gamma_minus


def gen_bar_mask(y, config: MaskConfig, rng: np.random.Generator, p: int | None = None) -> MaskMatrix:
    """Draw the n x p BAR mask for a positive response vector y.

    Coordinates are independent chains sharing one RNG stream in
    column-major order: a single uniform matrix of shape (p, 2n - 1) is
    drawn up front, row j holding coordinate j's stream (the start draw,
    then per step one candidate uniform and one correction uniform, the
    latter consumed whether or not a correction applies).
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise DataError("y must be a nonempty vector")
    if config.c is not None:
        if p is not None and p != config.c.size:
            raise ConfigError(f"p={p} disagrees with len(c)={config.c.size}")
        p = config.c.size
        c = config.c
    else:
        if p is None:
            raise ConfigError("mask width p required when config.c is not set")
        c = np.ones(p)
    if p < 1:
        raise ConfigError("mask width p must be positive")

    n = y.size
    # (n, p) target probabilities p_{i,j} = clamp(c_j * y_i^tau, 0, 1)
    probs = lambda_fn(y[:, None], config.tau, c[None, :])

    us = rng.random((p, 2 * n - 1))
    lam = np.empty((n, p), dtype=np.int8)
    lam[0] = us[:, 0] < probs[0]
    a = config.alpha_bar
    for i in range(1, n):
        pi = a * lam[i - 1] + (1.0 - a) * probs[i]
        cand = (us[:, 2 * i - 1] < pi).astype(np.int8)
        u_corr = us[:, 2 * i]
        gamma_plus, gamma_minus = correction_probs(pi, probs[i])
        flip_up = (pi < probs[i]) & (cand == 0) & (u_corr < gamma_plus)
        flip_down = (pi > probs[i]) & (cand == 1) & (u_corr < gamma_minus)
        lam[i] = np.where(flip_up, 1, np.where(flip_down, 0, cand))
    return MaskMatrix(lam)


def apply_mask(x, mask: MaskMatrix) -> MaskedMatrix:
    """Componentwise product Lambda * x with the status channel kept."""
    x = np.asarray(x, dtype=float)
    if x.shape != mask.lam.shape:
        raise DataError(f"shape mismatch: x {x.shape} vs mask {mask.lam.shape}")
    return MaskedMatrix(values=x * mask.lam, observed=mask.lam.astype(bool))
