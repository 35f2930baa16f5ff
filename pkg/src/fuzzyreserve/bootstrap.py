"""Pearson-residual bootstrap for reserve variability."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import glm as glm_mod
from . import hybrid as hybrid_mod
from .errors import ComputationError, InputError, ReservingError
from .triangle import Cell, RunOffTriangle

logger = logging.getLogger(__name__)

MIN_REPLICATIONS = 100
MAX_FAILURE_RATE = 0.05
FLOOR_FRACTION = 1e-6


class NonPositiveFitted(InputError):
    pass


class RefitFailed(ComputationError):
    pass


@dataclass(frozen=True)
class BootstrapConfig:
    replications: int = 1000
    seed: int = 42
    model: str = "classical"
    hybrid: hybrid_mod.HybridConfig = field(default_factory=hybrid_mod.HybridConfig)
    workers: int = 1

    def __post_init__(self):
        if self.model not in ("classical", "hybrid"):
            raise InputError(f"model must be 'classical' or 'hybrid', got {self.model!r}")
        if self.replications < MIN_REPLICATIONS:
            raise InputError(f"replications must be >= {MIN_REPLICATIONS}, got {self.replications}")
        if self.workers < 1:
            raise InputError("workers must be >= 1")


@dataclass(frozen=True)
class BootstrapResult:
    reserves: np.ndarray = field(repr=False)
    ep: float
    sd: float
    mse: float
    psi_used: float
    reserve_estimate: float
    failures: int = 0


def pearson_residuals(
    fitted: Mapping[Cell, float], t: RunOffTriangle, n_params: int | None = None
) -> dict[Cell, float]:
    """Scaled Pearson residuals ``(Y - mu)/sqrt(mu) * sqrt(n/(n-p))``.

    ``n_params`` defaults to ``2k - 1``; pass 0 to skip the scaling.
    """
    p = glm_mod.n_params(t.k) if n_params is None else n_params
    n = len(fitted)
    if n - p <= 0:
        raise glm_mod.ZeroDegreesOfFreedom(f"{n} cells and {p} parameters")
    scale = math.sqrt(n / (n - p))
    out = {}
    for c, mu in fitted.items():
        if not mu > 0:
            raise NonPositiveFitted(f"fitted value {mu!r} at cell {c}")
        out[c] = (t[c] - mu) / math.sqrt(mu) * scale
    return out


def _base(t: RunOffTriangle, cfg: BootstrapConfig):
    """Fitted observed means, reserve estimate and dispersion of the base model."""
    if cfg.model == "classical":
        fit = glm_mod.fit_poisson(t)
        return fit.fitted, glm_mod.reserve(fit, t).total, fit.psi
    m = hybrid_mod.fit_hybrid(t, cfg.hybrid)
    fitted = hybrid_mod.crisp_fitted(m, t.observed_cells())
    return fitted, hybrid_mod.hybrid_reserve(m, t).total, m.glm.psi


def _refit_reserve(t: RunOffTriangle, cfg: BootstrapConfig) -> float:
    if cfg.model == "classical":
        return glm_mod.reserve(glm_mod.fit_poisson(t), t).total
    return hybrid_mod.hybrid_reserve(hybrid_mod.fit_hybrid(t, cfg.hybrid), t).total


def _replicate(args) -> float:
    t, cfg, mu, resid, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    draw = rng.choice(resid, size=mu.size, replace=True)
    pseudo = np.maximum(mu + draw * np.sqrt(mu), FLOOR_FRACTION * mu)
    try:
        return _refit_reserve(t.with_values(pseudo), cfg)
    except (ReservingError, np.linalg.LinAlgError, FloatingPointError) as exc:
        logger.debug("replication failed: %s", exc)
        return math.nan


def bootstrap_reserve(t: RunOffTriangle, cfg: BootstrapConfig = BootstrapConfig()) -> BootstrapResult:
    """Resample residuals, rebuild pseudo-triangles, refit, collect reserves.

    Each replication draws from its own stream spawned from ``cfg.seed``, so
    the result does not depend on ``cfg.workers``.
    """
    fitted, r_hat, psi = _base(t, cfg)
    cells = t.observed_cells()
    mu = np.array([fitted[c] for c in cells])
    resid = np.array([v for v in pearson_residuals(fitted, t).values()])
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.replications)
    jobs = [(t, cfg, mu, resid, s) for s in streams]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            sims = list(pool.map(_replicate, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    else:
        sims = [_replicate(j) for j in jobs]
    sims = np.array(sims)
    failures = int(np.isnan(sims).sum())
    if failures > MAX_FAILURE_RATE * cfg.replications:
        raise RefitFailed(f"{failures} of {cfg.replications} replications failed to refit")
    ok = sims[~np.isnan(sims)]
    sd = float(np.std(ok, ddof=1))
    mse = float(np.sqrt(np.mean((ok - r_hat) ** 2)))
    ep = math.sqrt(psi * r_hat + sd * sd)
    logger.info("bootstrap %s: R=%.2f sd=%.2f ep=%.2f (%d failures)", cfg.model, r_hat, sd, ep, failures)
    return BootstrapResult(ok, ep, sd, mse, psi, r_hat, failures)
