"""Hybrid fuzzy log-Poisson reserving model.

Centers of the fuzzy coefficients come from the crisp log-Poisson GLM; the
left/right endpoints come from an asymmetric-coefficient fuzzy linear
regression on ``ln Y``, solved as a linear program at ``h = 0`` and again at
the optimized inclusion level ``h*``.

Two conventions for the h-level of a fuzzy output ``(L, c, R)`` are
supported:

``"standard"``
    the ordinary alpha-cut ``[h*c + (1-h)*L, h*c + (1-h)*R]``.
``"reference"``
    ``[h*c - (1-h)*L, h*c + (1-h)*R]``, i.e. the lower side is driven by the
    negated left value.  Under this form the reference Taylor-Ashe
    coefficients, ``h*`` and crisp predictions are reproduced, so it is
    the default.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import glm as glm_mod
from .errors import ComputationError
from .fuzzy import (
    HOutOfRange,
    Interval,
    Tfn,
    alpha_cut,
    defuzzify_exp_closed,
    exp_weighted_value,
    linear_combination,
)
from .lp import LpProblem, Status, solve
from .triangle import Cell, Reserves, RunOffTriangle

logger = logging.getLogger(__name__)

CONVENTIONS = ("reference", "standard")
ZERO_SPREAD = 1e-12


class LpInfeasible(ComputationError):
    pass


class ZeroSpread(ComputationError):
    pass


class DegenerateP(ComputationError):
    pass


@dataclass(frozen=True)
class HybridConfig:
    """Fitting options.

    Parameters
    ----------
    convention : {"reference", "standard"}
        h-level form used in the LP constraints, ``h*`` and defuzzification.
    latest_diagonal : bool
        Whether cells on the latest calendar diagonal (``i + j = k + 1``)
        enter the spread LP.  The reference fit leaves them out.
    """

    convention: str = "reference"
    latest_diagonal: bool = False

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")

    @classmethod
    def standard(cls) -> "HybridConfig":
        return cls(convention="standard", latest_diagonal=True)


@dataclass(frozen=True)
class FlrFit:
    coefficients: tuple[Tfn, ...]
    objective: float


@dataclass(frozen=True)
class HQuantities:
    s: np.ndarray
    cr: np.ndarray
    p: np.ndarray
    cr_total: float
    p_total: float
    included: np.ndarray


def _split(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.maximum(X, 0.0), np.maximum(-X, 0.0)


def output_spreads(X: np.ndarray, coeffs: Sequence[Tfn]) -> tuple[np.ndarray, np.ndarray]:
    """Left and right spreads of each fuzzy output ``X_i . coeffs``."""
    dl = np.array([a.left_spread for a in coeffs])
    dr = np.array([a.right_spread for a in coeffs])
    Xp, Xn = _split(np.asarray(X, dtype=float))
    return Xp @ dl + Xn @ dr, Xp @ dr + Xn @ dl


def fit_flr_atfc(
    X: np.ndarray,
    Y: Sequence[float],
    centers: Sequence[float],
    h: float,
    convention: str = "standard",
) -> FlrFit:
    """Fuzzy linear regression with asymmetric triangular coefficients.

    Centers are held fixed; the LP chooses nonnegative left/right deviations
    per coefficient to minimize the total spread ``sum_i (f^R(X_i) - f^L(X_i))``
    while every ``Y_i`` stays inside the h-level of its fuzzy output.
    """
    if not 0.0 <= h < 1.0:
        raise HOutOfRange(f"h must lie in [0, 1), got {h}")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.asarray(Y, dtype=float)
    c = np.asarray(centers, dtype=float)
    N, P = X.shape
    if N == 0:
        return FlrFit(tuple(Tfn.crisp(v) for v in c), 0.0)
    Xp, Xn = _split(X)
    yc = X @ c
    w = 1.0 - h
    weight = np.abs(X).sum(axis=0)
    # variables: [dL_0..dL_{P-1}, dR_0..dR_{P-1}]
    prob = LpProblem(
        objective=np.concatenate([weight, weight]),
        bounds=[(0.0, None)] * (2 * P),
        names=[f"dL{j}" for j in range(P)] + [f"dR{j}" for j in range(P)],
    )
    for i in range(N):
        left_row = np.concatenate([w * Xp[i], w * Xn[i]])
        right_row = np.concatenate([w * Xn[i], w * Xp[i]])
        if convention == "standard":
            prob.add(left_row, ">=", yc[i] - Y[i])
        else:
            prob.add(left_row, "<=", Y[i] - (2.0 * h - 1.0) * yc[i])
        prob.add(right_row, ">=", Y[i] - yc[i])
    sol = solve(prob)
    if sol.status is not Status.OPTIMAL:
        raise LpInfeasible(f"spread LP returned {sol.status.value} at h={h}")
    d = np.maximum(sol.x, 0.0)
    coeffs = tuple(Tfn(c[j] - d[j], c[j], c[j] + d[P + j]) for j in range(P))
    return FlrFit(coeffs, float(sol.objective_value))


def h_quantities(
    X: np.ndarray,
    Y: Sequence[float],
    centers: Sequence[float],
    coeffs_h0: Sequence[Tfn],
    convention: str = "standard",
) -> HQuantities:
    """Per-observation S, credibility and p at the ``h = 0`` fit.

    Observations whose fuzzy output has (numerically) zero total spread are
    excluded from both sums; their ratios are 0/0.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.asarray(Y, dtype=float)
    yc = X @ np.asarray(centers, dtype=float)
    sl, sr = output_spreads(X, coeffs_h0)
    if convention == "standard":
        den_l, den_r = sl, sr
        cr_den = sl + sr
    else:
        lefts = np.array([a.left for a in coeffs_h0])
        rights = np.array([a.right for a in coeffs_h0])
        den_l, den_r = yc - sl, yc + sr
        cr_den = np.abs(X) @ (lefts + rights)
    resid = Y - yc
    num = np.abs(resid)
    den = np.where(resid <= 0, den_l, den_r)
    fuzziness = 0.5 * (sl + sr)
    included = fuzziness >= ZERO_SPREAD
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(num == 0, 0.0, num / den)
        cr = 2.0 * (1.0 - s) / cr_den
        p = s / fuzziness
    s, cr, p = (np.where(included, v, np.nan) for v in (s, cr, p))
    return HQuantities(s, cr, p, float(np.nansum(cr)), float(np.nansum(p)), included)


def compute_h_star(
    X: np.ndarray,
    Y: Sequence[float],
    centers: Sequence[float],
    coeffs_h0: Sequence[Tfn],
    convention: str = "standard",
) -> float:
    """Optimal inclusion level ``h* = (1 - Cr0/p0) / 2``, clipped to ``[0, 1/2]``."""
    q = h_quantities(X, Y, centers, coeffs_h0, convention)
    if not q.included.any():
        raise ZeroSpread("every observation has zero spread at h=0")
    if not (math.isfinite(q.cr_total) and math.isfinite(q.p_total)):
        raise ZeroSpread("credibility undefined: a spread denominator is zero")
    if q.p_total == 0:
        raise DegenerateP("p0 = 0: all observations sit on their centers")
    ratio = q.cr_total / q.p_total
    if ratio > 1:
        return 0.0
    if ratio < 0:
        return 0.5
    return 0.5 * (1.0 - ratio)


@dataclass(frozen=True)
class FuzzyModel:
    """Fitted hybrid model.

    ``alpha[0]``/``beta[0]`` are the coefficients for origin/development year
    2; year 1 is crisp zero.
    """

    k: int
    tau: Tfn
    alpha: tuple[Tfn, ...]
    beta: tuple[Tfn, ...]
    h_star: float
    lp_objective: float
    convention: str = "reference"
    lp_objective_h0: float = math.nan
    lp_cells: tuple[Cell, ...] = ()
    glm: glm_mod.GlmFit | None = field(default=None, repr=False, compare=False)

    @property
    def coefficients(self) -> tuple[Tfn, ...]:
        return (self.tau, *self.alpha, *self.beta)

    def _terms(self, i: int, j: int) -> list[Tfn]:
        if not (1 <= i <= self.k and 1 <= j <= self.k):
            raise glm_mod.IndexOutOfRange(f"cell ({i},{j}) outside 1..{self.k}")
        terms = [self.tau]
        if i > 1:
            terms.append(self.alpha[i - 2])
        if j > 1:
            terms.append(self.beta[j - 2])
        return terms


def predict_fuzzy(m: FuzzyModel, i: int, j: int) -> Tfn:
    """Fuzzy log-mean ``tau~ + alpha~_i + beta~_j`` as a coefficient triple."""
    terms = m._terms(i, j)
    return linear_combination(terms, [1.0] * len(terms))


def h_level(m: FuzzyModel, i: int, j: int, h: float) -> Interval:
    """h-level of the fuzzy log-mean under the model's convention."""
    a = predict_fuzzy(m, i, j)
    if m.convention == "standard":
        return alpha_cut(a, h)
    if not 0.0 <= h <= 1.0:
        raise HOutOfRange(f"h must lie in [0, 1], got {h}")
    return Interval(h * a.center - (1 - h) * a.left, h * a.center + (1 - h) * a.right)


def predict_crisp(m: FuzzyModel, i: int, j: int) -> float:
    a = predict_fuzzy(m, i, j)
    if m.convention == "standard":
        return defuzzify_exp_closed(a)
    return exp_weighted_value(-a.left, a.center, a.right)


def crisp_fitted(m: FuzzyModel, cells: Sequence[Cell]) -> dict[Cell, float]:
    return {c: predict_crisp(m, *c) for c in cells}


def hybrid_reserve(m: FuzzyModel, t: RunOffTriangle) -> Reserves:
    return Reserves.from_cells(t.k, crisp_fitted(m, t.future_cells()))


def prediction_square(m: FuzzyModel) -> np.ndarray:
    k = m.k
    return np.array([[predict_crisp(m, i, j) for j in range(1, k + 1)] for i in range(1, k + 1)])


def lp_cells(t: RunOffTriangle, config: HybridConfig) -> list[Cell]:
    cells = t.observed_cells()
    if config.latest_diagonal:
        return cells
    return [(i, j) for i, j in cells if i + j <= t.k]


def fit_hybrid(t: RunOffTriangle, config: HybridConfig = HybridConfig()) -> FuzzyModel:
    """Fit centers by GLM, spreads by LP at ``h = 0``, then refit at ``h*``."""
    base = glm_mod.fit_poisson(t)
    centers = base.coef
    cells = lp_cells(t, config)
    X = glm_mod.design_matrix(t.k, cells)
    Y = np.log([t[c] for c in cells])
    conv = config.convention

    flr0 = fit_flr_atfc(X, Y, centers, 0.0, conv)
    try:
        h_star = compute_h_star(X, Y, centers, flr0.coefficients, conv) if cells else 0.0
    except (ZeroSpread, DegenerateP) as exc:
        logger.info("h* falls back to 0: %s", exc)
        h_star = 0.0
    flr = fit_flr_atfc(X, Y, centers, h_star, conv) if h_star > 0 else flr0
    logger.info("hybrid fit: h*=%.6f, objective %.6f (h=0: %.6f)", h_star, flr.objective, flr0.objective)

    coeffs = flr.coefficients
    k = t.k
    return FuzzyModel(
        k=k,
        tau=coeffs[0],
        alpha=tuple(coeffs[1:k]),
        beta=tuple(coeffs[k:]),
        h_star=h_star,
        lp_objective=flr.objective,
        convention=conv,
        lp_objective_h0=flr0.objective,
        lp_cells=tuple(cells),
        glm=base,
    )
