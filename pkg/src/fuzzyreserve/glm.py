"""Log-Poisson (quasi-Poisson) GLM for run-off triangles.

The linear predictor for cell ``(i, j)`` is ``tau + alpha_i + beta_j`` with
reference levels ``alpha_1 = beta_1 = 0``.  Coefficients are estimated by
iteratively reweighted least squares on the dummy-coded design.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .errors import ComputationError, InputError
from .triangle import Cell, Reserves, RunOffTriangle

logger = logging.getLogger(__name__)


class SingularDesign(ComputationError):
    pass


class NotConverged(UserWarning):
    """Emitted when IRLS hits the iteration cap; the fit carries ``converged=False``."""


class ZeroDegreesOfFreedom(ComputationError):
    pass


class IndexOutOfRange(InputError, IndexError):
    pass


def n_params(k: int) -> int:
    return 2 * k - 1


def design_row(k: int, i: int, j: int) -> np.ndarray:
    """Indicator row over ``(tau, alpha_2..alpha_k, beta_2..beta_k)``."""
    x = np.zeros(n_params(k))
    x[0] = 1.0
    if i > 1:
        x[i - 1] = 1.0
    if j > 1:
        x[k + j - 2] = 1.0
    return x


def design_matrix(k: int, cells: Sequence[Cell]) -> np.ndarray:
    return np.array([design_row(k, i, j) for i, j in cells]).reshape(len(cells), n_params(k))


def coefficient_names(k: int) -> list[str]:
    return ["tau"] + [f"alpha_{i}" for i in range(2, k + 1)] + [f"beta_{j}" for j in range(2, k + 1)]


@dataclass(frozen=True)
class GlmFit:
    """Fitted log-Poisson model.

    ``alpha[0]`` is ``alpha_2`` and ``beta[0]`` is ``beta_2``.  ``psi`` is NaN
    when the model is saturated (no residual degrees of freedom).
    """

    k: int
    tau: float
    alpha: np.ndarray
    beta: np.ndarray
    psi: float
    fitted: Mapping[Cell, float] = field(repr=False)
    converged: bool = True
    iterations: int = 0

    @property
    def coef(self) -> np.ndarray:
        return np.concatenate([[self.tau], self.alpha, self.beta])

    def linear_predictor(self, i: int, j: int) -> float:
        if not (1 <= i <= self.k and 1 <= j <= self.k):
            raise IndexOutOfRange(f"cell ({i},{j}) outside 1..{self.k}")
        a = self.alpha[i - 2] if i > 1 else 0.0
        b = self.beta[j - 2] if j > 1 else 0.0
        return self.tau + a + b


@dataclass(frozen=True)
class DispersionTest:
    z: float
    p_value: float


def _irls(X: np.ndarray, y: np.ndarray, tol: float, max_iter: int):
    mu = y + y.mean()
    eta = np.log(mu)
    coef = None
    for it in range(1, max_iter + 1):
        z = eta + (y - mu) / mu
        XtW = X.T * mu
        try:
            new = np.linalg.solve(XtW @ X, XtW @ z)
        except np.linalg.LinAlgError as exc:
            raise SingularDesign(f"normal equations are singular: {exc}") from exc
        eta = X @ new
        mu = np.exp(eta)
        if coef is not None and np.max(np.abs(new - coef)) < tol:
            return new, True, it
        coef = new
    return coef, False, max_iter


def fit_poisson(t: RunOffTriangle, tol: float = 1e-10, max_iter: int = 100) -> GlmFit:
    """Maximum-likelihood log-Poisson fit by IRLS.

    Parameters
    ----------
    t : RunOffTriangle
        Triangle to fit; ``k = 1`` gives the trivial saturated fit.
    tol : float
        Convergence threshold on the largest absolute coefficient change.
    max_iter : int
        Iteration cap; hitting it emits :class:`NotConverged` and returns the
        last iterate with ``converged=False``.
    """
    k = t.k
    cells = t.observed_cells()
    X = design_matrix(k, cells)
    y = t.values()
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise SingularDesign("design matrix is rank deficient")
    coef, converged, iters = _irls(X, y, tol, max_iter)
    if not converged:
        warnings.warn(f"IRLS did not converge in {max_iter} iterations", NotConverged, stacklevel=2)
    logger.debug("IRLS finished after %d iterations (converged=%s)", iters, converged)
    mu = np.exp(X @ coef)
    fitted = dict(zip(cells, mu.tolist()))
    dof = len(cells) - n_params(k)
    psi = _pearson_chi2(y, mu) / dof if dof > 0 else math.nan
    return GlmFit(k, float(coef[0]), coef[1:k].copy(), coef[k:].copy(), psi, fitted, converged, iters)


def _pearson_chi2(y: np.ndarray, mu: np.ndarray) -> float:
    return float(np.sum((y - mu) ** 2 / mu))


def predict_cell(fit: GlmFit, i: int, j: int) -> float:
    return math.exp(fit.linear_predictor(i, j))


def estimate_dispersion(fit: GlmFit, t: RunOffTriangle) -> float:
    """Pearson chi-square over residual degrees of freedom."""
    dof = t.n_observed - n_params(t.k)
    if dof <= 0:
        raise ZeroDegreesOfFreedom(f"k={t.k} leaves {dof} residual degrees of freedom")
    cells = t.observed_cells()
    y = t.values()
    mu = np.array([fit.fitted[c] for c in cells])
    return _pearson_chi2(y, mu) / dof


def overdispersion_test(fit: GlmFit, t: RunOffTriangle) -> DispersionTest:
    """Cameron-Trivedi auxiliary regression test of ``psi = 1`` against ``psi > 1``.

    Regresses ``((y - mu)^2 - y) / mu`` on a constant; ``z`` is the t-ratio of
    that constant and the p-value its upper normal tail.
    """
    dof = t.n_observed - n_params(t.k)
    if dof <= 0:
        raise ZeroDegreesOfFreedom(f"k={t.k} leaves {dof} residual degrees of freedom")
    y = t.values()
    mu = np.array([fit.fitted[c] for c in t.observed_cells()])
    aux = ((y - mu) ** 2 - y) / mu
    est = aux.mean()
    se = aux.std(ddof=1) / math.sqrt(len(aux))
    if se == 0:
        z = math.copysign(math.inf, est) if est != 0 else 0.0
    else:
        z = est / se
    return DispersionTest(float(z), float(stats.norm.sf(z)))


def reserve(fit: GlmFit, t: RunOffTriangle) -> Reserves:
    return Reserves.from_cells(t.k, {c: predict_cell(fit, *c) for c in t.future_cells()})


def prediction_square(fit: GlmFit) -> np.ndarray:
    k = fit.k
    return np.array([[predict_cell(fit, i, j) for j in range(1, k + 1)] for i in range(1, k + 1)])
