"""Classical and hybrid fuzzy log-Poisson claims reserving."""

from .bootstrap import BootstrapConfig, BootstrapResult, bootstrap_reserve, pearson_residuals
from .datasets import load_taylor_ashe
from .fuzzy import Interval, Tfn, alpha_cut, defuzzify_exp_closed, defuzzify_weighted, linear_combination, membership
from .glm import GlmFit, estimate_dispersion, fit_poisson, overdispersion_test, predict_cell, reserve
from .hybrid import (
    FuzzyModel,
    HybridConfig,
    compute_h_star,
    fit_flr_atfc,
    fit_hybrid,
    hybrid_reserve,
    predict_crisp,
    predict_fuzzy,
)
from .lp import LpProblem, LpSolution, solve
from .triangle import Reserves, RunOffTriangle, future_cells, observed_cells, parse_triangle, read_triangle

__version__ = "0.1.0"
