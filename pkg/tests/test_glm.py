import math
import time
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fuzzyreserve import RunOffTriangle, estimate_dispersion, fit_poisson, overdispersion_test, predict_cell, reserve
from fuzzyreserve.glm import (
    IndexOutOfRange,
    NotConverged,
    ZeroDegreesOfFreedom,
    coefficient_names,
    design_matrix,
    design_row,
    prediction_square,
)
from oracles import chain_ladder
from synth import additive_triangle, random_triangle


@pytest.fixture(scope="module")
def fit(ta):
    return fit_poisson(ta)


def test_taylor_ashe_coefficients(fit):
    assert fit.converged
    assert fit.tau == pytest.approx(12.506, abs=1e-3)
    assert fit.alpha[0] == pytest.approx(0.331, abs=1e-3)
    # reference value 0.912 is truncated; the estimate is 0.91253
    assert fit.beta[0] == pytest.approx(0.912, abs=1e-3)


def test_predict_cell(fit):
    assert predict_cell(fit, 2, 2) == pytest.approx(936779.49, abs=0.5)
    assert predict_cell(fit, 1, 10) == pytest.approx(67948.00, abs=0.5)
    assert predict_cell(fit, 1, 1) == pytest.approx(math.exp(fit.tau), rel=1e-15)


def test_predict_out_of_range(fit):
    with pytest.raises(IndexOutOfRange):
        predict_cell(fit, 11, 1)
    with pytest.raises(IndexOutOfRange):
        predict_cell(fit, 1, 0)


def test_dispersion(fit, ta):
    assert estimate_dispersion(fit, ta) == pytest.approx(52601.93, rel=0.01)
    assert fit.psi == estimate_dispersion(fit, ta)


def test_overdispersion(fit, ta):
    res = overdispersion_test(fit, ta)
    assert 3.9 <= res.z <= 4.9
    assert res.p_value < 1e-4


def test_reserve(fit, ta):
    r = reserve(fit, ta)
    assert r.total == pytest.approx(18_680_856, rel=1e-3)
    assert r.per_origin[0] == 0.0
    assert math.fsum(r.per_origin) == pytest.approx(r.total, rel=1e-15)


def test_saturated_k2():
    t = RunOffTriangle.from_rows([[100, 50], [200]])
    f = fit_poisson(t)
    for c in t.observed_cells():
        assert f.fitted[c] == pytest.approx(t[c], rel=1e-9)
    assert reserve(f, t).total == pytest.approx(100, rel=1e-9)
    assert math.isnan(f.psi)
    with pytest.raises(ZeroDegreesOfFreedom):
        estimate_dispersion(f, t)


def test_k1():
    t = RunOffTriangle(1, {(1, 1): 5.0})
    f = fit_poisson(t)
    assert f.tau == pytest.approx(math.log(5))
    assert reserve(f, t).total == 0
    assert prediction_square(f).shape == (1, 1)


def test_exact_fit_dispersion_zero():
    t = additive_triangle(4)
    f = fit_poisson(t)
    assert estimate_dispersion(f, t) == pytest.approx(0, abs=1e-12)
    assert overdispersion_test(f, t).z < 0


@pytest.mark.parametrize("seed", range(10))
def test_chain_ladder_oracle(seed):
    rng = np.random.default_rng(seed)
    t = random_triangle(rng, int(rng.integers(3, 6)))
    f = fit_poisson(t)
    cl_fitted, cl_reserve = chain_ladder(t.to_array())
    for (i, j) in t.observed_cells():
        assert f.fitted[(i, j)] == pytest.approx(cl_fitted[i - 1, j - 1], rel=1e-6)
    assert reserve(f, t).total == pytest.approx(cl_reserve, rel=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 7))
def test_marginals(seed, k):
    t = random_triangle(np.random.default_rng(seed), k, noise=1.0)
    f = fit_poisson(t)
    arr = t.to_array()
    fit_arr = np.full_like(arr, np.nan)
    for (i, j), v in f.fitted.items():
        fit_arr[i - 1, j - 1] = v
    np.testing.assert_allclose(np.nansum(fit_arr, 1), np.nansum(arr, 1), rtol=1e-6)
    np.testing.assert_allclose(np.nansum(fit_arr, 0), np.nansum(arr, 0), rtol=1e-6)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_scaling_equivariance(seed, c):
    t = random_triangle(np.random.default_rng(seed), 5)
    scaled = t.with_values(t.values() * c)
    f, g = fit_poisson(t), fit_poisson(scaled)
    assert g.tau == pytest.approx(f.tau + math.log(c), abs=1e-8)
    np.testing.assert_allclose(g.alpha, f.alpha, atol=1e-8)
    np.testing.assert_allclose(g.beta, f.beta, atol=1e-8)
    assert reserve(g, scaled).total == pytest.approx(c * reserve(f, t).total, rel=1e-8)


def test_pure_poisson_not_rejected():
    hits = 0
    n_seeds = 200
    for seed in range(n_seeds):
        rng = np.random.default_rng(seed)
        y = rng.poisson(10, 55).astype(float)
        while (y <= 0).any():
            y[y <= 0] = rng.poisson(10, int((y <= 0).sum()))
        t = RunOffTriangle.from_rows(_rows(y))
        res = overdispersion_test(fit_poisson(t), t)
        hits += res.p_value > 0.05
    assert hits >= 0.9 * n_seeds


def _rows(y):
    rows, pos = [], 0
    for width in range(10, 0, -1):
        rows.append(y[pos: pos + width])
        pos += width
    return rows


def test_design():
    assert coefficient_names(3) == ["tau", "alpha_2", "alpha_3", "beta_2", "beta_3"]
    assert design_row(3, 1, 1).tolist() == [1, 0, 0, 0, 0]
    assert design_row(3, 3, 2).tolist() == [1, 0, 1, 1, 0]
    assert design_matrix(3, [(2, 2), (1, 3)]).tolist() == [[1, 1, 0, 1, 0], [1, 0, 0, 0, 1]]


def test_not_converged_warns(ta):
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        f = fit_poisson(ta, max_iter=1)
    assert not f.converged
    assert any(issubclass(x.category, NotConverged) for x in w)


def test_runtime(ta):
    start = time.perf_counter()
    fit_poisson(ta)
    assert time.perf_counter() - start < 1.0
