"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools

import numpy as np


def chain_ladder(arr: np.ndarray):
    """Chain-ladder on a ``k x k`` incremental array with NaN future cells.

    Returns ``(fitted, reserve)``: the backward-reconstructed incremental
    means on the observed cells (NaN elsewhere) and the total reserve.
    """
    k = arr.shape[0]
    cum = np.nancumsum(arr, axis=1)
    latest = [k - i for i in range(k)]  # 1-based latest development per row
    f = np.ones(k)
    for j in range(k - 1):
        rows = [i for i in range(k) if latest[i] >= j + 2]
        f[j] = cum[rows, j + 1].sum() / cum[rows, j].sum()
    proj = np.zeros((k, k))
    for i in range(k):
        d = latest[i] - 1
        proj[i, d] = cum[i, d]
        for j in range(d + 1, k):
            proj[i, j] = proj[i, j - 1] * f[j - 1]
        for j in range(d - 1, -1, -1):
            proj[i, j] = proj[i, j + 1] / f[j]
    inc = np.diff(proj, axis=1, prepend=0.0)
    fitted = np.where(np.isnan(arr), np.nan, inc)
    reserve = float(sum(proj[i, k - 1] - proj[i, latest[i] - 1] for i in range(k)))
    return fitted, reserve


def vertex_min(A: np.ndarray, b: np.ndarray, c: np.ndarray, tol: float = 1e-9):
    """Minimum of ``c.x`` over ``{x : A x <= b}`` by enumerating vertices.

    Equalities should be passed as two opposite inequalities.  Returns
    ``None`` if no vertex is feasible.
    """
    m, n = A.shape
    combos = np.array(list(itertools.combinations(range(m), n)))
    sub_a = A[combos]
    sub_b = b[combos]
    ok = np.abs(np.linalg.det(sub_a)) > 1e-10
    if not ok.any():
        return None
    xs = np.linalg.solve(sub_a[ok], sub_b[ok][..., None])[..., 0]
    scale = 1.0 + np.abs(b)
    feas = np.all(xs @ A.T <= b + tol * scale, axis=1)
    if not feas.any():
        return None
    return float(np.min(xs[feas] @ c))


def random_lp(rng: np.random.Generator):
    """Random feasible bounded LP in two forms.

    Returns ``(problem_args, (A, b, c))`` where ``problem_args`` holds the
    objective, constraint list and bounds for :class:`LpProblem`, and the
    second element is the same feasible set as ``A x <= b``.
    """
    n = int(rng.integers(1, 7))
    m = int(rng.integers(1, 9))
    x0 = rng.uniform(-3, 3, n)
    c = rng.normal(size=n)
    rows, rhs, cons = [], [], []
    for _ in range(m):
        a = np.round(rng.normal(size=n), 3)
        rel = rng.choice(["<=", ">=", "="], p=[0.45, 0.45, 0.10])
        slack = rng.uniform(0, 2)
        if rel == "<=":
            r = a @ x0 + slack
            rows.append(a); rhs.append(r)
        elif rel == ">=":
            r = a @ x0 - slack
            rows.append(-a); rhs.append(-r)
        else:
            r = a @ x0
            rows.append(a); rhs.append(r)
            rows.append(-a); rhs.append(-r)
        cons.append((a, str(rel), float(r)))
    # box [-5, 5]: sometimes as variable bounds, sometimes as rows on a free variable
    bounds = []
    for j in range(n):
        e = np.zeros(n); e[j] = 1.0
        rows.append(e); rhs.append(5.0)
        rows.append(-e); rhs.append(5.0)
        mode = rng.integers(3)
        if mode == 0:
            bounds.append((-5.0, 5.0))
        elif mode == 1:
            bounds.append((None, None))
            cons.append((e, "<=", 5.0))
            cons.append((e, ">=", -5.0))
        else:
            bounds.append((-5.0, None))
            cons.append((e, "<=", 5.0))
    A = np.array(rows)
    b = np.array(rhs)
    return (c, cons, bounds), (A, b, c)
