"""Euclidean projections onto (products of) probability simplices and a
projected-gradient ascent loop with Armijo backtracking."""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Project each row (last axis) of ``v`` onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    shape = v.shape
    x = v.reshape(-1, shape[-1])
    n = x.shape[1]
    u = -np.sort(-x, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    k = np.arange(1, n + 1)
    cond = u - css / k > 0
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(x.shape[0]), rho] / (rho + 1)
    return np.maximum(x - theta[:, None], 0.0).reshape(shape)


def project_simplex_halfspace(v: np.ndarray, w: np.ndarray, bound: float,
                              iters: int = 200) -> np.ndarray:
    """Project rows of ``v`` onto prod(simplex) intersected with sum(w*x) <= bound.

    KKT: x = P_simplex(v - mu*w) for the smallest mu >= 0 meeting the bound.
    """
    v = np.asarray(v, dtype=float)
    w = np.broadcast_to(np.asarray(w, dtype=float), v.shape)
    floor = w.reshape(-1, v.shape[-1]).min(axis=1).sum()
    if floor > bound + 1e-12:
        raise ValueError(f"linear constraint infeasible: minimum {floor} > {bound}")
    x = project_simplex(v)
    if (w * x).sum() <= bound:
        return x
    if bound <= floor + 1e-12:
        # only the cheapest coordinates of each row survive
        rows_w = w.reshape(-1, v.shape[-1])
        cheap = rows_w <= rows_w.min(axis=1, keepdims=True) + 1e-12
        big = np.where(cheap, v.reshape(rows_w.shape), -1e300)
        out = np.zeros_like(big)
        for i, (row, mask) in enumerate(zip(big, cheap)):
            out[i, mask] = project_simplex(row[mask])
        return out.reshape(v.shape)

    def excess(mu):
        return (w * project_simplex(v - mu * w)).sum() - bound

    hi = 1.0
    while excess(hi) > 0:
        hi *= 2.0
        if hi > 1e12:
            break
    # the load is continuous, piecewise linear and nonincreasing in mu
    mu = brentq(excess, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                maxiter=iters)
    return project_simplex(v - mu * w)


def project_constrained(v: np.ndarray, constraints=(), iters: int = 500,
                        tol: float = 1e-13) -> np.ndarray:
    """Project rows of ``v`` onto prod(simplex) with linear constraints.

    ``constraints`` is a sequence of (w, bound) meaning sum(w*x) <= bound.
    One constraint is solved exactly; several use Dykstra's algorithm with the
    first constraint folded into the simplex step.
    """
    constraints = list(constraints)
    if not constraints:
        return project_simplex(v)
    w0, b0 = constraints[0]
    if len(constraints) == 1:
        return project_simplex_halfspace(v, w0, b0)
    rest = [(np.broadcast_to(np.asarray(w, float), v.shape), b) for w, b in constraints[1:]]
    x = np.asarray(v, dtype=float).copy()
    incs = [np.zeros_like(x) for _ in range(len(rest) + 1)]
    for _ in range(iters):
        prev = x
        y = project_simplex_halfspace(x + incs[0], w0, b0)
        incs[0] = x + incs[0] - y
        x = y
        for i, (w, b) in enumerate(rest):
            z = x + incs[i + 1]
            viol = (w * z).sum() - b
            y = z - max(viol, 0.0) * w / max((w * w).sum(), 1e-300)
            incs[i + 1] = z - y
            x = y
        if np.abs(x - prev).max() < tol:
            break
    return project_simplex_halfspace(x, w0, b0)


def ascend(fun, x0, project, tol: float = 1e-12, max_iter: int = 5000,
           step0: float = 1.0, shrink: float = 0.5, armijo: float = 1e-4,
           patience: int = 1, adaptive: bool = False):
    """Maximize ``fun`` (returns value, gradient) over the set behind ``project``.

    Every iteration backtracks from ``step0`` (or, with ``adaptive``, from twice
    the last accepted step).  The loop stops once the gain stays below ``tol``
    for ``patience`` consecutive iterations.  Returns (x, value, trace).
    """
    x = project(np.asarray(x0, dtype=float))
    val, grad = fun(x)
    trace = [val]
    t_last = step0
    stalled = 0
    for _ in range(max_iter):
        t = min(2.0 * t_last, 1e6) if adaptive else step0
        while True:
            cand = project(x + t * grad)
            d = cand - x
            cval, cgrad = fun(cand)
            if cval >= val + armijo * float((grad * d).sum()):
                break
            t *= shrink
            if t < 1e-16:
                cand, cval, cgrad = x, val, grad
                break
        moved = float(np.abs(cand - x).max())
        gain = cval - val
        x, val, grad = cand, cval, cgrad
        trace.append(val)
        t_last = max(t, 1e-12)
        stalled = stalled + 1 if gain <= tol else 0
        if moved < 1e-13 or stalled >= patience:
            break
    return x, val, trace
