"""Blahut-Arimoto with input costs, and capacity-cost values for families of
channels combined by time sharing (the concave envelope of their curves)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .probability import ZERO_MASS

LN2 = np.log(2.0)


class InfeasibleBudget(ValueError):
    """Budget below the cheapest available cost."""


def _row_divergence(W: np.ndarray, q: np.ndarray) -> np.ndarray:
    """D(W_u || q) in bits for every row u."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(W > ZERO_MASS, W / np.maximum(q, 1e-300)[None, :], 1.0)
        terms = np.where(W > ZERO_MASS, W * np.log2(ratio), 0.0)
    return terms.sum(axis=1)


def mutual_information_io(p: np.ndarray, W: np.ndarray) -> float:
    """I(U;V) in bits for input law p and channel rows W[u, v]."""
    q = p @ W
    return float(p @ _row_divergence(W, q))


def ba_lagrangian(W: np.ndarray, cost: np.ndarray, s: float, p0=None,
                  tol: float = 1e-10, max_iter: int = 100000):
    """Maximize I(p) - s * E_p[cost] over input laws p.

    Returns (p, value_lower, value_upper, trace); the trace of the Lagrangian
    is nondecreasing.
    """
    W = np.asarray(W, dtype=float)
    cost = np.asarray(cost, dtype=float)
    n = W.shape[0]
    p = np.full(n, 1.0 / n) if p0 is None else np.asarray(p0, dtype=float).copy()
    p = np.where(p > 0, p, 1e-12)
    p /= p.sum()
    trace = []
    lower = upper = 0.0
    for _ in range(max_iter):
        d = _row_divergence(W, p @ W) - s * cost
        lower = float(p @ d)
        upper = float(d.max())
        trace.append(lower)
        if upper - lower < tol:
            break
        logits = np.log(np.maximum(p, 1e-300)) + LN2 * (d - upper)
        p = np.exp(logits - logits.max())
        p /= p.sum()
    return p, lower, upper, trace


@dataclass
class CapacityCost:
    value: float
    weights: np.ndarray          # mixing law over channels
    inputs: list                 # input law per channel
    achieved_cost: float
    dual_value: float
    multiplier: float
    trace: list = field(default_factory=list)


def _eval(channels, weights, s, warm, tol):
    out = []
    for k, (W, c) in enumerate(channels):
        p, lo, up, tr = ba_lagrangian(W, c, s, p0=warm[k], tol=tol)
        out.append((p, lo, up, tr, float(p @ c)))
        warm[k] = p
    if weights is None:
        phis = np.array([o[1] for o in out])
        best = phis.max()
        ties = [k for k in range(len(out)) if phis[k] >= best - tol]
        k_star = min(ties, key=lambda k: (out[k][4], k))
        w = np.zeros(len(out))
        w[k_star] = 1.0
    else:
        w = np.asarray(weights, dtype=float)
    cost = float(sum(w[k] * out[k][4] for k in range(len(out))))
    dual = float(sum(w[k] * out[k][2] for k in range(len(out)))) if weights is not None \
        else max(o[2] for o in out)
    return out, w, cost, dual


def _restricted_capacity(channels, weights, floor, tol):
    """Capacity when only the cheapest inputs may be used (budget at the floor)."""
    out = []
    for W, c in channels:
        keep = np.flatnonzero(c <= floor + 1e-12)
        if keep.size == 0:
            out.append((None, -np.inf, []))
            continue
        p_sub, lo, _, tr = ba_lagrangian(W[keep], c[keep], 0.0, tol=tol)
        p = np.zeros(W.shape[0])
        p[keep] = p_sub
        out.append((p, lo, tr))
    if weights is None:
        k = int(np.argmax([o[1] for o in out]))
        w = np.zeros(len(out))
        w[k] = 1.0
    else:
        w = np.asarray(weights, dtype=float)
        if any(o[0] is None for o, wk in zip(out, w) if wk > 0):
            raise InfeasibleBudget("a channel with positive weight has no input at the floor")
    inputs = [o[0] if o[0] is not None else np.full(ch[0].shape[0], 1.0 / ch[0].shape[0])
              for o, ch in zip(out, channels)]
    value = float(sum(wk * mutual_information_io(p, ch[0])
                      for wk, p, ch in zip(w, inputs, channels) if wk > 0))
    cost = float(sum(wk * p @ ch[1] for wk, p, ch in zip(w, inputs, channels) if wk > 0))
    trace = out[int(np.argmax(w))][2]
    return CapacityCost(value, w, inputs, cost, value, np.inf, trace)


def capacity_cost(channels, gamma: float, weights=None, tol: float = 1e-10,
                  max_bisect: int = 80) -> CapacityCost:
    """Capacity-cost value of a channel family under E[cost] <= gamma.

    ``channels`` is a list of (W[u, v], cost[u]).  With ``weights=None`` the
    mixing law over channels is optimized too (time sharing across channels);
    otherwise it is held fixed and only the per-channel budgets are split.
    The dual min_s [s*gamma + g(s)] is located by bisection on the achieved
    cost, and the primal point mixes the solutions that bracket the budget.
    """
    channels = [(np.asarray(W, float), np.asarray(c, float)) for W, c in channels]
    if weights is None:
        floor = min(c.min() for _, c in channels)
    else:
        floor = sum(wk * c.min() for wk, (_, c) in zip(weights, channels))
    if gamma < floor - 1e-12:
        raise InfeasibleBudget(f"budget {gamma} below minimum cost {floor}")
    if gamma <= floor + 1e-12:
        return _restricted_capacity(channels, weights, floor, tol)

    warm = [None] * len(channels)
    out0, w0, cost0, dual0 = _eval(channels, weights, 0.0, warm, tol)
    if cost0 <= gamma:
        return _assemble(channels, out0, w0, None, None, 1.0, 0.0, dual0)

    s_lo, lo = 0.0, (out0, w0, cost0)
    s_hi = 1.0
    while True:
        hi = _eval(channels, weights, s_hi, warm, tol)[:3]
        if hi[2] <= gamma or s_hi > 1e9:
            break
        s_lo, lo = s_hi, hi
        s_hi *= 2.0
    for _ in range(max_bisect):
        if s_hi - s_lo <= 1e-12 * max(1.0, s_hi):
            break
        mid = 0.5 * (s_lo + s_hi)
        res = _eval(channels, weights, mid, warm, tol)[:3]
        if res[2] > gamma:
            s_lo, lo = mid, res
        else:
            s_hi, hi = mid, res
        if abs(res[2] - gamma) < 1e-13:
            s_lo = s_hi = mid
            lo = hi = res
            break
    c_lo, c_hi = lo[2], hi[2]
    lam = 1.0 if c_lo - c_hi < 1e-15 else (gamma - c_hi) / (c_lo - c_hi)
    lam = float(np.clip(lam, 0.0, 1.0))
    dual = min(s_hi * gamma + _eval(channels, weights, s_hi, warm, tol)[3],
               s_lo * gamma + _eval(channels, weights, s_lo, warm, tol)[3])
    return _assemble(channels, lo[0], lo[1], hi[0], hi[1], lam, s_hi, dual)


def _assemble(channels, out_lo, w_lo, out_hi, w_hi, lam, s, dual):
    """Mix the bracketing solutions (lam on the 'lo' side) into one input law per channel."""
    n = len(channels)
    if out_hi is None:
        weights = np.asarray(w_lo, float)
        inputs = [o[0] for o in out_lo]
        trace = out_lo[int(np.argmax(weights))][3]
    else:
        weights = lam * np.asarray(w_lo, float) + (1 - lam) * np.asarray(w_hi, float)
        inputs = []
        for k in range(n):
            a, b = lam * w_lo[k], (1 - lam) * w_hi[k]
            if a + b > 0:
                inputs.append((a * out_lo[k][0] + b * out_hi[k][0]) / (a + b))
            else:
                inputs.append(out_hi[k][0])
        trace = out_hi[int(np.argmax(w_hi))][3]
    value = float(sum(weights[k] * mutual_information_io(inputs[k], channels[k][0])
                      for k in range(n) if weights[k] > 0))
    cost = float(sum(weights[k] * inputs[k] @ channels[k][1] for k in range(n) if weights[k] > 0))
    return CapacityCost(value, weights, inputs, cost, float(dual), float(s), list(trace))
