"""Cost-capacity curves: sweeps over the budget, post-hoc shape checks, cutoff
points, concave envelopes and the time-sharing baseline."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

SHAPE_TOL = 2e-3


@dataclass
class SweepCurve:
    gammas: np.ndarray
    values: np.ndarray
    results: list = field(default_factory=list)   # SolveResult or None per point
    errors: dict = field(default_factory=dict)    # index -> message of failed points
    solver: Optional[Callable] = None             # gamma -> SolveResult, for refinement
    shape_tol: float = SHAPE_TOL

    def __post_init__(self):
        self.gammas = np.asarray(self.gammas, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.gammas.shape != self.values.shape:
            raise ValueError("gammas and values differ in length")
        if np.any(np.diff(self.gammas) <= 0):
            raise ValueError("gammas must be strictly increasing")

    @property
    def monotone(self) -> bool:
        if self.errors:
            return False
        return bool(np.all(np.diff(self.values) >= -self.shape_tol))

    @property
    def concave(self) -> bool:
        if self.errors:
            return False
        g, v = self.gammas, self.values
        for i in range(len(g)):
            for j in range(i + 2, len(g)):
                for k in range(i + 1, j):
                    lam = (g[j] - g[k]) / (g[j] - g[i])
                    if v[k] < lam * v[i] + (1 - lam) * v[j] - self.shape_tol:
                        return False
        return True

    def rows(self):
        for i, (g, v) in enumerate(zip(self.gammas, self.values)):
            r = self.results[i] if i < len(self.results) else None
            if i in self.errors:
                yield g, float("nan"), float("nan"), "failed"
            else:
                yield (g, v, r.achieved_cost if r is not None else float("nan"),
                       r.status if r is not None else "derived")

    def to_csv(self, path, meta: Optional[dict] = None):
        with open(path, "w") as fh:
            for k, val in (meta or {}).items():
                fh.write(f"# {k}: {json.dumps(val, sort_keys=True)}\n")
            fh.write("gamma,value_bits,achieved_cost,status\n")
            for g, v, c, s in self.rows():
                fh.write(f"{float(g)!r},{float(v)!r},{float(c)!r},{s}\n")

    def to_json(self, meta: Optional[dict] = None) -> dict:
        return {
            "meta": meta or {},
            "monotone": self.monotone, "concave": self.concave,
            "points": [
                {"gamma": float(g), "error": self.errors[i]} if i in self.errors
                else (self.results[i].to_json() if i < len(self.results) and self.results[i]
                      is not None else {"gamma": float(g), "value_bits": float(v)})
                for i, (g, v) in enumerate(zip(self.gammas, self.values))
            ],
        }


def parse_grid(spec: str) -> np.ndarray:
    """'start:stop:count' -> evenly spaced grid (count >= 2)."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid spec {spec!r} is not start:stop:count")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 2 or not stop > start:
        raise ValueError(f"grid spec {spec!r} needs count >= 2 and stop > start")
    return np.linspace(start, stop, count)


def default_grid(m, points: int = 51) -> np.ndarray:
    return np.linspace(m.cost.min_cost, m.cost.max_cost, points)


def _workers() -> int:
    env = os.environ.get("PROBECAP_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


def sweep(solver: Callable, m, gamma_grid, opts=None) -> SweepCurve:
    """Solve every grid point; results are reduced in grid order.

    ``solver`` has the signature solver(m, gamma, opts).  Failed points are
    recorded in ``errors`` and make the shape flags false.
    """
    gammas = np.asarray(gamma_grid, dtype=float)

    def one(g):
        try:
            return solver(m, float(g), opts) if opts is not None else solver(m, float(g))
        except Exception as exc:  # reported per point
            return exc

    n = _workers()
    if n == 1 or len(gammas) == 1:
        out = [one(g) for g in gammas]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            out = list(pool.map(one, gammas))
    results, values, errors = [], [], {}
    for i, r in enumerate(out):
        if isinstance(r, Exception):
            errors[i] = f"{type(r).__name__}: {r}"
            results.append(None)
            values.append(np.nan)
        else:
            results.append(r)
            values.append(r.value)

    def refine(g):
        return solver(m, float(g), opts) if opts is not None else solver(m, float(g))

    return SweepCurve(gammas, np.array(values), results, errors, refine)


def cutoff_point(curve: SweepCurve, tol: float = 1e-3, refine_tol: float = 1e-6,
                 max_bisect: int = 40) -> float:
    """Smallest budget whose value reaches the curve maximum.

    The grid localizes the cutoff with ``tol``; when the curve carries its
    solver, the bracket is then bisected with the stricter ``refine_tol``.
    """
    g, v = curve.gammas, curve.values
    if curve.errors:
        raise ValueError(f"curve has failed points {sorted(curve.errors)}")
    if np.any(np.diff(v) < -tol):
        raise ValueError("curve is not nondecreasing within tol")
    top = v.max()
    i = int(np.argmax(v >= top - tol))
    if curve.solver is None or i == 0:
        return float(g[i])
    # bisect on [g[j], g[k]] where the stricter criterion switches
    k = int(np.argmax(v >= top - refine_tol))
    lo, hi = float(g[max(k - 1, 0)]), float(g[k])
    if k == 0:
        return float(g[0])
    for _ in range(max_bisect):
        if hi - lo < 1e-6:
            break
        mid = 0.5 * (lo + hi)
        if curve.solver(mid).value >= top - refine_tol:
            hi = mid
        else:
            lo = mid
    return hi


def upper_concave_envelope(curve: SweepCurve) -> SweepCurve:
    """Least concave majorant on the grid (upper hull of the points)."""
    g, v = curve.gammas, curve.values
    hull = []
    for i in range(len(g)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b if it lies on or below the chord a -> i
            if (v[b] - v[a]) * (g[i] - g[a]) <= (v[i] - v[a]) * (g[b] - g[a]):
                hull.pop()
            else:
                break
        hull.append(i)
    env = np.interp(g, g[hull], v[hull])
    env = np.maximum(env, v)
    return SweepCurve(g.copy(), env, list(curve.results), dict(curve.errors), None,
                      curve.shape_tol)


def time_sharing_baseline(c0: float, c1: float, gamma_grid) -> SweepCurve:
    """(1 - gamma) * C(0) + gamma * C(1)."""
    g = np.asarray(gamma_grid, dtype=float)
    return SweepCurve(g, (1 - g) * c0 + g * c1)
