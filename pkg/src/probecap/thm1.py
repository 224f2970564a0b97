"""Encoder probing with full decoder CSI: maximize I(X;Y|S) over P_A, P(X|S_e,A).

The objective depends on the decision variables only through
P(x|s) = sum_a P(a) sum_se P(se|s,a) P(x|se,a), which is linear in the products
P(a)P(x|se,a).  The problem is therefore concave in those products, and the
optimal value is concave in P_A.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .blahut import InfeasibleBudget
from .model import ProbingModel
from .probability import ZERO_MASS
from .results import SolveResult, SolverOptions
from .simplex import ascend, project_constrained

INV_LN2 = 1.0 / np.log(2.0)


@dataclass(frozen=True)
class Thm1Problem:
    ps: np.ndarray          # [s]
    W: np.ndarray           # [x, s, y]
    K: np.ndarray           # [s, a, se]
    hw: np.ndarray          # [x, s]  H(Y | X=x, S=s)
    cost: np.ndarray        # [a]
    in_cost: Optional[np.ndarray]
    in_bound: float

    @property
    def sizes(self):
        return self.K.shape[1], self.K.shape[2], self.W.shape[0]

    def reachable(self) -> np.ndarray:
        """[se, a] mask of rows of P(X|S_e,A) that can influence the output."""
        return (np.einsum("s,sae->ea", self.ps, self.K) > ZERO_MASS)


def thm1_problem(m: ProbingModel) -> Thm1Problem:
    if not m.encoder_only:
        raise ValueError("Theorem 1 needs an encoder-only model")
    if not m.decoder_has_csi():
        raise ValueError("Theorem 1 needs full state information at the decoder")
    W = m.channel_table
    with np.errstate(divide="ignore", invalid="ignore"):
        hw = -np.where(W > ZERO_MASS, W * np.log2(np.where(W > 0, W, 1)), 0).sum(axis=2)
    ic = m.input_constraint
    return Thm1Problem(
        ps=np.asarray(m.state.mass), W=W, K=m.encoder_probe(0), hw=hw,
        cost=m.cost.per_action.copy(),
        in_cost=None if ic is None else np.asarray(ic.cost),
        in_bound=np.inf if ic is None else float(ic.bound),
    )


def input_given_state(P: Thm1Problem, pa, px) -> np.ndarray:
    """P(x|s) induced by P_A and P(X|S_e,A)."""
    return np.einsum("a,sae,eax->sx", pa, P.K, px)


def state_informations(P: Thm1Problem, pxs) -> np.ndarray:
    """I(X;Y|S=s) for each state; ``pxs`` may carry leading batch axes."""
    q = np.einsum("...sx,xsy->...sy", pxs, P.W)
    with np.errstate(divide="ignore", invalid="ignore"):
        hq = -np.where(q > ZERO_MASS, q * np.log2(np.where(q > 0, q, 1)), 0).sum(axis=-1)
    return hq - np.einsum("...sx,xs->...s", pxs, P.hw)


def objective(P: Thm1Problem, pa, px, grad: bool = True):
    """I(X;Y|S) and its gradients with respect to P_A and P(X|S_e,A)."""
    pxs = input_given_state(P, pa, px)
    val = float(P.ps @ state_informations(P, pxs))
    if not grad:
        return val
    q = np.einsum("sx,xsy->sy", pxs, P.W)
    logq = np.log2(np.maximum(q, ZERO_MASS))
    G = P.ps[:, None] * (-np.einsum("xsy,sy->sx", P.W, logq + INV_LN2) - P.hw.T)
    g_px = np.einsum("a,sae,sx->eax", pa, P.K, G)
    g_pa = np.einsum("sae,eax,sx->a", P.K, px, G)
    return val, g_pa, g_px


def _input_weights_px(P: Thm1Problem, pa) -> np.ndarray:
    return np.einsum("a,s,sae,x->eax", pa, P.ps, P.K, P.in_cost)


def _input_weights_pa(P: Thm1Problem, px) -> np.ndarray:
    return np.einsum("s,sae,eax,x->a", P.ps, P.K, px, P.in_cost)


def solve_inner(P: Thm1Problem, pa, px0=None, opts: SolverOptions = SolverOptions()):
    """Concave maximization over P(X|S_e,A) with P_A held fixed."""
    na, nse, nx = P.sizes
    if px0 is None:
        px0 = np.full((nse, na, nx), 1.0 / nx)
    cons = []
    if P.in_cost is not None:
        cons.append((_input_weights_px(P, pa).reshape(-1, nx), P.in_bound))

    def fun(flat):
        px = flat.reshape(nse, na, nx)
        v, _, g = objective(P, pa, px)
        return v, g.reshape(-1, nx)

    def proj(flat):
        return project_constrained(flat, cons)

    x, val, trace = ascend(fun, np.asarray(px0).reshape(-1, nx), proj,
                           tol=opts.tol, max_iter=opts.max_iter)
    return x.reshape(nse, na, nx), val, trace


def _fast_path_action(P: Thm1Problem) -> Optional[int]:
    """Index of the probing action when P(A=that)=feasible max is optimal.

    Holds for two actions where the cheaper one reveals nothing about S: any
    P(x|s) reachable with less probing stays reachable with more.
    """
    na = P.K.shape[1]
    if na != 2 or P.cost[0] == P.cost[1]:
        return None
    cheap, dear = (0, 1) if P.cost[0] < P.cost[1] else (1, 0)
    rows = P.K[:, cheap, :]
    if not np.allclose(rows, rows[0:1], atol=1e-12):
        return None
    return dear


def _binary_interval(cost, gamma):
    c0, c1 = float(cost[0]), float(cost[1])
    if c1 == c0:
        return 0.0, 1.0
    q = (gamma - c0) / (c1 - c0)
    if c1 > c0:
        return 0.0, float(np.clip(q, 0.0, 1.0))
    return float(np.clip(q, 0.0, 1.0)), 1.0


def _golden_max(f, lo, hi, xtol=1e-7):
    """Maximize a concave scalar function on [lo, hi]; endpoints included."""
    cache = {}

    def F(x):
        if x not in cache:
            cache[x] = f(x)
        return cache[x][0]

    if hi - lo <= xtol:
        F(hi)
        F(lo)
    else:
        r = (np.sqrt(5) - 1) / 2
        a, b = lo, hi
        c, d = b - r * (b - a), a + r * (b - a)
        while b - a > xtol:
            if F(c) >= F(d):
                b, d = d, c
                c = b - r * (b - a)
            else:
                a, c = c, d
                d = a + r * (b - a)
        F(lo)
        F(hi)
        F(0.5 * (a + b))
    best = max(cache, key=lambda x: (cache[x][0], -abs(x - hi)))
    return best, cache[best]


def solve_thm1(m: ProbingModel, gamma: float, opts: SolverOptions = SolverOptions()) -> SolveResult:
    """C(gamma) = max I(X;Y|S) subject to E[Lambda(A)] <= gamma."""
    P = thm1_problem(m)
    if gamma < P.cost.min() - 1e-12:
        raise InfeasibleBudget(f"budget {gamma} below minimum action cost {P.cost.min()}")
    if P.in_cost is not None and P.in_cost.min() > P.in_bound + 1e-12:
        raise InfeasibleBudget("input constraint cannot be met by any input")
    na, nse, nx = P.sizes
    status = "converged"

    def point(pa, px0=None):
        px, val, trace = solve_inner(P, pa, px0, opts)
        return val, pa, px, trace

    if na == 1:
        val, pa, px, trace = point(np.ones(1))
        info = {"path": "single-action"}
    elif _fast_path_action(P) is not None:
        dear = _fast_path_action(P)
        cheap = 1 - dear
        q = float(np.clip((gamma - P.cost[cheap]) / (P.cost[dear] - P.cost[cheap]), 0, 1))
        pa = np.zeros(2)
        pa[dear], pa[cheap] = q, 1 - q
        val, pa, px, trace = point(pa)
        info = {"path": "pinned-action"}
    elif na == 2:
        lo, hi = _binary_interval(P.cost, gamma)
        warm = [None]

        def V(q):
            res = point(np.array([1 - q, q]), warm[0])
            warm[0] = res[2]
            return res

        _, (val, pa, px, trace) = _golden_max(V, lo, hi)
        info = {"path": "golden-section"}
    else:
        val, pa, px, trace = _alternating(P, gamma, opts)
        status = "multistart-best"
        info = {"path": "alternating"}

    pxs = input_given_state(P, pa, px)
    return SolveResult(
        value=val, argmax={"pa": pa, "px": px, "px_given_s": pxs},
        achieved_cost=float(pa @ P.cost), trace=trace, status=status,
        gamma=float(gamma), theorem="1", info=info,
    )


def _project_actions(P: Thm1Problem, gamma, px):
    cons = [(P.cost, gamma)]
    if P.in_cost is not None:
        cons.append((_input_weights_pa(P, px), P.in_bound))
    return lambda v: project_constrained(v[None, :], cons)[0]


def _alternating(P: Thm1Problem, gamma, opts: SolverOptions):
    na, nse, nx = P.sizes
    rng = np.random.default_rng(opts.seed)
    best = None
    for k in range(max(1, opts.multistarts)):
        if k == 0:
            pa0 = np.full(na, 1.0 / na)
            px = np.full((nse, na, nx), 1.0 / nx)
        else:
            alpha = 1.0 if k % 2 else 0.2
            pa0 = rng.dirichlet(np.full(na, alpha))
            px = rng.dirichlet(np.full(nx, alpha), size=(nse, na))
        pa = _project_actions(P, gamma, px)(pa0)
        val = -np.inf
        trace = []
        for _ in range(200):
            px, v_in, trace = solve_inner(P, pa, px, opts)

            def fun(x):
                v, g, _ = objective(P, x, px)
                return v, g

            pa, v_out, _ = ascend(fun, pa, _project_actions(P, gamma, px),
                                  tol=opts.tol, max_iter=opts.max_iter)
            if v_out - val <= 1e-12:
                val = max(val, v_out)
                break
            val = v_out
        px, val, trace = solve_inner(P, pa, px, opts)
        if best is None or val > best[0] + 1e-12:
            best = (val, pa, px, trace)
    return best


# -- exhaustive grid oracle -----------------------------------------------------

def simplex_lattice(k: int, resolution: float) -> np.ndarray:
    """All points of the k-simplex whose coordinates are multiples of ``resolution``."""
    n = int(round(1.0 / resolution))
    if abs(n * resolution - 1.0) > 1e-9:
        raise ValueError("resolution must divide 1")
    if k == 1:
        return np.ones((1, 1))
    pts = []
    for cuts in itertools.combinations(range(n + k - 1), k - 1):
        parts = np.diff((-1,) + cuts + (n + k - 1,)) - 1
        pts.append(parts)
    return np.array(pts, dtype=float) / n


def _index_product(n: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=int)
    return np.array(list(itertools.product(range(n), repeat=k)), dtype=int)


def free_parameters(P: Thm1Problem) -> int:
    na, nse, nx = P.sizes
    return (na - 1) + int(P.reachable().sum()) * (nx - 1)


def grid_oracle_thm1(m: ProbingModel, gamma: float, resolution: float = 0.01,
                     opts: SolverOptions = SolverOptions()) -> SolveResult:
    """Exhaustive search over a lattice of all free probabilities.

    For a fixed P_A and fixed rows shared by several states, the objective
    splits into independent per-state terms; rows private to one state are
    searched per state.  The argmax is exact over the full product lattice.
    """
    P = thm1_problem(m)
    if gamma < P.cost.min() - 1e-12:
        raise InfeasibleBudget(f"budget {gamma} below minimum action cost {P.cost.min()}")
    nfree = free_parameters(P)
    if nfree > 6:
        raise ValueError(f"{nfree} free parameters exceed the oracle limit of 6")
    na, nse, nx = P.sizes
    actions = simplex_lattice(na, resolution)
    actions = actions[actions @ P.cost <= gamma + 1e-12]
    rows_lat = simplex_lattice(nx, resolution)
    reach = P.reachable()
    ns = P.ps.shape[0]

    best = (-np.inf, None, None)
    work = 0.0
    for pa in actions:
        rows = [(e, a) for e in range(nse) for a in range(na) if reach[e, a] and pa[a] > 0]
        # contribution of row r to P(x|s): coef[r, s] * row
        coef = np.array([[pa[a] * P.K[s, a, e] for s in range(ns)] for e, a in rows]).reshape(len(rows), ns)
        feeds = [set(np.flatnonzero(coef[r] > 0)) for r in range(len(rows))]
        if P.in_cost is not None:
            shared = list(range(len(rows)))
            private = {s: [] for s in range(ns)}
        else:
            shared = [r for r in range(len(rows)) if len(feeds[r]) > 1]
            private = {s: [r for r in range(len(rows)) if feeds[r] == {s}] for s in range(ns)}
        n_sh = len(rows_lat) ** len(shared)
        work += n_sh * (1 + sum(len(rows_lat) ** len(v) for v in private.values()))
        if work > opts.oracle_work_cap:
            raise ValueError("oracle grid exceeds the work cap; coarsen the resolution")
        sh_idx = _index_product(len(rows_lat), len(shared))
        base = np.zeros((n_sh, ns, nx))
        for j, r in enumerate(shared):
            base += coef[r][None, :, None] * rows_lat[sh_idx[:, j]][:, None, :]
        if P.in_cost is not None:
            ok = np.einsum("s,bsx,x->b", P.ps, base, P.in_cost) <= P.in_bound + 1e-12
        else:
            ok = np.ones(n_sh, dtype=bool)
        total = np.zeros(n_sh)
        choice = {}
        for s in range(ns):
            priv = private[s]
            pv_idx = _index_product(len(rows_lat), len(priv))
            add = np.zeros((len(pv_idx), nx))
            for j, r in enumerate(priv):
                add += coef[r, s] * rows_lat[pv_idx[:, j]]
            pxs_s = base[:, None, s, :] + add[None, :, :]          # [b, p, x]
            full = np.zeros(pxs_s.shape[:2] + (ns, nx))
            full[:, :, s, :] = pxs_s
            vals = state_informations(P, full)[:, :, s]
            k = np.argmax(vals, axis=1)
            total += P.ps[s] * vals[np.arange(n_sh), k]
            choice[s] = (priv, pv_idx[k])
        total = np.where(ok, total, -np.inf)
        b = int(np.argmax(total))
        if total[b] > best[0] + 1e-15:
            px = np.full((nse, na, nx), 1.0 / nx)
            for j, r in enumerate(shared):
                e, a = rows[r]
                px[e, a] = rows_lat[sh_idx[b, j]]
            for s in range(ns):
                priv, picks = choice[s]
                for j, r in enumerate(priv):
                    e, a = rows[r]
                    px[e, a] = rows_lat[picks[b, j]]
            best = (float(total[b]), pa.copy(), px)
    if best[1] is None:
        raise InfeasibleBudget("no lattice point satisfies the constraints")
    val, pa, px = best
    return SolveResult(
        value=val, argmax={"pa": pa, "px": px, "px_given_s": input_given_state(P, pa, px)},
        achieved_cost=float(pa @ P.cost), trace=[val], status="oracle",
        gamma=float(gamma), theorem="1",
        info={"resolution": resolution, "free_parameters": nfree},
    )
