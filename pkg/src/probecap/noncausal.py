"""Non-causal encoder probing: multistart lower bound on

    max  I(A,U; Y,S_d) - I(U; S_e | A)

over P_A, P(U|S_e,A) and a deterministic map X = f(U, S_e).

The objective is written as H(Y,S_d) - H(A,U,Y,S_d) - H(A,S_e) + H(A,U,S_e) + H(A).
During the ascent f is relaxed to a stochastic kernel q(x|u,s_e); the objective
is convex in q (the terms that involve q add up to I(A,U;Y,S_d) - H(A,U), and
mutual information is convex in the channel, which is linear in q), so rounding
every row to its best vertex never loses value.
"""

from __future__ import annotations

import numpy as np

from .blahut import InfeasibleBudget
from .model import ProbingModel, joint_thm2, thm2_aux_bound
from .probability import conditional_mutual_information, mutual_information
from .results import SolveResult, SolverOptions
from .simplex import ascend, project_simplex, project_simplex_halfspace

LN2 = np.log(2.0)
LOG_FLOOR = 1e-14


def _ent(M):
    p = M[M > 0]
    return float(-(p * np.log2(p)).sum())


def _dent(M):
    """dH/dM elementwise (bits), with a floor so that empty cells stay finite."""
    return -(np.log2(np.maximum(M, LOG_FLOOR)) + 1.0 / LN2)


class Thm2Objective:
    """Objective and gradient in (pa[a], pu[a,e,u], q[u,e,x])."""

    def __init__(self, m: ProbingModel, n_u: int):
        ps = np.asarray(m.state.mass)
        P = m.probe_table[:, :, 0]          # [s, a, e, d]
        W = m.channel_table                 # [x, s, y]
        T = ps[:, None, None, None] * P
        self.TW = np.einsum("saed,xsy->aedxy", T, W)
        self.R = T.sum(axis=(0, 3))                   # [a, e]
        self.na, self.ne = self.R.shape
        self.nx = W.shape[0]
        self.nu = n_u

    def sizes(self):
        return self.na, self.na * self.ne * self.nu, self.nu * self.ne * self.nx

    def unpack(self, z):
        n1, n2, _ = self.sizes()
        pa = z[:n1]
        pu = z[n1:n1 + n2].reshape(self.na, self.ne, self.nu)
        q = z[n1 + n2:].reshape(self.nu, self.ne, self.nx)
        return pa, pu, q

    @staticmethod
    def pack(pa, pu, q):
        return np.concatenate([pa.ravel(), pu.ravel(), q.ravel()])

    def value(self, pa, pu, q, grad=False):
        B = np.einsum("uex,aedxy->aeudy", q, self.TW)
        M1 = np.einsum("a,aeu,aeudy->auyd", pa, pu, B)
        M2 = M1.sum(axis=(0, 1))
        M3 = pa[:, None] * self.R
        M4 = M3[:, :, None] * pu
        val = _ent(M2) - _ent(M1) - _ent(M3) + _ent(M4) + _ent(pa)
        if not grad:
            return val
        G1 = _dent(M2)[None, None] - _dent(M1)
        L3, L4, L5 = _dent(M3), _dent(M4), _dent(pa)
        g_pa = (np.einsum("auyd,aeu,aeudy->a", G1, pu, B)
                - (L3 * self.R).sum(axis=1)
                + np.einsum("aeu,ae,aeu->a", L4, self.R, pu) + L5)
        g_pu = (pa[:, None, None] * np.einsum("auyd,aeudy->aeu", G1, B)
                + L4 * (pa[:, None] * self.R)[:, :, None])
        g_q = np.einsum("auyd,a,aeu,aedxy->uex", G1, pa, pu, self.TW)
        return val, g_pa, g_pu, g_q


def _round_vertices(obj: Thm2Objective, pa, pu, q):
    """Replace every row of q by its best vertex (greedy, row by row)."""
    q = q.copy()
    best = obj.value(pa, pu, q)
    for u in range(obj.nu):
        for e in range(obj.ne):
            row_best, row_val = None, -np.inf
            for x in range(obj.nx):
                q[u, e] = 0.0
                q[u, e, x] = 1.0
                v = obj.value(pa, pu, q)
                if v > row_val + 1e-15:
                    row_best, row_val = x, v
            q[u, e] = 0.0
            q[u, e, row_best] = 1.0
            best = row_val
    return q, best


def _ascend_free(obj, pa, pu, q, cost, gamma, opts, fix_q=False):
    n1, n2, _ = obj.sizes()

    def project(z):
        pa_, pu_, q_ = obj.unpack(z)
        pa_ = project_simplex_halfspace(pa_, cost, gamma)
        pu_ = project_simplex(pu_)
        q_ = q if fix_q else project_simplex(q_)
        return obj.pack(pa_, pu_, q_)

    def fun(z):
        v, ga, gu, gq = obj.value(*obj.unpack(z), grad=True)
        if fix_q:
            gq = np.zeros_like(gq)
        return v, obj.pack(ga, gu, gq)

    z, val, trace = ascend(fun, obj.pack(pa, pu, q), project, tol=opts.tol,
                           max_iter=opts.max_iter, patience=3, adaptive=True)
    return (*obj.unpack(z), val, trace)


def _starts(obj: Thm2Objective, opts: SolverOptions):
    rng = np.random.default_rng(opts.seed)
    na, ne, nu, nx = obj.na, obj.ne, obj.nu, obj.nx
    # structured start: f(u, se) = u mod |X| with uniform laws
    q0 = np.zeros((nu, ne, nx))
    q0[np.arange(nu), :, np.arange(nu) % nx] = 1.0
    yield np.full(na, 1.0 / na), np.full((na, ne, nu), 1.0 / nu), q0
    for k in range(max(opts.multistarts - 1, 0)):
        conc = 1.0 if k % 2 == 0 else 0.2
        yield (rng.dirichlet(np.full(na, conc)),
               rng.dirichlet(np.full(nu, conc), size=(na, ne)),
               rng.dirichlet(np.full(nx, conc), size=(nu, ne)))


def evaluate_thm2(m: ProbingModel, pa, pu, f) -> float:
    """I(A,U;Y,S_d) - I(U;S_e|A) of an explicit (pa, pu[se,a,u], f[u,se]) point."""
    j = joint_thm2(m, pa, pu, f, check_cardinality=False)
    return (mutual_information(j, ["A", "U"], ["Y", "Sd"])
            - conditional_mutual_information(j, ["U"], ["Se"], ["A"]))


def solve_thm2_lower(m: ProbingModel, gamma: float,
                     opts: SolverOptions = SolverOptions()) -> SolveResult:
    """Best point found by multistart projected-gradient ascent (a lower bound)."""
    if not m.encoder_only:
        raise ValueError("Theorem 2 needs an encoder-only model")
    if m.input_constraint is not None:
        raise ValueError("input constraints are only supported by Theorem 1")
    cost = m.cost.per_action
    if gamma < cost.min() - 1e-12:
        raise InfeasibleBudget(f"budget {gamma} below minimum cost {cost.min()}")
    bound = thm2_aux_bound(m)
    n_u = opts.u_size or opts.u_cap or min(4, bound)
    if n_u > bound:
        raise ValueError(f"|U|={n_u} exceeds the bound {bound}")
    n_f = m.X.size ** (n_u * m.Se.size)
    if m.Ae.size * n_u * m.Se.size * m.X.size > opts.strategy_cap:
        raise ValueError(f"auxiliary problem too large ({n_f} maps f); lower u_cap")
    g = max(gamma, cost.min())
    obj = Thm2Objective(m, n_u)

    best = None
    for pa, pu, q in _starts(obj, opts):
        pa, pu, q, _, _ = _ascend_free(obj, pa, pu, q, cost, g, opts)
        q, _ = _round_vertices(obj, pa, pu, q)
        pa, pu, q, val, trace = _ascend_free(obj, pa, pu, q, cost, g, opts, fix_q=True)
        if best is None or val > best[0] + 1e-12:
            best = (val, pa, pu, q, trace)

    _, pa, pu, q, trace = best
    f = q.argmax(axis=2)
    pu_se = pu.transpose(1, 0, 2)           # [se, a, u]
    value = evaluate_thm2(m, pa, pu_se, f)
    return SolveResult(
        value=float(value), argmax={"pa": pa, "pu": pu_se, "f": f},
        achieved_cost=float(pa @ cost), trace=trace, status="multistart-best",
        gamma=float(gamma), theorem="2",
        info={"bound": "lower", "u_size": int(n_u), "multistarts": opts.multistarts,
              "seed": opts.seed},
    )
