"""Causal encoder probing (and decoder probing) via Shannon strategies.

A strategy t = (a_e, f_t) is an encoder action together with a map
S_e -> X.  Fixing the decoder action a_d, every strategy induces a row of a
single-letter channel t -> (Y, S_d), and the Theorem 3/4 values become
capacity-cost problems of these strategy channels.  The full strategy alphabet
contains every deterministic (g, f) pair, so the optimum over P_U with it
equals the optimum over all auxiliary alphabets.
"""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

from .blahut import capacity_cost, mutual_information_io
from .model import ProbingModel, StrategyPair
from .results import SolveResult, SolverOptions

SUPPORT_EPS = 1e-12


def strategy_table(m: ProbingModel) -> tuple:
    """(actions[t], maps[t, se]) listing every strategy in lexicographic order."""
    maps = np.array(list(itertools.product(range(m.X.size), repeat=m.Se.size)), dtype=int)
    acts = np.repeat(np.arange(m.Ae.size), len(maps))
    return acts, np.tile(maps, (m.Ae.size, 1))


def strategy_count(m: ProbingModel) -> int:
    return m.Ae.size * m.X.size ** m.Se.size


def strategy_channel(m: ProbingModel, ad: int = 0):
    """Rows P(y, s_d | t, a_d) flattened over (y, s_d), and per-strategy costs."""
    acts, maps = strategy_table(m)
    ps = np.asarray(m.state.mass)
    W = m.channel_table                    # [x, s, y]
    P = m.probe_table[:, :, ad]            # [s, ae, se, sd]
    # Wsel[t, se, s, y] = W[maps[t, se], s, y]
    Wsel = W[maps]
    Pt = P[:, acts].transpose(1, 0, 2, 3)  # [t, s, se, sd]
    rows = np.einsum("s,tsed,tesy->tyd", ps, Pt, Wsel)
    rows = rows.reshape(len(acts), -1)
    costs = m.cost.table[acts, ad]
    return rows, costs


def _check_cap(m: ProbingModel, opts: SolverOptions):
    n = strategy_count(m)
    if n > opts.strategy_cap:
        raise ValueError(
            f"strategy alphabet has |A_e|*|X|^|S_e| = {m.Ae.size}*{m.X.size}^{m.Se.size} "
            f"= {n} entries, above the cap {opts.strategy_cap}")


def _support(p):
    return np.flatnonzero(p > SUPPORT_EPS)


def solve_thm3(m: ProbingModel, gamma: float, opts: SolverOptions = SolverOptions()) -> SolveResult:
    """C_c(gamma) = max I(U; Y, S_d) with A = g(U), X = f(U, S_e)."""
    if not m.encoder_only:
        raise ValueError("Theorem 3 needs an encoder-only model; use solve_thm4")
    if m.input_constraint is not None:
        raise ValueError("input constraints are only supported by Theorem 1")
    _check_cap(m, opts)
    rows, costs = strategy_channel(m, 0)
    acts, maps = strategy_table(m)
    if opts.u_size is None:
        res = capacity_cost([(rows, costs)], gamma, tol=opts.ba_tol)
        p = res.inputs[0]
        sup = _support(p)
        value, cost, trace = res.value, res.achieved_cost, res.trace
        info = {"strategies": int(len(acts)), "multiplier": res.multiplier,
                "dual_value": res.dual_value}
    else:
        k = int(opts.u_size)
        n_pairs = comb(len(acts), k)
        if n_pairs > opts.pair_cap:
            raise ValueError(f"{n_pairs} strategy pairs with |U|={k} exceed the cap {opts.pair_cap}")
        best = None
        for combo in itertools.combinations(range(len(acts)), k):
            idx = np.array(combo)
            try:
                r = capacity_cost([(rows[idx], costs[idx])], gamma, tol=opts.ba_tol)
            except ValueError:
                continue
            if best is None or r.value > best[0].value + 1e-12:
                best = (r, idx)
        if best is None:
            raise ValueError(f"no strategy set of size {k} meets the budget")
        r, idx = best
        p = np.zeros(len(acts))
        p[idx] = r.inputs[0]
        sup = idx
        value, cost, trace = r.value, r.achieved_cost, r.trace
        info = {"strategies": int(len(acts)), "pairs_searched": n_pairs}
    strat = StrategyPair(acts[sup], maps[sup])
    return SolveResult(
        value=value, argmax={"pu": p[sup], "strategy": strat},
        achieved_cost=cost, trace=trace, status="converged",
        gamma=float(gamma), theorem="3", info=info,
    )


def solve_thm4(m: ProbingModel, gamma: float, opts: SolverOptions = SolverOptions(),
               pad=None) -> SolveResult:
    """C(gamma) = max I(U; Y, S_d | A_d) with A_e = g(U, A_d), X = f(U, S_e, A_d).

    The decoder-action law is optimized jointly with the per-action budgets
    (time sharing over a_d) unless ``pad`` fixes it.
    """
    if m.input_constraint is not None:
        raise ValueError("input constraints are only supported by Theorem 1")
    _check_cap(m, opts)
    acts, maps = strategy_table(m)
    channels = [strategy_channel(m, ad) for ad in range(m.Ad.size)]
    res = capacity_cost(channels, gamma, weights=pad, tol=opts.ba_tol)
    w = res.weights
    supports = [_support(p) if w[k] > 0 else np.array([0]) for k, p in enumerate(res.inputs)]
    n_u = max(len(s) for s in supports)
    g = np.zeros((n_u, m.Ad.size), dtype=int)
    f = np.zeros((n_u, m.Se.size, m.Ad.size), dtype=int)
    pu = np.zeros((m.Ad.size, n_u))
    for ad, sup in enumerate(supports):
        padded = np.concatenate([sup, np.repeat(sup[:1], n_u - len(sup))])
        g[:, ad] = acts[padded]
        f[:, :, ad] = maps[padded]
        pu[ad, :len(sup)] = res.inputs[ad][sup]
        if pu[ad].sum() > 0:
            pu[ad] /= pu[ad].sum()
        else:
            pu[ad, 0] = 1.0
    per_ad = [float(mutual_information_io(res.inputs[k], channels[k][0]))
              for k in range(len(channels))]
    return SolveResult(
        value=res.value,
        argmax={"pad": w, "pu": pu, "strategy": StrategyPair(g, f)},
        achieved_cost=res.achieved_cost, trace=res.trace, status="converged",
        gamma=float(gamma), theorem="4",
        info={"per_decoder_action_bits": per_ad, "multiplier": res.multiplier,
              "dual_value": res.dual_value, "strategies": int(len(acts))},
    )


def blahut_arimoto_constrained(W, cost, gamma: float, tol: float = 1e-10) -> SolveResult:
    """Capacity-cost value of one channel W[u, v] with per-input costs."""
    W = np.asarray(W, dtype=float)
    res = capacity_cost([(W, np.asarray(cost, dtype=float))], gamma, tol=tol)
    return SolveResult(
        value=res.value, argmax={"p": res.inputs[0]}, achieved_cost=res.achieved_cost,
        trace=res.trace, status="converged", gamma=float(gamma), theorem="ba",
        info={"multiplier": res.multiplier, "dual_value": res.dual_value},
    )
