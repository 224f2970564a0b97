"""Probing problem instances, example builders and theorem-specific joint laws."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .probability import (
    ROW_TOL, Alphabet, CondKernel, JointTable, ProbDist, _frozen, compose,
)

ERASURE = "*"
NO_INFO = "-"


@dataclass(frozen=True)
class CostTable:
    """Action cost Lambda(a_e, a_d); encoder-only models have one column."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.ndim == 1:
            t = t[:, None]
        if t.ndim != 2:
            raise ValueError("cost table must be indexed by (a_e, a_d)")
        if np.any(t < 0) or not np.all(np.isfinite(t)):
            raise ValueError("costs must be finite and nonnegative")
        object.__setattr__(self, "table", _frozen(t))

    @property
    def per_action(self) -> np.ndarray:
        if self.table.shape[1] != 1:
            raise ValueError("cost depends on the decoder action")
        return self.table[:, 0]

    @property
    def min_cost(self) -> float:
        return float(self.table.min())

    @property
    def max_cost(self) -> float:
        return float(self.table.max())


@dataclass(frozen=True)
class InputConstraint:
    """Linear input constraint E[c(X)] <= bound."""

    cost: np.ndarray
    bound: float

    def __post_init__(self):
        object.__setattr__(self, "cost", _frozen(self.cost))
        if self.bound < 0:
            raise ValueError("input constraint bound must be nonnegative")


@dataclass(frozen=True)
class ProbingModel:
    S: Alphabet
    Se: Alphabet
    Sd: Alphabet
    Ae: Alphabet
    Ad: Alphabet
    X: Alphabet
    Y: Alphabet
    state: ProbDist
    channel: CondKernel        # (X, S) -> Y
    probe: CondKernel          # (S, Ae, Ad) -> (Se, Sd)
    cost: CostTable
    budget: float = 1.0
    input_constraint: Optional[InputConstraint] = None
    name: str = "model"

    def __post_init__(self):
        validate(self)

    @property
    def encoder_only(self) -> bool:
        return self.Ad.size == 1

    @property
    def action(self) -> Alphabet:
        """Encoder action alphabet under the single-action name used by Theorems 1-3."""
        return self.Ae.renamed("A")

    @property
    def channel_table(self) -> np.ndarray:
        """W[x, s, y]."""
        return np.asarray(self.channel.table)

    @property
    def probe_table(self) -> np.ndarray:
        """P[s, ae, ad, se, sd]."""
        return np.asarray(self.probe.table)

    def encoder_probe(self, ad: int = 0) -> np.ndarray:
        """P(se | s, ae) at decoder action ``ad``, indexed [s, ae, se]."""
        return self.probe_table[:, :, ad].sum(axis=3)

    def decoder_has_csi(self) -> bool:
        """True when S_d is an exact copy of S for every action pair."""
        if self.Sd.size != self.S.size:
            return False
        sd_given = self.probe_table.sum(axis=3)          # [s, ae, ad, sd]
        eye = np.eye(self.S.size)[:, None, None, :]
        return bool(np.allclose(sd_given, eye, atol=ROW_TOL))

    def with_budget(self, budget: float) -> "ProbingModel":
        return _replace(self, budget=float(budget))


def _replace(m: ProbingModel, **kw) -> ProbingModel:
    from dataclasses import replace
    return replace(m, **kw)


def validate(m: ProbingModel) -> None:
    """Raise ValueError unless the model is internally consistent."""
    names = dict(S=m.S, Se=m.Se, Sd=m.Sd, Ae=m.Ae, Ad=m.Ad, X=m.X, Y=m.Y)
    for key, a in names.items():
        if a.name != key:
            raise ValueError(f"alphabet for {key} is named {a.name!r}")
    if m.state.alphabet != m.S:
        raise ValueError("state distribution is not over S")
    if m.channel.inputs != (m.X, m.S) or m.channel.outputs != (m.Y,):
        raise ValueError("channel kernel must map (X, S) -> Y")
    if m.probe.inputs != (m.S, m.Ae, m.Ad) or m.probe.outputs != (m.Se, m.Sd):
        raise ValueError("probe kernel must map (S, Ae, Ad) -> (Se, Sd)")
    if m.cost.table.shape != (m.Ae.size, m.Ad.size):
        raise ValueError(f"cost table shape {m.cost.table.shape} != "
                         f"{(m.Ae.size, m.Ad.size)}")
    if m.budget < m.cost.min_cost - 1e-12:
        raise ValueError(f"budget {m.budget} below minimum cost {m.cost.min_cost}")
    if m.input_constraint is not None and m.input_constraint.cost.shape != (m.X.size,):
        raise ValueError("input constraint needs one cost per input symbol")


@dataclass(frozen=True)
class StrategyPair:
    """Deterministic action map g and input map f.

    Encoder-only: g[u] -> a, f[u, se] -> x.
    Two-sided:    g[u, ad] -> ae, f[u, se, ad] -> x.
    """

    g: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "g", np.asarray(self.g, dtype=int))
        object.__setattr__(self, "f", np.asarray(self.f, dtype=int))
        self.g.setflags(write=False)
        self.f.setflags(write=False)

    @property
    def n_aux(self) -> int:
        return self.g.shape[0]

    def key(self) -> tuple:
        """Lexicographic encoding used for tie-breaking."""
        return tuple(self.g.ravel()) + tuple(self.f.ravel())


# -- component channels -------------------------------------------------------
# Rows are indexed [x, y].

def s_channel(alpha: float) -> np.ndarray:
    """S(alpha): input 0 is received as 0 w.p. alpha, input 1 is noiseless."""
    return np.array([[alpha, 1 - alpha], [0.0, 1.0]])


def z_channel(beta: float) -> np.ndarray:
    """Z(beta): input 0 is noiseless, input 1 is received as 1 w.p. beta."""
    return np.array([[1.0, 0.0], [1 - beta, beta]])


def bsc(delta: float) -> np.ndarray:
    return np.array([[1 - delta, delta], [delta, 1 - delta]])


def state_channel(X: Alphabet, S: Alphabet, Y: Alphabet, rows_per_state) -> CondKernel:
    """Kernel (X, S) -> Y from one [x, y] matrix per state."""
    t = np.stack([np.asarray(r, dtype=float) for r in rows_per_state], axis=1)
    return CondKernel((X, S), (Y,), t)


def _binary(name: str) -> Alphabet:
    return Alphabet(name, ("0", "1"))


def build_observe_or_not(channel: CondKernel, state_dist: ProbDist, decoder_csi: bool,
                         actions: Optional[Alphabet] = None, budget: float = 1.0,
                         input_constraint: Optional[InputConstraint] = None,
                         name: str = "observe-or-not") -> ProbingModel:
    """Encoder pays Lambda(a)=a to see S (a=1) or an erasure (a=0)."""
    Ae = actions if actions is not None else _binary("Ae")
    if Ae.size != 2:
        raise ValueError("observe-or-not needs a binary action alphabet")
    Ae = Ae.renamed("Ae")
    X, S = channel.inputs
    Y = channel.output
    X, S, Y = X.renamed("X"), S.renamed("S"), Y.renamed("Y")
    if ERASURE in S.symbols:
        raise ValueError(f"state symbols may not contain {ERASURE!r}")
    Se = Alphabet("Se", (ERASURE,) + S.symbols)
    Sd = Alphabet("Sd", S.symbols) if decoder_csi else Alphabet("Sd", (NO_INFO,))
    Ad = Alphabet("Ad", (NO_INFO,))
    probe = np.zeros((S.size, 2, 1, Se.size, Sd.size))
    for s in range(S.size):
        sd = s if decoder_csi else 0
        probe[s, 0, 0, 0, sd] = 1.0
        probe[s, 1, 0, s + 1, sd] = 1.0
    return ProbingModel(
        S=S, Se=Se, Sd=Sd, Ae=Ae, Ad=Ad, X=X, Y=Y,
        state=ProbDist(S, state_dist.mass),
        channel=CondKernel((X, S), (Y,), channel.table),
        probe=CondKernel((S, Ae, Ad), (Se, Sd), probe),
        cost=CostTable(np.array([[0.0], [1.0]])),
        budget=budget, input_constraint=input_constraint, name=name,
    )


def build_example1(eps: float = 0.5, alpha: float = 0.5, beta: float = 0.5) -> ProbingModel:
    """Binary state picks S(alpha) (s=0, prob eps) or Z(beta); decoder sees S."""
    X, S, Y = _binary("X"), _binary("S"), _binary("Y")
    ch = state_channel(X, S, Y, [s_channel(alpha), z_channel(beta)])
    return build_observe_or_not(ch, ProbDist(S, [eps, 1 - eps]), decoder_csi=True,
                                name="ex1")


def build_example2(eps: float = 0.5, alpha: float = 0.1, delta: float = 0.3) -> ProbingModel:
    """S(alpha) or BSC(delta); no state information at the decoder."""
    X, S, Y = _binary("X"), _binary("S"), _binary("Y")
    ch = state_channel(X, S, Y, [s_channel(alpha), bsc(delta)])
    return build_observe_or_not(ch, ProbDist(S, [eps, 1 - eps]), decoder_csi=False,
                                name="ex2")


def build_example3(p0: float = 0.25) -> ProbingModel:
    """Multiplier channel Y = S*X, S ~ Bern(1/2), with p(x=1) <= p0."""
    X, S, Y = _binary("X"), _binary("S"), _binary("Y")
    t = np.zeros((2, 2, 2))
    for x in range(2):
        for s in range(2):
            t[x, s, x * s] = 1.0
    ch = CondKernel((X, S), (Y,), t)
    return build_observe_or_not(ch, ProbDist(S, [0.5, 0.5]), decoder_csi=True,
                                input_constraint=InputConstraint(np.array([0.0, 1.0]), p0),
                                name="ex3")


def build_two_sided(channel: CondKernel, state_dist: ProbDist, decoder_probe: str = "full",
                    enc_cost: float = 1.0, dec_cost: float = 0.0,
                    budget: float = 1.0, name: str = "two-sided") -> ProbingModel:
    """Observe-or-not at the encoder plus a binary decoder action.

    decoder_probe: "full" (S_d = S whatever a_d), "observe" (S_d = S iff a_d = 1)
    or "none" (S_d carries no information).
    """
    X, S = (a for a in channel.inputs)
    X, S, Y = X.renamed("X"), S.renamed("S"), channel.output.renamed("Y")
    Se = Alphabet("Se", (ERASURE,) + S.symbols)
    Ae, Ad = _binary("Ae"), _binary("Ad")
    if decoder_probe == "full":
        Sd = Alphabet("Sd", S.symbols)
    elif decoder_probe == "observe":
        Sd = Alphabet("Sd", (ERASURE,) + S.symbols)
    elif decoder_probe == "none":
        Sd = Alphabet("Sd", (NO_INFO,))
    else:
        raise ValueError(f"unknown decoder probe {decoder_probe!r}")
    probe = np.zeros((S.size, 2, 2, Se.size, Sd.size))
    for s in range(S.size):
        for ae in range(2):
            for ad in range(2):
                se = s + 1 if ae else 0
                if decoder_probe == "full":
                    sd = s
                elif decoder_probe == "observe":
                    sd = s + 1 if ad else 0
                else:
                    sd = 0
                probe[s, ae, ad, se, sd] = 1.0
    cost = np.array([[a * enc_cost + d * dec_cost for d in range(2)] for a in range(2)])
    return ProbingModel(
        S=S, Se=Se, Sd=Sd, Ae=Ae, Ad=Ad, X=X, Y=Y,
        state=ProbDist(S, state_dist.mass),
        channel=CondKernel((X, S), (Y,), channel.table),
        probe=CondKernel((S, Ae, Ad), (Se, Sd), probe),
        cost=CostTable(cost), budget=budget, name=name,
    )


def example1_two_sided() -> ProbingModel:
    """Example 1 with an extra (free, useless) decoder action and full S_d."""
    m = build_example1()
    return build_two_sided(m.channel, m.state, decoder_probe="full", name="ex1-two-sided")


# -- cardinality bounds --------------------------------------------------------

def thm2_aux_bound(m: ProbingModel) -> int:
    return m.Ae.size * m.S.size * m.Se.size * m.Sd.size * m.X.size + 3


def thm3_aux_bound(m: ProbingModel) -> int:
    return min(m.Y.size * m.Sd.size, thm2_aux_bound(m))


def thm4_aux_bound(m: ProbingModel) -> int:
    return min(m.Y.size * m.Sd.size * m.Ad.size,
               m.S.size * m.Ad.size * m.Ae.size * m.Se.size * m.Sd.size * m.X.size + 4)


# -- joint laws ----------------------------------------------------------------

def _require_encoder_only(m: ProbingModel):
    if not m.encoder_only:
        raise ValueError("model has decoder actions; use the two-sided theorem")


def _dist(alphabet: Alphabet, d) -> ProbDist:
    if isinstance(d, ProbDist):
        if d.alphabet.size != alphabet.size:
            raise ValueError(f"distribution size {d.alphabet.size} != {alphabet.size}")
        return ProbDist(alphabet, d.mass)
    return ProbDist(alphabet, np.asarray(d, dtype=float))


def _kernel(inputs, output: Alphabet, k) -> CondKernel:
    t = np.asarray(k.table if isinstance(k, CondKernel) else k, dtype=float)
    return CondKernel(tuple(inputs), (output,), t)


def _channel_factor(m: ProbingModel) -> CondKernel:
    return CondKernel((m.X, m.S), (m.Y,), m.channel.table)


def joint_thm1(m: ProbingModel, pa, px) -> JointTable:
    """P_A P_S P(S_e|S,A) P(X|S_e,A) P(Y|X,S) over axes (A, S, Se, X, Y).

    ``px`` is indexed [se, a, x].
    """
    _require_encoder_only(m)
    A = m.action
    pse = CondKernel((m.S, A), (m.Se,), m.encoder_probe(0))
    j = compose([_dist(A, pa), m.state, pse, _kernel((m.Se, A), m.X, px),
                 _channel_factor(m)])
    return j


def joint_thm2(m: ProbingModel, pa, pu, f, check_cardinality: bool = True) -> JointTable:
    """Non-causal law over (A, S, Se, U, Sd, X, Y) with X = f(U, S_e).

    ``pu`` is indexed [se, a, u]; ``f`` is indexed [u, se].
    """
    _require_encoder_only(m)
    A = m.action
    pu_t = np.asarray(pu.table if isinstance(pu, CondKernel) else pu, dtype=float)
    n_u = pu_t.shape[-1]
    if check_cardinality and n_u > thm2_aux_bound(m):
        raise ValueError(f"|U|={n_u} exceeds the bound {thm2_aux_bound(m)}")
    U = Alphabet.of_size("U", n_u)
    probe = CondKernel((m.S, A), (m.Se, m.Sd), m.probe_table[:, :, 0])
    j = compose([_dist(A, pa), m.state, probe, _kernel((m.Se, A), U, pu_t),
                 CondKernel.deterministic((U, m.Se), m.X, f), _channel_factor(m)])
    return j.marginal(["A", "S", "Se", "U", "Sd", "X", "Y"])


def joint_thm3(m: ProbingModel, pu, strat: StrategyPair,
               check_cardinality: bool = True) -> JointTable:
    """Causal law over (U, A, S, Se, Sd, X, Y) with A = g(U), X = f(U, S_e)."""
    _require_encoder_only(m)
    A = m.action
    g = strat.g if strat.g.ndim == 1 else strat.g[:, 0]
    f = strat.f if strat.f.ndim == 2 else strat.f[:, :, 0]
    n_u = g.shape[0]
    if check_cardinality and n_u > thm3_aux_bound(m):
        raise ValueError(f"|U|={n_u} exceeds the bound {thm3_aux_bound(m)}")
    U = Alphabet.of_size("U", n_u)
    probe = CondKernel((m.S, A), (m.Se, m.Sd), m.probe_table[:, :, 0])
    return compose([_dist(U, pu), CondKernel.deterministic((U,), A, g), m.state, probe,
                    CondKernel.deterministic((U, m.Se), m.X, f), _channel_factor(m)])


def joint_thm4(m: ProbingModel, pad, pu, strat: StrategyPair,
               check_cardinality: bool = True) -> JointTable:
    """Two-sided law over (S, Ad, U, Ae, Se, Sd, X, Y).

    ``pu`` is indexed [ad, u]; g[u, ad] -> ae; f[u, se, ad] -> x.
    """
    pu_t = np.asarray(pu.table if isinstance(pu, CondKernel) else pu, dtype=float)
    n_u = pu_t.shape[-1]
    if check_cardinality and n_u > thm4_aux_bound(m):
        raise ValueError(f"|U|={n_u} exceeds the bound {thm4_aux_bound(m)}")
    U = Alphabet.of_size("U", n_u)
    g = strat.g.reshape(n_u, m.Ad.size)
    f = strat.f.reshape(n_u, m.Se.size, m.Ad.size)
    return compose([
        m.state, _dist(m.Ad, pad), _kernel((m.Ad,), U, pu_t),
        CondKernel.deterministic((U, m.Ad), m.Ae, g),
        CondKernel((m.S, m.Ae, m.Ad), (m.Se, m.Sd), m.probe_table),
        CondKernel.deterministic((U, m.Se, m.Ad), m.X, f),
        _channel_factor(m),
    ])


def expected_cost(j: JointTable, cost: CostTable) -> float:
    """E[Lambda] from the action axes of a joint ("A" or "Ae"[, "Ad"])."""
    if "A" in j.axes:
        pa = j.marginal(["A"]).mass
        return float(pa @ cost.per_action)
    if "Ae" in j.axes:
        if "Ad" in j.axes:
            p = j.marginal(["Ae", "Ad"]).mass
            return float((p * cost.table).sum())
        return float(j.marginal(["Ae"]).mass @ cost.per_action)
    raise KeyError(f"joint over {j.axes} has no action axis")
