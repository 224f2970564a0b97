"""Sampling checks of single-letter values and a toy rate-splitting codec.

The codec follows the action-then-input construction: an action codebook
carries M1, per-state input codebooks carry M2 and are multiplexed on the
encoder's observation; the decoder recovers M1 by joint typicality of
(A, Y, S) and then M2 by conditional typicality of (X, Y) given (S, A).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .model import ProbingModel
from .probability import JointTable

LN2 = np.log(2.0)
CODEC_WORK_CAP = 5e8
MAX_BLOCKLENGTH = 16


@dataclass
class SampleBatch:
    n: int
    columns: dict          # axis name -> int array of symbol indices
    sizes: dict            # axis name -> alphabet size
    seed: int

    def cells(self, axes) -> tuple:
        """Flat cell index per sample for the given axes, and the cell count."""
        idx = np.zeros(self.n, dtype=np.int64)
        total = 1
        for a in axes:
            idx = idx * self.sizes[a] + self.columns[a]
            total *= self.sizes[a]
        return idx, total


def sample_joint(j: JointTable, n: int, seed: int = 0) -> SampleBatch:
    """n i.i.d. draws from the joint law."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    mass = np.asarray(j.mass, dtype=float)
    flat = rng.choice(mass.size, size=n, p=mass.ravel() / mass.sum()) if n else \
        np.zeros(0, dtype=np.int64)
    idx = np.unravel_index(flat, mass.shape)
    cols = {a: np.asarray(i, dtype=np.int64) for a, i in zip(j.axes, idx)}
    return SampleBatch(n, cols, dict(zip(j.axes, mass.shape)), seed)


def _as_list(a):
    return [a] if isinstance(a, str) else list(a)


def _plugin_h(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log2(p)).sum())


def _cmi_from_counts(c, n):
    """Plug-in I(X;Y|Z) from a count table c[z, x, y]; also nonzero-cell counts."""
    hz = _plugin_h(c.sum(axis=(1, 2)), n)
    hxz = _plugin_h(c.sum(axis=2), n)
    hyz = _plugin_h(c.sum(axis=1), n)
    hxyz = _plugin_h(c, n)
    k = [(c.sum(axis=2) > 0).sum(), (c.sum(axis=1) > 0).sum(), (c > 0).sum(),
         (c.sum(axis=(1, 2)) > 0).sum()]
    return hxz + hyz - hxyz - hz, k


def empirical_cmi(b: SampleBatch, x, y, given=(), bootstrap: int = 100,
                  seed: int = 0) -> dict:
    """Plug-in I(X;Y|Z) with a Miller-Madow correction and a bootstrap stderr."""
    if b.n == 0:
        raise ValueError("empty batch")
    xs, ys, zs = _as_list(x), _as_list(y), _as_list(given)
    ix, nx = b.cells(xs)
    iy, ny = b.cells(ys)
    iz, nz = b.cells(zs) if zs else (np.zeros(b.n, dtype=np.int64), 1)
    flat = (iz * nx + ix) * ny + iy
    counts = np.bincount(flat, minlength=nz * nx * ny).astype(float)
    raw, k = _cmi_from_counts(counts.reshape(nz, nx, ny), b.n)
    # each entropy term is biased low by (K - 1) / (2 n ln 2)
    bias = ((k[0] - 1) + (k[1] - 1) - (k[2] - 1) - (k[3] - 1)) / (2 * b.n * LN2)
    rng = np.random.default_rng(seed)
    p = counts / b.n
    boots = [_cmi_from_counts(rng.multinomial(b.n, p).astype(float).reshape(nz, nx, ny),
                              b.n)[0] for _ in range(bootstrap)]
    return {
        "estimate": raw + bias, "raw": raw, "bias_correction": bias,
        "stderr": float(np.std(boots, ddof=1)) if bootstrap > 1 else float("nan"),
        "n": b.n, "seed": b.seed, "bootstrap_seed": seed, "bootstrap": bootstrap,
    }


# -- codec -----------------------------------------------------------------------

@dataclass
class CodecConfig:
    R1: float
    R2: float
    n: int
    eps: float = 1.5              # relative per-cell slack; see the module notes
    trials: int = 1000
    work_cap: float = CODEC_WORK_CAP

    def __post_init__(self):
        if self.R1 < 0 or self.R2 < 0:
            raise ValueError("rates must be nonnegative")
        if self.n < 1:
            raise ValueError("blocklength must be positive")
        if self.eps <= 0:
            raise ValueError("typicality slack must be positive")
        if self.trials < 1:
            raise ValueError("trials must be positive")


@dataclass
class CodecReport:
    error_rate: float
    stage1_error_rate: float      # M1 decoded wrongly
    stage2_error_rate: float      # M1 right, M2 wrong
    atypical_action_rate: float   # encoder fell back to the all-cheap action
    M1: int
    M2: int
    config: dict = field(default_factory=dict)
    seed: int = 0


def _codebook_size(rate: float, n: int) -> int:
    return max(1, int(np.round(2.0 ** (n * rate))))


def _typical(counts, expect, eps):
    """Strong typicality on rows: |N - E| <= eps*E per cell, zero cells empty."""
    zero = expect <= 0
    ok = np.abs(counts - expect) <= eps * expect + 1e-9
    return np.all(np.where(zero, counts == 0, ok), axis=-1)


def _cond_typical(counts, n_ctx, cond, eps):
    """Strong conditional typicality of counts[..., ctx, cell] given context counts."""
    expect = n_ctx[..., None] * cond
    zero = cond <= 0
    ok = np.abs(counts - expect) <= eps * expect + 1e-9
    return np.all(np.where(zero, counts == 0, ok), axis=(-1, -2))


def rate_split_codec(m: ProbingModel, pa, px, cfg: CodecConfig, seed: int = 0) -> CodecReport:
    """Monte-Carlo error rate of the rate-split, multiplexed code at toy scale.

    ``pa`` is the action law and ``px[se, a, x]`` the input kernel (both as
    returned by solve_thm1).  Messages are uniform per trial; codebooks are
    redrawn per trial from a counter-derived seed.
    """
    if not m.encoder_only or not m.decoder_has_csi():
        raise ValueError("the codec needs an encoder-only model with S_d = S")
    if cfg.n > MAX_BLOCKLENGTH:
        raise ValueError(f"blocklength {cfg.n} above the desk-scale cap {MAX_BLOCKLENGTH}")
    K = m.encoder_probe(0)                  # [s, a, se]
    if not np.all((K == 0) | (K == 1)):
        raise ValueError("the codec needs a deterministic probe S_e = h(S, A)")
    M1, M2 = _codebook_size(cfg.R1, cfg.n), _codebook_size(cfg.R2, cfg.n)
    work = float(M1) * M2 * cfg.n * cfg.trials
    if work > cfg.work_cap:
        raise ValueError(f"codec work {work:.3g} exceeds cap {cfg.work_cap:.3g}")

    pa = np.asarray(pa, dtype=float)
    px = np.asarray(px, dtype=float)
    ps = np.asarray(m.state.mass)
    W = m.channel_table                     # [x, s, y]
    nS, nA, nSe, nX, nY = len(ps), len(pa), K.shape[2], W.shape[0], W.shape[2]
    n = cfg.n
    cost = m.cost.per_action
    cheap = int(np.argmin(cost))

    # single-letter laws for the tests
    p_xy_given_sa = np.einsum("sae,eax,xsy->saxy", K, px, W)          # P(x,y|s,a)
    p_ays = np.einsum("a,s,saxy->ays", pa, ps, p_xy_given_sa)
    cond = p_xy_given_sa.reshape(nS * nA, nX * nY)

    def stage2(X_cands, s_seq, a_seq, y_seq):
        """Smallest candidate index whose (X, Y) is conditionally typical given (S, A)."""
        ctx = s_seq * nA + a_seq
        n_ctx = np.bincount(ctx, minlength=nS * nA).astype(float)
        cell = (ctx[None, :] * nX + X_cands) * nY + y_seq[None, :]
        k = len(X_cands)
        flat = (np.arange(k)[:, None] * (nS * nA * nX * nY) + cell).ravel()
        counts = np.bincount(flat, minlength=k * nS * nA * nX * nY).astype(float)
        counts = counts.reshape(k, nS * nA, nX * nY)
        ok = _cond_typical(counts, n_ctx, cond, cfg.eps)
        hits = np.flatnonzero(ok)
        return int(hits[0]) if hits.size else 0

    err = err1 = err2 = fallback = 0
    for t in range(cfg.trials):
        rng = np.random.default_rng([seed, t])
        A_book = rng.choice(nA, size=(M1, n), p=pa)
        # X_book[m1, m2, se, i] ~ P(X | S_e = se, A = A_book[m1, i])
        u = rng.random((M1, M2, nSe, n))
        rows = np.cumsum(px[:, A_book, :], axis=-1)                   # [se, M1, n, x]
        rows = np.moveaxis(rows, 0, 1)[:, None]                        # [M1, 1, se, n, x]
        X_book = (u[..., None] > rows).sum(axis=-1).clip(max=nX - 1)
        u0 = rng.random((M2, n))
        X0_book = (u0[..., None] > np.cumsum(px[0, cheap])).sum(axis=-1).clip(max=nX - 1)
        a_counts = np.stack([(A_book == a).sum(axis=1) for a in range(nA)], -1)
        a_typ = _typical(a_counts.astype(float), n * pa, cfg.eps)

        m1, m2 = int(rng.integers(M1)), int(rng.integers(M2))
        s_seq = rng.choice(nS, size=n, p=ps)
        if a_typ[m1]:
            a_seq = A_book[m1]
        else:
            a_seq = np.full(n, cheap)
            fallback += 1
        se_seq = (rng.random(n)[:, None] > np.cumsum(K[s_seq, a_seq], axis=-1)).sum(-1)
        se_seq = se_seq.clip(max=nSe - 1)
        x_seq = (X_book[m1, m2, se_seq, np.arange(n)] if a_typ[m1] else X0_book[m2])
        y_seq = (rng.random(n)[:, None] > np.cumsum(W[x_seq, s_seq], axis=-1)).sum(-1)
        y_seq = y_seq.clip(max=nY - 1)

        # stage 1: smallest m1 with (A^n(m1), Y^n, S^n) jointly typical
        cells = (A_book * nY + y_seq[None, :]) * nS + s_seq[None, :]
        flat = (np.arange(M1)[:, None] * (nA * nY * nS) + cells).ravel()
        c1 = np.bincount(flat, minlength=M1 * nA * nY * nS).reshape(M1, -1).astype(float)
        ok1 = _typical(c1, n * p_ays.ravel(), cfg.eps)
        hits = np.flatnonzero(ok1)
        m1_hat = int(hits[0]) if hits.size else 0

        # stage 2: demultiplex with the decoded action codeword
        if a_typ[m1_hat]:
            a_hat = A_book[m1_hat]
            # the decoder knows S, hence S_e = h(A, S)
            se_hat = K[s_seq, a_hat].argmax(axis=-1)
            cands = X_book[m1_hat][:, se_hat, np.arange(n)]
        else:
            a_hat = np.full(n, cheap)
            cands = X0_book
        m2_hat = stage2(cands, s_seq, a_hat, y_seq)

        if m1_hat != m1:
            err1 += 1
        elif m2_hat != m2:
            err2 += 1
        if m1_hat != m1 or m2_hat != m2:
            err += 1

    T = cfg.trials
    return CodecReport(err / T, err1 / T, err2 / T, fallback / T, M1, M2, asdict(cfg), seed)
