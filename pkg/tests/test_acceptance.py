"""Acceptance criteria, one check per criterion.

Run directly (python3 tests/test_acceptance.py) for one PASS/FAIL line per
criterion, or through pytest where each criterion is its own test.
"""

import functools
import json
import sys
import tempfile
import time

import numpy as np

from probecap import (Alphabet, CodecConfig, DirtyPaperParams, FadingParams, ProbDist,
                      SolverOptions, bound_curve, build_example1, build_example2, build_example3,
                      build_observe_or_not, dirty_paper_lower, empirical_cmi, fading_lower,
                      grid_oracle_thm1, joint_thm1, rate_split_codec, sample_joint, solve_thm1,
                      solve_thm2_lower, solve_thm3, sweep, upper_concave_envelope)
from probecap.cli import main as cli_main
from probecap.model import state_channel
from probecap.probability import binary_entropy

# pinned tolerances
TOL_EX3 = 2e-3
TOL_EX1_VALUE = 2e-3
TOL_EX1_MARGINAL = 1e-2
TOL_CUTOFF = 0.02
TOL_ORACLE = 5e-3
TOL_REDUCTION = 3e-3
TOL_SHAPE = 2e-3
TOL_DPC_0, TOL_DPC_1 = 1e-4, 1e-6
TOL_FADING = 1e-3
TOL_DOMINANCE = 1e-9
CODEC_EPS, CODEC_TRIALS, CODEC_SEED = 1.5, 20000, 0

EX1_C0, EX1_C1 = 0.311278, 0.321928
DPC_C0, DPC_C1 = 0.292481, 0.5
FADING_C0, FADING_C1 = 0.507178, 0.792481

SWEEP = np.linspace(0.0, 1.0, 11)
RESULTS = {}


def report(k, ok, detail):
    RESULTS[k] = ok
    print(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")
    return ok


@functools.lru_cache(maxsize=None)
def builtin_curve(name):
    """Raw sweep and the reported curve of a builtin example on SWEEP."""
    if name in ("dpc", "fading"):
        c = bound_curve(name, SWEEP)
        return c, c
    m = {"ex1": build_example1, "ex2": build_example2, "ex3": build_example3}[name]()
    if name == "ex2":
        raw = sweep(solve_thm2_lower, m, SWEEP, SolverOptions())
        return raw, upper_concave_envelope(raw)
    raw = sweep(solve_thm1, m, SWEEP)
    return raw, raw


def _random_binary_model(seed):
    rng = np.random.default_rng(seed)
    X, S, Y = (Alphabet.of_size(n, 2) for n in "XSY")
    ch = state_channel(X, S, Y, [rng.dirichlet(np.ones(2), size=2) for _ in range(2)])
    m = build_observe_or_not(ch, ProbDist(S, rng.dirichlet(np.ones(2))), decoder_csi=True,
                             name=f"random-{seed}")
    return m, float(rng.uniform(0.0, 1.0))


def test_criterion_01_example3_closed_form():
    t = time.time()
    m = build_example3(0.25)
    gammas = np.round(np.linspace(0, 1, 11), 10)
    errs = []
    for g in gammas:
        want = 0.5 * binary_entropy((1 + 2 * g) / 4) if g <= 0.5 else 0.5
        errs.append(abs(solve_thm1(m, g).value - want))
    dt = time.time() - t
    ok = max(errs) <= TOL_EX3 and dt < 10
    assert report(1, ok, f"max |C - closed form| = {max(errs):.2e} (tol {TOL_EX3}), {dt:.1f} s")


def test_criterion_02_example1_endpoints():
    t = time.time()
    m = build_example1()
    c0, r1 = solve_thm1(m, 0.0).value, solve_thm1(m, 1.0)
    px_s = r1.argmax["px_given_s"][:, 0]
    dt = time.time() - t
    ok = (abs(c0 - EX1_C0) <= TOL_EX1_VALUE and abs(r1.value - EX1_C1) <= TOL_EX1_VALUE
          and np.all(np.abs(px_s - [0.4, 0.6]) <= TOL_EX1_MARGINAL) and dt < 30)
    assert report(2, ok, f"C(0)={c0:.6f} C(1)={r1.value:.6f} P(X=0|S)={np.round(px_s, 4)}, "
                         f"{dt:.1f} s")


def test_criterion_03_cutoff():
    with tempfile.TemporaryDirectory() as d:
        out = f"{d}/cutoff.json"
        code = cli_main(["cutoff", "--example", "ex1", "--out", out])
        rep = json.load(open(out))
    g = rep["cutoff"]
    px = np.array(rep["solution"]["argmax"]["px"])       # [se, a, x]
    p2, p3 = px[1, 1, 0], px[2, 1, 0]
    crit = g * (p3 - p2)
    ok = code == 0 and abs(g - 0.2) <= TOL_CUTOFF and abs(crit - 0.2) <= TOL_CUTOFF
    assert report(3, ok, f"cutoff {g:.6f}, Γ(p3-p2) = {crit:.6f} (tol {TOL_CUTOFF})")


def test_criterion_04_oracle_equivalence():
    t = time.time()
    gaps = []
    for seed in range(20):
        m, g = _random_binary_model(seed)
        gaps.append(abs(solve_thm1(m, g).value - grid_oracle_thm1(m, g, 0.01).value))
    dt = time.time() - t
    ok = max(gaps) <= TOL_ORACLE and dt < 120
    assert report(4, ok, f"20 models, max gap {max(gaps):.2e} (tol {TOL_ORACLE}), {dt:.1f} s")


def test_criterion_05_reductions():
    m = build_example1()
    opts = SolverOptions()
    worst = 0.0
    for g in (0.0, 0.25, 0.5, 0.75, 1.0):
        c1 = solve_thm1(m, g).value
        worst = max(worst, abs(solve_thm3(m, g).value - c1),
                    abs(solve_thm2_lower(m, g, opts).value - c1))
    ok = worst <= TOL_REDUCTION
    assert report(5, ok, f"max |thm3 - thm1|, |thm2 - thm1| = {worst:.2e} (tol {TOL_REDUCTION})")


def test_criterion_06_curve_shape():
    details, ok = [], True
    for name in ("ex1", "ex2", "ex3", "dpc", "fading"):
        raw, curve = builtin_curve(name)
        curve.shape_tol = TOL_SHAPE
        good = curve.monotone and curve.concave and not raw.errors
        ok &= good
        if name in ("ex1", "ex2", "ex3"):
            v = raw.values
            base = (1 - SWEEP) * v[0] + SWEEP * v[-1]
            margin = float(np.max(v - base))
            ok &= margin > 0
            details.append(f"{name} shape={'ok' if good else 'bad'} margin={margin:.2e}")
        else:
            details.append(f"{name} shape={'ok' if good else 'bad'}")
    assert report(6, ok, "; ".join(details))


def test_criterion_07_dirty_paper():
    t = time.time()
    c0 = dirty_paper_lower(DirtyPaperParams(gamma=0.0)).value
    c1 = dirty_paper_lower(DirtyPaperParams(gamma=1.0)).value
    _, curve = builtin_curve("dpc")
    slack = float(np.min(curve.values - ((1 - SWEEP) * c0 + SWEEP * c1)))
    dt = time.time() - t
    ok = (abs(c0 - DPC_C0) <= TOL_DPC_0 and abs(c1 - DPC_C1) <= TOL_DPC_1
          and slack >= -TOL_DOMINANCE and dt < 60)
    assert report(7, ok, f"C(0)={c0:.7f} C(1)={c1:.7f} min margin over time sharing "
                         f"{slack:.2e}, {dt:.1f} s")


def test_criterion_08_fading():
    c0 = fading_lower(FadingParams(gamma=0.0)).value
    c1 = fading_lower(FadingParams(gamma=1.0)).value
    _, curve = builtin_curve("fading")
    slack = float(np.min(curve.values - ((1 - SWEEP) * c0 + SWEEP * c1)))
    ok = (abs(c0 - FADING_C0) <= TOL_FADING and abs(c1 - FADING_C1) <= TOL_FADING
          and slack >= -TOL_DOMINANCE)
    assert report(8, ok, f"C(0)={c0:.6f} C(1)={c1:.6f} min margin over time sharing {slack:.2e}")


def test_criterion_09_monte_carlo():
    t = time.time()
    m = build_example1()
    r = solve_thm1(m, 1.0)
    n = 10**6
    b = sample_joint(joint_thm1(m, r.argmax["pa"], r.argmax["px"]), n, seed=0)
    est = empirical_cmi(b, "X", "Y", ["S"], bootstrap=100, seed=0)
    bias_bound = (m.X.size * m.Y.size * m.S.size) / (2 * n * np.log(2))
    gap = abs(est["estimate"] - r.value)
    allowed = 3 * est["stderr"] + bias_bound
    dt = time.time() - t
    ok = gap <= allowed and dt < 60
    assert report(9, ok, f"estimate {est['estimate']:.6f} vs {r.value:.6f}, gap {gap:.2e} "
                         f"<= {allowed:.2e}, {dt:.1f} s")


def test_criterion_10_codec_trend():
    m = build_example1()
    r = solve_thm1(m, 1.0)
    rate = 0.6 * r.value
    errs = []
    for n in (8, 12, 16):
        cfg = CodecConfig(R1=0.0, R2=rate, n=n, eps=CODEC_EPS, trials=CODEC_TRIALS)
        errs.append(rate_split_codec(m, r.argmax["pa"], r.argmax["px"], cfg,
                                     seed=CODEC_SEED).error_rate)
    ok = errs[0] >= errs[1] >= errs[2]
    assert report(10, ok, f"error rate at n=8,12,16: {[round(e, 5) for e in errs]} "
                          f"(eps {CODEC_EPS}, {CODEC_TRIALS} trials, seed {CODEC_SEED})")


def test_criterion_11_note():
    print("NOTE criterion 11: figure-level curves have no tabulated values; covered by 1-8")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for fn in tests:
        try:
            fn()
        except AssertionError:
            pass
    sys.exit(0 if all(RESULTS.values()) else 1)
