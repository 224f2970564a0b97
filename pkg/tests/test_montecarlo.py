import numpy as np
import pytest

from probecap import CodecConfig, empirical_cmi, joint_thm1, rate_split_codec, sample_joint, solve_thm1
from probecap.probability import conditional_mutual_information


@pytest.fixture(scope="module")
def ex1_opt(ex1):
    r = solve_thm1(ex1, 1.0)
    return r, joint_thm1(ex1, r.argmax["pa"], r.argmax["px"])


def test_sample_frequencies(ex1_opt):
    _, j = ex1_opt
    n = 200000
    b = sample_joint(j, n, seed=5)
    idx, total = b.cells(j.axes)
    freq = np.bincount(idx, minlength=total) / n
    p = j.mass.ravel()
    sd = np.sqrt(p * (1 - p) / n)
    assert np.all(np.abs(freq - p) <= 5 * sd + 1e-12)


def test_sampling_deterministic(ex1_opt):
    _, j = ex1_opt
    a, b = sample_joint(j, 1000, seed=2), sample_joint(j, 1000, seed=2)
    for k in j.axes:
        np.testing.assert_array_equal(a.columns[k], b.columns[k])


def test_empirical_cmi(ex1_opt):
    r, j = ex1_opt
    est = empirical_cmi(sample_joint(j, 200000, seed=1), "X", "Y", ["S"], bootstrap=50)
    assert abs(est["estimate"] - r.value) <= 4 * est["stderr"] + 1e-3
    assert est["estimate"] == pytest.approx(est["raw"] + est["bias_correction"])


def test_empirical_cmi_independent():
    from probecap.probability import Alphabet, JointTable
    j = JointTable((Alphabet.of_size("X", 2), Alphabet.of_size("Y", 2)), np.full((2, 2), 0.25))
    est = empirical_cmi(sample_joint(j, 50000, seed=0), "X", "Y")
    assert conditional_mutual_information(j, "X", "Y") == 0
    assert abs(est["estimate"]) < 1e-3


def test_empty_batch_rejected(ex1_opt):
    with pytest.raises(ValueError):
        empirical_cmi(sample_joint(ex1_opt[1], 0), "X", "Y")


def test_config_validation():
    with pytest.raises(ValueError):
        CodecConfig(R1=-1, R2=0, n=8)
    with pytest.raises(ValueError):
        CodecConfig(R1=0, R2=0, n=0)


def test_zero_rate_never_errs(ex1, ex1_opt):
    r, _ = ex1_opt
    rep = rate_split_codec(ex1, r.argmax["pa"], r.argmax["px"], CodecConfig(0, 0, 8, trials=50))
    assert rep.error_rate == 0.0 and rep.M1 == rep.M2 == 1


def test_noiseless_channel_codec():
    from probecap.model import build_observe_or_not, state_channel
    from probecap.probability import Alphabet, ProbDist
    X, S, Y = (Alphabet.of_size(n, 2) for n in "XSY")
    ch = state_channel(X, S, Y, [np.eye(2), np.eye(2)])
    m = build_observe_or_not(ch, ProbDist(S, [0.5, 0.5]), decoder_csi=True)
    r = solve_thm1(m, 0.0)
    rep = rate_split_codec(m, r.argmax["pa"], r.argmax["px"],
                           CodecConfig(0.0, 0.25, 12, trials=300), seed=1)
    assert rep.error_rate <= 0.05


def test_action_rate_raises_error(ex1, ex1_opt):
    # spending rate on the action codebook at Gamma = 0 cannot help
    r = solve_thm1(ex1, 0.5)
    lo = rate_split_codec(ex1, r.argmax["pa"], r.argmax["px"], CodecConfig(0.0, 0.2, 8, trials=400))
    hi = rate_split_codec(ex1, r.argmax["pa"], r.argmax["px"], CodecConfig(0.3, 0.2, 8, trials=400))
    assert hi.error_rate >= lo.error_rate


def test_codec_limits(ex1, ex2, ex1_opt):
    r, _ = ex1_opt
    pa, px = r.argmax["pa"], r.argmax["px"]
    with pytest.raises(ValueError):
        rate_split_codec(ex1, pa, px, CodecConfig(0, 0.5, 17))
    with pytest.raises(ValueError):
        rate_split_codec(ex1, pa, px, CodecConfig(1.0, 1.0, 16, trials=10))
    with pytest.raises(ValueError):
        rate_split_codec(ex2, pa, px, CodecConfig(0, 0.1, 8))


def test_codec_deterministic(ex1, ex1_opt):
    r, _ = ex1_opt
    cfg = CodecConfig(0.0, 0.2, 8, trials=100)
    a = rate_split_codec(ex1, r.argmax["pa"], r.argmax["px"], cfg, seed=4)
    b = rate_split_codec(ex1, r.argmax["pa"], r.argmax["px"], cfg, seed=4)
    assert a == b
