import numpy as np
import pytest

from probecap import (DirtyPaperParams, FadingParams, GaussianMixture, bound_curve,
                      dirty_paper_lower, fading_lower, mixture_differential_entropy)
from probecap.continuous import _mixture_entropy_grid, gaussian_entropy, time_sharing_value


def trapezoid_oracle(gm, points=1_000_000):
    s = np.sqrt(max(gm.variances))
    y = np.linspace(-12 * s, 12 * s, points)
    lg = gm.logpdf(y)
    return float(np.trapezoid(-np.exp(lg) * lg, y) / np.log(2))


def test_single_gaussian():
    gm = GaussianMixture((1.0,), (3.0,))
    assert mixture_differential_entropy(gm) == pytest.approx(float(gaussian_entropy(3.0)))


@pytest.mark.parametrize("w,v", [((0.5, 0.5), (1.0, 41.0)), ((0.2, 0.8), (3.0, 2.0)),
                                 ((0.9, 0.1), (0.01, 5.0))])
def test_mixture_entropy_oracle(w, v):
    gm = GaussianMixture(w, v)
    want = trapezoid_oracle(gm)
    assert mixture_differential_entropy(gm) == pytest.approx(want, abs=1e-7)
    assert float(_mixture_entropy_grid(np.array(w), np.array(v))) == pytest.approx(want, abs=1e-7)


def test_mixture_entropy_bounds():
    w, v = (0.3, 0.7), (1.0, 4.0)
    h = mixture_differential_entropy(GaussianMixture(w, v))
    # concavity below, Gaussian with the mixture variance above
    assert h >= sum(wi * gaussian_entropy(vi) for wi, vi in zip(w, v)) - 1e-9
    assert h <= gaussian_entropy(np.dot(w, v)) + 1e-9


def test_collapse_merges():
    gm = GaussianMixture((0.2, 0.3, 0.5), (1.0, 1.0, 2.0)).collapsed()
    assert gm.variances == (1.0, 2.0)
    assert gm.weights == pytest.approx((0.5, 0.5))


def test_invalid_inputs():
    with pytest.raises(ValueError):
        GaussianMixture((0.5, 0.6), (1.0, 1.0))
    with pytest.raises(ValueError):
        DirtyPaperParams(gamma=1.5)
    with pytest.raises(ValueError):
        FadingParams(g1=1.0, g2=1.0)


def test_dpc_endpoints_and_dominance():
    assert dirty_paper_lower(DirtyPaperParams(gamma=0)).value == pytest.approx(0.292481, abs=1e-4)
    assert dirty_paper_lower(DirtyPaperParams(gamma=1)).value == pytest.approx(0.5, abs=1e-6)
    for g in (0.25, 0.5, 0.75):
        v = dirty_paper_lower(DirtyPaperParams(gamma=g)).value
        assert v >= time_sharing_value(0.292481, 0.5, g) - 1e-6


def test_dpc_budget_tight():
    r = dirty_paper_lower(DirtyPaperParams(gamma=0.4))
    a = r.argmax
    assert 0.6 * a["P1"] + 0.4 * a["P2"] == pytest.approx(1.0)


def test_fading_endpoints():
    assert fading_lower(FadingParams(gamma=0)).value == pytest.approx(0.507178, abs=1e-3)
    assert fading_lower(FadingParams(gamma=1)).value == pytest.approx(0.792481, abs=1e-3)


def test_fading_dominance_midpoint():
    v = fading_lower(FadingParams(gamma=0.5)).value
    assert v >= time_sharing_value(0.5071776, 0.7924813, 0.5) - 1e-6


def test_bound_curve_shape():
    c = bound_curve("dpc", np.linspace(0, 1, 11))
    assert c.monotone and c.concave
    with pytest.raises(ValueError):
        bound_curve("nope", [0.0, 1.0])
