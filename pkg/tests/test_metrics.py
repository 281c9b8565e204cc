import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from quadloc.errors import DomainError
from quadloc.metrics import (DEFAULT_ALPHAS, ProbabilityVector, ipr, normalize_series,
                             renyi_entropy, report, rms_contrast, shannon_entropy)

THREE = [0.5, 0.25, 0.25]


def probs():
    weights = arrays(np.float64, st.integers(1, 60), elements=st.floats(0.0, 1.0))
    return weights.filter(lambda w: w.sum() > 1e-3).map(lambda w: w / w.sum())


def uniform(n):
    return np.full(n, 1.0 / n)


def delta(n, at=0):
    v = np.zeros(n)
    v[at] = 1.0
    return v


class TestIPR:
    def test_uniform(self):
        assert ipr(uniform(100)) == pytest.approx(0.01, abs=1e-15)

    def test_delta(self):
        assert ipr(delta(50, 7)) == 1.0

    def test_three(self):
        assert ipr(THREE) == pytest.approx(0.375, abs=1e-15)


class TestShannon:
    def test_uniform(self):
        assert shannon_entropy(uniform(100)) == pytest.approx(np.log(100), abs=1e-12)

    def test_delta(self):
        assert shannon_entropy(delta(10)) == 0.0

    def test_three(self):
        # 0.5 log 2 + 2 * 0.25 log 4 = 1.5 log 2
        assert shannon_entropy(THREE) == pytest.approx(1.5 * np.log(2), abs=1e-15)
        assert shannon_entropy(THREE) == pytest.approx(1.039721, abs=1e-6)


class TestRenyi:
    @pytest.mark.parametrize("alpha", [0.0, 0.5, 2.0, 3.7])
    def test_uniform(self, alpha):
        assert renyi_entropy(uniform(40), alpha) == pytest.approx(np.log(40), abs=1e-12)

    def test_order_two(self):
        assert renyi_entropy(THREE, 2.0) == pytest.approx(-np.log(0.375), abs=1e-15)
        assert renyi_entropy(THREE, 2.0) == pytest.approx(0.980829, abs=1e-6)

    def test_near_one(self):
        assert renyi_entropy(THREE, 1.001) == pytest.approx(1.039721, abs=1e-3)

    def test_alpha_one_rejected(self):
        with pytest.raises(DomainError, match="shannon"):
            renyi_entropy(THREE, 1.0)

    def test_negative_alpha_rejected(self):
        with pytest.raises(DomainError):
            renyi_entropy(THREE, -0.5)


class TestContrast:
    def test_uniform(self):
        assert rms_contrast(uniform(77)) == pytest.approx(0.0, abs=1e-12)

    def test_three(self):
        assert rms_contrast(THREE) == pytest.approx(np.sqrt(0.125), abs=1e-15)
        assert rms_contrast(THREE) == pytest.approx(np.sqrt(3 * 0.375 - 1), abs=1e-15)

    @pytest.mark.parametrize("n", [2, 9, 400])
    def test_delta(self, n):
        assert rms_contrast(delta(n)) == pytest.approx(np.sqrt(n - 1), rel=1e-12)


def test_report_consistency():
    rep = report(THREE)
    assert rep.renyi[2.0] == pytest.approx(-np.log(rep.ipr), abs=1e-12)
    assert rep.shannon_inv == pytest.approx(1 / rep.shannon, rel=1e-15)
    assert tuple(rep.renyi) == DEFAULT_ALPHAS
    assert rep.N == 3


def test_report_uniform():
    rep = report(uniform(100))
    assert (rep.ipr, rep.shannon, rep.rms_contrast) == pytest.approx(
        (0.01, np.log(100), 0.0), abs=1e-12)


def test_normalize_series():
    np.testing.assert_array_equal(normalize_series([2, 4, 8]), [0.25, 0.5, 1.0])
    np.testing.assert_array_equal(normalize_series([3.3] * 4), [1.0] * 4)
    assert normalize_series([0.1, 0.7, 0.3]).max() == 1.0


@pytest.mark.parametrize("bad", [[0.0, 0.0], [-1.0, -0.5], []])
def test_normalize_series_rejects(bad):
    with pytest.raises(DomainError):
        normalize_series(bad)


@pytest.mark.parametrize("bad", [[0.5, 0.6], [-0.1, 1.1], [np.nan, 1.0], []])
def test_invalid_probabilities(bad):
    with pytest.raises(DomainError):
        ipr(bad)
    with pytest.raises(DomainError):
        rms_contrast(bad)


def test_from_intensity_normalizes():
    p = ProbabilityVector.from_intensity([2.0, 1.0, 1.0])
    np.testing.assert_allclose(p.rho, THREE)


@given(probs())
def test_collision_identity(rho):
    assert abs(renyi_entropy(rho, 2.0) + np.log(ipr(rho))) <= 1e-12


@given(probs())
def test_contrast_identity(rho):
    n = rho.size
    assert abs(rms_contrast(rho) ** 2 - (n * ipr(rho) - 1)) <= 1e-10


@given(probs())
def test_bounds(rho):
    n = rho.size
    I, H, C = ipr(rho), shannon_entropy(rho), rms_contrast(rho)
    assert 1 / n - 1e-12 <= I <= 1 + 1e-12
    assert -1e-12 <= H <= np.log(n) + 1e-12
    assert -1e-12 <= C <= np.sqrt(n - 1) + 1e-9


@given(probs(), st.floats(0.0, 5.0), st.floats(0.0, 5.0))
def test_renyi_nonincreasing(rho, a, b):
    a, b = sorted((a, b))
    if min(abs(a - 1), abs(b - 1)) <= 1e-6:
        return
    assert renyi_entropy(rho, a) >= renyi_entropy(rho, b) - 1e-10


@given(probs(), st.randoms(use_true_random=False))
def test_permutation_invariance(rho, rnd):
    perm = list(range(rho.size))
    rnd.shuffle(perm)
    q = rho[perm]
    for f in (ipr, shannon_entropy, rms_contrast):
        assert f(q) == pytest.approx(f(rho), abs=1e-12)
    assert renyi_entropy(q, 1.6) == pytest.approx(renyi_entropy(rho, 1.6), abs=1e-12)


@settings(max_examples=200)
@given(probs().filter(lambda r: np.count_nonzero(r) > 1))
def test_shannon_limit_monotone(rho):
    hs = shannon_entropy(rho)
    errs = [abs(renyi_entropy(rho, 1 + 10.0 ** -k) - hs) for k in (1, 2, 3)]
    assert errs[0] + 1e-12 >= errs[1] and errs[1] + 1e-12 >= errs[2]
