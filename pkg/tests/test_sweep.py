import numpy as np
import pytest
from hypothesis import given, strategies as st

from quadloc.errors import BoundaryWarning, ConfigurationError, DomainError, TrackingError
from quadloc.metrics import ProbabilityVector, report
from quadloc.sweep import (StepRecord, SweepConfig, TrackedPair, detect_gap_minimum,
                           exchange_diagnostic, label_continuity_holds, solve_step, track)

from conftest import GRID, _field, _patterns, two_level_steps


class TestGapMinimum:
    @staticmethod
    def hyperbola(e, g=0.001):
        return 2 * np.sqrt((e - 0.09) ** 2 + g ** 2)

    def test_two_level_centre(self):
        eps = np.linspace(0.085, 0.095, 11)
        e_ac, gap = detect_gap_minimum(zip(eps, self.hyperbola(eps)))
        assert abs(e_ac - 0.09) <= 0.0005
        assert gap == pytest.approx(0.002, rel=1e-9)

    def test_min_gap_converges(self):
        errs = []
        for n in (11, 41, 161):
            eps = np.linspace(0.0853, 0.0953, n)
            e_ac, gap = detect_gap_minimum(zip(eps, self.hyperbola(eps)))
            assert abs(e_ac - 0.09) <= 0.5 * (eps[1] - eps[0])
            errs.append(abs(gap - 0.002))
        assert errs[0] > errs[1] > errs[2]

    def test_linear_v(self):
        eps = np.linspace(0.085, 0.095, 11)
        e_ac, gap = detect_gap_minimum(zip(eps, np.abs(eps - 0.09)))
        assert e_ac == pytest.approx(0.09, abs=1e-12)

    def test_monotone_warns(self):
        eps = np.linspace(0.085, 0.095, 6)
        with pytest.warns(BoundaryWarning):
            e_ac, _ = detect_gap_minimum(zip(eps, 1 + eps))
        assert e_ac == eps[0]

    def test_too_short(self):
        with pytest.raises(DomainError):
            detect_gap_minimum([(0.1, 1.0), (0.2, 0.5)])

    @given(st.floats(0.087, 0.093), st.floats(1e-4, 5e-3))
    def test_centre_within_half_step(self, centre, g):
        eps = np.linspace(0.085, 0.095, 21)
        gaps = 2 * np.sqrt((eps - centre) ** 2 + g ** 2)
        e_ac, _ = detect_gap_minimum(zip(eps, gaps))
        assert abs(e_ac - centre) <= 0.5 * (eps[1] - eps[0]) + 1e-12


class TestTracking:
    eps = np.linspace(0.07, 0.11, 41)

    def test_follows_adiabatic_branches(self):
        pair = track(two_level_steps(self.eps, shuffle_seed=3))
        assert all(r.k_red < r.k_blue for r in pair.records)
        assert label_continuity_holds(pair)
        assert np.all(pair.gaps > 0)

    def test_exchange_two_level(self):
        pair = track(two_level_steps(self.eps, shuffle_seed=5))
        for metric in ("ipr", "shannon_inv", "rms_contrast", "renyi_2.0"):
            assert exchange_diagnostic(pair, metric) > 0.5

    def test_metrics_dip_at_centre(self):
        pair = track(two_level_steps(self.eps))
        e_ac, _ = detect_gap_minimum(zip(pair.epsilons, pair.gaps))
        assert e_ac == pytest.approx(0.09, abs=1e-3)

    def test_lost_track(self):
        steps = two_level_steps(self.eps[:3])
        a, b = _patterns()
        X, Y = GRID.mesh()
        c = np.sin(7 * X.ravel()) * np.sin(5 * Y.ravel())
        c -= np.dot(a, c) * a + np.dot(b, c) * b
        d = np.cos(6 * X.ravel()) * np.sin(4 * Y.ravel())
        for v in (a, b, c):
            d -= np.dot(v, d) / np.dot(v, v) * v
        steps[2].fields = [_field(c), _field(d)]
        with pytest.raises(TrackingError, match="lost track"):
            track(steps)


def _constant_pair(value):
    rep = report(ProbabilityVector(np.full(4, 0.25)))
    recs = [StepRecord(e, 1.0, 1.0 + abs(e - 0.5) + 0.1, abs(e - 0.5) + 0.1, rep, rep)
            for e in (0.4, 0.5, 0.6)]
    return TrackedPair(recs)


def test_exchange_degenerate_zero():
    assert exchange_diagnostic(_constant_pair(1.0), "ipr") == 0.0


def test_exchange_requires_bracket():
    pair = track(two_level_steps(np.linspace(0.095, 0.11, 6)))
    with pytest.raises(DomainError):
        exchange_diagnostic(pair, "ipr", epsilon_ac=0.09)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_exchange_score_bounded(r0, r1, b0, b1):
    probs = lambda x: np.array([x, 1 - x]) if 0 < x < 1 else np.array([0.5, 0.5])  # noqa: E731
    reps = {v: report(ProbabilityVector(probs(v))) for v in (r0, r1, b0, b1)}
    recs = [StepRecord(0.08, 1, 2, 1, reps[r0], reps[b0]),
            StepRecord(0.09, 1, 1.5, 0.5, reps[r0], reps[b0]),
            StepRecord(0.10, 1, 2, 1, reps[r1], reps[b1])]
    s = exchange_diagnostic(TrackedPair(recs), "ipr", epsilon_ac=0.09)
    assert -1.0 <= s <= 1.0


class TestSweepConfig:
    def test_defaults(self):
        cfg = SweepConfig()
        assert cfg.steps == 13
        np.testing.assert_allclose(cfg.epsilons()[[0, -1]], [0.085, 0.097])

    @pytest.mark.parametrize("kw", [dict(steps=2), dict(epsilon_start=0.1, epsilon_stop=0.09),
                                    dict(k_window=(5.0, 4.0)), dict(epsilon_stop=0.6),
                                    dict(workers=0)])
    def test_invalid(self, kw):
        with pytest.raises(ConfigurationError):
            SweepConfig(**kw)

    def test_grid_covers_widest_shape(self):
        g = SweepConfig(epsilon_start=0.0, epsilon_stop=0.2, steps=3,
                        grid_resolution=11).grid()
        assert -g.origin[0] == pytest.approx(1.2 / np.sqrt(1.02))
        assert g.origin[0] + g.spacing[0] * 10 == pytest.approx(-g.origin[0])


def test_solve_step_counts_modes():
    cfg = SweepConfig(epsilon_start=0.0, epsilon_stop=0.01, steps=3, elements=64,
                      k_window=(2.3, 2.5), grid_resolution=21)
    with pytest.raises(TrackingError, match="epsilon=0"):
        solve_step(0.0, cfg, cfg.grid())


SHARP = dict(center=0.0914, coupling=1e-4, slope=1.0)


def _sharp_steps():
    return two_level_steps(np.linspace(0.085, 0.097, 13), **SHARP)


def _sharp_refine(eps):
    return two_level_steps([eps], **SHARP)[0]


def test_sharp_crossing_coarse_pairing_is_diabatic():
    pair = track(_sharp_steps())
    assert exchange_diagnostic(pair, "ipr", 0.0914) < 0
    assert pair.refined_epsilons == []


def test_sharp_crossing_refined_pairing_follows_branches():
    pair = track(_sharp_steps(), refine=_sharp_refine, max_refinements=6)
    assert exchange_diagnostic(pair, "ipr", 0.0914) > 0.5
    red, blue = pair.metric("red", "ipr"), pair.metric("blue", "ipr")
    assert abs(red[-1] - blue[0]) < abs(red[-1] - red[0])
    assert all(r.k_red < r.k_blue for r in pair.records)
    extra = pair.refined_epsilons
    assert extra and all(0.091 < e < 0.092 for e in extra)
    assert label_continuity_holds(pair)
    assert max(c.cross for c in pair.chain) < 0.5


def test_refinement_depth_zero_matches_plain_tracking():
    plain = track(_sharp_steps())
    capped = track(_sharp_steps(), refine=_sharp_refine, max_refinements=0)
    assert [r.k_red for r in plain.records] == [r.k_red for r in capped.records]


def test_refine_not_called_for_smooth_crossing():
    def boom(eps):
        raise AssertionError("refinement requested")

    pair = track(two_level_steps(np.linspace(0.085, 0.097, 13), center=0.091), refine=boom)
    assert len(pair.chain) == 12
    assert label_continuity_holds(pair)


def test_negative_refinement_depth_rejected():
    with pytest.raises(ConfigurationError):
        SweepConfig(max_refinements=-1)
