import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leaguerate.skellam import (
    GoalHistory,
    GoalRates,
    bessel_i,
    blend_rate,
    draw_signal,
    outcome_probs_from_goals,
    rolling_goal_rates,
    skellam_pmf,
)
from oracles import bessel_reference, skellam_brute

GRID = [0.1, 0.5, 1.0, 2.0, 5.0]


class TestBessel:
    def test_order_zero_at_origin(self):
        assert bessel_i(0, 0.0) == 1.0

    def test_positive_order_at_origin(self):
        assert bessel_i(1, 0.0) == 0.0

    def test_known_value(self):
        # 30-term series, summed independently
        assert bessel_i(0, 2.0) == pytest.approx(2.2795853023360673, abs=1e-12)

    @pytest.mark.parametrize("order", [0, 1, 2, 5, 10, 15])
    def test_matches_reference_series(self, order):
        for x in np.linspace(0.0, 20.0, 41):
            ref = bessel_reference(order, float(x))
            assert bessel_i(order, float(x)) == pytest.approx(ref, rel=1e-12, abs=1e-300)

    @pytest.mark.parametrize("args", [(-1, 1.0), (0, -0.5)])
    def test_domain_error(self, args):
        with pytest.raises(ValueError):
            bessel_i(*args)


class TestSkellamPmf:
    def test_values(self):
        assert skellam_pmf(0, GoalRates(1, 1)) == pytest.approx(0.30850832255367105, abs=1e-12)
        assert skellam_pmf(2, GoalRates(1, 1)) == pytest.approx(0.09323903330473339, abs=1e-12)

    def test_zero_away_rate_is_poisson(self):
        assert skellam_pmf(3, GoalRates(2, 0)) == pytest.approx(math.exp(-2) * 8 / 6, abs=1e-15)
        assert skellam_pmf(-1, GoalRates(2, 0)) == 0.0

    def test_zero_home_rate(self):
        assert skellam_pmf(-2, GoalRates(0, 1.5)) == pytest.approx(math.exp(-1.5) * 1.5 ** 2 / 2)
        assert skellam_pmf(1, GoalRates(0, 1.5)) == 0.0

    def test_both_zero(self):
        assert skellam_pmf(0, GoalRates(0, 0)) == 1.0
        assert skellam_pmf(1, GoalRates(0, 0)) == 0.0

    @pytest.mark.parametrize("mu1", GRID)
    @pytest.mark.parametrize("mu2", GRID)
    def test_total_mass(self, mu1, mu2):
        total = sum(skellam_pmf(k, GoalRates(mu1, mu2)) for k in range(-30, 31))
        assert total == pytest.approx(1.0, abs=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0, 5), st.floats(0, 5), st.integers(-10, 10))
    def test_relabeling_symmetry(self, mu1, mu2, k):
        lhs = skellam_pmf(k, GoalRates(mu1, mu2))
        rhs = skellam_pmf(-k, GoalRates(mu2, mu1))
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_random_grid_against_brute_force(self):
        rng = np.random.default_rng(7)
        for mu1, mu2, k in zip(rng.uniform(0.05, 4, 60), rng.uniform(0.05, 4, 60),
                               rng.integers(-8, 9, 60)):
            ref = skellam_brute(int(k), float(mu1), float(mu2))
            assert skellam_pmf(int(k), GoalRates(float(mu1), float(mu2))) == pytest.approx(ref, abs=1e-9)

    def test_invalid_rates(self):
        with pytest.raises(ValueError):
            GoalRates(-0.1, 1.0)
        with pytest.raises(ValueError):
            GoalRates(1.0, math.inf)


class TestOutcomeProbs:
    def test_even_match(self):
        p = outcome_probs_from_goals(GoalRates(1, 1))
        assert p.p_win == pytest.approx(0.3457458387231645, abs=1e-9)
        assert p.p_draw == pytest.approx(0.30850832255367105, abs=1e-9)
        assert p.p_loss == pytest.approx(p.p_win, abs=1e-15)

    def test_no_goals(self):
        assert outcome_probs_from_goals(GoalRates(0, 0)).as_tuple() == (0.0, 1.0, 0.0)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0, 6), st.floats(0, 6))
    def test_sums_to_one_and_symmetric(self, mu1, mu2):
        p = outcome_probs_from_goals(GoalRates(mu1, mu2))
        assert abs(sum(p.as_tuple()) - 1.0) < 1e-12
        assert all(0.0 <= q <= 1.0 for q in p.as_tuple())
        q = outcome_probs_from_goals(GoalRates(mu2, mu1))
        assert p.p_win == pytest.approx(q.p_loss, abs=1e-12)


class TestDrawSignal:
    def test_values(self):
        assert draw_signal(GoalRates(1, 1)) == pytest.approx(0.30850832255367105, abs=1e-9)
        assert draw_signal(GoalRates(0, 0)) == 1.0

    def test_mismatch_rarely_draws(self):
        s = draw_signal(GoalRates(5, 0.1))
        assert s < 0.05
        assert s == pytest.approx(skellam_brute(0, 5, 0.1), abs=1e-9)


def _m(home, away, hg, ag):
    return SimpleNamespace(home_team=home, away_team=away, home_goals=hg, away_goals=ag)


class TestRollingRates:
    def test_blend_arithmetic(self):
        assert blend_rate([2, 1, 0], [1, 1, 1], 3, 1.3) == pytest.approx(1.0)
        assert blend_rate([0, 4], [2, 0], 1, 1.3) == pytest.approx(2.0)

    def test_fallback_without_history(self):
        r = rolling_goal_rates("A", "B", [], 5, 1.3)
        assert (r.mu_home, r.mu_away) == (1.3, 1.3)

    def test_history_scan(self):
        history = [_m("A", "C", 2, 1), _m("B", "A", 1, 1), _m("A", "D", 0, 3),
                   _m("B", "C", 0, 0)]
        r = rolling_goal_rates("A", "B", history, 3, 1.3)
        # A scored [2, 1, 0]; B conceded [1, 0]; B scored [1, 0]; A conceded [1, 1, 3]
        assert r.mu_home == pytest.approx(0.5 * (1.0 + 0.5))
        assert r.mu_away == pytest.approx(0.5 * (0.5 + 5 / 3))

    def test_partial_fallback(self):
        r = rolling_goal_rates("A", "New", [_m("A", "C", 3, 1)], 5, 1.2)
        assert r.mu_home == pytest.approx(0.5 * (3 + 1.2))
        assert r.mu_away == pytest.approx(0.5 * (1.2 + 1))

    def test_streaming_matches_rescan(self):
        rng = np.random.default_rng(3)
        teams = list("ABCDEF")
        history = []
        stream = GoalHistory(window=4, global_mean=1.25)
        for _ in range(120):
            h, a = rng.choice(teams, 2, replace=False)
            expected = rolling_goal_rates(h, a, history, 4, 1.25)
            got = stream.rates(h, a)
            assert got.mu_home == pytest.approx(expected.mu_home, abs=1e-12)
            assert got.mu_away == pytest.approx(expected.mu_away, abs=1e-12)
            hg, ag = (int(x) for x in rng.poisson(1.3, 2))
            history.append(_m(h, a, hg, ag))
            stream.push(h, a, hg, ag)
