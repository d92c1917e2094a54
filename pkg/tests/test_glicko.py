import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leaguerate.glicko import (
    MatchContext,
    TeamRating,
    expectation_modified,
    expectation_original,
    expected_scores,
    from_display,
    g,
    outcome_triple,
    to_display,
    update_pair,
    volatility_kernel,
    volatility_update,
)
from oracles import glicko_g, volatility_residual

finite = st.floats(-6, 6)
deviation = st.floats(0.05, 3.0)


class TestG:
    def test_zero(self):
        assert g(0.0) == 1.0

    def test_value(self):
        assert g(2.01476) == pytest.approx(0.6690697560294105, abs=1e-12)

    def test_strictly_decreasing(self):
        phis = np.linspace(0, 5, 200)
        values = [g(float(p)) for p in phis]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_negative(self):
        with pytest.raises(ValueError):
            g(-0.1)


class TestExpectation:
    def test_equal_ratings(self):
        for phi in (0.0, 0.5, 2.0):
            assert expectation_original(0.0, 0.0, phi) == 0.5

    def test_value(self):
        assert expectation_original(1.1513, 0.0, 0.0) == pytest.approx(0.7597482871446567, abs=1e-12)

    @given(finite, finite, deviation)
    def test_original_symmetry(self, mu, mu_j, phi):
        total = expectation_original(mu, mu_j, phi) + expectation_original(mu_j, mu, phi)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_modified_table_row(self):
        assert expectation_modified(0, 0, 0, -0.2219) == pytest.approx(0.357, abs=5e-4)

    def test_modified_equal_weights(self):
        assert expectation_modified(0, 0, 0, 0.0) == pytest.approx(1 / 3, abs=1e-15)

    @settings(max_examples=300)
    @given(finite, finite, deviation)
    def test_modified_reduces_to_original(self, mu, mu_j, phi):
        assert expectation_modified(mu, mu_j, phi, -30.0) == pytest.approx(
            expectation_original(mu, mu_j, phi), abs=1e-9)


def _rating(mu=0.0, phi=1.0, sigma=0.06):
    return TeamRating(mu, phi, sigma)


class TestOutcomeTriple:
    def test_table_row_zero(self):
        p = outcome_triple(_rating(phi=0.3), _rating(phi=0.3), MatchContext(draw_offset=-0.2219))
        assert (round(p.p_win, 3), round(p.p_draw, 3), round(p.p_loss, 3)) == (0.357, 0.286, 0.357)

    def test_no_draw_limit(self):
        p = outcome_triple(_rating(), _rating(), MatchContext(draw_offset=-800.0))
        assert p.as_tuple() == pytest.approx((0.5, 0.0, 0.5), abs=1e-15)

    def test_large_gap_asymptote(self):
        p = outcome_triple(_rating(mu=1e4), _rating(), MatchContext(draw_offset=-0.2))
        assert p.as_tuple() == pytest.approx((1.0, 0.0, 0.0), abs=1e-15)

    def test_home_advantage(self):
        ctx = MatchContext(h=0.3, h_p=0.1, draw_offset=-0.2)
        p = outcome_triple(_rating(), _rating(), ctx)
        assert p.p_win > p.p_loss
        pandemic = outcome_triple(_rating(), _rating(), MatchContext(0.3, 0.1, -0.2, is_pandemic=True))
        assert p.p_win > pandemic.p_win > pandemic.p_loss
        neutral = outcome_triple(_rating(), _rating(), MatchContext(0.3, 0.1, -0.2, is_neutral=True))
        assert neutral.p_win == neutral.p_loss

    def test_context_constraint(self):
        with pytest.raises(ValueError):
            MatchContext(h=0.1, h_p=0.2)
        with pytest.raises(ValueError):
            MatchContext(h=0.2, h_p=-0.1)
        MatchContext(h=0.0, h_p=0.0)

    @settings(max_examples=300)
    @given(finite, finite, deviation, deviation, st.floats(-40, 5), st.floats(0, 1))
    def test_sums_to_one(self, mu_h, mu_a, phi_h, phi_a, c, h):
        ctx = MatchContext(h=h + 0.01, h_p=h, draw_offset=c)
        p = outcome_triple(_rating(mu_h, phi_h), _rating(mu_a, phi_a), ctx)
        assert abs(sum(p.as_tuple()) - 1.0) < 1e-12

    @settings(max_examples=100)
    @given(deviation, deviation, st.floats(-3, 1))
    def test_monotone_in_gap(self, phi_h, phi_a, c):
        gaps = np.linspace(0, 5, 60)
        rows = [outcome_triple(_rating(float(d), phi_h), _rating(0.0, phi_a),
                               MatchContext(draw_offset=c)) for d in gaps]
        wins = [r.p_win for r in rows]
        draws = [r.p_draw for r in rows]
        losses = [r.p_loss for r in rows]
        assert all(a < b for a, b in zip(wins, wins[1:]))
        assert all(a > b for a, b in zip(draws, draws[1:]))
        assert all(a > b for a, b in zip(losses, losses[1:]))


class TestVolatility:
    def test_glickman_worked_example(self):
        # Glickman's Glicko-2 example: 1500/200 against 1400/30 (win),
        # 1550/100 (loss), 1700/300 (loss); sigma 0.06, tau 0.5.
        mu, phi = 0.0, 200 / 173.7178
        opps = [((1400 - 1500) / 173.7178, 30 / 173.7178, 1.0),
                ((1550 - 1500) / 173.7178, 100 / 173.7178, 0.0),
                ((1700 - 1500) / 173.7178, 300 / 173.7178, 0.0)]
        v_inv = 0.0
        gain = 0.0
        for mu_j, phi_j, s in opps:
            gj = glicko_g(phi_j)
            e = 1 / (1 + math.exp(-gj * (mu - mu_j)))
            v_inv += gj * gj * e * (1 - e)
            gain += gj * (s - e)
        v = 1 / v_inv
        # the published intermediates were computed from 4-decimal roundings
        assert v == pytest.approx(1.7785, abs=1e-3)
        assert v * gain == pytest.approx(-0.4834, abs=1e-3)
        assert volatility_update(phi, v, v * gain, 0.06, 0.5) == pytest.approx(0.05999, abs=1e-5)

    def test_frozen_when_tau_vanishes(self):
        # delta^2 <= phi^2 + v
        assert volatility_update(1.0, 2.0, 0.5, 0.06, 1e-6) == pytest.approx(0.06, rel=1e-6)

    @settings(max_examples=300)
    @given(st.floats(0.05, 3), st.floats(0.1, 50), st.floats(-10, 10),
           st.floats(0.01, 0.3), st.floats(0.2, 1.5))
    def test_residual_and_positivity(self, phi, v, delta, sigma, tau):
        new = volatility_update(phi, v, delta, sigma, tau)
        assert new > 0
        assert abs(volatility_residual(new, phi, v, delta, sigma, tau)) < 1e-6

    def test_nonconvergence_returns_midpoint(self):
        sigma, it, ok = volatility_kernel(1.0, 2.0, 3.0, 0.06, 0.5, 1e-6, 1)
        assert not ok and it == 1 and sigma > 0

    def test_domain(self):
        with pytest.raises(ValueError):
            volatility_update(1.0, 1.0, 0.0, 0.06, 0.0)


class TestUpdatePair:
    def test_zero_innovation_fixed_point(self):
        home, away = _rating(0.3, 0.8), _rating(-0.1, 1.2)
        ctx = MatchContext(h=0.25, h_p=0.1, draw_offset=-0.3)
        e_home, _ = expected_scores(outcome_triple(home, away, ctx))
        new_home, new_away = update_pair(home, away, ctx, e_home, tau=0.5)
        assert abs(new_home.mu - home.mu) < 1e-10
        assert abs(new_away.mu - away.mu) < 1e-10

    def test_underdog_win_gains_more(self):
        ctx = MatchContext(draw_offset=-0.2)
        low, _ = update_pair(_rating(-0.5), _rating(0.5), ctx, 1.0, 0.5)
        high, _ = update_pair(_rating(0.5), _rating(-0.5), ctx, 1.0, 0.5)
        assert low.mu - (-0.5) > high.mu - 0.5 > 0

    def test_uncertain_team_moves_more(self):
        ctx = MatchContext(draw_offset=-0.2)
        sure, _ = update_pair(_rating(0.0, 0.3), _rating(0.0, 0.5), ctx, 0.0, 0.5)
        unsure, _ = update_pair(_rating(0.0, 1.5), _rating(0.0, 0.5), ctx, 0.0, 0.5)
        assert abs(unsure.mu) > abs(sure.mu)

    @settings(max_examples=200)
    @given(finite, finite, deviation, deviation, st.sampled_from([0.0, 0.5, 1.0]))
    def test_deviation_shrinks_below_inflated(self, mu_h, mu_a, phi_h, phi_a, score):
        home, away = _rating(mu_h, phi_h), _rating(mu_a, phi_a)
        new_home, new_away = update_pair(home, away, MatchContext(draw_offset=-0.3), score, 0.5)
        for old, new in ((home, new_home), (away, new_away)):
            assert new.phi < math.sqrt(old.phi ** 2 + new.sigma ** 2)

    @settings(max_examples=200)
    @given(finite, finite, deviation, st.sampled_from([0.0, 1.0]))
    def test_decisive_result_moves_in_opposite_directions(self, mu_h, mu_a, phi, score):
        home, away = _rating(mu_h, phi), _rating(mu_a, phi)
        new_home, new_away = update_pair(home, away, MatchContext(draw_offset=-0.3), score, 0.5)
        gain_home, gain_away = new_home.mu - home.mu, new_away.mu - away.mu
        assert gain_home * gain_away < 0
        assert (gain_home > 0) == (score == 1.0)

    def test_invalid_score(self):
        with pytest.raises(ValueError):
            update_pair(_rating(), _rating(), MatchContext(), 1.5, 0.5)


class TestDisplay:
    def test_anchor_and_scale(self):
        assert to_display(_rating(0.0)) == 1500.0
        assert to_display(_rating(1.0)) == pytest.approx(1673.7178, abs=1e-12)

    def test_round_trip(self):
        r = from_display(2237.7, 0.5, 0.06)
        assert to_display(r) == pytest.approx(2237.7, abs=1e-12)
        assert r.display == pytest.approx(2237.7, abs=1e-12)

    def test_invalid_state(self):
        with pytest.raises(ValueError):
            TeamRating(0.0, 0.0, 0.06)
        with pytest.raises(ValueError):
            TeamRating(math.nan, 1.0, 0.06)
