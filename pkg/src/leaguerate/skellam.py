"""Goal-difference probabilities under independent Poisson scoring.

The difference of two independent Poisson counts follows a Skellam law.
Its mass at ``k`` is written with a modified Bessel function of the first
kind, which is evaluated here by direct series summation.  The draw mass
of that law is the per-match draw signal fed into the rating model.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

# Largest |goal difference| summed when collapsing the pmf to three outcomes.
MAX_GOAL_DIFF = 30

_SERIES_RTOL = 1e-15
_SERIES_MAX_TERMS = 500


@dataclass(frozen=True)
class GoalRates:
    """Expected goals for the home and away side of one match."""

    mu_home: float
    mu_away: float

    def __post_init__(self):
        for name in ("mu_home", "mu_away"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {value!r}")


@dataclass(frozen=True)
class OutcomeProbs:
    """Home-perspective probabilities of win, draw and loss."""

    p_win: float
    p_draw: float
    p_loss: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_win, self.p_draw, self.p_loss)


def _bessel_series(order: int, log_half_x: float) -> tuple[float, float]:
    # (log of leading term, series sum relative to the leading term)
    quarter_sq = math.exp(2.0 * log_half_x)
    log_lead = order * log_half_x - math.lgamma(order + 1)
    term = 1.0
    total = 1.0
    for m in range(1, _SERIES_MAX_TERMS):
        term *= quarter_sq / (m * (m + order))
        if term < _SERIES_RTOL * total:
            break
        total += term
    return log_lead, total


def bessel_i(order: int, x: float) -> float:
    """Modified Bessel function of the first kind ``I_order(x)``.

    Sums ``(x/2)^(2m+order) / (m! (m+order)!)`` until the next term drops
    below ``1e-15`` of the running sum.
    """
    if order < 0 or x < 0:
        raise ValueError(f"bessel_i needs order >= 0 and x >= 0, got ({order}, {x})")
    if x == 0.0:
        return 1.0 if order == 0 else 0.0
    log_lead, rel = _bessel_series(order, math.log(0.5 * x))
    return math.exp(log_lead) * rel


def _poisson_pmf(n: int, rate: float) -> float:
    if n < 0:
        return 0.0
    if rate == 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(n * math.log(rate) - rate - math.lgamma(n + 1))


def _convolution_pmf(k: int, mu1: float, mu2: float) -> float:
    # sum over n of P1(n + k) P2(n); used when a rate is zero
    total = 0.0
    n = max(0, -k)
    for _ in range(_SERIES_MAX_TERMS):
        term = _poisson_pmf(n + k, mu1) * _poisson_pmf(n, mu2)
        total += term
        if mu1 == 0.0 or mu2 == 0.0:
            break
        n += 1
    return total


def skellam_pmf(k: int, rates: GoalRates) -> float:
    """Probability that home goals minus away goals equals ``k``."""
    mu1, mu2 = rates.mu_home, rates.mu_away
    if mu1 == 0.0 or mu2 == 0.0:
        return _convolution_pmf(k, mu1, mu2)
    # I_{-k} = I_k for integer order; the ratio prefactor is folded into
    # the log of the leading Bessel term to keep extreme rate ratios finite
    log1, log2 = math.log(mu1), math.log(mu2)
    log_lead, rel = _bessel_series(abs(k), 0.5 * (log1 + log2))
    return math.exp(-(mu1 + mu2) + 0.5 * k * (log1 - log2) + log_lead) * rel


def outcome_probs_from_goals(rates: GoalRates) -> OutcomeProbs:
    """Collapse the goal-difference law into win/draw/loss, renormalised."""
    win = sum(skellam_pmf(k, rates) for k in range(1, MAX_GOAL_DIFF + 1))
    loss = sum(skellam_pmf(-k, rates) for k in range(1, MAX_GOAL_DIFF + 1))
    draw = skellam_pmf(0, rates)
    total = win + draw + loss
    return OutcomeProbs(win / total, draw / total, loss / total)


@lru_cache(maxsize=1 << 16)
def _draw_signal_cached(mu_home: float, mu_away: float) -> float:
    return outcome_probs_from_goals(GoalRates(mu_home, mu_away)).p_draw


def draw_signal(rates: GoalRates) -> float:
    """Skellam draw probability used as the draw signal of a match."""
    return _draw_signal_cached(rates.mu_home, rates.mu_away)


def _blend(own: Sequence[int], opp: Sequence[int], fallback: float) -> float:
    a = sum(own) / len(own) if own else fallback
    b = sum(opp) / len(opp) if opp else fallback
    return 0.5 * (a + b)


def blend_rate(scored: Sequence[int], conceded_by_opponent: Sequence[int],
               window: int, fallback: float) -> float:
    """Mean of recent goals scored and the opponent's recent goals conceded.

    Only the last ``window`` entries of each sequence count; an empty side
    falls back to ``fallback``.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    return _blend(list(scored)[-window:], list(conceded_by_opponent)[-window:], fallback)


def rolling_goal_rates(home_team: str, away_team: str, history: Iterable,
                       window: int, global_mean: float) -> GoalRates:
    """Expected goals for a fixture from the teams' previous matches.

    ``history`` holds the already played matches (objects with
    ``home_team``, ``away_team``, ``home_goals``, ``away_goals``) in
    chronological order.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    scored = {home_team: [], away_team: []}
    conceded = {home_team: [], away_team: []}
    for m in history:
        if m.home_team in scored:
            scored[m.home_team].append(m.home_goals)
            conceded[m.home_team].append(m.away_goals)
        if m.away_team in scored:
            scored[m.away_team].append(m.away_goals)
            conceded[m.away_team].append(m.home_goals)
    mu_home = blend_rate(scored[home_team], conceded[away_team], window, global_mean)
    mu_away = blend_rate(scored[away_team], conceded[home_team], window, global_mean)
    return GoalRates(mu_home, mu_away)


class GoalHistory:
    """Streaming per-team goal windows.

    Gives the same rates as :func:`rolling_goal_rates` without rescanning
    the history for every match.
    """

    def __init__(self, window: int, global_mean: float):
        if window < 1:
            raise ValueError("window must be >= 1")
        self.window = window
        self.global_mean = global_mean
        self._scored: dict[str, deque] = {}
        self._conceded: dict[str, deque] = {}

    def _queues(self, team):
        if team not in self._scored:
            self._scored[team] = deque(maxlen=self.window)
            self._conceded[team] = deque(maxlen=self.window)
        return self._scored[team], self._conceded[team]

    def rates(self, home_team: str, away_team: str) -> GoalRates:
        hs, hc = self._queues(home_team)
        as_, ac = self._queues(away_team)
        return GoalRates(_blend(hs, ac, self.global_mean), _blend(as_, hc, self.global_mean))

    def push(self, home_team: str, away_team: str, home_goals: int, away_goals: int):
        hs, hc = self._queues(home_team)
        as_, ac = self._queues(away_team)
        hs.append(home_goals)
        hc.append(away_goals)
        as_.append(away_goals)
        ac.append(home_goals)
