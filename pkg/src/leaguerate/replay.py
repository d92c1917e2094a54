"""Chronological replay of a match corpus.

A corpus is compiled once into integer-indexed arrays plus a schedule of
season events (pre-season rollovers and post-season normalizations).  The
replay itself runs in a compiled loop, so one pass over a few hundred
thousand matches stays cheap enough to sit inside a parameter search.

Per match the loop: initializes unseen teams, predicts the win/draw/loss
triple, accumulates the log loss of the observed outcome, and updates both
teams.  Season starts apply drift and deviation inflation; season ends
re-centre the ratings.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from numba import njit

from .dataset import MatchRecord, TierTable, global_goal_mean, season_memberships, season_order
from .errors import ConfigurationError
from .glicko import TeamRating, g_kernel, snap_mu, triple_kernel, update_kernel
from .params import GLOBAL_FIELDS, LEAGUE_FIELDS, NO_DRAW_OFFSET, ParamVector
from .season import TransitionKind, classify
from .skellam import GoalHistory, draw_signal

logger = logging.getLogger(__name__)

PROB_FLOOR = 1e-12

_MU_INIT, _MU_NEW, _MU_PROM, _MU_REL, _PHI_S, _H, _H_P = range(7)
assert LEAGUE_FIELDS == ("mu_init", "mu_new", "mu_promoted", "mu_relegated", "phi_s", "h", "h_p")


@dataclass
class CompiledCorpus:
    """Array form of an ordered match list plus its season event schedule."""

    records: tuple
    teams: list
    leagues: list
    seasons: list
    pools: list
    window: int
    global_mean: float
    home: np.ndarray
    away: np.ndarray
    match_league: np.ndarray
    pandemic: np.ndarray
    neutral: np.ndarray
    outcome: np.ndarray
    signal: np.ndarray
    season_idx: np.ndarray
    init_league: np.ndarray
    init_below: np.ndarray
    team_pool: np.ndarray
    start_at: np.ndarray
    start_team: np.ndarray
    start_kind: np.ndarray
    start_league: np.ndarray
    norm_at: np.ndarray
    norm_pool: np.ndarray
    team_league: dict = field(default_factory=dict)
    memberships: dict = field(default_factory=dict)
    goal_history: GoalHistory | None = None

    def __len__(self):
        return len(self.records)

    def mask_seasons(self, seasons: Iterable[str]) -> np.ndarray:
        wanted = {self.seasons.index(s) for s in seasons if s in self.seasons}
        return np.isin(self.season_idx, list(wanted))


def compile_corpus(records: Sequence[MatchRecord], tiers: TierTable, window: int = 10, *,
                   global_mean: float | None = None, separate_pools: bool = False) -> CompiledCorpus:
    """Precompute everything about a replay that does not depend on parameters."""
    records = tuple(records)
    if not records:
        raise ConfigurationError("cannot replay an empty corpus")
    if any(b.date < a.date for a, b in zip(records, records[1:])):
        raise ConfigurationError("records must be in chronological order")
    seasons = season_order(records)
    s_index = {s: i for i, s in enumerate(seasons)}
    teams = sorted({m.home_team for m in records} | {m.away_team for m in records})
    t_index = {t: i for i, t in enumerate(teams)}
    leagues = sorted({m.home_league for m in records} | {m.away_league for m in records})
    missing = [lg for lg in leagues if lg not in tiers]
    if missing:
        raise ConfigurationError(f"leagues missing from the tier table: {missing}")
    l_index = {lg: i for i, lg in enumerate(leagues)}
    pools = sorted({tiers.pool_of(lg) for lg in leagues})
    p_index = {p: i for i, p in enumerate(pools)}
    if global_mean is None:
        global_mean = global_goal_mean(records)

    n = len(records)
    home = np.empty(n, np.int64)
    away = np.empty(n, np.int64)
    match_league = np.empty(n, np.int64)
    pandemic = np.zeros(n, np.bool_)
    neutral = np.zeros(n, np.bool_)
    outcome = np.empty(n, np.int64)
    signal = np.empty(n, np.float64)
    season_idx = np.empty(n, np.int64)

    history = GoalHistory(window, global_mean)
    first_match: dict[str, int] = {}
    first_label: dict[str, str] = {}
    team_league: dict[str, str] = {}
    league_first_season: dict[str, int] = {}
    season_first: dict[str, int] = {}
    season_last: dict[str, int] = {}
    active: dict[str, set] = {s: set() for s in seasons}
    by_season: dict[str, list] = {s: [] for s in seasons}

    for i, m in enumerate(records):
        home[i] = t_index[m.home_team]
        away[i] = t_index[m.away_team]
        match_league[i] = l_index[m.home_league]
        pandemic[i] = m.is_pandemic
        neutral[i] = m.is_neutral
        outcome[i] = m.outcome
        season_idx[i] = s_index[m.season]
        by_season[m.season].append(m)
        signal[i] = draw_signal(history.rates(m.home_team, m.away_team))
        history.push(m.home_team, m.away_team, m.home_goals, m.away_goals)
        for team, label in ((m.home_team, m.home_league), (m.away_team, m.away_league)):
            if team not in first_match:
                first_match[team] = i
                first_label[team] = label
            team_league[team] = label
            active[m.season].add(team)
        for label in (m.home_league, m.away_league):
            league_first_season.setdefault(label, s_index[m.season])
        season_first.setdefault(m.season, i)
        season_last[m.season] = i

    init_league = np.array([l_index[first_label[t]] for t in teams], np.int64)
    init_below = np.array(
        [s_index[records[first_match[t]].season] != league_first_season[first_label[t]]
         for t in teams], np.bool_)
    team_pool = np.array([p_index[tiers.pool_of(first_label[t])] for t in teams], np.int64)

    # pre-season events, seasons taken in order of their first match
    starts = []
    memberships = {}
    last_membership: dict[str, str] = {}
    for season in sorted(seasons, key=lambda s: season_first[s]):
        members = season_memberships(by_season[season], season, tiers)
        memberships[season] = members
        at = season_first[season]
        for team in sorted(members):
            if first_match[team] >= at:
                continue
            src = last_membership.get(team)
            kind = TransitionKind.STAYED if src is None else classify(src, members[team], tiers)[0]
            starts.append((at, t_index[team], int(kind), l_index[members[team]]))
        last_membership.update(members)
    starts.sort(key=lambda e: (e[0], e[1]))

    # post-season normalizations, one per pool that played in the season
    norms = []
    for season in sorted(seasons, key=lambda s: (season_last[s], s_index[s])):
        if separate_pools:
            played = sorted({int(team_pool[t_index[t]]) for t in active[season]})
            norms.extend((season_last[season], p) for p in played)
        else:
            norms.append((season_last[season], -1))

    def _col(rows, j):
        return np.array([r[j] for r in rows], np.int64)

    return CompiledCorpus(
        records=records, teams=teams, leagues=leagues, seasons=seasons, pools=pools,
        window=window, global_mean=global_mean,
        home=home, away=away, match_league=match_league, pandemic=pandemic, neutral=neutral,
        outcome=outcome, signal=signal, season_idx=season_idx,
        init_league=init_league, init_below=init_below, team_pool=team_pool,
        start_at=_col(starts, 0), start_team=_col(starts, 1), start_kind=_col(starts, 2),
        start_league=_col(starts, 3),
        norm_at=_col(norms, 0), norm_pool=_col(norms, 1),
        team_league=team_league, memberships=memberships, goal_history=history,
    )


@njit(cache=True)
def _replay_kernel(home, away, match_league, pandemic, neutral, outcome, signal, scored,
                   init_league, init_below, team_pool,
                   start_at, start_team, start_kind, start_league,
                   norm_at, norm_pool,
                   lp, phi0, sigma0, d, tau, original,
                   mu, phi, sigma, seen, probs, record_probs, stop):
    n = home.shape[0]
    n_teams = mu.shape[0]
    si = 0
    ni = 0
    loss = 0.0
    count = 0
    unconverged = 0
    for i in range(n):
        while si < start_at.shape[0] and start_at[si] == i:
            t = start_team[si]
            lg = start_league[si]
            if start_kind[si] == 1:
                mu[t] = snap_mu(mu[t] + lp[lg, _MU_PROM])
            elif start_kind[si] == 2:
                mu[t] = snap_mu(mu[t] + lp[lg, _MU_REL])
            phi[t] = phi[t] + lp[lg, _PHI_S]
            si += 1

        h = home[i]
        a = away[i]
        for t in (h, a):
            if not seen[t]:
                lg = init_league[t]
                start = lp[lg, _MU_INIT]
                if init_below[t]:
                    start = start + lp[lg, _MU_NEW]
                mu[t] = snap_mu(start)
                phi[t] = phi0
                sigma[t] = sigma0
                seen[t] = True
        if i == stop:
            break

        if original:
            shift = 0.0
            c = NO_DRAW_OFFSET
        else:
            c = d + signal[i]
            if neutral[i]:
                shift = 0.0
            elif pandemic[i]:
                shift = lp[match_league[i], _H_P]
            else:
                shift = lp[match_league[i], _H]
        gc = g_kernel(np.sqrt(phi[h] * phi[h] + phi[a] * phi[a]))
        p_win, p_draw, p_loss = triple_kernel(gc * ((mu[h] - mu[a]) + shift), c)
        if record_probs:
            probs[i, 0] = p_win
            probs[i, 1] = p_draw
            probs[i, 2] = p_loss
        oc = outcome[i]
        if scored[i]:
            p_obs = p_win if oc == 0 else (p_draw if oc == 1 else p_loss)
            loss -= np.log(max(p_obs, PROB_FLOOR))
            count += 1

        s_home = 1.0 if oc == 0 else (0.5 if oc == 1 else 0.0)
        e_home = p_win + 0.5 * p_draw
        e_away = p_loss + 0.5 * p_draw
        mh, ph, sh, ok_h = update_kernel(mu[h], phi[h], sigma[h], e_home, s_home,
                                         g_kernel(phi[a]), tau)
        ma, pa, sa, ok_a = update_kernel(mu[a], phi[a], sigma[a], e_away, 1.0 - s_home,
                                         g_kernel(phi[h]), tau)
        mu[h], phi[h], sigma[h] = mh, ph, sh
        mu[a], phi[a], sigma[a] = ma, pa, sa
        if not ok_h:
            unconverged += 1
        if not ok_a:
            unconverged += 1

        while ni < norm_at.shape[0] and norm_at[ni] == i:
            pool = norm_pool[ni]
            total = 0.0
            members = 0
            for t in range(n_teams):
                if seen[t] and (pool < 0 or team_pool[t] == pool):
                    total += mu[t]
                    members += 1
            shift_all = snap_mu(-total / members)
            for t in range(n_teams):
                if seen[t] and (pool < 0 or team_pool[t] == pool):
                    mu[t] = mu[t] + shift_all
            ni += 1
    return loss, count, unconverged


@dataclass
class ReplayResult:
    loss_sum: float
    n_scored: int
    ratings: dict
    probs: np.ndarray | None
    unconverged: int

    @property
    def mean_loss(self) -> float:
        if self.n_scored == 0:
            raise ValueError("no scored matches")
        return self.loss_sum / self.n_scored


def param_arrays(params: ParamVector, leagues: Sequence[str]):
    missing = [lg for lg in leagues if lg not in params.per_league]
    if missing:
        raise ConfigurationError(f"parameter vector lacks leagues {missing}")
    lp = np.array([[getattr(params.per_league[lg], f) for f in LEAGUE_FIELDS] for lg in leagues],
                  np.float64).reshape(len(leagues), len(LEAGUE_FIELDS))
    gp = tuple(float(getattr(params.globals, f)) for f in GLOBAL_FIELDS)
    return lp, gp


def replay(corpus: CompiledCorpus, params: ParamVector, *, scored: np.ndarray | None = None,
           record_probs: bool = False, until: int | None = None) -> ReplayResult:
    """Run the whole corpus once under ``params``.

    With ``until`` the replay stops just before match ``until`` is played:
    its season rollover has been applied and its teams initialized.
    """
    if until is not None and not 0 <= until < len(corpus):
        raise ValueError(f"until must index a match, got {until}")
    if params.globals.draw_signal_window != corpus.window:
        raise ConfigurationError(
            f"corpus compiled with window {corpus.window}, params ask for "
            f"{params.globals.draw_signal_window}")
    n = len(corpus)
    n_teams = len(corpus.teams)
    if scored is None:
        scored = np.ones(n, np.bool_)
    lp, (phi0, sigma0, d, tau) = param_arrays(params, corpus.leagues)
    mu = np.zeros(n_teams)
    phi = np.zeros(n_teams)
    sigma = np.zeros(n_teams)
    seen = np.zeros(n_teams, np.bool_)
    probs = np.zeros((n if record_probs else 0, 3))
    loss, count, unconverged = _replay_kernel(
        corpus.home, corpus.away, corpus.match_league, corpus.pandemic, corpus.neutral,
        corpus.outcome, corpus.signal, np.asarray(scored, np.bool_),
        corpus.init_league, corpus.init_below, corpus.team_pool,
        corpus.start_at, corpus.start_team, corpus.start_kind, corpus.start_league,
        corpus.norm_at, corpus.norm_pool,
        lp, phi0, sigma0, d, tau, params.globals.original_glicko,
        mu, phi, sigma, seen, probs, record_probs, -1 if until is None else until)
    if unconverged:
        logger.warning("%d volatility updates hit the iteration cap", unconverged)
    ratings = {t: TeamRating(float(mu[i]), float(phi[i]), float(sigma[i]))
               for i, t in enumerate(corpus.teams) if seen[i]}
    return ReplayResult(float(loss), int(count), ratings, probs if record_probs else None,
                        int(unconverged))


def replay_log_loss(params: ParamVector, corpus: CompiledCorpus,
                    scored: np.ndarray | None = None) -> float:
    """Mean log loss of a full replay."""
    return replay(corpus, params, scored=scored).mean_loss


def current_leagues(corpus: CompiledCorpus) -> Mapping[str, str]:
    """League label of each team's most recent match."""
    return dict(corpus.team_league)
