"""Synthetic league corpora with known ground truth.

Teams carry a latent strength on the internal rating scale.  Each match
outcome is drawn from the three-way triple with logit gap
``strength_home - strength_away + home_shift`` and a fixed draw offset, so
the rating model is well specified up to its deviation attenuation.  The
generator also keeps the true probabilities, which gives the loss an
oracle would achieve.

Between seasons the bottom clubs of each first tier swap with the top of
the second tier, the bottom of the second tier leaves the data and fresh
(weaker) clubs arrive from below.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from .dataset import LeagueInfo, MatchRecord, TierTable, in_pandemic_window
from .glicko import triple_kernel

TIER_NAMES = ("First", "Second")
INTERNATIONAL = "International"


@dataclass
class SynthConfig:
    countries: int = 2
    teams_per_league: int = 20
    seasons: int = 6
    first_year: int = 2017
    double_round_robin: bool = False
    swaps: int = 3
    international_per_season: int = 24
    h: float = 0.25
    h_p: float = 0.1
    c: float = -0.2
    tier_gap: float = 0.6
    strength_sd: float = 0.45
    country_sd: float = 0.15
    drift_sd: float = 0.08
    newcomer_penalty: float = 0.3
    seed: int = 0

    @classmethod
    def large(cls, **overrides) -> "SynthConfig":
        """About 366k matches: 37 countries, two tiers, double round robin, 13 seasons."""
        base = dict(countries=37, seasons=13, first_year=2010, double_round_robin=True,
                    international_per_season=0)
        base.update(overrides)
        return cls(**base)


@dataclass
class SynthCorpus:
    records: list
    tiers: TierTable
    true_probs: np.ndarray
    config: SynthConfig
    strengths: dict = field(default_factory=dict)

    def oracle_loss(self, mask=None) -> float:
        """Mean log loss of the generating probabilities."""
        outcomes = np.array([m.outcome for m in self.records])
        p = self.true_probs[np.arange(len(outcomes)), outcomes]
        if mask is not None:
            p = p[np.asarray(mask, bool)]
        return float(-np.mean(np.log(p)))


def country_name(i: int) -> str:
    return f"Land{i:02d}"


def _round_robin(n: int):
    """Circle-method rounds of (i, j) index pairs for ``n`` (even) teams."""
    idx = list(range(n))
    rounds = []
    for _ in range(n - 1):
        rounds.append([(idx[k], idx[n - 1 - k]) for k in range(n // 2)])
        idx = [idx[0], idx[-1]] + idx[1:-1]
    return rounds


def _scoreline(rng, outcome: int) -> tuple[int, int]:
    if outcome == 1:
        k = int(rng.poisson(1.1))
        return k, k
    loser = int(rng.poisson(0.8))
    winner = loser + 1 + int(rng.poisson(0.6))
    return (winner, loser) if outcome == 0 else (loser, winner)


def generate(config: SynthConfig | None = None) -> SynthCorpus:
    """Simulate a corpus; identical configs give identical corpora."""
    cfg = config or SynthConfig()
    if cfg.teams_per_league % 2 or cfg.teams_per_league < 2 * cfg.swaps + 2:
        raise ValueError("teams_per_league must be even and leave room for the swaps")
    rng = np.random.default_rng(cfg.seed)
    n = cfg.teams_per_league

    tiers = TierTable()
    for ci in range(cfg.countries):
        country = country_name(ci)
        for tier, name in enumerate(TIER_NAMES, start=1):
            tiers[f"{country}.{name}"] = LeagueInfo(country, tier, "Europe")

    strength: dict[str, float] = {}
    members: dict[str, list] = {}
    serial = {country_name(ci): 0 for ci in range(cfg.countries)}

    def new_team(country: str, mean: float) -> str:
        serial[country] += 1
        team = f"{country} FC{serial[country]:03d}"
        strength[team] = float(rng.normal(mean, cfg.strength_sd))
        return team

    country_level = {}
    for ci in range(cfg.countries):
        country = country_name(ci)
        country_level[country] = float(rng.normal(0.0, cfg.country_sd))
        for tier, name in enumerate(TIER_NAMES):
            mean = country_level[country] + cfg.tier_gap * (0.5 - tier)
            members[f"{country}.{name}"] = [new_team(country, mean) for _ in range(n)]

    records: list[MatchRecord] = []
    probs: dict[str, tuple] = {}
    schedule = _round_robin(n)
    if cfg.double_round_robin:
        schedule = schedule + [[(j, i) for i, j in rnd] for rnd in schedule]

    for year in range(cfg.first_year, cfg.first_year + cfg.seasons):
        season = f"{year}/{year + 1}"
        start = dt.date(year, 8, 1)
        span = (dt.date(year + 1, 5, 31) - start).days
        points: dict[str, float] = {}
        fixtures = []
        for league, teams in members.items():
            order = list(rng.permutation(len(teams)))
            for r, rnd in enumerate(schedule):
                day = start + dt.timedelta(days=int(r * span / len(schedule)))
                for i, j in rnd:
                    a, b = teams[order[i]], teams[order[j]]
                    if not cfg.double_round_robin and rng.random() < 0.5:
                        a, b = b, a
                    fixtures.append((day, league, a, b, league, league, False))
        firsts = [lg for lg in members if lg.endswith(".First")]
        for _ in range(cfg.international_per_season if len(firsts) > 1 else 0):
            la, lb = rng.choice(len(firsts), size=2, replace=False)
            a = members[firsts[la]][int(rng.integers(n))]
            b = members[firsts[lb]][int(rng.integers(n))]
            day = start + dt.timedelta(days=int(rng.integers(span)))
            fixtures.append((day, INTERNATIONAL, a, b, firsts[la], firsts[lb], bool(rng.random() < 0.2)))

        fixtures.sort(key=lambda f: (f[0], f[2], f[3]))
        for k, (day, comp, a, b, la, lb, neutral) in enumerate(fixtures):
            pandemic = in_pandemic_window(day)
            shift = 0.0 if neutral else (cfg.h_p if pandemic else cfg.h)
            p = triple_kernel(strength[a] - strength[b] + shift, cfg.c)
            outcome = int(rng.choice(3, p=p))
            hg, ag = _scoreline(rng, outcome)
            records.append(MatchRecord(
                match_id=f"{year}-{k:06d}", date=day, season=season, competition=comp,
                home_team=a, away_team=b, home_goals=hg, away_goals=ag,
                home_league=la, away_league=lb, is_pandemic=pandemic, is_neutral=neutral))
            probs[records[-1].match_id] = p
            if comp != INTERNATIONAL:
                points[a] = points.get(a, 0.0) + (3, 1, 0)[outcome]
                points[b] = points.get(b, 0.0) + (0, 1, 3)[outcome]

        # promotion / relegation and newcomers for the next season
        for ci in range(cfg.countries):
            country = country_name(ci)
            top, low = f"{country}.First", f"{country}.Second"
            rank_top = sorted(members[top], key=lambda t: (-points[t], t))
            rank_low = sorted(members[low], key=lambda t: (-points[t], t))
            down = rank_top[-cfg.swaps:]
            up = rank_low[:cfg.swaps]
            stay_low = rank_low[cfg.swaps:len(rank_low) - cfg.swaps]
            low_mean = float(np.mean([strength[t] for t in members[low]]))
            arrivals = [new_team(country, low_mean - cfg.newcomer_penalty) for _ in range(cfg.swaps)]
            members[top] = rank_top[:-cfg.swaps] + up
            members[low] = stay_low + down + arrivals
        for team in list(strength):
            strength[team] += float(rng.normal(0.0, cfg.drift_sd))

    records.sort(key=lambda m: (m.date, m.match_id))
    true_probs = np.array([probs[m.match_id] for m in records]).reshape(len(records), 3)
    return SynthCorpus(records, tiers, true_probs, cfg, dict(strength))
