"""Between-season rating rules.

* first appearance: start at the league's initial rating, lowered by
  ``mu_new`` for a team that arrives from below the covered tiers;
* every later season start: inflate the deviation by ``phi_s`` and shift the
  rating of promoted/relegated teams;
* every season end: shift all ratings so their mean sits at the anchor.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Mapping

from .errors import ConfigurationError
from .glicko import DISPLAY_ANCHOR, DISPLAY_SCALE, TeamRating, snap_mu
from .params import GlobalParams, LeagueParams

logger = logging.getLogger(__name__)


class TransitionKind(enum.IntEnum):
    STAYED = 0
    PROMOTED = 1
    RELEGATED = 2
    FIRST_APPEARANCE = 3


@dataclass(frozen=True)
class SeasonTransition:
    team: str
    from_league: str | None
    to_league: str
    kind: TransitionKind
    cross_country: bool = False
    from_below: bool = False


def classify(from_league: str | None, to_league: str, tier_table: Mapping) -> tuple[TransitionKind, bool]:
    """Transition kind for one team and whether it changed country."""
    for league in (from_league, to_league):
        if league is not None and league not in tier_table:
            raise ConfigurationError(f"league {league!r} is missing from the tier table")
    if from_league is None:
        return TransitionKind.FIRST_APPEARANCE, False
    src, dst = tier_table[from_league], tier_table[to_league]
    if src.country != dst.country:
        return TransitionKind.STAYED, True
    if dst.tier < src.tier:
        return TransitionKind.PROMOTED, False
    if dst.tier > src.tier:
        return TransitionKind.RELEGATED, False
    return TransitionKind.STAYED, False


def detect_transitions(prev_memberships: Mapping[str, str], next_memberships: Mapping[str, str],
                       tier_table: Mapping) -> list[SeasonTransition]:
    """Classify every team of the coming season against its previous league.

    Cross-country moves count as stayed and are flagged.
    """
    out = []
    for team in sorted(next_memberships):
        src = prev_memberships.get(team)
        dst = next_memberships[team]
        kind, cross = classify(src, dst, tier_table)
        if cross:
            logger.info("%s moved across countries (%s -> %s); treated as stayed", team, src, dst)
        out.append(SeasonTransition(team, src, dst, kind, cross_country=cross))
    return out


def initialize_team(transition: SeasonTransition, league_params: LeagueParams,
                    globals_: GlobalParams) -> TeamRating:
    """Starting rating of a newly observed team.

    ``transition.from_below`` marks a team entering from a league below the
    data's coverage; it starts ``mu_new`` under the league's initial rating.
    """
    if transition.kind is not TransitionKind.FIRST_APPEARANCE:
        raise ValueError(f"{transition.team} is not a first appearance")
    mu = league_params.mu_init
    if transition.from_below:
        mu += league_params.mu_new
    return TeamRating(mu, globals_.phi0, globals_.sigma0)


def season_rollover(rating: TeamRating, transition: SeasonTransition,
                    params_to: LeagueParams) -> TeamRating:
    """Pre-season update; drift and inflation come from the destination league."""
    kind = transition.kind
    if kind is TransitionKind.FIRST_APPEARANCE:
        raise ValueError(f"{transition.team} has no previous rating to roll over")
    mu = rating.mu
    if kind is TransitionKind.PROMOTED:
        mu += params_to.mu_promoted
    elif kind is TransitionKind.RELEGATED:
        mu += params_to.mu_relegated
    return TeamRating(mu, rating.phi + params_to.phi_s, rating.sigma)


def normalization_shift(mus, anchor: float = DISPLAY_ANCHOR) -> float:
    """Internal-scale shift that brings the mean display rating to ``anchor``."""
    mus = list(mus)
    if not mus:
        return 0.0
    target = (anchor - DISPLAY_ANCHOR) / DISPLAY_SCALE
    return snap_mu(target - math.fsum(mus) / len(mus))


def normalize_ratings(all_ratings: Mapping[str, TeamRating], anchor: float = DISPLAY_ANCHOR,
                      reference=None) -> dict[str, TeamRating]:
    """Shift every rating by one constant so the mean display rating is ``anchor``.

    The mean is taken over ``reference`` (team ids) when given, otherwise
    over all teams; the shift is applied to all teams either way.
    """
    if not all_ratings:
        logger.warning("normalize_ratings called with no ratings")
        return {}
    keys = all_ratings if reference is None else [t for t in reference if t in all_ratings]
    shift = normalization_shift(all_ratings[t].mu for t in keys)
    return {t: TeamRating(r.mu + shift, r.phi, r.sigma) for t, r in all_ratings.items()}
