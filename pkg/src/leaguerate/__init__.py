"""Club football ratings: Glicko-2 with draws, home advantage and league structure."""

from .dataset import MatchRecord, SplitSpec, TierTable, parse_matches, read_tier_table, split
from .errors import ConfigurationError, DataError, LeagueRateError
from .glicko import MatchContext, TeamRating, outcome_triple, update_pair
from .params import GlobalParams, LeagueParams, ParamVector, read_params, write_params
from .replay import compile_corpus, replay
from .season import normalize_ratings
from .skellam import GoalRates, OutcomeProbs, draw_signal, skellam_pmf
from .trainer import evaluate, fit, log_loss

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "DataError", "GlobalParams", "GoalRates", "LeagueParams",
    "LeagueRateError", "MatchContext", "MatchRecord", "OutcomeProbs", "ParamVector",
    "SplitSpec", "TeamRating", "TierTable", "compile_corpus", "draw_signal", "evaluate",
    "fit", "log_loss", "normalize_ratings", "outcome_triple", "parse_matches",
    "read_params", "read_tier_table", "replay", "skellam_pmf", "split", "update_pair",
    "write_params",
]
