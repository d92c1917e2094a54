"""Parameter fitting by cyclic coordinate descent on the replay log loss.

Each coordinate is searched with a golden-section line search on a local
interval around its current value.  A move is kept only when it strictly
lowers the loss, so the returned vector is the best one evaluated.  The
search is deterministic: same data, same start, same budget, same result.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import MatchRecord, TestSet, TierTable, TrainSet, global_goal_mean
from .errors import ConfigurationError
from .params import BOUNDS, MARGIN, LeagueParams, ParamVector, project
from .replay import PROB_FLOOR, CompiledCorpus, compile_corpus, replay

logger = logging.getLogger(__name__)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
CYCLE_TOL = 1e-5
LINE_SEARCH_EVALS = 8
ABLATION_FROZEN = ("d", "h", "h_p")
HOLDOUT_SEASONS = 2


@dataclass
class FitResult:
    params: ParamVector
    loss: float
    initial_loss: float
    evaluations: int
    cycles: int
    history: list = field(default_factory=list)


class _BudgetExhausted(Exception):
    pass


def log_loss(probs: np.ndarray, outcomes: Sequence[int]) -> float:
    """Mean three-class log loss; probabilities are floored at 1e-12."""
    probs = np.asarray(probs, float)
    outcomes = np.asarray(outcomes, int)
    if probs.ndim != 2 or probs.shape[1] != 3 or len(probs) != len(outcomes):
        raise ValueError("expected an (n, 3) probability array and n outcomes")
    if len(outcomes) == 0:
        raise ValueError("no predictions to score")
    picked = probs[np.arange(len(outcomes)), outcomes]
    return float(-np.mean(np.log(np.maximum(picked, PROB_FLOOR))))


def replay_log_loss(params: ParamVector, corpus: CompiledCorpus) -> float:
    """Mean log loss of a full chronological replay of ``corpus``."""
    return replay(corpus, params).mean_loss


def _with_leagues(params: ParamVector, leagues: Sequence[str]) -> ParamVector:
    missing = [lg for lg in leagues if lg not in params.per_league]
    if not missing:
        return params
    logger.warning("no starting parameters for %s; using defaults", missing)
    per = dict(params.per_league)
    per.update({lg: LeagueParams() for lg in missing})
    return ParamVector(params.globals, per)


def _interval(params: ParamVector, scope: str, name: str) -> tuple[float, float]:
    """Feasible range of one coordinate with the others held fixed."""
    lo, hi = BOUNDS[name]
    if scope != "global":
        lp = params.per_league[scope]
        if name == "h":
            lo = max(lo, lp.h_p + MARGIN)
        elif name == "h_p":
            hi = min(hi, lp.h - MARGIN)
    return lo, hi


class _Objective:
    def __init__(self, corpus: CompiledCorpus, budget: int, scored=None):
        self.corpus = corpus
        self.budget = budget
        self.scored = scored
        self.evaluations = 0

    def __call__(self, params: ParamVector) -> float:
        if self.evaluations >= self.budget:
            raise _BudgetExhausted
        self.evaluations += 1
        return replay(self.corpus, params, scored=self.scored).mean_loss


def _line_search(objective, params, scope, name, radius, best_loss):
    """Golden-section search around the current value.

    Returns the best (params, loss) seen, which is the incoming pair when
    no probe improves on it.
    """
    x0 = params.get(scope, name)
    lo, hi = _interval(params, scope, name)
    a, b = max(lo, x0 - radius), min(hi, x0 + radius)
    best = (params, best_loss)
    if b - a <= 1e-12:
        return best

    def probe(x):
        nonlocal best
        cand = params.set(scope, name, x)
        val = objective(cand)
        if val < best[1]:
            best = (cand, val)
        return val

    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = probe(c), probe(d)
    for _ in range(LINE_SEARCH_EVALS - 2):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = probe(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = probe(d)
    return best


def fit(train: TrainSet, tiers: TierTable, initial: ParamVector | None = None,
        budget: int = 2000, *, ablate: bool = False, holdout: bool = False,
        separate_pools: bool = False, tol: float = CYCLE_TOL) -> FitResult:
    """Fit parameters on the training partition only.

    ``budget`` caps the number of replays.  With ``ablate`` the vector is
    flagged as plain Glicko-2 and the draw offset and home advantages are
    frozen, since they have no effect.  With ``holdout`` every training
    match is still replayed but only the last two training seasons are
    scored.
    """
    if not isinstance(train, TrainSet):
        raise TypeError("fit accepts a TrainSet only")
    if budget < 1:
        raise ConfigurationError("budget must be at least 1")
    if len(train) == 0:
        raise ConfigurationError("empty training set")
    window = initial.globals.draw_signal_window if initial else 10
    corpus = compile_corpus(train.records, tiers, window, separate_pools=separate_pools)
    start = initial if initial is not None else ParamVector.default(corpus.leagues)
    start = _with_leagues(start, corpus.leagues)
    params = project(start)
    if params != start:
        logger.warning("starting parameters were infeasible and have been projected")
    if ablate:
        params = params.ablated()

    scored = None
    if holdout:
        if len(corpus.seasons) < 3:
            raise ConfigurationError("holdout needs at least three training seasons")
        scored = corpus.mask_seasons(corpus.seasons[-HOLDOUT_SEASONS:])
    objective = _Objective(corpus, budget, scored)
    loss = objective(params)
    initial_loss = loss
    history = [loss]
    coords = [(s, n) for s, n in params.coordinates()
              if not (ablate and n in ABLATION_FROZEN)]
    radius = {c: 0.25 * (BOUNDS[c[1]][1] - BOUNDS[c[1]][0]) for c in coords}
    cycles = 0
    try:
        while True:
            cycle_start = loss
            for coord in coords:
                before = params.get(*coord)
                params, loss = _line_search(objective, params, *coord, radius[coord], loss)
                moved = abs(params.get(*coord) - before)
                span = BOUNDS[coord[1]][1] - BOUNDS[coord[1]][0]
                # widen after a move to the interval edge, shrink otherwise
                if moved > 0.9 * radius[coord]:
                    radius[coord] = min(2.0 * radius[coord], span)
                else:
                    radius[coord] = max(0.5 * radius[coord], 1e-4 * span)
            cycles += 1
            history.append(loss)
            logger.info("cycle %d: loss %.6f (%d replays)", cycles, loss, objective.evaluations)
            if cycle_start - loss < tol:
                break
    except _BudgetExhausted:
        logger.info("budget of %d replays exhausted", budget)
    return FitResult(params, loss, initial_loss, objective.evaluations, cycles, history)


@dataclass
class Evaluation:
    log_loss: float
    n_matches: int
    probs: np.ndarray
    outcomes: np.ndarray


def evaluate(params: ParamVector, train: TrainSet, test: TestSet, tiers: TierTable, *,
             separate_pools: bool = False) -> Evaluation:
    """Held-out loss with parameters fixed.

    Training matches are replayed to build the ratings, then test matches
    are predicted and scored in order while ratings keep updating.  The
    draw-signal fallback mean comes from the training matches.
    """
    if not isinstance(test, TestSet):
        raise TypeError("evaluate scores a TestSet")
    if len(test) == 0:
        raise ConfigurationError("empty test set")
    records: list[MatchRecord] = list(train.records) + list(test.records)
    records.sort(key=lambda m: (m.date, m.match_id))
    mean = global_goal_mean(train.records) if len(train) else global_goal_mean(test.records)
    corpus = compile_corpus(records, tiers, params.globals.draw_signal_window,
                            global_mean=mean, separate_pools=separate_pools)
    test_ids = {m.match_id for m in test.records}
    scored = np.array([m.match_id in test_ids for m in corpus.records])
    result = replay(corpus, params, scored=scored, record_probs=True)
    outcomes = corpus.outcome[scored]
    return Evaluation(result.mean_loss, int(scored.sum()), result.probs[scored], outcomes)
