"""Command-line entry point.

Subcommands: validate, fit, evaluate, rate, predict, synth.  Exit status is
0 on success, 1 for data or validation failures and 2 for configuration or
environment failures.  Options may also come from a JSON file given with
``--config``; flags on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import logging
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import reports
from .dataset import (
    SplitSpec, parse_matches, read_tier_table, season_order, split, write_matches,
    write_tier_table,
)
from .errors import ConfigurationError, DataError
from .glicko import MatchContext, g, outcome_triple
from .params import NO_DRAW_OFFSET, read_params as _read_params, write_params
from .replay import compile_corpus, replay
from .skellam import draw_signal
from .synth import SynthConfig, generate
from .trainer import evaluate, fit

logger = logging.getLogger("leaguerate")

FIXTURE_COLUMNS = ("date", "home_team", "away_team", "is_neutral", "is_pandemic")
PREDICTION_HEADER = ("home", "away", "p_home_win", "p_draw", "p_away_win")
RATINGS_HEADER = ("team", "league", "rating", "mu", "phi", "sigma")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option values")
    common.add_argument("--data", help="match CSV")
    common.add_argument("--tiers", help="tier table CSV")
    common.add_argument("--train-through", help="last training season (default 2020/2021)")
    common.add_argument("--test", help="comma-separated test seasons")
    common.add_argument("--out", help="output directory")
    common.add_argument("--separate-pools", action="store_true", default=None,
                        help="normalize each continental pool on its own")
    common.add_argument("-v", "--verbose", action="store_true", default=None)

    parser = argparse.ArgumentParser(prog="leaguerate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="parse and report on a match file")

    p = sub.add_parser("fit", parents=[common], help="fit parameters on the training seasons")
    p.add_argument("--params", action="append", help="output parameter file")
    p.add_argument("--init", help="starting parameter file")
    p.add_argument("--budget", type=int, help="maximum number of replays (default 2000)")
    p.add_argument("--ablate", choices=["original-glicko"])
    p.add_argument("--holdout", action="store_true", default=None,
                   help="score only the last two training seasons while fitting")

    p = sub.add_parser("evaluate", parents=[common], help="score parameter files on the test seasons")
    p.add_argument("--params", action="append", help="parameter file (repeatable)")
    p.add_argument("--ablate", choices=["original-glicko"])

    p = sub.add_parser("rate", parents=[common], help="replay everything and write rating tables")
    p.add_argument("--params", action="append")

    p = sub.add_parser("predict", parents=[common], help="probabilities for upcoming fixtures")
    p.add_argument("--params", action="append")
    p.add_argument("--fixtures", help="fixture CSV: " + ",".join(FIXTURE_COLUMNS))

    p = sub.add_parser("synth", parents=[common], help="write a synthetic corpus")
    p.add_argument("--seed", type=int)
    p.add_argument("--countries", type=int)
    p.add_argument("--seasons", type=int)
    p.add_argument("--large", action="store_true", default=None,
                   help="full-size corpus (about 366k matches)")
    return parser


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if not args.config:
        return args
    try:
        values = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigurationError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(values, dict):
        raise ConfigurationError("config file must hold a JSON object")
    for key, value in values.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigurationError(f"unknown config key {key!r}")
        if getattr(args, attr) is None:
            if attr == "params" and isinstance(value, str):
                value = [value]
            setattr(args, attr, value)
    return args


def _require(args, *names):
    for name in names:
        if not getattr(args, name, None):
            raise ConfigurationError(f"--{name.replace('_', '-')} is required")


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ConfigurationError(f"no such file: {path}")
    return p


def _load(args):
    _require(args, "data", "tiers")
    data, tiers_path = _existing(args.data), _existing(args.tiers)
    tiers = read_tier_table(tiers_path)
    records, report = parse_matches(data, tiers)
    logger.info("%s", report.summary())
    return records, tiers


def _split(args, records):
    order = season_order(records)
    test = [s.strip() for s in args.test.split(",") if s.strip()] if args.test else None
    if args.train_through:
        spec = SplitSpec.through(order, args.train_through, test or ())
    elif test is not None:
        # train on everything before the first test season
        first_test = min((order.index(t) for t in test if t in order), default=len(order))
        spec = SplitSpec(frozenset(order[:first_test]), frozenset(test))
    else:
        spec = SplitSpec.default(order)
    return split(records, spec)


def _out_dir(args) -> Path:
    _require(args, "out")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _single_params(args):
    _require(args, "params")
    if len(args.params) != 1:
        raise ConfigurationError("exactly one --params file expected")
    return read_params(_existing(args.params[0]))


def read_params(path, **kwargs):
    try:
        return _read_params(path, **kwargs)
    except ValueError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None


def _write_rows(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_")


# -- commands -----------------------------------------------------------------

def cmd_validate(args) -> int:
    _require(args, "data", "tiers")
    tiers = read_tier_table(_existing(args.tiers))
    try:
        _, report = parse_matches(_existing(args.data), tiers, strict=False)
    except DataError as exc:
        print(exc, file=sys.stderr)
        return 1
    print(report.summary())
    for err in report.errors:
        print(err, file=sys.stderr)
    return 0 if report.ok else 1


def cmd_fit(args) -> int:
    _require(args, "params")
    out_path = Path(args.params[-1])
    records, tiers = _load(args)
    initial = read_params(_existing(args.init), project_infeasible=True) if args.init else None
    train, _ = _split(args, records)
    if len(train) == 0:
        raise DataError("training partition is empty")
    result = fit(train, tiers, initial, args.budget or 2000,
                 ablate=args.ablate == "original-glicko", holdout=bool(args.holdout),
                 separate_pools=bool(args.separate_pools))
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_params(result.params, out_path)
    print(f"initial train log loss {result.initial_loss:.6f}")
    print(f"final train log loss   {result.loss:.6f}")
    print(f"replays {result.evaluations}, cycles {result.cycles}; wrote {out_path}")
    return 0


def cmd_evaluate(args) -> int:
    _require(args, "params")
    vectors = [(Path(p).stem, read_params(_existing(p))) for p in args.params]
    records, tiers = _load(args)
    train, test = _split(args, records)
    if len(test) == 0:
        raise DataError("test partition is empty")
    losses = []
    for name, vector in vectors:
        if args.ablate == "original-glicko":
            vector = vector.ablated()
        result = evaluate(vector, train, test, tiers, separate_pools=bool(args.separate_pools))
        losses.append((name, result.log_loss))
    rows = reports.comparison_table(losses)
    print(reports.render(rows), end="")
    if args.out:
        out = _out_dir(args)
        (out / "comparison.csv").write_text(reports.to_csv(rows), encoding="utf-8")
    return 0


def _final_state(args):
    params = _single_params(args)
    records, tiers = _load(args)
    corpus = compile_corpus(records, tiers, params.globals.draw_signal_window,
                            separate_pools=bool(args.separate_pools))
    return params, tiers, corpus, replay(corpus, params)


def cmd_rate(args) -> int:
    params, tiers, corpus, result = _final_state(args)
    out = _out_dir(args)
    league_of = corpus.team_league
    ratings = result.ratings

    order = sorted(ratings, key=lambda t: (-ratings[t].mu, t))
    _write_rows(out / "ratings.csv", RATINGS_HEADER,
                ([t, league_of[t]] + [repr(v) for v in (ratings[t].display, ratings[t].mu,
                                                         ratings[t].phi, ratings[t].sigma)]
                 for t in order))

    for pool in sorted({tiers.pool_of(league_of[t]) for t in ratings}):
        in_pool = {t: r for t, r in ratings.items() if tiers.pool_of(league_of[t]) == pool}
        clubs = reports.club_table(in_pool, league_of, n=50)
        leagues = reports.league_table(in_pool, {t: league_of[t] for t in in_pool}, k=5)
        (out / f"clubs_{_slug(pool)}.csv").write_text(reports.to_csv(clubs), encoding="utf-8")
        if leagues:
            (out / f"leagues_{_slug(pool)}.csv").write_text(reports.to_csv(leagues), encoding="utf-8")
        print(reports.render(clubs[:10], title=f"{pool}: top clubs"))
        if leagues:
            print(reports.render(leagues, title=f"{pool}: leagues (top-5 mean)"))

    # one representative (g, c) pair for the interpretation table
    phis = np.array([r.phi for r in ratings.values()])
    g_eff = g(math.sqrt(2.0 * float(np.mean(phis * phis))))
    c = NO_DRAW_OFFSET if params.globals.original_glicko else params.globals.d + float(np.mean(corpus.signal))
    table = reports.interpretation_table(g_eff=g_eff, c=c)
    (out / "interpretation.csv").write_text(reports.to_csv(table), encoding="utf-8")
    print(reports.render(table, title=f"outcome % by rating lead (g={g_eff:.3f}, c={c:.3f})"), end="")
    return 0


def _parse_flag(value: str, lineno: int, column: str) -> bool:
    v = value.strip().lower()
    if v not in ("true", "false"):
        raise DataError(f"fixtures line {lineno}: {column} must be true/false, got {value!r}")
    return v == "true"


def cmd_predict(args) -> int:
    _require(args, "fixtures")
    fixtures_path = _existing(args.fixtures)
    params, tiers, corpus, result = _final_state(args)
    fixtures = []
    with open(fixtures_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in FIXTURE_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise DataError(f"fixtures header lacks {missing}")
        for lineno, row in enumerate(reader, start=2):
            try:
                dt.date.fromisoformat(row["date"].strip())
            except ValueError:
                raise DataError(f"fixtures line {lineno}: bad date {row['date']!r}") from None
            fixtures.append((row["home_team"].strip(), row["away_team"].strip(),
                             _parse_flag(row["is_neutral"], lineno, "is_neutral"),
                             _parse_flag(row["is_pandemic"], lineno, "is_pandemic")))
    unknown = sorted({t for f in fixtures for t in f[:2] if t not in result.ratings})
    if unknown:
        raise DataError(f"no rating for {', '.join(unknown)}")

    history = corpus.goal_history
    gp = params.globals
    rows = []
    for home, away, neutral, pandemic in fixtures:
        if gp.original_glicko:
            ctx = MatchContext(draw_offset=NO_DRAW_OFFSET)
        else:
            lp = params.league(corpus.team_league[home])
            ctx = MatchContext(lp.h, lp.h_p, gp.d + draw_signal(history.rates(home, away)),
                               is_pandemic=pandemic, is_neutral=neutral)
        p = outcome_triple(result.ratings[home], result.ratings[away], ctx)
        rows.append([home, away] + [repr(q) for q in p.as_tuple()])
    out = _out_dir(args)
    _write_rows(out / "predictions.csv", PREDICTION_HEADER, rows)
    print(f"wrote {len(fixtures)} predictions to {out / 'predictions.csv'}")
    return 0


def cmd_synth(args) -> int:
    out = _out_dir(args)
    overrides = {k: v for k, v in (("seed", args.seed), ("countries", args.countries),
                                   ("seasons", args.seasons)) if v is not None}
    cfg = SynthConfig.large(**overrides) if args.large else SynthConfig(**overrides)
    corpus = generate(cfg)
    with open(out / "matches.csv", "w", encoding="utf-8", newline="") as fh:
        write_matches(corpus.records, fh)
    with open(out / "tiers.csv", "w", encoding="utf-8", newline="") as fh:
        write_tier_table(corpus.tiers, fh)
    print(f"wrote {len(corpus.records)} matches to {out / 'matches.csv'}")
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "fit": cmd_fit,
    "evaluate": cmd_evaluate,
    "rate": cmd_rate,
    "predict": cmd_predict,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        args = _merge_config(args)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigurationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
