"""Tabular outputs: club and league rankings, rating interpretation, model comparison.

Every table has a CSV form (floats written with ``repr`` so reading it
back gives the same numbers) and an aligned plain-text rendering.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, TextIO

from .glicko import DISPLAY_SCALE, TeamRating, to_display, triple_kernel

logger = logging.getLogger(__name__)

CLUB_HEADER = ("rank", "team", "rating", "league")
LEAGUE_HEADER = ("rank", "league", "rating")
INTERPRETATION_HEADER = ("diff", "win", "draw", "loss")
COMPARISON_HEADER = ("model", "log_loss")

DEFAULT_DIFFS = (0, 10, 20, 50, 100, 200, 500, 800)


@dataclass(frozen=True)
class RatingRow:
    rank: int
    team: str
    rating: float
    league: str


@dataclass(frozen=True)
class LeagueRow:
    rank: int
    league: str
    rating: float


@dataclass(frozen=True)
class InterpretationRow:
    """Outcome percentages for a display-rating lead of ``diff``."""

    diff: float
    win: float
    draw: float
    loss: float


@dataclass(frozen=True)
class ComparisonRow:
    model: str
    log_loss: float


def _display(value) -> float:
    return to_display(value) if isinstance(value, TeamRating) else float(value)


def club_table(ratings: Mapping, leagues: Mapping[str, str], n: int = 50, pool: str | None = None,
               pool_of=None) -> list[RatingRow]:
    """Top ``n`` clubs by display rating, optionally within one pool.

    ``ratings`` maps team -> TeamRating or display rating.  ``pool_of`` maps
    a league id to its pool and is required when ``pool`` is given.
    """
    if not ratings:
        raise ValueError("no ratings to tabulate")
    if pool is not None and pool_of is None:
        raise ValueError("filtering by pool needs pool_of")
    rows = []
    for team, value in ratings.items():
        league = leagues.get(team, "")
        if pool is not None and pool_of(league) != pool:
            continue
        rows.append((team, _display(value), league))
    rows.sort(key=lambda r: (-r[1], r[0]))
    return [RatingRow(i, t, r, lg) for i, (t, r, lg) in enumerate(rows[:n], start=1)]


def league_table(ratings: Mapping, memberships: Mapping[str, str], k: int = 5) -> list[LeagueRow]:
    """Leagues ranked by the mean display rating of their ``k`` best teams."""
    if k < 1:
        raise ValueError("k must be positive")
    by_league: dict[str, list] = {}
    for team, value in ratings.items():
        if team not in memberships:
            raise ValueError(f"team {team!r} has no league")
        by_league.setdefault(memberships[team], []).append(_display(value))
    scored = []
    for league in sorted(by_league):
        values = sorted(by_league[league], reverse=True)
        if len(values) < k:
            logger.warning("league %s has %d rated teams (< %d); omitted", league, len(values), k)
            continue
        scored.append((league, math.fsum(values[:k]) / k))
    scored.sort(key=lambda r: (-r[1], r[0]))
    return [LeagueRow(i, lg, r) for i, (lg, r) in enumerate(scored, start=1)]


def interpretation_table(diffs: Iterable[float] = DEFAULT_DIFFS, g_eff: float = 1.0,
                         c: float = 0.0) -> list[InterpretationRow]:
    """Win/draw/loss percentages (one decimal) for display-rating leads."""
    if not 0.0 < g_eff <= 1.0:
        raise ValueError(f"g_eff must lie in (0, 1], got {g_eff}")
    rows = []
    for diff in diffs:
        if diff < 0:
            raise ValueError(f"rating differences must be nonnegative, got {diff}")
        p = triple_kernel(g_eff * (diff / DISPLAY_SCALE), float(c))
        rows.append(InterpretationRow(float(diff), *(round(100.0 * q, 1) for q in p)))
    return rows


def comparison_table(named_losses: Sequence[tuple[str, float]]) -> list[ComparisonRow]:
    """Models by ascending loss; ties keep their input order."""
    if not named_losses:
        raise ValueError("nothing to compare")
    rows = [ComparisonRow(name, float(loss)) for name, loss in named_losses]
    return sorted(rows, key=lambda r: r.log_loss)


# -- CSV ----------------------------------------------------------------------

def write_csv(rows: Sequence, stream: TextIO):
    """Write any of the report row types with its standard header."""
    header = _header_for(rows)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v
                         for v in (getattr(row, f) for f in header)])


def to_csv(rows: Sequence) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


_ROW_TYPES = {
    CLUB_HEADER: RatingRow,
    LEAGUE_HEADER: LeagueRow,
    INTERPRETATION_HEADER: InterpretationRow,
    COMPARISON_HEADER: ComparisonRow,
}


def _header_for(rows) -> tuple:
    if not rows:
        raise ValueError("cannot infer a header from no rows")
    for header, kind in _ROW_TYPES.items():
        if isinstance(rows[0], kind):
            return header
    raise TypeError(f"not a report row: {rows[0]!r}")


def read_csv(source: str | TextIO) -> list:
    """Parse a report CSV back into rows, picking the type from the header."""
    stream = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.reader(stream)
    header = tuple(next(reader))
    kind = _ROW_TYPES.get(header)
    if kind is None:
        raise ValueError(f"unknown report header {header}")
    out = []
    for raw in reader:
        if kind is RatingRow:
            out.append(RatingRow(int(raw[0]), raw[1], float(raw[2]), raw[3]))
        elif kind is LeagueRow:
            out.append(LeagueRow(int(raw[0]), raw[1], float(raw[2])))
        elif kind is InterpretationRow:
            out.append(InterpretationRow(*(float(v) for v in raw)))
        else:
            out.append(ComparisonRow(raw[0], float(raw[1])))
    return out


# -- plain text ---------------------------------------------------------------

def render(rows: Sequence, title: str | None = None) -> str:
    """Aligned text table for terminals."""
    header = _header_for(rows)
    cells = [list(header)]
    for row in rows:
        line = []
        for name in header:
            v = getattr(row, name)
            if name == "log_loss":
                line.append(f"{v:.4f}")
            elif isinstance(v, float):
                line.append(f"{v:.1f}")
            else:
                line.append(str(v))
        cells.append(line)
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    numeric = [name not in ("team", "league", "model") for name in header]
    lines = []
    if title:
        lines.append(title)
    for r in cells:
        lines.append("  ".join(v.rjust(w) if num else v.ljust(w)
                               for v, w, num in zip(r, widths, numeric)).rstrip())
    return "\n".join(lines) + "\n"
