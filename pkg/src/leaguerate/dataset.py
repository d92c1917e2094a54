"""Match corpus: parsing, validation, ordering, splitting and memberships.

Match CSV (UTF-8, header required)::

    date,season,competition,home_team,away_team,home_goals,away_goals,
    is_pandemic,is_neutral,is_forfeit,home_league,away_league[,match_id]

Tier table CSV::

    league,country,tier[,pool]

League ids look like ``Country.First`` / ``Country.Second``.  Matches that
involve a team below the second tier, and forfeits, are dropped.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, TextIO

from .errors import ConfigurationError, DataError

MATCH_COLUMNS = (
    "date", "season", "competition", "home_team", "away_team", "home_goals",
    "away_goals", "is_pandemic", "is_neutral", "is_forfeit", "home_league", "away_league",
)
TIER_COLUMNS = ("league", "country", "tier")

MAX_TIER = 2
LOWER_TIER_NAMES = {"Third", "Fourth", "Fifth", "Sixth", "Seventh", "Eighth"}

SOUTH_AMERICA = {
    "Argentina", "Bolivia", "Brazil", "Chile", "Colombia", "Ecuador", "Paraguay",
    "Peru", "Uruguay", "Venezuela",
}

PANDEMIC_START = dt.date(2020, 3, 1)
PANDEMIC_END = dt.date(2021, 6, 30)

DEFAULT_TRAIN_THROUGH = "2020/2021"
DEFAULT_TEST_SEASONS = ("2021/2022", "2022/2023")


def in_pandemic_window(day: dt.date) -> bool:
    """True for dates from March 2020 through June 2021."""
    return PANDEMIC_START <= day <= PANDEMIC_END


@dataclass(frozen=True)
class LeagueInfo:
    country: str
    tier: int
    pool: str


class TierTable(dict):
    """Mapping league id -> :class:`LeagueInfo`."""

    @classmethod
    def from_rows(cls, rows: Iterable[tuple]) -> "TierTable":
        table = cls()
        for row in rows:
            league, country, tier = row[:3]
            pool = row[3] if len(row) > 3 and row[3] else default_pool(country)
            table[league] = LeagueInfo(country, int(tier), pool)
        return table

    def covered(self) -> list[str]:
        """League ids at or above the second tier, sorted."""
        return sorted(k for k, v in self.items() if v.tier <= MAX_TIER)

    def pool_of(self, league: str) -> str:
        return self[league].pool


def default_pool(country: str) -> str:
    return "South America" if country in SOUTH_AMERICA else "Europe"


def read_tier_table(source: str | Path | TextIO) -> TierTable:
    with _open(source) as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in TIER_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ConfigurationError(f"tier table lacks columns {missing}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            try:
                int(row["tier"])
            except (TypeError, ValueError):
                raise ConfigurationError(f"tier table line {lineno}: bad tier {row['tier']!r}")
            rows.append((row["league"], row["country"], row["tier"], row.get("pool") or ""))
    return TierTable.from_rows(rows)


def write_tier_table(tiers: Mapping[str, LeagueInfo], stream: TextIO):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TIER_COLUMNS + ("pool",))
    for league in sorted(tiers):
        info = tiers[league]
        writer.writerow((league, info.country, info.tier, info.pool))


@dataclass(frozen=True)
class MatchRecord:
    match_id: str
    date: dt.date
    season: str
    competition: str
    home_team: str
    away_team: str
    home_goals: int
    away_goals: int
    home_league: str
    away_league: str
    is_pandemic: bool = False
    is_neutral: bool = False
    is_forfeit: bool = False

    def __post_init__(self):
        if self.home_team == self.away_team:
            raise ValueError(f"team {self.home_team!r} cannot play itself")
        if self.home_goals < 0 or self.away_goals < 0:
            raise ValueError("goals must be nonnegative")

    @property
    def outcome(self) -> int:
        """0 home win, 1 draw, 2 home loss."""
        if self.home_goals > self.away_goals:
            return 0
        return 1 if self.home_goals == self.away_goals else 2

    @property
    def home_score(self) -> float:
        return (1.0, 0.5, 0.0)[self.outcome]


@dataclass
class ParseReport:
    kept: int = 0
    dropped: Counter = field(default_factory=Counter)
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def summary(self) -> str:
        total = sum(self.dropped.values())
        parts = [f"kept {self.kept}, dropped {total}"]
        if total:
            parts.append("(" + ", ".join(f"{k}: {v}" for k, v in sorted(self.dropped.items())) + ")")
        if self.errors:
            parts.append(f"malformed {len(self.errors)}")
        return " ".join(parts)


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value == "true":
        return True
    if value == "false":
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _parse_goals(text: str) -> int:
    value = int(text)
    if value < 0:
        raise ValueError(f"negative goals {value}")
    return value


def _league_status(league: str, tiers: TierTable, lineno: int) -> bool:
    """True if the league is covered; False if it sits below the second tier."""
    info = tiers.get(league)
    if info is not None:
        return info.tier <= MAX_TIER
    if league.rsplit(".", 1)[-1] in LOWER_TIER_NAMES:
        return False
    raise ConfigurationError(f"line {lineno}: league {league!r} is not in the tier table")


class _open:
    """Context manager accepting a path or an already open text stream."""

    def __init__(self, source, mode="r"):
        self.source = source
        self.mode = mode
        self._fh = None

    def __enter__(self):
        if isinstance(self.source, (str, Path)):
            self._fh = open(self.source, self.mode, encoding="utf-8", newline="")
            return self._fh
        return self.source

    def __exit__(self, *exc):
        if self._fh is not None:
            self._fh.close()


def parse_matches(source: str | Path | TextIO, tiers: TierTable, *,
                  strict: bool = True) -> tuple[list[MatchRecord], ParseReport]:
    """Read, validate and chronologically sort a match CSV.

    Malformed rows are collected in the report with their line numbers.
    With ``strict`` (the default) any malformed row raises :class:`DataError`
    after the whole file has been scanned.
    """
    report = ParseReport()
    records: list[MatchRecord] = []
    seen: dict[str, int] = {}
    with _open(source) as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in MATCH_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise DataError(f"line 1: header lacks columns {missing}")
        for lineno, row in enumerate(reader, start=2):
            try:
                if None in row or any(row[c] is None for c in MATCH_COLUMNS):
                    raise ValueError("wrong number of fields")
                is_forfeit = _parse_bool(row["is_forfeit"])
                date = dt.date.fromisoformat(row["date"].strip())
                season = row["season"].strip()
                if not season:
                    raise ValueError("empty season")
                home, away = row["home_team"].strip(), row["away_team"].strip()
                if not home or not away:
                    raise ValueError("empty team name")
                match_id = (row.get("match_id") or "").strip() or f"{date.isoformat()}:{home}:{away}"
                record = MatchRecord(
                    match_id=match_id, date=date, season=season,
                    competition=row["competition"].strip(),
                    home_team=home, away_team=away,
                    home_goals=_parse_goals(row["home_goals"]),
                    away_goals=_parse_goals(row["away_goals"]),
                    home_league=row["home_league"].strip(),
                    away_league=row["away_league"].strip(),
                    is_pandemic=_parse_bool(row["is_pandemic"]),
                    is_neutral=_parse_bool(row["is_neutral"]),
                    is_forfeit=is_forfeit,
                )
            except ValueError as exc:
                report.errors.append(f"line {lineno}: {exc}")
                continue
            if record.match_id in seen:
                report.errors.append(
                    f"line {lineno}: duplicate match_id {record.match_id!r} "
                    f"(first on line {seen[record.match_id]})")
                continue
            seen[record.match_id] = lineno
            if record.is_forfeit:
                report.dropped["forfeit"] += 1
                continue
            covered = [_league_status(lg, tiers, lineno) for lg in (record.home_league, record.away_league)]
            if not all(covered):
                report.dropped["below_second_tier"] += 1
                continue
            records.append(record)
    if strict and report.errors:
        raise DataError("; ".join(report.errors))
    records.sort(key=lambda m: (m.date, m.match_id))
    report.kept = len(records)
    return records, report


def _fmt_bool(value: bool) -> str:
    return "true" if value else "false"


def write_matches(records: Iterable[MatchRecord], stream: TextIO):
    """Write records in the CSV schema (with a trailing ``match_id`` column)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(MATCH_COLUMNS + ("match_id",))
    for m in records:
        writer.writerow((
            m.date.isoformat(), m.season, m.competition, m.home_team, m.away_team,
            m.home_goals, m.away_goals, _fmt_bool(m.is_pandemic), _fmt_bool(m.is_neutral),
            _fmt_bool(m.is_forfeit), m.home_league, m.away_league, m.match_id,
        ))


def matches_to_csv(records: Iterable[MatchRecord]) -> str:
    buf = io.StringIO()
    write_matches(records, buf)
    return buf.getvalue()


def season_order(records: Iterable[MatchRecord]) -> list[str]:
    """Season labels ordered by their first match date."""
    first: dict[str, dt.date] = {}
    for m in records:
        if m.season not in first or m.date < first[m.season]:
            first[m.season] = m.date
    return sorted(first, key=lambda s: (first[s], s))


def season_memberships(records: Iterable[MatchRecord], season: str,
                       tiers: Mapping[str, LeagueInfo]) -> dict[str, str]:
    """Team -> league for one season, from domestic league matches only."""
    members: dict[str, str] = {}
    present = False
    for m in records:
        if m.season != season:
            continue
        present = True
        if m.competition not in tiers:
            continue
        for team in (m.home_team, m.away_team):
            league = members.setdefault(team, m.competition)
            if league != m.competition:
                raise DataError(
                    f"{team} plays league matches in both {league} and {m.competition} in {season}")
    if not present:
        raise DataError(f"season {season!r} has no matches")
    return members


def global_goal_mean(records: Iterable[MatchRecord]) -> float:
    """Mean goals per team per match."""
    goals = 0
    n = 0
    for m in records:
        goals += m.home_goals + m.away_goals
        n += 1
    if n == 0:
        raise ValueError("no matches to average")
    return goals / (2 * n)


# -- train/test split ---------------------------------------------------------

@dataclass(frozen=True)
class SplitSpec:
    train_seasons: frozenset
    test_seasons: frozenset = frozenset()

    def __post_init__(self):
        overlap = set(self.train_seasons) & set(self.test_seasons)
        if overlap:
            raise ConfigurationError(f"seasons in both train and test: {sorted(overlap)}")

    @classmethod
    def through(cls, order: list[str], train_through: str,
                test: Iterable[str] = ()) -> "SplitSpec":
        """Train on every season up to ``train_through`` in ``order``."""
        if train_through not in order:
            raise ConfigurationError(f"unknown season {train_through!r}")
        train = order[: order.index(train_through) + 1]
        return cls(frozenset(train), frozenset(test))

    @classmethod
    def default(cls, order: list[str]) -> "SplitSpec":
        """Train through 2020/2021, test on 2021/2022 and 2022/2023."""
        train = [s for s in order if s not in DEFAULT_TEST_SEASONS]
        if DEFAULT_TRAIN_THROUGH in order:
            train = order[: order.index(DEFAULT_TRAIN_THROUGH) + 1]
        return cls(frozenset(train), frozenset(DEFAULT_TEST_SEASONS))


class _Partition:
    def __init__(self, records: Iterable[MatchRecord]):
        self.records = tuple(records)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __repr__(self):
        return f"{type(self).__name__}({len(self.records)} matches)"


class TrainSet(_Partition):
    """Training partition; the only input parameter fitting accepts."""


class TestSet(_Partition):
    """Held-out partition; scored, never fitted on."""

    __test__ = False


def split(records: Iterable[MatchRecord], spec: SplitSpec) -> tuple[TrainSet, TestSet]:
    """Partition records by season; seasons in neither set are dropped."""
    records = list(records)
    first = {s: i for i, s in enumerate(season_order(records))}
    if spec.train_seasons and spec.test_seasons:
        last_train = max((first[s] for s in spec.train_seasons if s in first), default=-1)
        first_test = min((first[s] for s in spec.test_seasons if s in first), default=len(first))
        if last_train >= first_test:
            raise ConfigurationError("training seasons must precede test seasons")
    train = [m for m in records if m.season in spec.train_seasons]
    test = [m for m in records if m.season in spec.test_seasons]
    return TrainSet(train), TestSet(test)
