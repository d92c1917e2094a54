"""Model parameters, their feasible region and the key-value file format.

Parameter files hold one ``scope.param = value`` entry per line, where
scope is ``global`` or a league id (``England.First.h = 0.31``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ConfigurationError
from .glicko import DISPLAY_SCALE

# strict inequalities are kept testable by these margins
MARGIN = 1e-3

# frozen draw offset of the plain Glicko-2 ablation
NO_DRAW_OFFSET = -30.0

LEAGUE_FIELDS = ("mu_init", "mu_new", "mu_promoted", "mu_relegated", "phi_s", "h", "h_p")
GLOBAL_FIELDS = ("phi0", "sigma0", "d", "tau")

# box bounds searched by the optimizer
BOUNDS = {
    "phi0": (0.05, 4.0),
    "sigma0": (1e-3, 0.5),
    "d": (-4.0, 2.0),
    "tau": (0.05, 2.0),
    "mu_init": (-3.0, 3.0),
    "mu_new": (-3.0, -MARGIN),
    "mu_promoted": (0.0, 2.0),
    "mu_relegated": (-2.0, 0.0),
    "phi_s": (MARGIN, 2.0),
    "h": (MARGIN, 2.0),
    "h_p": (0.0, 2.0 - MARGIN),
}


@dataclass(frozen=True)
class LeagueParams:
    """Per-league parameters on the internal scale."""

    mu_init: float = 0.0
    mu_new: float = -0.3
    mu_promoted: float = 0.1
    mu_relegated: float = -0.1
    phi_s: float = 0.3
    h: float = 0.3
    h_p: float = 0.1

    def __post_init__(self):
        problems = []
        if not self.mu_new < 0:
            problems.append("mu_new must be negative")
        if not self.phi_s > 0:
            problems.append("phi_s must be positive")
        if not self.h > self.h_p >= 0:
            problems.append("need h > h_p >= 0")
        if not self.mu_promoted >= 0 >= self.mu_relegated:
            problems.append("need mu_promoted >= 0 >= mu_relegated")
        if not all(math.isfinite(getattr(self, f)) for f in LEAGUE_FIELDS):
            problems.append("non-finite value")
        if problems:
            raise ValueError(f"infeasible league parameters {self}: " + "; ".join(problems))


@dataclass(frozen=True)
class GlobalParams:
    """Parameters shared by every league."""

    phi0: float = 350.0 / DISPLAY_SCALE
    sigma0: float = 0.06
    d: float = -0.2
    tau: float = 0.5
    draw_signal_window: int = 10
    original_glicko: bool = False

    def __post_init__(self):
        if not (self.phi0 > 0 and self.sigma0 > 0 and self.tau > 0):
            raise ValueError(f"phi0, sigma0 and tau must be positive: {self}")
        if self.draw_signal_window < 1:
            raise ValueError("draw_signal_window must be >= 1")


@dataclass(frozen=True)
class ParamVector:
    globals: GlobalParams = field(default_factory=GlobalParams)
    per_league: Mapping[str, LeagueParams] = field(default_factory=dict)

    @classmethod
    def default(cls, leagues: Iterable[str], **global_overrides) -> "ParamVector":
        return cls(GlobalParams(**global_overrides), {lg: LeagueParams() for lg in sorted(leagues)})

    @property
    def leagues(self) -> list[str]:
        return sorted(self.per_league)

    def league(self, league: str) -> LeagueParams:
        try:
            return self.per_league[league]
        except KeyError:
            raise ConfigurationError(f"no parameters for league {league!r}") from None

    def coordinates(self) -> list[tuple[str, str]]:
        """(scope, name) of every tunable scalar: globals first, then leagues alphabetically."""
        coords = [("global", f) for f in GLOBAL_FIELDS]
        for lg in self.leagues:
            coords.extend((lg, f) for f in LEAGUE_FIELDS)
        return coords

    def get(self, scope: str, name: str) -> float:
        if scope == "global":
            return getattr(self.globals, name)
        return getattr(self.league(scope), name)

    def set(self, scope: str, name: str, value: float) -> "ParamVector":
        if scope == "global":
            return replace(self, globals=replace(self.globals, **{name: value}))
        per = dict(self.per_league)
        per[scope] = replace(self.league(scope), **{name: value})
        return replace(self, per_league=per)

    def ablated(self) -> "ParamVector":
        """Same vector flagged as plain Glicko-2 (no home shift, no draw term)."""
        return replace(self, globals=replace(self.globals, original_glicko=True))


def _clip(value, lo, hi):
    return min(max(value, lo), hi)


def _project_league_values(values: dict) -> dict:
    out = {}
    for name in LEAGUE_FIELDS:
        lo, hi = BOUNDS[name]
        v = values[name]
        out[name] = _clip(v if math.isfinite(v) else 0.5 * (lo + hi), lo, hi)
    if out["h"] < out["h_p"] + MARGIN:
        out["h"] = out["h_p"] + MARGIN
    return out


def project(vector: ParamVector) -> ParamVector:
    """Nearest feasible vector under the box bounds and ``h >= h_p + margin``."""
    g = vector.globals
    gvals = {}
    for name in GLOBAL_FIELDS:
        lo, hi = BOUNDS[name]
        v = getattr(g, name)
        gvals[name] = _clip(v if math.isfinite(v) else 0.5 * (lo + hi), lo, hi)
    per = {}
    for lg, lp in vector.per_league.items():
        per[lg] = LeagueParams(**_project_league_values({f: getattr(lp, f) for f in LEAGUE_FIELDS}))
    return ParamVector(replace(g, **gvals), per)


def project_raw(globals_raw: Mapping[str, float], leagues_raw: Mapping[str, Mapping[str, float]],
                window: int = 10, original_glicko: bool = False) -> ParamVector:
    """Build a feasible vector from unchecked numbers (e.g. a hand-edited file)."""
    gvals = {}
    base = GlobalParams()
    for name in GLOBAL_FIELDS:
        lo, hi = BOUNDS[name]
        v = float(globals_raw.get(name, getattr(base, name)))
        gvals[name] = _clip(v if math.isfinite(v) else 0.5 * (lo + hi), lo, hi)
    per = {}
    default = LeagueParams()
    for lg, raw in leagues_raw.items():
        values = {f: float(raw.get(f, getattr(default, f))) for f in LEAGUE_FIELDS}
        per[lg] = LeagueParams(**_project_league_values(values))
    return ParamVector(GlobalParams(**gvals, draw_signal_window=window,
                                    original_glicko=original_glicko), per)


# -- file format --------------------------------------------------------------

def format_params(vector: ParamVector) -> str:
    g = vector.globals
    lines = [f"global.{name} = {getattr(g, name)!r}" for name in GLOBAL_FIELDS]
    lines.append(f"global.draw_signal_window = {g.draw_signal_window}")
    lines.append(f"global.original_glicko = {'true' if g.original_glicko else 'false'}")
    for lg in vector.leagues:
        lp = vector.per_league[lg]
        lines.extend(f"{lg}.{name} = {getattr(lp, name)!r}" for name in LEAGUE_FIELDS)
    return "\n".join(lines) + "\n"


def _read_entries(text: str) -> tuple[dict, dict]:
    globals_raw: dict[str, str] = {}
    leagues_raw: dict[str, dict[str, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or "." not in key:
            raise ConfigurationError(f"params line {lineno}: expected 'scope.param = value'")
        scope, name = key.rsplit(".", 1)
        if scope == "global":
            if name not in GLOBAL_FIELDS + ("draw_signal_window", "original_glicko"):
                raise ConfigurationError(f"params line {lineno}: unknown global {name!r}")
            globals_raw[name] = value
        else:
            if name not in LEAGUE_FIELDS:
                raise ConfigurationError(f"params line {lineno}: unknown league parameter {name!r}")
            leagues_raw.setdefault(scope, {})[name] = value
    return globals_raw, leagues_raw


def parse_params(text: str, *, project_infeasible: bool = False) -> ParamVector:
    """Inverse of :func:`format_params`.

    Infeasible values raise ``ValueError`` unless ``project_infeasible`` is
    set, in which case they are projected onto the feasible region.
    """
    globals_raw, leagues_raw = _read_entries(text)
    try:
        window = int(globals_raw.pop("draw_signal_window", 10))
        flag = globals_raw.pop("original_glicko", "false").lower()
        if flag not in ("true", "false"):
            raise ValueError(f"original_glicko must be true/false, got {flag!r}")
        gnum = {k: float(v) for k, v in globals_raw.items()}
        lnum = {lg: {k: float(v) for k, v in vals.items()} for lg, vals in leagues_raw.items()}
    except ValueError as exc:
        raise ConfigurationError(f"params: {exc}") from None
    if project_infeasible:
        return project_raw(gnum, lnum, window, flag == "true")
    defaults = LeagueParams()
    per = {lg: LeagueParams(**{f: vals.get(f, getattr(defaults, f)) for f in LEAGUE_FIELDS})
           for lg, vals in lnum.items()}
    return ParamVector(GlobalParams(**gnum, draw_signal_window=window,
                                    original_glicko=flag == "true"), per)


def read_params(path: str | Path, *, project_infeasible: bool = False) -> ParamVector:
    return parse_params(Path(path).read_text(encoding="utf-8"),
                        project_infeasible=project_infeasible)


def write_params(vector: ParamVector, path: str | Path):
    Path(path).write_text(format_params(vector), encoding="utf-8")


def is_feasible(vector: ParamVector) -> bool:
    return project(vector) == vector
