"""
Promotion, relegation and newcomers
===================================

Three seasons of a two-tier country, replayed step by step.  Ratings are
read just before chosen matches to show the between-season rules at work.
"""

import datetime as dt

from leaguerate.dataset import LeagueInfo, MatchRecord, TierTable
from leaguerate.glicko import DISPLAY_SCALE, to_display
from leaguerate.params import GlobalParams, LeagueParams, ParamVector
from leaguerate.replay import compile_corpus, replay

tiers = TierTable({
    "Ruritania.First": LeagueInfo("Ruritania", 1, "Europe"),
    "Ruritania.Second": LeagueInfo("Ruritania", 2, "Europe"),
})


def game(day, season, home, away, hg, ag, league):
    return MatchRecord(f"{day}:{home}", dt.date.fromisoformat(day), season, league, home, away,
                       hg, ag, league, league)


top, low = "Ruritania.First", "Ruritania.Second"
matches = [
    game("2018-08-01", "2018/2019", "Oaks", "Pines", 2, 0, top),
    game("2018-08-02", "2018/2019", "Elms", "Firs", 1, 1, low),
    game("2018-09-01", "2018/2019", "Pines", "Oaks", 0, 1, top),
    game("2018-09-02", "2018/2019", "Firs", "Elms", 0, 2, low),
    # Elms go up, Pines go down, Yews arrive from an uncovered division
    game("2019-08-01", "2019/2020", "Yews", "Pines", 0, 1, low),
    game("2019-08-02", "2019/2020", "Oaks", "Elms", 1, 1, top),
    game("2019-09-01", "2019/2020", "Firs", "Yews", 2, 2, low),
    game("2020-08-01", "2020/2021", "Elms", "Oaks", 2, 1, top),
    game("2020-08-02", "2020/2021", "Pines", "Firs", 3, 0, low),
]

# league parameters written in display points for readability
pts = 1.0 / DISPLAY_SCALE
params = ParamVector(GlobalParams(), {
    top: LeagueParams(mu_init=250 * pts, mu_new=-80 * pts, mu_promoted=30 * pts,
                      mu_relegated=-10 * pts, phi_s=0.1, h=0.3, h_p=0.1),
    low: LeagueParams(mu_init=-250 * pts, mu_new=-100 * pts, mu_promoted=10 * pts,
                      mu_relegated=-50 * pts, phi_s=0.2, h=0.25, h_p=0.05),
})
corpus = compile_corpus(matches, tiers)


def show(label, index):
    state = replay(corpus, params, until=index).ratings
    print(label)
    for team in sorted(state):
        r = state[team]
        print(f"  {team:6s} {to_display(r):7.1f}  phi {r.phi:.3f}")


show("before the first 2018/2019 match of the second tier", 1)
show("end of 2018/2019 rolled into 2019/2020 (Yews start 100 below the tier start)", 4)
show("entering 2020/2021", 7)

final = replay(corpus, params)
print("final mean display rating:",
      round(sum(to_display(r) for r in final.ratings.values()) / len(final.ratings), 9))
