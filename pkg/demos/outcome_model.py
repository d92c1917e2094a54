"""
From goal rates to win/draw/loss probabilities
==============================================

Two recent-form goal rates give a draw signal through the Skellam
distribution of the goal difference.  The signal shifts the draw weight
of the three-way Glicko expectation.
"""

import numpy as np

from leaguerate.glicko import MatchContext, TeamRating, from_display, outcome_triple
from leaguerate.reports import interpretation_table, render
from leaguerate.skellam import GoalRates, draw_signal, outcome_probs_from_goals, skellam_pmf

# goal-difference distribution for a 1.6 vs 1.1 goals-per-match pairing
rates = GoalRates(1.6, 1.1)
for k in range(-3, 4):
    print(f"P(diff = {k:+d}) = {skellam_pmf(k, rates):.4f}")
print("collapsed to outcomes:", outcome_probs_from_goals(rates))

# low-scoring pairings draw more often, so their signal is larger
for pair in [(0.7, 0.6), (1.3, 1.2), (2.4, 2.0)]:
    print(pair, "draw signal", round(draw_signal(GoalRates(*pair)), 4))

# the signal enters the expectation through c = d + s
home = from_display(1650, 0.4, 0.06)
away = from_display(1580, 0.5, 0.06)
for s in (0.2, 0.3):
    ctx = MatchContext(h=0.3, h_p=0.1, draw_offset=-0.2 + s)
    print(f"s = {s}:", outcome_triple(home, away, ctx))

# the same pairing behind closed doors and at a neutral venue
print("pandemic:", outcome_triple(home, away, MatchContext(0.3, 0.1, 0.1, is_pandemic=True)))
print("neutral: ", outcome_triple(home, away, MatchContext(0.3, 0.1, 0.1, is_neutral=True)))

# what a rating lead means, with c calibrated so evenly matched sides draw 28.6% of the time
c = np.log(28.6 / 35.7)
print(render(interpretation_table(g_eff=1.0, c=c), title="outcome % by display-rating lead"))
