"""Glicko-2 with a three-way (win/draw/loss) expectation and home advantage.

Ratings live on the internal Glicko-2 scale; ``to_display`` maps them to
the familiar 1500-centred scale.  The expectation adds a draw term
``exp(c)`` to the logistic win probability, where ``c`` is a fitted draw
offset plus a per-match draw signal.  Each match is its own rating period.

The scalar kernels are compiled with numba so the chronological replay can
call them in a tight loop; the public functions below wrap the same
kernels for ordinary Python use.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from numba import njit

from .skellam import OutcomeProbs

logger = logging.getLogger(__name__)

DISPLAY_ANCHOR = 1500.0
DISPLAY_SCALE = 173.7178

VOLATILITY_EPS = 1e-6
VOLATILITY_MAX_ITER = 100
EXPECTED_CLAMP = 1e-10

# Ratings are held on a 2^-48 grid.  For |mu| < 16 sums and differences of
# grid values are exact, so a uniform shift never changes a rating gap.
MU_GRID = 2.0 ** 48

_PI_SQ = math.pi * math.pi


@dataclass(frozen=True)
class TeamRating:
    """Glicko-2 state on the internal scale."""

    mu: float
    phi: float
    sigma: float

    def __post_init__(self):
        if math.isfinite(self.mu):
            object.__setattr__(self, "mu", snap_mu(self.mu))
        if not (math.isfinite(self.mu) and math.isfinite(self.phi) and math.isfinite(self.sigma)):
            raise ValueError(f"non-finite rating {self!r}")
        if self.phi <= 0 or self.sigma <= 0:
            raise ValueError(f"phi and sigma must be positive, got {self!r}")

    @property
    def display(self) -> float:
        return to_display(self)


@dataclass(frozen=True)
class MatchContext:
    """Per-match modifiers of the expectation.

    ``h`` applies normally, ``h_p`` when ``is_pandemic`` is set and nothing
    at a neutral venue.  ``draw_offset`` is ``c = d + s``.
    """

    h: float = 0.0
    h_p: float = 0.0
    draw_offset: float = 0.0
    is_pandemic: bool = False
    is_neutral: bool = False

    def __post_init__(self):
        no_advantage = self.h == 0.0 and self.h_p == 0.0
        if not (no_advantage or self.h > self.h_p >= 0.0):
            raise ValueError(f"home advantage needs h > h_p >= 0, got h={self.h}, h_p={self.h_p}")

    @property
    def home_shift(self) -> float:
        if self.is_neutral:
            return 0.0
        return self.h_p if self.is_pandemic else self.h


# -- compiled kernels ---------------------------------------------------------

@njit(cache=True)
def snap_mu(mu):
    """Round ``mu`` to the rating grid."""
    scaled = mu * MU_GRID
    if abs(scaled) >= 2.0 ** 51:
        return mu
    return math.floor(scaled + 0.5) / MU_GRID


@njit(cache=True)
def g_kernel(phi):
    return 1.0 / math.sqrt(1.0 + 3.0 * phi * phi / _PI_SQ)


@njit(cache=True)
def triple_kernel(x, c):
    """(p_win, p_draw, p_loss) for logit gap ``x`` and draw offset ``c``."""
    top = max(x, c, 0.0)
    ew = math.exp(x - top)
    ed = math.exp(c - top)
    el = math.exp(-top)
    z = ew + ed + el
    return ew / z, ed / z, el / z


@njit(cache=True)
def _vol_f(x, delta_sq, phi_sq, v, a, tau_sq):
    ex = math.exp(x)
    denom = phi_sq + v + ex
    return ex * (delta_sq - phi_sq - v - ex) / (2.0 * denom * denom) - (x - a) / tau_sq


@njit(cache=True)
def volatility_kernel(phi, v, delta, sigma, tau, eps, max_iter):
    """Illinois iteration for the new volatility.

    Iterates until the bracket on ``ln sigma^2`` is narrower than ``eps`` and
    the residual at its better end is below ``eps``.  Returns ``(sigma_new, iterations, converged)``.
    """
    a = math.log(sigma * sigma)
    delta_sq = delta * delta
    phi_sq = phi * phi
    tau_sq = tau * tau
    big_a = a
    if delta_sq > phi_sq + v:
        big_b = math.log(delta_sq - phi_sq - v)
    else:
        k = 1
        while _vol_f(a - k * tau, delta_sq, phi_sq, v, a, tau_sq) < 0.0 and k < max_iter:
            k += 1
        big_b = a - k * tau
    f_a = _vol_f(big_a, delta_sq, phi_sq, v, a, tau_sq)
    f_a_true = f_a
    f_b = _vol_f(big_b, delta_sq, phi_sq, v, a, tau_sq)
    it = 0
    # stop on a narrow bracket whose better end also solves the equation to eps
    while abs(big_b - big_a) > eps or min(abs(f_b), abs(f_a_true)) >= eps:
        if it >= max_iter:
            return math.exp(0.25 * (big_a + big_b)), it, False
        it += 1
        big_c = big_a + (big_a - big_b) * f_a / (f_b - f_a)
        f_c = _vol_f(big_c, delta_sq, phi_sq, v, a, tau_sq)
        if f_c * f_b <= 0.0:
            big_a = big_b
            f_a = f_b
            f_a_true = f_b
        else:
            f_a = 0.5 * f_a
        big_b = big_c
        f_b = f_c
    # both ends bracket the root; keep the one with the smaller residual
    if abs(f_b) < abs(f_a_true):
        return math.exp(0.5 * big_b), it, True
    return math.exp(0.5 * big_a), it, True


@njit(cache=True)
def update_kernel(mu, phi, sigma, expected, score, g_opp, tau):
    """One-match Glicko-2 update.  Returns ``(mu, phi, sigma, converged)``."""
    e = min(max(expected, EXPECTED_CLAMP), 1.0 - EXPECTED_CLAMP)
    v = 1.0 / (g_opp * g_opp * e * (1.0 - e))
    delta = v * g_opp * (score - e)
    sigma_new, _, ok = volatility_kernel(phi, v, delta, sigma, tau,
                                         VOLATILITY_EPS, VOLATILITY_MAX_ITER)
    phi_star_sq = phi * phi + sigma_new * sigma_new
    phi_new = 1.0 / math.sqrt(1.0 / phi_star_sq + 1.0 / v)
    mu_new = snap_mu(mu + phi_new * phi_new * g_opp * (score - e))
    return mu_new, phi_new, sigma_new, ok


# -- public API ---------------------------------------------------------------

def g(phi: float) -> float:
    """Glicko-2 attenuation factor ``1 / sqrt(1 + 3 phi^2 / pi^2)``."""
    if phi < 0:
        raise ValueError(f"phi must be nonnegative, got {phi}")
    return g_kernel(float(phi))


def expectation_original(mu: float, mu_j: float, phi_j: float) -> float:
    """Two-outcome Glicko-2 win expectation."""
    x = g(phi_j) * (mu - mu_j)
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    ex = math.exp(x)
    return ex / (1.0 + ex)


def expectation_modified(mu: float, mu_j: float, phi_j: float, c: float) -> float:
    """Win probability when a draw carries weight ``exp(c)``."""
    return triple_kernel(g(phi_j) * (mu - mu_j), float(c))[0]


def combined_phi(home: TeamRating, away: TeamRating) -> float:
    return math.sqrt(home.phi * home.phi + away.phi * away.phi)


def outcome_triple(home: TeamRating, away: TeamRating, ctx: MatchContext) -> OutcomeProbs:
    """Win/draw/loss probabilities of a match from the home side's view.

    Both deviations enter through their quadrature sum so the same triple
    serves both teams.
    """
    x = g(combined_phi(home, away)) * ((home.mu - away.mu) + ctx.home_shift)
    return OutcomeProbs(*triple_kernel(x, float(ctx.draw_offset)))


def expected_scores(probs: OutcomeProbs) -> tuple[float, float]:
    """Expected scores (home, away) with a draw worth half a win."""
    return probs.p_win + 0.5 * probs.p_draw, probs.p_loss + 0.5 * probs.p_draw


def volatility_update(phi: float, v: float, delta: float, sigma: float, tau: float) -> float:
    """New volatility from the Glicko-2 volatility equation.

    Gives up after 100 iterations, returning the bracket midpoint and
    logging a warning.
    """
    if min(phi, v, sigma, tau) <= 0:
        raise ValueError("phi, v, sigma and tau must be positive")
    sigma_new, iterations, converged = volatility_kernel(
        float(phi), float(v), float(delta), float(sigma), float(tau),
        VOLATILITY_EPS, VOLATILITY_MAX_ITER)
    if not converged:
        logger.warning("volatility iteration did not converge after %d steps", iterations)
    return sigma_new


def update_pair(home: TeamRating, away: TeamRating, ctx: MatchContext, score: float,
                tau: float) -> tuple[TeamRating, TeamRating]:
    """Rate both teams after one match.

    ``score`` is the home side's result: 1 win, 0.5 draw, 0 loss (any value
    in between is accepted).  The away side scores ``1 - score``.  The
    expected scores come from the shared match triple; each side's ``g``
    uses its opponent's own deviation.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"score must lie in [0, 1], got {score}")
    e_home, e_away = expected_scores(outcome_triple(home, away, ctx))
    h = update_kernel(home.mu, home.phi, home.sigma, e_home, score, g_kernel(away.phi), tau)
    a = update_kernel(away.mu, away.phi, away.sigma, e_away, 1.0 - score, g_kernel(home.phi), tau)
    if not (h[3] and a[3]):
        logger.warning("volatility iteration did not converge in match update")
    return TeamRating(h[0], h[1], h[2]), TeamRating(a[0], a[1], a[2])


def to_display(rating: TeamRating) -> float:
    return DISPLAY_ANCHOR + DISPLAY_SCALE * rating.mu


def from_display(r: float, phi: float, sigma: float) -> TeamRating:
    return TeamRating((r - DISPLAY_ANCHOR) / DISPLAY_SCALE, phi, sigma)
