import numpy as np
import pytest

from leaguerate.dataset import SplitSpec, season_memberships, season_order, split
from leaguerate.synth import SynthConfig, generate


@pytest.fixture(scope="module")
def corpus():
    return generate()


def test_default_shape(corpus):
    assert 4500 <= len(corpus.records) <= 5000
    assert len(corpus.tiers) == 4
    assert season_order(corpus.records) == [f"{y}/{y + 1}" for y in range(2017, 2023)]


def test_seeded(corpus):
    again = generate()
    assert again.records == corpus.records and np.array_equal(again.true_probs, corpus.true_probs)
    assert generate(SynthConfig(seed=1)).records != corpus.records


def test_probabilities_and_scorelines(corpus):
    assert np.allclose(corpus.true_probs.sum(axis=1), 1.0, atol=1e-12)
    outcomes = np.array([m.outcome for m in corpus.records])
    # observed class frequencies agree with the generating probabilities
    for k in range(3):
        expected = corpus.true_probs[:, k].sum()
        sd = np.sqrt((corpus.true_probs[:, k] * (1 - corpus.true_probs[:, k])).sum())
        assert abs((outcomes == k).sum() - expected) < 4 * sd


def test_promotion_relegation_and_newcomers(corpus):
    order = season_order(corpus.records)
    prev = season_memberships(corpus.records, order[0], corpus.tiers)
    for season in order[1:]:
        cur = season_memberships(corpus.records, season, corpus.tiers)
        up = [t for t in cur if t in prev and prev[t].endswith("Second") and cur[t].endswith("First")]
        down = [t for t in cur if t in prev and prev[t].endswith("First") and cur[t].endswith("Second")]
        new = [t for t in cur if t not in prev]
        assert len(up) == len(down) == 6 and len(new) == 6
        prev = cur


def test_default_split_has_pandemic_training_matches(corpus):
    train, test = split(corpus.records, SplitSpec.default(season_order(corpus.records)))
    assert any(m.is_pandemic for m in train) and len(test) > 0


def test_large_config_size():
    cfg = SynthConfig.large()
    per_season = cfg.countries * 2 * cfg.teams_per_league * (cfg.teams_per_league - 1)
    assert abs(per_season * cfg.seasons - 366_000) < 1_000


def test_rejects_bad_league_size():
    with pytest.raises(ValueError):
        generate(SynthConfig(teams_per_league=7))
