from fractions import Fraction

import pytest

from qdeq.config import ConfigError, RunConfig, from_env


def test_defaults():
    cfg = RunConfig()
    assert cfg.digits == 50 and cfg.nu == Fraction(2, 5) and cfg.crossover == 2000
    assert cfg.to_json()["chi_samples"] == ["1", "-2", "-13"]


@pytest.mark.parametrize("kw", [
    {"digits": 19}, {"crossover": 5001}, {"crossover": 0}, {"nu": Fraction(0)},
    {"nu": Fraction(3, 5)}, {"chi_samples": (Fraction(0),)}, {"fmt": "xml"}, {"workers": 0},
])
def test_invalid_values_rejected(kw):
    with pytest.raises(ConfigError):
        RunConfig(**kw)


def test_overrides_skip_none():
    cfg = RunConfig().with_overrides(digits=30, seed=None)
    assert cfg.digits == 30 and cfg.seed == RunConfig().seed


def test_env_overrides():
    cfg = from_env(environ={"QDEQ_PRECISION": "25", "QDEQ_SEED": "7"})
    assert cfg.digits == 25 and cfg.seed == 7
    assert from_env(environ={}) == RunConfig()
    with pytest.raises(ConfigError):
        from_env(environ={"QDEQ_PRECISION": "many"})
    with pytest.raises(ConfigError):
        from_env(environ={"QDEQ_PRECISION": "5"})
