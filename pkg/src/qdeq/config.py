"""Run configuration shared by the CLI and the acceptance runner."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from fractions import Fraction

SCHEMA_VERSION = "1"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    digits: int = 50
    crossover: int = 2000
    nu: Fraction = Fraction(2, 5)
    chi_samples: tuple[Fraction, ...] = (Fraction(1), Fraction(-2), Fraction(-13))
    q: Fraction = Fraction(1)
    seed: int = 20240611
    fmt: str = "json"
    tolerance_scale: Fraction = Fraction(10)
    workers: int = 1
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.digits < 20:
            raise ConfigError("precision must be at least 20 digits")
        if not 0 < self.crossover <= 5000:
            raise ConfigError("crossover must lie in 1..5000")
        if not 0 < self.nu <= Fraction(1, 2):
            raise ConfigError("nu must lie in (0, 1/2]")
        if not self.chi_samples or any(c == 0 for c in self.chi_samples):
            raise ConfigError("chi samples must be nonzero")
        if self.fmt not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_json(self) -> dict:
        return {
            "digits": self.digits, "crossover": self.crossover, "nu": str(self.nu),
            "chi_samples": [str(c) for c in self.chi_samples], "q": str(self.q),
            "seed": self.seed, "format": self.fmt,
            "tolerance_scale": str(self.tolerance_scale), "workers": self.workers,
        }


def from_env(base: RunConfig | None = None, environ=None) -> RunConfig:
    """Apply ``QDEQ_PRECISION`` and ``QDEQ_SEED``."""
    env = os.environ if environ is None else environ
    base = base or RunConfig()
    kw = {}
    try:
        if env.get("QDEQ_PRECISION"):
            kw["digits"] = int(env["QDEQ_PRECISION"])
        if env.get("QDEQ_SEED"):
            kw["seed"] = int(env["QDEQ_SEED"])
    except ValueError as exc:
        raise ConfigError(f"bad environment override: {exc}") from None
    return base.with_overrides(**kw)
