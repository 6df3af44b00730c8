"""Run configuration and pinned experiment thresholds."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

DEFAULT_PRECISION = 64
DEFAULT_BUDGET = 20_000_000
BUDGET_ENV = "EQUIDIST_BUDGET"

# Pass thresholds for the desk-scale experiments. These are empirical; bump
# the version whenever a value changes so old reports stay interpretable.
THRESHOLDS = {
    "version": 1,
    "weyl1d": 0.02,
    "poly": 0.02,
    "lp": 0.02,
    "lp_p3": 0.03,
    "trend_slack": 0.01,
    "a_set_fraction": 0.05,
}


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    bins: int = 64
    grid: int = 64
    precision: int = DEFAULT_PRECISION
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if self.grid < 2:
            raise ValueError("grid must be >= 2")
        if self.precision < 16:
            raise ValueError("precision must be >= 16")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        """Build a config; ``EQUIDIST_BUDGET`` replaces the default budget.

        An explicit ``budget`` override still wins over the environment.
        """
        cfg = cls(**{k: v for k, v in overrides.items() if v is not None})
        env = os.environ.get(BUDGET_ENV)
        if env and overrides.get("budget") is None:
            cfg = replace(cfg, budget=int(env))
        return cfg


def default_budget() -> int:
    env = os.environ.get(BUDGET_ENV)
    return int(env) if env else DEFAULT_BUDGET
