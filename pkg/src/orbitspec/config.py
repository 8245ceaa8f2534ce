"""Quadrature and Monte Carlo configuration."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets for the quadrature engines.

    At least one of ``abs_tol``, ``rel_tol`` must be strictly positive.
    The Monte Carlo generator is counter-based, so results are a pure
    function of (``rng_seed``, stream index).
    """

    abs_tol: float = 0.0
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    mc_samples: int = 1_000_000
    rng_seed: int = 20260809

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("at least one of abs_tol, rel_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be >= 1")

    def with_tolerance(self, rel_tol=None, abs_tol=None) -> "QuadratureConfig":
        kw = {}
        if rel_tol is not None:
            kw["rel_tol"] = rel_tol
        if abs_tol is not None:
            kw["abs_tol"] = abs_tol
        return replace(self, **kw)


DEFAULT_CONFIG = QuadratureConfig()
