"""Seeded random parameter sets for solver-versus-oracle verification."""

from __future__ import annotations

import math

import numpy as np

from .game import GameParams


def _log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def random_params(rng: np.random.Generator, t_o: float = 10.0, w: float = 1.0) -> GameParams:
    beta2 = _log_uniform(rng, 0.5, 50.0)
    beta1 = beta2 * float(rng.uniform(1.01, 10.0))
    e2 = float(rng.uniform(1.0, 10.0))
    delta_e = _log_uniform(rng, 0.01, 100.0)
    r = _log_uniform(rng, 0.1, 20.0)
    return GameParams(beta1=beta1, beta2=beta2, e1=e2 + delta_e, e2=e2, r=r, t_o=t_o, w=w)


def trial_streams(seed: int, trials: int) -> list[np.random.Generator]:
    """One independent generator per trial, all derived from ``seed``."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def sample_params(seed: int, trials: int, t_o: float = 10.0) -> list[GameParams]:
    return [random_params(rng, t_o) for rng in trial_streams(seed, trials)]
