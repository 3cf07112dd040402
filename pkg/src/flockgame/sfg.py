"""Strict-flocking baseline (w = 0): only identical arrival times form a flock."""

from __future__ import annotations

import math
from dataclasses import replace

from .game import EPS_COND, GameParams, cmp_rel
from .results import CaseLabel, SpeOutcome, SpeResult, SpeType


def sfg_params(params: GameParams) -> GameParams:
    return params if params.w == 0.0 else replace(params, w=0.0)


def cooperation_threshold(params: GameParams) -> float:
    """Largest territory gap at which the follower still joins the leader at t_o."""
    return params.r / 2


def solve_sfg(params: GameParams, eps_cond: float = EPS_COND) -> SpeResult:
    p = sfg_params(params)
    d, t_o = p.delta_e, p.t_o
    threshold = cooperation_threshold(p)
    cmp = cmp_rel(d, threshold, eps_cond)
    if cmp <= 0:
        outcome = SpeOutcome.build(t_o, t_o, SpeType.SFG_COOP, p)
        case = CaseLabel("SFG", "SFG-coop")
    else:
        outcome = SpeOutcome.build(t_o - math.sqrt(d * p.beta2), t_o, SpeType.SFG_DETER, p)
        case = CaseLabel("SFG", "SFG-deter")
    warnings = []
    if cmp == 0:
        warnings.append("gap equals the cooperation threshold r/2; assigned to cooperation")
    if p.degenerate:
        warnings.append("degenerate: r = 0, flocking carries no benefit")
    diagnostics = {"threshold": threshold, "delta_e": d, "deterrence_time": t_o - math.sqrt(d * p.beta2)}
    return SpeResult([outcome], case, diagnostics, warnings)
