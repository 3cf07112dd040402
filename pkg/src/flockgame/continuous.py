"""Closed-form subgame perfect equilibria of the continuous-time game (w = 1).

The leader deters the follower by arriving early enough that undercutting
(arriving just before the leader) is no better than withdrawing. The leader
time at which the follower is exactly indifferent is a tipping point; every
pure equilibrium puts the leader on one of them.
"""

from __future__ import annotations

import math
from typing import Any

from .game import (
    EPS_COND,
    EPS_TIE,
    Action,
    GameParams,
    argmax_within,
    cmp_rel,
    utilities,
)
from .results import CaseLabel, SpeOutcome, SpeResult, SpeType


def tipping_points(params: GameParams) -> tuple[float, float, float]:
    """Leader times (flock-at-t_o, solo-at-t_o, flock-one-behind) of follower indifference."""
    params.require_unit_window()
    d, b2, r, t_o = params.delta_e, params.beta2, params.r, params.t_o
    return (
        t_o - math.sqrt(b2 * d),
        t_o - math.sqrt(b2 * (d + r / 2)),
        t_o - (b2 * d + 1) / 2,
    )


def follower_candidates_ct(t1: float, params: GameParams) -> list[Action]:
    if t1 > params.t_o:
        raise ValueError(f"leader time {t1} is later than t_o = {params.t_o}")
    cands = [Action.before(t1)]
    if t1 + params.w <= params.t_o:
        cands.append(Action.exact(t1 + params.w))
    if params.t_o != t1 + params.w:
        cands.append(Action.exact(params.t_o))
    return cands


def follower_best_response_ct(
    t1: float, params: GameParams, eps_tie: float = EPS_TIE
) -> list[tuple[Action, float]]:
    """All utility-maximising follower replies to leader time ``t1`` with their utilities.

    The shortlist is undercutting (just before ``t1``), flocking one window
    behind, and arriving at ``t_o``; no other reply can do better.
    """
    cands = follower_candidates_ct(t1, params)
    u2 = [utilities((Action.exact(t1), a), params)[1] for a in cands]
    out = [(cands[i], u2[i]) for i in argmax_within(u2, eps_tie)]
    return sorted(out, key=lambda pair: pair[0].sort_key())


def leader_favorable_response_ct(
    t1: float, params: GameParams, eps_tie: float = EPS_TIE
) -> tuple[Action, float, float]:
    """Follower reply chosen among tied best responses to maximise the leader; returns (a2, u1, u2)."""
    best = None
    for a2, u2 in follower_best_response_ct(t1, params, eps_tie):
        u1 = utilities((Action.exact(t1), a2), params)[0]
        if (
            best is None
            or u1 > best[1] + eps_tie
            or (abs(u1 - best[1]) <= eps_tie and a2.sort_key() > best[0].sort_key())
        ):
            best = (a2, u1, u2)
    assert best is not None
    return best


def _conditions(params: GameParams) -> dict[str, float]:
    d, b1, b2, r = params.delta_e, params.beta1, params.beta2, params.r
    return {
        "delta_e": d,
        "inv_beta2": 1 / b2,
        "delta_e_beta2": d * b2,
        "sqrt_2r_beta2_plus_1": math.sqrt(2 * r * b2) + 1,
        "type3_lhs": 4 * d * b1,
        "type3_rhs": (d * b2 + 1) ** 2,
        "type2_lhs": (d - r / 2) * b1,
        "type2_rhs": (d + r / 2) * b2,
    }


def classify_case_ct(params: GameParams, eps_cond: float = EPS_COND) -> CaseLabel:
    params.require_unit_window()
    c = _conditions(params)
    if cmp_rel(c["delta_e"], c["inv_beta2"], eps_cond) <= 0:
        return CaseLabel("CT", "CT-1")
    type3 = cmp_rel(c["type3_lhs"], c["type3_rhs"], eps_cond) >= 0
    type2 = cmp_rel(c["type2_lhs"], c["type2_rhs"], eps_cond) >= 0
    split = cmp_rel(c["delta_e_beta2"], c["sqrt_2r_beta2_plus_1"], eps_cond)
    if split < 0:
        return CaseLabel("CT", "CT-2.1.a" if type3 else "CT-2.1.b")
    if split > 0:
        return CaseLabel("CT", "CT-2.2.a" if type2 else "CT-2.2.b")
    return CaseLabel("CT", "CT-2.3.a" if (type2 or type3) else "CT-2.3.b")


def _residuals(params: GameParams, tips: tuple[float, float, float]) -> dict[str, float | None]:
    """Follower indifference residuals at each tipping point that lies in its own regime."""
    t11, t12, t13 = tips
    t_o, w = params.t_o, params.w

    def u2(t1: float, a2: Action) -> float:
        return utilities((Action.exact(t1), a2), params)[1]

    out: dict[str, float | None] = {"t11": None, "t12": None, "t13": None}
    if t_o - t11 <= w:
        out["t11"] = abs(u2(t11, Action.before(t11)) - u2(t11, Action.exact(t_o)))
    if t_o - t12 > w:
        out["t12"] = abs(u2(t12, Action.before(t12)) - u2(t12, Action.exact(t_o)))
    if t13 + w <= t_o:
        out["t13"] = abs(u2(t13, Action.before(t13)) - u2(t13, Action.exact(t13 + w)))
    return out


def indifference_residuals(params: GameParams) -> dict[str, float | None]:
    return _residuals(params, tipping_points(params))


def solve_ct(
    params: GameParams, eps_cond: float = EPS_COND, eps_tie: float = EPS_TIE
) -> SpeResult:
    """Pure-strategy SPE set of the continuous-time game; empty when none exists."""
    params.require_unit_window()
    case = classify_case_ct(params, eps_cond)
    c = _conditions(params)
    t11, t12, t13 = tips = tipping_points(params)
    t_o = params.t_o

    outcomes: list[SpeOutcome] = []
    if case.path == "CT-1":
        outcomes.append(SpeOutcome.build(t11, t_o, SpeType.CT1, params))
    elif case.path == "CT-2.1.a":
        outcomes.append(SpeOutcome.build(t13, t13 + params.w, SpeType.CT3, params))
    elif case.path == "CT-2.2.a":
        outcomes.append(SpeOutcome.build(t12, t_o, SpeType.CT2, params))
    elif case.path == "CT-2.3.a":
        if cmp_rel(c["type2_lhs"], c["type2_rhs"], eps_cond) >= 0:
            outcomes.append(SpeOutcome.build(t12, t_o, SpeType.CT2, params))
        if cmp_rel(c["type3_lhs"], c["type3_rhs"], eps_cond) >= 0:
            outcomes.append(SpeOutcome.build(t13, t13 + params.w, SpeType.CT3, params))

    resigned = utilities((Action.exact(t_o), Action.before(t_o)), params)[0]
    diagnostics: dict[str, Any] = {
        "tipping_points": {"t11": t11, "t12": t12, "t13": t13},
        "condition_values": c,
        "residuals": _residuals(params, tips),
        "resigned_payoff": resigned,
        "tipping_u1": {
            "t11": utilities((Action.exact(t11), Action.exact(t_o)), params)[0],
            "t12": utilities((Action.exact(t12), Action.exact(t_o)), params)[0],
            "t13": utilities((Action.exact(t13), Action.exact(t13 + params.w)), params)[0],
        },
        "follower_ties": [
            {
                "t1": o.t1.t,
                "responses": [a.to_json() for a, _ in follower_best_response_ct(o.t1.t, params, eps_tie)],
            }
            for o in outcomes
        ],
    }
    warnings = []
    if params.degenerate:
        warnings.append("degenerate: r = 0, flocking carries no benefit")
    if case.path != "CT-1" and cmp_rel(t13 + params.w, t_o, eps_cond) == 0:
        warnings.append("t13 + w coincides with t_o; boundary not covered by the derivation")
    return SpeResult(outcomes, case, diagnostics, warnings)


def check_no_late_arrival(outcome: SpeOutcome, t_o: float) -> bool:
    """No equilibrium arrival is later than the optimal time."""
    return outcome.t1.t <= t_o and outcome.t2.t <= t_o
