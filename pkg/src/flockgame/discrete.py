"""Closed-form subgame perfect equilibria of the discrete-time game.

Arrival times live on the integer lattice t = t_o - k. The leader's deterrence
offset k* is the smallest k at which the follower no longer gains by arriving
one step ahead of the leader.
"""

from __future__ import annotations

import math
from typing import Any, Iterable

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

# "resolved": flock-vs-withdraw gate at sqrt(r*beta2/2) + 1 (what the utilities imply).
# "literal": the alternative typeset reading sqrt(r/2)*beta2 + 1, kept for comparison only.
GATE_READINGS = ("resolved", "literal")


def snapped_ceil(x: float, eps_cond: float = EPS_COND) -> int:
    """Ceiling that treats values within ``eps_cond`` (relative) of an integer as that integer."""
    n = round(x)
    if abs(x - n) <= eps_cond * max(1.0, abs(x)):
        return int(n)
    return math.ceil(x)


def k_star_bound(params: GameParams) -> float:
    d, b2, r = params.delta_e, params.beta2, params.r
    return min(math.sqrt((d + r / 2) * b2), d * b2 / 4 + 1)


def k_star(params: GameParams, eps_cond: float = EPS_COND) -> int:
    params.require_unit_window()
    return snapped_ceil(k_star_bound(params), eps_cond) - 1


def gate_value(params: GameParams, reading: str = "resolved") -> float:
    if reading == "resolved":
        return math.sqrt(params.r * params.beta2 / 2) + 1
    if reading == "literal":
        return math.sqrt(params.r / 2) * params.beta2 + 1
    raise ValueError(f"unknown gate reading {reading!r}")


def follower_best_response_dt(
    t1: float, params: GameParams, eps_tie: float = EPS_TIE
) -> list[tuple[Action, float]]:
    """Argmax of the follower over {t1 - 1, t1 + 1 (if <= t_o), t_o}, ties all kept."""
    t_o = params.t_o
    if t1 > t_o:
        raise ValueError(f"leader time {t1} is later than t_o = {t_o}")
    times = [t1 - 1]
    if t1 + 1 <= t_o:
        times.append(t1 + 1)
    if t_o not in times:
        times.append(t_o)
    u2 = [utilities((t1, t2), params)[1] for t2 in times]
    return sorted(
        ((Action.exact(times[i]), u2[i]) for i in argmax_within(u2, eps_tie)),
        key=lambda pair: pair[0].t,
    )


def _gate_open(k: int, params: GameParams, reading: str, eps_cond: float) -> bool:
    """True when k <= gate, i.e. the follower still prefers flocking behind the leader."""
    if reading == "resolved":
        # (k - 1)^2 <= r*beta2/2 avoids a square root at the boundary.
        return cmp_rel((k - 1) ** 2, params.r * params.beta2 / 2, eps_cond) <= 0
    return cmp_rel(k, gate_value(params, reading), eps_cond) <= 0


def classify_case_dt(
    params: GameParams, eps_cond: float = EPS_COND, gate: str = "resolved"
) -> CaseLabel:
    params.require_unit_window()
    d, b1, b2, r = params.delta_e, params.beta1, params.beta2, params.r
    if cmp_rel(d * b2, 1.0, eps_cond) <= 0:
        return CaseLabel("DT", "DT-1")
    if cmp_rel(d * b2, 4.0, eps_cond) <= 0:
        return CaseLabel("DT", "DT-2")
    k = k_star(params, eps_cond)
    if _gate_open(k, params, gate, eps_cond):
        branch, rhs = "3.1", d * b1
    else:
        branch, rhs = "3.2", (d - r / 2) * b1
    # Squared comparison: k vs sqrt(rhs); a negative rhs means k is larger.
    sub = "b" if rhs < 0 else {-1: "a", 1: "b", 0: "c"}[cmp_rel(k * k, rhs, eps_cond)]
    return CaseLabel("DT", f"DT-{branch}.{sub}")


_OUTCOMES = {
    "DT-1": ("t1",),
    "DT-2": ("t2",),
    "DT-3.1.a": ("t3",),
    "DT-3.1.b": ("t5",),
    "DT-3.1.c": ("t3", "t5"),
    "DT-3.2.a": ("t4",),
    "DT-3.2.b": ("t5",),
    "DT-3.2.c": ("t4", "t5"),
}


def solve_dt(
    params: GameParams, eps_cond: float = EPS_COND, eps_tie: float = EPS_TIE, gate: str = "resolved"
) -> SpeResult:
    params.require_unit_window()
    case = classify_case_dt(params, eps_cond, gate)
    t_o = params.t_o
    k = k_star(params, eps_cond)
    profiles = {
        "t1": (t_o, t_o, SpeType.DT1),
        "t2": (t_o - 1, t_o, SpeType.DT2),
        "t3": (t_o - k, t_o - k + 1, SpeType.DT3),
        "t4": (t_o - k, t_o, SpeType.DT4),
        "t5": (t_o, t_o - 1, SpeType.DT5),
    }
    outcomes = [SpeOutcome.build(*profiles[key][:2], profiles[key][2], params) for key in _OUTCOMES[case.path]]

    d, b1, b2, r = params.delta_e, params.beta1, params.beta2, params.r
    diagnostics: dict[str, Any] = {
        "k_star": k,
        "k_star_bound": k_star_bound(params),
        "condition_values": {
            "delta_e_beta2": d * b2,
            "gate": gate_value(params, gate),
            "sqrt_delta_e_beta1": math.sqrt(d * b1),
            "sqrt_delta_e_minus_half_r_beta1": math.sqrt(max(0.0, (d - r / 2) * b1)),
        },
        "follower_ties": [
            {"t1": o.t1.t, "responses": [a.t for a, _ in rs]}
            for o in outcomes
            if len(rs := follower_best_response_dt(o.t1.t, params, eps_tie)) > 1
        ],
    }
    warnings = ["degenerate: r = 0, flocking carries no benefit"] if params.degenerate else []
    return SpeResult(outcomes, case, diagnostics, warnings)


def limit_large_gap(params: GameParams, gaps: Iterable[float]) -> list[CaseLabel]:
    """Case labels for each territory gap; large gaps settle on DT-3.2.a."""
    gaps = list(gaps)
    if any(b <= a for a, b in zip(gaps, gaps[1:])):
        raise ValueError("gaps must be strictly increasing")
    return [classify_case_dt(params.with_gap(g)) for g in gaps]
