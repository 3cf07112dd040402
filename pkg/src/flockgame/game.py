"""Parameters, actions and the utility model of the two-agent flock formation game.

Agent 1 (stronger, leader) and Agent 2 (weaker, follower) each pick an arrival
time. Utility is territory benefit minus quadratic travel cost minus predation
risk, where the risk halves whenever both arrivals fall inside the flocking
window ``w``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Mapping

import numpy as np

EPS_TIE = 1e-9
EPS_COND = 1e-9

# Guards the inclusive window test against rounding in t1 + w style sums.
_WINDOW_SLACK = 1e-12


class InvalidParamsError(ValueError):
    """Raised when a parameter set violates a model invariant."""


@dataclass(frozen=True)
class GameParams:
    beta1: float
    beta2: float
    e1: float
    e2: float
    r: float
    t_o: float
    w: float = 1.0
    c_o1: float = 0.0
    c_o2: float = 0.0

    def __post_init__(self) -> None:
        for name in ("beta1", "beta2", "e1", "e2", "r", "t_o", "w", "c_o1", "c_o2"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise InvalidParamsError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise InvalidParamsError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not self.beta2 > 0:
            raise InvalidParamsError("beta2 > 0 required")
        if not self.beta1 > self.beta2:
            raise InvalidParamsError("beta1 > beta2 required (Agent 1 is the stronger agent)")
        if not self.e2 > 0:
            raise InvalidParamsError("E2 > 0 required")
        if not self.e1 > self.e2:
            raise InvalidParamsError("E1 > E2 required (territory 1 is the better one)")
        if self.r < 0:
            raise InvalidParamsError("r >= 0 required")
        if self.w < 0:
            raise InvalidParamsError("w >= 0 required")

    @property
    def delta_e(self) -> float:
        return self.e1 - self.e2

    @property
    def degenerate(self) -> bool:
        """True when r == 0, i.e. flocking carries no benefit."""
        return self.r == 0.0

    def beta(self, agent: int) -> float:
        return self.beta1 if agent == 1 else self.beta2

    def c_o(self, agent: int) -> float:
        return self.c_o1 if agent == 1 else self.c_o2

    def with_gap(self, delta_e: float) -> GameParams:
        """Copy with E1 = E2 + delta_e."""
        return replace(self, e1=self.e2 + delta_e)

    def require_unit_window(self) -> None:
        if self.w != 1.0:
            raise InvalidParamsError(
                f"closed-form solvers are stated for w = 1, got w = {self.w}"
            )

    def to_dict(self) -> dict[str, float]:
        d = asdict(self)
        d["E1"] = d.pop("e1")
        d["E2"] = d.pop("e2")
        return {k: d[k] for k in ("beta1", "beta2", "E1", "E2", "r", "t_o", "w", "c_o1", "c_o2")}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> GameParams:
        required = ("beta1", "beta2", "E1", "E2", "r", "t_o")
        missing = [k for k in required if k not in data]
        if missing:
            raise InvalidParamsError(f"missing parameter(s): {', '.join(missing)}")
        unknown = set(data) - set(required) - {"w", "c_o1", "c_o2"}
        if unknown:
            raise InvalidParamsError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        return cls(
            beta1=data["beta1"],
            beta2=data["beta2"],
            e1=data["E1"],
            e2=data["E2"],
            r=data["r"],
            t_o=data["t_o"],
            w=data.get("w", 1.0),
            c_o1=data.get("c_o1", 0.0),
            c_o2=data.get("c_o2", 0.0),
        )


@dataclass(frozen=True)
class Action:
    """An arrival time. ``just_before`` marks the limit t - eps, eps -> 0+."""

    t: float
    just_before: bool = False

    @classmethod
    def exact(cls, t: float) -> Action:
        return cls(float(t))

    @classmethod
    def before(cls, t: float) -> Action:
        return cls(float(t), True)

    def sort_key(self) -> tuple[float, int]:
        # JustBefore(t) sits strictly between every Exact(s < t) and Exact(t).
        return (self.t, 0 if self.just_before else 1)

    def to_json(self) -> float | dict[str, float]:
        return {"just_before": self.t} if self.just_before else self.t

    @classmethod
    def from_json(cls, value: Any) -> Action:
        if isinstance(value, Mapping):
            return cls.before(value["just_before"])
        return cls.exact(value)

    def __str__(self) -> str:
        return f"{self.t:g}-" if self.just_before else f"{self.t:g}"


def as_action(value: Action | float) -> Action:
    return value if isinstance(value, Action) else Action.exact(value)


@dataclass(frozen=True)
class ArrivalProfile:
    t1: Action
    t2: Action

    def __post_init__(self) -> None:
        object.__setattr__(self, "t1", as_action(self.t1))
        object.__setattr__(self, "t2", as_action(self.t2))
        if self.t1.just_before:
            raise ValueError("only the follower may play a just-before action")


def as_profile(profile: ArrivalProfile | tuple) -> ArrivalProfile:
    if isinstance(profile, ArrivalProfile):
        return profile
    t1, t2 = profile
    return ArrivalProfile(t1, t2)


@dataclass(frozen=True)
class UtilityBreakdown:
    benefit: float
    travel_cost: float
    risk: float
    total: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "total", self.benefit - self.travel_cost - self.risk)


def assign_benefit(profile: ArrivalProfile | tuple, params: GameParams) -> tuple[float, float]:
    """Territory values (agent 1, agent 2); simultaneous arrival goes to agent 1."""
    p = as_profile(profile)
    if p.t2.sort_key() < p.t1.sort_key():
        return params.e2, params.e1
    return params.e1, params.e2


def travel_cost(t: Action | float, beta: float, t_o: float, c_o: float = 0.0) -> float:
    if not beta > 0:
        raise InvalidParamsError(f"beta must be positive, got {beta}")
    a = as_action(t)
    return (a.t - t_o) ** 2 / beta + c_o


def in_window(t1: Action, t2: Action, w: float) -> bool:
    """Whether two arrivals fall within the flocking window (inclusive)."""
    if w == 0.0:
        return t1 == t2
    d = abs(t1.t - t2.t)
    return d <= w or d - w <= _WINDOW_SLACK * max(1.0, abs(t1.t), abs(t2.t))


def predation_risk(profile: ArrivalProfile | tuple, params: GameParams) -> tuple[float, float]:
    p = as_profile(profile)
    risk = params.r / 2 if in_window(p.t1, p.t2, params.w) else params.r
    return risk, risk


def utility(
    profile: ArrivalProfile | tuple, params: GameParams
) -> tuple[UtilityBreakdown, UtilityBreakdown]:
    p = as_profile(profile)
    b1, b2 = assign_benefit(p, params)
    p1, p2 = predation_risk(p, params)
    c1 = travel_cost(p.t1, params.beta1, params.t_o, params.c_o1)
    c2 = travel_cost(p.t2, params.beta2, params.t_o, params.c_o2)
    return UtilityBreakdown(b1, c1, p1), UtilityBreakdown(b2, c2, p2)


def utilities(profile: ArrivalProfile | tuple, params: GameParams) -> tuple[float, float]:
    u1, u2 = utility(profile, params)
    return u1.total, u2.total


def utility_arrays(
    t1: np.ndarray,
    t2: np.ndarray,
    params: GameParams,
    t2_just_before: np.ndarray | bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised totals for exact leader times ``t1`` against follower times ``t2``.

    Broadcasts like numpy; follows exactly the rules of :func:`utility`.
    """
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    jb = np.asarray(t2_just_before, dtype=bool)

    follower_first = (t2 < t1) | (jb & (t2 == t1))
    b1 = np.where(follower_first, params.e2, params.e1)
    b2 = np.where(follower_first, params.e1, params.e2)

    if params.w == 0.0:
        flock = (t1 == t2) & ~jb
    else:
        d = np.abs(t1 - t2)
        scale = np.maximum(1.0, np.maximum(np.abs(t1), np.abs(t2)))
        flock = (d <= params.w) | (d - params.w <= _WINDOW_SLACK * scale)
    risk = np.where(flock, params.r / 2, params.r)

    c1 = (t1 - params.t_o) ** 2 / params.beta1 + params.c_o1
    c2 = (t2 - params.t_o) ** 2 / params.beta2 + params.c_o2
    return b1 - c1 - risk, b2 - c2 - risk


def cmp_rel(a: float, b: float, eps: float = EPS_COND) -> int:
    """Three-way comparison treating relative differences below ``eps`` as equal."""
    if abs(a - b) <= eps * max(1.0, abs(a), abs(b)):
        return 0
    return -1 if a < b else 1


def argmax_within(values: list[float], eps: float = EPS_TIE) -> list[int]:
    """Indices whose value is within ``eps`` (absolute) of the maximum."""
    best = max(values)
    return [i for i, v in enumerate(values) if v >= best - eps]
