"""Equilibrium result containers shared by the solvers and the oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

from .game import Action, GameParams, in_window, utilities


class SpeType(str, Enum):
    CT1 = "CT1"
    CT2 = "CT2"
    CT3 = "CT3"
    DT1 = "DT1"
    DT2 = "DT2"
    DT3 = "DT3"
    DT4 = "DT4"
    DT5 = "DT5"
    SFG_COOP = "SFG_COOP"
    SFG_DETER = "SFG_DETER"
    # Oracle outcomes carry no closed-form type.
    GRID = "GRID"


class FlockKind(str, Enum):
    STRICT_FLOCK = "StrictFlock"
    FLOCK = "Flock"
    NO_FLOCK = "NoFlock"


CT_CASES = ("CT-1", "CT-2.1.a", "CT-2.1.b", "CT-2.2.a", "CT-2.2.b", "CT-2.3.a", "CT-2.3.b")
DT_CASES = (
    "DT-1",
    "DT-2",
    "DT-3.1.a",
    "DT-3.1.b",
    "DT-3.1.c",
    "DT-3.2.a",
    "DT-3.2.b",
    "DT-3.2.c",
)
SFG_CASES = ("SFG-coop", "SFG-deter")
ORACLE_CASES = ("ORACLE",)


@dataclass(frozen=True)
class CaseLabel:
    game: str
    path: str

    def __post_init__(self) -> None:
        known = {"CT": CT_CASES, "DT": DT_CASES, "SFG": SFG_CASES, "ORACLE": ORACLE_CASES}
        if self.game not in known or self.path not in known[self.game]:
            raise ValueError(f"unknown case label {self.game}/{self.path}")

    @classmethod
    def parse(cls, path: str) -> CaseLabel:
        return cls(path.split("-", 1)[0], path)

    def __str__(self) -> str:
        return self.path


def classify_flock(t1: Action, t2: Action, w: float) -> FlockKind:
    if t1 == t2:
        return FlockKind.STRICT_FLOCK
    if w > 0 and in_window(t1, t2, w):
        return FlockKind.FLOCK
    return FlockKind.NO_FLOCK


@dataclass(frozen=True)
class SpeOutcome:
    t1: Action
    t2: Action
    type_tag: SpeType
    flock: FlockKind
    u1: float
    u2: float

    @classmethod
    def build(
        cls, t1: Action | float, t2: Action | float, type_tag: SpeType, params: GameParams
    ) -> SpeOutcome:
        a1 = t1 if isinstance(t1, Action) else Action.exact(t1)
        a2 = t2 if isinstance(t2, Action) else Action.exact(t2)
        u1, u2 = utilities((a1, a2), params)
        return cls(a1, a2, type_tag, classify_flock(a1, a2, params.w), u1, u2)

    def sort_key(self) -> tuple:
        return (self.t1.sort_key(), self.t2.sort_key())

    def to_dict(self, t_o: float | None = None) -> dict[str, Any]:
        d: dict[str, Any] = {
            "t1": self.t1.to_json(),
            "t2": self.t2.to_json(),
            "type": self.type_tag.value,
            "flock": self.flock.value,
            "u1": self.u1,
            "u2": self.u2,
        }
        if t_o is not None and self.type_tag.value.startswith("DT"):
            d["k1"] = int(round(t_o - self.t1.t))
            d["k2"] = int(round(t_o - self.t2.t))
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> SpeOutcome:
        return cls(
            Action.from_json(d["t1"]),
            Action.from_json(d["t2"]),
            SpeType(d["type"]),
            FlockKind(d["flock"]),
            float(d["u1"]),
            float(d["u2"]),
        )


@dataclass
class SpeResult:
    outcomes: list[SpeOutcome]
    case: CaseLabel
    diagnostics: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.outcomes = sorted(self.outcomes, key=SpeOutcome.sort_key)

    @property
    def exists(self) -> bool:
        return bool(self.outcomes)

    @property
    def types(self) -> set[SpeType]:
        return {o.type_tag for o in self.outcomes}

    def to_dict(self, t_o: float | None = None) -> dict[str, Any]:
        d: dict[str, Any] = {
            "case": self.case.path,
            "outcomes": [o.to_dict(t_o) for o in self.outcomes],
            "diagnostics": self.diagnostics,
        }
        if self.warnings:
            d["warnings"] = list(self.warnings)
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> SpeResult:
        return cls(
            outcomes=[SpeOutcome.from_dict(o) for o in d["outcomes"]],
            case=CaseLabel.parse(d["case"]),
            diagnostics=dict(d.get("diagnostics", {})),
            warnings=list(d.get("warnings", [])),
        )


def round_floats(obj: Any, digits: int = 12) -> Any:
    """Recursively round floats to ``digits`` significant digits for stable output."""
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return obj
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, Mapping):
        return {k: round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    return obj
