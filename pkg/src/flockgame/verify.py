"""Seeded solver-versus-oracle verification for the three games."""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

from .continuous import indifference_residuals, solve_ct
from .discrete import solve_dt
from .game import GameParams
from .oracle import (
    CT_DEFAULT_STEP,
    GridSpec,
    Mode,
    build_best_response_table,
    choose_k_max,
    enumerate_spe,
    oracle_dt,
    oracle_sfg_approx,
    late_arrivals,
)
from .results import SpeOutcome, SpeType
from .sampling import sample_params
from .sfg import solve_sfg

UTILITY_TOL = 1e-9
RESIDUAL_TOL = 1e-9


@dataclass
class TrialReport:
    index: int
    params: GameParams
    case: str
    passed: bool
    detail: str = ""
    notes: list[str] = field(default_factory=list)
    late_arrivals: int = 0
    max_residual: float = 0.0

    def describe(self) -> str:
        return f"trial {self.index}: case {self.case} params {self.params.to_dict()} -- {self.detail}"


@dataclass
class VerifyReport:
    mode: str
    trials: list[TrialReport]
    step: float | None = None

    @property
    def passed(self) -> int:
        return sum(t.passed for t in self.trials)

    @property
    def failed(self) -> list[TrialReport]:
        return [t for t in self.trials if not t.passed]

    @property
    def ok(self) -> bool:
        return not self.failed

    @property
    def coverage(self) -> dict[str, int]:
        return dict(sorted(Counter(t.case for t in self.trials).items()))

    @property
    def late_arrivals(self) -> int:
        return sum(t.late_arrivals for t in self.trials)

    @property
    def max_residual(self) -> float:
        return max((t.max_residual for t in self.trials), default=0.0)

    def summary_lines(self) -> list[str]:
        n = len(self.trials)
        what = {
            "dt": "exact matches",
            "ct": "matched within 4*step (empty branches capped at the resignation payoff)",
            "sfg": "matched on type and deterrence time within 2*step",
        }[self.mode]
        lines = [f"{self.mode}: {self.passed}/{n} {what}"]
        if self.step is not None:
            lines.append(f"step: {self.step:.12g}")
        lines.append("coverage: " + ", ".join(f"{k}={v}" for k, v in self.coverage.items()))
        lines.append(f"late arrivals: {self.late_arrivals}")
        if self.mode == "ct":
            lines.append(f"max indifference residual: {self.max_residual:.3e}")
        for t in self.trials:
            for note in t.notes:
                lines.append(f"note (trial {t.index}): {note}")
        if self.failed:
            lines.append("first failure: " + self.failed[0].describe())
        return lines

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "step": self.step,
            "trials": len(self.trials),
            "passed": self.passed,
            "coverage": self.coverage,
            "late_arrivals": self.late_arrivals,
            "max_residual": self.max_residual,
            "notes": [f"trial {t.index}: {n}" for t in self.trials for n in t.notes],
            "first_failure": self.failed[0].describe() if self.failed else None,
        }


def _same_outcome(a: SpeOutcome, b: SpeOutcome) -> bool:
    return (
        a.t1 == b.t1
        and a.t2 == b.t2
        and abs(a.u1 - b.u1) <= UTILITY_TOL
        and abs(a.u2 - b.u2) <= UTILITY_TOL
    )


def _fmt(outcomes: Sequence[SpeOutcome]) -> str:
    return "[" + ", ".join(f"({o.t1}, {o.t2})" for o in outcomes) + "]"


def check_dt(index: int, params: GameParams) -> TrialReport:
    """Closed form against unit-grid backward induction, exact on times."""
    res = solve_dt(params)
    ora = oracle_dt(params, Mode.LEADER_FAVORABLE)
    passed = len(res.outcomes) == len(ora.outcomes) and all(
        _same_outcome(a, b) for a, b in zip(res.outcomes, ora.outcomes)
    )
    detail = f"solver {_fmt(res.outcomes)} oracle {_fmt(ora.outcomes)}"
    notes = [
        f"follower tie at t1 = {tie['t1']:.12g}, responses {tie['responses']}"
        for tie in res.diagnostics["follower_ties"]
    ]
    return TrialReport(
        index, params, res.case.path, passed, detail, notes, len(late_arrivals(ora, params.t_o))
    )


def check_ct(index: int, params: GameParams, step: float = CT_DEFAULT_STEP) -> TrialReport:
    """Closed form against the fine-grid approximation with just-before replies.

    Each closed-form outcome must sit within 4*step of a leader-favorable
    oracle outcome, or of an outcome supportable under the leader-worst tie
    rule when the closed form lists several. Empty branches must show up as a
    leader payoff capped near the resignation payoff e2 - r/2.
    """
    res = solve_ct(params)
    grid = GridSpec(step, -2, choose_k_max(params, step))
    table = build_best_response_table(params, grid, augment=True, method="region")
    lf = enumerate_spe(params, grid, Mode.LEADER_FAVORABLE, table=table)
    tol = 4 * step
    violations = len(late_arrivals(lf, params.t_o))

    def near(a: SpeOutcome, b: SpeOutcome) -> bool:
        return abs(a.t1.t - b.t1.t) <= tol and abs(a.t2.t - b.t2.t) <= tol

    if res.exists:
        unmatched = [o for o in res.outcomes if not any(near(o, g) for g in lf.outcomes)]
        pool = lf.outcomes
        if unmatched:
            sup = enumerate_spe(params, grid, Mode.ALL_SUPPORTABLE, table=table)
            violations += len(late_arrivals(sup, params.t_o))
            unmatched = [o for o in unmatched if not any(near(o, g) for g in sup.outcomes)]
            pool = sup.outcomes
        passed = not unmatched
        detail = f"solver {_fmt(res.outcomes)} oracle {_fmt(pool[:6])}"
    else:
        cap = params.e2 - params.r / 2 + 10 * step
        passed = lf.leader_value <= cap
        detail = f"empty branch; oracle leader value {lf.leader_value:.12g} vs cap {cap:.12g}"

    residuals = [v for v in indifference_residuals(params).values() if v is not None]
    max_res = max(residuals, default=0.0)
    if max_res >= RESIDUAL_TOL:
        passed = False
        detail += f"; indifference residual {max_res:.3e}"
    return TrialReport(index, params, res.case.path, passed, detail, [], violations, max_res)


def check_sfg(index: int, params: GameParams, step: float = CT_DEFAULT_STEP) -> TrialReport:
    """Strict-flocking closed form against the w = 0 fine-grid oracle."""
    res = solve_sfg(params)
    ora = oracle_sfg_approx(params, step, Mode.LEADER_FAVORABLE)
    expected = res.outcomes[0]
    t_o = params.t_o
    if expected.type_tag is SpeType.SFG_COOP:
        passed = any(o.t1.t == t_o and o.t2.t == t_o and not o.t2.just_before for o in ora.outcomes)
    else:
        passed = any(
            abs(o.t1.t - expected.t1.t) <= 2 * step and o.t2.t == t_o and not o.t2.just_before
            for o in ora.outcomes
        )
    detail = f"solver {_fmt(res.outcomes)} oracle {_fmt(ora.outcomes)}"
    return TrialReport(
        index, params, res.case.path, passed, detail, [], len(late_arrivals(ora, t_o))
    )


def _check(job: tuple[str, int, GameParams, float]) -> TrialReport:
    mode, index, params, step = job
    if mode == "dt":
        return check_dt(index, params)
    if mode == "ct":
        return check_ct(index, params, step)
    return check_sfg(index, params, step)


def run_checks(
    mode: str,
    params_list: Sequence[GameParams],
    step: float = CT_DEFAULT_STEP,
    workers: int = 1,
) -> VerifyReport:
    """Check every parameter set; the report order follows the input order."""
    if mode not in ("dt", "ct", "sfg"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode != "dt" and not (0 < step <= 1 / 16 and math.isclose(1 / step, round(1 / step))):
        raise ValueError("step must be at most 1/16 and divide 1")
    jobs = [(mode, i, p, step) for i, p in enumerate(params_list)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(_check, jobs, chunksize=8))
    else:
        trials = [_check(job) for job in jobs]
    return VerifyReport(mode, trials, None if mode == "dt" else step)


def verify(
    mode: str, trials: int, seed: int = 0, step: float = CT_DEFAULT_STEP, workers: int = 1
) -> VerifyReport:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    return run_checks(mode, sample_params(seed, trials), step, workers)
