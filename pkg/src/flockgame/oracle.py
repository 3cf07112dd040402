"""Backward-induction ground truth on bounded arrival grids.

Nothing here uses a closed-form equilibrium result: the follower's reply to
every leader grid time is found by maximising its utility over the whole grid,
then the leader optimises against that reply rule.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any

import numpy as np

from .game import EPS_TIE, Action, GameParams, utility_arrays
from .results import CaseLabel, SpeOutcome, SpeResult, SpeType

CT_DEFAULT_STEP = 2.0**-10

# Dense scans allocate n x n matrices; beyond this the region method is used.
_DENSE_LIMIT = 4096


class Mode(str, Enum):
    LEADER_FAVORABLE = "LeaderFavorable"
    ALL_SUPPORTABLE = "AllSupportable"


@dataclass(frozen=True)
class GridSpec:
    """Times t_o - k*step for integer offsets k_min <= k <= k_max (larger k = earlier)."""

    step: float
    k_min: int
    k_max: int

    def __post_init__(self) -> None:
        if not self.step > 0:
            raise ValueError("grid step must be positive")
        if not self.k_min < 0 < self.k_max:
            raise ValueError("grid needs k_min < 0 < k_max")

    def offsets(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    def times(self, t_o: float) -> np.ndarray:
        return t_o - self.offsets() * self.step

    def __len__(self) -> int:
        return self.k_max - self.k_min + 1


def choose_k_max(params: GameParams, step: float) -> int:
    """Earliest offset worth considering, plus two grid points of margin.

    Past K, the travel cost alone exceeds E1 + r for both agents, so any such
    arrival is strictly dominated whatever the opponent does.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    bound = params.e1 + params.r
    beta = max(params.beta1, params.beta2)
    k = max(1, math.floor(math.sqrt(bound * beta) / step))
    while (k * step) ** 2 / beta <= bound:
        k += 1
    while k > 1 and ((k - 1) * step) ** 2 / beta > bound:
        k -= 1
    return k + 2


@dataclass
class BestResponseTable:
    """Follower replies per leader grid time.

    Row i is leader offset ``leader_offsets[i]``. Columns hold candidate
    follower actions; ``best`` marks those attaining the row maximum of the
    follower's utility within ``eps_tie``. Unused candidate slots have
    ``u2 = -inf``.
    """

    params: GameParams
    grid: GridSpec
    leader_offsets: np.ndarray
    leader_times: np.ndarray
    cand_times: np.ndarray
    cand_before: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    best: np.ndarray
    eps_tie: float = EPS_TIE

    @property
    def best_u2(self) -> np.ndarray:
        return np.where(self.best, self.u2, -np.inf).max(axis=1)

    def row_index(self, t1: float) -> int:
        idx = np.flatnonzero(np.isclose(self.leader_times, t1, rtol=0, atol=self.grid.step * 1e-6))
        if idx.size == 0:
            raise KeyError(f"leader time {t1} is not on the grid")
        return int(idx[0])

    def responses(self, i: int) -> list[tuple[Action, float]]:
        cols = np.flatnonzero(self.best[i])
        acts = [
            (Action(float(self.cand_times[i, j]), bool(self.cand_before[i, j])), float(self.u2[i, j]))
            for j in cols
        ]
        return sorted(acts, key=lambda pair: pair[0].sort_key())

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t1", "br_times", "br_utility"])
        best_u2 = self.best_u2
        for i, t1 in enumerate(self.leader_times):
            times = ";".join(
                (f"{a.t:.12g}-" if a.just_before else f"{a.t:.12g}") for a, _ in self.responses(i)
            )
            writer.writerow([f"{t1:.12g}", times, f"{best_u2[i]:.12g}"])
        return buf.getvalue()


def _finish_table(
    params: GameParams,
    grid: GridSpec,
    cand_times: np.ndarray,
    cand_before: np.ndarray,
    valid: np.ndarray,
    eps_tie: float,
) -> BestResponseTable:
    offsets = grid.offsets()
    t1 = grid.times(params.t_o)
    u1, u2 = utility_arrays(t1[:, None], cand_times, params, cand_before)
    u2 = np.where(valid, u2, -np.inf)
    row_max = u2.max(axis=1, keepdims=True)
    best = valid & (u2 >= row_max - eps_tie)
    return BestResponseTable(params, grid, offsets, t1, cand_times, cand_before, u1, u2, best, eps_tie)


def _dense_table(
    params: GameParams, grid: GridSpec, augment: bool, eps_tie: float
) -> BestResponseTable:
    t = grid.times(params.t_o)
    n = t.size
    cand_times = np.broadcast_to(t[None, :], (n, n))
    cand_before = np.zeros((n, n), dtype=bool)
    if augment:
        cand_times = np.hstack([cand_times, t[:, None]])
        cand_before = np.hstack([cand_before, np.ones((n, 1), dtype=bool)])
    valid = np.ones(cand_times.shape, dtype=bool)
    return _finish_table(params, grid, np.ascontiguousarray(cand_times), cand_before, valid, eps_tie)


def _window_offsets(params: GameParams, step: float) -> int:
    """Largest offset difference still inside the flocking window."""
    if params.w == 0.0:
        return 0
    ratio = params.w / step
    return int(math.floor(ratio + 1e-9 * max(1.0, ratio)))


def _region_table(
    params: GameParams, grid: GridSpec, augment: bool, eps_tie: float
) -> BestResponseTable:
    # Follower offsets split into five intervals relative to the leader's
    # offset k1 (earlier-solo, earlier-flock, same time, later-flock,
    # later-solo). Benefit and risk are constant on each, and travel cost is
    # convex with its minimum at offset 0, so the grid point nearest offset 0
    # is that interval's maximiser.
    k1 = grid.offsets()
    big_w = _window_offsets(params, grid.step)
    bounds = [
        (k1 + big_w + 1, np.full_like(k1, grid.k_max)),
        (k1 + 1, k1 + big_w),
        (k1, k1),
        (k1 - big_w, k1 - 1),
        (np.full_like(k1, grid.k_min), k1 - big_w - 1),
    ]
    cols_t, cols_valid = [], []
    for lo, hi in bounds:
        lo = np.maximum(lo, grid.k_min)
        hi = np.minimum(hi, grid.k_max)
        cols_valid.append(lo <= hi)
        cols_t.append(params.t_o - np.clip(0, lo, np.maximum(lo, hi)) * grid.step)
    cand_times = np.stack(cols_t, axis=1)
    valid = np.stack(cols_valid, axis=1)
    cand_before = np.zeros(cand_times.shape, dtype=bool)
    if augment:
        t1 = grid.times(params.t_o)
        cand_times = np.hstack([cand_times, t1[:, None]])
        cand_before = np.hstack([cand_before, np.ones((k1.size, 1), dtype=bool)])
        valid = np.hstack([valid, np.ones((k1.size, 1), dtype=bool)])
    return _finish_table(params, grid, cand_times, cand_before, valid, eps_tie)


def build_best_response_table(
    params: GameParams,
    grid: GridSpec,
    augment: bool = False,
    method: str = "auto",
    eps_tie: float = EPS_TIE,
) -> BestResponseTable:
    """Follower argmax over the full grid for every leader grid time.

    ``augment`` adds the off-grid reply just-before-t1 to every row (continuous
    approximation). ``method`` is "dense" (explicit grid x grid scan),
    "region" (exact interval reduction, linear in grid size) or "auto".
    """
    if method == "auto":
        method = "dense" if len(grid) <= _DENSE_LIMIT else "region"
    if method == "dense":
        return _dense_table(params, grid, augment, eps_tie)
    if method == "region":
        return _region_table(params, grid, augment, eps_tie)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class OracleResult:
    outcomes: list[SpeOutcome]
    mode: Mode
    table: BestResponseTable
    maxmin_u1: float
    leader_value: float

    def to_dict(self) -> dict[str, Any]:
        res = SpeResult(self.outcomes, CaseLabel("ORACLE", "ORACLE"))
        d = res.to_dict()
        d["mode"] = self.mode.value
        d["maxmin_u1"] = self.maxmin_u1
        d["leader_value"] = self.leader_value
        d["grid"] = {"step": self.table.grid.step, "k_min": self.table.grid.k_min, "k_max": self.table.grid.k_max}
        return d


def _leader_favorable_columns(table: BestResponseTable) -> np.ndarray:
    """Column chosen in each row: best reply maximising u1, then the latest time."""
    eps = table.eps_tie
    u1 = np.where(table.best, table.u1, -np.inf)
    top = table.best & (u1 >= u1.max(axis=1, keepdims=True) - eps)
    t = np.where(top, table.cand_times, -np.inf)
    latest = top & (t == t.max(axis=1, keepdims=True))
    score = np.where(latest, np.where(table.cand_before, 0, 1), -1)
    return score.argmax(axis=1)


def enumerate_spe(
    params: GameParams,
    grid: GridSpec,
    mode: Mode | str = Mode.LEADER_FAVORABLE,
    augment: bool = False,
    table: BestResponseTable | None = None,
    eps_tie: float = EPS_TIE,
) -> OracleResult:
    """Pure SPE outcomes of the grid game by backward induction.

    LeaderFavorable: the follower breaks ties toward the leader (then the
    latest time) and the leader plays its argmax. AllSupportable: every
    (t1, t2) with t2 a best reply to t1 whose leader payoff reaches the
    max-min value obtainable when deviations are punished by the leader-worst
    best reply.
    """
    mode = Mode(mode)
    if table is None:
        table = build_best_response_table(params, grid, augment, eps_tie=eps_tie)
    eps = table.eps_tie
    rows = np.arange(table.leader_times.size)

    worst = np.where(table.best, table.u1, np.inf).min(axis=1)
    maxmin = float(worst.max())

    cols = _leader_favorable_columns(table)
    value = table.u1[rows, cols]
    leader_value = float(value.max())

    pairs: list[tuple[int, int]]
    if mode is Mode.LEADER_FAVORABLE:
        pairs = [(int(i), int(cols[i])) for i in np.flatnonzero(value >= leader_value - eps)]
    else:
        ii, jj = np.nonzero(table.best & (table.u1 >= maxmin - eps))
        pairs = list(zip(ii.tolist(), jj.tolist()))

    outcomes = []
    for i, j in pairs:
        a1 = Action.exact(float(table.leader_times[i]))
        a2 = Action(float(table.cand_times[i, j]), bool(table.cand_before[i, j]))
        outcomes.append(SpeOutcome.build(a1, a2, SpeType.GRID, params))
    outcomes = sorted(set(outcomes), key=SpeOutcome.sort_key)
    return OracleResult(outcomes, mode, table, maxmin, leader_value)


def unit_grid(params: GameParams, k_min: int = -2) -> GridSpec:
    return GridSpec(1.0, k_min, choose_k_max(params, 1.0))


def oracle_dt(
    params: GameParams, mode: Mode | str = Mode.LEADER_FAVORABLE, k_min: int = -2
) -> OracleResult:
    """Backward induction on the integer lattice around t_o."""
    return enumerate_spe(params, unit_grid(params, k_min), mode)


def oracle_ct_approx(
    params: GameParams,
    step: float = CT_DEFAULT_STEP,
    mode: Mode | str = Mode.LEADER_FAVORABLE,
    k_min: int = -2,
) -> OracleResult:
    """Fine-grid approximation of the continuous game with just-before replies."""
    if step > 1 / 16:
        raise ValueError("continuous approximation needs step <= 1/16")
    if params.w > 0:
        ratio = params.w / step
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise ValueError("step must divide the window width so t1 + w lies on the grid")
    grid = GridSpec(step, k_min, choose_k_max(params, step))
    table = build_best_response_table(params, grid, augment=True, method="region")
    return enumerate_spe(params, grid, mode, table=table)


def oracle_sfg_approx(
    params: GameParams,
    step: float = CT_DEFAULT_STEP,
    mode: Mode | str = Mode.LEADER_FAVORABLE,
    k_min: int = -2,
) -> OracleResult:
    """Continuous-approximation oracle of the strict-flocking game (w = 0)."""
    return oracle_ct_approx(replace(params, w=0.0), step, mode, k_min)


def late_arrivals(result: OracleResult, t_o: float) -> list[SpeOutcome]:
    """Outcomes with an arrival later than the optimal time."""
    return [o for o in result.outcomes if o.t1.t > t_o or o.t2.t > t_o]
