"""Territory-gap sweeps, region boundaries of the discrete game, and cross-game comparison."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable

from scipy.optimize import brentq

from .continuous import solve_ct
from .discrete import _gate_open, k_star, k_star_bound, solve_dt
from .game import GameParams
from .results import FlockKind, SpeResult, SpeType
from .sfg import solve_sfg

SWEEP_COLUMNS = (
    "delta_e",
    "case_ct",
    "case_dt",
    "case_sfg",
    "ct_t1",
    "ct_t2",
    "dt_t1",
    "dt_t2",
    "sfg_t1",
    "sfg_t2",
    "dt_flock",
    "ct_exists",
)


@dataclass
class RegionRow:
    delta_e: float
    spe_ct: SpeResult
    spe_dt: SpeResult
    spe_sfg: SpeResult

    @property
    def case_ct(self) -> str:
        return self.spe_ct.case.path

    @property
    def case_dt(self) -> str:
        return self.spe_dt.case.path

    @property
    def case_sfg(self) -> str:
        return self.spe_sfg.case.path

    def csv_row(self) -> list[str]:
        def times(res: SpeResult, which: str) -> str:
            return ";".join(f"{getattr(o, which).t:.12g}" for o in res.outcomes)

        return [
            f"{self.delta_e:.12g}",
            self.case_ct,
            self.case_dt,
            self.case_sfg,
            times(self.spe_ct, "t1"),
            times(self.spe_ct, "t2"),
            times(self.spe_dt, "t1"),
            times(self.spe_dt, "t2"),
            times(self.spe_sfg, "t1"),
            times(self.spe_sfg, "t2"),
            ";".join(o.flock.value for o in self.spe_dt.outcomes),
            "true" if self.spe_ct.exists else "false",
        ]


def gap_grid(lo: float, hi: float, step: float) -> list[float]:
    """lo, lo + step, ... up to and including hi (within rounding)."""
    if not (0 < lo < hi):
        raise ValueError("sweep range needs 0 < lo < hi")
    if not step > 0:
        raise ValueError("sweep step must be positive")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(n)]


def solve_row(base: GameParams, delta_e: float) -> RegionRow:
    p = base.with_gap(delta_e)
    return RegionRow(delta_e, solve_ct(p), solve_dt(p), solve_sfg(p))


def sweep_delta_e(base: GameParams, lo: float, hi: float, step: float) -> list[RegionRow]:
    base.require_unit_window()
    return [solve_row(base, d) for d in gap_grid(lo, hi, step)]


def sweep_csv(rows: Iterable[RegionRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in sorted(rows, key=lambda r: r.delta_e):
        writer.writerow(row.csv_row())
    return buf.getvalue()


# -- region boundaries of the discrete game ---------------------------------


@dataclass
class BoundarySet:
    """Territory gaps where the discrete equilibrium type changes.

    ``a`` holds the changes up to and including the gate (where k* first
    exceeds the flock-versus-withdraw threshold), ``b`` the changes beyond it.
    """

    gate: float | None
    a: list[float]
    b: list[float]
    tol: float
    regions: list[tuple[float, float, tuple[str, ...]]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "gate": self.gate,
            "a": list(self.a),
            "b": list(self.b),
            "tol": self.tol,
            "regions": [{"lo": lo, "hi": hi, "types": list(ts)} for lo, hi, ts in self.regions],
        }


def dt_types(base: GameParams, delta_e: float, gate: str = "resolved") -> tuple[str, ...]:
    return tuple(sorted(o.type_tag.value for o in solve_dt(base.with_gap(delta_e), gate=gate).outcomes))


def _root(f, lo: float, hi: float, tol: float) -> float:
    return float(brentq(f, lo, hi, xtol=tol, rtol=4 * 2.220446049250313e-16, maxiter=500))


def _k_jumps(base: GameParams, lo: float, hi: float, tol: float) -> list[float]:
    """Gaps in (lo, hi) at which the deterrence offset k* steps up."""
    def bound(d: float) -> float:
        return k_star_bound(base.with_gap(d))

    jumps = []
    for n in range(math.floor(bound(lo)) + 1, math.ceil(bound(hi))):
        jumps.append(_root(lambda d: bound(d) - n, lo, hi, tol))
    return jumps


def find_region_boundaries(
    base: GameParams, lo: float, hi: float, tol: float = 1e-9, gate: str = "resolved"
) -> BoundarySet:
    """Boundaries between discrete SPE types for territory gaps in (lo, hi).

    k* is a step function of the gap while the comparators sqrt(gap*beta1)
    and sqrt((gap - r/2)*beta1) increase continuously. Each constant piece of
    k* is bisected against the comparator that governs it, and every jump of
    k* is a candidate as well; a candidate is kept when the equilibrium type
    differs just left and right of it.
    """
    base.require_unit_window()
    if not tol > 0:
        raise ValueError("tol must be positive")
    lo = max(lo, 4 / base.beta2)
    if not lo < hi:
        return BoundarySet(None, [], [], tol)

    r, b1 = base.r, base.beta1
    jumps = _k_jumps(base, lo, hi, tol)
    edges = [lo, *jumps, hi]

    gate_at: float | None = None
    candidates: list[float] = list(jumps)
    prev_open: bool | None = None
    for left, right in zip(edges, edges[1:]):
        k = k_star(base.with_gap(0.5 * (left + right)))
        flock_side = _gate_open(k, base, gate, 1e-9)
        if prev_open and not flock_side and gate_at is None:
            gate_at = left
        prev_open = flock_side
        if flock_side:
            def comp(d: float) -> float:
                return math.sqrt(d * b1) - k
        else:
            def comp(d: float) -> float:
                return math.sqrt(max(0.0, (d - r / 2) * b1)) - k
        if comp(left) * comp(right) < 0:
            candidates.append(_root(comp, left, right, tol))

    candidates.sort()
    kept: list[float] = []
    for i, p in enumerate(candidates):
        gap_left = p - (candidates[i - 1] if i > 0 else lo)
        gap_right = (candidates[i + 1] if i + 1 < len(candidates) else hi) - p
        delta = min(1e-6 * max(1.0, p), 0.25 * gap_left, 0.25 * gap_right)
        delta = max(delta, 10 * tol)
        if dt_types(base, p - delta, gate) != dt_types(base, p + delta, gate):
            kept.append(p)

    if gate_at is None:
        # Range starts beyond the gate (or never reaches it).
        first_k = k_star(base.with_gap(0.5 * (edges[0] + edges[1])))
        before_gate = _gate_open(first_k, base, gate, 1e-9)
        a = kept if before_gate else []
        b = [] if before_gate else kept
    else:
        a = [p for p in kept if p <= gate_at + tol]
        b = [p for p in kept if p > gate_at + tol]

    cuts = [lo, *kept, hi]
    regions = [(x, y, dt_types(base, 0.5 * (x + y), gate)) for x, y in zip(cuts, cuts[1:])]
    return BoundarySet(gate_at, a, b, tol, regions)


# -- cross-game comparison ---------------------------------------------------


@dataclass
class GameSummary:
    game: str
    existence: bool
    uniqueness: bool
    n_types: int
    strict_flock: bool
    leader_first: bool
    types: tuple[str, ...] = ()

    def row(self) -> dict[str, Any]:
        return {
            "game": self.game,
            "existence": "yes" if self.existence else "no",
            "uniqueness": "yes" if self.uniqueness else "no",
            "n_types": self.n_types,
            "strict_flock": "possible" if self.strict_flock else "never",
            "t1_le_t2": "yes" if self.leader_first else "no",
            "types": list(self.types),
        }


def summarize(game: str, results: Iterable[SpeResult]) -> GameSummary:
    results = list(results)
    types: set[SpeType] = set()
    for res in results:
        types |= res.types
    outcomes = [o for res in results for o in res.outcomes]
    return GameSummary(
        game=game,
        existence=all(res.exists for res in results),
        uniqueness=all(len(res.outcomes) <= 1 for res in results),
        n_types=len(types),
        strict_flock=any(o.flock is FlockKind.STRICT_FLOCK for o in outcomes),
        leader_first=all(o.t1.sort_key() <= o.t2.sort_key() for o in outcomes),
        types=tuple(sorted(t.value for t in types)),
    )


def notable_gaps(base: GameParams, lo: float, hi: float) -> list[float]:
    """Branch-boundary gaps where multi-outcome equilibria can appear.

    A uniform sample never lands exactly on these measure-zero sets, so they
    are added to the comparison sample explicitly.
    """
    gaps = []
    b1, b2, r = base.beta1, base.beta2, base.r
    boundary_ct = (math.sqrt(2 * r * b2) + 1) / b2
    gaps.append(boundary_ct)
    if hi > 4 / b2:
        bset = find_region_boundaries(base, max(lo, 4 / b2), hi, 1e-12)
        gaps.extend(bset.a + bset.b)
    # Exact DT-3.x.c points: k* equal to the governing comparator.
    k_hi = k_star(base.with_gap(hi)) if hi > 4 / b2 else 0
    for k in range(2, k_hi + 1):
        gaps.extend([k * k / b1, k * k / b1 + r / 2])
    return sorted(g for g in gaps if lo <= g <= hi)


def compare_games(
    base: GameParams,
    sample_gaps: Iterable[float],
    beta1_values: Iterable[float] | None = None,
    include_boundaries: bool = True,
) -> list[GameSummary]:
    """Qualitative comparison of the strict-flocking, continuous and discrete games.

    Each game's row aggregates every sampled gap for every leader strength in
    ``beta1_values`` (default: just ``base.beta1``). With
    ``include_boundaries`` the measure-zero branch boundaries inside the
    sampled range are added for each strength.
    """
    base.require_unit_window()
    gaps = sorted(set(sample_gaps))
    if not gaps:
        raise ValueError("need at least one sample gap")
    strengths = [base.beta1] if beta1_values is None else list(beta1_values)
    rows: list[RegionRow] = []
    for b1 in strengths:
        b = replace(base, beta1=b1)
        extra = notable_gaps(b, gaps[0], gaps[-1]) if include_boundaries else []
        rows.extend(solve_row(b, d) for d in sorted(set(gaps) | set(extra)))
    return [
        summarize("SFG", (row.spe_sfg for row in rows)),
        summarize("continuous-time", (row.spe_ct for row in rows)),
        summarize("discrete-time", (row.spe_dt for row in rows)),
    ]


def log_gaps(lo: float = 0.01, hi: float = 100.0, n: int = 4000) -> list[float]:
    ratio = math.log(hi / lo)
    return [lo * math.exp(ratio * i / (n - 1)) for i in range(n)]
