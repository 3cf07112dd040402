"""Two-agent flock-formation Stackelberg game: closed-form equilibria and a backward-induction oracle."""

from .analysis import compare_games, find_region_boundaries, sweep_delta_e
from .continuous import solve_ct
from .discrete import k_star, solve_dt
from .game import Action, GameParams, InvalidParamsError, utilities, utility
from .oracle import Mode, enumerate_spe, oracle_ct_approx, oracle_dt
from .results import SpeOutcome, SpeResult, SpeType
from .sfg import solve_sfg

__all__ = [
    "Action",
    "GameParams",
    "InvalidParamsError",
    "Mode",
    "SpeOutcome",
    "SpeResult",
    "SpeType",
    "compare_games",
    "enumerate_spe",
    "find_region_boundaries",
    "k_star",
    "oracle_ct_approx",
    "oracle_dt",
    "solve_ct",
    "solve_dt",
    "solve_sfg",
    "sweep_delta_e",
    "utilities",
    "utility",
]
