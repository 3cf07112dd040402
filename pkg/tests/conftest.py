from __future__ import annotations

from flockgame.game import GameParams


def make_params(delta_e: float, beta1: float = 4.5, beta2: float = 4.0, r: float = 2.0, **kw) -> GameParams:
    """Reference parameters: e2 = 3, t_o = 10, unit window."""
    return GameParams(beta1=beta1, beta2=beta2, e1=3.0 + delta_e, e2=3.0, r=r, t_o=10.0, **kw)


# Acceptance criteria report their verdicts here; printed once at the end of the run.
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[number] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'} - {detail}")
