from __future__ import annotations

import sys
from pathlib import Path

import pytest

from mirrorcert.game import Game, validate_game

HERE = Path(__file__).parent
GAMES = HERE.parent / "games"
sys.path.insert(0, str(HERE))

# Example table as printed: rows are answer pairs (a,b), columns question pairs (x,y).
PRINTED_COLUMNS = {
    (0, 0): (1, 0, 0, 1),
    (0, 1): (0, 0, 1, 0),
    (1, 0): (1, 1, 0, 0),
    (1, 1): (0, 1, 0, 1),
}
ANSWER_ROWS = [(0, 0), (0, 1), (1, 0), (1, 1)]


def example1_table():
    lam = [[[[0, 0], [0, 0]] for _ in range(2)] for _ in range(2)]
    for (x, y), col in PRINTED_COLUMNS.items():
        for (a, b), v in zip(ANSWER_ROWS, col):
            lam[x][y][a][b] = v
    return lam


@pytest.fixture
def example1() -> Game:
    return validate_game({"nx": 2, "ny": 2, "na": 2, "nb": 2, "lambda": example1_table()})


@pytest.fixture
def zero_game() -> Game:
    return Game.from_function(2, 2, 2, 2, lambda x, y, a, b: 0)


@pytest.fixture
def always_win() -> Game:
    return Game.from_function(1, 1, 1, 1, lambda x, y, a, b: 1)


@pytest.fixture
def chsh() -> Game:
    return Game.from_function(2, 2, 2, 2, lambda x, y, a, b: (a ^ b) == (x & y))


@pytest.fixture
def games_dir() -> Path:
    return GAMES


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
