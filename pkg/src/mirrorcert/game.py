"""Finite nonlocal games with a uniform question distribution."""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, Optional

from .algebra import NCPoly, sym

DEFAULT_ENUMERATION_BUDGET = 10**7


class GameValidationError(ValueError):
    """Raised for malformed game descriptions; ``field`` locates the problem."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class BudgetExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class Game:
    nx: int
    ny: int
    na: int
    nb: int
    # table[x][y][a][b] in {0, 1}
    table: tuple

    def win(self, x: int, y: int, a: int, b: int) -> bool:
        return bool(self.table[x][y][a][b])

    @property
    def distribution(self) -> Fraction:
        """Probability of every question pair (uniform)."""
        return Fraction(1, self.nx * self.ny)

    def entries(self) -> Iterator[tuple[int, int, int, int, int]]:
        for x, y, a, b in itertools.product(range(self.nx), range(self.ny), range(self.na), range(self.nb)):
            yield x, y, a, b, self.table[x][y][a][b]

    def to_dict(self) -> dict[str, Any]:
        return {
            "nx": self.nx,
            "ny": self.ny,
            "na": self.na,
            "nb": self.nb,
            "lambda": [[[list(row) for row in ya] for ya in xy] for xy in self.table],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def digest(self) -> str:
        """SHA-256 of the canonical serialization; binds certificates to games."""
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    @classmethod
    def from_function(cls, nx: int, ny: int, na: int, nb: int, rule) -> "Game":
        table = [[[[1 if rule(x, y, a, b) else 0 for b in range(nb)] for a in range(na)]
                  for y in range(ny)] for x in range(nx)]
        return validate_game({"nx": nx, "ny": ny, "na": na, "nb": nb, "lambda": table})


@dataclass(frozen=True)
class MirrorStructure:
    xi: tuple[int, ...]
    eta: tuple[int, ...]
    regular: bool

    def to_dict(self) -> dict[str, Any]:
        return {"xi": list(self.xi), "eta": list(self.eta), "regular": self.regular}


def validate_game(raw: dict[str, Any]) -> Game:
    if not isinstance(raw, dict):
        raise GameValidationError("game description must be an object")
    dims = {}
    for key in ("nx", "ny", "na", "nb"):
        if key not in raw:
            raise GameValidationError("missing dimension", key)
        v = raw[key]
        if isinstance(v, bool) or not isinstance(v, int):
            raise GameValidationError(f"expected an integer, got {v!r}", key)
        if v < 1:
            raise GameValidationError(f"must be at least 1, got {v}", key)
        dims[key] = v
    dist = raw.get("distribution", "uniform")
    if dist != "uniform":
        raise GameValidationError("only the uniform distribution is supported", "distribution")
    unknown = set(raw) - {"nx", "ny", "na", "nb", "lambda", "distribution"}
    if unknown:
        raise GameValidationError(f"unknown fields {sorted(unknown)}")
    if "lambda" not in raw:
        raise GameValidationError("missing scoring table", "lambda")

    shape = (dims["nx"], dims["ny"], dims["na"], dims["nb"])

    def build(node: Any, depth: int, path: str):
        if depth == 4:
            if node is True or node == 1 and not isinstance(node, float):
                return 1
            if node is False or node == 0 and not isinstance(node, float):
                return 0
            raise GameValidationError(f"expected 0 or 1, got {node!r}", path)
        if not isinstance(node, list):
            raise GameValidationError("expected a list", path)
        if len(node) != shape[depth]:
            raise GameValidationError(f"expected length {shape[depth]}, got {len(node)}", path)
        return tuple(build(child, depth + 1, f"{path}[{i}]") for i, child in enumerate(node))

    table = build(raw["lambda"], 0, "lambda")
    return Game(*shape, table)


def parse_game(text: str) -> Game:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameValidationError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return validate_game(raw)


def load_game(path) -> Game:
    with open(path) as fh:
        return parse_game(fh.read())


# --- mirror structure -----------------------------------------------------

def _alice_mirror_ok(g: Game, x: int, y: int) -> bool:
    # for each b at most one a wins on (x, y)
    return all(sum(g.table[x][y][a][b] for a in range(g.na)) <= 1 for b in range(g.nb))


def _bob_mirror_ok(g: Game, x: int, y: int) -> bool:
    return all(sum(g.table[x][y][a]) <= 1 for a in range(g.na))


def _alice_covers(g: Game, x: int, y: int) -> bool:
    return all(any(g.table[x][y][a][b] for a in range(g.na)) for b in range(g.nb))


def _bob_covers(g: Game, x: int, y: int) -> bool:
    return all(any(g.table[x][y][a]) for a in range(g.na))


def mirror_candidates(g: Game) -> tuple[list[list[int]], list[list[int]]]:
    """Valid choices for each xi(x) and each eta(y), in preference order.

    Candidates that also satisfy the covering (regularity) condition come
    first; ties are broken by smallest index.
    """
    xi_c = []
    for x in range(g.nx):
        ok = [y for y in range(g.ny) if _alice_mirror_ok(g, x, y)]
        xi_c.append(sorted(ok, key=lambda y: (not _alice_covers(g, x, y), y)))
    eta_c = []
    for y in range(g.ny):
        ok = [x for x in range(g.nx) if _bob_mirror_ok(g, x, y)]
        eta_c.append(sorted(ok, key=lambda x: (not _bob_covers(g, x, y), x)))
    return xi_c, eta_c


def find_mirror_maps(g: Game) -> Optional[MirrorStructure]:
    xi_c, eta_c = mirror_candidates(g)
    if any(not c for c in xi_c) or any(not c for c in eta_c):
        return None
    xi = tuple(c[0] for c in xi_c)
    eta = tuple(c[0] for c in eta_c)
    return MirrorStructure(xi, eta, _regular(g, xi, eta))


def iter_mirror_maps(g: Game) -> Iterator[MirrorStructure]:
    """Every valid (xi, eta) pair, preferred choices first."""
    xi_c, eta_c = mirror_candidates(g)
    for xi in itertools.product(*xi_c):
        for eta in itertools.product(*eta_c):
            yield MirrorStructure(tuple(xi), tuple(eta), _regular(g, xi, eta))


def is_mirror_structure(g: Game, xi, eta) -> bool:
    if len(xi) != g.nx or len(eta) != g.ny:
        return False
    if any(not 0 <= y < g.ny for y in xi) or any(not 0 <= x < g.nx for x in eta):
        return False
    return (all(_alice_mirror_ok(g, x, xi[x]) for x in range(g.nx))
            and all(_bob_mirror_ok(g, eta[y], y) for y in range(g.ny)))


def _regular(g: Game, xi, eta) -> bool:
    return (all(_alice_covers(g, x, xi[x]) for x in range(g.nx))
            and all(_bob_covers(g, eta[y], y) for y in range(g.ny)))


def check_regularity(g: Game, m: MirrorStructure) -> bool:
    return _regular(g, m.xi, m.eta)


# --- values and the game polynomial ---------------------------------------

def classical_value(g: Game, budget: int = DEFAULT_ENUMERATION_BUDGET) -> Fraction:
    """Exact classical value by enumerating deterministic strategies.

    Bob's payoff is separable over his questions, so for each Alice strategy
    the best Bob strategy is assembled question by question; the maximum is
    the same as over all strategy pairs.
    """
    size = g.na ** g.nx * g.nb ** g.ny
    if size > budget:
        raise BudgetExceededError(f"{size} strategy pairs exceed the enumeration budget {budget}")
    best = 0
    full = g.nx * g.ny
    for alice in itertools.product(range(g.na), repeat=g.nx):
        wins = 0
        for y in range(g.ny):
            wins += max(sum(g.table[x][y][alice[x]][b] for x in range(g.nx)) for b in range(g.nb))
        if wins > best:
            best = wins
            if best == full:
                break
    return Fraction(best, full)


def has_perfect_classical_strategy(g: Game, budget: int = DEFAULT_ENUMERATION_BUDGET) -> bool:
    return classical_value(g, budget) == 1


def build_game_polynomial(g: Game) -> NCPoly:
    w = g.distribution
    return NCPoly({sym(1, x, a) + sym(2, y, b): w for x, y, a, b, v in g.entries() if v})
