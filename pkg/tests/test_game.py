import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mirrorcert.algebra import NCPoly, sym
from mirrorcert.game import (
    BudgetExceededError,
    Game,
    GameValidationError,
    build_game_polynomial,
    check_regularity,
    classical_value,
    find_mirror_maps,
    is_mirror_structure,
    iter_mirror_maps,
    load_game,
    parse_game,
    validate_game,
)


def brute_force_value(g: Game) -> Fraction:
    """Every (Alice, Bob) deterministic strategy pair, no shortcuts."""
    best = 0
    for alice in itertools.product(range(g.na), repeat=g.nx):
        for bob in itertools.product(range(g.nb), repeat=g.ny):
            wins = sum(g.table[x][y][alice[x]][bob[y]] for x in range(g.nx) for y in range(g.ny))
            best = max(best, wins)
    return Fraction(best, g.nx * g.ny)


@st.composite
def games(draw, max_dim=3):
    nx, ny, na, nb = (draw(st.integers(1, max_dim)) for _ in range(4))
    bits = draw(st.lists(st.integers(0, 1), min_size=nx * ny * na * nb, max_size=nx * ny * na * nb))
    it = iter(bits)
    table = [[[[next(it) for _ in range(nb)] for _ in range(na)] for _ in range(ny)] for _ in range(nx)]
    return validate_game({"nx": nx, "ny": ny, "na": na, "nb": nb, "lambda": table})


class TestValidate:
    def test_example1_dimensions(self, example1):
        assert (example1.nx, example1.ny, example1.na, example1.nb) == (2, 2, 2, 2)

    def test_empty_answer_set(self):
        with pytest.raises(GameValidationError, match="na"):
            validate_game({"nx": 1, "ny": 1, "na": 0, "nb": 1, "lambda": [[[]]]})

    def test_non_boolean_entry(self):
        with pytest.raises(GameValidationError, match=r"lambda\[0\]\[0\]\[0\]\[0\]"):
            validate_game({"nx": 1, "ny": 1, "na": 1, "nb": 1, "lambda": [[[[2]]]]})

    def test_dimension_mismatch(self):
        with pytest.raises(GameValidationError, match="expected length 2"):
            validate_game({"nx": 2, "ny": 1, "na": 1, "nb": 1, "lambda": [[[[1]]]]})

    def test_non_uniform_distribution_rejected(self):
        with pytest.raises(GameValidationError, match="uniform"):
            validate_game({"nx": 1, "ny": 1, "na": 1, "nb": 1, "lambda": [[[[1]]]], "distribution": [[1]]})

    def test_bad_json_reports_position(self):
        with pytest.raises(GameValidationError, match="line 1"):
            parse_game('{"nx": 1,')

    def test_round_trip_is_identity(self, example1):
        text = example1.to_json()
        again = parse_game(text)
        assert again == example1
        assert again.to_json() == text

    def test_fixture_files_match(self, games_dir, example1):
        assert load_game(games_dir / "example1.json") == example1


class TestMirror:
    def test_example1_maps(self, example1):
        m = find_mirror_maps(example1)
        assert m.xi == (0, 0)
        assert m.eta == (0, 1)
        assert m.regular

    def test_example1_has_a_second_non_regular_choice(self, example1):
        # eta(1) = 0 also satisfies the mirror condition but breaks regularity
        found = {(m.xi, m.eta): m.regular for m in iter_mirror_maps(example1)}
        assert found[((0, 0), (0, 1))] is True
        assert found[((0, 0), (0, 0))] is False

    def test_zero_game(self, zero_game):
        m = find_mirror_maps(zero_game)
        assert m is not None and m.xi == (0, 0) and m.eta == (0, 0)
        assert not m.regular
        assert not check_regularity(zero_game, m)

    def test_single_answer_always_win(self, always_win):
        m = find_mirror_maps(always_win)
        assert m.xi == (0,) and m.eta == (0,) and m.regular

    def test_not_a_mirror_game(self):
        # on every question pair some b is won by both answers of Alice
        g = Game.from_function(1, 1, 2, 2, lambda x, y, a, b: 1)
        assert find_mirror_maps(g) is None

    @settings(max_examples=200, deadline=None)
    @given(games())
    def test_returned_maps_satisfy_conditions(self, g):
        m = find_mirror_maps(g)
        if m is None:
            return
        for x in range(g.nx):
            for a, a2, b in itertools.product(range(g.na), range(g.na), range(g.nb)):
                if a != a2:
                    assert g.table[x][m.xi[x]][a][b] * g.table[x][m.xi[x]][a2][b] == 0
        for y in range(g.ny):
            for a, b, b2 in itertools.product(range(g.na), range(g.nb), range(g.nb)):
                if b != b2:
                    assert g.table[m.eta[y]][y][a][b] * g.table[m.eta[y]][y][a][b2] == 0

    @settings(max_examples=100, deadline=None)
    @given(games())
    def test_regular_choice_preferred(self, g):
        m = find_mirror_maps(g)
        if m is None:
            return
        assert m.regular == any(s.regular for s in iter_mirror_maps(g))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.randoms(use_true_random=False))
    def test_synchronous_games_admit_identity(self, n, k, rnd):
        bits = {(x, y, a, b): (a == b or x != y) and rnd.random() < 0.7
                for x in range(n) for y in range(n) for a in range(k) for b in range(k)}
        g = Game.from_function(n, n, k, k, lambda *t: bits[t])
        ident = tuple(range(n))
        assert is_mirror_structure(g, ident, ident)
        assert any(m.xi == ident and m.eta == ident for m in iter_mirror_maps(g))


class TestClassicalValue:
    def test_example1(self, example1):
        assert brute_force_value(example1) == Fraction(3, 4)
        assert classical_value(example1) == Fraction(3, 4)

    def test_always_win(self):
        g = Game.from_function(2, 3, 2, 2, lambda *t: 1)
        assert classical_value(g) == 1

    def test_chsh(self, chsh):
        assert brute_force_value(chsh) == Fraction(3, 4)
        assert classical_value(chsh) == Fraction(3, 4)

    def test_budget(self):
        g = Game.from_function(3, 3, 3, 3, lambda *t: 0)
        with pytest.raises(BudgetExceededError):
            classical_value(g, budget=100)

    @settings(max_examples=150, deadline=None)
    @given(games())
    def test_matches_pair_enumeration(self, g):
        assert classical_value(g) == brute_force_value(g)

    @settings(max_examples=100, deadline=None)
    @given(games(), st.randoms(use_true_random=False))
    def test_invariant_under_answer_relabeling(self, g, rnd):
        pa = list(range(g.na))
        pb = list(range(g.nb))
        rnd.shuffle(pa)
        rnd.shuffle(pb)
        h = Game.from_function(g.nx, g.ny, g.na, g.nb, lambda x, y, a, b: g.table[x][y][pa[a]][pb[b]])
        assert classical_value(h) == classical_value(g)

    @settings(max_examples=100, deadline=None)
    @given(games())
    def test_value_one_iff_perfect_deterministic(self, g):
        perfect = any(
            all(g.table[x][y][al[x]][bo[y]] for x in range(g.nx) for y in range(g.ny))
            for al in itertools.product(range(g.na), repeat=g.nx)
            for bo in itertools.product(range(g.nb), repeat=g.ny)
        )
        assert (classical_value(g) == 1) == perfect


class TestGamePolynomial:
    def test_zero_game(self, zero_game):
        assert build_game_polynomial(zero_game).is_zero()

    def test_single_term(self, always_win):
        assert build_game_polynomial(always_win) == NCPoly.monomial(sym(1, 0, 0) + sym(2, 0, 0))

    def test_example1(self, example1):
        p = build_game_polynomial(example1)
        # the printed table has seven winning entries
        assert len(p) == 7
        assert set(p.terms.values()) == {Fraction(1, 4)}
        assert all(len(w) == 2 for w in p.terms)
