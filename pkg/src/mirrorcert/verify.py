"""Stand-alone checker for emitted certificates.

Uses only the game table and free-algebra arithmetic: it rebuilds the
admissible generator set itself, never calls the rewriting or search code,
and checks the witness identity by direct expansion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .algebra import NCPoly, PolySyntaxError, parse_poly, sym, word_str
from .game import Game


@dataclass
class VerifyResult:
    ok: bool
    reason: str

    def __bool__(self) -> bool:
        return self.ok


class _Reject(Exception):
    pass


def _fraction(s: Any) -> Fraction:
    if not isinstance(s, str):
        raise _Reject(f"rational must be a 'p/q' string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise _Reject(f"bad rational {s!r}") from exc


def _word(s: Any) -> str:
    if not isinstance(s, str):
        raise _Reject(f"word must be a string, got {s!r}")
    try:
        p = parse_poly(s)
    except PolySyntaxError as exc:
        raise _Reject(f"bad word {s!r}: {exc}") from exc
    if len(p) != 1 or p.leading_coeff != 1:
        raise _Reject(f"not a monomial word: {s!r}")
    return p.leading_word


def _admissible_generators(g: Game, xi, eta, side: int) -> set[NCPoly]:
    """Every polynomial allowed as a generator of the side's mirror ideal."""
    gens: set[NCPoly] = set()
    if side == 1:
        nq, na = g.nx, g.na
    else:
        nq, na = g.ny, g.nb
    for q in range(nq):
        for a in range(na):
            e = NCPoly.monomial(sym(side, q, a))
            gens.add(e * e - e)
            for a2 in range(na):
                if a2 != a:
                    gens.add(e * NCPoly.monomial(sym(side, q, a2)))
        total = NCPoly.constant(-1)
        for a in range(na):
            total = total + NCPoly.monomial(sym(side, q, a))
        gens.add(total)
    for x in range(g.nx):
        for y in range(g.ny):
            for a in range(g.na):
                for b in range(g.nb):
                    if g.table[x][y][a][b]:
                        continue
                    if side == 1:
                        e = NCPoly.monomial(sym(1, x, a))
                        mirrored = NCPoly({sym(1, eta[y], a2): 1 for a2 in range(g.na)
                                           if g.table[eta[y]][y][a2][b]})
                    else:
                        e = NCPoly.monomial(sym(2, y, b))
                        mirrored = NCPoly({sym(2, xi[x], b2): 1 for b2 in range(g.nb)
                                           if g.table[x][xi[x]][a][b2]})
                    gens.add(e * mirrored)
                    gens.add(mirrored * e)
    gens.discard(NCPoly())
    return gens


def _check_maps(g: Game, xi, eta) -> None:
    if not (isinstance(xi, list) and isinstance(eta, list)):
        raise _Reject("mirror maps missing")
    if len(xi) != g.nx or len(eta) != g.ny:
        raise _Reject("mirror maps have wrong length")
    if any(not isinstance(v, int) or not 0 <= v < g.ny for v in xi):
        raise _Reject("xi out of range")
    if any(not isinstance(v, int) or not 0 <= v < g.nx for v in eta):
        raise _Reject("eta out of range")
    for x in range(g.nx):
        y = xi[x]
        for b in range(g.nb):
            winners = [a for a in range(g.na) if g.table[x][y][a][b]]
            if len(winners) > 1:
                raise _Reject(f"xi({x}) = {y} violates the mirror condition")
            if not winners:
                raise _Reject(f"xi({x}) = {y} is not regular")
    for y in range(g.ny):
        x = eta[y]
        for a in range(g.na):
            winners = [b for b in range(g.nb) if g.table[x][y][a][b]]
            if len(winners) > 1:
                raise _Reject(f"eta({y}) = {x} violates the mirror condition")
            if not winners:
                raise _Reject(f"eta({y}) = {x} is not regular")


def verify_certificate(g: Game, cert: dict[str, Any]) -> VerifyResult:
    try:
        _verify(g, cert)
    except _Reject as exc:
        return VerifyResult(False, str(exc))
    except (KeyError, TypeError, ValueError) as exc:
        return VerifyResult(False, f"malformed certificate: {exc!r}")
    return VerifyResult(True, "witness identity holds exactly")


def _verify(g: Game, cert: dict[str, Any]) -> None:
    if cert.get("verdict") != "no-perfect-strategy":
        raise _Reject(f"certificate verdict is {cert.get('verdict')!r}; nothing to verify")
    if cert.get("game_sha256") != g.digest():
        raise _Reject("game hash mismatch")
    side = cert.get("side")
    if side not in (1, 2):
        raise _Reject(f"bad side {side!r}")
    maps = cert.get("mirror_maps") or {}
    xi, eta = maps.get("xi"), maps.get("eta")
    _check_maps(g, xi, eta)
    w = cert.get("witness")
    if not isinstance(w, dict):
        raise _Reject("no witness")

    allowed = _admissible_generators(g, xi, eta, side)
    gens = []
    for k, entry in enumerate(w["generators"]):
        p = parse_poly(entry["poly"])
        if p not in allowed:
            raise _Reject(f"generator {k} ({entry['poly']}) is not in the mirror ideal's generating set")
        gens.append(p)

    lhs = NCPoly.constant(1)
    for entry in w["sos"]:
        weight = _fraction(entry["weight"])
        if weight <= 0:
            raise _Reject("sum-of-squares weights must be positive")
        s = parse_poly(entry["poly"])
        lhs = lhs + weight * (s.star() * s)

    acc: dict[str, Fraction] = {}
    for entry in w["combination"]:
        c = _fraction(entry["coeff"])
        i = entry["generator"]
        if not isinstance(i, int) or not 0 <= i < len(gens):
            raise _Reject(f"generator index {i!r} out of range")
        left, right = _word(entry["left"]), _word(entry["right"])
        for word, v in gens[i].items():
            key = left + word + right
            acc[key] = acc.get(key, 0) + c * v
    rhs = NCPoly(acc)
    if lhs != rhs:
        diff = lhs - rhs
        raise _Reject(f"witness identity fails; difference has {len(diff)} terms, e.g. {word_str(diff.leading_word)}")


def verify_files(game_path, cert_path) -> VerifyResult:
    from .game import load_game

    g = load_game(game_path)
    with open(cert_path) as fh:
        try:
            cert = json.load(fh)
        except json.JSONDecodeError as exc:
            return VerifyResult(False, f"certificate is not valid JSON: {exc}")
    return verify_certificate(g, cert)
