"""Certificates that a regular mirror game has no perfect commuting strategy.

Two routes produce the same kind of witness, an exact identity

    1 + sum_k  w_k * s_k^* s_k  ==  sum_t  c_t * left_t * gen_t * right_t

with positive rational weights ``w_k`` and generators ``gen_t`` of the
star-closed mirror ideal.  The Groebner route has an empty sum of squares; the
SOS route finds a Gram matrix numerically and rounds it to rationals.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

import numpy as np

from .algebra import NCPoly, Word, deglex_key, format_fraction, format_poly, word_star, word_str
from .exact_linalg import ldl_psd, solve_consistent
from .game import Game, MirrorStructure, find_mirror_maps
from .ideal import (
    GeneratorSet,
    NotMirrorError,
    NotRegularError,
    RewriteSystem,
    Trace,
    build_mirror_ideal_generators,
    complete,
    default_degree_bound,
    family_alphabet,
    reduce,
    reduce_with_trace,
)
from .sdp import DEFAULT_ITER_CAP, DEFAULT_TOL, SDPStatus, sdp_feasibility

log = logging.getLogger(__name__)

DEFAULT_BASIS_CAP = 2000
DEFAULT_DENOMINATOR_BOUND = 10**8
CERTIFICATE_FORMAT = "mirrorcert-certificate/1"

NO_PERFECT = "no-perfect-strategy"
UNKNOWN = "unknown"


class BasisTooLargeError(RuntimeError):
    pass


class DegenerateSystemError(ValueError):
    """The rewrite system already contains 1; there is nothing to search."""


@dataclass(frozen=True)
class MonomialBasis:
    words: tuple[Word, ...]

    def __len__(self) -> int:
        return len(self.words)

    def __str__(self) -> str:
        return "[" + ", ".join(word_str(w) for w in self.words) + "]"


def enumerate_basis(rs: RewriteSystem, d: int, alphabet: Optional[Sequence[str]] = None,
                    cap: int = DEFAULT_BASIS_CAP) -> MonomialBasis:
    """All irreducible words of degree <= d, deglex ascending."""
    if rs.contains_one:
        raise DegenerateSystemError("rewrite system contains 1")
    if rs.homogenized:
        raise ValueError("the Gram basis needs an inhomogeneous rewrite system")
    letters = sorted(alphabet if alphabet is not None else rs.alphabet)
    leads = rs.leads
    level = [""] if not rs.is_reducible("") else []
    out = list(level)
    for _ in range(d):
        nxt = []
        for w in level:
            for c in letters:
                u = w + c
                # w is irreducible, so a new occurrence must end at the last letter
                if any(u.endswith(lead) for lead in leads):
                    continue
                nxt.append(u)
                if len(out) + len(nxt) > cap:
                    raise BasisTooLargeError(f"more than {cap} irreducible words of degree <= {d}")
        out.extend(nxt)
        level = nxt
    return MonomialBasis(tuple(out))


@dataclass
class LinearSystem:
    """Equations ``[m = 1] + sum_{i<=j} coeff * G[i,j] = 0``, one per word m."""

    basis: MonomialBasis
    monomials: list[Word]
    rows: list[dict[tuple[int, int], Fraction]]
    rhs: list[Fraction]

    @property
    def pairs(self) -> list[tuple[int, int]]:
        n = len(self.basis)
        return [(i, j) for i in range(n) for j in range(i, n)]

    def dense(self) -> tuple[list[list[Fraction]], list[Fraction]]:
        col = {p: k for k, p in enumerate(self.pairs)}
        A = [[Fraction(0)] * len(col) for _ in self.rows]
        for r, row in enumerate(self.rows):
            for p, v in row.items():
                A[r][col[p]] = v
        return A, list(self.rhs)

    def as_constraints(self):
        return [({p: float(v) for p, v in row.items()}, float(b)) for row, b in zip(self.rows, self.rhs)]

    def describe(self) -> list[str]:
        out = []
        for m, row, b in zip(self.monomials, self.rows, self.rhs):
            lhs = " + ".join(f"{format_fraction(v)}*G[{i + 1},{j + 1}]" for (i, j), v in sorted(row.items())) or "0"
            out.append(f"[{word_str(m)}] {lhs} = {format_fraction(b)}")
        return out


def gram_products(basis: MonomialBasis, rs: RewriteSystem) -> dict[tuple[int, int], NCPoly]:
    """Normal forms of ``w_i^* w_j (+ w_j^* w_i)`` for i <= j."""
    words = basis.words
    n = len(words)
    out = {}
    for i in range(n):
        for j in range(i, n):
            p = NCPoly.monomial(word_star(words[i]) + words[j])
            if i != j:
                p = p + NCPoly.monomial(word_star(words[j]) + words[i])
            out[i, j] = reduce(p, rs)
    return out


def build_linear_system(basis: MonomialBasis, rs: RewriteSystem) -> LinearSystem:
    if rs.contains_one:
        raise DegenerateSystemError("rewrite system contains 1")
    prods = gram_products(basis, rs)
    by_word: dict[Word, dict[tuple[int, int], Fraction]] = {"": {}}
    for pair, nf in prods.items():
        for w, c in nf.items():
            by_word.setdefault(w, {})[pair] = c
    monomials = sorted(by_word, key=deglex_key)
    rows = [by_word[m] for m in monomials]
    rhs = [Fraction(-1) if m == "" else Fraction(0) for m in monomials]
    return LinearSystem(basis, monomials, rows, rhs)


@dataclass
class SOSWitness:
    """``1 + sum weight_k * s_k^* s_k`` together with its ideal combination."""

    weights: list[Fraction]
    polys: list[NCPoly]
    combination: Trace
    gram: Optional[list[list[Fraction]]] = None

    def sos_sum(self) -> NCPoly:
        acc = NCPoly.constant(1)
        for w, s in zip(self.weights, self.polys):
            acc = acc + w * (s.star() * s)
        return acc


def _round_project(G: np.ndarray, system: LinearSystem, N: int) -> list[list[Fraction]]:
    n = len(system.basis)
    pairs = system.pairs
    g = [Fraction(float(G[i, j])).limit_denominator(N) for i, j in pairs]
    A, b = system.dense()
    if A:
        r = [bi - sum(a * x for a, x in zip(row, g) if a) for row, bi in zip(A, b)]
        if any(r):
            AAt = [[sum(x * y for x, y in zip(ri, rj) if x and y) for rj in A] for ri in A]
            z = solve_consistent(AAt, r)
            if z is None:
                raise ValueError("Gram constraints are inconsistent")
            for k in range(len(g)):
                g[k] += sum(A[r_][k] * z[r_] for r_ in range(len(A)) if A[r_][k] and z[r_])
    M = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), v in zip(pairs, g):
        M[i][j] = M[j][i] = v
    return M


def round_and_verify(G: np.ndarray, basis: MonomialBasis, rs: RewriteSystem,
                     denominator_bound: int = DEFAULT_DENOMINATOR_BOUND,
                     system: Optional[LinearSystem] = None,
                     margin: float = 1e-6) -> Optional[SOSWitness]:
    """Turn a numerical Gram matrix into an exact SOS witness, or return None.

    Entries are rounded to denominators 1, 10, 100, ... up to the bound and
    projected exactly back onto the affine constraints.  A candidate is kept
    only if it has a nonnegative rational LDL decomposition and
    ``1 + W^* G W`` reduces to zero exactly.
    """
    if system is None:
        system = build_linear_system(basis, rs)
    n = len(basis)
    G = np.asarray(G, dtype=float)
    lam = float(np.linalg.eigvalsh(G).min()) if n else 0.0
    candidates = [G]
    shift = max(0.0, -lam) + margin
    candidates.append(G + shift * np.eye(n))
    for cand in candidates:
        N = 1
        while N <= denominator_bound:
            try:
                M = _round_project(cand, system, N)
            except ValueError:
                return None
            parts = ldl_psd(M)
            if parts is not None:
                witness = _witness_from_gram(M, parts, basis, rs)
                if witness is not None:
                    return witness
            N *= 10
    return None


def _witness_from_gram(M, parts, basis: MonomialBasis, rs: RewriteSystem) -> Optional[SOSWitness]:
    W = basis.words
    polys = [NCPoly({W[i]: v[i] for i in range(len(W)) if v[i]}) for _, v in parts]
    weights = [d for d, _ in parts]
    total = NCPoly.constant(1)
    for i in range(len(W)):
        for j in range(len(W)):
            if M[i][j]:
                total = total + NCPoly.monomial(word_star(W[i]) + W[j], M[i][j])
    nf, trace = reduce_with_trace(total, rs)
    if not nf.is_zero():
        return None
    witness = SOSWitness(weights, polys, trace, M)
    if witness.sos_sum() != total:
        return None
    return witness


# --- certificates ---------------------------------------------------------

@dataclass
class Certificate:
    verdict: str
    game_sha256: str
    mirror_maps: MirrorStructure
    degree_bound: int
    sos_max_degree: int
    method: Optional[str] = None
    side: Optional[int] = None
    sos_degree: Optional[int] = None
    sides_tried: list[int] = field(default_factory=list)
    complete_up_to_bound: Optional[bool] = None
    generators: Optional[GeneratorSet] = None
    witness: Optional[SOSWitness] = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "format": CERTIFICATE_FORMAT,
            "verdict": self.verdict,
            "method": self.method,
            "side": self.side,
            "sides_tried": self.sides_tried,
            "game_sha256": self.game_sha256,
            "mirror_maps": {"xi": list(self.mirror_maps.xi), "eta": list(self.mirror_maps.eta)},
            "degree_bound": self.degree_bound,
            "sos_degree": self.sos_degree,
            "sos_max_degree": self.sos_max_degree,
            "complete_up_to_bound": self.complete_up_to_bound,
            "witness": None,
        }
        if self.witness is not None and self.generators is not None:
            used = sorted({i for (_, i, _) in self.witness.combination})
            renum = {i: k for k, i in enumerate(used)}
            out["witness"] = {
                "generators": [{"poly": format_poly(self.generators.polys[i]), "tag": self.generators.tags[i]}
                               for i in used],
                "sos": [{"weight": _frac(w), "poly": format_poly(s)}
                        for w, s in zip(self.witness.weights, self.witness.polys)],
                "combination": [
                    {"coeff": _frac(c), "left": word_str(l), "generator": renum[i], "right": word_str(r)}
                    for (l, i, r), c in sorted(self.witness.combination.items(),
                                               key=lambda kv: (kv[0][1], deglex_key(kv[0][0]), deglex_key(kv[0][2])))
                ],
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _frac(c: Fraction) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


@dataclass
class CertifyOptions:
    side: Any = 1  # 1, 2 or "both"
    degree_bound: Optional[int] = None
    sos_max_degree: Optional[int] = None
    tol: float = DEFAULT_TOL
    basis_cap: int = DEFAULT_BASIS_CAP
    iter_cap: int = DEFAULT_ITER_CAP
    denominator_bound: int = DEFAULT_DENOMINATOR_BOUND


def _search_side(g: Game, m: MirrorStructure, side: int, D: int, d_max: int, opts: CertifyOptions):
    gens = build_mirror_ideal_generators(g, m, side)
    rs = complete(gens, D)
    if rs.contains_one:
        unit = rs.rules[0]
        # the unit rule polynomial is the constant 1
        return "gb-membership", None, SOSWitness([], [], dict(unit.trace)), gens, rs
    alphabet = family_alphabet(g, side)
    for d in range(1, d_max + 1):
        try:
            basis = enumerate_basis(rs, d, alphabet, opts.basis_cap)
        except BasisTooLargeError as exc:
            log.info("side %d: stopping SOS search at d=%d: %s", side, d, exc)
            break
        witness = sos_search(basis, rs, opts)
        if witness is not None:
            return "sos", d, witness, gens, rs
    return None, None, None, gens, rs


def sos_search(basis: MonomialBasis, rs: RewriteSystem, opts: Optional[CertifyOptions] = None) -> Optional[SOSWitness]:
    """One Gram-matrix search at a fixed monomial basis."""
    opts = opts or CertifyOptions()
    system = build_linear_system(basis, rs)
    A, b = system.dense()
    if solve_consistent(A, b) is None:
        return None
    for center in (False, True):
        res = sdp_feasibility(system.as_constraints(), len(basis), opts.tol, opts.iter_cap,
                              dim_cap=opts.basis_cap, center=center)
        if res.status != SDPStatus.FEASIBLE:
            return None
        witness = round_and_verify(res.G, basis, rs, opts.denominator_bound, system)
        if witness is not None:
            return witness
    return None


def certify(g: Game, options: Optional[CertifyOptions] = None) -> Certificate:
    """Run the Groebner/SOS procedure on one or both sides of a mirror game.

    Raises NotMirrorError or NotRegularError when the criterion does not apply.
    """
    opts = options or CertifyOptions()
    m = find_mirror_maps(g)
    if m is None:
        raise NotMirrorError("game has no mirror maps")
    if not m.regular:
        raise NotRegularError("mirror game is not regular; the mirror ideal criterion does not apply")
    D = opts.degree_bound if opts.degree_bound is not None else default_degree_bound(g)
    d_max = opts.sos_max_degree if opts.sos_max_degree is not None else max(1, D - 1)
    sides = [1, 2] if opts.side == "both" else [int(opts.side)]
    tried = []
    complete_flags = []
    for side in sides:
        tried.append(side)
        method, d, witness, gens, rs = _search_side(g, m, side, D, d_max, opts)
        complete_flags.append(rs.complete_up_to_bound)
        if method is not None:
            return Certificate(NO_PERFECT, g.digest(), m, D, d_max, method, side, d, tried,
                               rs.complete_up_to_bound, gens, witness)
    return Certificate(UNKNOWN, g.digest(), m, D, d_max, None, None, None, tried, all(complete_flags))
