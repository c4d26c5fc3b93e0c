"""Generator sets for the game ideals and two-sided Groebner completion.

A :class:`RewriteSystem` is a list of monic rules ``lead -> tail`` under the
deglex order.  Each rule can carry a *trace*: a linear combination of
``left * generator * right`` products over the original generator list that
equals the rule polynomial.  Traces are what make ideal-membership verdicts
checkable without re-running the completion.

With ``homogenize=True`` the completion runs on homogenized generators with
one extra central letter, which makes it exact through the degree bound:
a polynomial of degree at most D then reduces to zero exactly when it lies in
span{l*g*r : deg(l*g*r) <= D}.  The default (inhomogeneous) completion can
prove more, since degree drops let it reach products of higher degree.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .algebra import NCPoly, Word, deglex_key, format_poly, parse_poly, sandwich, sym, word_str
from .game import Game, MirrorStructure

# (left word, generator index, right word) -> coefficient
Trace = dict[tuple[Word, int, Word], Fraction]

# central homogenizing letter; sorts below every generator symbol
HOMOGENIZER = "\x00"


class NotRegularError(ValueError):
    """The mirror game is not regular, so the mirror ideals say nothing."""


class NotMirrorError(ValueError):
    pass


class DegreeBoundError(ValueError):
    pass


class Membership(str, Enum):
    YES = "yes"
    NO_UP_TO_BOUND = "no-up-to-bound"


@dataclass
class GeneratorSet:
    polys: list[NCPoly] = field(default_factory=list)
    tags: list[str] = field(default_factory=list)
    star_closed: bool = True

    def add(self, p: NCPoly, tag: str) -> None:
        """Append ``p`` unless it is zero or already present."""
        if p.is_zero() or p in self._seen():
            return
        self.polys.append(p)
        self.tags.append(tag)

    def _seen(self) -> set[NCPoly]:
        return set(self.polys)

    def extend(self, other: "GeneratorSet") -> "GeneratorSet":
        out = GeneratorSet(list(self.polys), list(self.tags), self.star_closed and other.star_closed)
        for p, t in zip(other.polys, other.tags):
            out.add(p, t)
        return out

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for t in self.tags:
            out[t] = out.get(t, 0) + 1
        return out

    def is_star_closed(self) -> bool:
        s = self._seen()
        return all(p.star() in s for p in self.polys)

    def max_degree(self) -> int:
        return max((p.degree for p in self.polys), default=0)

    def alphabet(self) -> tuple[str, ...]:
        return tuple(sorted({c for p in self.polys for c in p.symbols()}))

    def __len__(self) -> int:
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)


def family_alphabet(g: Game, side: int) -> tuple[str, ...]:
    nq, na = (g.nx, g.na) if side == 1 else (g.ny, g.nb)
    return tuple(sym(side, q, a) for q in range(nq) for a in range(na))


def build_universal_relations(g: Game, family) -> GeneratorSet:
    """Projection, orthogonality and completeness relations of one family,
    or of both families plus cross-family commutation when ``family='both'``."""
    if family == "both":
        gs = build_universal_relations(g, 1).extend(build_universal_relations(g, 2))
        for e1 in family_alphabet(g, 1):
            for e2 in family_alphabet(g, 2):
                gs.add(NCPoly({e1 + e2: 1, e2 + e1: -1}), "commutation")
        return gs
    if family not in (1, 2):
        raise ValueError(f"family must be 1, 2 or 'both', got {family!r}")
    nq, na = (g.nx, g.na) if family == 1 else (g.ny, g.nb)
    gs = GeneratorSet()
    for q in range(nq):
        for a in range(na):
            e = sym(family, q, a)
            gs.add(NCPoly({e + e: 1, e: -1}), "idempotent")
    for q in range(nq):
        for a1 in range(na):
            for a2 in range(na):
                if a1 != a2:
                    gs.add(NCPoly.monomial(sym(family, q, a1) + sym(family, q, a2)), "orthogonality")
    for q in range(nq):
        gs.add(NCPoly({**{sym(family, q, a): 1 for a in range(na)}, "": -1}), "completeness")
    return gs


def build_fg_polys(g: Game, m: MirrorStructure) -> tuple[dict[tuple[int, int], NCPoly], dict[tuple[int, int], NCPoly]]:
    """Mirror images of Bob's generators in Alice's family (f) and vice versa (g)."""
    f = {}
    for y in range(g.ny):
        x = m.eta[y]
        for b in range(g.nb):
            f[y, b] = NCPoly({sym(1, x, a): 1 for a in range(g.na) if g.win(x, y, a, b)})
    gp = {}
    for x in range(g.nx):
        y = m.xi[x]
        for a in range(g.na):
            gp[x, a] = NCPoly({sym(2, y, b): 1 for b in range(g.nb) if g.win(x, y, a, b)})
    return f, gp


def build_invalid_set(g: Game) -> GeneratorSet:
    gs = GeneratorSet(star_closed=False)
    for x, y, a, b, v in g.entries():
        if not v:
            gs.add(NCPoly.monomial(sym(1, x, a) + sym(2, y, b)), "invalid")
    return gs


def build_mirror_ideal_generators(g: Game, m: MirrorStructure, side: int) -> GeneratorSet:
    """Star-closed generators of the preimage of the mirror ideal on one side."""
    if not m.regular:
        raise NotRegularError("mirror game is not regular; the mirror ideal criterion does not apply")
    f, gp = build_fg_polys(g, m)
    gs = build_universal_relations(g, side)
    for x, y, a, b, v in g.entries():
        if v:
            continue
        if side == 1:
            e, mirrored = NCPoly.monomial(sym(1, x, a)), f[y, b]
        elif side == 2:
            e, mirrored = NCPoly.monomial(sym(2, y, b)), gp[x, a]
        else:
            raise ValueError(f"side must be 1 or 2, got {side!r}")
        gs.add(e * mirrored, "mirror-left")
        gs.add(mirrored * e, "mirror-right")
    return gs


# --- rewriting ------------------------------------------------------------

@dataclass
class Rule:
    lead: Word
    poly: NCPoly  # monic, leading word == lead
    trace: Optional[Trace] = None

    @property
    def tail(self) -> NCPoly:
        return NCPoly.monomial(self.lead) - self.poly


@dataclass
class RewriteSystem:
    rules: list[Rule]
    degree_bound: int
    complete_up_to_bound: bool
    contains_one: bool
    alphabet: tuple[str, ...] = ()
    generators: Optional[GeneratorSet] = None
    homogenized: bool = False

    def __post_init__(self):
        self._index = _RuleIndex(self.rules)

    @property
    def leads(self) -> list[Word]:
        return [r.lead for r in self.rules]

    def is_reducible(self, w: Word) -> bool:
        return self._index.find(w) is not None

    def to_text(self) -> str:
        if self.homogenized:
            raise ValueError("homogenized rewrite systems have no textual form")
        lines = [
            "# order: deglex (side, question, answer)",
            f"# degree_bound: {self.degree_bound}",
            f"# complete_up_to_bound: {str(self.complete_up_to_bound).lower()}",
            f"# contains_one: {str(self.contains_one).lower()}",
        ]
        for r in sorted(self.rules, key=lambda r: deglex_key(r.lead)):
            lines.append(f"{word_str(r.lead)} -> {format_poly(r.tail)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RewriteSystem":
        header: dict[str, str] = {}
        rules = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                header[key.strip()] = val.strip()
                continue
            lhs, _, rhs = line.partition("->")
            lead = parse_poly(lhs)
            if len(lead) != 1 or lead.leading_coeff != 1:
                raise ValueError(f"rule lead must be a single monic word: {lhs!r}")
            w = lead.leading_word
            rules.append(Rule(w, NCPoly.monomial(w) - parse_poly(rhs)))
        alphabet = tuple(sorted({c for r in rules for c in r.lead + "".join(r.poly.terms)}))
        return cls(rules, int(header.get("degree_bound", 0)), header.get("complete_up_to_bound") == "true",
                   header.get("contains_one") == "true", alphabet)


class _RuleIndex:
    """Leftmost-occurrence lookup of rule leads inside a word."""

    def __init__(self, rules: Iterable[Rule] = ()):
        self.by_first: dict[str, list[Rule]] = {}
        self.unit: Optional[Rule] = None
        for r in rules:
            self.add(r)

    def add(self, r: Rule) -> None:
        if not r.lead:
            self.unit = r
        else:
            self.by_first.setdefault(r.lead[0], []).append(r)

    def remove(self, r: Rule) -> None:
        if not r.lead:
            self.unit = None
        else:
            self.by_first[r.lead[0]].remove(r)

    def find(self, w: Word) -> Optional[tuple[int, Rule]]:
        if self.unit is not None:
            return 0, self.unit
        for i, c in enumerate(w):
            for r in self.by_first.get(c, ()):
                if w.startswith(r.lead, i):
                    return i, r
        return None

    def find_all(self, w: Word) -> list[tuple[int, Rule]]:
        out = []
        if self.unit is not None:
            out.append((0, self.unit))
        for i, c in enumerate(w):
            for r in self.by_first.get(c, ()):
                if w.startswith(r.lead, i):
                    out.append((i, r))
        return out


def _trace_add(acc: Trace, t: Trace, left: Word = "", right: Word = "", c: Fraction = Fraction(1)) -> None:
    for (l, i, r), v in t.items():
        key = (left + l, i, r + right)
        nv = acc.get(key, 0) + c * v
        if nv:
            acc[key] = nv
        else:
            acc.pop(key, None)


def _normal_form(p: NCPoly, index: _RuleIndex, trace: Optional[Trace] = None,
                 rng: Optional[random.Random] = None) -> tuple[NCPoly, Optional[Trace]]:
    """Reduce ``p``; returns (normal form, trace of p - normal form)."""
    work = dict(p.terms)
    done: dict[Word, Fraction] = {}
    tr: Optional[Trace] = {} if trace is not None else None
    while work:
        if rng is None:
            w = max(work, key=deglex_key)
            hit = index.find(w)
        else:
            w = rng.choice(sorted(work, key=deglex_key))
            hits = index.find_all(w)
            hit = rng.choice(hits) if hits else None
        c = work.pop(w)
        if hit is None:
            done[w] = c
            continue
        i, rule = hit
        left, right = w[:i], w[i + len(rule.lead):]
        for v, d in rule.poly.items():
            if v == rule.lead:
                continue
            u = left + v + right
            nv = work.get(u, 0) - c * d
            if u in done:
                # only possible under randomized order
                nv += done.pop(u)
            if nv:
                work[u] = nv
            else:
                work.pop(u, None)
        if tr is not None:
            if rule.trace is None:
                raise ValueError("rule has no trace")
            _trace_add(tr, rule.trace, left, right, c)
    return NCPoly(done), tr


def homogenize_poly(p: NCPoly, degree: int) -> NCPoly:
    return NCPoly({HOMOGENIZER * (degree - len(w)) + w: c for w, c in p.items()})


def dehomogenize_poly(p: NCPoly) -> NCPoly:
    acc: dict[Word, Fraction] = {}
    for w, c in p.items():
        w = w.replace(HOMOGENIZER, "")
        acc[w] = acc.get(w, 0) + c
    return NCPoly(acc)


def _lift(p: NCPoly, rs: RewriteSystem) -> NCPoly:
    if not rs.homogenized:
        return p
    if not p.symbols() <= set(rs.alphabet):
        raise ValueError("polynomial uses letters outside the homogenized system's alphabet")
    return homogenize_poly(p, max(rs.degree_bound, p.degree))


def reduce(p: NCPoly, rs: RewriteSystem, rng: Optional[random.Random] = None) -> NCPoly:
    """Normal form of ``p`` modulo the rules.

    By default the deglex-greatest reducible word is rewritten at its leftmost
    occurrence; passing ``rng`` picks reducible words and occurrences at random.
    """
    nf = _normal_form(_lift(p, rs), rs._index, rng=rng)[0]
    return dehomogenize_poly(nf) if rs.homogenized else nf


def reduce_with_trace(p: NCPoly, rs: RewriteSystem) -> tuple[NCPoly, Trace]:
    """Normal form plus the generator combination equal to ``p - NF(p)``."""
    nf, tr = _normal_form(_lift(p, rs), rs._index, trace={})
    if not rs.homogenized:
        return nf, tr
    # t -> 1 kills the commutators (indices past the input generators)
    n = len(rs.generators)
    out: Trace = {}
    for (l, i, r), c in tr.items():
        if i < n:
            _trace_add(out, {(l.replace(HOMOGENIZER, ""), i, r.replace(HOMOGENIZER, "")): c})
    return dehomogenize_poly(nf), out


def ideal_membership(p: NCPoly, rs: RewriteSystem) -> Membership:
    return Membership.YES if reduce(p, rs).is_zero() else Membership.NO_UP_TO_BOUND


def default_degree_bound(g: Game) -> int:
    return 2 * max(g.na, g.nb) + 2


# --- completion -----------------------------------------------------------

def _overlaps(u: Word, v: Word) -> Iterable[int]:
    """Lengths k of proper overlaps where the last k letters of u start v."""
    for k in range(1, min(len(u), len(v))):
        if u.endswith(v[:k]):
            yield k


class _Completion:
    def __init__(self, degree_bound: int, track: bool):
        self.D = degree_bound
        self.track = track
        self.rules: dict[int, Rule] = {}
        self.index = _RuleIndex()
        self.queue: list = []
        self.next_id = 0
        self.counter = 0
        self.truncated = False
        self.unit: Optional[Rule] = None

    def _push_pairs(self, rid: int) -> None:
        new = self.rules[rid]
        for oid, other in list(self.rules.items()):
            for a_id, a, b_id, b in ((rid, new, oid, other), (oid, other, rid, new)):
                for k in _overlaps(a.lead, b.lead):
                    deg = len(a.lead) + len(b.lead) - k
                    if deg > self.D:
                        self.truncated = True
                        continue
                    self.counter += 1
                    heapq.heappush(self.queue, (deg, self.counter, a_id, b_id, k))
                if a_id == b_id:
                    break

    def insert(self, p: NCPoly, trace: Optional[Trace]) -> bool:
        """Reduce and adjoin; returns True when the unit ideal is reached."""
        pending = [(p, trace)]
        while pending:
            pending.sort(key=lambda it: deglex_key(it[0].leading_word) if not it[0].is_zero() else (-1, ""))
            q, t = pending.pop(0)
            nf, red = _normal_form(q, self.index, trace={} if self.track else None)
            if nf.is_zero():
                continue
            if self.track:
                _trace_add(red, t, c=Fraction(-1))
                t = {k: -v for k, v in red.items()}
            lc = nf.leading_coeff
            nf = nf.monic()
            if t is not None:
                t = {k: v / lc for k, v in t.items()}
            rule = Rule(nf.leading_word, nf, t)
            if not rule.lead:
                self.unit = rule
                return True
            # rules whose lead contains the new lead are re-reduced
            for oid, other in list(self.rules.items()):
                if rule.lead in other.lead:
                    del self.rules[oid]
                    self.index.remove(other)
                    pending.append((other.poly, other.trace))
            rid = self.next_id
            self.next_id += 1
            self.rules[rid] = rule
            self.index.add(rule)
            self._push_pairs(rid)
        return False

    def run(self) -> bool:
        while self.queue:
            deg, _, a_id, b_id, k = heapq.heappop(self.queue)
            a, b = self.rules.get(a_id), self.rules.get(b_id)
            if a is None or b is None:
                continue
            right = b.lead[k:]
            left = a.lead[:len(a.lead) - k]
            s = sandwich("", a.poly, right) - sandwich(left, b.poly, "")
            t = None
            if self.track:
                t = {}
                _trace_add(t, a.trace, "", right)
                _trace_add(t, b.trace, left, "", Fraction(-1))
            if self.insert(s, t):
                return True
        return False

    def interreduce(self) -> list[Rule]:
        out = []
        for rid in sorted(self.rules, key=lambda i: deglex_key(self.rules[i].lead)):
            r = self.rules[rid]
            self.index.remove(r)
            tail = r.poly - NCPoly.monomial(r.lead)
            nf, red = _normal_form(tail, self.index, trace={} if self.track else None)
            t = r.trace
            if self.track:
                t = dict(r.trace)
                _trace_add(t, red, c=Fraction(-1))
            new = Rule(r.lead, NCPoly.monomial(r.lead) + nf, t)
            self.rules[rid] = new
            self.index.add(new)
            out.append(new)
        return out


def complete(gens: GeneratorSet | Sequence[NCPoly], degree_bound: int, track: bool = True,
             homogenize: bool = False, alphabet: Iterable[str] = ()) -> RewriteSystem:
    """Degree-truncated two-sided Buchberger/Mora completion.

    Overlap obstructions of degree above ``degree_bound`` are discarded and
    the result is then flagged as not complete.  Stops as soon as a nonzero
    constant appears.  See the module notes for ``homogenize``; there the
    homogenizing letter commutes only with letters of the generators and of
    ``alphabet``, so pass every letter you intend to reduce over.
    """
    if not isinstance(gens, GeneratorSet):
        gs = GeneratorSet()
        for p in gens:
            gs.add(p, "input")
        gens = gs
    alphabet = tuple(sorted(set(gens.alphabet()) | set(alphabet)))
    if gens.max_degree() > degree_bound:
        raise DegreeBoundError(f"degree bound {degree_bound} is below generator degree {gens.max_degree()}")
    polys = list(gens.polys)
    if homogenize:
        if alphabet and degree_bound < 2:
            raise DegreeBoundError("homogenized completion needs a degree bound of at least 2")
        polys = [homogenize_poly(p, p.degree) for p in polys]
        polys += [NCPoly({s + HOMOGENIZER: 1, HOMOGENIZER + s: -1}) for s in alphabet]
    comp = _Completion(degree_bound, track)
    order = sorted(range(len(polys)), key=lambda i: deglex_key(polys[i].leading_word))
    found = False
    for i in order:
        t = {("", i, ""): Fraction(1)} if track else None
        if comp.insert(polys[i], t):
            found = True
            break
    if not found:
        found = comp.run()
    if found:
        return RewriteSystem([comp.unit], degree_bound, True, True, alphabet, gens, homogenize)
    rules = comp.interreduce()
    rules.sort(key=lambda r: deglex_key(r.lead))
    if not homogenize:
        return RewriteSystem(rules, degree_bound, not comp.truncated, False, alphabet, gens)
    # homogeneous input: everything of degree <= D is settled, dropped obstructions or not
    rs = RewriteSystem(rules, degree_bound, True, False, alphabet, gens, True)
    rs.contains_one = reduce(NCPoly.constant(1), rs).is_zero()
    return rs


def expand_trace(trace: Trace, gens: Sequence[NCPoly]) -> NCPoly:
    acc: dict[Word, Fraction] = {}
    for (l, i, r), c in trace.items():
        for w, v in gens[i].items():
            key = l + w + r
            acc[key] = acc.get(key, 0) + c * v
    return NCPoly(acc)
