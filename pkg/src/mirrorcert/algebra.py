"""Exact arithmetic in the free *-algebra on projection symbols.

Words are stored as Python strings: every generator symbol is packed into a
single code point so that native string comparison is the symbol order
(side, question, answer) and substring search finds factors.  The empty
string is the identity word.

Textual syntax::

    1/4 e1[0,0]*e2[0,0] - e1[1,0] + 1
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Union

Word = str
Scalar = Union[int, Fraction]

_SIDE_SHIFT = 18
_QUESTION_SHIFT = 9
_FIELD_LIMIT = 1 << _QUESTION_SHIFT


class GenSymbol(NamedTuple):
    """A self-adjoint projection symbol ``e(side)^question_answer``."""

    side: int
    question: int
    answer: int

    def char(self) -> str:
        if self.side not in (1, 2):
            raise ValueError(f"side must be 1 or 2, got {self.side}")
        if not (0 <= self.question < _FIELD_LIMIT and 0 <= self.answer < _FIELD_LIMIT):
            raise ValueError(f"symbol indices out of range: {self}")
        return chr((self.side << _SIDE_SHIFT) | (self.question << _QUESTION_SHIFT) | self.answer)

    @classmethod
    def from_char(cls, c: str) -> "GenSymbol":
        code = ord(c)
        return cls(code >> _SIDE_SHIFT, (code >> _QUESTION_SHIFT) & (_FIELD_LIMIT - 1), code & (_FIELD_LIMIT - 1))

    def __str__(self) -> str:
        return f"e{self.side}[{self.question},{self.answer}]"


def word(*symbols: GenSymbol) -> Word:
    return "".join(s.char() for s in symbols)


def sym(side: int, question: int, answer: int) -> Word:
    """Length-one word for a single generator."""
    return GenSymbol(side, question, answer).char()


def word_symbols(w: Word) -> list[GenSymbol]:
    return [GenSymbol.from_char(c) for c in w]


def word_str(w: Word) -> str:
    if not w:
        return "1"
    return "*".join(str(GenSymbol.from_char(c)) for c in w)


def deglex_key(w: Word) -> tuple[int, str]:
    return (len(w), w)


def word_compare(a: Word, b: Word) -> int:
    """Graded lexicographic comparison: -1, 0 or 1."""
    ka, kb = deglex_key(a), deglex_key(b)
    return (ka > kb) - (ka < kb)


def word_star(w: Word) -> Word:
    # generators are self-adjoint, so the involution just reverses
    return w[::-1]


class NCPoly:
    """Immutable noncommutative polynomial with rational coefficients.

    Terms are kept sorted by deglex, largest first, so the leading term is
    the first entry.  Zero coefficients are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Word, Scalar] | Iterable[tuple[Word, Scalar]] = ()):
        acc: dict[Word, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for w, c in items:
            if isinstance(c, complex):
                raise TypeError("complex coefficients are not supported")
            c = Fraction(c)
            acc[w] = acc.get(w, 0) + c
        self._terms = _canonical(acc)
        self._hash = None

    @classmethod
    def _from_canonical(cls, terms: dict[Word, Fraction]) -> "NCPoly":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, c: Scalar) -> "NCPoly":
        return cls({"": c})

    @classmethod
    def monomial(cls, w: Word, c: Scalar = 1) -> "NCPoly":
        return cls({w: c})

    @classmethod
    def zero(cls) -> "NCPoly":
        return cls()

    @property
    def terms(self) -> Mapping[Word, Fraction]:
        return self._terms

    def items(self) -> Iterator[tuple[Word, Fraction]]:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and "" in self._terms)

    @property
    def leading_word(self) -> Word:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return next(iter(self._terms))

    @property
    def leading_coeff(self) -> Fraction:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return next(iter(self._terms.values()))

    @property
    def degree(self) -> int:
        return len(self.leading_word) if self._terms else -1

    def coeff(self, w: Word) -> Fraction:
        return self._terms.get(w, Fraction(0))

    def symbols(self) -> set[str]:
        return {c for w in self._terms for c in w}

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = NCPoly.constant(other)
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other: "NCPoly | Scalar") -> "NCPoly":
        return poly_add(self, _coerce(other))

    __radd__ = __add__

    def __neg__(self) -> "NCPoly":
        return NCPoly._from_canonical({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: "NCPoly | Scalar") -> "NCPoly":
        return poly_add(self, -_coerce(other))

    def __rsub__(self, other: Scalar) -> "NCPoly":
        return poly_add(_coerce(other), -self)

    def __mul__(self, other: "NCPoly | Scalar") -> "NCPoly":
        if isinstance(other, NCPoly):
            return poly_mul(self, other)
        return poly_scale(other, self)

    def __rmul__(self, other: Scalar) -> "NCPoly":
        return poly_scale(other, self)

    def star(self) -> "NCPoly":
        return poly_star(self)

    def monic(self) -> "NCPoly":
        return poly_scale(1 / self.leading_coeff, self)

    def __repr__(self) -> str:
        return f"NCPoly({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)


def _canonical(acc: Mapping[Word, Fraction]) -> dict[Word, Fraction]:
    keys = sorted((w for w, c in acc.items() if c), key=deglex_key, reverse=True)
    return {w: acc[w] for w in keys}


def _coerce(x: "NCPoly | Scalar") -> NCPoly:
    if isinstance(x, NCPoly):
        return x
    return NCPoly.constant(x)


def poly_add(p: NCPoly, q: NCPoly) -> NCPoly:
    acc = dict(p.terms)
    for w, c in q.items():
        acc[w] = acc.get(w, 0) + c
    return NCPoly._from_canonical(_canonical(acc))


def poly_scale(c: Scalar, p: NCPoly) -> NCPoly:
    c = Fraction(c)
    if not c:
        return NCPoly()
    return NCPoly._from_canonical({w: c * v for w, v in p.items()})


def poly_mul(p: NCPoly, q: NCPoly) -> NCPoly:
    acc: dict[Word, Fraction] = {}
    for u, a in p.items():
        for v, b in q.items():
            w = u + v
            acc[w] = acc.get(w, 0) + a * b
    return NCPoly._from_canonical(_canonical(acc))


def poly_star(p: NCPoly) -> NCPoly:
    # rational coefficients are their own conjugates
    return NCPoly._from_canonical(_canonical({word_star(w): c for w, c in p.items()}))


def sandwich(left: Word, p: NCPoly, right: Word, c: Scalar = 1) -> NCPoly:
    """Return ``c * left * p * right``."""
    c = Fraction(c)
    if not c:
        return NCPoly()
    return NCPoly._from_canonical(_canonical({left + w + right: c * v for w, v in p.items()}))


# --- textual syntax -------------------------------------------------------

def format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: NCPoly) -> str:
    if p.is_zero():
        return "0"
    parts: list[str] = []
    for i, (w, c) in enumerate(p.items()):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if not w:
            body = format_fraction(mag)
        elif mag == 1:
            body = word_str(w)
        else:
            body = f"{format_fraction(mag)} {word_str(w)}"
        if i == 0:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


class PolySyntaxError(ValueError):
    pass


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<sym>e(?P<side>[12])\[\s*(?P<q>\d+)\s*,\s*(?P<a>\d+)\s*\])"
    r"|(?P<num>\d+(?:\.\d+)?(?:\s*/\s*\d+)?)"
    r"|(?P<op>[-+*])"
    r")"
)


def parse_poly(text: str) -> NCPoly:
    """Parse the textual polynomial syntax; the inverse of :func:`format_poly`."""
    tokens: list[tuple[str, object]] = []
    pos = 0
    text = text.strip()
    if not text:
        raise PolySyntaxError("empty polynomial")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected input at column {pos + 1}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group("sym"):
            tokens.append(("sym", GenSymbol(int(m.group("side")), int(m.group("q")), int(m.group("a"))).char()))
        elif m.group("num"):
            tokens.append(("num", Fraction(m.group("num").replace(" ", ""))))
        else:
            tokens.append(("op", m.group("op")))

    acc: dict[Word, Fraction] = {}
    i = 0
    n = len(tokens)
    first = True
    while i < n:
        sign = 1
        if tokens[i][0] == "op" and tokens[i][1] in "+-":
            sign = -1 if tokens[i][1] == "-" else 1
            i += 1
        elif not first:
            raise PolySyntaxError("expected '+' or '-' between terms")
        coeff = Fraction(sign)
        w = ""
        factors = 0
        while i < n:
            kind, val = tokens[i]
            if kind == "op":
                if val != "*" or not factors:
                    break
                i += 1
                if i >= n or tokens[i][0] == "op":
                    raise PolySyntaxError("dangling '*'")
                continue
            if kind == "num":
                coeff *= val
            else:
                w += val
            factors += 1
            i += 1
        if not factors:
            raise PolySyntaxError("missing term")
        acc[w] = acc.get(w, 0) + coeff
        first = False
    return NCPoly(acc)
