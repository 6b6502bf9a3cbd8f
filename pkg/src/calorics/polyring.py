"""Exact sparse polynomial arithmetic in spatial variables x1..xn and time t.

A polynomial on R^{n+1} = {(x_1, ..., x_n, t)} is stored as a mapping from
exponent vectors to nonzero rational coefficients:

    terms: Dict[ExponentVector, Fraction]
    ExponentVector = (t_exp, space_exps)   # the monomial t^k * x^alpha

All coefficients are arbitrary-precision rationals (fractions.Fraction), so
every algebraic identity in this package is checked exactly; floating point
only appears in `evaluate_float`, which callers use for plotting and guarded
numeric diagnostics.  The zero polynomial has an empty term map.

Monomials carry two degrees: the algebraic degree k + |alpha| and the
parabolic weight 2k + |alpha|.  A polynomial is parabolically homogeneous of
degree d when every term has parabolic weight d; `parabolic_degree` recovers
d or reports the first two offending weights.

Canonical term order (used by the pretty printer and the JSON form) is
descending parabolic weight, then descending t-exponent, then descending
lexicographic order on alpha.  This matches the conventional way these
polynomials are written, e.g. ``t^2 + t*x^2 + 1/12*x^4``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, NamedTuple, Sequence, Tuple, Union

Rational = Fraction
RationalLike = Union[int, str, Fraction]


class PolynomialError(Exception):
    """Base class for errors raised by the polynomial layer."""


class DimensionMismatch(PolynomialError):
    """Operands or evaluation points disagree about the spatial dimension."""


class ZeroPolynomialError(PolynomialError):
    """An operation that needs a nonzero polynomial received zero."""


class NotHomogeneous(PolynomialError):
    """The polynomial mixes parabolic weights; carries two witnesses."""

    def __init__(self, weight_a: int, weight_b: int):
        super().__init__(
            f"not parabolically homogeneous: found terms of weight "
            f"{weight_a} and {weight_b}"
        )
        self.weights = (weight_a, weight_b)


class NotOnUnitCircle(PolynomialError):
    """Exact rotations require a rational pair with c^2 + s^2 = 1."""


class ParseError(PolynomialError):
    """Syntax or name error in a polynomial expression, with position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ExponentVector(NamedTuple):
    """Exponents of the monomial t^k * x^alpha."""

    t_exp: int
    space_exps: Tuple[int, ...]

    @property
    def parabolic_weight(self) -> int:
        return 2 * self.t_exp + sum(self.space_exps)

    @property
    def algebraic_degree(self) -> int:
        return self.t_exp + sum(self.space_exps)


def _canonical_key(ev: ExponentVector):
    # descending weight, then descending k, then descending lex on alpha
    return (
        -ev.parabolic_weight,
        -ev.t_exp,
        tuple(-a for a in ev.space_exps),
    )


class Polynomial:
    """Immutable sparse polynomial over Q in (x_1..x_n, t).

    Instances never store zero coefficients and all operations return new
    objects, so values are safe to share across threads.
    """

    __slots__ = ("spatial_dim", "terms")

    def __init__(
        self,
        spatial_dim: int,
        terms: Mapping[ExponentVector, RationalLike] | Iterable[Tuple[ExponentVector, RationalLike]] = (),
    ):
        if spatial_dim < 1:
            raise ValueError(f"spatial dimension must be >= 1, got {spatial_dim}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: Dict[ExponentVector, Fraction] = {}
        for ev, coeff in items:
            ev = ExponentVector(int(ev[0]), tuple(int(a) for a in ev[1]))
            if ev.t_exp < 0 or any(a < 0 for a in ev.space_exps):
                raise ValueError(f"negative exponent in {ev}")
            if len(ev.space_exps) != spatial_dim:
                raise DimensionMismatch(
                    f"exponent vector {ev} has {len(ev.space_exps)} spatial "
                    f"entries, expected {spatial_dim}"
                )
            coeff = Fraction(coeff)
            if coeff == 0:
                continue
            prev = clean.get(ev)
            total = coeff if prev is None else prev + coeff
            if total == 0:
                clean.pop(ev, None)
            else:
                clean[ev] = total
        object.__setattr__(self, "spatial_dim", spatial_dim)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # ---- constructors -------------------------------------------------

    @classmethod
    def zero(cls, spatial_dim: int) -> "Polynomial":
        return cls(spatial_dim)

    @classmethod
    def constant(cls, spatial_dim: int, value: RationalLike) -> "Polynomial":
        ev = ExponentVector(0, (0,) * spatial_dim)
        return cls(spatial_dim, {ev: Fraction(value)})

    @classmethod
    def variable(cls, spatial_dim: int, index: int) -> "Polynomial":
        """The polynomial x_{index+1} (0-based index)."""
        if not 0 <= index < spatial_dim:
            raise ValueError(f"no spatial variable with index {index} in dimension {spatial_dim}")
        alpha = [0] * spatial_dim
        alpha[index] = 1
        return cls(spatial_dim, {ExponentVector(0, tuple(alpha)): Fraction(1)})

    @classmethod
    def time(cls, spatial_dim: int) -> "Polynomial":
        return cls(spatial_dim, {ExponentVector(1, (0,) * spatial_dim): Fraction(1)})

    # ---- basic queries -------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def algebraic_degree(self) -> int:
        """Total degree in all n+1 variables; 0 for the zero polynomial."""
        if not self.terms:
            return 0
        return max(ev.algebraic_degree for ev in self.terms)

    def coefficient(self, t_exp: int, space_exps: Sequence[int]) -> Fraction:
        return self.terms.get(ExponentVector(t_exp, tuple(space_exps)), Fraction(0))

    def canonical_terms(self) -> List[Tuple[ExponentVector, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: _canonical_key(item[0]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.spatial_dim == other.spatial_dim and self.terms == other.terms

    def __hash__(self):
        return hash((self.spatial_dim, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Polynomial(n={self.spatial_dim}, {self.to_expression()!r})"

    # ---- ring operations -------------------------------------------------

    def _check_dim(self, other: "Polynomial") -> None:
        if self.spatial_dim != other.spatial_dim:
            raise DimensionMismatch(
                f"spatial dimensions differ: {self.spatial_dim} vs {other.spatial_dim}"
            )

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_dim(other)
        out = dict(self.terms)
        for ev, c in other.terms.items():
            total = out.get(ev, Fraction(0)) + c
            if total == 0:
                out.pop(ev, None)
            else:
                out[ev] = total
        return Polynomial(self.spatial_dim, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.spatial_dim, {ev: -c for ev, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check_dim(other)
        out: Dict[ExponentVector, Fraction] = {}
        for ev_a, ca in self.terms.items():
            for ev_b, cb in other.terms.items():
                ev = ExponentVector(
                    ev_a.t_exp + ev_b.t_exp,
                    tuple(a + b for a, b in zip(ev_a.space_exps, ev_b.space_exps)),
                )
                total = out.get(ev, Fraction(0)) + ca * cb
                if total == 0:
                    out.pop(ev, None)
                else:
                    out[ev] = total
        return Polynomial(self.spatial_dim, out)

    def scale(self, factor: RationalLike) -> "Polynomial":
        factor = Fraction(factor)
        if factor == 0:
            return Polynomial.zero(self.spatial_dim)
        return Polynomial(self.spatial_dim, {ev: c * factor for ev, c in self.terms.items()})

    def __rmul__(self, factor):
        if isinstance(factor, (int, Fraction)):
            return self.scale(factor)
        return NotImplemented

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative polynomial power")
        out = Polynomial.constant(self.spatial_dim, 1)
        for _ in range(exponent):
            out = out * self
        return out

    # ---- calculus -------------------------------------------------

    def partial(self, index: int) -> "Polynomial":
        """Formal partial derivative with respect to x_{index+1}."""
        if not 0 <= index < self.spatial_dim:
            raise ValueError(f"no spatial variable with index {index} in dimension {self.spatial_dim}")
        out: Dict[ExponentVector, Fraction] = {}
        for ev, c in self.terms.items():
            e = ev.space_exps[index]
            if e == 0:
                continue
            alpha = list(ev.space_exps)
            alpha[index] = e - 1
            out[ExponentVector(ev.t_exp, tuple(alpha))] = c * e
        return Polynomial(self.spatial_dim, out)

    def partial_t(self) -> "Polynomial":
        out: Dict[ExponentVector, Fraction] = {}
        for ev, c in self.terms.items():
            if ev.t_exp == 0:
                continue
            out[ExponentVector(ev.t_exp - 1, ev.space_exps)] = c * ev.t_exp
        return Polynomial(self.spatial_dim, out)

    def substitute_t(self, value: RationalLike) -> "Polynomial":
        """Collapse the t variable at an exact rational time slice."""
        value = Fraction(value)
        out: Dict[ExponentVector, Fraction] = {}
        for ev, c in self.terms.items():
            key = ExponentVector(0, ev.space_exps)
            total = out.get(key, Fraction(0)) + c * value ** ev.t_exp
            if total == 0:
                out.pop(key, None)
            else:
                out[key] = total
        return Polynomial(self.spatial_dim, out)

    # ---- evaluation -------------------------------------------------

    def evaluate(self, point: Sequence[RationalLike]) -> Fraction:
        """Exact value at (x_1, ..., x_n, t)."""
        if len(point) != self.spatial_dim + 1:
            raise DimensionMismatch(
                f"point has {len(point)} coordinates, expected {self.spatial_dim + 1}"
            )
        coords = [Fraction(v) for v in point]
        xs, tval = coords[:-1], coords[-1]
        total = Fraction(0)
        for ev, c in self.terms.items():
            term = c * tval ** ev.t_exp
            for x, e in zip(xs, ev.space_exps):
                if e:
                    term *= x ** e
            total += term
        return total

    def evaluate_float(self, point: Sequence[float]) -> float:
        """Double-precision value, Horner-ordered over (x_1, ..., x_n, t)."""
        if len(point) != self.spatial_dim + 1:
            raise DimensionMismatch(
                f"point has {len(point)} coordinates, expected {self.spatial_dim + 1}"
            )
        coords = [float(v) for v in point]
        items = [
            (ev.space_exps + (ev.t_exp,), float(c)) for ev, c in self.terms.items()
        ]
        return _horner(items, coords, 0)

    # ---- reshaping -------------------------------------------------

    def t_coefficients(self) -> List["Polynomial"]:
        """Spatial coefficients [p_m, ..., p_0] with p = sum_j t^j p_j, p_m != 0."""
        if not self.terms:
            return []
        m = max(ev.t_exp for ev in self.terms)
        buckets: List[Dict[ExponentVector, Fraction]] = [{} for _ in range(m + 1)]
        for ev, c in self.terms.items():
            buckets[ev.t_exp][ExponentVector(0, ev.space_exps)] = c
        return [Polynomial(self.spatial_dim, buckets[m - i]) for i in range(m + 1)]

    # ---- text and JSON forms -------------------------------------------------

    def to_expression(self) -> str:
        """Canonical human-readable form; round-trips through parse_poly."""
        if not self.terms:
            return "0"
        chunks: List[str] = []
        for idx, (ev, coeff) in enumerate(self.canonical_terms()):
            body = _format_monomial(ev, self.spatial_dim)
            mag = abs(coeff)
            if body:
                text = body if mag == 1 else f"{mag}*{body}"
            else:
                text = str(mag)
            if idx == 0:
                chunks.append(text if coeff > 0 else f"-{text}")
            else:
                chunks.append(f"+ {text}" if coeff > 0 else f"- {text}")
        return " ".join(chunks)

    def to_json_dict(self) -> dict:
        return {
            "n": self.spatial_dim,
            "terms": [
                {
                    "k": ev.t_exp,
                    "alpha": list(ev.space_exps),
                    "num": str(c.numerator),
                    "den": str(c.denominator),
                }
                for ev, c in self.canonical_terms()
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Polynomial":
        n = int(data["n"])
        terms = {}
        for entry in data["terms"]:
            ev = ExponentVector(int(entry["k"]), tuple(int(a) for a in entry["alpha"]))
            terms[ev] = Fraction(int(entry["num"]), int(entry["den"]))
        return cls(n, terms)


def _horner(items: List[Tuple[Tuple[int, ...], float]], coords: List[float], axis: int) -> float:
    """Evaluate sum of coeff * prod coords^exps by nested Horner steps."""
    if not items:
        return 0.0
    if axis == len(coords):
        return math.fsum(c for _, c in items)
    groups: Dict[int, List[Tuple[Tuple[int, ...], float]]] = {}
    for exps, c in items:
        groups.setdefault(exps[axis], []).append((exps, c))
    exps_desc = sorted(groups, reverse=True)
    x = coords[axis]
    acc = 0.0
    prev = exps_desc[0]
    acc = _horner(groups[prev], coords, axis + 1)
    for e in exps_desc[1:]:
        acc = acc * x ** (prev - e) + _horner(groups[e], coords, axis + 1)
        prev = e
    return acc * x ** prev


def variable_names(spatial_dim: int) -> List[str]:
    """Preferred print names: x, y, z for n <= 3, else x1..xn."""
    if spatial_dim <= 3:
        return ["x", "y", "z"][:spatial_dim]
    return [f"x{i + 1}" for i in range(spatial_dim)]


def _format_monomial(ev: ExponentVector, spatial_dim: int) -> str:
    names = variable_names(spatial_dim)
    parts: List[str] = []
    if ev.t_exp == 1:
        parts.append("t")
    elif ev.t_exp > 1:
        parts.append(f"t^{ev.t_exp}")
    for name, e in zip(names, ev.space_exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class _Token(NamedTuple):
    kind: str  # "num", "name", "op", "end"
    text: str
    value: Fraction | None
    pos: int


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*^()":
            tokens.append(_Token("op", ch, None, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            num = int(text[i:j])
            # a/b rational literal (integer denominator required)
            if j < n and text[j] == "/":
                k = j + 1
                while k < n and text[k].isdigit():
                    k += 1
                if k == j + 1:
                    raise ParseError("expected digits after '/'", j + 1)
                den = int(text[j + 1 : k])
                if den == 0:
                    raise ParseError("zero denominator", j + 1)
                tokens.append(_Token("num", text[i:k], Fraction(num, den), i))
                i = k
            else:
                tokens.append(_Token("num", text[i:j], Fraction(num), i))
                i = j
            continue
        if ch.isalpha():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("name", text[i:j], None, i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", None, n))
    return tokens


class _Parser:
    def __init__(self, tokens: List[_Token], spatial_dim: int):
        self.tokens = tokens
        self.idx = 0
        self.n = spatial_dim
        self.names: Dict[str, int | None] = {"t": None}
        for i in range(spatial_dim):
            self.names[f"x{i + 1}"] = i
        if spatial_dim <= 3:
            for i, alias in enumerate(["x", "y", "z"][:spatial_dim]):
                self.names[alias] = i

    def peek(self) -> _Token:
        return self.tokens[self.idx]

    def advance(self) -> _Token:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def expect_op(self, op: str) -> None:
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            raise ParseError(f"expected {op!r}", tok.pos)
        self.advance()

    def parse(self) -> Polynomial:
        poly = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.pos)
        return poly

    def expr(self) -> Polynomial:
        tok = self.peek()
        negate = False
        if tok.kind == "op" and tok.text in "+-":
            self.advance()
            negate = tok.text == "-"
        poly = self.term()
        if negate:
            poly = -poly
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.advance()
                rhs = self.term()
                poly = poly - rhs if tok.text == "-" else poly + rhs
            else:
                return poly

    def term(self) -> Polynomial:
        poly = self.factor()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "*":
                self.advance()
                poly = poly * self.factor()
            else:
                return poly

    def factor(self) -> Polynomial:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return -self.factor()
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            etok = self.peek()
            if etok.kind == "op" and etok.text == "-":
                raise ParseError("negative exponent", etok.pos)
            if etok.kind != "num" or etok.value is None or etok.value.denominator != 1:
                raise ParseError("exponent must be a non-negative integer", etok.pos)
            self.advance()
            return base ** int(etok.value)
        return base

    def atom(self) -> Polynomial:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Polynomial.constant(self.n, tok.value)
        if tok.kind == "name":
            self.advance()
            if tok.text not in self.names:
                raise ParseError(f"unknown variable {tok.text!r}", tok.pos)
            index = self.names[tok.text]
            if index is None:
                return Polynomial.time(self.n)
            return Polynomial.variable(self.n, index)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"expected a number, variable, or '('", tok.pos)


def parse_poly(text: str, spatial_dim: int) -> Polynomial:
    """Parse an expression in x1..xn (aliases x, y, z for n <= 3) and t.

    Coefficients are integers or a/b rationals; operators are + - * ^ and
    parentheses.  Raises ParseError with a character position on bad input.
    """
    return _Parser(_tokenize(text), spatial_dim).parse()


# ---------------------------------------------------------------------------
# Differential operators and structure maps
# ---------------------------------------------------------------------------


def laplacian(p: Polynomial) -> Polynomial:
    out = Polynomial.zero(p.spatial_dim)
    for i in range(p.spatial_dim):
        out = out + p.partial(i).partial(i)
    return out


def heat_apply(p: Polynomial) -> Polynomial:
    """Apply the heat operator: d/dt - sum_i d^2/dx_i^2, exactly."""
    return p.partial_t() - laplacian(p)


def parabolic_degree(p: Polynomial) -> int:
    """The common parabolic weight 2k + |alpha| of all terms of p.

    Raises ZeroPolynomialError on the zero polynomial and NotHomogeneous
    (with two witness weights) when terms disagree.
    """
    if p.is_zero:
        raise ZeroPolynomialError("the zero polynomial has no parabolic degree")
    weights = {ev.parabolic_weight for ev in p.terms}
    if len(weights) > 1:
        lo, hi = min(weights), max(weights)
        raise NotHomogeneous(lo, hi)
    return weights.pop()


def embed(p: Polynomial, spatial_dim: int, variable_map: Sequence[int]) -> Polynomial:
    """Relabel p's spatial variables into a (possibly larger) dimension.

    variable_map[i] gives the new index of old variable i; t is unchanged.
    """
    if len(variable_map) != p.spatial_dim:
        raise DimensionMismatch("variable_map length must equal p.spatial_dim")
    if len(set(variable_map)) != len(variable_map):
        raise ValueError("variable_map must be injective")
    if any(not 0 <= v < spatial_dim for v in variable_map):
        raise ValueError("variable_map index out of range")
    out: Dict[ExponentVector, Fraction] = {}
    for ev, c in p.terms.items():
        alpha = [0] * spatial_dim
        for old, new in enumerate(variable_map):
            alpha[new] = ev.space_exps[old]
        out[ExponentVector(ev.t_exp, tuple(alpha))] = c
    return Polynomial(spatial_dim, out)


def rotate_xy(p: Polynomial, i: int, j: int, c: RationalLike, s: RationalLike) -> Polynomial:
    """Compose p with the exact rotation x_i -> c*x_i - s*x_j, x_j -> s*x_i + c*x_j.

    (c, s) must be an exact rational point on the unit circle, e.g. the
    Pythagorean pair (3/5, 4/5); otherwise NotOnUnitCircle is raised.
    Parabolic degree and membership in the heat-operator kernel are preserved.
    """
    c, s = Fraction(c), Fraction(s)
    if c * c + s * s != 1:
        raise NotOnUnitCircle(f"c^2 + s^2 = {c * c + s * s} != 1")
    return _substitute_pair(p, i, j, c, s)


def rotate_xy_float(p: Polynomial, i: int, j: int, angle: float) -> Polynomial:
    """Rotation by an arbitrary float angle.

    cos/sin are taken as IEEE doubles and converted to exact rationals, so the
    result is an exact polynomial that is only approximately a rotation of p
    (c^2 + s^2 = 1 holds to double precision, not exactly).  Reports built on
    such polynomials must flag the rotation as inexact.
    """
    c = Fraction(math.cos(angle))
    s = Fraction(math.sin(angle))
    return _substitute_pair(p, i, j, c, s)


def _substitute_pair(p: Polynomial, i: int, j: int, c: Fraction, s: Fraction) -> Polynomial:
    if i == j:
        raise ValueError("rotation axes must differ")
    for axis in (i, j):
        if not 0 <= axis < p.spatial_dim:
            raise ValueError(f"invalid rotation axis {axis} for dimension {p.spatial_dim}")
    out = Polynomial.zero(p.spatial_dim)
    xi = Polynomial.variable(p.spatial_dim, i)
    xj = Polynomial.variable(p.spatial_dim, j)
    new_i = xi.scale(c) - xj.scale(s)
    new_j = xi.scale(s) + xj.scale(c)
    # substitute per term; binomial expansion via polynomial powers
    pow_i: Dict[int, Polynomial] = {}
    pow_j: Dict[int, Polynomial] = {}
    for ev, coeff in p.terms.items():
        ai, aj = ev.space_exps[i], ev.space_exps[j]
        if ai not in pow_i:
            pow_i[ai] = new_i ** ai
        if aj not in pow_j:
            pow_j[aj] = new_j ** aj
        alpha = list(ev.space_exps)
        alpha[i] = 0
        alpha[j] = 0
        rest = Polynomial(p.spatial_dim, {ExponentVector(ev.t_exp, tuple(alpha)): coeff})
        out = out + rest * pow_i[ai] * pow_j[aj]
    return out


def format_rational(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q', integer, or decimal strings into an exact Fraction."""
    return Fraction(text.strip())
