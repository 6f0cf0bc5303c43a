"""Exact sparse polynomial arithmetic over Q and over prime fields.

Variables are indexed coordinates ``x0, x1, ..., y0, ..., z0, ...`` (one
family per ambient coordinate, the index is the jet order).  A monomial is a
sorted tuple of ``(variable, exponent)`` pairs and a polynomial a mapping
from monomials to nonzero coefficients.  Coefficients are
``fractions.Fraction`` in characteristic 0 and canonical residues
``0 <= c < p`` in characteristic ``p``.

Everything here is exact; there is no floating point anywhere in the
package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import re
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union


FAMILIES = ("x", "y", "z", "t")
_FAMILY_INDEX = {f: i for i, f in enumerate(FAMILIES)}

# A variable is a (family, order) pair, e.g. ("z", 3) prints as "z3".
Var = tuple[str, int]
# A monomial is a tuple of (variable, exponent) pairs sorted by variable.
Mono = tuple[tuple[Var, int], ...]

ONE_MONO: Mono = ()


def var(family: str, order: int) -> Var:
    if family not in _FAMILY_INDEX:
        raise ValueError(f"unknown variable family {family!r}")
    if order < 0:
        raise ValueError("variable order must be >= 0")
    return (family, order)


def var_key(v: Var) -> tuple[int, int]:
    """Total order on variables: by family (x < y < z < t), then by order."""
    return (_FAMILY_INDEX[v[0]], v[1])


def var_name(v: Var) -> str:
    return f"{v[0]}{v[1]}"


def mono_from_pairs(pairs: Iterable[tuple[Var, int]]) -> Mono:
    acc: dict[Var, int] = {}
    for v, e in pairs:
        if e:
            acc[v] = acc.get(v, 0) + e
    return tuple(sorted(((v, e) for v, e in acc.items() if e), key=lambda p: var_key(p[0])))


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    return mono_from_pairs(list(a) + list(b))


def mono_degree(m: Mono) -> int:
    return sum(e for _, e in m)


def mono_vars(m: Mono) -> tuple[Var, ...]:
    return tuple(v for v, _ in m)


def mono_key(m: Mono) -> tuple:
    """Deterministic sort key for monomials (graded, then lexicographic)."""
    return (mono_degree(m), tuple((var_key(v), e) for v, e in m))


class Gaussian:
    """A scalar ``re + im*i`` in a quadratic extension adjoining i.

    Both parts live in the base domain (Fraction in characteristic 0,
    canonical residues in characteristic p).  Instances compare equal to
    plain base scalars when the imaginary part vanishes, so the rest of
    the polynomial layer never needs to care which domain it is in.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = re
        self.im = im

    def _coerced(self, other):
        if isinstance(other, Gaussian):
            return other
        if isinstance(other, (int, Fraction)):
            return Gaussian(other, 0)
        return None

    def __add__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return Gaussian(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return Gaussian(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return Gaussian(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __mod__(self, p: int) -> "Gaussian":
        return Gaussian(self.re % p, self.im % p)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Gaussian):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        # Must agree with the plain scalar an im == 0 value equals.
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __repr__(self) -> str:
        return f"Gaussian({self.re!r}, {self.im!r})"


Scalar = Union[int, Fraction, Gaussian]


@dataclass(frozen=True)
class Field:
    """Q (char == 0) or the prime field F_p (char == p).

    With ``i_adjoined`` the scalars are Gaussian values over the base:
    Q(i), or F_p(i) for p = 3 mod 4 (so that -1 is a non-square and the
    extension is a field).  Primes p = 1 mod 4 never need the flag since
    -1 already has a square root in F_p.
    """

    char: int
    i_adjoined: bool = False

    def __post_init__(self) -> None:
        if self.char < 0 or self.char == 1:
            raise ValueError(f"invalid characteristic {self.char}")
        if self.char > 1 and not _is_prime(self.char):
            raise ValueError(f"characteristic {self.char} is not prime")
        if self.i_adjoined and self.char and self.char % 4 != 3:
            raise ValueError(
                f"-1 is already a square mod {self.char}; nothing to adjoin"
            )

    def _base_of(self, value) -> Scalar:
        if self.char == 0:
            return value if isinstance(value, Fraction) else Fraction(value)
        if isinstance(value, Fraction):
            den = value.denominator % self.char
            if den == 0:
                raise ZeroDivisionError("denominator vanishes in F_p")
            return (value.numerator * pow(den, -1, self.char)) % self.char
        return value % self.char

    def of(self, value: Scalar) -> Scalar:
        if self.i_adjoined:
            if isinstance(value, Gaussian):
                return Gaussian(self._base_of(value.re), self._base_of(value.im))
            return Gaussian(self._base_of(value), self._base_of(0))
        if isinstance(value, Gaussian):
            if value.im != 0:
                raise ValueError("imaginary scalar in a field without i")
            return self._base_of(value.re)
        return self._base_of(value)

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        return (a + b) % self.char if self.char else a + b

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        return (a * b) % self.char if self.char else a * b

    def neg(self, a: Scalar) -> Scalar:
        return (-a) % self.char if self.char else -a

    def inv(self, a: Scalar) -> Scalar:
        if self.i_adjoined:
            a = self.of(a)
            norm = a.re * a.re + a.im * a.im
            ninv = self._base_inv(norm % self.char if self.char else norm)
            return self.mul(Gaussian(a.re, -a.im), ninv)
        if isinstance(a, Gaussian):
            a = self.of(a)
        return self._base_inv(a)

    def _base_inv(self, a) -> Scalar:
        if self.char:
            if a % self.char == 0:
                raise ZeroDivisionError("inverse of 0 in F_p")
            return pow(a, -1, self.char)
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in Q")
        return Fraction(1, 1) / a

    @property
    def zero(self) -> Scalar:
        if self.i_adjoined:
            return Gaussian(self._base_of(0), self._base_of(0))
        return 0 if self.char else Fraction(0)

    @property
    def one(self) -> Scalar:
        if self.i_adjoined:
            return Gaussian(self._base_of(1), self._base_of(0))
        return 1 if self.char else Fraction(1)

    def square_root(self, c: Scalar) -> Optional[Scalar]:
        """A square root of ``c`` in this field, or None if there is none
        (or, in characteristic 0, none expressible over Q(i))."""
        c = self.of(c)
        if self.char:
            if self.i_adjoined:
                for a in range(self.char):
                    for b in range(self.char):
                        g = Gaussian(a, b)
                        if self.mul(g, g) == c:
                            return g
                return None
            for a in range(self.char):
                if (a * a) % self.char == c:
                    return a
            return None
        if self.i_adjoined:
            if c.im != 0:
                return None
            r = _fraction_sqrt(abs(c.re))
            if r is None:
                return None
            return Gaussian(r, Fraction(0)) if c.re >= 0 else Gaussian(Fraction(0), r)
        if c < 0:
            return None
        return _fraction_sqrt(c)


def _fraction_sqrt(c: Fraction) -> Optional[Fraction]:
    import math

    rn = math.isqrt(c.numerator)
    rd = math.isqrt(c.denominator)
    if rn * rn == c.numerator and rd * rd == c.denominator:
        return Fraction(rn, rd)
    return None


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


QQ = Field(0)


class Polynomial:
    """Immutable sparse multivariate polynomial over a fixed Field."""

    __slots__ = ("field", "terms")

    def __init__(self, field: Field, terms: Mapping[Mono, Scalar]):
        norm: dict[Mono, Scalar] = {}
        for m, c in terms.items():
            c = field.of(c)
            if c:
                norm[m] = c
        self.field = field
        self.terms = norm

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(field: Field) -> "Polynomial":
        return Polynomial(field, {})

    @staticmethod
    def const(field: Field, c: Scalar) -> "Polynomial":
        return Polynomial(field, {ONE_MONO: c})

    @staticmethod
    def variable(field: Field, v: Var, exp: int = 1) -> "Polynomial":
        return Polynomial(field, {mono_from_pairs([(v, exp)]): field.one})

    @staticmethod
    def monomial(field: Field, m: Mono, c: Scalar = 1) -> "Polynomial":
        return Polynomial(field, {m: c})

    # -- basic structure ----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.field == other.field and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.field.char, frozenset(self.terms.items())))

    def sorted_terms(self) -> list[tuple[Mono, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: mono_key(kv[0]))

    def variables(self) -> set[Var]:
        out: set[Var] = set()
        for m in self.terms:
            out.update(mono_vars(m))
        return out

    def max_order(self) -> int:
        return max((v[1] for m in self.terms for v in mono_vars(m)), default=-1)

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def degree_in(self, v: Var) -> int:
        deg = 0
        for m in self.terms:
            for w, e in m:
                if w == v:
                    deg = max(deg, e)
        return deg

    def constant_term(self) -> Scalar:
        return self.terms.get(ONE_MONO, self.field.zero)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        if not other.terms:
            return self
        terms = dict(self.terms)
        f = self.field
        for m, c in other.terms.items():
            s = f.add(terms.get(m, f.zero), c)
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        out = Polynomial.__new__(Polynomial)
        out.field = f
        out.terms = terms
        return out

    def __neg__(self) -> "Polynomial":
        f = self.field
        out = Polynomial.__new__(Polynomial)
        out.field = f
        out.terms = {m: f.neg(c) for m, c in self.terms.items()}
        return out

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        f = self.field
        terms: dict[Mono, Scalar] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                s = f.add(terms.get(m, f.zero), f.mul(c1, c2))
                if s:
                    terms[m] = s
                else:
                    terms.pop(m, None)
        out = Polynomial.__new__(Polynomial)
        out.field = f
        out.terms = terms
        return out

    def scale(self, c: Scalar) -> "Polynomial":
        c = self.field.of(c)
        if not c:
            return Polynomial.zero(self.field)
        f = self.field
        return Polynomial(f, {m: f.mul(cc, c) for m, cc in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.const(self.field, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def _check(self, other: "Polynomial") -> None:
        if self.field != other.field:
            raise ValueError("mixed coefficient fields")

    # -- structural operations ----------------------------------------

    def reduce_mod_vars(self, zero_vars: Iterable[Var]) -> "Polynomial":
        """Drop every term containing one of the given variables.

        This is reduction modulo the ideal generated by the variables.
        """
        zs = set(zero_vars)
        if not zs:
            return self
        terms = {m: c for m, c in self.terms.items() if not any(v in zs for v, _ in m)}
        out = Polynomial.__new__(Polynomial)
        out.field = self.field
        out.terms = terms
        return out

    def partial(self, v: Var) -> "Polynomial":
        """Formal partial derivative (matches the usual one; in char p the
        exponent multiplier is reduced mod p)."""
        f = self.field
        terms: dict[Mono, Scalar] = {}
        for m, c in self.terms.items():
            for i, (w, e) in enumerate(m):
                if w == v:
                    coeff = f.mul(c, f.of(e))
                    if not coeff:
                        break
                    rest = list(m)
                    if e == 1:
                        rest.pop(i)
                    else:
                        rest[i] = (w, e - 1)
                    mm = tuple(rest)
                    s = f.add(terms.get(mm, f.zero), coeff)
                    if s:
                        terms[mm] = s
                    else:
                        terms.pop(mm, None)
                    break
        return Polynomial(f, terms)

    def split_by_degree(self, v: Var) -> dict[int, "Polynomial"]:
        """Write self as a polynomial in ``v``; maps degree -> coefficient."""
        buckets: dict[int, dict[Mono, Scalar]] = {}
        for m, c in self.terms.items():
            deg = 0
            rest = []
            for w, e in m:
                if w == v:
                    deg = e
                else:
                    rest.append((w, e))
            buckets.setdefault(deg, {})[tuple(rest)] = c
        return {d: Polynomial(self.field, t) for d, t in buckets.items()}

    def coefficient_of(self, v: Var) -> tuple["Polynomial", "Polynomial"]:
        """Split ``self = c*v + rest`` with ``rest`` free of ``v``.

        Raises ValueError if ``v`` occurs with exponent >= 2.
        """
        parts = self.split_by_degree(v)
        if any(d >= 2 for d in parts):
            raise ValueError(f"{var_name(v)} occurs nonlinearly")
        c = parts.get(1, Polynomial.zero(self.field))
        rest = parts.get(0, Polynomial.zero(self.field))
        return c, rest

    def content_monomial(self) -> Mono:
        """Greatest common monomial factor of all terms (1 for the zero poly)."""
        if not self.terms:
            return ONE_MONO
        common: Optional[dict[Var, int]] = None
        for m in self.terms:
            d = dict(m)
            if common is None:
                common = d
            else:
                common = {v: min(e, d[v]) for v, e in common.items() if v in d}
            if not common:
                return ONE_MONO
        assert common is not None
        return mono_from_pairs(common.items())

    def divide_monomial(self, m: Mono) -> "Polynomial":
        """Exact division of every term by the monomial ``m``."""
        need = dict(m)
        terms: dict[Mono, Scalar] = {}
        for mm, c in self.terms.items():
            d = dict(mm)
            for v, e in need.items():
                if d.get(v, 0) < e:
                    raise ValueError("monomial does not divide all terms")
                d[v] -= e
            terms[mono_from_pairs(d.items())] = c
        return Polynomial(self.field, terms)

    def substitute(self, values: Mapping[Var, "Polynomial"]) -> "Polynomial":
        """Substitute polynomials for variables (generic composition)."""
        f = self.field
        out = Polynomial.zero(f)
        pow_cache: dict[tuple[Var, int], Polynomial] = {}
        for m, c in self.terms.items():
            term = Polynomial.const(f, c)
            for v, e in m:
                if v in values:
                    key = (v, e)
                    if key not in pow_cache:
                        pow_cache[key] = values[v] ** e
                    term = term * pow_cache[key]
                else:
                    term = term * Polynomial.variable(f, v, e)
            out = out + term
        return out

    def evaluate(self, point: Mapping[Var, Scalar]) -> Scalar:
        """Evaluate at a point; unassigned variables default to 0."""
        f = self.field
        total = f.zero
        for m, c in self.terms.items():
            val = c
            for v, e in m:
                a = f.of(point.get(v, 0))
                if not a:
                    val = f.zero
                    break
                for _ in range(e):
                    val = f.mul(val, a)
            if val:
                total = f.add(total, val)
        return total

    def shift_orders(self, family_shift: Mapping[str, int]) -> "Polynomial":
        """Raise the order of every variable by a per-family offset."""
        terms: dict[Mono, Scalar] = {}
        for m, c in self.terms.items():
            mm = mono_from_pairs(
                (((fam, order + family_shift.get(fam, 0)), e) for (fam, order), e in m)
            )
            terms[mm] = c
        return Polynomial(self.field, terms)

    # -- printing / parsing -------------------------------------------

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Polynomial({self.field.char}, {format_poly(self)})"


def format_poly(p: Polynomial) -> str:
    """Canonical plain-text form, e.g. ``z3^2 + x2^3`` or ``2*x1*y1 - z0``."""
    if p.is_zero():
        return "0"
    parts: list[str] = []
    for m, c in p.sorted_terms():
        sign = "+"
        if p.field.char == 0:
            if isinstance(c, Gaussian):
                if (c.im == 0 and c.re < 0) or (c.re == 0 and c.im < 0):
                    sign = "-"
                    c = -c
            elif c < 0:
                sign = "-"
                c = -c
        factors = ["*".join(_fmt_factor(v, e) for v, e in m)] if m else []
        if c != 1 or not m:
            factors.insert(0, _fmt_scalar(c))
        body = "*".join(f for f in factors if f)
        if not parts:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def _fmt_factor(v: Var, e: int) -> str:
    return var_name(v) if e == 1 else f"{var_name(v)}^{e}"


def _fmt_scalar(c: Scalar) -> str:
    if isinstance(c, Gaussian):
        if not c.im:
            return _fmt_scalar(c.re)
        if not c.re:
            return _fmt_imag(c.im)
        if isinstance(c.im, Fraction) and c.im < 0:
            return f"({_fmt_scalar(c.re)} - {_fmt_imag(-c.im)})"
        return f"({_fmt_scalar(c.re)} + {_fmt_imag(c.im)})"
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    return str(int(c))


def _fmt_imag(b) -> str:
    if b == 1:
        return "i"
    if b == -1:
        return "-i"
    return f"{_fmt_scalar(b)}*i"


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<imag>i)|(?P<var>[xyzt]\d*)|(?P<op>[-+*^()]))"
)


class ParseError(ValueError):
    pass


def parse_poly(text: str, field: Field) -> Polynomial:
    """Parse the plain-text syntax: ``z3^2 + x2^3``, ``2*x1y1 - 1/2 z0``.

    A bare family letter (``x``) means order 0 (``x0``).  The ``*`` between
    factors is optional.  ``^`` denotes powers with nonnegative integer
    exponents.
    """
    tokens = _tokenize(text)
    pos = 0

    def peek() -> Optional[str]:
        return tokens[pos][0] if pos < len(tokens) else None

    def take() -> tuple[str, str]:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input")
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_expr() -> Polynomial:
        sign = 1
        while peek() == "op" and tokens[pos][1] in "+-":
            if take()[1] == "-":
                sign = -sign
        acc = parse_term().scale(sign)
        while peek() == "op" and tokens[pos][1] in "+-":
            sign = 1
            while peek() == "op" and tokens[pos][1] in "+-":
                if take()[1] == "-":
                    sign = -sign
            acc = acc + parse_term().scale(sign)
        return acc

    def parse_term() -> Polynomial:
        acc = parse_factor()
        while True:
            nxt = peek()
            if nxt == "op" and tokens[pos][1] == "*":
                take()
                acc = acc * parse_factor()
            elif nxt in ("num", "var", "imag") or (nxt == "op" and tokens[pos][1] == "("):
                acc = acc * parse_factor()
            else:
                return acc

    def parse_factor() -> Polynomial:
        kind, text_ = take()
        if kind == "num":
            if "/" in text_:
                a, b = text_.split("/")
                base = Polynomial.const(field, Fraction(int(a), int(b)))
            else:
                base = Polynomial.const(field, int(text_))
        elif kind == "imag":
            if not field.i_adjoined:
                raise ParseError("i is not available in this field")
            base = Polynomial.const(field, Gaussian(0, 1))
        elif kind == "var":
            fam = text_[0]
            order = int(text_[1:]) if len(text_) > 1 else 0
            base = Polynomial.variable(field, var(fam, order))
        elif kind == "op" and text_ == "(":
            base = parse_expr()
            k, t = take() if pos < len(tokens) else ("", "")
            if (k, t) != ("op", ")"):
                raise ParseError("unbalanced parentheses")
        else:
            raise ParseError(f"unexpected token {text_!r}")
        if peek() == "op" and tokens[pos][1] == "^":
            take()
            k, t = take() if pos < len(tokens) else ("", "")
            if k != "num" or "/" in t:
                raise ParseError("exponent must be a nonnegative integer")
            base = base ** int(t)
        return base

    result = parse_expr()
    if pos != len(tokens):
        raise ParseError(f"trailing input near {tokens[pos][1]!r}")
    return result


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"bad character {text[pos]!r}")
            break
        pos = m.end()
        for kind in ("num", "imag", "var", "op"):
            if m.group(kind) is not None:
                tokens.append((kind, m.group(kind)))
                break
    return tokens


class RationalExpression:
    """A pair num/den of polynomials; den is a product of declared units.

    No gcd cancellation is attempted: equality is decided by
    cross-multiplication, which is exact over a domain.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Optional[Polynomial] = None):
        if den is None:
            den = Polynomial.const(num.field, 1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num = num
        self.den = den

    @property
    def field(self) -> Field:
        return self.num.field

    @staticmethod
    def of_poly(p: Polynomial) -> "RationalExpression":
        return RationalExpression(p)

    @staticmethod
    def of_var(field: Field, v: Var) -> "RationalExpression":
        return RationalExpression(Polynomial.variable(field, v))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other: "RationalExpression") -> "RationalExpression":
        if self.den == other.den:
            return RationalExpression(self.num + other.num, self.den)
        return RationalExpression(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __neg__(self) -> "RationalExpression":
        return RationalExpression(-self.num, self.den)

    def __sub__(self, other: "RationalExpression") -> "RationalExpression":
        return self + (-other)

    def __mul__(self, other: "RationalExpression") -> "RationalExpression":
        return RationalExpression(self.num * other.num, self.den * other.den)

    def __pow__(self, n: int) -> "RationalExpression":
        return RationalExpression(self.num ** n, self.den ** n)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalExpression):
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self) -> int:
        raise TypeError("RationalExpression is unhashable")

    def map_polys(self, fn) -> "RationalExpression":
        return RationalExpression(fn(self.num), fn(self.den))

    def __str__(self) -> str:
        if self.den == Polynomial.const(self.num.field, 1):
            return format_poly(self.num)
        return f"({format_poly(self.num)}) / ({format_poly(self.den)})"

    __repr__ = __str__
