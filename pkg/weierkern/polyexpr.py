"""
Sparse multivariate polynomials with complex coefficients.

A ``MultiPoly`` is immutable: every operation returns a new polynomial.
Terms are kept in graded-lexicographic order (highest first) and that order
drives evaluation, printing and hashing, so results are reproducible.
Coefficients are pruned only when they are exactly zero.

The text grammar (curve files, command-line literals)::

    expr    := term (('+' | '-') term)*
    term    := unary ('*' unary)*
    unary   := ('+' | '-') unary | power
    power   := primary ('^' INTEGER)*
    primary := NUMBER | NUMBER 'i' | VARIABLE | '(' expr ')'
"""

from __future__ import annotations

import math
import re
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DegenerateError, DimensionError, ParseError

Exponent = Tuple[int, ...]
Scalar = Union[int, float, complex]

MAX_VARS = 4
MAX_DEGREE = 64
DEFAULT_VARIABLES = ("x1", "x2", "x3", "x4")


def _grlex_key(exp: Exponent):
    return (sum(exp), exp)


class MultiPoly:
    __slots__ = ("nvars", "_terms", "_map")

    def __init__(self, nvars: int,
                 terms: Union[Mapping[Exponent, Scalar], Iterable[Tuple[Exponent, Scalar]]] = ()):
        if not 1 <= nvars <= MAX_VARS:
            raise DimensionError(f"polynomials carry 1..{MAX_VARS} variables, got {nvars}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Dict[Exponent, complex] = {}
        for exp, coeff in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise DimensionError(f"exponent {exp} does not match {nvars} variables")
            if any(e < 0 for e in exp):
                raise DimensionError(f"negative exponent in {exp}")
            acc[exp] = acc.get(exp, 0j) + complex(coeff)
        clean: Dict[Exponent, complex] = {}
        for exp, c in acc.items():
            if c == 0:
                continue
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise DegenerateError(f"non-finite coefficient {c!r}")
            if sum(exp) > MAX_DEGREE:
                raise DimensionError(f"total degree {sum(exp)} exceeds {MAX_DEGREE}")
            clean[exp] = c
        self.nvars = nvars
        self._terms = tuple(sorted(clean.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True))
        self._map = clean

    # ---- constructors ----

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value: Scalar) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "MultiPoly":
        if not 0 <= index < nvars:
            raise DimensionError(f"variable index {index} outside 0..{nvars - 1}")
        exp = [0] * nvars
        exp[index] = 1
        return cls(nvars, {tuple(exp): 1})

    # ---- inspection ----

    @property
    def terms(self) -> Mapping[Exponent, complex]:
        return MappingProxyType(self._map)

    def items(self) -> Tuple[Tuple[Exponent, complex], ...]:
        """Terms in canonical (graded-lex, descending) order."""
        return self._terms

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def coeff(self, exp: Sequence[int]) -> complex:
        return self._map.get(tuple(exp), 0j)

    def degree(self, var: Optional[int] = None) -> int:
        """Total degree, or degree in one variable; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        if var is None:
            return max(sum(exp) for exp, _ in self._terms)
        self._check_var(var)
        return max(exp[var] for exp, _ in self._terms)

    def depends_on(self, var: int) -> bool:
        return self.degree(var) > 0

    def leading_term(self) -> Tuple[Exponent, complex]:
        if not self._terms:
            raise DegenerateError("zero polynomial has no leading term")
        return self._terms[0]

    def coefficient_scale(self) -> float:
        return max((abs(c) for _, c in self._terms), default=0.0)

    def _check_var(self, var: int) -> None:
        if not 0 <= var < self.nvars:
            raise DimensionError(f"variable index {var} outside 0..{self.nvars - 1}")

    # ---- equality / display ----

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, float, complex)):
            other = MultiPoly.constant(self.nvars, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._map == other._map

    def __hash__(self):
        return hash((self.nvars, self._terms))

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)

    # ---- arithmetic ----

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise DimensionError(f"arity mismatch: {self.nvars} vs {other.nvars} variables")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return MultiPoly.constant(self.nvars, complex(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._map)
        for exp, c in other._terms:
            acc[exp] = acc.get(exp, 0j) + c
        return MultiPoly(self.nvars, acc)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {exp: -c for exp, c in self._terms})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: Dict[Exponent, complex] = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                exp = tuple(a + b for a, b in zip(e1, e2))
                acc[exp] = acc.get(exp, 0j) + c1 * c2
        return MultiPoly(self.nvars, acc)

    __rmul__ = __mul__

    def scale(self, value: Scalar) -> "MultiPoly":
        value = complex(value)
        return MultiPoly(self.nvars, {exp: c * value for exp, c in self._terms})

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise DimensionError(f"power must be a nonnegative integer, got {k!r}")
        k = int(k)
        if k and self.degree() * k > MAX_DEGREE:
            raise DimensionError(f"power {k} exceeds the degree bound {MAX_DEGREE}")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # ---- evaluation ----

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = tuple(point[0])
        if len(point) != self.nvars:
            raise DimensionError(f"expected {self.nvars} coordinates, got {len(point)}")
        arrays = [np.asarray(v, dtype=complex) if isinstance(v, np.ndarray) else complex(v)
                  for v in point]
        shapes = [np.shape(v) for v in arrays if isinstance(v, np.ndarray)]
        total = np.zeros(np.broadcast_shapes(*shapes), dtype=complex) if shapes else 0j
        if not self._terms:
            return total
        powers = self._powers(arrays)
        for exp, c in self._terms:
            term = c
            for v, e in enumerate(exp):
                if e:
                    term = term * powers[v][e]
            total = total + term
        return total

    def eval(self, point):
        return self(*point)

    def _powers(self, values):
        top = [0] * self.nvars
        for exp, _ in self._terms:
            for v, e in enumerate(exp):
                top[v] = max(top[v], e)
        powers = []
        for v, value in enumerate(values):
            pw = [1.0, value]
            for _ in range(2, top[v] + 1):
                pw.append(pw[-1] * value)
            powers.append(pw)
        return powers

    def term_magnitude(self, *point):
        """Sum of |c x^e| over the terms: the scale a residual is measured against."""
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = tuple(point[0])
        magnitudes = [np.abs(v) if isinstance(v, np.ndarray) else abs(complex(v)) for v in point]
        shapes = [np.shape(v) for v in magnitudes if isinstance(v, np.ndarray)]
        total = np.zeros(np.broadcast_shapes(*shapes)) if shapes else 0.0
        if not self._terms:
            return total
        powers = self._powers(magnitudes)
        for exp, c in self._terms:
            term = abs(c)
            for v, e in enumerate(exp):
                if e:
                    term = term * powers[v][e]
            total = total + term
        return total

    # ---- calculus and substitution ----

    def partial(self, var: int) -> "MultiPoly":
        self._check_var(var)
        acc: Dict[Exponent, complex] = {}
        for exp, c in self._terms:
            k = exp[var]
            if k:
                new = list(exp)
                new[var] = k - 1
                acc[tuple(new)] = c * k
        return MultiPoly(self.nvars, acc)

    def univariate_coeffs(self, var: int) -> List["MultiPoly"]:
        """Coefficients c_k (free of ``var``) with sum_k c_k * var^k == self."""
        self._check_var(var)
        d = max(self.degree(var), 0)
        buckets: List[Dict[Exponent, complex]] = [dict() for _ in range(d + 1)]
        for exp, c in self._terms:
            k = exp[var]
            rest = list(exp)
            rest[var] = 0
            buckets[k][tuple(rest)] = c
        return [MultiPoly(self.nvars, b) for b in buckets]

    def substitute(self, var: int, q: Union["MultiPoly", Scalar]) -> "MultiPoly":
        """Replace variable ``var`` by the polynomial ``q`` (Horner in ``var``)."""
        self._check_var(var)
        q = self._coerce(q)
        coeffs = self.univariate_coeffs(var)
        result = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            result = result * q + c
        return result

    def partial_eval(self, assignments: Mapping[int, Scalar]) -> "MultiPoly":
        """Fix the listed variables to numbers; arity is kept, the variables drop out."""
        for var in assignments:
            self._check_var(var)
        acc: Dict[Exponent, complex] = {}
        for exp, c in self._terms:
            value = c
            new = list(exp)
            for var, x in assignments.items():
                if exp[var]:
                    value = value * complex(x) ** exp[var]
                    new[var] = 0
            key = tuple(new)
            acc[key] = acc.get(key, 0j) + value
        return MultiPoly(self.nvars, acc)

    def embed(self, nvars: int, index_map: Sequence[int]) -> "MultiPoly":
        """Move variable v to slot index_map[v] of a polynomial with ``nvars`` variables."""
        if len(index_map) != self.nvars:
            raise DimensionError("index map must name a slot for every variable")
        acc: Dict[Exponent, complex] = {}
        for exp, c in self._terms:
            new = [0] * nvars
            for v, e in enumerate(exp):
                new[index_map[v]] += e
            acc[tuple(new)] = acc.get(tuple(new), 0j) + c
        return MultiPoly(nvars, acc)

    def drop_variable(self, var: int) -> "MultiPoly":
        self._check_var(var)
        if self.depends_on(var):
            raise DimensionError(f"cannot drop x{var + 1}: the polynomial depends on it")
        keep = [v for v in range(self.nvars) if v != var]
        return MultiPoly(self.nvars - 1, {tuple(exp[v] for v in keep): c for exp, c in self._terms})

    def homogenize(self) -> "MultiPoly":
        """Homogenize by an appended variable (the last slot plays xi_0)."""
        d = self.degree()
        if d < 0:
            return MultiPoly.zero(self.nvars + 1)
        return MultiPoly(self.nvars + 1, {exp + (d - sum(exp),): c for exp, c in self._terms})

    def top_form(self) -> "MultiPoly":
        d = self.degree()
        return MultiPoly(self.nvars, {exp: c for exp, c in self._terms if sum(exp) == d})

    # ---- divided differences ----

    def divided_difference_at(self, var: int, point, other):
        """(p(.., a, ..) - p(.., b, ..)) / (a - b) with a = point[var], b = other.

        Evaluated term by term as sum_j a^j b^(k-1-j), so it is exact and
        continuous at a = b, where it equals the partial derivative.
        """
        self._check_var(var)
        point = list(point)
        if len(point) != self.nvars:
            raise DimensionError(f"expected {self.nvars} coordinates, got {len(point)}")
        a = point[var]
        b = other
        point[var] = 1.0
        arrays = [np.asarray(v, dtype=complex) if isinstance(v, np.ndarray) else complex(v)
                  for v in point + [a, b]]
        shapes = [np.shape(v) for v in arrays if isinstance(v, np.ndarray)]
        total = np.zeros(np.broadcast_shapes(*shapes), dtype=complex) if shapes else 0j
        top = max((exp[var] for exp, _ in self._terms), default=0)
        a, b = arrays[-2], arrays[-1]
        # h[k] = sum_{j<k} a^j b^(k-1-j)
        h = [0.0, 1.0]
        a_pow = 1.0
        for k in range(2, top + 1):
            a_pow = a_pow * a
            h.append(h[-1] * b + a_pow)
        powers = self._powers(arrays[:-2])
        for exp, c in self._terms:
            k = exp[var]
            if not k:
                continue
            term = c * h[k]
            for v, e in enumerate(exp):
                if e and v != var:
                    term = term * powers[v][e]
            total = total + term
        return total

    def divided_difference(self, var: int) -> "MultiPoly":
        """Symbolic divided difference in ``var``; the second node is a new last variable."""
        self._check_var(var)
        if self.nvars >= MAX_VARS:
            raise DimensionError("no free variable slot for the second node")
        acc: Dict[Exponent, complex] = {}
        for exp, c in self._terms:
            k = exp[var]
            for j in range(k):
                new = list(exp) + [k - 1 - j]
                new[var] = j
                acc[tuple(new)] = acc.get(tuple(new), 0j) + c
        return MultiPoly(self.nvars + 1, acc)

    # ---- division ----

    def exact_div(self, divisor: "MultiPoly") -> "MultiPoly":
        """Quotient of a division known to be exact (Bareiss steps).

        Terms of the running remainder that the leading monomial of the divisor
        does not divide are rounding residue and are discarded.
        """
        divisor = self._coerce(divisor)
        if divisor.is_zero:
            raise DegenerateError("division by the zero polynomial")
        lead_exp, lead_c = divisor._terms[0]
        if divisor.degree() == 0:
            return self.scale(1.0 / lead_c)
        rest = divisor._terms[1:]
        remainder = dict(self._map)
        quotient: Dict[Exponent, complex] = {}
        while remainder:
            exp = max(remainder, key=_grlex_key)
            c = remainder.pop(exp)
            shift = tuple(a - b for a, b in zip(exp, lead_exp))
            if min(shift) < 0:
                continue
            q = c / lead_c
            quotient[shift] = quotient.get(shift, 0j) + q
            for e2, c2 in rest:
                target = tuple(a + b for a, b in zip(shift, e2))
                value = remainder.get(target, 0j) - q * c2
                if value == 0:
                    remainder.pop(target, None)
                else:
                    remainder[target] = value
        return MultiPoly(self.nvars, quotient)


# ---------------------------------------------------------------------------
# resultants
# ---------------------------------------------------------------------------

def sylvester_matrix(p: MultiPoly, q: MultiPoly, var: int) -> List[List[MultiPoly]]:
    """Sylvester matrix in ``var``; the shifted rows of ``q`` come first.

    With this row order the determinant equals (-1)^(deg p * deg q) times the
    textbook Res(p, q).
    """
    if p.nvars != q.nvars:
        raise DimensionError(f"arity mismatch: {p.nvars} vs {q.nvars} variables")
    a = p.univariate_coeffs(var)
    b = q.univariate_coeffs(var)
    m, n = len(a) - 1, len(b) - 1
    if m <= 0 and n <= 0:
        raise DegenerateError(f"resultant in x{var + 1} of two polynomials free of it")
    zero = MultiPoly.zero(p.nvars)
    size = m + n
    rows: List[List[MultiPoly]] = []
    for shift in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(b)):
            row[shift + k] = c
        rows.append(row)
    for shift in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(a)):
            row[shift + k] = c
        rows.append(row)
    return rows


def bareiss_det(matrix: List[List[MultiPoly]], nvars: int) -> MultiPoly:
    """Fraction-free determinant of a square polynomial matrix."""
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return MultiPoly.constant(nvars, 1)
    sign = 1
    previous = MultiPoly.constant(nvars, 1)
    for k in range(n - 1):
        if m[k][k].is_zero:
            swap = next((i for i in range(k + 1, n) if not m[i][k].is_zero), None)
            if swap is None:
                return MultiPoly.zero(nvars)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (pivot * m[i][j] - m[i][k] * m[k][j]).exact_div(previous)
        previous = pivot
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def resultant(p: MultiPoly, q: MultiPoly, var: int) -> MultiPoly:
    """Eliminate ``var`` from p and q; vanishes on the projection of common roots."""
    return bareiss_det(sylvester_matrix(p, q, var), p.nvars)


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

def _format_real(x: float) -> str:
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


def _format_coeff(c: complex) -> Tuple[bool, str]:
    """(negative, magnitude text); complex coefficients are never negative."""
    if c.imag == 0:
        return c.real < 0, _format_real(abs(c.real))
    if c.real == 0:
        return c.imag < 0, _format_real(abs(c.imag)) + "i"
    sign = "-" if c.imag < 0 else "+"
    return False, f"({_format_real(c.real)}{sign}{_format_real(abs(c.imag))}i)"


def format_poly(p: MultiPoly, variables: Optional[Sequence[str]] = None) -> str:
    names = list(variables) if variables is not None else list(DEFAULT_VARIABLES[:p.nvars])
    if len(names) != p.nvars:
        raise DimensionError(f"{len(names)} names for {p.nvars} variables")
    if p.is_zero:
        return "0"
    pieces = []
    for index, (exp, c) in enumerate(p.items()):
        negative, coeff = _format_coeff(c)
        mono = "*".join(name if e == 1 else f"{name}^{e}" for name, e in zip(names, exp) if e)
        if mono and coeff == "1":
            body = mono
        elif mono:
            body = f"{coeff}*{mono}"
        else:
            body = coeff
        if index == 0:
            pieces.append(("-" if negative else "") + body)
        else:
            pieces.append((" - " if negative else " + ") + body)
    return "".join(pieces)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>i(?![A-Za-z0-9_]))?"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*^()])"
    r")"
)


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int):
        self.kind = kind
        self.text = text
        self.pos = pos


class _Cursor:
    """Token stream over one expression; positions are character indices."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = self._tokenize(text)
        self.index = 0

    def _tokenize(self, text: str) -> List[_Token]:
        tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            match = _TOKEN.match(text, pos)
            if not match or match.end() == pos:
                bad = len(text) - len(text[pos:].lstrip())
                raise ParseError(f"unexpected character {text[bad]!r}", self.byte_offset(bad))
            start = match.start(match.lastgroup) if match.lastgroup != "imag" else match.start("number")
            if match.group("number") is not None:
                kind = "imag" if match.group("imag") else "number"
                tokens.append(_Token(kind, match.group("number"), match.start("number")))
            elif match.group("name") is not None:
                tokens.append(_Token("name", match.group("name"), start))
            else:
                tokens.append(_Token(match.group("op"), match.group("op"), start))
            pos = match.end()
        tokens.append(_Token("end", "", len(text)))
        return tokens

    def byte_offset(self, pos: int) -> int:
        return len(self.text[:pos].encode("utf-8"))

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def take(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def fail(self, message: str, token: Optional[_Token] = None):
        token = token or self.peek()
        raise ParseError(message, self.byte_offset(token.pos))


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.cursor = _Cursor(text)
        self.variables = list(variables)
        self.nvars = max(1, len(self.variables))
        if len(self.variables) > MAX_VARS:
            raise DimensionError(f"at most {MAX_VARS} variables")

    def parse(self) -> MultiPoly:
        result = self.expr()
        if self.cursor.peek().kind != "end":
            token = self.cursor.peek()
            self.cursor.fail(f"unexpected {token.text!r} (explicit '*' required)", token)
        return result

    def expr(self) -> MultiPoly:
        result = self.term()
        while self.cursor.peek().kind in ("+", "-"):
            op = self.cursor.take().kind
            right = self.term()
            result = result + right if op == "+" else result - right
        return result

    def term(self) -> MultiPoly:
        result = self.unary()
        while self.cursor.peek().kind == "*":
            self.cursor.take()
            result = result * self.unary()
        return result

    def unary(self) -> MultiPoly:
        kind = self.cursor.peek().kind
        if kind == "-":
            self.cursor.take()
            return -self.unary()
        if kind == "+":
            self.cursor.take()
            return self.unary()
        return self.power()

    def power(self) -> MultiPoly:
        base = self.primary()
        while self.cursor.peek().kind == "^":
            self.cursor.take()
            token = self.cursor.peek()
            if token.kind != "number" or not token.text.isdigit():
                self.cursor.fail("exponent not a nonnegative integer", token)
            self.cursor.take()
            base = base ** int(token.text)
        return base

    def primary(self) -> MultiPoly:
        token = self.cursor.take()
        if token.kind == "number":
            return MultiPoly.constant(self.nvars, float(token.text))
        if token.kind == "imag":
            return MultiPoly.constant(self.nvars, complex(0.0, float(token.text)))
        if token.kind == "name":
            if token.text not in self.variables:
                self.cursor.fail(f"unknown variable {token.text!r}", token)
            return MultiPoly.variable(self.nvars, self.variables.index(token.text))
        if token.kind == "(":
            inner = self.expr()
            closing = self.cursor.take()
            if closing.kind != ")":
                self.cursor.fail("expected ')'", closing)
            return inner
        if token.kind == "end":
            self.cursor.fail("unexpected end of expression", token)
        self.cursor.fail(f"unexpected {token.text!r}", token)


def parse(text: str, variables: Sequence[str] = DEFAULT_VARIABLES[:3]) -> MultiPoly:
    """Parse a polynomial expression over the ordered variable names."""
    if not isinstance(text, str):
        raise ParseError("expression must be a string")
    return _Parser(text, variables).parse()


def parse_scalar(text: str) -> complex:
    """A constant expression such as ``-1``, ``2i`` or ``(1+2i)``."""
    poly = _Parser(text, ()).parse()
    if poly.degree() > 0:
        raise ParseError(f"{text!r} is not a constant")
    return poly.coeff((0,))
