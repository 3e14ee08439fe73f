"""Group ring Z[H] of a free abelian group H = Z^r, with xi-orderings.

Elements are sparse Laurent polynomials in t1, ..., tr.  Coefficients are
Python ints; a rational ("field") mode stores :class:`fractions.Fraction`
values instead.  An injective class xi: H -> R is represented by a stack of
rational rows compared lexicographically (see :class:`XiOrder`).
"""
from __future__ import annotations

import enum
import re
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

Exponent = Tuple[int, ...]
Coefficient = Union[int, Fraction]


class RankMismatch(ValueError):
    pass


class NotDivisible(ArithmeticError):
    pass


class SignPolicy(str, enum.Enum):
    """Which lowest coefficients count as membership in S_xi."""

    STRICT = "strict-plus-one"
    PLUS_MINUS = "plus-minus-one"


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class LaurentPoly:
    """Immutable finitely supported map Z^r -> Z (or Q)."""

    __slots__ = ("rank", "_terms", "_hash")

    def __init__(self, terms: Mapping[Exponent, Coefficient] | Iterable = (), rank: int = 1):
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = terms
        acc: Dict[Exponent, Coefficient] = {}
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != rank:
                raise RankMismatch(f"exponent {e} does not have length {rank}")
            acc[e] = acc.get(e, 0) + c
        self.rank = rank
        self._terms = {e: _norm(c) for e, c in acc.items() if c != 0}
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def _raw(cls, terms: Dict[Exponent, Coefficient], rank: int) -> "LaurentPoly":
        p = cls.__new__(cls)
        p.rank = rank
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, rank: int = 1) -> "LaurentPoly":
        return cls._raw({}, rank)

    @classmethod
    def constant(cls, c: Coefficient, rank: int = 1) -> "LaurentPoly":
        return cls._raw({(0,) * rank: _norm(c)} if c else {}, rank)

    @classmethod
    def one(cls, rank: int = 1) -> "LaurentPoly":
        return cls.constant(1, rank)

    @classmethod
    def monomial(cls, exp: Sequence[int], c: Coefficient = 1) -> "LaurentPoly":
        exp = tuple(int(x) for x in exp)
        return cls._raw({exp: _norm(c)} if c else {}, len(exp))

    @classmethod
    def variable(cls, i: int, rank: int) -> "LaurentPoly":
        e = [0] * rank
        e[i] = 1
        return cls.monomial(e)

    # -- container protocol -------------------------------------------------
    def terms(self) -> Mapping[Exponent, Coefficient]:
        return self._terms

    def items(self):
        return self._terms.items()

    def support(self) -> Iterator[Exponent]:
        return iter(self._terms)

    def coefficient(self, exp: Sequence[int]) -> Coefficient:
        return self._terms.get(tuple(exp), 0)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self._terms.values())

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.rank == other.rank and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({(0,) * self.rank: other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rank, frozenset(self._terms.items())))
        return self._hash

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.rank != self.rank:
                raise RankMismatch(f"rank {self.rank} vs rank {other.rank}")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.constant(other, self.rank)
        raise TypeError(f"cannot combine LaurentPoly with {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = _norm(v)
            else:
                out.pop(e, None)
        return LaurentPoly._raw(out, self.rank)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({e: -c for e, c in self._terms.items()}, self.rank)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return LaurentPoly.zero(self.rank)
            return LaurentPoly._raw({e: _norm(c * other) for e, c in self._terms.items()}, self.rank)
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out: Dict[Exponent, Coefficient] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly._raw({e: _norm(c) for e, c in out.items() if c}, self.rank)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise NotDivisible("only monomials are units of the group ring")
            (e, c), = self._terms.items()
            if c not in (1, -1):
                raise NotDivisible("monomial with non-unit coefficient")
            return LaurentPoly.monomial([-x * (-n) for x in e], c ** (-n))
        result = LaurentPoly.one(self.rank)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, exp: Sequence[int]) -> "LaurentPoly":
        """Multiply by the group element ``exp``."""
        exp = tuple(exp)
        return LaurentPoly._raw(
            {tuple(a + b for a, b in zip(e, exp)): c for e, c in self._terms.items()}, self.rank
        )

    def map_exponents(self, matrix: Sequence[Sequence[int]], rank: int) -> "LaurentPoly":
        """Apply the ring map induced by the lattice homomorphism ``matrix`` (rank x self.rank)."""
        out: Dict[Exponent, Coefficient] = {}
        for e, c in self._terms.items():
            img = tuple(sum(row[j] * e[j] for j in range(self.rank)) for row in matrix)
            out[img] = out.get(img, 0) + c
        return LaurentPoly(out, rank)

    def embed(self, rank: int, offset: int) -> "LaurentPoly":
        """Place the variables at positions offset..offset+self.rank of a larger lattice."""
        pad_l = (0,) * offset
        pad_r = (0,) * (rank - offset - self.rank)
        return LaurentPoly._raw({pad_l + e + pad_r: c for e, c in self._terms.items()}, rank)

    def involution(self) -> "LaurentPoly":
        """The antipode g -> g^{-1}."""
        return LaurentPoly._raw({tuple(-x for x in e): c for e, c in self._terms.items()}, self.rank)

    def to_rational(self) -> "LaurentPoly":
        return LaurentPoly._raw({e: Fraction(c) for e, c in self._terms.items()}, self.rank)

    def evaluate(self, values: Sequence[Coefficient]) -> Coefficient:
        total: Coefficient = 0
        for e, c in self._terms.items():
            term = Fraction(c)
            for v, k in zip(values, e):
                term *= Fraction(v) ** k
            total += term
        return _norm(total)

    def content(self) -> Coefficient:
        """gcd of the coefficients (integral mode); 0 for the zero element."""
        from math import gcd

        g = 0
        for c in self._terms.values():
            if isinstance(c, Fraction):
                return 1
            g = gcd(g, c)
        return g

    # -- exponent bounds --------------------------------------------------
    def min_exponent(self) -> Exponent:
        """Componentwise minimum of the support."""
        if not self._terms:
            return (0,) * self.rank
        return tuple(min(e[i] for e in self._terms) for i in range(self.rank))

    def max_exponent(self) -> Exponent:
        if not self._terms:
            return (0,) * self.rank
        return tuple(max(e[i] for e in self._terms) for i in range(self.rank))

    def normalized(self) -> Tuple["LaurentPoly", Exponent]:
        """Return (p, m) with p = self * t^-m a genuine polynomial not divisible by any t_i."""
        m = self.min_exponent()
        return self.shift([-x for x in m]), m

    # -- rendering --------------------------------------------------------
    def variable_names(self) -> Tuple[str, ...]:
        return variable_names(self.rank)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"LaurentPoly({format_poly(self)!r}, rank={self.rank})"


def variable_names(rank: int) -> Tuple[str, ...]:
    if rank == 1:
        return ("t",)
    return tuple(f"t{i + 1}" for i in range(rank))


def _term_key(e: Exponent):
    return (sum(e), e)


def format_poly(p: LaurentPoly) -> str:
    """Canonical text rendering, e.g. ``1 - 2*t1^-1*t2^3``."""
    if not p._terms:
        return "0"
    names = variable_names(p.rank)
    pieces = []
    for e in sorted(p._terms, key=_term_key):
        c = p._terms[e]
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        factors = []
        for name, k in zip(names, e):
            if k == 1:
                factors.append(name)
            elif k != 0:
                factors.append(f"{name}^{k}")
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>[A-Za-z_][A-Za-z_0-9]*)(?:\^(?P<pow>-?\d+))?|(?P<op>[-+*]))")


def parse_poly(text: str, rank: int = 1, names: Sequence[str] | None = None) -> LaurentPoly:
    """Parse a signed sum of monomials.  Inverse of :func:`format_poly`.

    Rank-one polynomials also accept ``t1`` for ``t``.
    """
    names = tuple(names) if names is not None else variable_names(rank)
    index = {n: i for i, n in enumerate(names)}
    if rank == 1 and "t1" not in index:
        index["t1"] = 0
    text = text.strip()
    if text in ("", "0"):
        return LaurentPoly.zero(rank)
    pos = 0
    terms: Dict[Exponent, Coefficient] = {}
    sign = 1
    coef: Coefficient = 1
    exp = [0] * rank
    have_factor = False
    expect_factor = True

    def flush():
        nonlocal sign, coef, exp, have_factor
        if not have_factor:
            raise ValueError(f"empty term in {text!r}")
        e = tuple(exp)
        terms[e] = terms.get(e, 0) + sign * coef
        sign, coef, exp, have_factor = 1, 1, [0] * rank, False

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected character at column {pos + 1} in {text!r}")
        pos = m.end()
        if m.group("op"):
            op = m.group("op")
            if op == "*":
                if expect_factor:
                    raise ValueError(f"dangling '*' at column {pos} in {text!r}")
                expect_factor = True
                continue
            if have_factor:
                flush()
            elif not expect_factor:
                raise ValueError(f"misplaced sign at column {pos} in {text!r}")
            sign = sign * (-1 if op == "-" else 1)
            expect_factor = True
            continue
        if not expect_factor and have_factor:
            raise ValueError(f"missing operator before column {m.start() + 1} in {text!r}")
        if m.group("num"):
            coef = coef * Fraction(m.group("num"))
        else:
            name = m.group("var")
            if name not in index:
                raise ValueError(f"unknown variable {name!r} in {text!r}")
            exp[index[name]] += int(m.group("pow") or 1)
        have_factor = True
        expect_factor = False
    if expect_factor and not have_factor:
        raise ValueError(f"trailing operator in {text!r}")
    flush()
    return LaurentPoly(terms, rank)


# ---------------------------------------------------------------------------
# xi orders


def _rational_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    m = [list(r) for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


class NotInjective(ValueError):
    pass


class XiOrder:
    """Lexicographically refined rational model of an injective xi: H -> R.

    ``value(g)`` is the vector (v1.g, ..., vm.g); values compare
    lexicographically, which models xi = v1 + eps*v2 + ... for infinitesimal eps.
    """

    __slots__ = ("rows", "rank")

    def __init__(self, rows: Sequence[Sequence], rank: int | None = None):
        rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        if not rows:
            raise NotInjective("an xi order needs at least one row")
        r = len(rows[0]) if rank is None else rank
        if any(len(row) != r for row in rows):
            raise ValueError("xi rows must all have length equal to the rank")
        if r and _rational_rank(rows) < r:
            raise NotInjective(f"xi matrix has rank < {r}; some nonzero g has xi(g) = 0")
        self.rows = rows
        self.rank = r

    @classmethod
    def parse(cls, text: str, rank: int | None = None) -> "XiOrder":
        rows = [r for r in (part.strip() for part in text.split(";")) if r]
        if not rows and rank == 0:
            return cls([()], 0)
        return cls([[Fraction(x) for x in re.split(r"[\s,]+", r)] for r in rows], rank)

    @classmethod
    def trivial(cls) -> "XiOrder":
        """The order on the zero lattice (xi = 0)."""
        return cls([()], 0)

    def __str__(self):
        return "; ".join(" ".join(str(x) for x in row) for row in self.rows)

    def __repr__(self):
        return f"XiOrder({str(self)!r})"

    def __eq__(self, other):
        return isinstance(other, XiOrder) and self.rows == other.rows and self.rank == other.rank

    def __hash__(self):
        return hash((self.rows, self.rank))

    def value(self, exp: Sequence[int]) -> Tuple[Fraction, ...]:
        return tuple(sum((a * b for a, b in zip(row, exp)), Fraction(0)) for row in self.rows)

    def first(self, exp: Sequence[int]) -> Fraction:
        return sum((a * b for a, b in zip(self.rows[0], exp)), Fraction(0))

    def sign(self, exp: Sequence[int]) -> int:
        for v in self.value(exp):
            if v:
                return 1 if v > 0 else -1
        return 0

    def negated(self) -> "XiOrder":
        return XiOrder([[-x for x in row] for row in self.rows], self.rank)

    def is_zero_class(self) -> bool:
        return all(x == 0 for x in self.rows[0])

    def as_strings(self):
        return [[str(x) for x in row] for row in self.rows]


# ---------------------------------------------------------------------------
# the operations on Z[H] exposed to the rest of the package


def gr_add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    if p.rank != q.rank:
        raise RankMismatch(f"rank {p.rank} vs rank {q.rank}")
    return p + q


def gr_mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    if p.rank != q.rank:
        raise RankMismatch(f"rank {p.rank} vs rank {q.rank}")
    return p * q


def _check(p: LaurentPoly, xi: XiOrder):
    if p.rank != xi.rank:
        raise RankMismatch(f"polynomial rank {p.rank} vs xi rank {xi.rank}")
    if p.is_zero():
        raise ValueError("the zero element has no extreme term")


def xi_lowest_term(p: LaurentPoly, xi: XiOrder) -> Tuple[Coefficient, Exponent]:
    _check(p, xi)
    e = min(p.support(), key=xi.value)
    return p.coefficient(e), e


def xi_top_term(p: LaurentPoly, xi: XiOrder) -> Tuple[Coefficient, Exponent]:
    _check(p, xi)
    e = max(p.support(), key=xi.value)
    return p.coefficient(e), e


def xi_top_coefficient(p: LaurentPoly, xi: XiOrder) -> Coefficient:
    return xi_top_term(p, xi)[0]


def in_S_xi(p: LaurentPoly, xi: XiOrder, policy: SignPolicy = SignPolicy.STRICT) -> bool:
    if p.is_zero():
        return False
    c, _ = xi_lowest_term(p, xi)
    if policy is SignPolicy.PLUS_MINUS:
        return c in (1, -1)
    return c == 1


def is_xi_positive(p: LaurentPoly, xi: XiOrder) -> bool:
    return all(xi.sign(e) > 0 for e in p.support())


def split_S_xi(p: LaurentPoly, xi: XiOrder) -> Tuple[Coefficient, Exponent, LaurentPoly]:
    """Write p = c * h * (1 - y) with y xi-positive; returns (c, h, y)."""
    c, h = xi_lowest_term(p, xi)
    zero = (0,) * p.rank
    unit = p.shift([-x for x in h])
    y = LaurentPoly({e: -Fraction(v) / c for e, v in unit.items() if e != zero}, p.rank)
    return c, h, y


def exact_divide(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Exact quotient p / q in the Laurent ring; raises NotDivisible otherwise.

    Both operands are shifted into the polynomial ring first (monomials are
    units), where lexicographic long division terminates.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by zero in the group ring")
    if p.rank != q.rank:
        raise RankMismatch(f"rank {p.rank} vs rank {q.rank}")
    if p.is_zero():
        return LaurentPoly.zero(p.rank)
    if q.is_monomial():
        (eq, cq), = q.items()
        out = {}
        for e, c in p.items():
            v = Fraction(c) / cq
            if isinstance(c, int) and isinstance(cq, int) and v.denominator != 1:
                raise NotDivisible(f"{p} is not divisible by {q}")
            out[tuple(a - b for a, b in zip(e, eq))] = _norm(v)
        return LaurentPoly._raw(out, p.rank)
    pn, mp = p.normalized()
    qn, mq = q.normalized()
    integral = p.is_integral() and q.is_integral()
    lead_q = max(qn.support())
    lc_q = qn.coefficient(lead_q)
    rem = dict(pn._terms)
    quot: Dict[Exponent, Coefficient] = {}
    q_items = list(qn.items())
    while rem:
        lead = max(rem)
        diff = tuple(a - b for a, b in zip(lead, lead_q))
        if any(x < 0 for x in diff):
            raise NotDivisible(f"{p} is not divisible by {q}")
        c = rem[lead]
        if integral:
            if c % lc_q:
                raise NotDivisible(f"{p} is not divisible by {q}")
            k = c // lc_q
        else:
            k = _norm(Fraction(c) / lc_q)
        quot[diff] = k
        for e, v in q_items:
            ee = tuple(a + b for a, b in zip(e, diff))
            nv = rem.get(ee, 0) - k * v
            if nv:
                rem[ee] = _norm(nv)
            else:
                rem.pop(ee, None)
    shift = tuple(a - b for a, b in zip(mp, mq))
    return LaurentPoly._raw(quot, p.rank).shift(shift)


def divides(q: LaurentPoly, p: LaurentPoly) -> bool:
    try:
        exact_divide(p, q)
    except NotDivisible:
        return False
    return True


def univariate_gcd(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Monic gcd over Q[t, 1/t] (rank one), normalized to a polynomial with nonzero constant term."""
    if p.rank != 1 or q.rank != 1:
        raise RankMismatch("univariate_gcd needs rank one")
    a = [Fraction(c) for c in _dense(p)]
    b = [Fraction(c) for c in _dense(q)]
    while b and any(b):
        a, b = b, _poly_rem(a, b)
    if not a or not any(a):
        return LaurentPoly.zero(1)
    lc = a[-1]
    return LaurentPoly({(i,): c / lc for i, c in enumerate(a) if c}, 1)


def _dense(p: LaurentPoly):
    if p.is_zero():
        return []
    pn, _ = p.normalized()
    deg = pn.max_exponent()[0]
    return [pn.coefficient((i,)) for i in range(deg + 1)]


def _poly_rem(a, b):
    a = list(a)
    while b and b[-1] == 0:
        b = b[:-1]
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] / b[-1]
        k = len(a) - len(b)
        for i, c in enumerate(b):
            a[k + i] -= f * c
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a
