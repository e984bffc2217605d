"""Exact sparse multivariate polynomials with monomial orders.

Coefficients are exact rationals (gmpy2.mpq) by default; a prime-field mode
(char p) is available as a heuristic acceleration/cross-check path.  Monomials
are plain exponent tuples, one entry per ring variable.  All values are
immutable after construction, so they can be shared freely across threads.
"""

from __future__ import annotations

import operator
from typing import Iterable, Iterator

from gmpy2 import gcd as _gcd
from gmpy2 import is_prime as _is_prime
from gmpy2 import lcm as _lcm
from gmpy2 import mpq, mpz


class PolyImageError(Exception):
    """Base class for errors raised by this package."""


class StructuralError(PolyImageError):
    """Malformed input: ring mismatch, inhomogeneous map, bad shape."""


class CapabilityError(PolyImageError):
    """Input exceeds a configured capability limit (e.g. factorization size)."""


class ComputationLimitError(PolyImageError):
    """A resource guard (pair count, degree bound) was exceeded."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class GenericityError(PolyImageError):
    """A random linear section failed verification after the retry budget."""


class ParseError(PolyImageError):
    """Syntax or semantic error in text input, with source position."""

    def __init__(self, message, line=1, col=1):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# Rings and coefficients


class Ring:
    """A named polynomial ring Q[x1,...,xn] or GF(p)[x1,...,xn]."""

    __slots__ = ("names", "char", "index", "_hash")

    def __init__(self, names: Iterable[str], char: int = 0):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise StructuralError(f"duplicate variable names in ring: {names}")
        if char:
            if char < 2 or not _is_prime(char):
                raise StructuralError(f"characteristic must be 0 or prime, got {char}")
        self.names = names
        self.char = int(char)
        self.index = {n: i for i, n in enumerate(names)}
        self._hash = hash((names, self.char))

    @property
    def arity(self) -> int:
        return len(self.names)

    def __eq__(self, other):
        return (
            isinstance(other, Ring)
            and self.names == other.names
            and self.char == other.char
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        mod = f"; char {self.char}" if self.char else ""
        return f"Ring({', '.join(self.names)}{mod})"

    # -- coefficient helpers -------------------------------------------------

    def coeff(self, c):
        """Normalize a scalar into this ring's coefficient domain (or None if 0)."""
        if self.char:
            c = int(c) % self.char
            return c or None
        c = mpq(c)
        return c if c else None

    def coeff_inv(self, c):
        if self.char:
            return pow(c, self.char - 2, self.char)
        return 1 / c

    # -- constructors --------------------------------------------------------

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        c = self.coeff(c)
        if c is None:
            return Polynomial(self, {})
        return Polynomial(self, {(0,) * self.arity: c})

    def var(self, i: int) -> "Polynomial":
        if not 0 <= i < self.arity:
            raise StructuralError(f"no variable with index {i} in {self!r}")
        exp = [0] * self.arity
        exp[i] = 1
        return Polynomial(self, {tuple(exp): self.coeff(1)})

    def gens(self) -> list:
        return [self.var(i) for i in range(self.arity)]

    def poly(self, terms: dict) -> "Polynomial":
        """Build a polynomial from {exponent tuple: scalar}, dropping zeros."""
        out = {}
        n = self.arity
        for exp, c in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise StructuralError(f"bad exponent {exp} for {self!r}")
            c = self.coeff(c)
            if c is not None:
                if exp in out:
                    c = self.coeff(out[exp] + c)
                    if c is None:
                        del out[exp]
                        continue
                out[exp] = c
        return Polynomial(self, out)

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(text, self)


# ---------------------------------------------------------------------------
# Monomial orders

# Monomials are bare exponent tuples; these helpers act on them directly.


def mono_mul(a: tuple, b: tuple) -> tuple:
    return tuple(map(operator.add, a, b))


def mono_div(a: tuple, b: tuple):
    """a / b, or None if b does not divide a."""
    out = tuple(map(operator.sub, a, b))
    if any(e < 0 for e in out):
        return None
    return out


def mono_divides(b: tuple, a: tuple) -> bool:
    return all(map(operator.le, b, a))


def mono_lcm(a: tuple, b: tuple) -> tuple:
    return tuple(map(max, a, b))


def mono_degree(a: tuple) -> int:
    return sum(a)


class MonomialOrder:
    """A total order on exponent tuples, compatible with multiplication.

    kind is one of "lex", "grevlex", "block"; block(k) eliminates the first k
    variables (grevlex inside each block, the eliminated block dominating).
    key() maps a monomial to a flat int tuple that sorts in order; bigger key
    means bigger monomial.
    """

    __slots__ = ("kind", "k", "_hash")

    def __init__(self, kind: str, k: int = 0):
        if kind not in ("lex", "grevlex", "block"):
            raise StructuralError(f"unknown monomial order kind {kind!r}")
        if kind == "block" and k <= 0:
            raise StructuralError("block order needs k >= 1 eliminated variables")
        self.kind = kind
        self.k = int(k) if kind == "block" else 0
        self._hash = hash((kind, self.k))

    def key(self, exp: tuple) -> tuple:
        if self.kind == "grevlex":
            return (sum(exp),) + tuple(-e for e in reversed(exp))
        if self.kind == "lex":
            return exp
        head, tail = exp[: self.k], exp[self.k :]
        return (
            (sum(head),)
            + tuple(-e for e in reversed(head))
            + (sum(tail),)
            + tuple(-e for e in reversed(tail))
        )

    def negkey(self, exp: tuple) -> tuple:
        """key with all entries negated: min-heap ordering = descending monomials."""
        return tuple(-v for v in self.key(exp))

    def sorted_terms(self, f: "Polynomial", reverse: bool = True):
        return sorted(f.terms.items(), key=lambda t: self.key(t[0]), reverse=reverse)

    def __eq__(self, other):
        return (
            isinstance(other, MonomialOrder)
            and self.kind == other.kind
            and self.k == other.k
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"block({self.k})" if self.kind == "block" else self.kind


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def block_order(k: int) -> MonomialOrder:
    return MonomialOrder("block", k)


# ---------------------------------------------------------------------------
# Polynomials


class Polynomial:
    """Sparse multivariate polynomial: {exponent tuple: nonzero coefficient}.

    Do not mutate `terms` after construction; arithmetic returns new objects.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- predicates and basic data -------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def var_degree(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def is_homogeneous(self) -> bool:
        if not self.terms:
            return True
        degs = {sum(e) for e in self.terms}
        return len(degs) == 1

    def support_vars(self) -> set:
        out = set()
        for e in self.terms:
            for i, p in enumerate(e):
                if p:
                    out.add(i)
        return out

    def leading_term(self, order: MonomialOrder = GREVLEX):
        """(exponent, coefficient) of the largest monomial under order."""
        if not self.terms:
            raise StructuralError("zero polynomial has no leading term")
        exp = max(self.terms, key=order.key)
        return exp, self.terms[exp]

    def leading_monomial(self, order: MonomialOrder = GREVLEX) -> tuple:
        return self.leading_term(order)[0]

    def constant_value(self):
        """Coefficient of the constant monomial (0 if absent)."""
        return self.terms.get((0,) * self.ring.arity, 0)

    # -- arithmetic ----------------------------------------------------------

    def _check_ring(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise StructuralError(
                f"ring mismatch: {self.ring!r} vs {other.ring!r}"
            )

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.const(other)
        self._check_ring(other)
        p = self.ring.char
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = out[e] + c
                if p:
                    s %= p
                if s:
                    out[e] = s
                else:
                    del out[e]
            else:
                out[e] = c
        return Polynomial(self.ring, out)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        p = self.ring.char
        if p:
            return Polynomial(self.ring, {e: (-c) % p for e, c in self.terms.items()})
        return Polynomial(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.const(other)
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        return self.ring.const(other).__sub__(self)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = self.ring.coeff(other)
            if c is None:
                return self.ring.zero()
            p = self.ring.char
            if p:
                return Polynomial(
                    self.ring, {e: (v * c) % p for e, v in self.terms.items()}
                )
            return Polynomial(self.ring, {e: v * c for e, v in self.terms.items()})
        self._check_ring(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        p = self.ring.char
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(map(operator.add, ea, eb))
                c = out.get(e)
                c = ca * cb if c is None else c + ca * cb
                if p:
                    c %= p
                if c:
                    out[e] = c
                elif e in out:
                    del out[e]
        return Polynomial(self.ring, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        if n < 0:
            raise StructuralError("negative polynomial power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n = base_needed
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            if other == 0:
                return not self.terms
            return self.__eq__(self.ring.const(other))
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- structural operations -------------------------------------------------

    def monic(self, order: MonomialOrder = GREVLEX) -> "Polynomial":
        if not self.terms:
            return self
        _, c = self.leading_term(order)
        inv = self.ring.coeff_inv(c)
        return self * inv

    def content(self):
        """Positive rational c with self/c integer-primitive (char 0 only)."""
        if self.ring.char:
            raise StructuralError("content is defined for characteristic 0 only")
        if not self.terms:
            return mpq(1)
        num = mpz(0)
        den = mpz(1)
        for c in self.terms.values():
            num = _gcd(num, c.numerator)
            den = _lcm(den, c.denominator)
        return mpq(num, den)

    def primitive(self, order: MonomialOrder = GREVLEX) -> "Polynomial":
        """Integer-primitive scalar multiple with positive leading coefficient."""
        if not self.terms or self.ring.char:
            return self
        c = self.content()
        if self.leading_term(order)[1] < 0:
            c = -c
        return self * (1 / c)

    def evaluate(self, values: list):
        """Exact value at a rational point (one scalar per ring variable)."""
        if len(values) != self.ring.arity:
            raise StructuralError("wrong number of values for evaluation")
        if self.ring.char:
            vals = [int(v) % self.ring.char for v in values]
            total = 0
            for e, c in self.terms.items():
                t = c
                for v, p in zip(vals, e):
                    if p:
                        t = t * pow(v, p, self.ring.char)
                total += t
            return total % self.ring.char
        vals = [mpq(v) for v in values]
        total = mpq(0)
        for e, c in self.terms.items():
            t = c
            for v, p in zip(vals, e):
                if p:
                    t = t * v**p
            total += t
        return total

    def substitute(self, images: list) -> "Polynomial":
        """Map variable i to images[i] (polynomials over one common ring)."""
        if len(images) != self.ring.arity:
            raise StructuralError("need one image polynomial per variable")
        target = images[0].ring if images else self.ring
        out = target.zero()
        pow_cache: dict = {}
        for e, c in self.terms.items():
            term = target.const(c if not self.ring.char else int(c))
            for i, p in enumerate(e):
                if p:
                    key = (i, p)
                    img = pow_cache.get(key)
                    if img is None:
                        img = images[i] ** p
                        pow_cache[key] = img
                    term = term * img
            out = out + term
        return out

    def derivative(self, i: int) -> "Polynomial":
        out = {}
        p = self.ring.char
        for e, c in self.terms.items():
            if e[i]:
                d = c * e[i]
                if p:
                    d %= p
                    if not d:
                        continue
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = d
        return Polynomial(self.ring, out)

    # -- printing ---------------------------------------------------------------

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"<poly {format_polynomial(self)}>"


# ---------------------------------------------------------------------------
# poly_arith: the spec-level arithmetic entry point


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    """Exact add/sub/mul on polynomials of one ring."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise StructuralError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# Homogenization


def homogenize(
    f: Polynomial, position: int = 0, name: str | None = None, degree: int | None = None
) -> Polynomial:
    """Insert a fresh variable at `position` and pad every term up to `degree`.

    degree defaults to deg(f).  Setting the new variable to 1 recovers f.
    """
    ring = f.ring
    if name is None:
        name = _fresh_name(ring.names, "h")
    if name in ring.names:
        raise StructuralError(f"homogenizer {name!r} already a variable of {ring!r}")
    names = ring.names[:position] + (name,) + ring.names[position:]
    new_ring = Ring(names, ring.char)
    d = f.degree() if degree is None else degree
    if d < f.degree():
        raise StructuralError("homogenization degree below the degree of f")
    out = {}
    for e, c in f.terms.items():
        pad = d - sum(e)
        out[e[:position] + (pad,) + e[position:]] = c
    return Polynomial(new_ring, out)


def dehomogenize(f: Polynomial, position: int) -> Polynomial:
    """Set the variable at `position` to 1 and drop it from the ring."""
    ring = f.ring
    names = ring.names[:position] + ring.names[position + 1 :]
    new_ring = Ring(names, ring.char)
    out = new_ring.zero()
    collected: dict = {}
    p = ring.char
    for e, c in f.terms.items():
        ne = e[:position] + e[position + 1 :]
        if ne in collected:
            s = collected[ne] + c
            if p:
                s %= p
            if s:
                collected[ne] = s
            else:
                del collected[ne]
        else:
            collected[ne] = c
    return Polynomial(new_ring, collected) if collected else out


def _fresh_name(taken, base: str) -> str:
    if base not in taken:
        return base
    i = 0
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


# ---------------------------------------------------------------------------
# Exact division


def exact_divide(f: Polynomial, g: Polynomial):
    """f / g when g divides f exactly; None otherwise."""
    if g.is_zero():
        raise StructuralError("division by the zero polynomial")
    f._check_ring(g)
    ring = f.ring
    order = GREVLEX
    lg, cg = g.leading_term(order)
    rem = dict(f.terms)
    quo: dict = {}
    p = ring.char
    cginv = ring.coeff_inv(cg)
    while rem:
        e = max(rem, key=order.key)
        c = rem[e]
        q = mono_div(e, lg)
        if q is None:
            return None
        qc = c * cginv
        if p:
            qc %= p
        quo[q] = qc
        for eg, vg in g.terms.items():
            ee = tuple(map(operator.add, q, eg))
            s = rem.get(ee, 0) - qc * vg
            if p:
                s %= p
            if s:
                rem[ee] = s
            elif ee in rem:
                del rem[ee]
    return Polynomial(ring, quo)


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_OPS = set("+-*^()")


def _tokenize(text: str):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch in _TOKEN_OPS:
            yield (ch, ch, line, col)
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            yield ("int", text[i:j], line, col)
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            yield ("name", text[i:j], line, col)
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    yield ("end", "", line, col)


class _Parser:
    """Recursive-descent parser for the shared polynomial grammar.

    expr   := term (('+'|'-') term)*
    term   := sign* factor ('*' factor)*
    factor := atom ('^' int)?
    atom   := int | variable | '(' expr ')'

    Implicit multiplication is a syntax error by design.
    """

    def __init__(self, text: str, ring: Ring):
        self.tokens = list(_tokenize(text))
        self.pos = 0
        self.ring = ring

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.advance()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2], tok[3])
        return tok

    def parse(self) -> Polynomial:
        f = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected trailing {tok[1]!r}", tok[2], tok[3])
        return f

    def expr(self) -> Polynomial:
        f = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            g = self.term()
            f = f + g if op == "+" else f - g
        return f

    def term(self) -> Polynomial:
        sign = 1
        while self.peek()[0] in ("+", "-"):
            if self.advance()[0] == "-":
                sign = -sign
        f = self.factor()
        while self.peek()[0] == "*":
            self.advance()
            f = f * self.factor()
        if sign < 0:
            f = -f
        return f

    def factor(self) -> Polynomial:
        f = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            tok = self.expect("int")
            f = f ** int(tok[1])
        return f

    def atom(self) -> Polynomial:
        tok = self.advance()
        kind, val, line, col = tok
        if kind == "int":
            nxt = self.peek()
            if nxt[0] in ("int", "name") or nxt[0] == "(":
                raise ParseError("implicit multiplication is not allowed", nxt[2], nxt[3])
            return self.ring.const(int(val))
        if kind == "name":
            idx = self.ring.index.get(val)
            if idx is None:
                raise ParseError(f"unknown variable {val!r}", line, col)
            nxt = self.peek()
            if nxt[0] in ("int", "name") or nxt[0] == "(":
                raise ParseError("implicit multiplication is not allowed", nxt[2], nxt[3])
            return self.ring.var(idx)
        if kind == "(":
            f = self.expr()
            self.expect(")")
            nxt = self.peek()
            if nxt[0] in ("int", "name") or nxt[0] == "(":
                raise ParseError("implicit multiplication is not allowed", nxt[2], nxt[3])
            return f
        raise ParseError(f"unexpected token {val!r}", line, col)


def parse_polynomial(text: str, ring: Ring) -> Polynomial:
    return _Parser(text, ring).parse()


# ---------------------------------------------------------------------------
# Printing


def format_polynomial(f: Polynomial, order: MonomialOrder = GREVLEX) -> str:
    """Render with '*' products, '^' powers and terms descending under order."""
    if not f.terms:
        return "0"
    names = f.ring.names
    parts = []
    for e, c in order.sorted_terms(f):
        factors = []
        for i, p in enumerate(e):
            if p == 1:
                factors.append(names[i])
            elif p > 1:
                factors.append(f"{names[i]}^{p}")
        body = "*".join(factors)
        if not body:
            parts.append(str(c))
            continue
        if c == 1:
            parts.append(body)
        elif c == -1:
            parts.append(f"-{body}")
        else:
            parts.append(f"{c}*{body}")
    out = parts[0]
    for p in parts[1:]:
        out += p if p.startswith("-") else "+" + p
    return out


# ---------------------------------------------------------------------------
# Factorization

FACTOR_DEGREE_LIMIT = 60
FACTOR_TERM_LIMIT = 20000


def factor(f: Polynomial) -> list:
    """Irreducible factorization over Q (or GF(p)) as [(factor, multiplicity)].

    Factors are primitive with positive leading coefficient; the product of
    factor^multiplicity equals f up to a rational unit.  The heavy lifting is
    delegated to sympy's exact factorizer.
    """
    if f.is_zero():
        raise StructuralError("cannot factor the zero polynomial")
    if f.is_constant():
        return []
    if f.degree() > FACTOR_DEGREE_LIMIT or len(f.terms) > FACTOR_TERM_LIMIT:
        raise CapabilityError(
            f"factorization size limit exceeded (degree {f.degree()}, "
            f"{len(f.terms)} terms): reducible-unknown"
        )
    import sympy

    syms = sympy.symbols(list(f.ring.names))
    if not isinstance(syms, (list, tuple)):
        syms = [syms]
    sdict = {}
    for e, c in f.terms.items():
        if f.ring.char:
            sdict[e] = sympy.Integer(int(c))
        else:
            sdict[e] = sympy.Rational(int(c.numerator), int(c.denominator))
    if f.ring.char:
        spoly = sympy.Poly.from_dict(sdict, *syms, modulus=f.ring.char)
    else:
        spoly = sympy.Poly.from_dict(sdict, *syms, domain="QQ")
    _, factors = spoly.factor_list()
    out = []
    for fac, mult in factors:
        terms = {}
        for e, c in fac.as_dict().items():
            if f.ring.char:
                terms[tuple(e)] = int(c)
            else:
                terms[tuple(e)] = mpq(int(c.numerator), int(c.denominator))
        g = f.ring.poly(terms)
        if g.is_constant():
            continue
        if not f.ring.char:
            g = g.primitive()
        out.append((g, int(mult)))
    if not f.ring.char:
        check = f.ring.one()
        for g, m in out:
            check = check * g**m
        lead = _unit_ratio(f, check)
        if lead is None:
            raise PolyImageError("factorization verification failed")
    return out


def _unit_ratio(f: Polynomial, g: Polynomial):
    """Rational c with f == c*g, or None."""
    if g.is_zero():
        return None
    eg = next(iter(g.terms))
    cf = f.terms.get(eg)
    if cf is None:
        return None
    c = cf / g.terms[eg]
    if f == g * c:
        return c
    return None


def squarefree_part(f: Polynomial) -> Polynomial:
    """Product of the distinct irreducible factors of f."""
    out = f.ring.one()
    for g, _ in factor(f):
        out = out * g
    return out if not out.is_constant() else f.primitive()
