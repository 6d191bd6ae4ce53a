"""Exact scalar arithmetic for the calculus engine.

Coefficients are multivariate rational functions of named scalar generators,
with `fractions.Fraction` coefficients.  A ring may impose square relations on
individual generators (g^2 = P with P free of g); normal forms reduce every
such exponent below 2, which keeps structural rotations (cs^2 + sn^2 = 1) and
quadratic irrationalities (l^2 = 4/3) inside the field without transcendental
or floating-point arithmetic.

Rational functions carry their denominator in factored form so that sums use
least common multiples of factors instead of blind cross multiplication.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Optional, Union

from .errors import DenominatorVanishes, QKTwistError

Rational = Fraction

# A field element is what evaluation produces: a plain rational, or a
# polynomial in the non-evaluable (algebraic) generators such as l = sqrt(4/3).
FieldElement = Union[Fraction, "Polynomial"]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected rational, got {type(value).__name__}")


def _sign_fraction(q: Fraction) -> int:
    return (q > 0) - (q < 0)


class ScalarRing:
    """Named scalar generators, optional square relations, algebraic markers.

    relations: tuple of (var_index, replacement) with replacement a tuple of
      (monomial, coefficient) pairs defining var^2; the replacement must not
      involve any relational variable, so one substitution pass per relation
      reaches the normal form.
    algebraic: tuple of (var_index, value) marking generators that stand for
      +sqrt(value); they never receive numeric values at evaluation time.
    """

    __slots__ = ("names", "relations", "algebraic", "_index", "_pow_cache", "_hash")

    def __init__(self, names, relations=(), algebraic=()):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise QKTwistError("duplicate generator names")
        rels = []
        for var, repl in relations:
            repl = tuple(sorted((tuple(m), _as_fraction(c)) for m, c in repl))
            for mono, _ in repl:
                if mono[var] != 0:
                    raise QKTwistError("relation replacement may not contain its own variable")
            rels.append((var, repl))
        self.relations = tuple(sorted(rels))
        self.algebraic = tuple(sorted((v, _as_fraction(r)) for v, r in algebraic))
        self._index = {n: i for i, n in enumerate(self.names)}
        self._pow_cache = {}
        self._hash = hash((self.names, self.relations, self.algebraic))

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    def algebraic_value(self, var: int) -> Optional[Fraction]:
        for v, r in self.algebraic:
            if v == var:
                return r
        return None

    def is_relational(self, var: int) -> bool:
        return any(v == var for v, _ in self.relations)

    def zero_mono(self):
        return (0,) * self.nvars

    def __eq__(self, other):
        return (
            isinstance(other, ScalarRing)
            and self.names == other.names
            and self.relations == other.relations
            and self.algebraic == other.algebraic
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"ScalarRing({', '.join(self.names)})"

    def _replacement_power(self, var: int, k: int):
        """Cached terms of replacement(var)^k as a dict {mono: coeff}."""
        key = (var, k)
        cached = self._pow_cache.get(key)
        if cached is not None:
            return cached
        repl = dict(next(r for v, r in self.relations if v == var))
        if k == 1:
            result = repl
        else:
            half = self._replacement_power(var, k // 2)
            result = _mul_terms(half, half)
            if k % 2:
                result = _mul_terms(result, repl)
        self._pow_cache[key] = result
        return result


def _add_term(terms, mono, coeff):
    cur = terms.get(mono)
    if cur is None:
        if coeff:
            terms[mono] = coeff
    else:
        cur += coeff
        if cur:
            terms[mono] = cur
        else:
            del terms[mono]


def _mul_terms(a, b):
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            _add_term(out, tuple(x + y for x, y in zip(ma, mb)), ca * cb)
    return out


def _reduce_terms(ring: ScalarRing, terms):
    """Apply the ring's square relations until every exponent is below 2."""
    for var, _ in ring.relations:
        if not any(mono[var] >= 2 for mono in terms):
            continue
        new = {}
        for mono, coeff in terms.items():
            e = mono[var]
            if e < 2:
                _add_term(new, mono, coeff)
                continue
            k, rem = divmod(e, 2)
            base = list(mono)
            base[var] = rem
            for pm, pc in ring._replacement_power(var, k).items():
                _add_term(new, tuple(b + p for b, p in zip(base, pm)), coeff * pc)
        terms = new
    return terms


class Polynomial:
    """Sparse multivariate polynomial over Q in a ScalarRing, in normal form."""

    __slots__ = ("ring", "terms", "_hash", "_diffs")

    def __init__(self, ring: ScalarRing, terms, reduced=False):
        self.ring = ring
        if not reduced:
            clean = {}
            for mono, coeff in terms.items():
                _add_term(clean, tuple(mono), _as_fraction(coeff))
            if ring.relations:
                clean = _reduce_terms(ring, clean)
            terms = clean
        self.terms = terms
        self._hash = None
        self._diffs = None

    @classmethod
    def const(cls, ring: ScalarRing, value) -> "Polynomial":
        value = _as_fraction(value)
        if value == 0:
            return cls(ring, {}, reduced=True)
        return cls(ring, {ring.zero_mono(): value}, reduced=True)

    @classmethod
    def var(cls, ring: ScalarRing, name: str) -> "Polynomial":
        mono = [0] * ring.nvars
        mono[ring.index(name)] = 1
        p = cls(ring, {tuple(mono): Fraction(1)})
        return p

    # -- predicates ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring.zero_mono() in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant():
            raise QKTwistError(f"not a constant: {self}")
        return self.terms[self.ring.zero_mono()]

    def variables(self):
        used = set()
        for mono in self.terms:
            for v, e in enumerate(mono):
                if e:
                    used.add(v)
        return used

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> Optional["Polynomial"]:
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise QKTwistError("mixed scalar rings")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(self.ring, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            _add_term(out, mono, coeff)
        return Polynomial(self.ring, out, reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {m: -c for m, c in self.terms.items()}, reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = _as_fraction(other)
            if q == 0:
                return Polynomial(self.ring, {}, reduced=True)
            return Polynomial(self.ring, {m: c * q for m, c in self.terms.items()}, reduced=True)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = _mul_terms(self.terms, other.terms)
        if self.ring.relations:
            out = _reduce_terms(self.ring, out)
        return Polynomial(self.ring, out, reduced=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise QKTwistError("negative polynomial power")
        result = Polynomial.const(self.ring, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = _as_fraction(other)
            if q == 0:
                raise ZeroDivisionError("polynomial divided by zero rational")
            return self * (Fraction(1) / q)
        if isinstance(other, Polynomial):
            inv = _field_invert(other)
            return self * inv
        return NotImplemented

    def __rtruediv__(self, other):
        inv = _field_invert(self)
        return inv * other

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            q = _as_fraction(other)
            if q == 0:
                return self.is_zero
            return self.is_constant() and not self.is_zero and self.constant_value() == q
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def sort_key(self):
        return tuple(sorted(self.terms.items()))

    # -- calculus and evaluation --------------------------------------------

    def diff(self, var: int) -> "Polynomial":
        if self._diffs is None:
            self._diffs = [None] * self.ring.nvars
        cached = self._diffs[var]
        if cached is not None:
            return cached
        out = {}
        for mono, coeff in self.terms.items():
            e = mono[var]
            if not e:
                continue
            m = list(mono)
            m[var] = e - 1
            _add_term(out, tuple(m), coeff * e)
        result = Polynomial(self.ring, out)
        self._diffs[var] = result
        return result

    def eval_at(self, values) -> FieldElement:
        """Substitute Fractions for the variables in `values` (index -> value).

        Algebraic generators stay symbolic; the result is a Fraction when no
        symbolic variable survives.
        """
        out = {}
        n = self.ring.nvars
        for mono, coeff in self.terms.items():
            c = coeff
            rest = None
            for var in range(n):
                e = mono[var]
                if not e:
                    continue
                val = values.get(var)
                if val is None:
                    if rest is None:
                        rest = [0] * n
                    rest[var] = e
                else:
                    c *= val ** e
            key = self.ring.zero_mono() if rest is None else tuple(rest)
            _add_term(out, key, c)
        poly = Polynomial(self.ring, out, reduced=True)
        if poly.is_constant():
            return poly.constant_value()
        return poly

    def leading(self):
        mono = max(self.terms)
        return mono, self.terms[mono]

    def exact_div(self, divisor: "Polynomial") -> Optional["Polynomial"]:
        """Return q with q * divisor == self, or None if no such polynomial."""
        if divisor.is_zero:
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero:
            return self
        if divisor.is_constant():
            return self / divisor.constant_value()
        rem = dict(self.terms)
        quo = {}
        dmono, dcoeff = divisor.leading()
        while rem:
            mono = max(rem)
            diff = tuple(a - b for a, b in zip(mono, dmono))
            if any(x < 0 for x in diff):
                return None
            c = rem[mono] / dcoeff
            _add_term(quo, diff, c)
            for m2, c2 in divisor.terms.items():
                _add_term(rem, tuple(a + b for a, b in zip(diff, m2)), -c * c2)
        q = Polynomial(self.ring, quo)
        # Square relations can make leading-term division miss; verify.
        if self.ring.relations and q * divisor != self:
            return None
        return q

    def monic(self):
        """Return (self / lead, lead) with lead the leading coefficient."""
        if self.is_zero:
            raise ZeroDivisionError("monic of zero polynomial")
        _, lead = self.leading()
        if lead == 1:
            return self, Fraction(1)
        return self * (Fraction(1) / lead), lead

    def lift_to(self, ring: ScalarRing, index_map) -> "Polynomial":
        """Reinterpret in a larger ring; index_map[i] = new index of old var i."""
        out = {}
        for mono, coeff in self.terms.items():
            m = [0] * ring.nvars
            for old, e in enumerate(mono):
                if e:
                    m[index_map[old]] = e
            out[tuple(m)] = coeff
        return Polynomial(ring, out)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, reverse=True):
            coeff = self.terms[mono]
            factors = []
            for var, e in enumerate(mono):
                if not e:
                    continue
                name = self.ring.names[var]
                factors.append(name if e == 1 else f"{name}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(body)
            elif coeff == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{coeff}*{body}")
        text = parts[0]
        for part in parts[1:]:
            text += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
        return text

    __repr__ = __str__


def _field_invert(p: Polynomial) -> Polynomial:
    """Invert a constant or an element c0 + c1*g of Q(sqrt(r))."""
    if p.is_zero:
        raise ZeroDivisionError("inverting zero")
    if p.is_constant():
        return Polynomial.const(p.ring, Fraction(1) / p.constant_value())
    used = p.variables()
    if len(used) != 1:
        raise QKTwistError(f"cannot invert non-linear field element {p}")
    var = used.pop()
    r = p.ring.algebraic_value(var)
    if r is None:
        raise QKTwistError(f"cannot invert polynomial in non-algebraic generator: {p}")
    gmono = tuple(1 if i == var else 0 for i in range(p.ring.nvars))
    c1 = p.terms.get(gmono, Fraction(0))
    c0 = p.terms.get(p.ring.zero_mono(), Fraction(0))
    norm = c0 * c0 - c1 * c1 * r
    if norm == 0:
        raise ZeroDivisionError(f"zero norm element {p}")
    conj = Polynomial(p.ring, {p.ring.zero_mono(): c0 / norm, gmono: -c1 / norm}, reduced=True)
    return conj


def fe_sign(x: FieldElement) -> int:
    """Exact sign of a field element under the embedding g = +sqrt(r)."""
    if isinstance(x, (int, Fraction)):
        return _sign_fraction(_as_fraction(x))
    if x.is_constant():
        return _sign_fraction(x.constant_value() if not x.is_zero else Fraction(0))
    used = x.variables()
    if len(used) != 1:
        raise QKTwistError(f"sign of multivariate element {x}")
    var = used.pop()
    r = x.ring.algebraic_value(var)
    if r is None:
        raise QKTwistError(f"sign of non-numeric element {x}")
    gmono = tuple(1 if i == var else 0 for i in range(x.ring.nvars))
    c1 = x.terms.get(gmono, Fraction(0))
    c0 = x.terms.get(x.ring.zero_mono(), Fraction(0))
    s0, s1 = _sign_fraction(c0), _sign_fraction(c1)
    if s1 == 0:
        return s0
    if s0 == 0:
        return s1
    if s0 == s1:
        return s0
    d = c0 * c0 - c1 * c1 * r
    if d == 0:
        return 0
    return s0 if d > 0 else s1


def fe_is_zero(x: FieldElement) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero


class CoefficientFunction:
    """Rational function num / prod(factor^exp) with factored denominator.

    Invariants: num is in normal form; factors are monic (leading coefficient
    one), non-constant, pairwise distinct, sorted; no factor divides num
    (checked by trial division, which is exact up to square relations).
    Equality is decided by cross multiplication, which is sound because the
    quotient rings in use are integral domains.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den=()):
        self.num = num
        self.den = den

    @classmethod
    def _make(cls, num: Polynomial, den_factors) -> "CoefficientFunction":
        ring = num.ring
        if num.is_zero:
            return cls(num, ())
        merged = {}
        scale = Fraction(1)
        for factor, exp in den_factors:
            if exp == 0:
                continue
            if exp < 0:
                raise QKTwistError("negative denominator exponent")
            if factor.is_zero:
                raise ZeroDivisionError("zero denominator factor")
            if factor.is_constant():
                scale /= factor.constant_value() ** exp
                continue
            monic, lead = factor.monic()
            if lead != 1:
                scale /= lead ** exp
            merged[monic] = merged.get(monic, 0) + exp
        if scale != 1:
            num = num * scale
        out = []
        for factor in sorted(merged, key=Polynomial.sort_key):
            exp = merged[factor]
            while exp > 0:
                q = num.exact_div(factor)
                if q is None:
                    break
                num = q
                exp -= 1
            if exp:
                out.append((factor, exp))
        if num.is_zero:
            return cls(num, ())
        return cls(num, tuple(out))

    @classmethod
    def const(cls, ring: ScalarRing, value) -> "CoefficientFunction":
        return cls(Polynomial.const(ring, value))

    @classmethod
    def var(cls, ring: ScalarRing, name: str) -> "CoefficientFunction":
        return cls(Polynomial.var(ring, name))

    @classmethod
    def from_poly(cls, p: Polynomial) -> "CoefficientFunction":
        return cls(p)

    @property
    def ring(self) -> ScalarRing:
        return self.num.ring

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def is_constant(self) -> bool:
        return not self.den and self.num.is_constant()

    def constant_value(self) -> Fraction:
        if self.den:
            raise QKTwistError(f"not a constant: {self}")
        return self.num.constant_value()

    def den_poly(self) -> Polynomial:
        out = Polynomial.const(self.ring, 1)
        for factor, exp in self.den:
            out = out * factor ** exp
        return out

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> Optional["CoefficientFunction"]:
        if isinstance(other, CoefficientFunction):
            if other.ring != self.ring:
                raise QKTwistError("mixed scalar rings")
            return other
        if isinstance(other, Polynomial):
            return CoefficientFunction(other)
        if isinstance(other, (int, Fraction)):
            return CoefficientFunction.const(self.ring, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        da, db = dict(self.den), dict(other.den)
        lcm = dict(da)
        for f, e in db.items():
            lcm[f] = max(lcm.get(f, 0), e)
        na = self.num
        for f, e in lcm.items():
            extra = e - da.get(f, 0)
            if extra:
                na = na * f ** extra
        nb = other.num
        for f, e in lcm.items():
            extra = e - db.get(f, 0)
            if extra:
                nb = nb * f ** extra
        return CoefficientFunction._make(na + nb, lcm.items())

    __radd__ = __add__

    def __neg__(self):
        return CoefficientFunction(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return CoefficientFunction(Polynomial.const(self.ring, 0))
            return CoefficientFunction(self.num * other, self.den)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return CoefficientFunction(Polynomial.const(self.ring, 0))
        den = dict(self.den)
        for f, e in other.den:
            den[f] = den.get(f, 0) + e
        return CoefficientFunction._make(self.num * other.num, den.items())

    __rmul__ = __mul__

    def inverse(self) -> "CoefficientFunction":
        if self.is_zero:
            raise ZeroDivisionError("inverting zero coefficient")
        num = self.den_poly()
        return CoefficientFunction._make(num, ((self.num, 1),))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = CoefficientFunction.const(self.ring, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return (self - other).is_zero

    def __hash__(self):
        # Hash by nothing stronger than the ring: unequal-looking fractions can
        # be equal; coefficient functions are not meant to be dict keys.
        return hash(self.ring)

    # -- calculus and evaluation --------------------------------------------

    def diff(self, var: int) -> "CoefficientFunction":
        if not self.den:
            return CoefficientFunction(self.num.diff(var))
        factors = [f for f, _ in self.den]
        dnum = self.num.diff(var)
        for f in factors:
            dnum = dnum * f
        for i, (f, e) in enumerate(self.den):
            df = f.diff(var)
            if df.is_zero:
                continue
            term = self.num * (-e) * df
            for j, other in enumerate(factors):
                if j != i:
                    term = term * other
            dnum = dnum + term
        den = tuple((f, e + 1) for f, e in self.den)
        return CoefficientFunction._make(dnum, den)

    def eval_at(self, values, where="coefficient") -> FieldElement:
        num = self.num.eval_at(values)
        if not self.den:
            return num
        dval: FieldElement = Fraction(1)
        for factor, exp in self.den:
            v = factor.eval_at(values)
            if fe_is_zero(v):
                raise DenominatorVanishes(where, values)
            for _ in range(exp):
                dval = dval * v if isinstance(dval, Polynomial) else v * dval
        if isinstance(num, Fraction) and isinstance(dval, Fraction):
            return num / dval
        ring = self.ring
        if isinstance(num, Fraction):
            num = Polynomial.const(ring, num)
        return num / dval

    def lift_to(self, ring: ScalarRing, index_map) -> "CoefficientFunction":
        den = tuple((f.lift_to(ring, index_map), e) for f, e in self.den)
        return CoefficientFunction._make(self.num.lift_to(ring, index_map), den)

    def __str__(self):
        if not self.den:
            return str(self.num)
        dparts = []
        for f, e in self.den:
            text = f"({f})" if len(f.terms) > 1 else str(f)
            dparts.append(text if e == 1 else f"{text}^{e}")
        nstr = str(self.num)
        if len(self.num.terms) > 1:
            nstr = f"({nstr})"
        return f"{nstr}/({'*'.join(dparts)})" if len(dparts) > 1 or len(self.den[0][0].terms) > 1 else f"{nstr}/{dparts[0]}"

    __repr__ = __str__


# -- coefficient string grammar ----------------------------------------------
#
#   expr   := term (('+'|'-') term)*
#   term   := unary (('*'|'/') unary)*
#   unary  := '-' unary | power
#   power  := atom ('^' unsigned-integer)?
#   atom   := unsigned-integer | generator-name | '(' expr ')'
#
# Rationals are written p/q; generator names match [A-Za-z_][A-Za-z0-9_]*.

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise QKTwistError(f"bad character in coefficient string: {text[pos:]!r}")
            break
        if m.group(1):
            tokens.append(("int", int(m.group(1))))
        elif m.group(2):
            tokens.append(("name", m.group(2)))
        else:
            tokens.append(("op", m.group(3)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, ring: ScalarRing, tokens):
        self.ring = ring
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expr(self) -> CoefficientFunction:
        value = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.take()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> CoefficientFunction:
        value = self.unary()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.take()
            rhs = self.unary()
            value = value * rhs if op == "*" else value / rhs
        return value

    def unary(self) -> CoefficientFunction:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        return self.power()

    def power(self) -> CoefficientFunction:
        value = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, n = self.take()
            neg = False
            if (kind, n) == ("op", "-"):
                neg = True
                kind, n = self.take()
            if kind != "int":
                raise QKTwistError("exponent must be an integer")
            return value ** (-n if neg else n)
        return value

    def atom(self) -> CoefficientFunction:
        kind, val = self.take()
        if kind == "int":
            return CoefficientFunction.const(self.ring, val)
        if kind == "name":
            if val not in self.ring._index:
                raise QKTwistError(f"unknown generator {val!r}")
            return CoefficientFunction.var(self.ring, val)
        if (kind, val) == ("op", "("):
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise QKTwistError("unbalanced parentheses")
            return inner
        raise QKTwistError(f"unexpected token {val!r}")


def parse_coefficient(ring: ScalarRing, text: str) -> CoefficientFunction:
    """Parse the documented coefficient grammar into a CoefficientFunction."""
    parser = _Parser(ring, _tokenize(text))
    value = parser.expr()
    if parser.pos != len(parser.tokens):
        raise QKTwistError(f"trailing input in coefficient string: {text!r}")
    return value
