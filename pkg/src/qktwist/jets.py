"""First-order jets: exact (value, gradient) pairs at a sample point.

Sampled verification of identities that involve one exterior derivative needs
the partial derivatives of every coefficient at the point.  Evaluating whole
pipelines in jet arithmetic is far cheaper than expanding the symbolic
derivatives of large intermediate tensors, and stays exact: entries are
Fractions, or polynomials in algebraic generators such as sqrt(4/3).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DenominatorVanishes
from .scalars import CoefficientFunction, fe_is_zero


class Jet:
    """Value and gradient of a scalar quantity at a fixed point."""

    __slots__ = ("val", "grad")

    def __init__(self, val, grad):
        self.val = val
        self.grad = tuple(grad)

    @classmethod
    def constant(cls, value, nvars: int) -> "Jet":
        return cls(value, (Fraction(0),) * nvars)

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        if isinstance(other, (int, Fraction)) or hasattr(other, "terms"):
            return Jet.constant(other, len(self.grad))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Jet(self.val + other.val, tuple(a + b for a, b in zip(self.grad, other.grad)))

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, tuple(-g for g in self.grad))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) or hasattr(other, "terms"):
            return Jet(self.val * other, tuple(g * other for g in self.grad))
        if not isinstance(other, Jet):
            return NotImplemented
        a, b = self, other
        return Jet(
            a.val * b.val,
            tuple(a.val * gb + b.val * ga for ga, gb in zip(a.grad, b.grad)),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if fe_is_zero(other.val):
            raise ZeroDivisionError("jet division by zero value")
        val = self.val / other.val
        inv2 = other.val * other.val
        grad = tuple((ga * other.val - self.val * gb) / inv2 for ga, gb in zip(self.grad, other.grad))
        return Jet(val, grad)

    def __pow__(self, n: int):
        result = Jet.constant(Fraction(1), len(self.grad))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self):
        return f"Jet({self.val})"


def coefficient_jet(cf: CoefficientFunction, values, where="coefficient") -> Jet:
    """Exact jet of a rational coefficient at a point (dict var -> Fraction)."""
    n = cf.ring.nvars
    num = cf.num
    jet = Jet(num.eval_at(values), tuple(num.diff(v).eval_at(values) for v in range(n)))
    for factor, exp in cf.den:
        fval = factor.eval_at(values)
        if fe_is_zero(fval):
            raise DenominatorVanishes(where, values)
        fjet = Jet(fval, tuple(factor.diff(v).eval_at(values) for v in range(n)))
        jet = jet / (fjet ** exp)
    return jet
