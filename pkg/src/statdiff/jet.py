"""Taylor-mode differentiation by truncated power series arithmetic.

A :class:`Jet` holds the normalized Taylor coefficients
``coeffs[k] = g^(k)(center) / k!`` up to a fixed order. Jets propagate
through the expression tree with the usual power-series recurrences, so any
derivative of ``g`` at a point costs one pass over the tree and no symbolic
algebra.

Centers may be arrays: ``coeffs`` then has shape ``(order + 1, *center.shape)``
and every recurrence runs elementwise, which is what makes the nested
remainder quadrature affordable.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .expr import Add, Const, Cos, Div, Exp, Expr, Ln, Mul, Pow, Sin, Sqrt, Sub, Var, as_expr

MAX_ORDER = 32


class Jet:
    """Truncated Taylor series about ``center``."""

    __slots__ = ("center", "coeffs")

    def __init__(self, center, coeffs) -> None:
        self.center = center
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.ndim == 0:
            raise ValueError("coeffs must have at least one entry")

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    def __repr__(self) -> str:
        return f"Jet(center={self.center!r}, coeffs={self.coeffs!r})"

    @classmethod
    def constant(cls, value, center, order: int) -> "Jet":
        c = np.zeros((order + 1,) + np.shape(center))
        c[0] = value
        return cls(center, c)

    @classmethod
    def variable(cls, center, order: int) -> "Jet":
        c = np.zeros((order + 1,) + np.shape(center))
        c[0] = center
        if order >= 1:
            c[1] = 1.0
        return cls(center, c)

    def derivatives(self) -> np.ndarray:
        """Return ``[g(c), g'(c), ..., g^(n)(c)]``."""
        fact = np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)
        return self.coeffs * fact.reshape((-1,) + (1,) * (self.coeffs.ndim - 1))

    def _wrap(self, coeffs) -> "Jet":
        return Jet(self.center, coeffs)

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError("jets of different order")
            return other.coeffs
        c = np.zeros_like(self.coeffs)
        c[0] = other
        return c

    def __add__(self, other):
        return self._wrap(self.coeffs + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.coeffs - self._coerce(other))

    def __rsub__(self, other):
        return self._wrap(self._coerce(other) - self.coeffs)

    def __neg__(self):
        return self._wrap(-self.coeffs)

    def __mul__(self, other):
        return self._wrap(_mul(self.coeffs, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(_div(self.coeffs, self._coerce(other)))

    def __rtruediv__(self, other):
        return self._wrap(_div(self._coerce(other), self.coeffs))

    def __pow__(self, n: int):
        return self._wrap(_ipow(self.coeffs, n))

    def exp(self) -> "Jet":
        return self._wrap(_exp(self.coeffs))

    def ln(self) -> "Jet":
        return self._wrap(_ln(self.coeffs))

    def sin(self) -> "Jet":
        return self._wrap(_sincos(self.coeffs)[0])

    def cos(self) -> "Jet":
        return self._wrap(_sincos(self.coeffs)[1])

    def sqrt(self) -> "Jet":
        return self._wrap(_sqrt(self.coeffs))


# ---------------------------------------------------------------------------
# Series recurrences. All operate on coefficient arrays of shape (n+1, ...).


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # sum_i a[i] * b[i] over the leading axis
    return np.einsum("i...,i...->...", a, b)


def _mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    for k in range(n):
        out[k] = _dot(a[: k + 1], b[k::-1])
    return out


def _require_nonzero(c0: np.ndarray, what: str) -> None:
    if np.any(c0 == 0):
        raise DomainError(f"{what} with zero constant term")


def _div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _require_nonzero(b[0], "series division")
    n = a.shape[0]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    for k in range(n):
        acc = a[k] - _dot(b[1 : k + 1], out[k - 1 :: -1][:k]) if k else a[k]
        out[k] = acc / b[0]
    return out


def _ipow(a: np.ndarray, n: int) -> np.ndarray:
    if n < 0:
        one = np.zeros_like(a)
        one[0] = 1.0
        return _div(one, _ipow(a, -n))
    result = np.zeros_like(a)
    result[0] = 1.0
    base = a
    while n:
        if n & 1:
            result = _mul(result, base)
        n >>= 1
        if n:
            base = _mul(base, base)
    return result


def _weights(n: int, ndim: int) -> np.ndarray:
    return np.arange(n, dtype=float).reshape((-1,) + (1,) * (ndim - 1))


def _exp(a: np.ndarray) -> np.ndarray:
    # k b_k = sum_{j=1..k} j a_j b_{k-j}
    n = a.shape[0]
    ja = _weights(n, a.ndim) * a
    out = np.empty_like(a)
    out[0] = np.exp(a[0])
    for k in range(1, n):
        out[k] = _dot(ja[1 : k + 1], out[k - 1 :: -1][:k]) / k
    return out


def _ln(a: np.ndarray) -> np.ndarray:
    # b_k = (a_k - (1/k) sum_{j=1..k-1} j b_j a_{k-j}) / a_0
    if np.any(~(a[0] > 0)):
        raise DomainError("ln of a nonpositive value")
    n = a.shape[0]
    out = np.empty_like(a)
    out[0] = np.log(a[0])
    jb = np.zeros_like(a)
    for k in range(1, n):
        acc = a[k]
        if k > 1:
            acc = acc - _dot(jb[1:k], a[k - 1 : 0 : -1]) / k
        out[k] = acc / a[0]
        jb[k] = k * out[k]
    return out


def _sincos(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # k s_k = sum j a_j c_{k-j};  k c_k = -sum j a_j s_{k-j}
    n = a.shape[0]
    ja = _weights(n, a.ndim) * a
    s = np.empty_like(a)
    c = np.empty_like(a)
    s[0] = np.sin(a[0])
    c[0] = np.cos(a[0])
    for k in range(1, n):
        s[k] = _dot(ja[1 : k + 1], c[k - 1 :: -1][:k]) / k
        c[k] = -_dot(ja[1 : k + 1], s[k - 1 :: -1][:k]) / k
    return s, c


def _sqrt(a: np.ndarray) -> np.ndarray:
    # b_k = (a_k - sum_{j=1..k-1} b_j b_{k-j}) / (2 b_0)
    if np.any(~(a[0] > 0)):
        raise DomainError("sqrt series needs a positive constant term")
    n = a.shape[0]
    out = np.empty_like(a)
    out[0] = np.sqrt(a[0])
    for k in range(1, n):
        acc = a[k]
        if k > 1:
            acc = acc - _dot(out[1:k], out[k - 1 : 0 : -1])
        out[k] = acc / (2.0 * out[0])
    return out


# ---------------------------------------------------------------------------


def jet_of(g, center, order: int, *, max_order: int = MAX_ORDER) -> Jet:
    """Taylor jet of ``g`` about ``center`` (scalar or array) to ``order``.

    Raises:
      DomainError: ``center`` violates the domain of some subexpression.
      ValueError: ``order`` is negative or above ``max_order``.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    if order > max_order:
        raise ValueError(f"order {order} exceeds the cap {max_order}")
    g = as_expr(g)
    c = np.asarray(center, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        coeffs = _jet(g, c, order)
    center_out = float(c) if c.ndim == 0 else c
    return Jet(center_out, coeffs)


def _jet(node: Expr, c: np.ndarray, n: int) -> np.ndarray:
    if isinstance(node, Const):
        out = np.zeros((n + 1,) + c.shape)
        out[0] = node.value
        return out
    if isinstance(node, Var):
        out = np.zeros((n + 1,) + c.shape)
        out[0] = c
        if n >= 1:
            out[1] = 1.0
        return out
    if isinstance(node, Add):
        return _jet(node.left, c, n) + _jet(node.right, c, n)
    if isinstance(node, Sub):
        return _jet(node.left, c, n) - _jet(node.right, c, n)
    if isinstance(node, Mul):
        return _mul(_jet(node.left, c, n), _jet(node.right, c, n))
    if isinstance(node, Div):
        den = _jet(node.right, c, n)
        if np.any(den[0] == 0):
            raise DomainError("division by zero")
        return _div(_jet(node.left, c, n), den)
    if isinstance(node, Pow):
        base = _jet(node.base, c, n)
        if node.exponent < 0 and np.any(base[0] == 0):
            raise DomainError("zero raised to a negative power")
        return _ipow(base, node.exponent)
    arg = _jet(node.arg, c, n)
    if isinstance(node, Exp):
        return _exp(arg)
    if isinstance(node, Ln):
        return _ln(arg)
    if isinstance(node, Sin):
        return _sincos(arg)[0]
    if isinstance(node, Cos):
        return _sincos(arg)[1]
    if isinstance(node, Sqrt):
        return _sqrt(arg)
    raise TypeError(f"unknown expression node {node!r}")


def derivative_at(g, x, k: int, *, max_order: int = MAX_ORDER):
    """k-th derivative of ``g`` at ``x`` (scalar or array)."""
    jet = jet_of(g, x, k, max_order=max_order)
    value = jet.coeffs[k] * math.factorial(k)
    if np.ndim(value) == 0:
        return float(value)
    return value
