"""Entire maps built from Fatou's function z -> z + e^{-z} + c.

Four kinds are supported and may be nested freely:

* :class:`Fatou` -- ``z + exp(-z) + c``
* :class:`Scaled` -- ``alpha * base(z)``
* :class:`ScalarMultiple` -- ``coeff * base(z)``
* :class:`AffineDamped` -- ``(1 - eps) * (base(z) - w) + w``

Any nesting collapses to ``A * (z + exp(-z) + c) + B``; :meth:`EntireMap.affine_form`
exposes that triple so the compiled kernels can iterate arbitrary maps.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import AnchorDivisionError, AnchorNotFixed, NumericOverflow

#: Any value with modulus above this is reported as overflow.
OVERFLOW_LIMIT = 1e300


def _checked(value: complex) -> complex:
    if not (cmath.isfinite(value) and abs(value) <= OVERFLOW_LIMIT):
        raise NumericOverflow()
    return value


def _exp_neg(z: complex) -> complex:
    try:
        return cmath.exp(-z)
    except OverflowError:
        raise NumericOverflow() from None


def _finite(x, name):
    if not cmath.isfinite(complex(x)):
        raise ValueError(f"{name} must be finite, got {x!r}")


class EntireMap:
    """Common interface. Subclasses are frozen dataclasses."""

    def _raw(self, z: complex) -> complex:
        raise NotImplementedError

    def _raw_deriv(self, z: complex) -> complex:
        raise NotImplementedError

    def affine_form(self) -> tuple[complex, complex, complex]:
        """Return ``(c, A, B)`` with ``f(z) = A*(z + exp(-z) + c) + B``."""
        raise NotImplementedError

    def __call__(self, z) -> complex:
        return _checked(self._raw(complex(z)))

    def deriv(self, z) -> complex:
        return _checked(self._raw_deriv(complex(z)))

    def displacement(self, z0, u) -> complex:
        """``f(z0 + u) - f(z0)`` without cancellation for small ``u``."""
        c, a, b = self.affine_form()
        z0, u = complex(z0), complex(u)
        em1 = complex(np.expm1(-u))
        return _checked(a * (u + _exp_neg(z0) * em1))

    def taylor(self, z0, order: int) -> list[complex]:
        """Taylor coefficients ``[f(z0), f'(z0), f''(z0)/2!, ...]`` up to ``order``."""
        c, a, b = self.affine_form()
        e = _exp_neg(complex(z0))
        coeffs = [self(z0), self.deriv(z0)]
        for k in range(2, order + 1):
            coeffs.append(a * e * (-1) ** k / math.factorial(k))
        return coeffs

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; no overflow checking."""
        c, a, b = self.affine_form()
        z = np.asarray(z, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            return a * (z + np.exp(-z) + c) + b


@dataclass(frozen=True)
class Fatou(EntireMap):
    c: complex = 1.0

    def __post_init__(self):
        _finite(self.c, "c")

    def _raw(self, z):
        return z + _exp_neg(z) + self.c

    def _raw_deriv(self, z):
        return 1 - _exp_neg(z)

    def affine_form(self):
        return complex(self.c), 1 + 0j, 0j


@dataclass(frozen=True)
class Scaled(EntireMap):
    base: EntireMap
    alpha: complex

    def __post_init__(self):
        _finite(self.alpha, "alpha")

    def _raw(self, z):
        return self.alpha * self.base._raw(z)

    def _raw_deriv(self, z):
        return self.alpha * self.base._raw_deriv(z)

    def affine_form(self):
        c, a, b = self.base.affine_form()
        return c, self.alpha * a, self.alpha * b


@dataclass(frozen=True)
class ScalarMultiple(EntireMap):
    base: EntireMap
    coeff: complex

    def __post_init__(self):
        _finite(self.coeff, "coeff")

    def _raw(self, z):
        return self.coeff * self.base._raw(z)

    def _raw_deriv(self, z):
        return self.coeff * self.base._raw_deriv(z)

    def affine_form(self):
        c, a, b = self.base.affine_form()
        return c, self.coeff * a, self.coeff * b


@dataclass(frozen=True)
class AffineDamped(EntireMap):
    base: EntireMap
    w: complex
    eps: float

    def __post_init__(self):
        _finite(self.w, "w")
        _finite(self.eps, "eps")

    def _raw(self, z):
        return (1 - self.eps) * (self.base._raw(z) - self.w) + self.w

    def _raw_deriv(self, z):
        return (1 - self.eps) * self.base._raw_deriv(z)

    def affine_form(self):
        c, a, b = self.base.affine_form()
        k = 1 - self.eps
        return c, k * a, k * b + self.eps * self.w


@dataclass(frozen=True)
class RayCurve:
    """The ray ``s -> anchor + s * direction`` for ``s >= 0``."""

    direction: complex = 1.0
    anchor: complex = 0.0

    def __post_init__(self):
        if abs(abs(complex(self.direction)) - 1.0) > 1e-12:
            raise ValueError("ray direction must have modulus 1")

    def __call__(self, s: float) -> complex:
        return complex(self.anchor) + s * complex(self.direction)


REAL_AXIS = RayCurve()


def evaluate(f: EntireMap, z) -> complex:
    return f(z)


def derivative(f: EntireMap, z) -> complex:
    return f.deriv(z)


def pin_fixed_point(base: EntireMap, gamma: RayCurve, s: float) -> ScalarMultiple:
    """Rescale ``base`` so that ``gamma(s)`` becomes a fixed point.

    Returns ``ScalarMultiple(base, gamma(s) / base(gamma(s)))``.
    """
    if not s > 0:
        raise ValueError("s must be positive")
    anchor = gamma(s)
    value = base(anchor)
    if value == 0:
        raise AnchorDivisionError()
    return ScalarMultiple(base, anchor / value)


def renormalize_at(h: EntireMap, w) -> ScalarMultiple:
    """Rescale ``h`` by ``w / h(w)`` so that ``w`` becomes fixed.

    Nested scalar multiples are folded into a single coefficient.
    """
    w = complex(w)
    value = h(w)
    if value == 0:
        raise AnchorDivisionError()
    factor = w / value
    if isinstance(h, ScalarMultiple):
        return ScalarMultiple(h.base, h.coeff * factor)
    return ScalarMultiple(h, factor)


def damp(h: EntireMap, w, eps: float) -> AffineDamped:
    """Contract ``h`` towards its fixed point ``w`` by the factor ``1 - eps``."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    w = complex(w)
    if not abs(h(w) - w) < 1e-9 * (1 + abs(w)):
        raise AnchorNotFixed()
    return AffineDamped(h, w, float(eps))


def damping_schedule(s: float) -> float:
    """``eps = s**-2``, so that ``eps * s -> 0`` as ``s -> oo``."""
    return s ** -2.0
