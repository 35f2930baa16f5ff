"""Asymmetric triangular fuzzy numbers.

A :class:`Tfn` is stored by its endpoints ``(left, center, right)``; the
left spread is ``center - left`` and the right spread ``right - center``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy import integrate

from .errors import InputError

#: Below this magnitude the exponential weighted integral switches to its series.
SERIES_EPS = 1.0
SERIES_TERMS = 24


class HOutOfRange(InputError):
    pass


class LengthMismatch(InputError):
    pass


class NonFiniteFunctionValue(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval lower bound {self.lo} exceeds upper bound {self.hi}")

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains(self, other: "Interval", tol: float = 0.0) -> bool:
        return self.lo - tol <= other.lo and other.hi <= self.hi + tol


@dataclass(frozen=True)
class Tfn:
    left: float
    center: float
    right: float

    def __post_init__(self):
        for name in ("left", "center", "right"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.left <= self.center <= self.right):
            raise ValueError(f"invalid Tfn: need left <= center <= right, got {self.as_tuple()}")

    @classmethod
    def crisp(cls, x: float) -> "Tfn":
        return cls(x, x, x)

    @classmethod
    def from_spreads(cls, center: float, left_spread: float, right_spread: float) -> "Tfn":
        return cls(center - left_spread, center, center + right_spread)

    @property
    def left_spread(self) -> float:
        return self.center - self.left

    @property
    def right_spread(self) -> float:
        return self.right - self.center

    @property
    def is_crisp(self) -> bool:
        return self.left == self.center == self.right

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.left, self.center, self.right)

    def to_json(self) -> list[float]:
        return [self.left, self.center, self.right]

    def __add__(self, other: "Tfn") -> "Tfn":
        return Tfn(self.left + other.left, self.center + other.center, self.right + other.right)


def membership(a: Tfn, x: float) -> float:
    if x == a.center:
        return 1.0
    if x < a.center:
        if x < a.left or a.left_spread == 0:
            return 0.0
        return 1.0 - (a.center - x) / a.left_spread
    if x > a.right or a.right_spread == 0:
        return 0.0
    return 1.0 - (x - a.center) / a.right_spread


def alpha_cut(a: Tfn, h: float) -> Interval:
    if not 0.0 <= h <= 1.0:
        raise HOutOfRange(f"h must lie in [0, 1], got {h}")
    return Interval(a.center - a.left_spread * (1 - h), a.center + a.right_spread * (1 - h))


def linear_combination(coeffs: Sequence[Tfn], weights: Sequence[float]) -> Tfn:
    """``sum_i w_i * a_i`` with negative weights swapping endpoints."""
    if len(coeffs) != len(weights) or not coeffs:
        raise LengthMismatch(f"got {len(coeffs)} coefficients and {len(weights)} weights")
    left = center = right = 0.0
    for a, w in zip(coeffs, weights):
        center += w * a.center
        if w >= 0:
            left += w * a.left
            right += w * a.right
        else:
            left += w * a.right
            right += w * a.left
    # rounding can push center a hair outside the endpoints
    return Tfn(min(left, center), center, max(right, center))


def defuzzify_weighted(a: Tfn, f: Callable[[float], float] = lambda x: x) -> float:
    """Weighted valuation of ``f`` over the alpha-cut endpoints (weight ``h``).

    Evaluated by adaptive quadrature; this is the reference path used to
    check :func:`defuzzify_exp_closed`.
    """
    if a.is_crisp:
        v = f(a.center)
        if not math.isfinite(v):
            raise NonFiniteFunctionValue(f"f({a.center}) = {v}")
        return float(v)

    def lower(h):
        v = f(a.center - a.left_spread * (1 - h))
        if not math.isfinite(v):
            raise NonFiniteFunctionValue(f"non-finite value {v} at h={h}")
        return v * h

    def upper(h):
        v = f(a.center + a.right_spread * (1 - h))
        if not math.isfinite(v):
            raise NonFiniteFunctionValue(f"non-finite value {v} at h={h}")
        return v * h

    lo, _ = integrate.quad(lower, 0.0, 1.0, epsabs=1e-10, epsrel=1e-13, limit=200)
    hi, _ = integrate.quad(upper, 0.0, 1.0, epsabs=1e-10, epsrel=1e-13, limit=200)
    # the normalizing integral of h over [0, 1] is exactly 1/2
    return 0.5 * (lo + hi) / 0.5


def exp_weight_integral(a: float, b: float) -> float:
    """``integral_0^1 exp(a + b*h) * h dh``."""
    if abs(b) < SERIES_EPS:
        # sum_n b^n / (n! (n + 2)); the closed form cancels badly for small b
        term, total = 1.0, 0.5
        for n in range(1, SERIES_TERMS):
            term *= b / n
            total += term / (n + 2)
        return math.exp(a) * total
    return math.exp(a) * (b * math.exp(b) - math.expm1(b)) / (b * b)


def exp_weighted_value(lower0: float, center: float, upper0: float) -> float:
    """Weighted value of ``exp`` over cuts ``[lower0 + h*(center-lower0), upper0 + h*(center-upper0)]``.

    The bounds need not be ordered, which lets callers evaluate h-level
    families that are not alpha-cuts of a proper fuzzy number.
    """
    return exp_weight_integral(lower0, center - lower0) + exp_weight_integral(upper0, center - upper0)


def defuzzify_exp_closed(a: Tfn) -> float:
    if a.is_crisp:
        return math.exp(a.center)
    return exp_weighted_value(a.left, a.center, a.right)
