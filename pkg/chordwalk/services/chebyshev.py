"""
Chebyshev Service
─────────────────
First- and second-kind Chebyshev polynomials T_n(x), U_n(x) evaluated by the
three-term recurrence, closed forms for |x| > 1 in terms of
z = x - sqrt(x^2 - 1), and a residual check for the product/sum identities
the spectral solver relies on.

Orders may be negative: T_{-n} = T_n, U_{-1} = 0 and U_{-n-1} = -U_{n-1}.
Every evaluator accepts a float or a numpy array for x.

Usage:
    from chordwalk.services.chebyshev import cheb_t, cheb_u, cheb_table
    cheb_u(5, 0.9)
    table = cheb_table(40, np.cos(theta))
    table.u(39)
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from chordwalk.core.errors import DomainError

logger = logging.getLogger(__name__)

Real = Union[float, np.ndarray]

IDENTITY_TAGS = (
    "u_reflection",
    "u_recurrence",
    "t_from_u",
    "u_product_sum",
    "u_product_difference",
    "ut_product_sum",
    "ut_product_difference",
    "pell",
    "product_to_sum",
)

# numbered names used in the derivation, a6 through a14
IDENTITY_ALIASES = {f"a{k}": tag for k, tag in enumerate(IDENTITY_TAGS, start=6)}


def _ones(x: Real) -> Real:
    if isinstance(x, np.ndarray):
        return np.ones_like(x, dtype=float)
    return 1.0


def _zeros(x: Real) -> Real:
    if isinstance(x, np.ndarray):
        return np.zeros_like(x, dtype=float)
    return 0.0


# ── RECURRENCE ────────────────────────────────────────────────────────────────

def cheb_t(n: int, x: Real) -> Real:
    n = abs(n)
    prev, cur = _ones(x), x * _ones(x)
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, 2 * x * cur - prev
    return cur


def cheb_u(n: int, x: Real) -> Real:
    if n == -1:
        return _zeros(x)
    if n < -1:
        return -cheb_u(-n - 2, x)
    prev, cur = _ones(x), 2 * x * _ones(x)
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, 2 * x * cur - prev
    return cur


@dataclass
class ChebTable:
    """T_k and U_k for k = 0..order at one argument (scalar or array)."""
    x: Real
    order: int
    t_values: np.ndarray
    u_values: np.ndarray

    def t(self, k: int) -> Real:
        k = abs(k)
        if k > self.order:
            raise DomainError(f"order {k} beyond table order {self.order}")
        return self.t_values[k]

    def u(self, k: int) -> Real:
        if k == -1:
            return self.u_values[0] * 0.0
        if k < -1:
            return -self.u(-k - 2)
        if k > self.order:
            raise DomainError(f"order {k} beyond table order {self.order}")
        return self.u_values[k]


def cheb_table(order: int, x: Real, method: str = "auto") -> ChebTable:
    """
    Tabulate T_0..T_order and U_0..U_order in one pass.

    method="closed" uses the z closed forms (needs |x| > 1 everywhere);
    "auto" picks them for a scalar |x| > 1 and the recurrence otherwise.
    """
    if order < 1:
        order = 1
    xa = np.asarray(x, dtype=float)
    if method == "auto":
        method = "closed" if xa.ndim == 0 and abs(float(xa)) > 1.0 else "recurrence"

    if method == "closed":
        ks = np.arange(order + 1).reshape((-1,) + (1,) * xa.ndim)
        t_values = cheb_t_closed(ks, xa)
        u_values = cheb_u_closed(ks, xa)
    elif method == "recurrence":
        t_values = np.empty((order + 1,) + xa.shape)
        u_values = np.empty((order + 1,) + xa.shape)
        t_values[0], t_values[1] = 1.0, xa
        u_values[0], u_values[1] = 1.0, 2 * xa
        for k in range(2, order + 1):
            t_values[k] = 2 * xa * t_values[k - 1] - t_values[k - 2]
            u_values[k] = 2 * xa * u_values[k - 1] - u_values[k - 2]
    else:
        raise DomainError(f"unknown Chebyshev evaluation method '{method}'")

    return ChebTable(x=x, order=order, t_values=t_values, u_values=u_values)


# ── CLOSED FORMS (|x| > 1) ────────────────────────────────────────────────────

def z_of(x: Real) -> Real:
    """z = x - sqrt(x^2 - 1). |z| > 1 for x < -1, 0 < z < 1 for x > 1."""
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) < 1.0):
        raise DomainError("z is real only for |x| >= 1")
    z = xa - np.sqrt(xa * xa - 1.0)
    return float(z) if z.ndim == 0 else z


def cheb_t_closed(n, x: Real) -> Real:
    z = np.asarray(z_of(x), dtype=float)
    n = np.abs(np.asarray(n))
    return 0.5 * (z ** n + z ** (-n))


def cheb_u_closed(n, x: Real) -> Real:
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) <= 1.0):
        raise DomainError("closed-form U_n needs |x| > 1")
    z = np.asarray(z_of(xa), dtype=float)
    n = np.asarray(n)
    # z^{-1} - z = 2 sqrt(x^2 - 1) > 0 on both sides of [-1, 1]
    return (z ** (-(n + 1)) - z ** (n + 1)) / (1.0 / z - z)


def cheb_asymptotic(n: int, x: float) -> tuple[float, float]:
    """Leading large-n behaviour of (T_n, U_n) for x < -1, where |z| > 1 dominates."""
    if x >= -1.0:
        raise DomainError(f"asymptotic form needs x < -1, got {x}")
    z = x - math.sqrt(x * x - 1.0)
    return z ** n / 2.0, -(z ** (n + 1)) / (1.0 / z - z)


# ── EVALUATION CONTEXT ────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ChebValue:
    x: float

    @classmethod
    def from_energy(cls, energy: float) -> "ChebValue":
        return cls(x=(2.0 - energy) / 2.0)

    @property
    def energy(self) -> float:
        return 2.0 - 2.0 * self.x

    @property
    def z(self) -> Optional[float]:
        if abs(self.x) < 1.0:
            return None
        return self.x - math.sqrt(self.x * self.x - 1.0)

    def t(self, n: int) -> float:
        return cheb_t(n, self.x)

    def u(self, n: int) -> float:
        return cheb_u(n, self.x)


# ── IDENTITIES ────────────────────────────────────────────────────────────────

def _u_backward(k: int, x: float) -> float:
    """U_k for k < 0 by running U_{j-1} = 2x U_j - U_{j+1} downward from U_1, U_0."""
    upper, cur = 2 * x, 1.0
    for _ in range(-k):
        upper, cur = cur, 2 * x * cur - upper
    return cur


def _identity_terms(tag: str, x: float, n: int, m: int) -> list[tuple[float, ...]]:
    """Each entry lists the signed terms whose sum must vanish."""
    T: Callable[[int], float] = lambda k: cheb_t(k, x)
    U: Callable[[int], float] = lambda k: cheb_u(k, x)

    if tag == "u_reflection":
        return [(U(n - 1), _u_backward(-n - 1, x))]
    if tag == "u_recurrence":
        return [(2 * x * U(n), -U(n - 1), -U(n + 1))]
    if tag == "t_from_u":
        return [
            (T(n), -U(n), x * U(n - 1)),
            (T(n), -x * U(n - 1), U(n - 2)),
        ]
    if tag == "u_product_sum":
        return [(U(n) * U(m), -U(n - 1) * U(m - 1), -U(n + m))]
    if tag == "u_product_difference":
        return [(U(n) * U(m), -U(n + 1) * U(m - 1), -U(n - m))]
    if tag == "ut_product_sum":
        return [(U(n) * T(m), U(m - 1) * T(n + 1), -U(n + m))]
    if tag == "ut_product_difference":
        return [(U(n) * T(m), -U(m - 1) * T(n + 1), -U(n - m))]
    if tag == "pell":
        return [(T(n) ** 2, -(x * x - 1) * U(n - 1) ** 2, -1.0)]
    if tag == "product_to_sum":
        return [
            (T(m) * U(n), -0.5 * U(m + n), -0.5 * U(n - m)),
            (T(m) * T(n), -0.5 * T(m + n), -0.5 * T(abs(m - n))),
        ]
    raise DomainError(f"unknown identity tag '{tag}', expected one of {IDENTITY_TAGS}")


def verify_identity(tag: str, x: float, n: int, m: int = 0, relative: bool = False) -> float:
    """
    Residual |LHS - RHS| of a named Chebyshev identity at (x, n, m).
    The numbered aliases a6..a14 resolve to the descriptive names.

    With relative=True each residual is divided by max(1, largest term), which
    is the meaningful scale once |x| > 1 makes the terms grow geometrically.
    Identities with two parts return the larger residual.
    """
    tag = IDENTITY_ALIASES.get(tag, tag)
    worst = 0.0
    for terms in _identity_terms(tag, x, n, m):
        residual = abs(math.fsum(terms))
        if relative:
            residual /= max(1.0, max(abs(t) for t in terms))
        worst = max(worst, residual)
    return worst
