"""Domain types, the system right-hand side, the Hamiltonian and the PIV bridge.

The system is

    p' = -q**2 - z*p - alpha,    q' = p**2 + z*q + beta,

with Hamiltonian H = (p**3 + q**3)/3 + z*p*q + beta*p + alpha*q.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)
OMEGA_BAR = OMEGA.conjugate()
SQRT3 = math.sqrt(3.0)


class PhlabError(Exception):
    """Base class for all errors raised by this package."""


@dataclass(frozen=True, order=True)
class ThirdRoot:
    """A cube root of unity ``exp(2*pi*i*k/3)`` stored by its index ``k``."""

    k: int

    def __post_init__(self):
        if self.k not in (0, 1, 2):
            object.__setattr__(self, "k", int(self.k) % 3)

    @property
    def value(self) -> complex:
        return (1.0 + 0j, OMEGA, OMEGA_BAR)[self.k]

    def conj(self) -> "ThirdRoot":
        return ThirdRoot((3 - self.k) % 3)

    def __mul__(self, other: "ThirdRoot") -> "ThirdRoot":
        return ThirdRoot((self.k + other.k) % 3)

    @property
    def tag(self) -> str:
        return "1wW"[self.k]

    @classmethod
    def from_tag(cls, tag: str) -> "ThirdRoot":
        try:
            return cls("1wW".index(tag))
        except ValueError:
            raise ValueError(f"unknown root tag {tag!r}; expected one of 1, w, W") from None

    @classmethod
    def nearest(cls, x: complex) -> tuple["ThirdRoot", float]:
        """Nearest cube root of unity and the classification margin.

        The margin is ``(d2 - d1)/sqrt(3)`` with ``d1 <= d2`` the distances to the
        nearest and second-nearest roots; it is 1 on a root and 0 on a bisector.
        """
        d = sorted((abs(x - r.value), r.k) for r in ALL_ROOTS)
        return cls(d[0][1]), (d[1][0] - d[0][0]) / SQRT3

    def __repr__(self) -> str:
        return f"ThirdRoot({self.tag})"


ALL_ROOTS = (ThirdRoot(0), ThirdRoot(1), ThirdRoot(2))
ONE, W, WBAR = ALL_ROOTS


@dataclass(frozen=True)
class Params:
    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        if not (cmath.isfinite(a) and cmath.isfinite(b)):
            raise ValueError("parameters must be finite")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def first_kind_defect(self) -> complex:
        """``alpha - beta + 1``; zero exactly for the class P(1)."""
        return self.alpha - self.beta + 1.0

    def as_tuple(self) -> tuple[complex, complex]:
        return self.alpha, self.beta


@dataclass(frozen=True)
class State:
    z: complex
    p: complex
    q: complex

    def __post_init__(self):
        for name in ("z", "p", "q"):
            v = complex(getattr(self, name))
            if not cmath.isfinite(v):
                raise ValueError(f"state component {name} is not finite")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class PivBridge:
    a: complex
    b: complex
    alpha_hat: complex
    beta_hat: complex


def rhs(s: State, params: Params) -> tuple[complex, complex]:
    z, p, q = s.z, s.p, s.q
    return -q * q - z * p - params.alpha, p * p + z * q + params.beta


def rhs_array(z, p, q, alpha, beta):
    """Vectorised right-hand side on numpy arrays."""
    return -q * q - z * p - alpha, p * p + z * q + beta


def hamiltonian(s: State, params: Params) -> complex:
    return hamiltonian_array(s.z, s.p, s.q, params.alpha, params.beta)


def hamiltonian_array(z, p, q, alpha, beta):
    return (p ** 3 + q ** 3) / 3.0 + z * p * q + beta * p + alpha * q


def w_derivatives(z, p, q, alpha, beta):
    """``w = p + q - z`` with exact first and second derivatives along the flow."""
    dp, dq = rhs_array(z, p, q, alpha, beta)
    w = p + q - z
    w1 = dp + dq - 1.0
    # p'' = -2 q q' - p - z p',  q'' = 2 p p' + q + z q'
    ddp = -2.0 * q * dq - p - z * dp
    ddq = 2.0 * p * dp + q + z * dq
    return w, w1, ddp + ddq


def pivmod_residual(z, w, w1, w2, params: Params):
    """Residual of 2ww'' = w'^2 - w^4 - 4zw^3 - (2a+2b+3z^2)w^2 - (a-b+1)^2."""
    a, b = params.alpha, params.beta
    return (2.0 * w * w2 - w1 * w1 + w ** 4 + 4.0 * z * w ** 3
            + (2.0 * a + 2.0 * b + 3.0 * z * z) * w * w + (a - b + 1.0) ** 2)


def piv_bridge(params: Params) -> PivBridge:
    """Parameters of PIV reached through ``y(z) = a*w(b*z)``.

    ``b`` is the principal fourth root of -4/3 and ``a = -b**3/2``.
    """
    b = (-4.0 / 3.0 + 0j) ** 0.25
    a = -0.5 * b ** 3
    alpha_hat = 1j / SQRT3 * (params.alpha + params.beta)
    beta_hat = 2.0 / 9.0 * params.first_kind_defect ** 2
    return PivBridge(a=a, b=b, alpha_hat=alpha_hat, beta_hat=beta_hat)


def retour(w, w_tilde, z):
    """Recover ``(p, q)`` from ``w = p+q-z`` and ``w~ = omega p + omegabar q - z``."""
    o, ob = OMEGA, OMEGA_BAR
    p = (w_tilde - ob * w - (ob - 1.0) * z) / (o - ob)
    q = (w_tilde - o * w - (o - 1.0) * z) / (ob - o)
    return p, q


def as_complex_array(x) -> np.ndarray:
    return np.asarray(x, dtype=np.complex128)
