"""Formal asymptotic series at infinity and rational-solution parameter tests.

Two families of formal solutions exist in pole-free sectors:

  zero   p ~ -alpha/z + sum a_n z^(-2n-1),   q ~ -beta/z + sum b_n z^(-2n-1)
  third  p ~ -tau z + sum c_n z^(-2n+1),     q ~ -conj(tau) z + sum d_n z^(-2n+1)

Series are stored in ``x = 1/z`` as ``(coeffs, lo)`` pairs, ``coeffs[k]`` being
the coefficient of ``x**(lo + k)``.  For both families ``N`` counts the
correction terms after the leading inverse power, so the truncation error of p
is ``O(|z|^(-2N-3))``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import solve_ivp

from ._series import coeff, ladd, leval, lmul
from .core import ALL_ROOTS, Params, ThirdRoot, as_complex_array


class Family(str, Enum):
    zero = "zero"
    third = "third"


@dataclass(frozen=True)
class AsySeries:
    family: Family
    params: Params
    N: int
    p: tuple
    q: tuple
    H: tuple
    tau: ThirdRoot | None = None

    @property
    def top(self) -> int:
        return 2 * self.N + 1

    def p_coeff(self, power: int) -> complex:
        """Coefficient of ``z**power`` in p."""
        return coeff(*self.p, -power)

    def q_coeff(self, power: int) -> complex:
        return coeff(*self.q, -power)

    def H_coeff(self, power: int) -> complex:
        return coeff(*self.H, -power)

    def to_dict(self) -> dict:
        def ser(c):
            arr, lo = c
            return [{"power": -(lo + k), "re": v.real, "im": v.imag} for k, v in enumerate(arr) if v != 0]

        return {
            "family": self.family.value,
            "tau": None if self.tau is None else self.tau.tag,
            "params": {"alpha": {"re": self.params.alpha.real, "im": self.params.alpha.imag},
                       "beta": {"re": self.params.beta.real, "im": self.params.beta.imag}},
            "N": self.N,
            "coefficients": {"p": ser(self.p), "q": ser(self.q), "H": ser(self.H)},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _truncate(c, lo, top):
    arr = np.asarray(c, dtype=complex)[: top - lo + 1]
    return arr, lo


def _hamiltonian_series(p, q, params, top):
    """H in powers of x = 1/z, truncated at ``x**top``."""
    z = (np.array([1.0 + 0j]), -1)
    p2 = lmul(*p, *p, top + 4)
    q2 = lmul(*q, *q, top + 4)
    p3 = lmul(*p2, *p, top)
    q3 = lmul(*q2, *q, top)
    pq = lmul(*p, *q, top + 1)
    zpq = lmul(*z, *pq, top)
    h, lo = ladd((1 / 3, *p3), (1 / 3, *q3), (1.0, *zpq),
                 (params.beta, *p), (params.alpha, *q))
    return _truncate(h, lo, top)


def _zero_coeffs(params, K):
    a = np.zeros(K + 1, dtype=complex)
    b = np.zeros(K + 1, dtype=complex)
    a[0], b[0] = -params.alpha, -params.beta
    for n in range(1, K + 1):
        a[n] = (2 * n - 1) * a[n - 1] - sum(b[i] * b[n - 1 - i] for i in range(n))
        b[n] = -(2 * n - 1) * b[n - 1] - sum(a[i] * a[n - 1 - i] for i in range(n))
    return a, b


def _spread(vals, start):
    """Odd-power layout: ``vals[k]`` becomes the coefficient of ``x**(start + 2k)``."""
    out = np.zeros(2 * len(vals) - 1, dtype=complex)
    out[::2] = vals
    return out, start


def series_zero(params: Params, N: int) -> AsySeries:
    """Formal solution ``p ~ -alpha/z + ...`` with N correction terms."""
    if N < 1:
        raise ValueError("N must be >= 1")
    a, b = _zero_coeffs(params, N + 2)
    top = 2 * N + 1
    p = _spread(a, 1)
    q = _spread(b, 1)
    H = _hamiltonian_series(p, q, params, top)
    return AsySeries(Family.zero, params, N, _truncate(*p, top), _truncate(*q, top), H)


def _third_coeffs(params, tau: ThirdRoot, K):
    t, tb = tau.value, tau.conj().value
    M = np.array([[1.0, -2 * tb], [-2 * t, 1.0]])
    c = np.zeros(K + 1, dtype=complex)
    d = np.zeros(K + 1, dtype=complex)
    c[0], d[0] = -t, -tb
    for n in range(1, K + 1):
        if n == 1:
            rhs = np.array([t - params.alpha, -tb - params.beta])
        else:
            dd = sum(d[i] * d[n - i] for i in range(1, n))
            cc = sum(c[i] * c[n - i] for i in range(1, n))
            rhs = np.array([-dd + (2 * n - 3) * c[n - 1], -(2 * n - 3) * d[n - 1] - cc])
        c[n], d[n] = np.linalg.solve(M, rhs)
    return c, d


def series_third(params: Params, tau: ThirdRoot, N: int) -> AsySeries:
    """Formal solution ``p ~ -tau z + ...`` with N correction terms after the 1/z term."""
    if N < 1:
        raise ValueError("N must be >= 1")
    c, d = _third_coeffs(params, tau, N + 3)
    top = 2 * N + 1
    p = _spread(c, -1)
    q = _spread(d, -1)
    H = _hamiltonian_series(p, q, params, top)
    return AsySeries(Family.third, params, N, _truncate(*p, top), _truncate(*q, top), H, tau=tau)


def eval_series(s: AsySeries, z):
    """Truncated ``(p, q, H, last_term)``; ``last_term`` is |last included p term|."""
    z = as_complex_array(z)
    x = 1.0 / z
    p = leval(*s.p, x)
    q = leval(*s.q, x)
    H = leval(*s.H, x)
    arr, lo = s.p
    last = np.abs(arr[-1] * x ** (lo + len(arr) - 1))
    return p, q, H, last


def series_derivative(c, lo):
    """d/dz of a series in x = 1/z: ``x**n`` maps to ``-n x**(n+1)``."""
    n = lo + np.arange(len(c))
    return -n * np.asarray(c, dtype=complex), lo + 1


def system_defect(s: AsySeries, top: int | None = None):
    """Series of ``(p' + q^2 + z p + alpha, q' - p^2 - z q - beta)`` to ``x**top``."""
    top = s.top if top is None else top
    z = (np.array([1.0 + 0j]), -1)
    one = (np.array([1.0 + 0j]), 0)
    dp = series_derivative(*s.p)
    dq = series_derivative(*s.q)
    e1 = ladd((1.0, *dp), (1.0, *lmul(*s.q, *s.q, top)), (1.0, *lmul(*z, *s.p, top)),
              (s.params.alpha, *one))
    e2 = ladd((1.0, *dq), (-1.0, *lmul(*s.p, *s.p, top)), (-1.0, *lmul(*z, *s.q, top)),
              (-s.params.beta, *one))
    return _truncate(*e1, top), _truncate(*e2, top)


# -- rational solutions --------------------------------------------------------

@dataclass
class RationalCandidate:
    family: str
    tau: str | None
    counts: tuple | None
    degree: int | None
    residual: float

    @property
    def ok(self) -> bool:
        return self.counts is not None


@dataclass
class RationalReport:
    params: Params
    classification: str
    candidates: list
    printed_first: bool
    printed_second: bool


def _pole_counts(p1, q1, h1, tol=1e-9):
    """Nonnegative integer ``(n^1, n^w, n^W)`` with ``sum rho n = p1``,
    ``sum -conj(rho) n = q1`` and ``sum n = h1``, or None."""
    rows, rhs = [], []
    for target, f in ((p1, lambda r: r.value), (q1, lambda r: -r.conj().value), (h1, lambda r: 1.0)):
        v = np.array([f(r) for r in ALL_ROOTS], dtype=complex)
        rows += [v.real, v.imag]
        rhs += [complex(target).real, complex(target).imag]
    A, b = np.array(rows), np.array(rhs)
    n, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = float(np.max(np.abs(A @ n - b)))
    k = np.round(n)
    if resid > tol * (1 + np.max(np.abs(b))) or np.max(np.abs(n - k)) > 1e-7 or np.any(k < 0):
        return None, resid
    return tuple(int(v) for v in k), resid


def _in_lattice(x, step, offset=0.0, tol=1e-9):
    y = (x - offset) / step
    return abs(y - round(y)) < tol


def rational_conditions(params: Params) -> RationalReport:
    """Necessary conditions for a rational solution.

    A rational solution follows one formal series on the whole plane, so the
    coefficients of 1/z in p, q and H must equal the residue sums
    ``sum rho n^rho``, ``sum -conj(rho) n^rho`` and ``sum n^rho`` over its finite
    poles.  Each family is tested for nonnegative integer witnesses ``n^rho``.
    The closed-form lattice conditions are reported alongside.
    """
    a, b = params.alpha, params.beta
    cands = []
    s = series_zero(params, 1)
    n, res = _pole_counts(s.p_coeff(-1), s.q_coeff(-1), s.H_coeff(-1))
    cands.append(RationalCandidate("zero", None, n, None if n is None else sum(n), res))
    for tau in ALL_ROOTS:
        s = series_third(params, tau, 1)
        n, res = _pole_counts(s.p_coeff(-1), s.q_coeff(-1), s.H_coeff(-1))
        cands.append(RationalCandidate("third", tau.tag, n, None if n is None else sum(n), res))
    conj_ok = abs(b + a.conjugate()) < 1e-9
    first = (conj_ok and _in_lattice(a.real, 0.5) and _in_lattice(a.imag, math.sqrt(3) / 2)
             and _in_lattice(abs(a) ** 2, 1.0) and abs(a) ** 2 >= -1e-9)
    m = (a * a + a.conjugate() ** 2 - abs(a) ** 2 - 1).real
    second = (conj_ok and _in_lattice(a.real, 1.5, 1.0) and _in_lattice(a.imag, math.sqrt(3) / 2)
              and _in_lattice(m, 3.0) and m >= -1e-9)
    if cands[0].ok:
        cls = "first-kind candidate"
    elif cands[1].ok:
        cls = "second-kind candidate"
    else:
        cls = "none"
    return RationalReport(params, cls, cands, first, second)


# -- remainder decay -----------------------------------------------------------

@dataclass
class DecayFit:
    N: int
    theta: float
    tau: ThirdRoot
    slope: float
    expected: int
    radii: np.ndarray
    errors: np.ndarray
    next_coeff: float = 0.0

    @property
    def deviation(self) -> float:
        return abs(self.slope - self.expected)

    @property
    def degenerate(self) -> bool:
        """The first omitted coefficient vanishes: the series terminates and the
        remainder is exponentially small, so the slope only reflects round-off."""
        return self.next_coeff < 1e-10


def _riccati_forcing(s: AsySeries, rho: ThirdRoot, top: int):
    """Series of ``R = -alpha - rho z^2 + z S - conj(rho) S^2 - S'`` for the p-part S.

    Every power below the truncation order cancels by construction; those
    coefficients are checked to be round-off and then set to zero exactly, so
    that R can be evaluated at large |z| without cancellation.
    """
    z = (np.array([1.0 + 0j]), -1)
    z2 = (np.array([1.0 + 0j]), -2)
    one = (np.array([1.0 + 0j]), 0)
    S = s.p
    R = ladd((-s.params.alpha, *one), (-rho.value, *z2), (1.0, *lmul(*z, *S, top)),
             (-rho.conj().value, *lmul(*S, *S, top)), (-1.0, *series_derivative(*S)))
    c, lo = _truncate(*R, top)
    keep = 2 * s.N + 2
    c = c.copy()
    for k in range(len(c)):
        if lo + k < keep:
            if abs(c[k]) > 1e-8 * (1 + np.max(np.abs(c))):
                raise ValueError("series is not a formal solution of the Riccati equation")
            c[k] = 0
    return c, lo


def riccati_decay(sol, N: int, theta: float, r_start: float = 6.0, radii=None,
                  rtol: float = 1e-12) -> DecayFit:
    """Fit the decay exponent of ``p - S_N`` along the ray ``arg z = theta``.

    ``sol`` is a first-kind oracle (attributes ``rho``, ``params``).  The
    remainder ``r = p - S_N`` solves ``r' = R + (z - 2 conj(rho) S) r - conj(rho) r^2``;
    it is integrated from the oracle value at ``r_start`` so that its tiny size
    is resolved to relative rather than absolute precision.  The ray must be
    attracting for the outward direction.
    """
    if radii is None:
        radii = np.geomspace(10.0, 40.0, 13)
    rho = sol.rho
    e = complex(math.cos(theta), math.sin(theta))
    z0 = r_start * e
    p0, _ = sol.evaluate(np.array([z0]))
    tau, _ = ThirdRoot.nearest(-p0[0] / z0)
    growth = (1 + 2 * rho.conj().value * tau.value) * e * e
    if growth.real >= 0:
        raise ValueError(f"ray arg z = {theta:.3f} is not attracting for tau = {tau.tag}")
    s = series_third(sol.params, tau, N)
    R = _riccati_forcing(s, rho, 2 * N + 12)
    rb = rho.conj().value
    Sc = [complex(v) for v in s.p[0][::-1]]
    Rc = [complex(v) for v in R[0][::-1]]

    def horner(c, lo, x):
        acc = 0j
        for v in c:
            acc = acc * x + v
        return acc * x ** lo

    def lin(t):
        z = t * e
        return z - 2 * rb * horner(Sc, s.p[1], 1 / z)

    def f(t, y):
        z = t * e
        return [e * (horner(Rc, R[1], 1 / z) + lin(t) * y[0] - rb * y[0] * y[0])]

    r0 = p0[0] - leval(*s.p, 1 / z0)
    out = solve_ivp(f, (r_start, float(radii[-1])), [complex(r0)], method="DOP853",
                    t_eval=radii, rtol=rtol, atol=1e-40)
    if not out.success:
        raise RuntimeError(f"remainder integration failed: {out.message}")
    err = np.abs(out.y[0])
    slope = float(np.polyfit(np.log(radii), np.log(err), 1)[0])
    nxt = series_third(sol.params, tau, N + 1).p_coeff(-(2 * N + 3))
    scale = 1 + float(np.max(np.abs(s.p[0])))
    return DecayFit(N, theta, tau, slope, -(2 * N + 3), np.asarray(radii), err, abs(nxt) / scale)


def attracting_bisectors(sol, r_probe: float = 6.0):
    """Quadrant bisectors along which the outward remainder flow contracts."""
    rho = sol.rho
    out = []
    for nu in range(4):
        th = (2 * nu + 1) * math.pi / 4
        e = complex(math.cos(th), math.sin(th))
        z = r_probe * e
        p, _ = sol.evaluate(np.array([z]))
        tau, _ = ThirdRoot.nearest(-p[0] / z)
        if ((1 + 2 * rho.conj().value * tau.value) * e * e).real < 0:
            out.append(th)
    return out
