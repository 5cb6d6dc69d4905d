"""Re-scaling limits, cluster-value estimates and the autonomous limit system.

The rescaled pair ``p_k(zeta) = p(k + zeta/k)/k``, ``q_k`` likewise, tends along
suitable sequences ``k -> oo`` to solutions of the autonomous system

    u' = -v^2 - u,    v' = u^2 + v,    (u^3 + v^3)/3 + u v = c.

At a pole with residue rho the constant is ``c = 1/3 + 2h``, ``h`` being the
free Laurent coefficient, which is how ``limit_integrate`` crosses poles.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _dop853 as K
from .core import ONE, OMEGA, OMEGA_BAR, SQRT3, PhlabError, ThirdRoot, hamiltonian_array
from .laurent import PoleRecord, limit_expand

LIMIT_TRIGGER = 40.0
LIMIT_VAULT = 0.25
LIMIT_ORDER = 24


class PoleOfClosedForm(PhlabError):
    pass


class LimitPassageError(PhlabError):
    pass


def first_integral(u, v):
    return (u ** 3 + v ** 3) / 3 + u * v


@dataclass(frozen=True)
class LimitSystemState:
    t: complex
    u: complex
    v: complex

    @property
    def c(self) -> complex:
        return complex(first_integral(self.u, self.v))


# -- rescaled samples ----------------------------------------------------------

def rescale_eval(sol, kappa, zeta):
    """``(p(k + zeta/k)/k, q(k + zeta/k)/k)``; poles show up as non-finite values."""
    kappa = complex(kappa)
    if kappa == 0:
        raise ValueError("kappa must be nonzero")
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    p, q = sol.evaluate(kappa + zeta / kappa)
    return p / kappa, q / kappa


def limit_residual(sol, kappa, zetas, radius: float = 0.05, n: int = 16, bound: float = 5.0):
    """Residual of the limit system on rescaled samples.

    The zeta-derivative comes from the Cauchy formula on a circle of ``radius``
    round each point, so it is independent of the right-hand side.  Points
    whose circle comes near a pole (``|u| + |v| > bound``) are masked with NaN.
    Residuals are scaled by ``1 + |u|^2 + |v|^2``.
    """
    zetas = np.atleast_1d(np.asarray(zetas, dtype=complex))
    ang = np.exp(2j * math.pi * np.arange(n) / n)
    ring = (zetas[:, None] + radius * ang[None, :]).ravel()
    pr, qr = rescale_eval(sol, kappa, ring)
    pr, qr = pr.reshape(len(zetas), n), qr.reshape(len(zetas), n)
    u, v = pr.mean(axis=1), qr.mean(axis=1)
    du = (pr * np.conj(ang)[None, :]).mean(axis=1) / radius
    dv = (qr * np.conj(ang)[None, :]).mean(axis=1) / radius
    r1 = du + v * v + u
    r2 = dv - u * u - v
    res = np.maximum(np.abs(r1), np.abs(r2)) / (1 + np.abs(u) ** 2 + np.abs(v) ** 2)
    big = np.max(np.abs(pr) + np.abs(qr), axis=1)
    return np.where(np.isfinite(big) & (big <= bound), res, np.nan)


@dataclass
class ConvergenceReport:
    kappas: list
    sup_residual: list
    masked_fraction: list

    @property
    def monotone(self) -> bool:
        s = self.sup_residual
        return all(b < a for a, b in zip(s, s[1:]))


def convergence_diagnostic(sol, kappas=(10.0, 20.0, 40.0), zeta_radius: float = 2.0,
                           n_grid: int = 21) -> ConvergenceReport:
    """Sup of the limit-system residual over ``|zeta| <= zeta_radius`` for each kappa."""
    x = np.linspace(-zeta_radius, zeta_radius, n_grid)
    Z = (x[None, :] + 1j * x[:, None]).ravel()
    Z = Z[np.abs(Z) <= zeta_radius]
    sups, masked = [], []
    for k in kappas:
        res = limit_residual(sol, k, Z)
        ok = np.isfinite(res)
        sups.append(float(np.max(res[ok])) if ok.any() else math.nan)
        masked.append(float(1 - ok.mean()))
    return ConvergenceReport(list(kappas), sups, masked)


# -- cluster values ------------------------------------------------------------

@dataclass(frozen=True)
class ClusterSample:
    kappa: complex
    c: complex
    branch: str


def cluster_estimate(sol, items) -> list:
    """``H(k)/k^3`` at points, or ``(2h + lam^3/3)/lam^3`` at pole records."""
    out = []
    for it in items:
        if isinstance(it, PoleRecord):
            lam = it.lam
            out.append(ClusterSample(lam, (2 * it.h + lam ** 3 / 3) / lam ** 3, "pole"))
        else:
            k = complex(it)
            p, q = sol.evaluate(np.array([k]))
            H = hamiltonian_array(k, p, q, sol.params.alpha, sol.params.beta)[0]
            out.append(ClusterSample(k, H / k ** 3, "point"))
    return out


def write_cluster_csv(samples, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["kappa_re[z]", "kappa_im[z]", "c_re[H/z^3]", "c_im[H/z^3]", "branch"])
    for s in samples:
        w.writerow([repr(s.kappa.real), repr(s.kappa.imag), repr(s.c.real), repr(s.c.imag), s.branch])


# -- limit system --------------------------------------------------------------

def _pole_offset(model, u, v, guess):
    """Solve ``model(tau) = (u, v)`` for the offset tau from the pole by Newton."""
    tau = guess
    for _ in range(50):
        pm, qm = model.eval(np.array([tau]))
        d = 1e-7 * abs(tau)
        pd, _ = model.eval(np.array([tau + d]))
        f = pm[0] - u
        df = (pd[0] - pm[0]) / d
        step = f / df
        tau -= step
        if abs(step) < 1e-15 * abs(tau):
            break
    pm, qm = model.eval(np.array([tau]))
    if abs(pm[0] - u) > 1e-8 * abs(u) or abs(qm[0] - v) > 1e-6 * (abs(v) + 1):
        raise LimitPassageError("local series does not match the state near the pole")
    return tau


def limit_integrate(init: LimitSystemState, t_end, rtol: float = 1e-12, atol: float = 1e-14,
                    max_passages: int = 1000) -> LimitSystemState:
    """Integrate the limit system along the straight segment to ``t_end``.

    Near a pole the residue and the offset to the pole are read off the state,
    ``h`` follows from the first integral, and the segment is continued from
    the local Laurent series on the far side of the pole.
    """
    t0, t1 = complex(init.t), complex(t_end)
    if not (np.isfinite(init.u) and np.isfinite(init.v)):
        raise ValueError("initial state must be finite")
    span = abs(t1 - t0)
    if span == 0:
        return init
    dz = (t1 - t0) / span
    y = np.array([init.u, init.v], dtype=complex)
    h = (first_integral(init.u, init.v) - 1 / 3) / 2
    s = 0.0
    for _ in range(max_passages):
        out = K.integrate_path(2, 0, t0, dz, s, np.array([span]), y, 0j, 0j, rtol, atol,
                               LIMIT_TRIGGER, 10_000_000)
        status, _, ys, _, s, y = out[:6]
        if status == K.DONE:
            return LimitSystemState(t1, complex(ys[0, 0]), complex(ys[0, 1]))
        if status != K.TRIGGER:
            raise LimitPassageError(f"limit integration stopped with status {status}")
        u, v = complex(y[0]), complex(y[1])
        guess = -u / (-v * v - u)
        residue, _ = ThirdRoot.nearest(u * guess)
        model = limit_expand(residue, h, LIMIT_ORDER)
        tau = _pole_offset(model, u, v, guess)
        # tau = t - t_pole; the pole sits at parameter s_pole along the segment
        along = (tau / dz)
        s_pole = s - along.real
        miss = abs(along.imag)
        if miss >= LIMIT_VAULT:
            raise LimitPassageError("trigger fired away from the pole")
        s_exit = s_pole + math.sqrt(LIMIT_VAULT ** 2 - miss ** 2)
        if s_exit >= span:
            tau_end = (t1 - (t0 + s * dz)) + tau
            pe, qe = model.eval(np.array([tau_end]))
            return LimitSystemState(t1, complex(pe[0]), complex(qe[0]))
        tau_exit = tau + (s_exit - s) * dz
        pe, qe = model.eval(np.array([tau_exit]))
        y = np.array([pe[0], qe[0]], dtype=complex)
        s = s_exit
    raise LimitPassageError("too many pole passages")


# -- closed forms --------------------------------------------------------------

class LimitCase(str, Enum):
    reducible_branch = "reducible_branch"
    genus0 = "genus0"


def explicit_limit(case, t, rho: ThirdRoot = ONE, t0=0j, derivative: bool = False):
    """Closed-form limit solutions and, optionally, their exact derivatives.

    reducible_branch (c = 1/3): ``u = rho U``, ``v = conj(rho)(1 - U)`` with
    ``(U + w)/(U + conj(w)) = exp(i sqrt(3) (t - t0))``; poles every
    ``2 pi/sqrt(3)``, all with residue rho.
    genus0 (c = 0): ``u = -3 rho w e^{2s}/(e^{3s} + 1)``,
    ``v = -3 conj(rho w) e^{s}/(e^{3s} + 1)`` with ``s = t - t0``; poles every
    ``2 pi i/3`` with residues cycling through all three roots.
    """
    case = LimitCase(case)
    s = np.asarray(t, dtype=complex) - t0
    r, rb = rho.value, rho.conj().value
    if case is LimitCase.reducible_branch:
        E = np.exp(1j * SQRT3 * s)
        den = 1 - E
        if np.any(np.abs(den) < 1e-13):
            raise PoleOfClosedForm("t is a pole of the reducible-branch solution")
        U = (E * OMEGA_BAR - OMEGA) / den
        u, v = r * U, rb * (1 - U)
        if derivative:
            dU = 3 * E / den ** 2
            return u, v, r * dU, -rb * dU
        return u, v
    e1, e3 = np.exp(s), np.exp(3 * s)
    den = e3 + 1
    if np.any(np.abs(den) < 1e-13 * (1 + np.abs(e3))):
        raise PoleOfClosedForm("t is a pole of the genus-0 solution")
    a, b = r * OMEGA, (r * OMEGA).conjugate()
    u = -3 * a * e1 ** 2 / den
    v = -3 * b * e1 / den
    if derivative:
        du = -3 * a * e1 ** 2 * (2 - e3) / den ** 2
        dv = -3 * b * e1 * (1 - 2 * e3) / den ** 2
        return u, v, du, dv
    return u, v


def closed_form_poles(case, n: int, rho: ThirdRoot = ONE, t0=0j):
    """First ``n`` poles ``(t_k, residue_k)`` along the string of a closed form."""
    case = LimitCase(case)
    out = []
    for k in range(n):
        if case is LimitCase.reducible_branch:
            out.append((t0 + 2 * math.pi * k / SQRT3, rho))
        else:
            tk = t0 + 1j * math.pi * (2 * k + 1) / 3
            # u ~ rho w e^{2 s_k}/(s - s_k) with e^{3 s_k} = -1
            res = rho.value * OMEGA * np.exp(2 * (tk - t0))
            out.append((tk, ThirdRoot.nearest(res)[0]))
    return out
