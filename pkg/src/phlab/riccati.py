"""Special solution classes: first kind P(rho) and second kind P(rho, conj(rho)).

A first-kind solution satisfies ``conj(rho) p + rho q = z`` identically, and p
solves a Riccati equation.  Writing ``p = rho u'/u`` turns that equation into
the linear equation

    u'' = z u' - (conj(rho) alpha + z^2) u,

whose solutions are entire, so poles of p are just zeros of u and need no
special treatment.
"""
from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _dop853 as K
from .backlund import BacklundStep, SolutionOracle, StepKind, Transformed, apply_B
from .core import ONE, Params, PhlabError, State, ThirdRoot, hamiltonian_array
from .laurent import NoPoleFound, PoleRecord, Source, fit_pole

AXIS_STEP = 0.5
RTOL = 1e-13
ATOL = 1e-15


class ClassConditionViolated(PhlabError):
    pass


class ExceptionalParameters(PhlabError):
    pass


class Kind(str, Enum):
    first = "first"
    second = "second"
    generic = "generic"


@dataclass(frozen=True)
class ClassTag:
    kind: Kind
    rho: ThirdRoot | None
    params: Params

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        a, b = self.params.alpha, self.params.beta
        scale = 1e-10 * (1 + abs(a) + abs(b))
        if kind is Kind.first and abs(first_kind_defect(self.rho, self.params)) > scale:
            raise ClassConditionViolated("first kind requires conj(rho) alpha - rho beta + 1 = 0")
        if kind is Kind.second:
            if abs(-a + b + 2) > scale:
                raise ClassConditionViolated("second kind requires -alpha + beta + 2 = 0")
            if abs(a - 1) < scale and abs(b + 1) < scale:
                raise ExceptionalParameters("the second-kind class is empty for (alpha, beta) = (1, -1)")


def first_kind_defect(rho: ThirdRoot, params: Params) -> complex:
    r = rho.value
    return r.conjugate() * params.alpha - r * params.beta + 1.0


def first_kind_beta(rho: ThirdRoot, alpha) -> complex:
    r = rho.value
    return (r.conjugate() * complex(alpha) + 1.0) / r


def riccati_rhs_first(rho: ThirdRoot, params: Params, z, p):
    """``p' = -alpha - rho z^2 + z p - conj(rho) p^2`` on the class P(rho)."""
    if abs(first_kind_defect(rho, params)) > 1e-10 * (1 + abs(params.alpha) + abs(params.beta)):
        raise ClassConditionViolated("parameters are not in the first-kind family for this rho")
    r = rho.value
    return -params.alpha - r * z * z + z * p - r.conjugate() * p * p


def u_omega_value(state: State, omega: ThirdRoot) -> complex:
    w = omega.value
    return w * state.p + w.conjugate() * state.q + state.z / 2.0


def a_coefficient(z, omega: ThirdRoot, params: Params):
    """``a(z; omega)`` in the Laurent development and Riccati equation of u_omega."""
    w = omega.value
    return (-0.5 + ((w + 2) * params.alpha - (w.conjugate() + 2) * params.beta) / 3.0
            + 0.5j * w.imag * np.asarray(z) ** 2)


class FirstKindSolution(SolutionOracle):
    """First-kind oracle from the seed ``p(z0) = p0``.

    Values at ``z = r e^{i theta}`` come from integrating the linear equation
    along the coordinate axis nearest to theta, where its two exponential
    behaviours balance, and then along the circle of radius r for at most
    pi/4, toward the side where the wanted combination dominates.
    """

    def __init__(self, rho: ThirdRoot, alpha, z0=0j, p0=0j, rtol=RTOL, atol=ATOL):
        self.rho = rho
        self.params = Params(alpha, first_kind_beta(rho, alpha))
        self.seed = (complex(z0), complex(p0))
        self.description = f"first-kind P({rho.tag}) seed {complex(z0)}:{complex(p0)}"
        self.rtol, self.atol = rtol, atol
        r = rho.value
        self._A = r.conjugate() * self.params.alpha
        self._B = 1.0 + 0j
        self._lock = threading.Lock()
        y0 = np.array([1.0, r.conjugate() * complex(p0)], dtype=complex)
        if z0 != 0:
            y0 = self._run_segment(complex(z0), -complex(z0), y0, np.array([0.0, 1.0]))[-1]
        self._origin = y0 / (abs(y0[0]) + abs(y0[1]))
        self._axes = {nu: [self._origin.copy()] for nu in range(4)}

    def _run(self, kind, z0, dz, s0, targets, y0):
        out = K.integrate_path(1, kind, z0, dz, s0, np.asarray(targets, dtype=float), y0,
                               self._A, self._B, self.rtol, self.atol, 0.0, 10_000_000)
        status, nhit = out[0], out[1]
        if status != K.DONE or nhit != len(targets):
            raise PhlabError(f"linear integration failed with status {status}")
        return out[2]

    def _run_segment(self, z0, dz, y0, targets):
        return self._run(0, z0, dz, 0.0, targets, y0)

    def _axis_state(self, nu, r):
        """Normalised (u, u') at ``r * i**nu``."""
        e = 1j ** nu
        cache = self._axes[nu]
        k = int(r // AXIS_STEP)
        while len(cache) <= k:
            j = len(cache) - 1
            y = self._run_segment(j * AXIS_STEP * e, AXIS_STEP * e, cache[j], np.array([0.0, 1.0]))[-1]
            cache.append(y / (abs(y[0]) + abs(y[1])))
        r0 = k * AXIS_STEP
        if r - r0 < 1e-15:
            return cache[k]
        y = self._run_segment(r0 * e, (r - r0) * e, cache[k], np.array([0.0, 1.0]))[-1]
        return y / (abs(y[0]) + abs(y[1]))

    def evaluate_ring(self, r: float, thetas):
        """``(p, q)`` at ``r e^{i theta}`` for an array of angles, sharing arcs."""
        thetas = np.asarray(thetas, dtype=float)
        p = np.empty(thetas.shape, dtype=complex)
        rv = self.rho.value
        if r < 1e-14:
            u, du = self._origin
            p[:] = rv * du / u
            return p, -rv * p
        nus = np.round(thetas / (np.pi / 2)).astype(int)
        with self._lock:
            for nu in np.unique(nus):
                idx = np.nonzero(nus == nu)[0]
                a0 = nu * np.pi / 2
                y0 = self._axis_state(int(nu) % 4, r)
                for sign, sel in ((1.0, idx[thetas[idx] >= a0]), (-1.0, idx[thetas[idx] < a0])):
                    if len(sel) == 0:
                        continue
                    order = np.argsort((thetas[sel] - a0) * sign)
                    sel = sel[order]
                    ys = self._run(1, 0j, complex(r), a0, thetas[sel], y0)
                    p[sel] = rv * ys[:, 1] / ys[:, 0]
        z = r * np.exp(1j * thetas)
        q = rv.conjugate() * z - rv * p
        return p, q

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        p = np.empty(flat.shape, dtype=complex)
        q = np.empty(flat.shape, dtype=complex)
        for i, zi in enumerate(flat):
            r, th = abs(zi), math.atan2(zi.imag, zi.real)
            pi_, qi_ = self.evaluate_ring(r, np.array([th]))
            p[i], q[i] = pi_[0], qi_[0]
        return p.reshape(z.shape), q.reshape(z.shape)

    def hamiltonian_identity(self, z):
        """``z^3/3 + conj(rho) alpha z + conj(rho) p``, equal to H on the class."""
        z = np.asarray(z, dtype=complex)
        p, _ = self.evaluate(z)
        rb = self.rho.value.conjugate()
        return z ** 3 / 3 + rb * self.params.alpha * z + rb * p

    def hamiltonian_identity_printed(self, z):
        """The identity with the alpha factor omitted; agrees only when alpha = 1."""
        z = np.asarray(z, dtype=complex)
        p, _ = self.evaluate(z)
        rb = self.rho.value.conjugate()
        return z ** 3 / 3 + rb * z + rb * p


def make_first_kind(rho: ThirdRoot, alpha, seed=(0j, 0j), check: bool = True) -> FirstKindSolution:
    sol = FirstKindSolution(rho, alpha, seed[0], seed[1])
    if check:
        from .backlund import eq1_residual, probe_points
        zs = probe_points(16, 1.0, 6.0, seed=99)
        res = np.max(eq1_residual(sol, zs))
        if not res < 1e-9:
            raise PhlabError(f"first-kind oracle fails the system on probes: {res:.2e}")
    return sol


@dataclass
class SecondKindReport:
    riccati_u: dict = field(default_factory=dict)
    k_invariant: float = 0.0
    h_identity: float = 0.0
    h_law: float | None = None
    h_law_printed: float | None = None
    n_poles: int = 0


def second_kind_residuals(sol: SolutionOracle, omega: ThirdRoot, probes=None, poles=None) -> SecondKindReport:
    """Residuals of the second-kind identities on probe points (and optional poles).

    Reports the Riccati equation of ``u_w`` for ``w`` in {omega, conj(omega)},
    the invariant K and the Hamiltonian identity; with fitted poles also the
    law ``h = 3 (beta + 1) lambda / 4`` that follows from the Hamiltonian
    identity and the Laurent data of H, next to the variant
    ``h + i Im(w) = (beta + 1) lambda`` for comparison.  Nothing is judged here.
    """
    from .backlund import probe_points
    zs = probe_points(32, 2.0, 8.0, seed=4242) if probes is None else np.asarray(probes, dtype=complex)
    par = sol.params
    p, q = sol.evaluate(zs)
    dp, dq = sol.derivative(zs)
    rep = SecondKindReport()
    scale = 1 + np.abs(zs) ** 2 + np.abs(p) ** 2 + np.abs(q) ** 2
    for w in (omega, omega.conj()):
        wv = w.value
        u = wv * p + wv.conjugate() * q + zs / 2
        du = wv * dp + wv.conjugate() * dq + 0.5
        res = du - 3 * a_coefficient(zs, w, par) - u * u / (2j * wv.imag)
        rep.riccati_u[w.tag] = float(np.max(np.abs(res) / scale))
    k = p * p + q * q + zs * zs - p * q + zs * (p + q) + 3 * par.beta + 3
    rep.k_invariant = float(np.max(np.abs(k) / scale))
    H = hamiltonian_array(zs, p, q, par.alpha, par.beta)
    hid = H - (q - p + zs ** 3 / 3 + (par.beta + 1) * zs)
    rep.h_identity = float(np.max(np.abs(hid) / (1 + np.abs(zs) ** 3 + np.abs(p) + np.abs(q))))
    if poles:
        errs = [abs(rec.h - 0.75 * (par.beta + 1) * rec.lam) / (1 + abs(rec.lam)) for rec in poles]
        alt = [abs(rec.h + 1j * rec.residue.value.imag - (par.beta + 1) * rec.lam) / (1 + abs(rec.lam))
               for rec in poles]
        rep.h_law = float(max(errs))
        rep.h_law_printed = float(max(alt))
        rep.n_poles = len(poles)
    return rep


class SecondKindSolution(Transformed):
    """B_rho applied to a first-kind P(rho) solution; parameters (beta+2, beta)."""

    def __init__(self, base: FirstKindSolution, beta):
        super().__init__(BacklundStep(StepKind.B, base.rho), base)
        self.rho = base.rho
        self.beta = complex(beta)
        self.description = f"second-kind P({self.rho.tag},{self.rho.conj().tag}) from {base.description}"


def make_second_kind(beta, rho: ThirdRoot, seed=(0j, 0j)) -> SecondKindSolution:
    """Second-kind solution with parameters (beta + 2, beta).

    Built from the first-kind base with parameters
    ``(rho beta - conj(rho), conj(rho) beta + conj(rho) - 1)`` by B_rho.
    """
    beta = complex(beta)
    if rho == ONE:
        raise ValueError("the second-kind construction needs rho in {w, W}")
    if abs(beta + 1) < 1e-12:
        raise ExceptionalParameters("the second-kind class is empty for (alpha, beta) = (1, -1)")
    r = rho.value
    alpha_t = r * beta - r.conjugate()
    base = FirstKindSolution(rho, alpha_t, seed[0], seed[1])
    expected_beta = r.conjugate() * beta + r.conjugate() - 1
    if abs(base.params.beta - expected_beta) > 1e-12 * (1 + abs(beta)):
        raise PhlabError("internal parameter bookkeeping mismatch")
    apply_B(rho, base)  # refuses if the denominator were identically zero
    sol = SecondKindSolution(base, beta)
    ClassTag(Kind.second, rho, sol.params)
    return sol


def certify_transcendental(records, minimum: int = 3) -> bool:
    """Empirical certificate: at least ``minimum`` poles found in a scan."""
    ok = len(records) >= minimum
    if not ok:
        warnings.warn(f"only {len(records)} poles found; the solution may be rational", stacklevel=2)
    return ok


def fit_pole_on_oracle(sol: SolutionOracle, lam_guess, params: Params | None = None, order: int = 16):
    """Fit a pole of an oracle from a ring of samples around a guess."""
    params = sol.params if params is None else params
    rho = 0.05 / max(abs(lam_guess), 1.0)
    ang = 2 * np.pi * np.arange(16) / 16
    ring = lam_guess + rho * np.exp(1j * ang) * np.where(np.arange(16) % 2, 1.0, 0.5)
    p, q = sol.evaluate(ring)
    return fit_pole([State(z, a, b) for z, a, b in zip(ring, p, q)], params, order=order,
                    source=Source.scanned)


__all__ = [
    "ClassConditionViolated", "ExceptionalParameters", "Kind", "ClassTag", "first_kind_defect",
    "first_kind_beta", "riccati_rhs_first", "u_omega_value", "a_coefficient", "FirstKindSolution",
    "make_first_kind", "SecondKindReport", "second_kind_residuals", "SecondKindSolution",
    "make_second_kind", "certify_transcendental", "fit_pole_on_oracle", "NoPoleFound", "PoleRecord",
]
