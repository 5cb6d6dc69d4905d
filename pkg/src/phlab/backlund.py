"""Solution oracles and the Bäcklund transformations acting on them.

An oracle maps points z to (p(z), q(z)).  Transformed oracles wrap their base
and apply the transformation pointwise, so no transformed equation is ever
integrated.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import Params, PhlabError, State, ThirdRoot, hamiltonian_array, rhs_array
from .integrator import PathSpec, Tolerances, integrate
from .laurent import PoleRecord, Source, fit_pole


class IdenticallySingular(PhlabError):
    """The denominator of a nontrivial transformation vanishes identically."""

    def __init__(self, msg, step_index=None):
        super().__init__(msg if step_index is None else f"step {step_index}: {msg}")
        self.step_index = step_index


class DiagnosticsError(PhlabError):
    """Numerical evidence contradicts an algebraic criterion."""


class SolutionOracle:
    """Base class: ``evaluate(z)`` returns arrays ``(p, q)`` for array-like ``z``."""

    params: Params
    description: str = ""

    def evaluate(self, z):
        raise NotImplementedError

    def __call__(self, z):
        return self.evaluate(z)

    def state(self, z) -> State:
        p, q = self.evaluate(np.array([complex(z)]))
        return State(z, p[0], q[0])

    def evaluate_ring(self, r: float, thetas):
        """Values at ``r e^{i theta}``; subclasses may share work along the circle."""
        return self.evaluate(r * np.exp(1j * np.asarray(thetas, dtype=float)))

    def derivative(self, z):
        """``(p', q')`` from the system itself; exact for a true solution."""
        z = np.asarray(z, dtype=complex)
        p, q = self.evaluate(z)
        return rhs_array(z, p, q, self.params.alpha, self.params.beta)

    def hamiltonian(self, z):
        z = np.asarray(z, dtype=complex)
        p, q = self.evaluate(z)
        return hamiltonian_array(z, p, q, self.params.alpha, self.params.beta)


class ClosedForm(SolutionOracle):
    def __init__(self, fn, params: Params, description=""):
        self._fn = fn
        self.params = params
        self.description = description

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        p, q = self._fn(z)
        return np.broadcast_to(np.asarray(p, dtype=complex), z.shape).copy(), \
            np.broadcast_to(np.asarray(q, dtype=complex), z.shape).copy()


class IntegratedSolution(SolutionOracle):
    """Solution defined by an initial state, continued by straight segments.

    Every evaluated point becomes an anchor; later points start from the
    nearest anchor, which keeps segments short for clustered queries.
    """

    def __init__(self, init: State, params: Params, tol: Tolerances = Tolerances(),
                 description="integrated"):
        self.params = params
        self.tol = tol
        self.description = description
        self._anchors = {init.z: (init.p, init.q)}
        self._lock = threading.Lock()

    def _nearest(self, z):
        keys = np.fromiter(self._anchors.keys(), dtype=complex)
        k = keys[int(np.argmin(np.abs(keys - z)))]
        return complex(k)

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        p = np.empty(flat.shape, dtype=complex)
        q = np.empty(flat.shape, dtype=complex)
        with self._lock:
            for i, zi in enumerate(flat):
                zi = complex(zi)
                if zi in self._anchors:
                    p[i], q[i] = self._anchors[zi]
                    continue
                a = self._nearest(zi)
                pa, qa = self._anchors[a]
                traj = integrate(State(a, pa, qa), self.params, PathSpec.segment(a, zi), self.tol,
                                 spacing=abs(zi - a), record_poles=False)
                p[i], q[i] = traj.p[-1], traj.q[-1]
                # poles make poor anchors
                if abs(p[i]) + abs(q[i]) < 50 * (1 + abs(zi)):
                    self._anchors[zi] = (p[i], q[i])
        return p.reshape(z.shape), q.reshape(z.shape)

    def evaluate_ring(self, r: float, thetas):
        """One sweep along the circle through increasing ``thetas``, vaulting poles."""
        thetas = np.asarray(thetas, dtype=float)
        order = np.argsort(thetas)
        th = thetas[order]
        start = self.state(r * np.exp(1j * th[0]))
        if len(th) == 1:
            return np.array([start.p]), np.array([start.q])
        path = PathSpec.circle(0j, r, th[0], th[-1] - th[0])
        traj = integrate(start, self.params, path, self.tol, grid=[th], record_poles=True)
        p = np.empty(len(th), dtype=complex)
        q = np.empty(len(th), dtype=complex)
        # samples too close to a vaulted pole are dropped by the integrator
        zs = r * np.exp(1j * th)
        k = 0
        for j, zj in enumerate(zs):
            if k < len(traj.z) and abs(traj.z[k] - zj) < 1e-12 * (1 + r):
                p[j], q[j] = traj.p[k], traj.q[k]
                k += 1
            else:
                p[j], q[j] = np.inf, np.inf
        out_p = np.empty_like(p)
        out_q = np.empty_like(q)
        out_p[order], out_q[order] = p, q
        self.last_ring_poles = list(traj.poles)
        return out_p, out_q


class StepKind(str, Enum):
    M = "M"
    R = "R"
    C = "C"
    B = "B"


@dataclass(frozen=True)
class BacklundStep:
    kind: StepKind
    omega: ThirdRoot | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", StepKind(self.kind))
        if self.kind in (StepKind.M, StepKind.B) and self.omega is None:
            raise ValueError(f"step {self.kind.value} needs a root of unity")

    def __str__(self):
        return self.kind.value + (self.omega.tag if self.omega is not None else "")


def parse_chain(text: str) -> list[BacklundStep]:
    """Parse ``"Mw;B1;R;C"``: M and B take a root tag 1, w or W (for omega-bar)."""
    steps = []
    for tok in (t.strip() for t in text.split(";")):
        if not tok:
            continue
        head, tail = tok[0].upper(), tok[1:]
        if head in "MB":
            if len(tail) != 1:
                raise ValueError(f"bad chain token {tok!r}")
            steps.append(BacklundStep(StepKind(head), ThirdRoot.from_tag(tail)))
        elif head in "RC" and not tail:
            steps.append(BacklundStep(StepKind(head)))
        else:
            raise ValueError(f"bad chain token {tok!r}")
    return steps


def format_chain(steps) -> str:
    return ";".join(str(s) for s in steps)


def map_params(step: BacklundStep, params: Params) -> Params:
    a, b = params.alpha, params.beta
    if step.kind is StepKind.M:
        w = step.omega.value
        return Params(w.conjugate() * a, w * b)
    if step.kind is StepKind.R:
        return Params(-b, -a)
    if step.kind is StepKind.C:
        return Params(a.conjugate(), b.conjugate())
    w = step.omega.value
    return Params(w * b - w.conjugate(), w.conjugate() * a + w)


def b_numerator(omega: ThirdRoot, params: Params) -> complex:
    """``omega*alpha - conj(omega)*beta + 1``; zero exactly on the class P(conj(omega))."""
    w = omega.value
    return w * params.alpha - w.conjugate() * params.beta + 1.0


class Transformed(SolutionOracle):
    def __init__(self, step: BacklundStep, base: SolutionOracle):
        self.step = step
        self.base = base
        self.params = map_params(step, base.params)
        self.description = f"{step}({base.description})"

    def evaluate_ring(self, r, thetas):
        thetas = np.asarray(thetas, dtype=float)
        k = self.step.kind
        if k is StepKind.R:
            p, q = self.base.evaluate_ring(r, thetas + np.pi / 2)
            return -1j * q, -1j * p
        if k is StepKind.C:
            p, q = self.base.evaluate_ring(r, -thetas)
            return np.conj(p), np.conj(q)
        p, q = self.base.evaluate_ring(r, thetas)
        return self._pointwise(r * np.exp(1j * thetas), p, q)

    def _pointwise(self, z, p, q):
        if self.step.kind is StepKind.M:
            w = self.step.omega.value
            return w.conjugate() * p, w * q
        w = self.step.omega.value
        num = b_numerator(self.step.omega, self.base.params)
        if num == 0:
            return p, q
        d = w * p + w.conjugate() * q - z
        with np.errstate(divide="ignore", invalid="ignore"):
            # a zero of d is a new pole; inf there is the intended value
            return p - w.conjugate() * num / d, q + w * num / d

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        k = self.step.kind
        if k is StepKind.R:
            p, q = self.base.evaluate(1j * z)
            return -1j * q, -1j * p
        if k is StepKind.C:
            p, q = self.base.evaluate(np.conj(z))
            return np.conj(p), np.conj(q)
        p, q = self.base.evaluate(z)
        return self._pointwise(z, p, q)


def apply_trivial(step: BacklundStep, sol: SolutionOracle) -> SolutionOracle:
    if step.kind is StepKind.B:
        raise ValueError("use apply_B for the nontrivial transformations")
    return Transformed(step, sol)


def probe_points(n=16, rmin=2.0, rmax=10.0, seed=12345):
    rng = np.random.default_rng(seed)
    r = rng.uniform(rmin, rmax, n)
    th = rng.uniform(0, 2 * np.pi, n)
    return r * np.exp(1j * th)


def apply_B(omega: ThirdRoot, sol: SolutionOracle, probes=None) -> SolutionOracle:
    """Nontrivial transformation B_omega, refusing when its denominator vanishes identically."""
    zs = probe_points() if probes is None else np.asarray(probes, dtype=complex)
    p, q = sol.evaluate(zs)
    w = omega.value
    d = w * p + w.conjugate() * q - zs
    singular = bool(np.all(np.abs(d) < 1e-8 * (1 + np.abs(zs))))
    num = b_numerator(omega, sol.params)
    if singular:
        if abs(num) > 1e-8 * (1 + abs(sol.params.alpha) + abs(sol.params.beta)):
            raise DiagnosticsError(
                f"denominator vanishes on all probes although the parameter criterion is {num:.3g}")
        raise IdenticallySingular(
            f"B_{omega.tag}: the solution lies in the class P({omega.conj().tag})")
    return Transformed(BacklundStep(StepKind.B, omega), sol)


def apply_step(step: BacklundStep, sol: SolutionOracle) -> SolutionOracle:
    if step.kind is StepKind.B:
        return apply_B(step.omega, sol)
    return apply_trivial(step, sol)


def eq1_residual(sol: SolutionOracle, zs, radius=None, n=16):
    """Scaled residual of the system at ``zs``, with p' and q' from Cauchy's formula.

    The derivative uses a trapezoid rule on a small circle, independent of the
    oracle's own structure.  The residual is divided by ``1+|z|^2+|p|^2+|q|^2``.
    """
    zs = np.asarray(zs, dtype=complex)
    if radius is None:
        radius = 0.02 / np.maximum(1.0, np.abs(zs))
    radius = np.broadcast_to(radius, zs.shape)
    th = 2 * np.pi * np.arange(n) / n
    e = np.exp(1j * th)
    ring = zs[:, None] + radius[:, None] * e[None, :]
    pr, qr = sol.evaluate(ring)
    dp = np.mean(pr * e.conj(), axis=1) / radius
    dq = np.mean(qr * e.conj(), axis=1) / radius
    p, q = sol.evaluate(zs)
    fp, fq = rhs_array(zs, p, q, sol.params.alpha, sol.params.beta)
    scale = 1 + np.abs(zs) ** 2 + np.abs(p) ** 2 + np.abs(q) ** 2
    return np.maximum(np.abs(dp - fp), np.abs(dq - fq)) / scale


def chain(steps, sol: SolutionOracle, validate: bool = True, probes=None, limit=1e-6):
    """Apply ``steps`` left to right; each intermediate is checked on probe points."""
    if isinstance(steps, str):
        steps = parse_chain(steps)
    cur = sol
    for i, step in enumerate(steps):
        try:
            cur = apply_step(step, cur)
        except IdenticallySingular as exc:
            raise IdenticallySingular(str(exc), step_index=i) from None
        if validate:
            zs = probe_points(8, seed=777 + i) if probes is None else probes
            res = eq1_residual(cur, zs)
            if not np.max(res) < limit:
                raise DiagnosticsError(f"step {i} ({step}) output fails the system: residual {np.max(res):.2e}")
    return cur


def residue_transition(omega: ThirdRoot, record: PoleRecord, sol: SolutionOracle | None = None):
    """Fate of a pole of p under B_omega.

    A pole with residue conj(omega) is removed; other poles keep their residue.
    Given the original oracle, the surviving pole is refitted on the
    transformed solution so that its new ``h`` is known.
    """
    if record.residue == omega.conj():
        return None
    if sol is None:
        return record
    out = Transformed(BacklundStep(StepKind.B, omega), sol)
    lam = record.lam
    rho = 0.05 / max(abs(lam), 1.0)
    ring = lam + rho * np.exp(2j * np.pi * np.arange(24) / 24) * np.linspace(0.4, 1.0, 24)
    p, q = out.evaluate(ring)
    fitted = fit_pole([State(z, a, b) for z, a, b in zip(ring, p, q)], out.params,
                      order=16, source=Source.constructed)
    if fitted.residue != record.residue:
        raise DiagnosticsError("refitted residue disagrees with the transition rule")
    return PoleRecord(lam=fitted.lam, residue=fitted.residue, h=fitted.h, source=record.source,
                      string_id=record.string_id)


@dataclass(frozen=True)
class Signature:
    """Leading behaviour ``p ~ -tau_nu z`` on the four open quadrants."""

    tau: tuple

    def __post_init__(self):
        t = tuple(x if isinstance(x, ThirdRoot) else ThirdRoot(int(x)) for x in self.tau)
        if len(t) != 4:
            raise ValueError("a signature has four entries")
        object.__setattr__(self, "tau", t)

    @classmethod
    def from_tags(cls, tags: str):
        return cls(tuple(ThirdRoot.from_tag(c) for c in tags))

    @property
    def tags(self) -> str:
        return "".join(t.tag for t in self.tau)

    def alternating_sum(self) -> complex:
        """``sum (-1)^nu tau_nu`` over nu = 1..4."""
        return sum((-1) ** (nu + 1) * t.value for nu, t in enumerate(self.tau))


def signature_map(step: BacklundStep, sig: Signature) -> Signature:
    """Action of a transformation on a signature of nonzero leading terms."""
    t = sig.tau
    if step.kind is StepKind.M:
        wb = step.omega.conj()
        return Signature(tuple(wb * x for x in t))
    if step.kind is StepKind.R:
        return Signature(tuple(t[(nu + 1) % 4].conj() for nu in range(4)))
    if step.kind is StepKind.C:
        return Signature(tuple(x.conj() for x in t[::-1]))
    w = step.omega
    return Signature(tuple(x if w == x.conj() else x.conj() for x in t))
