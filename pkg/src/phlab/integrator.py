"""Adaptive integration along paths in the z-plane with pole vaulting.

Each leg of a path is handed to the compiled DOP853 kernel.  When
``|p| + |q|`` passes ``pole_trigger * (1 + |z|)`` the recent accepted steps
are used to fit a local Laurent model, and the solution is carried across
the pole by evaluating that model at an exit point on the path.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import _dop853 as K
from ._series import lintegrate, lmul
from .core import Params, PhlabError, State
from .laurent import (LaurentModel, NoPoleFound, PoleRecord, Source,
                      fit_pole, hamiltonian_series, laurent_expand, pole_to_dict)

EPS_MIN = 1e-4
VAULT_ORDER = 16
FIT_RADIUS = 0.3
MAX_STEPS = 2_000_000


class StepSizeUnderflow(PhlabError):
    pass


class PathThroughOrigin(PhlabError):
    pass


class VaultRadiusTooLarge(PhlabError):
    pass


class PathKind(str, Enum):
    polyline = "polyline"
    circle = "circle"
    ray = "ray"


@dataclass(frozen=True)
class PathSpec:
    """A polyline, a circle arc ``center + radius*exp(i*theta)``, or a radial ray."""

    kind: PathKind
    vertices: tuple = ()
    center: complex = 0j
    radius: float = 0.0
    theta0: float = 0.0
    sweep: float = 2 * math.pi
    angle: float = 0.0
    r0: float = 0.0
    r1: float = 0.0

    def __post_init__(self):
        kind = PathKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is PathKind.polyline:
            vs = tuple(complex(v) for v in self.vertices)
            if len(vs) < 2:
                raise ValueError("a polyline needs at least two vertices")
            object.__setattr__(self, "vertices", vs)
        elif kind is PathKind.circle:
            if not self.radius > 0:
                raise ValueError("circle radius must be positive")
        elif not (self.r0 >= 0 and self.r1 > 0):
            raise ValueError("ray radii must be positive")

    @classmethod
    def polyline(cls, vertices):
        return cls(PathKind.polyline, vertices=tuple(vertices))

    @classmethod
    def segment(cls, a, b):
        return cls.polyline((a, b))

    @classmethod
    def circle(cls, center, radius, theta0=0.0, sweep=2 * math.pi):
        return cls(PathKind.circle, center=complex(center), radius=float(radius),
                   theta0=float(theta0), sweep=float(sweep))

    @classmethod
    def ray(cls, angle, r0, r1):
        return cls(PathKind.ray, angle=float(angle), r0=float(r0), r1=float(r1))

    @property
    def start(self) -> complex:
        return self.legs()[0].z(self.legs()[0].s0)

    @property
    def end(self) -> complex:
        leg = self.legs()[-1]
        return leg.z(leg.s1)

    def legs(self):
        if self.kind is PathKind.polyline:
            return [_Leg(0, a, b - a, 0.0, 1.0) for a, b in zip(self.vertices[:-1], self.vertices[1:])]
        if self.kind is PathKind.circle:
            return [_Leg(1, self.center, complex(self.radius), self.theta0, self.theta0 + self.sweep)]
        e = complex(math.cos(self.angle), math.sin(self.angle))
        return [_Leg(0, self.r0 * e, (self.r1 - self.r0) * e, 0.0, 1.0)]


@dataclass(frozen=True)
class _Leg:
    kind: int
    z0: complex
    dz: complex
    s0: float
    s1: float

    @property
    def speed(self) -> float:
        return abs(self.dz) if self.kind == 0 else self.dz.real

    def z(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == 0:
            return self.z0 + s * self.dz
        return self.z0 + self.dz.real * np.exp(1j * s)

    def grid(self, spacing):
        n = max(1, int(math.ceil(abs(self.s1 - self.s0) * self.speed / spacing)))
        return np.linspace(self.s0, self.s1, n + 1)


@dataclass(frozen=True)
class Tolerances:
    rel: float = 1e-10
    abs: float = 1e-12
    pole_trigger: float = 1e3
    vault_radius_factor: float = 0.25

    def __post_init__(self):
        if not (self.rel > 0 and self.abs > 0 and self.pole_trigger > 0 and self.vault_radius_factor > 0):
            raise ValueError("tolerances must be positive")
        if not self.vault_radius_factor < 0.5:
            raise ValueError("vault_radius_factor must be below 0.5")


@dataclass
class Trajectory:
    """Samples along a path, with running integrals of H, p and pq from the start."""

    z: np.ndarray
    p: np.ndarray
    q: np.ndarray
    int_h: np.ndarray
    int_p: np.ndarray
    int_pq: np.ndarray
    poles: list = field(default_factory=list)
    tol: Tolerances = field(default_factory=Tolerances)
    stats: dict = field(default_factory=dict)

    @property
    def samples(self) -> list[State]:
        return [State(z, p, q) for z, p, q in zip(self.z, self.p, self.q)]

    @property
    def final(self) -> State:
        return State(self.z[-1], self.p[-1], self.q[-1])

    def to_jsonl(self, fh):
        for z, p, q in zip(self.z, self.p, self.q):
            fh.write(json.dumps({"z": _cx(z), "p": _cx(p), "q": _cx(q)}) + "\n")

    def poles_jsonl(self, fh):
        for rec in self.poles:
            fh.write(json.dumps(pole_to_dict(rec)) + "\n")


def _cx(x):
    return {"re": float(np.real(x)), "im": float(np.imag(x))}


def vault_radius(lam, tol: Tolerances = Tolerances()) -> float:
    return tol.vault_radius_factor / max(abs(lam), 1.0)


def _model_integrals(model: LaurentModel, params: Params, z1, z2):
    """Integrals of H, p and pq from z1 to z2 along the straight segment, via the series."""
    lam = model.record.lam
    t1, t2 = complex(z1) - lam, complex(z2) - lam
    hc, hlo = hamiltonian_series(model, params)
    top = model.order - 1
    pq, pqlo = lmul(model.a, -1, model.b, -1, top)
    return (lintegrate(hc, hlo, t1, t2), lintegrate(model.a, -1, t1, t2),
            lintegrate(pq, pqlo, t1, t2))


def vault(record: PoleRecord, model_order: int, entry: State, exit_z, params: Params,
          tol: Tolerances = Tolerances()) -> State:
    """Carry the solution from ``entry`` to ``exit_z`` across the pole ``record``.

    The state at ``exit_z`` is the Laurent model with the fitted ``h``.
    """
    rv = vault_radius(record.lam, tol) * (1 + 1e-9)
    if abs(complex(exit_z) - record.lam) > rv or abs(entry.z - record.lam) > rv:
        raise VaultRadiusTooLarge(
            f"vault endpoints must lie within {rv:.3g} of the pole at {record.lam:.6g}")
    model = laurent_expand(params, record.residue, record.lam, record.h, model_order)
    return model.state(exit_z)


def _exit_parameter(leg: _Leg, s_now: float, lam: complex, rv: float) -> float:
    """First path parameter past the pole where ``|z - lam| = rv``, clipped to the leg."""
    d = lambda s: abs(complex(leg.z(s)) - lam)
    direction = 1.0 if leg.s1 >= leg.s0 else -1.0
    reach = 2.5 * rv / leg.speed
    s_far = s_now + direction * reach
    if (s_far - leg.s1) * direction > 0:
        s_far = leg.s1
    lo, hi = sorted((s_now, s_far))
    if hi - lo < 1e-15:
        return leg.s1
    res = minimize_scalar(d, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
    s_cl = float(res.x)
    if d(s_far) < rv:
        return s_far
    return brentq(lambda s: d(s) - rv, s_cl, s_far, xtol=1e-15)


def _fit_from_ring(ring_s, ring_y, leg, params, tol):
    zs = leg.z(ring_s)
    p, q = ring_y[:, 0], ring_y[:, 1]
    k = int(np.argmax(np.abs(p) + np.abs(q)))
    lam0 = zs[k] + p[k] / (-q[k] ** 2 - zs[k] * p[k] - params.alpha)
    r = np.abs(zs - lam0)
    scale = max(abs(lam0), 1.0)
    sel = (r > EPS_MIN / scale) & (r < FIT_RADIUS / scale)
    if sel.sum() < 6:
        sel = r > EPS_MIN / scale
    samples = [State(z, a, b) for z, a, b in zip(zs[sel], p[sel], q[sel])]
    if len(samples) < 3:
        raise NoPoleFound("too few samples near the suspected pole")
    return fit_pole(samples, params, order=VAULT_ORDER, source=Source.vaulted)


def integrate(init: State, params: Params, path: PathSpec, tol: Tolerances = Tolerances(),
              spacing: float = 0.05, record_poles: bool = True, grid=None) -> Trajectory:
    """Integrate from ``init`` along ``path``, sampling roughly every ``spacing``.

    ``grid`` optionally gives, per leg, the exact parameter values to sample
    (segments run over [0, 1], arcs over the angle).
    """
    if abs(init.z - path.start) > 1e-12 * (1 + abs(init.z)):
        raise ValueError(f"init.z={init.z} is not the path start {path.start}")
    al, be = params.alpha, params.beta
    grid_in = grid
    zs, ps, qs, ih, ip, ipq = [], [], [], [], [], []
    poles: list[PoleRecord] = []
    y = np.array([init.p, init.q, 0, 0, 0], dtype=np.complex128)
    nsteps = 0
    nvault = 0
    for i, leg in enumerate(path.legs()):
        grid = leg.grid(spacing) if grid_in is None else np.asarray(grid_in[i], dtype=float)
        if i > 0:
            grid = grid[1:]
        s = leg.s0
        while True:
            pending = grid
            out = K.integrate_path(0, leg.kind, leg.z0, leg.dz, s, pending, y, al, be,
                                   tol.rel, tol.abs, tol.pole_trigger, MAX_STEPS)
            status, nhit, ys, _, s_last, y_last, ring_s, ring_y, n_ring, ns = out
            nsteps += ns
            for j in range(nhit):
                zs.append(complex(leg.z(pending[j])))
                ps.append(ys[j, 0]); qs.append(ys[j, 1])
                ih.append(ys[j, 2]); ip.append(ys[j, 3]); ipq.append(ys[j, 4])
            if status == K.DONE:
                y = y_last.copy()
                break
            if status == K.UNDERFLOW:
                raise StepSizeUnderflow(f"step size underflow at z={complex(leg.z(s_last)):.6g}")
            if status == K.MAXSTEPS:
                raise StepSizeUnderflow(f"step budget exhausted at z={complex(leg.z(s_last)):.6g}")
            if status == K.NONFINITE:
                raise StepSizeUnderflow(f"non-finite state at z={complex(leg.z(s_last)):.6g}")
            # pole trigger: fit, then vault along the path
            rs, ry = K.unroll_ring(ring_s, ring_y, n_ring)
            try:
                rec = _fit_from_ring(rs, ry, leg, params, tol)
            except NoPoleFound as exc:
                if abs(complex(leg.z(s_last))) < 1e-2:
                    raise PathThroughOrigin("the path runs into a pole at the origin") from exc
                raise
            if abs(rec.lam) < 1e-6:
                raise PathThroughOrigin("the path runs into a pole at the origin")
            rv = vault_radius(rec.lam, tol)
            z_entry = complex(leg.z(s_last))
            s_exit = _exit_parameter(leg, s_last, rec.lam, rv)
            z_exit = complex(leg.z(s_exit))
            entry = State(z_entry, y_last[0], y_last[1])
            ex = vault(rec, VAULT_ORDER, entry, z_exit, params, tol)
            model = laurent_expand(params, rec.residue, rec.lam, rec.h, VAULT_ORDER, Source.vaulted)
            dH, dP, dPQ = _model_integrals(model, params, z_entry, z_exit)
            # grid points strictly inside the vaulted stretch come from the model
            direction = 1.0 if leg.s1 >= leg.s0 else -1.0
            rest = pending[nhit:]
            inside = rest[(rest - s_exit) * direction <= 0]
            for sg in inside:
                zg = complex(leg.z(sg))
                if abs(zg - rec.lam) < EPS_MIN / max(abs(rec.lam), 1.0):
                    continue
                pg, qg = model.eval(zg)
                gH, gP, gPQ = _model_integrals(model, params, z_entry, zg)
                zs.append(zg); ps.append(complex(pg)); qs.append(complex(qg))
                ih.append(y_last[2] + gH); ip.append(y_last[3] + gP); ipq.append(y_last[4] + gPQ)
            grid = rest[(rest - s_exit) * direction > 0]
            y = np.array([ex.p, ex.q, y_last[2] + dH, y_last[3] + dP, y_last[4] + dPQ])
            s = s_exit
            nvault += 1
            if record_poles:
                poles.append(rec)
            if len(grid) == 0:
                break
    traj = Trajectory(np.array(zs), np.array(ps), np.array(qs), np.array(ih), np.array(ip),
                      np.array(ipq), poles=poles, tol=tol,
                      stats={"steps": int(nsteps), "vaults": nvault})
    return traj


def continue_to_point(init: State, params: Params, target, tol: Tolerances = Tolerances()) -> State:
    """Straight-segment continuation from ``init`` to ``target``."""
    target = complex(target)
    if target == init.z:
        return init
    traj = integrate(init, params, PathSpec.segment(init.z, target), tol, spacing=abs(target - init.z))
    return traj.final
