"""Local Laurent models at poles: coefficient recursion, evaluation and fitting."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from ._series import ladd, leval, lmul
from .core import Params, PhlabError, State, ThirdRoot, rhs_array

DEFAULT_ORDER = 8
RADIUS_FACTOR = 0.5
RESIDUE_MARGIN = 0.2


class NoPoleFound(PhlabError):
    pass


class AmbiguousResidue(PhlabError):
    pass


class Source(str, Enum):
    scanned = "scanned"
    vaulted = "vaulted"
    constructed = "constructed"


@dataclass(frozen=True)
class PoleRecord:
    """A non-zero pole ``lam`` of p with residue class and free coefficient ``h``.

    The residue of q at ``lam`` is ``-conj(residue)`` and is not stored.
    """

    lam: complex
    residue: ThirdRoot
    h: complex
    source: Source = Source.constructed
    string_id: int | None = None

    def with_string(self, string_id):
        return replace(self, string_id=string_id)


def model_radius(lam) -> float:
    """Heuristic radius inside which the truncated local model is trusted."""
    return RADIUS_FACTOR / max(abs(lam), 1.0)


def _unit_residue_coeffs(zc, slope, A, B, h, order):
    """Coefficients for x' = -y^2 - z x - A, y' = x^2 + z y + B with Res x = 1.

    ``z = zc + slope*t`` around the pole; ``slope = 1`` is the full system and
    ``slope = 0`` the frozen (limit) system.  Returns arrays for powers -1..order.
    """
    a = np.zeros(order + 2, dtype=complex)
    b = np.zeros(order + 2, dtype=complex)
    a[0], b[0] = 1.0, -1.0

    def A_(k):  # coefficient of t**k
        return a[k + 1] if k >= -1 else 0j

    def B_(k):
        return b[k + 1] if k >= -1 else 0j

    for n in range(0, order + 1):
        rq = sum(b[i + 1] * b[n - 1 - i + 1] for i in range(0, n))
        rp = sum(a[i + 1] * a[n - 1 - i + 1] for i in range(0, n))
        r1 = -rq - zc * A_(n - 1) - slope * A_(n - 2) - (A if n == 1 else 0)
        r2 = rp + zc * B_(n - 1) + slope * B_(n - 2) + (B if n == 1 else 0)
        if n == 2:
            a[n + 1] = h + r1 / 4.0
            b[n + 1] = h - r1 / 4.0
        else:
            det = n * n - 4.0
            a[n + 1] = (n * r1 + 2.0 * r2) / det
            b[n + 1] = (2.0 * r1 + n * r2) / det
    return a, b


@dataclass
class LaurentModel:
    record: PoleRecord
    order: int
    a: np.ndarray  # p coefficients, powers -1..order
    b: np.ndarray  # q coefficients
    params: Params | None = field(default=None, repr=False)

    def coeff_p(self, k):
        return self.a[k + 1]

    def coeff_q(self, k):
        return self.b[k + 1]

    def eval(self, z):
        t = np.asarray(z, dtype=complex) - self.record.lam
        return leval(self.a, -1, t), leval(self.b, -1, t)

    def state(self, z) -> State:
        p, q = self.eval(z)
        return State(z, complex(p), complex(q))

    def truncation_estimate(self, z) -> float:
        t = abs(complex(z) - self.record.lam)
        return float(max(abs(self.a[-1]), abs(self.b[-1])) * t ** self.order)


def laurent_expand(params: Params, residue: ThirdRoot, lam, h, order: int = DEFAULT_ORDER,
                   source: Source = Source.constructed) -> LaurentModel:
    """Laurent coefficients of (p, q) at a pole ``lam`` with ``Res p = residue``.

    Works on ``x = conj(rho) p``, ``y = rho q`` whose parameters are
    ``(conj(rho) alpha, rho beta)``; ``h`` is the free order-2 coefficient of x.
    """
    if order < 2:
        raise ValueError("order must be at least 2 for the free coefficient to appear")
    rho = residue.value
    lam = complex(lam)
    ax, bx = _unit_residue_coeffs(lam, 1.0, rho.conjugate() * params.alpha,
                                  rho * params.beta, complex(h), order)
    rec = PoleRecord(lam=lam, residue=residue, h=complex(h), source=source)
    return LaurentModel(record=rec, order=order, a=rho * ax, b=rho.conjugate() * bx, params=params)


def limit_expand(residue: ThirdRoot, h, order: int = DEFAULT_ORDER, lam=0j) -> LaurentModel:
    """Laurent model at a pole of the autonomous system u' = -v^2 - u, v' = u^2 + v."""
    rho = residue.value
    ax, bx = _unit_residue_coeffs(1.0, 0.0, 0j, 0j, complex(h), order)
    rec = PoleRecord(lam=complex(lam), residue=residue, h=complex(h))
    return LaurentModel(record=rec, order=order, a=rho * ax, b=rho.conjugate() * bx)


def hamiltonian_series(model: LaurentModel, params: Params):
    """Laurent coefficients of H along the local model, as ``(coeffs, lowest_power)``.

    Valid up to power ``order - 2``; the powers -3 and -2 vanish identically.
    """
    top = model.order - 2
    lam = model.record.lam
    pa, qb = (model.a, -1), (model.b, -1)
    p2 = lmul(*pa, *pa, top + 1)
    q2 = lmul(*qb, *qb, top + 1)
    p3 = lmul(*p2, *pa, top)
    q3 = lmul(*q2, *qb, top)
    pq = lmul(*pa, *qb, top + 1)
    zpq = lmul(np.array([lam, 1.0], dtype=complex), 0, *pq, top)
    c, lo = ladd((1.0 / 3.0, *p3), (1.0 / 3.0, *q3), (1.0, *zpq),
                 (params.beta, model.a, -1), (params.alpha, model.b, -1))
    return c[: top - lo + 1], lo


def fit_pole(samples, params: Params, order: int = DEFAULT_ORDER, source: Source = Source.scanned,
             max_iter: int = 40) -> PoleRecord:
    """Fit ``(lam, residue, h)`` of a pole from states sampled near it.

    A first guess ``lam = z + p/p'`` comes from the sample with the largest |p|.
    The residue is the cube root of unity nearest ``(z - lam) p`` on the sample
    closest to the pole; lam and h are then refined jointly by Gauss-Newton on
    the truncated Laurent model, with residuals weighted relative to |p|+|q|.
    """
    z = np.array([s.z for s in samples], dtype=complex)
    p = np.array([s.p for s in samples], dtype=complex)
    q = np.array([s.q for s in samples], dtype=complex)
    if len(z) < 1:
        raise NoPoleFound("no samples")
    strength = np.abs(p) / (1.0 + np.abs(z))
    k = int(np.argmax(strength))
    if strength[k] < 2.0:
        raise NoPoleFound("no sample shows pole-like growth of p")
    dp, _ = rhs_array(z[k], p[k], q[k], params.alpha, params.beta)
    if dp == 0:
        raise NoPoleFound("vanishing derivative at the strongest sample")
    lam = z[k] + p[k] / dp
    if not np.isfinite(lam):
        raise NoPoleFound("non-finite pole estimate")

    j = int(np.argmin(np.abs(z - lam)))
    residue, margin = ThirdRoot.nearest((z[j] - lam) * p[j])
    if margin < RESIDUE_MARGIN:
        raise AmbiguousResidue(f"residue estimate {(z[j] - lam) * p[j]:.4g} has margin {margin:.3f}")

    w = 1.0 / (1.0 + np.abs(p) + np.abs(q))
    h = 0j
    for _ in range(max_iter):
        m = laurent_expand(params, residue, lam, h, order)
        pm, qm = m.eval(z)
        r = np.concatenate([(pm - p) * w, (qm - q) * w])
        t = z - lam
        el = 1e-6 * max(1.0, abs(lam))
        mp = laurent_expand(params, residue, lam + el, h, order)
        mm = laurent_expand(params, residue, lam - el, h, order)
        # d/dlam: coefficient drift at fixed t, minus shift of the expansion point
        ka = np.arange(-1, order + 1)
        dcoef_a = (mp.a - mm.a) / (2 * el)
        dcoef_b = (mp.b - mm.b) / (2 * el)
        dpl = leval(dcoef_a, -1, t) - leval(ka * m.a, -2, t)
        dql = leval(dcoef_b, -1, t) - leval(ka * m.b, -2, t)
        eh = 1e-6 * max(1.0, abs(h))
        mh = laurent_expand(params, residue, lam, h + eh, order)
        dph = (mh.eval(z)[0] - pm) / eh
        dqh = (mh.eval(z)[1] - qm) / eh
        J = np.column_stack([np.concatenate([dpl * w, dql * w]),
                             np.concatenate([dph * w, dqh * w])])
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        lam = lam + step[0]
        h = h + step[1]
        if not (np.isfinite(lam) and np.isfinite(h)):
            raise NoPoleFound("Gauss-Newton diverged")
        if abs(step[0]) < 1e-15 * max(1.0, abs(lam)) and abs(step[1]) < 1e-13 * max(1.0, abs(h)):
            break

    if abs(lam) < 1e-8:
        raise NoPoleFound("fitted pole sits at the origin, which is excluded")
    dist = np.abs(z - lam)
    spread = np.max(np.abs(z - z.mean())) if len(z) > 1 else model_radius(lam)
    if dist.min() > 2.0 * spread + model_radius(lam):
        raise NoPoleFound("fitted pole lies outside the sample hull")
    m = laurent_expand(params, residue, lam, h, order)
    pm, qm = m.eval(z)
    rel = np.sqrt(np.mean(np.abs(np.concatenate([(pm - p) * w, (qm - q) * w])) ** 2))
    if not rel < 1e-4:
        raise NoPoleFound(f"Laurent model does not fit the samples (rms {rel:.2e})")
    return PoleRecord(lam=complex(lam), residue=residue, h=complex(h), source=source)


def pole_to_dict(rec: PoleRecord) -> dict:
    return {
        "lambda_re": rec.lam.real, "lambda_im": rec.lam.imag,
        "residue_k": rec.residue.k,
        "h_re": rec.h.real, "h_im": rec.h.imag,
        "source": Source(rec.source).value,
        "string_id": rec.string_id,
    }


def pole_from_dict(d: dict) -> PoleRecord:
    return PoleRecord(lam=complex(d["lambda_re"], d["lambda_im"]), residue=ThirdRoot(int(d["residue_k"])),
                      h=complex(d["h_re"], d["h_im"]), source=Source(d.get("source", "constructed")),
                      string_id=d.get("string_id"))
