"""Pole-field surveys: ring scans, string tracking, residue census, signatures.

A scan evaluates a solution on concentric circles, turns every local maximum
of |p| along a circle into a Newton start for a zero of 1/p, and fits a
Laurent model at each converged point.  Completeness is checked with the
argument-principle count ``(1/2 pi i) \\oint H dz``, which equals the number of
poles inside a circle because H has residue 1 at every pole.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .backlund import IntegratedSolution, SolutionOracle, Signature
from .core import ALL_ROOTS, OMEGA, ONE, SQRT3, PhlabError, State, ThirdRoot, hamiltonian_array
from .integrator import PathSpec, integrate
from .laurent import (AmbiguousResidue, NoPoleFound, PoleRecord, Source, fit_pole,
                      pole_from_dict, pole_to_dict)

VARPI_REAL = 2 * math.pi / SQRT3
VARPI_IMAG = 2j * math.pi / 3
DEDUP = 0.1
CHAIN_WINDOW = 0.3
REFINE_RADII = (0.5, 0.1)
STRING_UNIT = SQRT3 / (4 * math.pi)


class UnclassifiableSector(PhlabError):
    pass


class DivisionByZeroClass(PhlabError):
    """No poles with residue rho or conj(rho): zero is a Picard value and delta = 1."""

    delta = 1.0


class ScanError(PhlabError):
    def __init__(self, msg, ring_index=None):
        super().__init__(msg if ring_index is None else f"ring {ring_index}: {msg}")
        self.ring_index = ring_index


def _scale(lam):
    return max(abs(lam), 1.0)


@dataclass
class PoleDB:
    """Deduplicated pole records of one solution over an annulus."""

    records: list = field(default_factory=list)
    region: tuple = (0.0, 0.0)
    solution_id: str = ""
    diagnostics: dict = field(default_factory=dict)

    def find(self, lam):
        for i, rec in enumerate(self.records):
            if abs(rec.lam - lam) < DEDUP / _scale(rec.lam):
                return i
        return None

    def add(self, rec: PoleRecord) -> bool:
        r0, r1 = self.region
        if not (r0 <= abs(rec.lam) <= r1):
            return False
        if self.find(rec.lam) is not None:
            return False
        self.records.append(rec)
        return True

    def canonical(self):
        self.records.sort(key=lambda r: (round(abs(r.lam), 9), round(math.atan2(r.lam.imag, r.lam.real), 9)))
        return self

    def within(self, r0, r1):
        return [r for r in self.records if r0 <= abs(r.lam) <= r1]

    def counts(self, r):
        """``(n_total, n1, nw, nW)`` for poles with ``|lam| <= r`` in the region."""
        c = [0, 0, 0]
        for rec in self.records:
            if abs(rec.lam) <= r:
                c[rec.residue.k] += 1
        return (sum(c), *c)

    def save_jsonl(self, path):
        with open(path, "w") as fh:
            for rec in self.canonical().records:
                fh.write(json.dumps(pole_to_dict(rec), sort_keys=True) + "\n")

    @classmethod
    def load_jsonl(cls, path, region=(0.0, math.inf), solution_id=""):
        db = cls(region=region, solution_id=solution_id)
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    db.records.append(pole_from_dict(json.loads(line)))
        return db


def solution_id(sol: SolutionOracle) -> str:
    text = f"{sol.description}|{sol.params.alpha!r}|{sol.params.beta!r}"
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def ring_radii(r0, r1, density=1.0):
    """Radii with spacing ``density * pi / (3 r)``."""
    radii = [float(r0)]
    while radii[-1] < r1:
        r = radii[-1]
        radii.append(min(r1, r + density * math.pi / (3 * max(r, 1.0))))
    return np.array(radii)


def ring_angles(r, density=1.0, offset=0.0):
    n = max(16, int(math.ceil(2 * math.pi * r / (density * math.pi / (3 * max(r, 1.0))))))
    return offset + 2 * math.pi * np.arange(n) / n


def _newton_pole(sol, z, params, max_iter=30):
    """Newton iteration on 1/p: ``z <- z + p/p'``.  Returns the limit or None."""
    scale = _scale(z)
    for _ in range(max_iter):
        p, q = sol.evaluate(np.array([z]))
        p, q = p[0], q[0]
        if not np.isfinite(p):
            return z
        dp = -q * q - z * p - params.alpha
        if dp == 0:
            return None
        step = p / dp
        z = z + step
        if abs(step) > 1.0 / scale:
            return None
        if abs(step) < 1e-11 / scale:
            return z
    return None


def refine_pole(sol: SolutionOracle, z_guess, order: int = 24, source=Source.scanned):
    """Newton plus a Laurent fit on a ring around the converged point.

    h enters p at second order, so a wide ring (0.5/|lam|) pins it down far
    better than a tight one; if a neighbouring pole spoils the wide fit the
    tight ring 0.1/|lam| is used instead.
    """
    params = sol.params
    lam = _newton_pole(sol, complex(z_guess), params)
    if lam is None:
        raise NoPoleFound("Newton on 1/p did not converge")
    n = 24
    ang = 2 * math.pi * (np.arange(n) + 0.5) / n
    shape = np.exp(1j * ang) * np.where(np.arange(n) % 2, 1.0, 0.6)
    err = None
    for fac in REFINE_RADII:
        ring = lam + fac / _scale(lam) * shape
        p, q = sol.evaluate(ring)
        if not np.all(np.isfinite(p)):
            continue
        try:
            return fit_pole([State(z, a, b) for z, a, b in zip(ring, p, q)], params, order=order, source=source)
        except (NoPoleFound, AmbiguousResidue) as exc:
            err = exc
    raise err if err is not None else NoPoleFound("no finite samples around the pole")


def _ring_candidates(p, q, r, thetas, floor=0.3):
    m = (np.abs(p) + np.abs(q)) / (1.0 + r)
    m = np.where(np.isfinite(m), m, 1e300)
    left, right = np.roll(m, 1), np.roll(m, -1)
    idx = np.nonzero((m >= left) & (m > right) & (m > floor))[0]
    return [(r * np.exp(1j * thetas[i]), m[i]) for i in idx]


def _contour_count(sol, r, fine=0.03):
    """``(1/2 pi i) \\oint H dz`` and ``(1/2 pi i) \\oint p dz`` on ``|z| = r``."""
    n = max(256, int(math.ceil(2 * math.pi * r / (fine / max(r, 1.0)))))
    th = 2 * math.pi * np.arange(n) / n
    p, q = sol.evaluate_ring(r, th)
    z = r * np.exp(1j * th)
    H = hamiltonian_array(z, p, q, sol.params.alpha, sol.params.beta)
    return complex(np.mean(H * z)), complex(np.mean(p * z))


def _quiet_radius(db, target, lo, hi):
    """Radius near ``target`` in [lo, hi] farthest from any pole modulus."""
    mods = np.array(sorted(abs(r.lam) for r in db.records)) if db.records else np.array([])
    cand = np.linspace(max(lo, target - 0.3), min(hi, target + 0.3), 61)
    if len(mods) == 0:
        return float(target)
    gaps = np.array([np.min(np.abs(mods - c)) * c for c in cand])
    return float(cand[int(np.argmax(gaps))])


def _scan_rings(sol, radii, density, jobs):
    def one(args):
        k, r = args
        th = ring_angles(r, density, offset=0.5 * (k % 2) * (2 * math.pi / len(ring_angles(r, density))))
        try:
            p, q = sol.evaluate_ring(r, th)
        except PhlabError as exc:
            raise ScanError(str(exc), ring_index=k) from exc
        return _ring_candidates(p, q, r, th)

    items = list(enumerate(radii))
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            results = list(ex.map(one, items))
    else:
        results = [one(it) for it in items]
    cands = [c for res in results for c in res]
    cands.sort(key=lambda c: -c[1])
    return cands


def scan(sol: SolutionOracle, r0: float = 1.0, r1: float = 10.0, density: float = 1.0,
         jobs: int = 1, verify: bool = True, max_refine: int = 2) -> PoleDB:
    """Poles of ``sol`` in the annulus ``r0 <= |z| <= r1``."""
    if r0 < 1:
        raise ValueError("scan regions start at r0 >= 1")
    db = PoleDB(region=(float(r0), float(r1)), solution_id=solution_id(sol))
    _collect(sol, db, ring_radii(r0, r1, density), density, jobs)
    if verify:
        for attempt in range(max_refine + 1):
            bad = verify_counts(sol, db)
            db.diagnostics["count_mismatch"] = bad
            if not bad or attempt == max_refine:
                break
            for a, b, _, _ in bad:
                d = density / 2 ** (attempt + 1)
                _collect(sol, db, ring_radii(max(r0, a - 0.1), min(r1, b + 0.1), d), d, jobs)
    return db.canonical()


def _collect(sol, db, radii, density, jobs):
    tried = []
    for z, _ in _scan_rings(sol, radii, density, jobs):
        if db.find(z) is not None:
            continue
        if any(abs(z - t) < 0.02 / _scale(z) for t in tried):
            continue
        tried.append(z)
        try:
            rec = refine_pole(sol, z)
        except (NoPoleFound, AmbiguousResidue):
            continue
        db.add(rec)


def verify_counts(sol, db, step=2.0):
    """Annuli whose contour-integral pole count disagrees with the database.

    Returns ``(r_a, r_b, integral_count, db_count)`` tuples.
    """
    r0, r1 = db.region
    targets = np.arange(r0, r1 + 1e-9, step)
    if targets[-1] < r1 - 1e-9:
        targets = np.append(targets, r1)
    rs = [_quiet_radius(db, t, r0, r1) for t in targets]
    rs = sorted(set(rs))
    counts = [_contour_count(sol, r)[0] for r in rs]
    bad = []
    for (ra, ca), (rb, cb) in zip(zip(rs[:-1], counts[:-1]), zip(rs[1:], counts[1:])):
        n_int = cb - ca
        n_db = sum(1 for rec in db.records if ra < abs(rec.lam) <= rb)
        if abs(n_int - n_db) > 0.25:
            bad.append((ra, rb, n_int, n_db))
    db.diagnostics["count_radii"] = rs
    db.diagnostics["contour_counts"] = counts
    return bad


def residue_balance(sol, db, ra, rb):
    """Compare ``(1/2 pi i)`` of p over the annulus with ``n1 + w nw + W nW``.

    Radii are nudged away from pole moduli.  Returns ``(integral, predicted)``.
    """
    ra = _quiet_radius(db, ra, *db.region)
    rb = _quiet_radius(db, rb, *db.region)
    ia = _contour_count(sol, ra)[1]
    ib = _contour_count(sol, rb)[1]
    pred = sum(rec.residue.value for rec in db.records if ra < abs(rec.lam) <= rb)
    return ib - ia, pred


class VarpiKind(str, Enum):
    real = "real"
    imaginary = "imaginary"


@dataclass
class StringRecord:
    """A chain of poles; the first ``head`` members were attached in the
    pre-asymptotic extension pass and are exempt from the link window."""

    id: int
    members: list
    varpi_kind: VarpiKind
    direction: float
    head: int = 0

    @property
    def residues(self):
        return [m.residue for m in self.members]

    @property
    def residue(self):
        ks = [m.residue.k for m in self.members]
        return ThirdRoot(max(set(ks), key=ks.count))

    @property
    def outer(self):
        return max(abs(m.lam) for m in self.members)


@dataclass
class LinkError:
    """``|lam_next - lam - s varpi/lam|`` in units of ``1/|lam|``."""

    string_id: int
    lam: complex
    error: float
    head: bool = False


def _predict(lam, varpi):
    base = varpi / lam
    s = 1.0 if (np.conj(lam) * base).real >= 0 else -1.0
    return lam + s * base


def link_error(lam, nxt, kind: VarpiKind) -> float:
    vp = VARPI_REAL if kind is VarpiKind.real else VARPI_IMAG
    return float(abs(nxt - _predict(lam, vp)) * abs(lam))


def track_strings(db: PoleDB, window: float = CHAIN_WINDOW, min_members: int = 2,
                  head_window: float = 1.0):
    """Chain poles by ``lam_{n+1} = lam_n +- varpi/lam_n``.

    Returns ``(strings, unchained, link_errors)``.  The sign is the one that
    increases |lam|.  Links must fall within ``window/|lam|``; afterwards each
    string is extended inward with the looser ``head_window`` (less than half
    the pole spacing) to collect the poles near the origin where the
    recursion holds only roughly.  Processing order is canonical, so the
    result does not depend on the order of records in ``db``.
    """
    recs = sorted(db.records, key=lambda r: (round(abs(r.lam), 9), round(math.atan2(r.lam.imag, r.lam.real), 9)))
    lams = np.array([r.lam for r in recs]) if recs else np.zeros(0, dtype=complex)
    succ = [None] * len(recs)
    pred = [None] * len(recs)
    kind = [None] * len(recs)
    err = [0.0] * len(recs)
    for i, rec in enumerate(recs):
        lam = rec.lam
        best = None
        for vk, vp in ((VarpiKind.real, VARPI_REAL), (VarpiKind.imaginary, VARPI_IMAG)):
            guess = _predict(lam, vp)
            d = np.abs(lams - guess)
            for j in np.argsort(d)[:3]:
                if j == i or pred[j] is not None or abs(lams[j]) <= abs(lam):
                    continue
                if recs[j].residue != rec.residue and vk is VarpiKind.real:
                    continue
                if d[j] < window / _scale(lam) and (best is None or d[j] < best[0]):
                    best = (d[j], j, vk)
        if best is not None:
            d, j, vk = best
            succ[i], pred[j], kind[i], err[i] = j, i, vk, d * _scale(lam)
    chains = []
    for i in range(len(recs)):
        if pred[i] is not None:
            continue
        chain = [i]
        while succ[chain[-1]] is not None:
            chain.append(succ[chain[-1]])
        chains.append(chain)
    body = [c for c in chains if len(c) >= min_members]
    free = {c[0] for c in chains if len(c) < min_members}
    strings, links = [], []
    for sid, chain in enumerate(sorted(body, key=lambda c: (round(abs(recs[c[0]].lam), 9),
                                                             math.atan2(recs[c[0]].lam.imag, recs[c[0]].lam.real)))):
        kinds = [kind[c] for c in chain[:-1]]
        vk = max(set(kinds), key=kinds.count)
        head = []
        first = chain[0]
        while True:
            lam1 = recs[first].lam
            best = None
            for j in free:
                mu = recs[j].lam
                if abs(mu) >= abs(lam1) or (vk is VarpiKind.real and recs[j].residue != recs[first].residue):
                    continue
                e = link_error(mu, lam1, vk)
                if e < head_window and (best is None or e < best[0]):
                    best = (e, j)
            if best is None:
                break
            free.discard(best[1])
            head.insert(0, best[1])
            first = best[1]
        full = head + chain
        last = recs[full[-1]].lam
        members = [recs[c].with_string(sid) for c in full]
        strings.append(StringRecord(sid, members, vk, math.atan2(last.imag, last.real), head=len(head)))
        for n, (a, b) in enumerate(zip(full[:-1], full[1:])):
            links.append(LinkError(sid, recs[a].lam, link_error(recs[a].lam, recs[b].lam, vk) / abs(recs[a].lam),
                                   head=n < len(head)))
    unchained = [recs[j] for j in sorted(free)]
    return strings, unchained, links


def string_counts(strings, r_outer: float, min_members: int = 4, reach: float = 0.85):
    """String units per residue class ``(n1, nw, nW)``.

    A real-kind string counts one unit for its residue.  An imaginary-kind
    string has the denser spacing 2 pi/3, so each member is worth sqrt(3)
    real-kind members; its units are split by residue accordingly.
    """
    units = np.zeros(3)
    for s in strings:
        if len(s.members) < min_members or s.outer < reach * r_outer:
            continue
        if s.varpi_kind is VarpiKind.real:
            units[s.residue.k] += 1
        else:
            ks = np.array([m.residue.k for m in s.members])
            for k in range(3):
                units[k] += SQRT3 * np.mean(ks == k)
    return tuple(int(round(u)) for u in units), tuple(float(u) for u in units)


@dataclass
class CensusReport:
    radii: list
    counts: list
    string_counts: tuple
    string_units: tuple = (0.0, 0.0, 0.0)
    delta0: float | None = None
    raw_delta: float | None = None
    growth_c: float | None = None
    strings: list = field(default_factory=list)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "n_total", "n_1", "n_w", "n_wbar"])
            for r, c in zip(self.radii, self.counts):
                w.writerow([f"{r:.6g}", *c])


def deficiency_from_counts(n1, nr, nrb) -> float:
    if nr + nrb == 0:
        raise DivisionByZeroClass("no poles with residue rho or conj(rho); delta(0, w) = 1")
    return 1.0 - 2.0 * n1 / (nr + nrb)


def deficiency(report: CensusReport) -> float:
    return deficiency_from_counts(*report.string_counts)


def census(db: PoleDB, radii, min_members: int = 4) -> CensusReport:
    radii = [float(r) for r in radii]
    counts = [db.counts(r) for r in radii]
    strings, _, _ = track_strings(db)
    r_out = max(radii) if radii else db.region[1]
    sc, su = string_counts(strings, r_out, min_members=min_members)
    rep = CensusReport(radii=radii, counts=counts, string_counts=sc, string_units=su, strings=strings)
    try:
        rep.delta0 = deficiency_from_counts(*sc)
    except DivisionByZeroClass:
        rep.delta0 = None
    n_last = counts[-1] if counts else (0, 0, 0, 0)
    if n_last[2] + n_last[3] > 0:
        rep.raw_delta = 1.0 - 2.0 * n_last[1] / (n_last[2] + n_last[3])
    r0 = db.region[0]
    x = np.array([r * r - r0 * r0 for r in radii])
    y = np.array([c[0] for c in counts], dtype=float)
    if len(x) and np.dot(x, x) > 0:
        rep.growth_c = float(np.dot(x, y) / np.dot(x, x))
    return rep


@dataclass
class SignatureMeasurement:
    values: list  # ThirdRoot, or None for an o(|z|) sector
    ratios: list
    radius: float
    table1_mismatches: list = field(default_factory=list)

    @property
    def family(self) -> str:
        if all(v is None for v in self.values):
            return "zero"
        if all(v is not None for v in self.values):
            return "third"
        return "mixed"

    @property
    def signature(self) -> Signature | None:
        return Signature(tuple(self.values)) if self.family == "third" else None


def signature_measure(sol: SolutionOracle, radius: float = 12.0, strings=None, tol: float = 0.25):
    """Quadrant-wise leading coefficient ``-p/z`` sampled on the bisectors.

    With tracked strings supplied, checks each axis against the residue rule:
    the residues of the strings along the ray at angle nu pi/2 sum to
    ``s i (tau_nu - tau_{nu+1})/sqrt(3)``, s = +1 on the real and -1 on the
    imaginary axis.
    """
    if radius < 10:
        raise ValueError("signature measurement needs radius >= 10")
    values, ratios = [], []
    for nu in range(1, 5):
        th = (2 * nu - 1) * math.pi / 4
        rs = radius * np.array([0.9, 1.0, 1.1])
        z = rs * np.exp(1j * th)
        p, _ = sol.evaluate(z)
        x = complex(np.median((-p / z).real) + 1j * np.median((-p / z).imag))
        ratios.append(x)
        if abs(x) < tol:
            values.append(None)
            continue
        root, _ = ThirdRoot.nearest(x)
        if abs(x - root.value) > tol:
            raise UnclassifiableSector(f"quadrant {nu}: -p/z = {x:.3g} is near neither 0 nor a cube root of unity")
        values.append(root)
    meas = SignatureMeasurement(values, ratios, radius)
    if strings is not None and meas.family == "third":
        meas.table1_mismatches = table1_check(meas.signature, strings)
    return meas


def ray_residue_sums(strings):
    sums = [0j] * 4
    for s in strings:
        nu = int(round(s.direction / (math.pi / 2))) % 4
        sums[nu] += s.residue.value
    return sums


def table1_expected(sig: Signature):
    t = [x.value for x in sig.tau]
    out = []
    for nu in range(4):
        before, after = t[(nu - 1) % 4], t[nu]
        s = 1.0 if nu % 2 == 0 else -1.0
        out.append(s * 1j * (before - after) / SQRT3)
    return out


def table1_check(sig: Signature, strings, min_members: int = 4):
    good = [s for s in strings if len(s.members) >= min_members and s.varpi_kind is VarpiKind.real]
    got = ray_residue_sums(good)
    exp = table1_expected(sig)
    return [nu for nu in range(4) if abs(got[nu] - exp[nu]) > 1e-6]


def disc_count(sol: SolutionOracle, center, radius: float, n: int = 4096) -> complex:
    """``(1/2 pi i) \\oint H dz`` on ``|z - center| = radius``: the number of poles inside.

    Integrated oracles carry the integral along the circle (vaulting poles);
    other oracles use the trapezoid rule on ``n`` samples, which converges
    geometrically while the circle keeps clear of poles.
    """
    center = complex(center)
    if isinstance(sol, IntegratedSolution):
        start = sol.state(center + radius)
        traj = integrate(start, sol.params, PathSpec.circle(center, radius), sol.tol,
                         spacing=radius, record_poles=False)
        return complex(traj.int_h[-1] / (2j * math.pi))
    e = np.exp(2j * math.pi * np.arange(n) / n)
    z = center + radius * e
    p, q = sol.evaluate(z)
    H = hamiltonian_array(z, p, q, sol.params.alpha, sol.params.beta)
    return complex(np.mean(H * radius * e))


@dataclass
class LocalDensity:
    center: complex
    radius: float
    count: int
    raw: complex

    @property
    def density(self) -> float:
        return self.count / (math.pi * self.radius ** 2)


def local_density(sol: SolutionOracle, center, eta: float = 0.1, tries: int = 7) -> LocalDensity:
    """Pole density in the disc ``|z - center| < eta |center|``.

    The radius is nudged by up to 5% until the contour count is an integer
    to 1e-6, which fails only when the circle grazes a pole.
    """
    center = complex(center)
    r0 = eta * abs(center)
    for k in range(tries):
        r = r0 * (1 + 0.05 * ((k + 1) // 2) / max(1, tries // 2) * (-1) ** k)
        raw = disc_count(sol, center, r)
        m = round(raw.real)
        if abs(raw - m) < 1e-6:
            return LocalDensity(center, r, int(m), raw)
    raise ScanError(f"contour count round {center} is not an integer ({raw:.6g})")


def zero_scan_for_B(sol: SolutionOracle, omega: ThirdRoot, r0: float = 1.0, r1: float = 10.0,
                    density: float = 1.0, db: PoleDB | None = None):
    """Zeros of ``omega p + conj(omega) q - z`` in the annulus, excluding conj(omega)-poles.

    These are the points where B_omega creates new poles with residue conj(omega).
    """
    w = omega.value
    par = sol.params
    found = []
    for k, r in enumerate(ring_radii(r0, r1, density)):
        th = ring_angles(r, density)
        p, q = sol.evaluate_ring(r, th)
        z = r * np.exp(1j * th)
        f = np.abs(w * p + w.conjugate() * q - z)
        df = np.abs(w * (-q * q - z * p - par.alpha) + w.conjugate() * (p * p + z * q + par.beta) - 1)
        f = np.where(np.isfinite(f), f, 1e300)
        # a zero lies within one sample spacing when |f| < |f'| * spacing
        near = f < 2 * np.where(np.isfinite(df), df, 0.0) * density * math.pi / (3 * max(r, 1.0))
        idx = np.nonzero((f <= np.roll(f, 1)) & (f < np.roll(f, -1)) & near)[0]
        for i in idx:
            zi = z[i]
            if any(abs(zi - x) < DEDUP / _scale(x) for x in found):
                continue
            for _ in range(40):
                pp, qq = sol.evaluate(np.array([zi]))
                dp, dq = sol.derivative(np.array([zi]))
                fv = w * pp[0] + w.conjugate() * qq[0] - zi
                df = w * dp[0] + w.conjugate() * dq[0] - 1.0
                if not np.isfinite(fv) or df == 0:
                    zi = None
                    break
                step = fv / df
                zi = zi - step
                if abs(step) > 2.0 / _scale(zi):
                    zi = None
                    break
                if abs(step) < 1e-11 / _scale(zi):
                    break
            if zi is None or not (r0 <= abs(zi) <= r1):
                continue
            if any(abs(zi - x) < DEDUP / _scale(x) for x in found):
                continue
            # a conj(omega)-pole of p is also a zero of f; those are not new poles
            ring = zi + 0.02 / _scale(zi) * np.exp(2j * math.pi * np.arange(8) / 8)
            pr, _ = sol.evaluate(ring)
            if np.median(np.abs(pr)) > 20 * (1 + abs(zi)):
                continue
            found.append(complex(zi))
    if db is not None:
        found = [x for x in found
                 if not any(abs(x - rec.lam) < DEDUP / _scale(x) and rec.residue == omega.conj()
                            for rec in db.records)]
    return sorted(found, key=lambda x: (round(abs(x), 9), math.atan2(x.imag, x.real)))


__all__ = [
    "PoleDB", "StringRecord", "CensusReport", "SignatureMeasurement", "VarpiKind", "scan",
    "track_strings", "census", "signature_measure", "deficiency", "deficiency_from_counts",
    "zero_scan_for_B", "residue_balance", "verify_counts", "refine_pole", "string_counts",
    "table1_check", "table1_expected", "ray_residue_sums", "UnclassifiableSector",
    "DivisionByZeroClass", "ScanError", "ring_radii", "ring_angles", "solution_id",
    "VARPI_REAL", "VARPI_IMAG", "STRING_UNIT", "ALL_ROOTS", "ONE", "OMEGA",
]
