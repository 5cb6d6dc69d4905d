"""Pole strings of a first-kind solution.

On the first-kind class the system reduces to a Riccati equation, so the
oracle here integrates a linear second-order equation with no singularities.
All poles then have residue 1 and line up along the four coordinate axes in
strings with lambda_{n+1} - lambda_n close to (2 pi/sqrt 3)/lambda_n.
"""
import math

from phlab.core import ONE
from phlab.riccati import make_first_kind
from phlab.survey import census, scan, track_strings

alpha = 0.5 * (-1 + 3 * math.sqrt(3) * 1j)
sol = make_first_kind(ONE, alpha)
db = scan(sol, 1.0, 15.0)
print(f"{len(db.records)} poles in 1 <= |z| <= 15, contour-count mismatches: {db.diagnostics['count_mismatch']}")
print(f"max |h| = {max(abs(r.h) for r in db.records):.1e}")

strings, unchained, links = track_strings(db)
for s in strings:
    print(f"string {s.id}: {len(s.members)} poles toward arg {s.direction:+.2f}, residue {s.residue.tag}, "
          f"{s.head} head links")
body = max(l.error * abs(l.lam) for l in links if not l.head)
head = max(l.error * abs(l.lam) for l in links if l.head)
print(f"link error x |lambda|: body <= {body:.3f}, head <= {head:.3f}")
print(f"expected poles per string to r = 15: {15 ** 2 * math.sqrt(3) / (4 * math.pi):.1f}")

rep = census(db, [5, 10, 15])
for r, c in zip(rep.radii, rep.counts):
    print(f"  r = {r:4.1f}: n = {c[0]:3d}  (1: {c[1]}, w: {c[2]}, W: {c[3]})")
