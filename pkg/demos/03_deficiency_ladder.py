"""Climb from a first-kind solution to one with two residue classes.

Alternating the rotation M_W with the transformation B_1 creates poles of
residue w and W while keeping the residue-1 strings.  Counting strings per
residue class gives the deficiency of the value zero directly.
"""
import math

from phlab.backlund import chain, parse_chain
from phlab.core import ONE
from phlab.riccati import make_first_kind
from phlab.survey import census, scan

base = make_first_kind(ONE, 0.5 * (-1 + 3 * math.sqrt(3) * 1j))
steps = parse_chain("MW;B1;MW;B1;MW")
sol = chain(steps, base)
print(f"parameters after the chain: alpha = {sol.params.alpha:.4f}, beta = {sol.params.beta:.4f}")

db = scan(sol, 3.0, 15.0)
rep = census(db, [5, 10, 15])
n1, nw, nW = rep.string_counts
print(f"{len(db.records)} poles; strings per residue class (1, w, W) = {rep.string_counts}")
print(f"delta(0) = 1 - 2*{n1}/({nw}+{nW}) = {rep.delta0:.6f}")
print(f"ratio from raw pole counts at r = 15: {rep.raw_delta:.3f}")
