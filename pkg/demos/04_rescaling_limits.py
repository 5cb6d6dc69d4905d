"""Rescaled solutions and the autonomous limit system.

Near a large point kappa the pair p(kappa + zeta/kappa)/kappa follows
u' = -v^2 - u, v' = u^2 + v, whose first integral is the cluster value
c = H/kappa^3.  Poles of first-kind solutions sit exactly on c = 1/3.
"""
import math

import numpy as np

from phlab.core import ONE
from phlab.rescale import (LimitCase, LimitSystemState, closed_form_poles, cluster_estimate,
                           convergence_diagnostic, explicit_limit, limit_integrate)
from phlab.riccati import make_first_kind
from phlab.survey import scan

sol = make_first_kind(ONE, 0.5 * (-1 + 3 * math.sqrt(3) * 1j))
rep = convergence_diagnostic(sol, (10.0, 20.0, 40.0))
for k, s in zip(rep.kappas, rep.sup_residual):
    print(f"kappa = {k:4.0f}: sup residual of the limit system {s:.2e}")

db = scan(sol, 10.0, 15.0)
dev = max(abs(s.c - 1 / 3) for s in cluster_estimate(None, db.records))
print(f"cluster values at {len(db.records)} poles: max |c - 1/3| = {dev:.1e}")

# closed forms on the two degenerate level sets
for case in LimitCase:
    poles = closed_form_poles(case, 4)
    print(case.value, [f"{t:.3f}:{r.tag}" for t, r in poles])

# crossing poles of the limit system on their Laurent models
u, v = explicit_limit(LimitCase.reducible_branch, 0.5)
end = limit_integrate(LimitSystemState(0.5, complex(u), complex(v)), 20.5)
ue, ve = explicit_limit(LimitCase.reducible_branch, 20.5)
print(f"numerical vs closed form after several poles: {abs(end.u - ue):.1e}, {abs(end.v - ve):.1e}")
print(f"first integral: {end.c:.12f}")
