"""Asymptotic series in the pole-free sectors.

Away from the strings a solution follows either the decaying family
p ~ -alpha/z or one of the three linear families p ~ -tau z.  Truncating after
N correction terms leaves an error of order |z|^-(2N+3).
"""
import math

from phlab.asymptotics import attracting_bisectors, riccati_decay, series_third, series_zero
from phlab.core import ONE, Params
from phlab.riccati import make_first_kind

par = Params(0.3 + 0.2j, -0.7 + 0.1j)
print("zero family, N = 2:")
print(series_zero(par, 2).dumps())

alpha = 0.5 * (-1 + 3 * math.sqrt(3) * 1j)
sol = make_first_kind(ONE, alpha)
for th in attracting_bisectors(sol):
    for N in (1, 2, 3):
        f = riccati_decay(sol, N, th)
        note = (f"series terminates, remainder {f.errors[-1]:.0e}" if f.degenerate
                else f"expected {f.expected}")
        print(f"arg z = {th:.3f}, tau = {f.tau.tag}, N = {N}: slope {f.slope:7.2f}  ({note})")

print("third family coefficients for tau = 1:")
s = series_third(sol.params, ONE, 1)
print(f"  p_-1 = {s.p_coeff(-1):.4f}, H_1 = {s.H_coeff(1):.4f}")
