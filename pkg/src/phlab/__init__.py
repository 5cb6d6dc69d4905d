"""Numerical laboratory for the Hamiltonian system

    p' = -q^2 - z p - alpha,    q' = p^2 + z q + beta

and its pole distributions, Backlund maps, Riccati classes and rescaling limits.
"""

__version__ = "0.1.0"
