"""Exact truncated-series verification of K3 lambda functions.

Submodules: series (arithmetic), theta, elliptic, gkz (Frobenius
solutions), indicial, moduli (semi-invariants and the S6 action),
lambda_ (mirror maps, master equation, theta formulas) and cli.
"""

__version__ = "0.1.0"
