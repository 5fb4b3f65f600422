"""
Frey elimination toolkit

Frey hyperelliptic curves over Q(zeta_r)^+ for x^r + y^r = d z^p: curve
construction, local data, Frobenius trace sets and elimination bounds.
"""

__version__ = "0.1.0"
