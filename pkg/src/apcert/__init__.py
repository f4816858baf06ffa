"""Numerics for the decay estimates behind the failure of the Approximation Property for Sp(2,R) and SL(3,R)."""

__version__ = "0.1.0"
