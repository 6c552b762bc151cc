"""Exact computations for Kleinian singularities, pairs G1 < G2 of finite SL2
subgroups, their universal deformations, folded root systems and CBH algebras."""

__version__ = "0.1.0"
