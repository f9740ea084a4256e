"""Weighted convolution algebras of general Dirichlet series.

Finitely generated additive subsemigroups of [0, inf)^r carry coefficient
algebras under convolution; this package provides the algebra with weighted
norms, certified inversion (geometric-series and graded recursion), bounded
characters and their functionals, exact rational polyhedral cone machinery,
a character extension pipeline, Kronecker-type density search, and a
multiplicative-function calculus over free multiplicative semigroups.
"""

__version__ = "0.1.0"
