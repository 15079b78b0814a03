"""Quasi-Monte Carlo point sets from Weil exponential-sum bounds.

Modules: ``modarith`` (prime-field arithmetic), ``finitefield`` (arithmetic in
F_{b^m}), ``pointsets`` (the point constructions), ``charsums`` (exact
character sums and bound sweeps), ``integrands`` (finite test series and
their norms), ``quadrature`` (rule application and error bounds) and
``estimators`` (a scikit-learn style wrapper).
"""

__version__ = "0.1.0"
