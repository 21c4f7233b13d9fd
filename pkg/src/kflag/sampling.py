"""Seeded random Laurent polynomials for cross-checks."""

from __future__ import annotations

import random

from .laurent import LaurentPoly, Monomial
from .tower import TowerSpec


def random_laurent(t: TowerSpec, rng: random.Random, *, max_terms=4, max_degree=4,
                   max_exp=2, max_coeff=5, equivariant=False) -> LaurentPoly:
    """A random integer Laurent polynomial in the tower's Y (and U) variables.

    Each term has total absolute degree at most ``max_degree`` and exponents in
    ``[-max_exp, max_exp]``; coefficients lie in ``[-max_coeff, max_coeff]``.
    """
    vs = t.variables(equivariant=equivariant)
    out = LaurentPoly.const(0)
    for _ in range(rng.randint(1, max_terms)):
        exps, budget = {}, max_degree
        for k in rng.sample(vs, len(vs)):
            if budget == 0:
                break
            e = rng.randint(-min(max_exp, budget), min(max_exp, budget))
            if e:
                exps[k] = e
                budget -= abs(e)
        out = out + LaurentPoly.from_monomial(Monomial(exps), rng.randint(-max_coeff, max_coeff))
    return out
