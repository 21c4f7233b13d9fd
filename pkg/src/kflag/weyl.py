"""Lie-stage data: Weyl group orders, coset counts and invariant generators.

Supported families are ``A`` (SL(m), m torus variables), ``C`` (Sp(m)) and
``B_spin`` (Spin(2m+1)). Only family A admits non-Borel parabolics, given as
a composition ``blocks`` of m.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial, prod

from .errors import ArgumentError, UnsupportedError
from .laurent import (
    ONE,
    Kind,
    LaurentPoly,
    Monomial,
    VarId,
    doubled_exponents,
    elementary_symmetric_all,
    from_doubled,
)

FAMILIES = ("A", "C", "B_spin")


@dataclass(frozen=True)
class Stage:
    family: str
    m: int
    blocks: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnsupportedError(
                f"unsupported Lie family {self.family!r}; expected one of {', '.join(FAMILIES)}"
            )
        if not isinstance(self.m, int) or isinstance(self.m, bool) or self.m < 1:
            raise ArgumentError(f"stage needs at least one torus variable, got {self.m!r}")
        blocks = tuple(self.blocks) if self.blocks else (1,) * self.m
        if any(not isinstance(b, int) or b < 1 for b in blocks) or sum(blocks) != self.m:
            raise ArgumentError(f"blocks {list(blocks)} are not a composition of {self.m}")
        if self.family != "A" and any(b != 1 for b in blocks):
            raise UnsupportedError(f"family {self.family} supports the Borel parabolic only")
        object.__setattr__(self, "blocks", blocks)

    @property
    def is_borel(self):
        return all(b == 1 for b in self.blocks)

    @property
    def is_spin(self):
        return self.family == "B_spin"

    def block_ranges(self):
        """0-based index ranges of the parabolic blocks."""
        out, start = [], 0
        for b in self.blocks:
            out.append(range(start, start + b))
            start += b
        return out

    def describe(self):
        name = {"A": f"SL({self.m})", "C": f"Sp({self.m})", "B_spin": f"Spin({2 * self.m + 1})"}
        text = name[self.family]
        if not self.is_borel:
            text += f" blocks {list(self.blocks)}"
        return text


def _ys(stage: Stage, j: int):
    return [VarId(j, i, Kind.Y) for i in range(1, stage.m + 1)]


def weyl_order(s: Stage) -> int:
    if s.family == "A":
        return factorial(s.m)
    return 2 ** s.m * factorial(s.m)


def coset_rank(s: Stage) -> int:
    """|W / W_L|, the number of cells of the fiber G/P."""
    return weyl_order(s) // prod(factorial(b) for b in s.blocks)


def _inverse_pairs(ys):
    out = []
    for k in ys:
        out.append(Monomial.of(k))
        out.append(Monomial.of(k, -1))
    return out


def lambda_rho(s: Stage, j: int = 1):
    """[lambda^0, ..., lambda^(2m+1)] of the vector representation of SO(2m+1).

    lambda^i is the coefficient of t^i in (1+t) prod_i (1+y_i t)(1+y_i^-1 t).
    """
    return elementary_symmetric_all([ONE] + _inverse_pairs(_ys(s, j)))


def symplectic_lambdas(s: Stage, j: int = 1):
    """[lambda_0, ..., lambda_2m]: elementary symmetric in y_i, y_i^-1."""
    return elementary_symmetric_all(_inverse_pairs(_ys(s, j)))


def spin_delta(s: Stage, j: int = 1, *, equivariant=False) -> LaurentPoly:
    """prod_i (w_i + w_i^-1), the spin character, in square-root variables."""
    kind = Kind.V if equivariant else Kind.W
    result = LaurentPoly.const(1)
    for i in range(1, s.m + 1):
        k = VarId(j, i, kind)
        result = result * LaurentPoly({Monomial.of(k): 1, Monomial.of(k, -1): 1})
    return result


def invariant_generators(s: Stage, j: int = 1) -> list:
    """Generators of R(T)^W in the variables of stage ``j``."""
    if s.family == "A":
        return elementary_symmetric_all(_ys(s, j))[1:]
    if s.family == "C":
        return symplectic_lambdas(s, j)[1 : s.m + 1]
    return lambda_rho(s, j)[1 : s.m] + [spin_delta(s, j)]


def half_character(s: Stage, j: int = 1, *, equivariant=False) -> LaurentPoly:
    return LaurentPoly.from_monomial(from_doubled([1] * s.m, j, equivariant=equivariant))


def parabolic_generators(s: Stage, j: int = 1) -> list:
    """Generators of R(T)^{W_L}: the variables for Borel, block e_k otherwise.

    Spin stages also list the half character (y_1...y_m)^(1/2).
    """
    ys = _ys(s, j)
    out = []
    for block in s.block_ranges():
        out.extend(elementary_symmetric_all([ys[i] for i in block])[1:])
    if s.is_spin:
        out.append(half_character(s, j))
    return out


def reflection_count(s: Stage) -> int:
    return s.m - 1 if s.family == "A" else s.m


def _reflect_monomial(s: Stage, k: int, j: int, mono: Monomial):
    ym, wm = (Kind.Y, Kind.W)
    if s.is_spin:
        h = doubled_exponents(mono, j, s.m)
        if k < s.m:
            h[k - 1], h[k] = h[k], h[k - 1]
        else:
            h[k - 1] = -h[k - 1]
        rest = [(key, e) for key, e in mono.items() if key.stage != j or key.kind not in (ym, wm)]
        return 1, Monomial(rest) * from_doubled(h, j)
    exps = {}
    for key, e in mono.items():
        if key.stage == j and key.kind == ym:
            if k < s.m and key.index in (k, k + 1):
                key = VarId(j, 2 * k + 1 - key.index, ym)
            elif k == s.m and key.index == k:
                e = -e
        exps[key] = exps.get(key, 0) + e
    return 1, Monomial(exps)


def apply_simple_reflection(s: Stage, k: int, p: LaurentPoly, j: int = 1) -> LaurentPoly:
    """Act on ``p`` by the k-th simple reflection of W.

    s_k swaps y_k and y_(k+1) for k < m; for families C and B_spin, s_m
    inverts y_m (and w_m).
    """
    if not 1 <= k <= reflection_count(s):
        raise ArgumentError(f"simple reflection index {k} out of range for {s.describe()}")
    return p.map_monomials(lambda mono: _reflect_monomial(s, k, j, mono))


def parabolic_reflections(s: Stage):
    """Indices k of the simple reflections that generate W_L."""
    out = []
    for block in s.block_ranges():
        out.extend(i + 1 for i in list(block)[:-1])
    return out
