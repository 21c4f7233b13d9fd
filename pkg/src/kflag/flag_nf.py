"""Exact normal forms in the K-ring of a full-flag type-A tower.

For stage j with m = m_j variables let c_k be the reduced image of e_k(y_j)
and f_0(t) = t^m - c_1 t^(m-1) + ... + (-1)^m c_m. Dividing repeatedly by
(t - y[j,i]) gives f_1, f_2, ...; the relation g[j,i] = f_(i-1)(y[j,i]) is
monic of degree m - i + 1 in y[j,i]. Because these leading terms are pure
powers of distinct variables the rows already form a Groebner basis, and the
standard monomials prod y[j,i]^a with 0 <= a <= m_j - i give a Z-basis
(an R(T)-basis in equivariant mode, where the u-variables are scalars).

Variable order: higher stage is bigger; within a stage y[j,m] > ... > y[j,1].

Polynomials are handled internally as dicts mapping dense exponent tuples to
integer coefficients; positions are the Y variables stage-major, followed by
the U variables in equivariant mode.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

from .errors import ArgumentError, ConsistencyError, SizeError, UnsupportedError
from .laurent import Kind, LaurentPoly, Monomial, VarId, elementary_symmetric_all
from .tower import (
    TowerSpec,
    equivariant_presentation,
    expected_rank,
    ordinary_presentation,
    psi_pullback,
    twisted_pullback,
    validate,
)

DEFAULT_TABLE_CAP = 720


def _add_term(acc, exps, c):
    c = acc.get(exps, 0) + c
    if c:
        acc[exps] = c
    else:
        acc.pop(exps, None)


@dataclass(frozen=True)
class BasisVector:
    """Coordinates of a class on the engine's standard monomial basis."""

    coords: dict
    equivariant: bool = False

    def expansion(self) -> LaurentPoly:
        out = LaurentPoly.const(0)
        for mono, c in self.coords.items():
            if isinstance(c, LaurentPoly):
                out = out + c * mono
            else:
                if out.mode == "Z" and not isinstance(c, int):
                    out = out.to_mode("Q")
                out = out + LaurentPoly.from_monomial(mono, c, out.mode)
        return out

    def is_zero(self):
        return not self.coords

    def is_integral(self):
        for c in self.coords.values():
            vals = c.raw_terms().values() if isinstance(c, LaurentPoly) else [c]
            if not all(isinstance(x, int) for x in vals):
                return False
        return True

    def to_json(self) -> dict:
        return {str(m): str(c) for m, c in self.coords.items()}

    def __eq__(self, other):
        if not isinstance(other, BasisVector):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(frozenset(self.coords.items()))


class QuotientEngine:
    """Triangular Groebner system for a full-flag type-A tower.

    Use :func:`build_engine`; the instance is immutable after construction.
    """

    def __init__(self, tower: TowerSpec, mode: str = "ordinary", *, self_check=True):
        if mode not in ("ordinary", "equivariant"):
            raise ArgumentError(f"unknown mode {mode!r}")
        tower = tower if tower.validated else validate(tower)
        for j, s in enumerate(tower.stages, 1):
            if s.family != "A" or not s.is_borel:
                raise UnsupportedError(
                    f"stage {j} ({s.describe()}): the exact engine handles full-flag type A only"
                )
        self.tower = tower
        self.mode = mode
        self.equivariant = mode == "equivariant"
        ys = tower.variables()
        self.y_vars = ys
        self.u_vars = [VarId(k.stage, k.index, Kind.U) for k in ys] if self.equivariant else []
        self.all_vars = ys + self.u_vars
        self.pos = {k: n for n, k in enumerate(self.all_vars)}
        self.n = len(self.all_vars)
        self.ny = len(ys)
        self._zero = (0,) * self.n
        self.caps = {}
        self.tails = {}
        self._powers = {}
        self._unit_shift = {}
        self._rows = []
        # reduction order: top stage first, high index first
        self._order = []
        for j in range(tower.r, 0, -1):
            m = tower.stage(j).m
            for i in range(m, 0, -1):
                self._order.append(self.pos[VarId(j, i, Kind.Y)])
        for j in range(1, tower.r + 1):
            self._build_stage(j)
        self.basis = self._standard_monomials()
        self._nf_cache = {}
        self._inverse = {}
        if self_check:
            self._self_check()

    # -- conversion ------------------------------------------------------
    def to_internal(self, p: LaurentPoly) -> dict:
        out = {}
        for mono, c in p.raw_terms().items():
            exps = [0] * self.n
            for k, e in mono.items():
                n = self.pos.get(k)
                if n is None:
                    if k.kind == Kind.U and not self.equivariant:
                        raise ArgumentError(f"{k}: u-variables are not allowed in ordinary mode")
                    raise ArgumentError(f"{k} is not a variable of this tower")
                exps[n] = e
            _add_term(out, tuple(exps), c)
        return out

    def _monomial(self, exps) -> Monomial:
        return Monomial((self.all_vars[n], e) for n, e in enumerate(exps) if e)

    def from_internal(self, d: dict) -> LaurentPoly:
        mode = "Z" if all(isinstance(c, int) for c in d.values()) else "Q"
        return LaurentPoly({self._monomial(e): c for e, c in d.items()}, mode)

    # -- construction ------------------------------------------------------
    def _stage_images(self, j):
        t = self.tower
        pull = twisted_pullback if self.equivariant else psi_pullback
        m = t.stage(j).m
        return [pull(t, j, LaurentPoly.from_var(VarId(j, i, Kind.Y))) for i in range(1, m + 1)]

    def _build_stage(self, j):
        m = self.tower.stage(j).m
        images = self._stage_images(j)
        prod_image = LaurentPoly.const(1)
        for img in images:
            prod_image = prod_image * img
        ((unit, _),) = prod_image.raw_terms().items()
        shift = [0] * self.n
        for k, e in unit.items():
            shift[self.pos[k]] = e
        self._unit_shift[j] = tuple(shift)

        es = elementary_symmetric_all(images)
        # f(t) = sum a[d] t^d, a[m] = 1
        a = [None] * (m + 1)
        a[m] = {self._zero: 1}
        for k in range(1, m + 1):
            ck = self.reduce(self.clear_inverses_internal(self.to_internal(es[k])))
            a[m - k] = {e: (-1) ** k * c for e, c in ck.items()}
        for i in range(1, m + 1):
            x = self.pos[VarId(j, i, Kind.Y)]
            d = len(a) - 1
            tail = {}
            for deg in range(d):
                for e, c in a[deg].items():
                    e2 = list(e)
                    e2[x] += deg
                    _add_term(tail, tuple(e2), -c)
            tail = self.reduce(tail)
            self.caps[x] = d
            self.tails[x] = tail
            self._powers[x] = {d: tail}
            lead = [0] * self.n
            lead[x] = d
            g = {tuple(lead): 1}
            for e, c in tail.items():
                _add_term(g, e, -c)
            self._rows.append(((j, i), self.from_internal(g)))
            # synthetic division of f by (t - y[j,i])
            b = [None] * d
            b[d - 1] = a[d]
            for k in range(d - 1, 0, -1):
                shifted = {}
                for e, c in b[k].items():
                    e2 = list(e)
                    e2[x] += 1
                    _add_term(shifted, tuple(e2), c)
                acc = dict(a[k])
                for e, c in shifted.items():
                    _add_term(acc, e, c)
                b[k - 1] = self.reduce(acc)
            a = b

    def _standard_monomials(self):
        ranges = []
        for j in range(1, self.tower.r + 1):
            m = self.tower.stage(j).m
            for i in range(1, m + 1):
                ranges.append(range(m - i + 1))
        out = []
        for combo in itertools.product(*reversed(ranges)):
            exps = tuple(reversed(combo)) + (0,) * (self.n - self.ny)
            out.append(exps)
        return [self._monomial(e) for e in out]

    def _self_check(self):
        pres = self.presentation()
        for rel in pres.relations:
            if not self.normal_form(rel).is_zero():
                raise ConsistencyError(f"relation {rel} does not reduce to zero")
        if len(self.basis) != expected_rank(self.tower):
            raise ConsistencyError("basis size differs from the expected rank")

    def presentation(self):
        if self.equivariant:
            return equivariant_presentation(self.tower)
        return ordinary_presentation(self.tower)

    # -- reduction -------------------------------------------------------
    def _power(self, x, k):
        table = self._powers[x]
        if k in table:
            return table[k]
        cap = self.caps[x]
        top = max(table)
        cur = table[top]
        for step in range(top + 1, k + 1):
            nxt = {}
            for e, c in cur.items():
                if e[x] + 1 == cap:
                    rest = list(e)
                    rest[x] = 0
                    for e2, c2 in self.tails[x].items():
                        _add_term(nxt, tuple(p + q for p, q in zip(rest, e2)), c * c2)
                else:
                    e2 = list(e)
                    e2[x] += 1
                    _add_term(nxt, tuple(e2), c)
            table[step] = nxt
            cur = nxt
        return table[k]

    def reduce(self, d: dict) -> dict:
        """Remainder of a polynomial (no negative Y exponents) under the rows built so far."""
        for x in self._order:
            cap = self.caps.get(x)
            if cap is None:
                continue
            if not any(e[x] >= cap for e in d):
                continue
            out = {}
            for e, c in d.items():
                k = e[x]
                if k < cap:
                    _add_term(out, e, c)
                    continue
                rest = list(e)
                rest[x] = 0
                for e2, c2 in self._power(x, k).items():
                    _add_term(out, tuple(p + q for p, q in zip(rest, e2)), c * c2)
            d = out
        return d

    def clear_inverses_internal(self, d: dict) -> dict:
        t = self.tower
        offset = {}
        n = 0
        for j in range(1, t.r + 1):
            offset[j] = n
            n += t.stage(j).m
        for j in range(t.r, 0, -1):
            lo, hi = offset[j], offset[j] + t.stage(j).m
            if not any(min(e[lo:hi]) < 0 for e in d):
                continue
            shift = self._unit_shift.get(j)
            if shift is None:
                raise ConsistencyError(f"stage {j} is not built yet")
            out = {}
            for e, c in d.items():
                k = -min(e[lo:hi])
                if k > 0:
                    e = tuple(
                        v + k if lo <= p < hi else v - k * shift[p] for p, v in enumerate(e)
                    )
                _add_term(out, e, c)
            d = out
        return d

    def clear_inverses(self, p: LaurentPoly) -> LaurentPoly:
        """A representative of p's class with no negative Y exponents."""
        return self.from_internal(self.clear_inverses_internal(self.to_internal(p)))

    def _inverse_nf(self, x):
        if x not in self._inverse:
            e = [0] * self.n
            e[x] = -1
            self._inverse[x] = self.reduce(self.clear_inverses_internal({tuple(e): 1}))
        return self._inverse[x]

    def _monomial_nf(self, ey):
        """Remainder of a pure Y monomial, memoized; built one variable step at a time."""
        hit = self._nf_cache.get(ey)
        if hit is not None:
            return hit
        for x in self._order:
            k = ey[x]
            if k < 0 or k >= self.caps[x]:
                break
        else:
            return {ey + (0,) * (self.n - self.ny): 1}
        step = 1 if k < 0 else -1
        sub = list(ey)
        sub[x] += step
        prev = self._monomial_nf(tuple(sub))
        if step < 0:
            prod = {}
            for e, c in prev.items():
                e2 = list(e)
                e2[x] += 1
                prod[tuple(e2)] = c
        else:
            prod = {}
            for e, c in prev.items():
                for e2, c2 in self._inverse_nf(x).items():
                    _add_term(prod, tuple(p + q for p, q in zip(e, e2)), c * c2)
        out = self.reduce(prod)
        self._nf_cache[ey] = out
        return out

    def reduce_poly(self, p: LaurentPoly) -> dict:
        out = {}
        ny = self.ny
        for e, c in self.to_internal(p).items():
            scalar = e[ny:]
            for e2, c2 in self._monomial_nf(e[:ny]).items():
                key = e2[:ny] + tuple(p + q for p, q in zip(scalar, e2[ny:]))
                _add_term(out, key, c * c2)
        return out

    def normal_form(self, p: LaurentPoly) -> BasisVector:
        d = self.reduce_poly(p)
        coords = {}
        if not self.equivariant:
            for e, c in d.items():
                coords[self._monomial(e)] = c
            return BasisVector(coords, False)
        grouped = {}
        for e, c in d.items():
            base = e[: self.ny] + (0,) * (self.n - self.ny)
            coef = (0,) * self.ny + e[self.ny :]
            grouped.setdefault(base, {})[coef] = c
        for base, part in grouped.items():
            coords[self._monomial(base)] = self.from_internal(part)
        return BasisVector(coords, True)

    def rows(self):
        """[((j, i), g[j,i])] in construction order."""
        return list(self._rows)

    def __repr__(self):
        return f"QuotientEngine(rank={len(self.basis)}, mode={self.mode!r})"


def build_engine(t: TowerSpec, mode: str = "ordinary") -> QuotientEngine:
    return QuotientEngine(t, mode)


def normal_form(e: QuotientEngine, p: LaurentPoly) -> BasisVector:
    return e.normal_form(p)


def clear_inverses(e: QuotientEngine, p: LaurentPoly) -> LaurentPoly:
    return e.clear_inverses(p)


def table_cap():
    env = os.environ.get("KFLAG_TABLE_CAP")
    return int(env) if env else DEFAULT_TABLE_CAP


@dataclass(frozen=True)
class MultTable:
    basis: tuple
    table: tuple  # table[a][b] = BasisVector of basis[a] * basis[b]

    def to_json(self):
        return {
            "basis": [str(m) for m in self.basis],
            "table": [[vec.to_json() for vec in row] for row in self.table],
        }


def mult_table(e: QuotientEngine, cap: int | None = None) -> MultTable:
    cap = table_cap() if cap is None else cap
    size = len(e.basis)
    if size > cap:
        raise SizeError(f"basis has {size} elements, above the structure-constant cap {cap}")
    polys = [LaurentPoly.from_monomial(m) for m in e.basis]
    rows = [[None] * size for _ in range(size)]
    for a in range(size):
        for b in range(a, size):
            vec = e.normal_form(polys[a] * polys[b])
            rows[a][b] = rows[b][a] = vec
    return MultTable(tuple(e.basis), tuple(tuple(r) for r in rows))
