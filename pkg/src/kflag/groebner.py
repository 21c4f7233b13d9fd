"""Buchberger's algorithm over Q, used to check ranks and as a normal-form oracle.

A Laurent presentation is first written as an ordinary polynomial ideal:

* each variable that has to be inverted gets a companion ``x~`` and the
  relation ``x*x~ - 1``;
* a spin stage gets one extra variable ``h[j]`` for the half character
  (y[j,1]...y[j,m])^(1/2), with ``h[j]^2 - y[j,1]...y[j,m]``;
* a type-A stage with a non-trivial parabolic is written in the block
  elementary symmetric functions ``z[j,p,k]``.

The monomial order is block degrevlex with one block per stage, top stage
first.
"""

from __future__ import annotations

import heapq
import itertools
import operator
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction

try:
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover
    QQ = Fraction

from .errors import EncodingError, ResourceError
from .laurent import (
    Kind,
    LaurentPoly,
    Monomial,
    VarId,
    doubled_exponents,
    elementary_symmetric_all,
)
from .tower import TowerSpec, expected_rank, ordinary_presentation, psi_pullback, validate

DEFAULT_MAX_TERMS = 10**6
DEFAULT_MAX_PAIRS = 10**5


def resource_caps():
    """(max monomials in flight, max S-pairs); KFLAG_RESOURCE_CAP overrides both."""
    env = os.environ.get("KFLAG_RESOURCE_CAP")
    if env:
        cap = int(env)
        return cap, cap
    return DEFAULT_MAX_TERMS, DEFAULT_MAX_PAIRS


# ---------------------------------------------------------------------------
# monomial order


class BlockDegrevlex:
    def __init__(self, blocks):
        self.blocks = [tuple(b) for b in blocks]
        self._cache = {}

    def key(self, e):
        k = self._cache.get(e)
        if k is None:
            parts = []
            for b in self.blocks:
                vals = [e[i] for i in b]
                parts.append(sum(vals))
                parts.extend(-x for x in reversed(vals))
            k = tuple(parts)
            self._cache[e] = k
        return k

    def neg_key(self, e):
        return tuple(-x for x in self.key(e))

    def describe(self):
        return {"order": "block-degrevlex", "blocks": [list(b) for b in self.blocks]}


_add = operator.add
_le = operator.le


def _divides(a, b):
    return all(map(_le, a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _coprime(a, b):
    return all(not (x and y) for x, y in zip(a, b))


def _sub(a, b):
    return tuple(map(operator.sub, a, b))


# ---------------------------------------------------------------------------
# encoding


@dataclass
class PolyRingEncoding:
    """A Laurent presentation rewritten as a polynomial ideal over Q."""

    names: list
    roles: list  # per position: ("y", VarId) | ("inv", VarId) | ("half", j) | ("z", j, p, k) | ("zinv", j, p)
    order: BlockDegrevlex
    relations: list = field(default_factory=list)
    tower: TowerSpec | None = None
    _pos: dict = field(default_factory=dict, repr=False)

    @property
    def nvars(self):
        return len(self.names)

    def position(self, role):
        return self._pos.get(role)

    def _put(self, exps, role, e):
        if e == 0:
            return
        if e > 0:
            n = self._pos.get(role)
            if n is None:
                raise EncodingError(f"no encoding variable for {role}")
            exps[n] += e
            return
        inv_role = ("inv", role[1]) if role[0] == "y" else ("zinv",) + role[1:3]
        n = self._pos.get(inv_role)
        if n is None:
            raise EncodingError(f"{self._role_name(role)} has no inverse companion in this encoding")
        exps[n] += -e

    def _role_name(self, role):
        n = self._pos.get(role)
        return self.names[n] if n is not None else str(role)

    def encode_monomial(self, mono: Monomial):
        t = self.tower
        exps = [0] * self.nvars
        for k, _ in mono.items():
            if k.kind in (Kind.U, Kind.V):
                raise EncodingError(f"{k}: equivariant variables cannot be encoded")
            if not 1 <= k.stage <= t.r:
                raise EncodingError(f"{k} is not a variable of this tower")
        for j, s in enumerate(t.stages, 1):
            h = doubled_exponents(mono, j, s.m)
            if not any(h):
                continue
            if s.is_spin:
                parity = {x % 2 for x in h}
                if len(parity) > 1:
                    raise EncodingError(f"monomial {mono} is off the spin lattice of stage {j}")
                odd = parity.pop()
                if odd:
                    exps[self._pos[("half", j)]] += 1
                for i, x in enumerate(h, 1):
                    self._put(exps, ("y", VarId(j, i, Kind.Y)), (x - odd) // 2)
            elif s.is_borel:
                for i, x in enumerate(h, 1):
                    self._put(exps, ("y", VarId(j, i, Kind.Y)), x // 2)
            else:
                for p, block in enumerate(s.block_ranges(), 1):
                    vals = {h[i] for i in block}
                    if len(vals) > 1:
                        raise EncodingError(
                            f"monomial {mono} is not symmetric in block {p} of stage {j}"
                        )
                    self._put(exps, ("z", j, p, len(block)), vals.pop() // 2)
        return tuple(exps)

    def encode(self, p: LaurentPoly) -> dict:
        out = {}
        for (zexps, mono), c in self._symmetrize(p).items():
            e = self.encode_monomial(mono)
            if any(zexps):
                acc = list(e)
                for role, k in zexps:
                    self._put(acc, role, k)
                e = tuple(acc)
            c = out.get(e, 0) + QQ(c)
            if c:
                out[e] = c
            else:
                out.pop(e, None)
        return out

    def _symmetrize(self, p: LaurentPoly) -> dict:
        """Rewrite the non-Borel stages of ``p`` in block elementary symmetric functions.

        Returns ``{(z-exponents, rest monomial): coeff}`` where z-exponents is a
        tuple of ``(role, exponent)`` pairs.
        """
        items = {((), mono): c for mono, c in p.raw_terms().items()}
        t = self.tower
        if t is None:
            return items
        for j, s in enumerate(t.stages, 1):
            if s.is_borel:
                continue
            for bp, block in enumerate(s.block_ranges(), 1):
                keys = [VarId(j, i + 1, Kind.Y) for i in block]
                groups: dict = {}
                for (zexps, mono), c in items.items():
                    d = mono.as_dict()
                    exps = tuple(d.pop(k, 0) for k in keys)
                    if any(kk.stage == j and kk.kind == Kind.W for kk in d):
                        raise EncodingError(f"{mono}: square roots on a non-spin stage")
                    key = (zexps, Monomial(d))
                    g = groups.setdefault(key, {})
                    g[exps] = g.get(exps, 0) + c
                items = {}
                for (zexps, rest), poly in groups.items():
                    for powers, c in _symmetric_reduce(poly, j, bp).items():
                        extra = tuple(
                            (("z", j, bp, k), e) for k, e in enumerate(powers, 1) if e
                        )
                        key = (zexps + extra, rest)
                        c = items.get(key, 0) + c
                        if c:
                            items[key] = c
                        else:
                            items.pop(key, None)
        return items

    def decode_monomial(self, exps) -> LaurentPoly:
        t = self.tower
        result = LaurentPoly.const(1)
        mono = {}
        for n, e in enumerate(exps):
            if not e:
                continue
            role = self.roles[n]
            if role[0] == "y":
                mono[role[1]] = mono.get(role[1], 0) + e
            elif role[0] == "inv":
                mono[role[1]] = mono.get(role[1], 0) - e
            elif role[0] == "half":
                j = role[1]
                for i in range(1, t.stage(j).m + 1):
                    key = VarId(j, i, Kind.W)
                    mono[key] = mono.get(key, 0) + e
            elif role[0] == "z":
                result = result * _block_e(t, *role[1:]) ** e
            else:
                _, j, p = role
                result = result * _block_e(t, j, p, t.stage(j).blocks[p - 1]) ** (-e)
        return result * Monomial(mono)

    def decode(self, d: dict) -> LaurentPoly:
        out = LaurentPoly.const(0, "Q")
        for e, c in d.items():
            out = out + self.decode_monomial(e).to_mode("Q") * Fraction(int(c.numerator), int(c.denominator))
        return out

    def render_monomial(self, exps):
        parts = [self.names[n] if e == 1 else f"{self.names[n]}^{e}" for n, e in enumerate(exps) if e]
        return "*".join(parts) if parts else "1"


_E_PRODUCTS: dict = {}


def _e_product(powers):
    """prod_k e_k(x_1..x_b)^powers[k-1] as {exponent tuple: int}."""
    hit = _E_PRODUCTS.get(powers)
    if hit is not None:
        return hit
    b = len(powers)
    out = {(0,) * b: 1}
    for k, n in enumerate(powers, 1):
        ek = {}
        for idx in itertools.combinations(range(b), k):
            e = [0] * b
            for i in idx:
                e[i] = 1
            ek[tuple(e)] = 1
        for _ in range(n):
            nxt: dict = {}
            for e1, c1 in out.items():
                for e2 in ek:
                    e = tuple(map(operator.add, e1, e2))
                    nxt[e] = nxt.get(e, 0) + c1
            out = nxt
    _E_PRODUCTS[powers] = out
    return out


def _symmetric_reduce(poly: dict, j, bp) -> dict:
    """Write a symmetric Laurent polynomial in block variables as a polynomial in
    e_1..e_b, allowing a negative power of e_b. Returns {powers: coeff}."""
    poly = {e: c for e, c in poly.items() if c}
    if not poly:
        return {}
    b = len(next(iter(poly)))
    shift = min(min(e) for e in poly)
    if shift < 0:
        poly = {tuple(x - shift for x in e): c for e, c in poly.items()}
    out = {}
    while poly:
        lead = max(poly)
        if any(lead[i] < lead[i + 1] for i in range(b - 1)):
            raise EncodingError(f"polynomial is not symmetric in block {bp} of stage {j}")
        c = poly[lead]
        powers = tuple(lead[i] - lead[i + 1] for i in range(b - 1)) + (lead[-1],)
        out[powers] = out.get(powers, 0) + c
        for e, v in _e_product(powers).items():
            val = poly.get(e, 0) - c * v
            if val:
                poly[e] = val
            else:
                poly.pop(e, None)
    if shift < 0:
        out = {p[:-1] + (p[-1] + shift,): c for p, c in out.items()}
    return out


def _block_e(t, j, p, k):
    s = t.stage(j)
    block = s.block_ranges()[p - 1]
    ys = [VarId(j, i + 1, Kind.Y) for i in block]
    return elementary_symmetric_all(ys)[k]


def _negative_roles(t, polys):
    """Roles whose variable occurs with a negative exponent in ``polys``."""
    need = set()
    for p in polys:
        for mono in p.monomials():
            for j, s in enumerate(t.stages, 1):
                h = doubled_exponents(mono, j, s.m)
                if not any(h):
                    continue
                if s.is_spin:
                    odd = h[0] % 2
                    for i, x in enumerate(h, 1):
                        if (x - odd) // 2 < 0:
                            need.add(("y", VarId(j, i, Kind.Y)))
                elif s.is_borel:
                    for i, x in enumerate(h, 1):
                        if x < 0:
                            need.add(("y", VarId(j, i, Kind.Y)))
                else:
                    for p_, block in enumerate(s.block_ranges(), 1):
                        if h[block[0]] < 0:
                            need.add(("z", j, p_, len(block)))
    return need


def encode_presentation(t: TowerSpec, *, inverses="auto") -> PolyRingEncoding:
    """Encode the ordinary presentation of ``t`` as a polynomial ideal.

    ``inverses="auto"`` adds companions only for variables that occur with
    negative exponents in the relations; ``"all"`` adds one for every
    invertible generator, so any Laurent polynomial can be encoded.
    """
    t = t if t.validated else validate(t)
    pres = ordinary_presentation(t)
    # right-hand sides carry the negative exponents for non-Borel stages
    laurent_parts = []
    for j, s in enumerate(t.stages, 1):
        rels = pres.stage_relations(j)
        if s.is_borel:
            laurent_parts.extend(rels)
        else:
            for k, es in enumerate(elementary_symmetric_all(_stage_ys(s, j))[1:], 1):
                laurent_parts.append(psi_pullback(t, j, es))
    need = _negative_roles(t, laurent_parts)

    names, roles, blocks = [], [], []
    for j in range(t.r, 0, -1):
        s = t.stage(j)
        start = len(names)
        if s.is_borel:
            ys = _stage_ys(s, j)
            for k in ys:
                names.append(str(k))
                roles.append(("y", k))
            for k in ys:
                if inverses == "all" or ("y", k) in need:
                    names.append(f"{k}~")
                    roles.append(("inv", k))
            if s.is_spin:
                names.append(f"h[{j}]")
                roles.append(("half", j))
        else:
            for p, block in enumerate(s.block_ranges(), 1):
                for k in range(1, len(block) + 1):
                    names.append(f"z[{j},{p},{k}]")
                    roles.append(("z", j, p, k))
            for p, block in enumerate(s.block_ranges(), 1):
                if inverses == "all" or ("z", j, p, len(block)) in need:
                    names.append(f"z[{j},{p},{len(block)}]~")
                    roles.append(("zinv", j, p))
        blocks.append(range(start, len(names)))
    enc = PolyRingEncoding(names, roles, BlockDegrevlex(blocks), [], t)
    enc._pos = {role: n for n, role in enumerate(roles)}

    relations = []
    for j, s in enumerate(t.stages, 1):
        if s.is_borel:
            for rel in pres.stage_relations(j):
                relations.append(enc.encode(rel))
        else:
            for k, es in enumerate(elementary_symmetric_all(_stage_ys(s, j))[1:], 1):
                lhs = _block_convolution(enc, s, j, k)
                rhs = enc.encode(psi_pullback(t, j, es))
                for e, c in rhs.items():
                    lhs[e] = lhs.get(e, 0) - c
                relations.append({e: c for e, c in lhs.items() if c})
    for n, role in enumerate(roles):
        if role[0] == "inv":
            base = enc._pos[("y", role[1])]
        elif role[0] == "zinv":
            base = enc._pos[("z", role[1], role[2], t.stage(role[1]).blocks[role[2] - 1])]
        else:
            continue
        e = [0] * enc.nvars
        e[base] = e[n] = 1
        relations.append({tuple(e): QQ(1), (0,) * enc.nvars: QQ(-1)})
    for j, s in enumerate(t.stages, 1):
        if s.is_spin:
            sq = [0] * enc.nvars
            sq[enc._pos[("half", j)]] = 2
            prod_ = [0] * enc.nvars
            for k in _stage_ys(s, j):
                prod_[enc._pos[("y", k)]] = 1
            relations.append({tuple(sq): QQ(1), tuple(prod_): QQ(-1)})
    enc.relations = [r for r in relations if r]
    return enc


def _stage_ys(s, j):
    return [VarId(j, i, Kind.Y) for i in range(1, s.m + 1)]


def _block_convolution(enc, s, j, k):
    """e_k(y_j) written in block elementary symmetric variables."""
    sizes = list(s.blocks)
    out = {}

    def rec(p, remaining, exps):
        if p == len(sizes):
            if remaining == 0:
                key = tuple(exps)
                out[key] = out.get(key, 0) + QQ(1)
            return
        for kp in range(0, min(sizes[p], remaining) + 1):
            if kp:
                exps[enc._pos[("z", j, p + 1, kp)]] += 1
            rec(p + 1, remaining - kp, exps)
            if kp:
                exps[enc._pos[("z", j, p + 1, kp)]] -= 1

    rec(0, k, [0] * enc.nvars)
    return out


# ---------------------------------------------------------------------------
# Buchberger


@dataclass
class GroebnerBasis:
    polys: list  # reduced, monic; dict exps -> rational
    leading: list
    encoding: PolyRingEncoding
    standard_monomials: list | None  # None when infinite
    stats: dict = field(default_factory=dict)
    _reducer_cache: dict = field(default_factory=dict, repr=False, compare=False)
    _remainders: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def is_finite(self):
        return self.standard_monomials is not None

    def __len__(self):
        return len(self.polys)

    def render(self):
        return [_render_poly(self.encoding, p) for p in self.polys]


def _render_poly(enc, p):
    items = sorted(p.items(), key=lambda kv: enc.order.neg_key(kv[0]))
    if not items:
        return "0"
    out = []
    for n, (e, c) in enumerate(items):
        mono = enc.render_monomial(e)
        a = abs(c)
        body = str(a) if mono == "1" else (mono if a == 1 else f"{a}*{mono}")
        if n == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


class _Reducer:
    def __init__(self, order, max_terms):
        self.order = order
        self.max_terms = max_terms
        self.in_flight = 0

    def lead(self, p):
        return max(p, key=self.order.key)

    def reduce(self, p, basis, *, progress=None, cache=None):
        """Remainder of ``p`` modulo ``basis`` = [(lm, poly)], polys monic.

        ``cache`` maps monomials to their reducer and is only valid for one
        fixed basis.
        """
        p = dict(p)
        neg_key = self.order.neg_key
        heap = [(neg_key(e), e) for e in p]
        heapq.heapify(heap)
        rem = {}
        while heap:
            _, m = heapq.heappop(heap)
            c = p.pop(m, None)
            if c is None:
                continue
            if cache is not None and m in cache:
                found = cache[m]
            else:
                found = next(((lm, g) for lm, g in basis if _divides(lm, m)), None)
                if cache is not None:
                    cache[m] = found
            if found is not None:
                lm, g = found
                q = _sub(m, lm)
                for ge, gc in g.items():
                    if ge == lm:
                        continue
                    mm = tuple(map(_add, ge, q))
                    old = p.get(mm)
                    if old is None:
                        p[mm] = -c * gc
                        heapq.heappush(heap, (neg_key(mm), mm))
                    else:
                        new = old - c * gc
                        if new:
                            p[mm] = new
                        else:
                            del p[mm]
            else:
                rem[m] = c
            if len(p) + len(rem) > self.max_terms:
                raise ResourceError(
                    "Groebner computation exceeded the monomial cap", progress or {}
                )
        return rem


def _monic(p, lm):
    c = p[lm]
    if c == 1:
        return p
    return {e: v / c for e, v in p.items()}


def buchberger(enc: PolyRingEncoding, *, max_terms=None, max_pairs=None) -> GroebnerBasis:
    """Reduced Groebner basis of the encoded ideal under its block degrevlex order."""
    caps = resource_caps()
    max_terms = caps[0] if max_terms is None else max_terms
    max_pairs = caps[1] if max_pairs is None else max_pairs
    order = enc.order
    key = order.key
    red = _Reducer(order, max_terms)
    polys, lms = [], []
    active = []
    pairs = []  # heap of (key(lcm), i, j)
    stats = {"pairs_processed": 0, "pairs_skipped": 0, "reductions_to_zero": 0}

    def progress():
        return {
            "basis_size": len(active),
            "pairs_processed": stats["pairs_processed"],
            "pairs_pending": len(pairs),
        }

    def update(h):
        nonlocal pairs
        lm_h = lms[h]
        cands = [(g, _lcm(lm_h, lms[g])) for g in active]
        kept = []
        while cands:
            g1, l1 = cands.pop(0)
            if _coprime(lm_h, lms[g1]) or not any(
                _divides(l2, l1) for _, l2 in cands + kept
            ):
                kept.append((g1, l1))
        new_pairs = [(g, l) for g, l in kept if not _coprime(lm_h, lms[g])]
        stats["pairs_skipped"] += len(active) - len(new_pairs)
        survivors = []
        for k, i, j in pairs:
            l = _lcm(lms[i], lms[j])
            if (
                _divides(lm_h, l)
                and _lcm(lms[i], lm_h) != l
                and _lcm(lms[j], lm_h) != l
            ):
                stats["pairs_skipped"] += 1
                continue
            survivors.append((k, i, j))
        for g, l in new_pairs:
            survivors.append((key(l), g, h))
        heapq.heapify(survivors)
        pairs = survivors
        active[:] = [g for g in active if not _divides(lm_h, lms[g])] + [h]

    def add(p):
        lm = red.lead(p)
        p = _monic(p, lm)
        polys.append(p)
        lms.append(lm)
        update(len(polys) - 1)

    def basis_view():
        return [(lms[g], polys[g]) for g in active]

    inputs = [dict(r) for r in enc.relations if r]
    inputs.sort(key=lambda p: key(red.lead(p)))
    for f in inputs:
        h = red.reduce(f, basis_view(), progress=progress())
        if h:
            add(h)
    while pairs:
        if stats["pairs_processed"] >= max_pairs:
            raise ResourceError("Groebner computation exceeded the S-pair cap", progress())
        _, i, j = heapq.heappop(pairs)
        stats["pairs_processed"] += 1
        f, g = polys[i], polys[j]
        l = _lcm(lms[i], lms[j])
        qi, qj = _sub(l, lms[i]), _sub(l, lms[j])
        s = {}
        for e, c in f.items():
            mm = tuple(map(_add, e, qi))
            s[mm] = s.get(mm, 0) + c
        for e, c in g.items():
            mm = tuple(map(_add, e, qj))
            s[mm] = s.get(mm, 0) - c
        s = {e: c for e, c in s.items() if c}
        h = red.reduce(s, basis_view(), progress=progress())
        if h:
            add(h)
        else:
            stats["reductions_to_zero"] += 1
        if sum(len(polys[g]) for g in active) > max_terms:
            raise ResourceError("Groebner computation exceeded the monomial cap", progress())

    # minimal, then inter-reduced
    minimal = [g for g in active if not any(o != g and _divides(lms[o], lms[g]) for o in active)]
    final = []
    for g in minimal:
        others = [(lms[o], polys[o]) for o in minimal if o != g]
        lm = lms[g]
        tail = {e: c for e, c in polys[g].items() if e != lm}
        reduced = red.reduce(tail, others)
        reduced[lm] = QQ(1)
        final.append((lm, reduced))
    final.sort(key=lambda item: order.neg_key(item[0]))
    leading = [lm for lm, _ in final]
    std = _standard_monomials(leading, enc.nvars, order)
    stats["basis_size"] = len(final)
    return GroebnerBasis([p for _, p in final], leading, enc, std, stats)


def _standard_monomials(leading, nvars, order, limit=10**6):
    if any(not any(lm) for lm in leading):
        return []
    for v in range(nvars):
        if not any(lm[v] and sum(lm) == lm[v] for lm in leading):
            return None
    seen = {(0,) * nvars}
    frontier = [(0,) * nvars]
    while frontier:
        nxt = []
        for e in frontier:
            for v in range(nvars):
                e2 = e[:v] + (e[v] + 1,) + e[v + 1 :]
                if e2 in seen or any(_divides(lm, e2) for lm in leading):
                    continue
                seen.add(e2)
                nxt.append(e2)
        if len(seen) > limit:
            raise ResourceError("too many standard monomials", {"count": len(seen)})
        frontier = nxt
    return sorted(seen, key=order.key)


def quotient_dimension(gb: GroebnerBasis):
    """Number of standard monomials, or the string ``"infinite"``."""
    if gb.standard_monomials is None:
        return "infinite"
    return len(gb.standard_monomials)


# ---------------------------------------------------------------------------
# oracle


@dataclass(frozen=True)
class OracleVector:
    """Remainder of a division by a Groebner basis, keyed by standard monomial."""

    coords: dict  # exps -> Fraction
    encoding: PolyRingEncoding = field(compare=False, repr=False)

    def to_json(self):
        enc = self.encoding
        return {enc.render_monomial(e): str(c) for e, c in self.coords.items()}

    def as_laurent(self):
        return self.encoding.decode(self.coords)

    def __add__(self, other):
        out = dict(self.coords)
        for e, c in other.coords.items():
            c = out.get(e, 0) + c
            if c:
                out[e] = c
            else:
                out.pop(e, None)
        return OracleVector(out, self.encoding)

    def scale(self, c):
        if not c:
            return OracleVector({}, self.encoding)
        return OracleVector({e: v * c for e, v in self.coords.items()}, self.encoding)


def _monomial_remainder(gb: GroebnerBasis, m, red, basis):
    """Remainder of a single monomial, built as NF(x * NF(m / x)) with memoization."""
    memo = gb._remainders
    hit = memo.get(m)
    if hit is not None:
        return hit
    stack = [m]
    while stack:
        cur = stack[-1]
        if cur in memo:
            stack.pop()
            continue
        if not any(_divides(lm, cur) for lm in gb.leading):
            memo[cur] = {cur: QQ(1)}
            stack.pop()
            continue
        x = max(n for n, e in enumerate(cur) if e)
        prev = cur[:x] + (cur[x] - 1,) + cur[x + 1 :]
        if prev not in memo:
            stack.append(prev)
            continue
        out = {}
        for s_, c in memo[prev].items():
            sx = s_[:x] + (s_[x] + 1,) + s_[x + 1 :]
            part = memo.get(sx)
            if part is None:
                part = red.reduce({sx: QQ(1)}, basis, cache=gb._reducer_cache)
                memo[sx] = part
            for e, v in part.items():
                v = out.get(e, 0) + c * v
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        memo[cur] = out
        stack.pop()
    return memo[m]


def nf_oracle(gb: GroebnerBasis, p: LaurentPoly) -> OracleVector:
    """Remainder of ``p`` on division by ``gb``, keyed by standard monomial."""
    enc = gb.encoding
    red = _Reducer(enc.order, resource_caps()[0])
    basis = list(zip(gb.leading, gb.polys))
    rem = {}
    for m, c in enc.encode(p).items():
        for e, v in _monomial_remainder(gb, m, red, basis).items():
            v = rem.get(e, 0) + c * v
            if v:
                rem[e] = v
            else:
                rem.pop(e, None)
    return OracleVector({e: Fraction(int(c.numerator), int(c.denominator)) for e, c in rem.items()}, enc)


def groebner_for(t: TowerSpec, *, inverses="auto", **caps) -> GroebnerBasis:
    return buchberger(encode_presentation(t, inverses=inverses), **caps)


class EngineAlignment:
    """Compares exact-engine coordinates with oracle remainders.

    The oracle images of the engine's basis monomials give the change of
    basis; a class agrees when its oracle remainder equals the image of its
    engine coordinates.
    """

    def __init__(self, engine, gb: GroebnerBasis):
        if engine.equivariant:
            raise EncodingError("the oracle works with ordinary presentations only")
        self.engine = engine
        self.gb = gb
        self.images = {
            mono: nf_oracle(gb, LaurentPoly.from_monomial(mono)) for mono in engine.basis
        }

    def transport(self, vec) -> OracleVector:
        out = OracleVector({}, self.gb.encoding)
        for mono, c in vec.coords.items():
            out = out + self.images[mono].scale(Fraction(c))
        return out

    def agrees(self, p: LaurentPoly) -> bool:
        return self.transport(self.engine.normal_form(p)) == nf_oracle(self.gb, p)


@dataclass
class RankReport:
    tower: str
    expected: int
    computed: object
    passed: bool
    basis_size: int
    elapsed_ms: int
    engine: str = "groebner"

    def to_json(self):
        return {
            "tower": self.tower,
            "expected": self.expected,
            "computed": self.computed,
            "pass": self.passed,
            "basis_size": self.basis_size,
            "elapsed_ms": self.elapsed_ms,
        }


def verify_rank(t: TowerSpec, **caps) -> RankReport:
    """Compare the Q-dimension of the ordinary presentation with the expected rank."""
    t = t if t.validated else validate(t)
    start = time.perf_counter()
    gb = groebner_for(t, **caps)
    computed = quotient_dimension(gb)
    expected = expected_rank(t)
    elapsed = int((time.perf_counter() - start) * 1000)
    return RankReport(t.digest(), expected, computed, computed == expected, len(gb), elapsed)


__all__ = [
    "BlockDegrevlex",
    "EngineAlignment",
    "GroebnerBasis",
    "OracleVector",
    "PolyRingEncoding",
    "RankReport",
    "buchberger",
    "encode_presentation",
    "groebner_for",
    "nf_oracle",
    "quotient_dimension",
    "verify_rank",
]
