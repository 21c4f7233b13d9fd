"""Sparse exact Laurent polynomials over a typed variable universe.

Variables are ``y[j,i]`` (fiber generators), ``u[j,i]`` (equivariant base
generators), ``w[j,i]`` with ``w[j,i]^2 = y[j,i]`` (spin square roots) and
``v[j,i]`` with ``v[j,i]^2 = u[j,i]`` (their equivariant counterparts).

Monomials are kept in a canonical form where every square-root exponent is
0 or 1; even powers are folded into the partner variable on construction, so
``w^2`` and ``y`` are the same monomial.
"""

from __future__ import annotations

from enum import IntEnum
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from .errors import ArgumentError, EvaluationError, ModeError, UnitError


class Kind(IntEnum):
    Y = 0
    U = 1
    W = 2
    V = 3


# square-root kind -> kind of its square
SQUARE_OF = {Kind.W: Kind.Y, Kind.V: Kind.U}


class VarId(NamedTuple):
    stage: int
    index: int
    kind: Kind = Kind.Y

    def __str__(self):
        return f"{self.kind.name.lower()}[{self.stage},{self.index}]"


def var(kind, stage, index):
    if isinstance(kind, str):
        try:
            kind = Kind[kind.upper()]
        except KeyError:
            raise ArgumentError(f"unknown variable kind {kind!r}") from None
    if stage < 1 or index < 1:
        raise ArgumentError(f"variable indices must be positive, got [{stage},{index}]")
    return VarId(stage, index, Kind(kind))


def y(stage, index):
    return var(Kind.Y, stage, index)


def u(stage, index):
    return var(Kind.U, stage, index)


def w(stage, index):
    return var(Kind.W, stage, index)


def v(stage, index):
    return var(Kind.V, stage, index)


def _canonical(exps: dict) -> tuple:
    if any(k.kind >= 2 for k in exps):
        for key in [k for k in exps if k.kind >= 2]:
            q, r = divmod(exps[key], 2)
            if q:
                partner = VarId(key.stage, key.index, SQUARE_OF[key.kind])
                exps[partner] = exps.get(partner, 0) + q
            exps[key] = r
    return tuple(sorted((k, e) for k, e in exps.items() if e))


class Monomial:
    """Laurent monomial: an immutable map VarId -> nonzero integer exponent."""

    __slots__ = ("_items", "_hash")

    def __init__(self, exponents: Mapping | Iterable = ()):
        if isinstance(exponents, Mapping):
            exponents = exponents.items()
        d: dict = {}
        for key, e in exponents:
            if not isinstance(key, VarId):
                raise ArgumentError(f"not a variable: {key!r}")
            d[key] = d.get(key, 0) + int(e)
        self._items = _canonical(d)
        self._hash = hash(self._items)

    @classmethod
    def _raw(cls, items):
        m = object.__new__(cls)
        m._items = items
        m._hash = hash(items)
        return m

    @classmethod
    def of(cls, key: VarId, exp: int = 1) -> "Monomial":
        return cls({key: exp})

    def items(self):
        return self._items

    def as_dict(self):
        return dict(self._items)

    def variables(self):
        return tuple(k for k, _ in self._items)

    def degree(self, key):
        for k, e in self._items:
            if k == key:
                return e
        return 0

    def is_one(self):
        return not self._items

    def __mul__(self, other):
        if not isinstance(other, Monomial):
            return NotImplemented
        if not other._items:
            return self
        if not self._items:
            return other
        d = dict(self._items)
        for k, e in other._items:
            d[k] = d.get(k, 0) + e
        return Monomial._raw(_canonical(d))

    def __pow__(self, n):
        if n == 0:
            return ONE
        if n == 1:
            return self
        return Monomial._raw(_canonical({k: e * n for k, e in self._items}))

    def inverse(self):
        return self ** -1

    def __truediv__(self, other):
        return self * other.inverse()

    def __eq__(self, other):
        return isinstance(other, Monomial) and self._items == other._items

    def __hash__(self):
        return self._hash

    def __str__(self):
        if not self._items:
            return "1"
        return "*".join(str(k) if e == 1 else f"{k}^{e}" for k, e in self._items)

    def __repr__(self):
        return f"Monomial({self})"


ONE = Monomial()


def doubled_exponents(mono: Monomial, stage: int, m: int, *, equivariant=False):
    """Exponents of ``mono`` on one stage, in half-character units.

    Entry i is ``2*a + b`` where ``a`` is the exponent of y[stage,i] (or u)
    and ``b`` that of w[stage,i] (or v).
    """
    full, half = (Kind.U, Kind.V) if equivariant else (Kind.Y, Kind.W)
    out = [0] * m
    for k, e in mono.items():
        if k.stage != stage:
            continue
        if k.kind == full:
            out[k.index - 1] += 2 * e
        elif k.kind == half:
            out[k.index - 1] += e
    return out


def from_doubled(doubled, stage: int, *, equivariant=False) -> Monomial:
    half = Kind.V if equivariant else Kind.W
    return Monomial((VarId(stage, i + 1, half), h) for i, h in enumerate(doubled) if h)


def on_spin_lattice(mono: Monomial, stage: int, m: int, *, equivariant=False) -> bool:
    """True when the half-exponents on ``stage`` share one parity."""
    parities = {h % 2 for h in doubled_exponents(mono, stage, m, equivariant=equivariant)}
    return len(parities) <= 1


# ---------------------------------------------------------------------------


def _check_coeff(c, mode):
    if mode == "Z":
        if isinstance(c, bool):
            return int(c)
        if isinstance(c, int):
            return c
        if isinstance(c, Fraction) and c.denominator == 1:
            return int(c)
        raise ModeError(f"non-integer coefficient {c!r} in Z-mode")
    if isinstance(c, float):
        raise ModeError("floating point coefficients are not allowed")
    return Fraction(c)


class LaurentPoly:
    """Exact sparse Laurent polynomial.

    ``mode`` is ``"Z"`` (integer coefficients) or ``"Q"`` (rational); mixing
    the two in arithmetic raises :class:`ModeError`.
    """

    __slots__ = ("_terms", "mode", "_hash")

    def __init__(self, terms: Mapping | None = None, mode: str = "Z"):
        if mode not in ("Z", "Q"):
            raise ModeError(f"unknown coefficient mode {mode!r}")
        self.mode = mode
        clean = {}
        if terms:
            for mono, c in terms.items():
                if isinstance(mono, VarId):
                    mono = Monomial.of(mono)
                c = _check_coeff(c, mode)
                if c:
                    c = clean.get(mono, 0) + c
                    if c:
                        clean[mono] = c
                    else:
                        clean.pop(mono, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms, mode):
        p = object.__new__(cls)
        p._terms = terms
        p.mode = mode
        p._hash = None
        return p

    # constructors
    @classmethod
    def const(cls, c, mode="Z"):
        return cls({ONE: c}, mode)

    @classmethod
    def from_var(cls, key: VarId, exp: int = 1, mode="Z"):
        return cls({Monomial.of(key, exp): 1}, mode)

    @classmethod
    def from_monomial(cls, mono: Monomial, coeff=1, mode="Z"):
        return cls({mono: coeff}, mode)

    # access
    def coefficient(self, mono):
        return self._terms.get(mono, 0)

    def monomials(self):
        return list(self._terms)

    def terms(self):
        """(monomial, coefficient) pairs in canonical order."""
        return _sorted_terms(self._terms)

    def raw_terms(self):
        return self._terms

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self):
        return not self._terms

    def is_constant(self):
        return not self._terms or (len(self._terms) == 1 and ONE in self._terms)

    def constant_term(self):
        return self._terms.get(ONE, 0)

    def variables(self):
        out = set()
        for mono in self._terms:
            out.update(mono.variables())
        return sorted(out)

    def stages(self):
        return sorted({k.stage for k in self.variables()})

    def to_mode(self, mode):
        if mode == self.mode:
            return self
        if mode == "Q":
            return LaurentPoly._raw({m: Fraction(c) for m, c in self._terms.items()}, "Q")
        return LaurentPoly(self._terms, "Z")

    def is_unit(self):
        if len(self._terms) != 1:
            return False
        (c,) = self._terms.values()
        return c in (1, -1)

    def as_unit(self):
        """Return ``(sign, monomial)`` for a signed monomial, else raise UnitError."""
        if not self.is_unit():
            raise UnitError(f"not a unit (signed monomial): {self}")
        ((mono, c),) = self._terms.items()
        return int(c), mono

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            if other.mode != self.mode:
                raise ModeError(f"cannot combine {self.mode}-mode and {other.mode}-mode polynomials")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, float):
            return LaurentPoly.const(other, self.mode)
        if isinstance(other, VarId):
            return LaurentPoly.from_var(other, mode=self.mode)
        if isinstance(other, Monomial):
            return LaurentPoly.from_monomial(other, mode=self.mode)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            c = out.get(m, 0) + c
            if c:
                out[m] = c
            else:
                del out[m]
        return LaurentPoly._raw(out, self.mode)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({m: -c for m, c in self._terms.items()}, self.mode)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 * m2
                c = out.get(m, 0) + c1 * c2
                if c:
                    out[m] = c
                else:
                    del out[m]
        return LaurentPoly._raw(out, self.mode)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int):
            raise ArgumentError("exponent must be an integer")
        if n < 0:
            sign, mono = self.as_unit()
            return LaurentPoly._raw({mono ** n: sign ** (-n % 2)}, self.mode)
        result = LaurentPoly.const(1, self.mode)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({ONE: other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"LaurentPoly({render(self)!r}, mode={self.mode!r})"

    # homomorphisms
    def substitute(self, mapping):
        return substitute_monomials(self, mapping)

    def evaluate(self, assignment):
        return eval_point(self, assignment)

    def map_monomials(self, fn):
        """Apply ``fn: Monomial -> (sign, Monomial)`` termwise."""
        out: dict = {}
        for mono, c in self._terms.items():
            sign, image = fn(mono)
            c = out.get(image, 0) + sign * c
            if c:
                out[image] = c
            else:
                out.pop(image, None)
        return LaurentPoly._raw(out, self.mode)

    def set_kinds_to_one(self, kinds):
        kinds = set(kinds)
        return self.map_monomials(
            lambda m: (1, Monomial._raw(tuple((k, e) for k, e in m.items() if k.kind not in kinds)))
        )


def _sorted_terms(terms):
    allvars = sorted({k for m in terms for k in m.variables()})
    pos = {k: i for i, k in enumerate(allvars)}

    def key(item):
        vec = [0] * len(allvars)
        for k, e in item[0].items():
            vec[pos[k]] = -e
        return vec

    return sorted(terms.items(), key=key)


def render(p: LaurentPoly) -> str:
    """Canonical text form, e.g. ``y[1,1]^2*y[2,1]^-1 + 3``."""
    items = p.terms()
    if not items:
        return "0"
    parts = []
    for n, (mono, c) in enumerate(items):
        neg = c < 0
        a = -c if neg else c
        if mono.is_one():
            body = str(a)
        elif a == 1:
            body = str(mono)
        else:
            body = f"{a}*{mono}"
        if n == 0:
            if neg:
                # a bare leading '-' before a variable is outside the input grammar
                body = f"-{body}" if mono.is_one() or a != 1 else f"-1*{body}"
            parts.append(body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def as_poly(x, mode="Z") -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, VarId):
        return LaurentPoly.from_var(x, mode=mode)
    if isinstance(x, Monomial):
        return LaurentPoly.from_monomial(x, mode=mode)
    if isinstance(x, (int, Fraction)):
        return LaurentPoly.const(x, mode)
    raise ArgumentError(f"cannot interpret {x!r} as a polynomial")


def poly_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    if a.mode != b.mode:
        raise ModeError(f"cannot multiply {a.mode}-mode by {b.mode}-mode polynomial")
    return a * b


def _as_signed_monomial(image):
    if isinstance(image, tuple) and len(image) == 2 and isinstance(image[1], Monomial):
        sign, mono = image
        if sign not in (1, -1):
            raise UnitError(f"sign must be +1 or -1, got {sign!r}")
        return int(sign), mono
    if isinstance(image, Monomial):
        return 1, image
    if isinstance(image, VarId):
        return 1, Monomial.of(image)
    if isinstance(image, int) and not isinstance(image, bool):
        if image not in (1, -1):
            raise UnitError(f"substitution image {image} is not a unit")
        return image, ONE
    if isinstance(image, LaurentPoly):
        return image.as_unit()
    raise UnitError(f"substitution image {image!r} is not a signed monomial")


def substitute_monomials(p: LaurentPoly, mapping: Mapping) -> LaurentPoly:
    """Ring homomorphism sending each mapped variable to a signed monomial.

    Unmapped variables pass through; negative exponents use the inverse image.
    """
    images = {k: _as_signed_monomial(img) for k, img in mapping.items()}
    out: dict = {}
    for mono, c in p.raw_terms().items():
        sign = 1
        exps: dict = {}
        for k, e in mono.items():
            img = images.get(k)
            if img is None:
                exps[k] = exps.get(k, 0) + e
                continue
            s, im = img
            if s < 0 and e % 2:
                sign = -sign
            for k2, e2 in im.items():
                exps[k2] = exps.get(k2, 0) + e2 * e
        new = Monomial._raw(_canonical(exps))
        c = out.get(new, 0) + sign * c
        if c:
            out[new] = c
        else:
            out.pop(new, None)
    return LaurentPoly._raw(out, p.mode)


def elementary_symmetric(entries, k: int, mode="Z") -> LaurentPoly:
    """Sum of all k-fold products of distinct entries (``e_0 = 1``)."""
    entries = [as_poly(x, mode) for x in entries]
    if not 0 <= k <= len(entries):
        raise ArgumentError(f"k={k} out of range 0..{len(entries)}")
    return elementary_symmetric_all(entries, mode)[k]


def elementary_symmetric_all(entries, mode="Z"):
    """[e_0, e_1, ..., e_n] of the entries."""
    entries = [as_poly(x, mode) for x in entries]
    es = [LaurentPoly.const(1, mode)]
    for x in entries:
        es.append(LaurentPoly.const(0, mode))
        for i in range(len(es) - 1, 0, -1):
            es[i] = es[i] + x * es[i - 1]
    return es


def eval_point(p: LaurentPoly, assignment: Mapping) -> Fraction:
    """Exact rational value of ``p`` at a point with nonzero coordinates."""
    total = Fraction(0)
    for mono, c in p.raw_terms().items():
        term = Fraction(c)
        for k, e in mono.items():
            if k not in assignment:
                raise EvaluationError(f"no value assigned to {k}")
            val = assignment[k]
            if isinstance(val, float):
                raise EvaluationError("floating point values are not allowed")
            val = Fraction(val)
            if val == 0:
                raise EvaluationError(f"zero value assigned to {k}")
            term *= val ** e
        total += term
    return total
