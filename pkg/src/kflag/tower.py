"""Tower descriptions and their K-ring presentations.

A tower is a list of stages plus integer matrices ``maps[(j, l)]`` (shape
m_j x m_l, 1 <= l < j) describing the character maps: y[j,i] is pulled back
to prod_{l<j} prod_s y[l,s]^A_l^(j)(i,s).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .errors import ArgumentError, ModeError, ValidationError
from .laurent import (
    Kind,
    LaurentPoly,
    Monomial,
    VarId,
    doubled_exponents,
    from_doubled,
    on_spin_lattice,
)
from .weyl import (
    Stage,
    apply_simple_reflection,
    coset_rank,
    half_character,
    invariant_generators,
    parabolic_generators,
    parabolic_reflections,
)


@dataclass(frozen=True)
class TowerSpec:
    stages: tuple
    maps: dict = field(default_factory=dict)
    validated: bool = field(default=False, compare=False)

    @property
    def r(self):
        return len(self.stages)

    def stage(self, j) -> Stage:
        return self.stages[j - 1]

    def matrix(self, j, l):
        mat = self.maps.get((j, l))
        if mat is None:
            return tuple((0,) * self.stage(l).m for _ in range(self.stage(j).m))
        return mat

    def to_json(self) -> dict:
        stages = []
        for s in self.stages:
            entry = {"family": s.family, "vars": s.m}
            if not s.is_borel:
                entry["blocks"] = list(s.blocks)
            stages.append(entry)
        maps: dict = {}
        for (j, l), mat in sorted(self.maps.items()):
            if any(any(row) for row in mat):
                maps.setdefault(str(j), {})[str(l)] = [list(row) for row in mat]
        return {"version": 1, "stages": stages, "maps": maps}

    def digest(self) -> str:
        text = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def variables(self, *, equivariant=False):
        """All Y (and U) variables, stage-major."""
        out = []
        for j, s in enumerate(self.stages, 1):
            out.extend(VarId(j, i, Kind.Y) for i in range(1, s.m + 1))
        if equivariant:
            for j, s in enumerate(self.stages, 1):
                out.extend(VarId(j, i, Kind.U) for i in range(1, s.m + 1))
        return out

    def is_type_a_full_flag(self):
        return all(s.family == "A" and s.is_borel for s in self.stages)


def make_tower(stages, maps=None) -> TowerSpec:
    """Build and validate a tower from Stage objects (or tuples) and matrices."""
    built = []
    for s in stages:
        if isinstance(s, Stage):
            built.append(s)
        elif isinstance(s, (tuple, list)):
            built.append(Stage(*s))
        else:
            raise ArgumentError(f"not a stage: {s!r}")
    clean = {}
    for key, mat in (maps or {}).items():
        clean[tuple(key)] = tuple(tuple(int(x) for x in row) for row in mat)
    return validate(TowerSpec(tuple(built), clean))


def validate(t: TowerSpec) -> TowerSpec:
    """Check shapes and lattice conditions; materialize absent matrices as zero."""
    if not t.stages:
        raise ValidationError("a tower needs at least one stage")
    r = len(t.stages)
    for key in t.maps:
        if (
            not isinstance(key, tuple)
            or len(key) != 2
            or not all(isinstance(x, int) for x in key)
            or not 1 <= key[1] < key[0] <= r
        ):
            raise ValidationError(f"map key {key!r} must satisfy 1 <= l < j <= {r}")
    maps = {}
    for j in range(2, r + 1):
        sj = t.stage(j)
        for l in range(1, j):
            sl = t.stage(l)
            mat = t.maps.get((j, l))
            if mat is None:
                mat = tuple((0,) * sl.m for _ in range(sj.m))
            mat = tuple(tuple(row) for row in mat)
            if len(mat) != sj.m or any(len(row) != sl.m for row in mat):
                shape = f"{len(mat)}x{len(mat[0]) if mat else 0}"
                raise ValidationError(
                    f"matrix A_{l}^({j}) (j={j}, l={l}) has shape {shape}, expected {sj.m}x{sl.m}"
                )
            if any(not isinstance(x, int) or isinstance(x, bool) for row in mat for x in row):
                raise ValidationError(f"matrix A_{l}^({j}) (j={j}, l={l}) must hold integers")
            if sj.is_spin:
                sums = [sum(row[s] for row in mat) for s in range(sl.m)]
                if sl.is_spin:
                    if len({x % 2 for x in sums}) > 1:
                        raise ValidationError(
                            f"spin parity violation in A_{l}^({j}) (j={j}, l={l}): column sums "
                            f"{sums} must share one parity"
                        )
                else:
                    for s, total in enumerate(sums, 1):
                        if total % 2:
                            raise ValidationError(
                                f"spin parity violation in A_{l}^({j}) (j={j}, l={l}): column {s} "
                                f"has odd sum {total}"
                            )
            if not sl.is_borel:
                for i, row in enumerate(mat, 1):
                    for block in sl.block_ranges():
                        if len({row[s] for s in block}) > 1:
                            raise ValidationError(
                                f"row {i} of A_{l}^({j}) (j={j}, l={l}) is not constant on block "
                                f"{[s + 1 for s in block]} of stage {l}"
                            )
            maps[(j, l)] = mat
    return TowerSpec(t.stages, maps, validated=True)


def _require_valid(t):
    return t if t.validated else validate(t)


# ---------------------------------------------------------------------------
# character maps


def _pull_monomial(t: TowerSpec, j: int, mono: Monomial) -> Monomial:
    """Image of a stage-j character under Psi_j^* (lower-stage monomial)."""
    sj = t.stage(j)
    h = doubled_exponents(mono, j, sj.m)
    out = Monomial()
    for l in range(1, j):
        sl = t.stage(l)
        mat = t.matrix(j, l)
        img = [sum(h[i] * mat[i][s] for i in range(sj.m)) for s in range(sl.m)]
        if not any(img):
            continue
        if sl.is_spin:
            out = out * from_doubled(img, l)
        else:
            if any(x % 2 for x in img):
                raise ArgumentError(
                    f"monomial {mono} is off the spin lattice of stage {j}; its image on stage {l} "
                    "is not a character"
                )
            out = out * Monomial((VarId(l, s + 1, Kind.Y), x // 2) for s, x in enumerate(img) if x)
    return out


def _check_stage_poly(t, j, p, *, allow_u=False):
    sj = t.stage(j)
    for key in p.variables():
        if key.stage != j or key.kind in (Kind.U, Kind.V) and not allow_u:
            raise ArgumentError(f"{key} is not a stage-{j} fiber variable")
        if key.index > sj.m:
            raise ArgumentError(f"{key} exceeds the {sj.m} variables of stage {j}")
        if key.kind == Kind.W and not sj.is_spin:
            raise ArgumentError(f"{key}: square-root variables exist only on spin stages")


def psi_pullback(t: TowerSpec, j: int, p: LaurentPoly) -> LaurentPoly:
    """Apply Psi_j^*: stage-j characters to lower-stage characters.

    For j = 1 this is the augmentation (every variable goes to 1).
    """
    t = _require_valid(t)
    if not 1 <= j <= t.r:
        raise ArgumentError(f"stage index {j} out of range 1..{t.r}")
    _check_stage_poly(t, j, p)
    return p.map_monomials(lambda m: (1, _pull_monomial(t, j, m)))


def twisted_monomial(t: TowerSpec, j: int, mono: Monomial) -> Monomial:
    """Image of a stage-j character at the twisted arguments u_j * Psi_j^*(y_j)."""
    h = doubled_exponents(mono, j, t.stage(j).m)
    return from_doubled(h, j, equivariant=True) * _pull_monomial(t, j, mono)


def twisted_pullback(t: TowerSpec, j: int, p: LaurentPoly) -> LaurentPoly:
    t = _require_valid(t)
    _check_stage_poly(t, j, p)
    return p.map_monomials(lambda m: (1, twisted_monomial(t, j, m)))


def twisted_arguments(t: TowerSpec, j: int) -> list:
    """[u[j,i] * Psi_j^*(y[j,i]) for each i], as Laurent monomials."""
    t = _require_valid(t)
    return [
        LaurentPoly.from_monomial(twisted_monomial(t, j, Monomial.of(VarId(j, i, Kind.Y))))
        for i in range(1, t.stage(j).m + 1)
    ]


def bott_c_classes(t: TowerSpec, j: int) -> list:
    """The classes c[j,1], c[j,2] of a Bott tower (every stage SL(2))."""
    t = _require_valid(t)
    if any(s.family != "A" or s.m != 2 for s in t.stages):
        raise ArgumentError("c-classes are defined for towers whose stages are all SL(2)")
    return twisted_arguments(t, j)


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Presentation:
    mode: str
    ring_generators: tuple
    relations: tuple
    tower: TowerSpec = field(compare=False, repr=False, default=None)
    relation_stages: tuple = field(compare=False, repr=False, default=())

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "generators": [str(g) for g in self.ring_generators],
            "relations": [str(rel) for rel in self.relations],
        }

    def stage_relations(self, j):
        return [rel for rel, s in zip(self.relations, self.relation_stages) if s == j]


def _generators(t, equivariant):
    gens = []
    for j, s in enumerate(t.stages, 1):
        gens.extend(parabolic_generators(s, j))
    if equivariant:
        for j, s in enumerate(t.stages, 1):
            gens.extend(LaurentPoly.from_var(VarId(j, i, Kind.U)) for i in range(1, s.m + 1))
            if s.is_spin:
                gens.append(half_character(s, j, equivariant=True))
    return gens


def ordinary_presentation(t: TowerSpec) -> Presentation:
    """Relations g(y_j) - Psi_j^*(g(y_j)) for every invariant generator g."""
    t = _require_valid(t)
    rels, owners = [], []
    for j, s in enumerate(t.stages, 1):
        for g in invariant_generators(s, j):
            rels.append(g - psi_pullback(t, j, g))
            owners.append(j)
    return Presentation("ordinary", tuple(_generators(t, False)), tuple(rels), t, tuple(owners))


def equivariant_presentation(t: TowerSpec) -> Presentation:
    """Relations g(y_j) - g(u_j * Psi_j^*(y_j)) for every invariant generator g."""
    t = _require_valid(t)
    rels, owners = [], []
    for j, s in enumerate(t.stages, 1):
        for g in invariant_generators(s, j):
            rels.append(g - twisted_pullback(t, j, g))
            owners.append(j)
    return Presentation("equivariant", tuple(_generators(t, True)), tuple(rels), t, tuple(owners))


def specialize_u1(p: Presentation) -> Presentation:
    """Send every u (and v) variable to 1."""
    if p.mode != "equivariant":
        raise ModeError("specialize_u1 needs an equivariant presentation")
    kinds = (Kind.U, Kind.V)
    gens = tuple(
        g for g in p.ring_generators if not any(k.kind in kinds for k in g.variables())
    )
    rels = tuple(rel.set_kinds_to_one(kinds) for rel in p.relations)
    return Presentation("ordinary", gens, rels, p.tower, p.relation_stages)


def expected_rank(t: TowerSpec) -> int:
    t = _require_valid(t)
    out = 1
    for s in t.stages:
        out *= coset_rank(s)
    return out


def in_presentation_ring(t: TowerSpec, p: LaurentPoly) -> bool:
    """Membership test for the ring generated by the presentation generators.

    Checks W_L-invariance on non-Borel stages and spin-lattice parity.
    """
    t = _require_valid(t)
    for j, s in enumerate(t.stages, 1):
        for k in parabolic_reflections(s):
            if apply_simple_reflection(s, k, p, j) != p:
                return False
        if s.is_spin:
            for mono in p.monomials():
                if not on_spin_lattice(mono, j, s.m):
                    return False
                if not on_spin_lattice(mono, j, s.m, equivariant=True):
                    return False
    return True
