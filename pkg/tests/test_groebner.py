from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings

from kflag.errors import EncodingError, ResourceError
from kflag.groebner import (
    BlockDegrevlex,
    EngineAlignment,
    PolyRingEncoding,
    buchberger,
    encode_presentation,
    groebner_for,
    nf_oracle,
    quotient_dimension,
    verify_rank,
)
from kflag.flag_nf import build_engine
from kflag.laurent import LaurentPoly, u, w, y
from kflag.tower import make_tower, ordinary_presentation

from oracles import groebner_dimension, to_sympy
from strategies import towers

try:
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover
    QQ = Fraction


def Y(j, i):
    return LaurentPoly.from_var(y(j, i))


def raw_encoding(names, relations):
    roles = [("y", y(1, n + 1)) for n in range(len(names))]
    return PolyRingEncoding(
        names, roles, BlockDegrevlex([range(len(names))]),
        [{e: QQ(c) for e, c in rel.items()} for rel in relations],
    )


# --- buchberger ---------------------------------------------------------------


def test_eliminate_inverse_companion():
    # variables ordered (ybar, y): ybar is eliminated in favour of y
    enc = raw_encoding(["ybar", "y"], [{(1, 0): 1, (0, 1): 1, (0, 0): -2}, {(1, 1): 1, (0, 0): -1}])
    gb = buchberger(enc)
    assert sorted(gb.render()) == sorted(["y^2 - 2*y + 1", "ybar + y - 2"])
    assert quotient_dimension(gb) == 2


def test_zero_ideal_is_infinite():
    gb = buchberger(raw_encoding(["y"], []))
    assert len(gb) == 0 and not gb.is_finite
    assert quotient_dimension(gb) == "infinite"


def test_unit_ideal():
    gb = buchberger(raw_encoding(["y", "z"], [{(0, 0): 1}, {(1, 0): 1}]))
    assert gb.render() == ["1"]
    assert quotient_dimension(gb) == 0


def test_basis_is_reduced_and_monic():
    gb = groebner_for(make_tower([("A", 3)]))
    for lm, p in zip(gb.leading, gb.polys):
        assert p[lm] == 1
        others = [q for q in gb.leading if q != lm]
        for e in p:
            assert not any(all(a <= b for a, b in zip(o, e)) for o in others)


def test_order_stable():
    t = make_tower([("A", 2), ("A", 2)], {(2, 1): [[2, -1], [1, 2]]})
    assert groebner_for(t).render() == groebner_for(t).render()


# --- dimensions ---------------------------------------------------------------------

SUITE = [
    ([("A", 2)], {}, 2),
    ([("A", 3)], {}, 6),
    ([("A", 3, (2, 1))], {}, 3),
    ([("A", 2), ("A", 2)], {(2, 1): [[1, 0], [0, 0]]}, 4),
    ([("A", 2), ("A", 2)], {(2, 1): [[2, -2], [-1, 1]]}, 4),
    ([("C", 1)], {}, 2),
    ([("C", 2)], {}, 8),
    ([("B_spin", 1)], {}, 2),
    ([("B_spin", 2)], {}, 8),
    ([("A", 2), ("C", 1)], {(2, 1): [[1, -1]]}, 4),
    ([("A", 4, (2, 2))], {}, 6),
    ([("A", 2), ("B_spin", 2)], {(2, 1): [[1, 0], [1, 2]]}, 16),
    ([("B_spin", 1), ("B_spin", 2)], {(2, 1): [[1], [0]]}, 16),
]


@pytest.mark.parametrize("stages, maps, rank", SUITE, ids=lambda x: str(x))
def test_quotient_dimension(stages, maps, rank):
    report = verify_rank(make_tower(stages, maps))
    assert report.expected == rank
    assert report.computed == rank and report.passed


@pytest.mark.parametrize(
    "stages, maps",
    [([("A", 2)], {}), ([("A", 3)], {}), ([("C", 1)], {}), ([("C", 2)], {}),
     ([("A", 2), ("A", 2)], {(2, 1): [[1, -1], [0, 2]]})],
)
def test_dimension_matches_sympy(stages, maps):
    """Independent check: clear denominators by hand and let sympy do the Groebner work."""
    t = make_tower(stages, maps)
    gens, inv = [], []
    for k in t.variables():
        gens.append(sympy.Symbol(f"y{k.stage}{k.index}"))
        inv.append(sympy.Symbol(f"z{k.stage}{k.index}"))
    subs = {}
    for k, g, z in zip(t.variables(), gens, inv):
        subs[to_sympy(LaurentPoly.from_var(k))] = g
    rels = [g * z - 1 for g, z in zip(gens, inv)]
    for rel in ordinary_presentation(t).relations:
        expr = sympy.expand(to_sympy(rel).subs(subs))
        num, den = sympy.fraction(sympy.together(expr))
        # den is a monomial in the y's; multiplying by it is harmless since they are units
        rels.append(sympy.expand(num))
    assert groebner_dimension(rels, gens + inv) == verify_rank(t).computed


def test_spin3_dimension_matches_sympy():
    h, yy, z = sympy.symbols("h y z")
    # Delta_3 - 2 with h = w, y = h^2 and z = 1/y: h + h*z - 2
    dim = groebner_dimension([h + h * z - 2, h**2 - yy, yy * z - 1], [h, yy, z])
    assert dim == verify_rank(make_tower([("B_spin", 1)])).computed == 2


@given(towers(max_stages=2, max_m=2))
@settings(max_examples=30, deadline=None)
def test_dimension_is_expected_rank(t):
    assert verify_rank(t).passed


# --- oracle -----------------------------------------------------------------------------


def test_oracle_examples(sl2):
    gb = groebner_for(sl2, inverses="all")
    assert nf_oracle(gb, Y(1, 2)).as_laurent() == (2 - Y(1, 1)).to_mode("Q") or (
        nf_oracle(gb, Y(1, 2)) == nf_oracle(gb, 2 - Y(1, 1))
    )
    assert nf_oracle(gb, Y(1, 1) * Y(1, 2)).as_laurent() == LaurentPoly.const(1, "Q")
    assert nf_oracle(gb, LaurentPoly.const(0)).coords == {}


def test_oracle_agrees_with_engine_on_sl2(sl2):
    gb = groebner_for(sl2, inverses="all")
    al = EngineAlignment(build_engine(sl2), gb)
    for p in (Y(1, 2), Y(1, 1) ** -3 + 4, Y(1, 2) ** 2 - Y(1, 1)):
        assert al.agrees(p)


@pytest.mark.parametrize(
    "stages, maps",
    [([("A", 2)], {}), ([("C", 2)], {}), ([("B_spin", 2)], {}), ([("A", 3, (2, 1))], {}),
     ([("A", 2), ("A", 2)], {(2, 1): [[1, 0], [0, 0]]})],
)
def test_companion_relations(stages, maps):
    t = make_tower(stages, maps)
    gb = groebner_for(t, inverses="all")
    for k in t.variables():
        if t.stage(k.stage).is_borel:
            assert nf_oracle(gb, Y(*k[:2]) * Y(*k[:2]) ** -1).as_laurent() == LaurentPoly.const(1, "Q")
    for rel in ordinary_presentation(t).relations:
        assert nf_oracle(gb, rel).coords == {}


def test_oracle_on_spin_half_character():
    t = make_tower([("B_spin", 1)])
    gb = groebner_for(t, inverses="all")
    w11 = LaurentPoly.from_var(w(1, 1))
    assert nf_oracle(gb, w11 + w11**-1).as_laurent() == LaurentPoly.const(2, "Q")


def test_encoding_errors():
    t = make_tower([("A", 2)])
    enc = encode_presentation(t)
    with pytest.raises(EncodingError):
        enc.encode(Y(1, 1) ** -1)  # no companion under "auto" for SL(2)
    with pytest.raises(EncodingError):
        enc.encode(LaurentPoly.from_var(u(1, 1)))
    spin = encode_presentation(make_tower([("B_spin", 2)]))
    with pytest.raises(EncodingError):
        spin.encode(LaurentPoly.from_var(w(1, 1)))
    block = encode_presentation(make_tower([("A", 3, (2, 1))]))
    with pytest.raises(EncodingError):
        block.encode(Y(1, 1))
    # block-symmetric input is rewritten in block elementary symmetric functions
    (exps,) = block.encode(Y(1, 1) + Y(1, 2))
    assert block.names[exps.index(1)] == "z[1,1,1]" and sum(exps) == 1


def test_non_borel_oracle_on_symmetric_input():
    t = make_tower([("A", 3, (2, 1))])
    gb = groebner_for(t, inverses="all")
    e1 = Y(1, 1) + Y(1, 2) + Y(1, 3)
    assert nf_oracle(gb, e1 - 3).coords == {}
    inv = Y(1, 1) ** -1 * Y(1, 2) ** -1
    assert nf_oracle(gb, inv * Y(1, 1) * Y(1, 2)).as_laurent() == LaurentPoly.const(1, "Q")
    sq = Y(1, 1) ** 2 + Y(1, 2) ** 2
    assert nf_oracle(gb, sq) == nf_oracle(gb, (Y(1, 1) + Y(1, 2)) ** 2 - 2 * Y(1, 1) * Y(1, 2))


# --- resources ------------------------------------------------------------------------------


def test_resource_cap_reports_progress():
    with pytest.raises(ResourceError) as info:
        groebner_for(make_tower([("C", 2)]), max_pairs=1)
    assert info.value.progress["pairs_processed"] == 1
    assert info.value.exit_code == 2


def test_term_cap():
    with pytest.raises(ResourceError, match="monomial cap"):
        groebner_for(make_tower([("C", 2)]), max_terms=3)


def test_resource_cap_from_env(monkeypatch):
    monkeypatch.setenv("KFLAG_RESOURCE_CAP", "2")
    with pytest.raises(ResourceError):
        verify_rank(make_tower([("C", 2)]))


def test_report_json(sl2_sl2):
    data = verify_rank(sl2_sl2).to_json()
    assert set(data) == {"tower", "expected", "computed", "pass", "basis_size", "elapsed_ms"}
    assert data["expected"] == data["computed"] == 4 and data["pass"] is True
    assert data["tower"] == sl2_sl2.digest()
