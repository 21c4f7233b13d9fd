"""Polynomial expressions and tower-spec files.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' SIGNED_INT)?
    base   := SIGNED_INT | VAR | '(' expr ')'
    VAR    := ('y' | 'u' | 'w' | 'v') '[' INT ',' INT ']'

``v`` is the equivariant square root (v[j,i]^2 = u[j,i]) on spin stages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import BindingError, ExprSemanticError, ParseError, SchemaError, UnitError
from .laurent import Kind, LaurentPoly, VarId
from .tower import TowerSpec, make_tower
from .weyl import Stage

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Var:
    kind: str
    stage: int
    index: int


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class Sum:
    terms: tuple


@dataclass(frozen=True)
class Product:
    factors: tuple


@dataclass(frozen=True)
class Power:
    base: object
    exponent: int


# ---------------------------------------------------------------------------
# tokenizer

_PUNCT = {"+": "'+'", "-": "'-'", "*": "'*'", "^": "'^'", "(": "'('", ")": "')'",
          "[": "'['", "]": "']'", ",": "','"}
_KINDS = "yuwv"


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'int', 'name', a punctuation char, or 'eof'
    text: str
    line: int
    col: int


def _tokenize(src: str):
    toks = []
    line, col = 1, 1
    i = 0
    while i < len(src):
        ch = src[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(src) and src[j].isdigit():
                j += 1
            toks.append(_Tok("int", src[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in _KINDS:
            toks.append(_Tok("name", ch, line, col))
        elif ch in _PUNCT:
            toks.append(_Tok(ch, ch, line, col))
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col,
                             ["INT", "VAR", "'('", "'+'", "'-'", "'*'", "'^'", "')'"])
        i += 1
        col += 1
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, src):
        self.toks = _tokenize(src)
        self.pos = 0
        self.after_power = False

    @property
    def cur(self):
        return self.toks[self.pos]

    def _fail(self, expected):
        tok = self.cur
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"unexpected {found}", tok.line, tok.col, expected)

    def _take(self, kind, expected=None):
        if self.cur.kind != kind:
            self._fail(expected or [_PUNCT.get(kind, kind.upper())])
        tok = self.cur
        self.pos += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.cur.kind != "eof":
            self._fail(self._continuations("end of input"))
        return node

    def _continuations(self, closer):
        # '^' may follow a factor only if that factor carries no exponent yet
        out = ["'+'", "'-'", "'*'", closer]
        return out if self.after_power else out[:3] + ["'^'", closer]

    def expr(self):
        terms = [self.term()]
        while self.cur.kind in ("+", "-"):
            op = self._take(self.cur.kind)
            t = self.term()
            terms.append(Neg(t) if op.kind == "-" else t)
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while self.cur.kind == "*":
            self._take("*")
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self):
        base = self.base()
        if self.cur.kind == "^":
            self._take("^")
            node = Power(base, self.signed_int(["SIGNED_INT"]))
            self.after_power = True
            return node
        self.after_power = False
        return base

    def signed_int(self, expected):
        neg = False
        if self.cur.kind == "-":
            self._take("-")
            neg = True
            expected = ["INT"]
        if self.cur.kind != "int":
            self._fail(expected)
        value = int(self._take("int").text)
        return -value if neg else value

    def base(self):
        tok = self.cur
        if tok.kind in ("int", "-"):
            return Int(self.signed_int(["SIGNED_INT", "VAR", "'('"]))
        if tok.kind == "name":
            self._take("name")
            self._take("[")
            stage_tok = self.cur
            stage = self.signed_int(["INT"])
            self._take(",")
            index_tok = self.cur
            index = self.signed_int(["INT"])
            self._take("]")
            for value, what, at in ((stage, "stage", stage_tok), (index, "variable", index_tok)):
                if value < 1:
                    raise ExprSemanticError(
                        f"{what} index must be >= 1 in {tok.text}[{stage},{index}]", at.line, at.col
                    )
            return Var(tok.text, stage, index)
        if tok.kind == "(":
            self._take("(")
            node = self.expr()
            self._take(")", self._continuations("')'"))
            return node
        self._fail(["SIGNED_INT", "VAR", "'('"])


def parse_expr(src: str):
    """Parse text into an expression tree (Int, Var, Neg, Sum, Product, Power)."""
    return _Parser(src).parse()


def render_ast(node) -> str:
    """Text for an expression tree; ``parse_expr(render_ast(a)) == a``."""
    if isinstance(node, Int):
        return str(node.value)
    if isinstance(node, Var):
        return f"{node.kind}[{node.stage},{node.index}]"
    if isinstance(node, Power):
        base = node.base
        inner = render_ast(base)
        if isinstance(base, (Sum, Product, Power, Neg)):
            inner = f"({inner})"
        return f"{inner}^{node.exponent}"
    if isinstance(node, Product):
        parts = []
        for f in node.factors:
            text = render_ast(f)
            if isinstance(f, (Sum, Product, Neg)):
                text = f"({text})"
            parts.append(text)
        return "*".join(parts)
    if isinstance(node, Sum):
        out = []
        for n, t in enumerate(node.terms):
            if isinstance(t, Neg):
                text = render_ast(t.operand)
                if isinstance(t.operand, (Sum, Neg)):
                    text = f"({text})"
                out.append(f" - {text}" if n else f"0 - {text}")
            else:
                text = render_ast(t)
                if isinstance(t, Sum):
                    text = f"({text})"
                out.append(f" + {text}" if n else text)
        return "".join(out)
    if isinstance(node, Neg):
        return render_ast(Sum((Int(0), node)))
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# lowering


class VariableTable:
    """The variables a tower makes available to expressions."""

    def __init__(self, tower: TowerSpec | None = None):
        self.tower = tower

    def lookup(self, node: Var) -> VarId:
        key = VarId(node.stage, node.index, Kind[node.kind.upper()])
        t = self.tower
        if t is None:
            return key
        if node.stage > t.r:
            raise BindingError(f"{key}: tower has only {t.r} stage(s)")
        s = t.stage(node.stage)
        if node.index > s.m:
            raise BindingError(f"{key}: stage {node.stage} has only {s.m} variable(s)")
        if key.kind in (Kind.W, Kind.V) and not s.is_spin:
            raise BindingError(f"{key}: square-root variables exist only on spin stages")
        return key


def lower_expr(node, universe: TowerSpec | VariableTable | None = None) -> LaurentPoly:
    """Evaluate an expression tree to an exact Laurent polynomial."""
    table = universe if isinstance(universe, VariableTable) else VariableTable(universe)
    return _lower(node, table)


def _lower(node, table):
    if isinstance(node, Int):
        return LaurentPoly.const(node.value)
    if isinstance(node, Var):
        return LaurentPoly.from_var(table.lookup(node))
    if isinstance(node, Neg):
        return -_lower(node.operand, table)
    if isinstance(node, Sum):
        out = LaurentPoly.const(0)
        for t in node.terms:
            out = out + _lower(t, table)
        return out
    if isinstance(node, Product):
        out = LaurentPoly.const(1)
        for f in node.factors:
            out = out * _lower(f, table)
        return out
    if isinstance(node, Power):
        base = _lower(node.base, table)
        if node.exponent < 0 and not base.is_unit():
            raise UnitError(f"negative power of a non-unit: ({base})^{node.exponent}")
        return base ** node.exponent
    raise TypeError(f"not an expression node: {node!r}")


def parse_poly(src: str, universe=None) -> LaurentPoly:
    return lower_expr(parse_expr(src), universe)


# ---------------------------------------------------------------------------
# tower specs


def _schema(msg):
    return SchemaError(msg)


def tower_from_json(data) -> TowerSpec:
    if not isinstance(data, dict):
        raise _schema("tower spec must be a JSON object")
    unknown = set(data) - {"version", "stages", "maps"}
    if unknown:
        raise _schema(f"unknown top-level field(s): {', '.join(sorted(unknown))}")
    version = data.get("version", 1)
    if version != 1:
        raise _schema(f"field 'version': unsupported version {version!r} (expected 1)")
    stages_raw = data.get("stages")
    if not isinstance(stages_raw, list) or not stages_raw:
        raise _schema("field 'stages': expected a non-empty list")
    stages = []
    for n, entry in enumerate(stages_raw):
        where = f"stages[{n}]"
        if not isinstance(entry, dict):
            raise _schema(f"field '{where}': expected an object")
        extra = set(entry) - {"family", "vars", "blocks"}
        if extra:
            raise _schema(f"field '{where}': unknown key(s) {', '.join(sorted(extra))}")
        family = entry.get("family")
        if not isinstance(family, str):
            raise _schema(f"field '{where}.family': expected a string")
        m = entry.get("vars")
        if not isinstance(m, int) or isinstance(m, bool):
            raise _schema(f"field '{where}.vars': expected an integer")
        blocks = entry.get("blocks", [])
        if not isinstance(blocks, list) or any(
            not isinstance(b, int) or isinstance(b, bool) for b in blocks
        ):
            raise _schema(f"field '{where}.blocks': expected a list of integers")
        stages.append(Stage(family, m, tuple(blocks)))
    maps_raw = data.get("maps", {})
    if not isinstance(maps_raw, dict):
        raise _schema("field 'maps': expected an object")
    maps = {}
    for j_key, inner in maps_raw.items():
        if not j_key.isdigit() or not isinstance(inner, dict):
            raise _schema(f"field 'maps.{j_key}': expected a decimal stage index mapping to an object")
        for l_key, mat in inner.items():
            where = f"maps.{j_key}.{l_key}"
            if not l_key.isdigit():
                raise _schema(f"field '{where}': stage index must be a decimal string")
            if not isinstance(mat, list) or any(
                not isinstance(row, list)
                or any(not isinstance(x, int) or isinstance(x, bool) for x in row)
                for row in mat
            ):
                raise _schema(f"field '{where}': expected a matrix of integers")
            maps[(int(j_key), int(l_key))] = mat
    return make_tower(stages, maps)


def load_tower_spec(path) -> TowerSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read tower spec ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return tower_from_json(data)


def dumps(obj) -> str:
    """Deterministic JSON: UTF-8, sorted keys."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2)
