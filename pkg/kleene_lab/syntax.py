"""
Sintaxis de D.MKL: fórmulas, estructuras, secuentes.

Incluye la gramática ASCII, el parser descendente recursivo, la impresión
(que re-parsea al mismo árbol) y la traducción (·)ᵗ del lenguaje de un
solo tipo al lenguaje multi-tipo.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass

from .exceptions import KindMismatch, ParseError, TypingError


class Kind(str, enum.Enum):
    GENERAL = 'G'
    SPECIAL = 'S'


class Lang(str, enum.Enum):
    SINGLE = 'single'
    MULTI = 'multi'


def _require(child, kind, owner):
    if child.kind is not kind:
        raise TypingError(
            f"{owner} necesita un hijo {kind.name}, recibió {render(child)} ({child.kind.name})"
        )


# ============================================================================
# FÓRMULAS
# ============================================================================

class Formula:
    """Término operacional (tipo General o Special)"""


@dataclass(frozen=True)
class Atom(Formula):
    name: str
    kind = Kind.GENERAL


@dataclass(frozen=True)
class One(Formula):
    kind = Kind.GENERAL


@dataclass(frozen=True)
class Zero(Formula):
    kind = Kind.GENERAL


@dataclass(frozen=True)
class Union(Formula):
    left: Formula
    right: Formula
    kind = Kind.GENERAL

    def __post_init__(self):
        _require(self.left, Kind.GENERAL, '∪')
        _require(self.right, Kind.GENERAL, '∪')


@dataclass(frozen=True)
class Comp(Formula):
    left: Formula
    right: Formula
    kind = Kind.GENERAL

    def __post_init__(self):
        _require(self.left, Kind.GENERAL, '·')
        _require(self.right, Kind.GENERAL, '·')


@dataclass(frozen=True)
class Star(Formula):
    body: Formula
    kind = Kind.GENERAL

    def __post_init__(self):
        _require(self.body, Kind.GENERAL, '*')


@dataclass(frozen=True)
class DualStar(Formula):
    body: Formula
    kind = Kind.GENERAL

    def __post_init__(self):
        _require(self.body, Kind.GENERAL, '⋆')


@dataclass(frozen=True)
class BoxF(Formula):
    body: Formula
    kind = Kind.GENERAL

    def __post_init__(self):
        _require(self.body, Kind.SPECIAL, '□')


@dataclass(frozen=True)
class FDia(Formula):
    body: Formula
    kind = Kind.SPECIAL

    def __post_init__(self):
        _require(self.body, Kind.GENERAL, '♦')


@dataclass(frozen=True)
class BBox(Formula):
    body: Formula
    kind = Kind.SPECIAL

    def __post_init__(self):
        _require(self.body, Kind.GENERAL, '■')


@dataclass(frozen=True)
class FormulaVar(Formula):
    """Metavariable de fórmula (α, β, ξ) en los esquemas de reglas"""
    name: str
    kind: Kind = Kind.GENERAL
    atomic: bool = False


# ============================================================================
# ESTRUCTURAS
# ============================================================================

class Structure:
    """Término estructural con fórmulas en las hojas"""


@dataclass(frozen=True)
class Leaf(Structure):
    formula: Formula

    @property
    def kind(self):
        return self.formula.kind


@dataclass(frozen=True)
class Phi(Structure):
    kind = Kind.GENERAL


@dataclass(frozen=True)
class Odot(Structure):
    left: Structure
    right: Structure
    kind = Kind.GENERAL

    def __post_init__(self):
        _require(self.left, Kind.GENERAL, '⊙')
        _require(self.right, Kind.GENERAL, '⊙')


@dataclass(frozen=True)
class LeftRes(Structure):
    """Γ < Δ"""
    left: Structure
    right: Structure
    kind = Kind.GENERAL

    def __post_init__(self):
        _require(self.left, Kind.GENERAL, '<')
        _require(self.right, Kind.GENERAL, '<')


@dataclass(frozen=True)
class RightRes(Structure):
    """Γ > Δ"""
    left: Structure
    right: Structure
    kind = Kind.GENERAL

    def __post_init__(self):
        _require(self.left, Kind.GENERAL, '>')
        _require(self.right, Kind.GENERAL, '>')


@dataclass(frozen=True)
class Circ(Structure):
    body: Structure
    kind = Kind.GENERAL

    def __post_init__(self):
        _require(self.body, Kind.SPECIAL, '∘')


@dataclass(frozen=True)
class Bullet(Structure):
    body: Structure
    kind = Kind.SPECIAL

    def __post_init__(self):
        _require(self.body, Kind.GENERAL, '•')


@dataclass(frozen=True)
class Pow(Structure):
    """Γ^(n) con índice simbólico; sólo aparece en plantillas de paso del ω"""
    body: Structure
    index: str = 'n'
    kind = Kind.GENERAL

    def __post_init__(self):
        _require(self.body, Kind.GENERAL, 'pow')
        if not isinstance(self.index, str) or not self.index.isidentifier():
            raise TypingError(f"índice simbólico inválido: {self.index!r}")


@dataclass(frozen=True)
class StructVar(Structure):
    """Metavariable estructural (Γ, Δ, Θ, Π, Ξ, Σ)"""
    name: str
    kind: Kind = Kind.GENERAL


@dataclass(frozen=True)
class Sequent:
    precedent: Structure
    succedent: Structure

    def __post_init__(self):
        if self.precedent.kind is not self.succedent.kind:
            raise KindMismatch(
                f"secuente mixto: {render(self.precedent)} es {self.precedent.kind.name}, "
                f"{render(self.succedent)} es {self.succedent.kind.name}"
            )

    @property
    def kind(self):
        return self.precedent.kind


def as_structure(x) -> Structure:
    """Envuelve una fórmula como hoja estructural"""
    if isinstance(x, Formula):
        return Leaf(x)
    return x


def power(body: Structure, index: int | str) -> Structure:
    """Γ^(1) := Γ, Γ^(k+1) := Γ ⊙ Γ^(k); un índice simbólico queda como Pow"""
    body = as_structure(body)
    if isinstance(index, str):
        return Pow(body, index)
    if index < 1:
        raise TypingError(f"las potencias literales empiezan en 1, no en {index}")
    result = body
    for _ in range(index - 1):
        result = Odot(body, result)
    return result


# ============================================================================
# RECORRIDOS
# ============================================================================

def children(x) -> tuple:
    match x:
        case Union(l, r) | Comp(l, r) | Odot(l, r) | LeftRes(l, r) | RightRes(l, r):
            return (l, r)
        case Star(b) | DualStar(b) | BoxF(b) | FDia(b) | BBox(b) | Circ(b) | Bullet(b) | Pow(b, _):
            return (b,)
        case Leaf(f):
            return (f,)
        case Sequent(p, s):
            return (p, s)
    return ()


def walk(x):
    """Recorre x en preorden"""
    yield x
    for child in children(x):
        yield from walk(child)


def atoms(x) -> tuple[str, ...]:
    return tuple(sorted({node.name for node in walk(x) if isinstance(node, Atom)}))


def metavariables(x) -> set:
    return {node for node in walk(x) if isinstance(node, (FormulaVar, StructVar))}


def contains_star(x) -> bool:
    return any(isinstance(node, (Star, DualStar)) for node in walk(x))


def contains_modal(x) -> bool:
    return any(isinstance(node, (BoxF, FDia, BBox)) for node in walk(x))


def formula_depth(f: Formula) -> int:
    subs = children(f)
    return 0 if not subs else 1 + max(formula_depth(s) for s in subs)


def formula_size(f: Formula) -> int:
    return 1 + sum(formula_size(s) for s in children(f))


def replace_powers(x, index: str, build):
    """Reemplaza cada Pow(Γ, index) por build(Γ)"""
    match x:
        case Pow(body, idx) if idx == index:
            return build(body)
        case Odot(l, r):
            return Odot(replace_powers(l, index, build), replace_powers(r, index, build))
        case LeftRes(l, r):
            return LeftRes(replace_powers(l, index, build), replace_powers(r, index, build))
        case RightRes(l, r):
            return RightRes(replace_powers(l, index, build), replace_powers(r, index, build))
        case Circ(b):
            return Circ(replace_powers(b, index, build))
        case Bullet(b):
            return Bullet(replace_powers(b, index, build))
        case Pow(b, idx):
            return Pow(replace_powers(b, index, build), idx)
        case Sequent(p, s):
            return Sequent(replace_powers(p, index, build), replace_powers(s, index, build))
    return x


def power_indices(x) -> set[str]:
    return {node.index for node in walk(x) if isinstance(node, Pow)}


# ============================================================================
# IMPRESIÓN
# ============================================================================

def render(x) -> str:
    """Texto en la gramática ASCII; vuelve a parsear al mismo valor"""
    match x:
        case Atom(name) | FormulaVar(name) | StructVar(name):
            return name
        case One():
            return '1'
        case Zero():
            return '0'
        case Union(l, r):
            return f"({render(l)} + {render(r)})"
        case Comp(l, r):
            return f"({render(l)} . {render(r)})"
        case Star(b):
            return f"{render(b)}^*"
        case DualStar(b):
            return f"{render(b)}^#"
        case BoxF(b):
            return f"box({render(b)})"
        case FDia(b):
            return f"fdia({render(b)})"
        case BBox(b):
            return f"bbox({render(b)})"
        case Leaf(f):
            return render(f)
        case Phi():
            return 'I'
        case Odot(l, r):
            return f"({render(l)} , {render(r)})"
        case LeftRes(l, r):
            return f"({render(l)} < {render(r)})"
        case RightRes(l, r):
            return f"({render(l)} > {render(r)})"
        case Circ(b):
            return f"o({render(b)})"
        case Bullet(b):
            return f"b({render(b)})"
        case Pow(b, idx):
            return f"pow({render(b)}, {idx})"
        case Sequent(p, s):
            return f"{render(p)} |- {render(s)}"
    # derivaciones y familias viven en calculus; su formato en serializers
    from .serializers import dump_proof
    return dump_proof(x)


# ============================================================================
# PARSER
# ============================================================================

_TOKEN = re.compile(
    r"(?P<turnstile>\|-)|(?P<postfix>\^[*#])|(?P<number>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[(),+.<>])"
)
_ATOM = re.compile(r"[a-z][a-z0-9_]*")
_CALLABLE = {'box', 'fdia', 'bbox', 'o', 'b', 'pow'}
_RESERVED = {'box', 'fdia', 'bbox', 'pow'}


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    position: int


def _tokenize(text):
    position = 0
    while position < len(text):
        if text[position].isspace():
            position += 1
            continue
        match = _TOKEN.match(text, position)
        if match is None:
            raise ParseError(f"carácter inesperado {text[position]!r}", position)
        yield _Token(match.lastgroup, match.group(), position)
        position = match.end()


class _Parser:

    def __init__(self, text, metavars=None):
        self.text = text
        self.tokens = list(_tokenize(text))
        self.index = 0
        self.metavars = metavars or {}

    def peek(self):
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def advance(self):
        token = self.peek()
        if token is None:
            raise ParseError("fin de texto inesperado", len(self.text))
        self.index += 1
        return token

    def expect(self, value):
        token = self.advance()
        if token.value != value:
            raise ParseError(f"se esperaba {value!r} y llegó {token.value!r}", token.position)
        return token

    def finish(self):
        token = self.peek()
        if token is not None:
            raise ParseError(f"texto sobrante desde {token.value!r}", token.position)

    def term(self):
        token = self.advance()
        following = self.peek()
        called = following is not None and following.value == '('
        if token.kind == 'ident':
            if called and token.value in _CALLABLE:
                node = self._call(token)
            elif token.value in self.metavars:
                node = self.metavars[token.value]
            elif token.value == 'I':
                node = Phi()
            elif _ATOM.fullmatch(token.value) and token.value not in _RESERVED:
                node = Atom(token.value)
            else:
                raise ParseError(f"identificador inválido {token.value!r}", token.position)
        elif token.kind == 'number':
            if token.value not in ('0', '1'):
                raise ParseError(f"constante desconocida {token.value!r}", token.position)
            node = One() if token.value == '1' else Zero()
        elif token.value == '(':
            node = self._group(token)
        else:
            raise ParseError(f"token inesperado {token.value!r}", token.position)
        return self._postfix(node)

    def formula(self):
        start = self.peek()
        node = self.term()
        if not isinstance(node, Formula):
            position = start.position if start else len(self.text)
            raise ParseError("se esperaba una fórmula, no una estructura", position)
        return node

    def _call(self, token):
        self.expect('(')
        if token.value == 'pow':
            body = as_structure(self.term())
            self.expect(',')
            raw = self.advance()
            if raw.kind == 'number':
                index = int(raw.value)
            elif raw.kind == 'ident':
                index = raw.value
            else:
                raise ParseError("índice de potencia inválido", raw.position)
            self.expect(')')
            return power(body, index)
        if token.value in ('o', 'b'):
            body = as_structure(self.term())
            self.expect(')')
            return Circ(body) if token.value == 'o' else Bullet(body)
        body = self.formula()
        self.expect(')')
        return {'box': BoxF, 'fdia': FDia, 'bbox': BBox}[token.value](body)

    def _group(self, opening):
        left = self.term()
        operator = self.advance()
        if operator.value == ')':
            return left
        if operator.value in ('+', '.'):
            if not isinstance(left, Formula):
                raise ParseError("el operando de + / . debe ser fórmula", opening.position)
            right = self.formula()
            self.expect(')')
            return Union(left, right) if operator.value == '+' else Comp(left, right)
        if operator.value in (',', '<', '>'):
            right = as_structure(self.term())
            self.expect(')')
            constructor = {',': Odot, '<': LeftRes, '>': RightRes}[operator.value]
            return constructor(as_structure(left), right)
        raise ParseError(f"operador binario inesperado {operator.value!r}", operator.position)

    def _postfix(self, node):
        while (token := self.peek()) is not None and token.kind == 'postfix':
            self.advance()
            if not isinstance(node, Formula):
                raise ParseError("^* / ^# sólo se aplican a fórmulas", token.position)
            node = Star(node) if token.value == '^*' else DualStar(node)
        return node


def _check_language(f, lang):
    if lang is Lang.MULTI and contains_star(f):
        raise TypingError(f"{render(f)}: * y ⋆ no existen en el lenguaje multi-tipo")
    if lang is Lang.SINGLE and contains_modal(f):
        raise TypingError(f"{render(f)}: box/fdia/bbox no existen en el lenguaje de un tipo")


def parse_formula(text: str, lang: Lang = Lang.MULTI) -> Formula:
    parser = _Parser(text)
    node = parser.formula()
    parser.finish()
    _check_language(node, Lang(lang))
    return node


def parse_structure(text: str) -> Structure:
    parser = _Parser(text)
    node = as_structure(parser.term())
    parser.finish()
    _check_language(node, Lang.MULTI)
    return node


def parse_sequent(text: str, metavars=None) -> Sequent:
    parser = _Parser(text, metavars)
    precedent = as_structure(parser.term())
    parser.expect('|-')
    succedent = as_structure(parser.term())
    parser.finish()
    sequent = Sequent(precedent, succedent)
    _check_language(sequent, Lang.MULTI)
    return sequent


def parse_pattern(text: str, metavars: dict) -> Sequent:
    """Patrón de secuente; los identificadores de `metavars` son metavariables"""
    return parse_sequent(text, metavars)


# ============================================================================
# TRADUCCIÓN (·)ᵗ
# ============================================================================

def translate(f: Formula) -> Formula:
    """a* ↦ □♦aᵗ, a⋆ ↦ □■aᵗ, homomorfismo en el resto"""
    match f:
        case Atom() | One() | Zero():
            return f
        case Union(l, r):
            return Union(translate(l), translate(r))
        case Comp(l, r):
            return Comp(translate(l), translate(r))
        case Star(b):
            return BoxF(FDia(translate(b)))
        case DualStar(b):
            return BoxF(BBox(translate(b)))
    raise TypingError(f"{render(f)} no pertenece al lenguaje de un tipo")


# ============================================================================
# GENERADORES
# ============================================================================

def _leaves(atom_names):
    return [Atom(name) for name in atom_names] + [One(), Zero()]


def random_formula(rng, depth, kind=Kind.GENERAL, lang=Lang.MULTI, atom_names=('a', 'b')):
    """Fórmula aleatoria de profundidad a lo más `depth`"""
    kind, lang = Kind(kind), Lang(lang)
    if kind is Kind.SPECIAL:
        if lang is Lang.SINGLE or depth < 1:
            raise ValueError("no hay fórmulas Special de esa profundidad")
        constructor = rng.choice([FDia, BBox])
        return constructor(random_formula(rng, depth - 1, Kind.GENERAL, lang, atom_names))
    if depth == 0 or rng.random() < 0.2:
        return rng.choice(_leaves(atom_names))
    options = ['union', 'comp']
    if lang is Lang.SINGLE:
        options += ['star', 'dstar']
    elif depth >= 2:
        options += ['box', 'box']
    choice = rng.choice(options)
    if choice == 'box':
        return BoxF(random_formula(rng, depth - 1, Kind.SPECIAL, lang, atom_names))
    if choice in ('star', 'dstar'):
        body = random_formula(rng, depth - 1, Kind.GENERAL, lang, atom_names)
        return Star(body) if choice == 'star' else DualStar(body)
    left = random_formula(rng, depth - 1, Kind.GENERAL, lang, atom_names)
    right = random_formula(rng, depth - 1, Kind.GENERAL, lang, atom_names)
    return Union(left, right) if choice == 'union' else Comp(left, right)


def random_structure(rng, depth, kind=Kind.GENERAL, atom_names=('a', 'b'), symbolic=False):
    """Estructura aleatoria; con `symbolic` puede contener pow(Γ, n)"""
    kind = Kind(kind)
    if kind is Kind.SPECIAL:
        if depth < 1 or rng.random() < 0.3:
            return Leaf(random_formula(rng, max(depth, 1), Kind.SPECIAL, Lang.MULTI, atom_names))
        return Bullet(random_structure(rng, depth - 1, Kind.GENERAL, atom_names, symbolic))
    if depth == 0 or rng.random() < 0.2:
        return rng.choice([Phi(), Leaf(random_formula(rng, 1, Kind.GENERAL, Lang.MULTI, atom_names))])
    choice = rng.choice(['odot', 'left', 'right', 'circ'] + (['pow'] if symbolic else []))
    if choice == 'circ':
        return Circ(random_structure(rng, depth - 1, Kind.SPECIAL, atom_names, symbolic))
    if choice == 'pow':
        return Pow(random_structure(rng, depth - 1, Kind.GENERAL, atom_names, False), 'n')
    left = random_structure(rng, depth - 1, Kind.GENERAL, atom_names, symbolic)
    right = random_structure(rng, depth - 1, Kind.GENERAL, atom_names, symbolic)
    return {'odot': Odot, 'left': LeftRes, 'right': RightRes}[choice](left, right)


def formulas_up_to(depth, atom_names=('a', 'b'), star_free=True):
    """Todas las fórmulas de un tipo hasta `depth`, sin ⋆ cuando `star_free`"""
    layers = [_leaves(atom_names)]
    for _ in range(depth):
        previous = list(itertools.chain.from_iterable(layers))
        newest = []
        for left, right in itertools.product(previous, repeat=2):
            if max(formula_depth(left), formula_depth(right)) == len(layers) - 1:
                newest.append(Union(left, right))
                newest.append(Comp(left, right))
        for body in layers[-1]:
            newest.append(Star(body))
            if not star_free:
                newest.append(DualStar(body))
        layers.append(newest)
    return list(itertools.chain.from_iterable(layers))
