"""
Laboratorio de modelos finitos: álgebras de Kleene (medibles), su núcleo,
las construcciones K⁺ / H₊, evaluación de secuentes y el oráculo de
corrección de reglas.

Los elementos son índices 0..n-1 y las operaciones son tablas. La finitud
reemplaza a la continuidad: α* se calcula como ⋃ α^n.
"""

import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property, lru_cache, reduce

import networkx as nx

from .calculus import RuleKind
from .conf import get_setting
from .exceptions import EnumerationCapExceeded, IotaPartial, NoInterpretation, TypingError
from .syntax import (
    Atom, BBox, BoxF, Bullet, Circ, Comp, DualStar, FDia, Formula, FormulaVar, Kind, Leaf,
    LeftRes, Odot, One, Phi, Pow, RightRes, Sequent, Star, StructVar, Union, Zero,
    atoms, render, translate,
)

logger = logging.getLogger(__name__)


# ============================================================================
# ÁLGEBRAS FINITAS
# ============================================================================

@dataclass(frozen=True)
class FiniteAlgebra:
    """Álgebra finita con tablas ∪ y ·; ⋆ puede ser parcial (None = indefinido)"""
    join: tuple[tuple[int, ...], ...]
    comp: tuple[tuple[int, ...], ...]
    one: int
    zero: int
    star: tuple[int, ...] | None = None
    dstar: tuple[int | None, ...] | None = None
    name: str = field(default='K', compare=False)
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return len(self.join)

    @property
    def elements(self) -> range:
        return range(self.size)

    def leq(self, x, y) -> bool:
        return self.join[x][y] == y

    def label(self, x) -> str:
        if x is None:
            return '-'
        return self.labels[x] if self.labels else str(x)

    def join_all(self, items) -> int:
        return reduce(lambda x, y: self.join[x][y], items, self.zero)

    @cached_property
    def star_table(self) -> tuple[int, ...]:
        """Tabla de * dada o, si falta, la del oráculo de potencias"""
        if self.star is not None:
            return self.star
        return tuple(star(self, x) for x in self.elements)

    @cached_property
    def specials(self) -> tuple[int, ...]:
        """β con 1 ≤ β y β·β ≤ β"""
        return tuple(b for b in self.elements
                     if self.leq(self.one, b) and self.leq(self.comp[b][b], b))

    @cached_property
    def right_residual(self):
        """[α][β] ↦ α\\β = ⋃{x : α·x ≤ β}"""
        return tuple(
            tuple(self.join_all(x for x in self.elements if self.leq(self.comp[a][x], b))
                  for b in self.elements)
            for a in self.elements
        )

    @cached_property
    def left_residual(self):
        """[β][α] ↦ β/α = ⋃{x : x·α ≤ β}"""
        return tuple(
            tuple(self.join_all(x for x in self.elements if self.leq(self.comp[x][a], b))
                  for a in self.elements)
            for b in self.elements
        )

    def power(self, x, n) -> int:
        result = self.one
        for _ in range(n):
            result = self.comp[result][x]
        return result

    def without_stars(self):
        return replace(self, star=None, dstar=None)


@dataclass(frozen=True)
class Powers:
    """α⁰, α¹, ... hasta la primera repetición; el ciclo empieza en `cycle_start`"""
    values: tuple[int, ...]
    cycle_start: int


def powers(m: FiniteAlgebra, a: int) -> Powers:
    seen = {}
    values = []
    current = m.one
    while current not in seen:
        seen[current] = len(values)
        values.append(current)
        current = m.comp[current][a]
    return Powers(tuple(values), seen[current])


def star(m: FiniteAlgebra, a: int) -> int:
    """α* = ⋃ α^n; todas las potencias aparecen antes de la primera repetición"""
    return m.join_all(powers(m, a).values)


def with_star(m: FiniteAlgebra) -> FiniteAlgebra:
    return replace(m, star=tuple(star(m, x) for x in m.elements))


def dual_star_candidates(m: FiniteAlgebra, a: int) -> frozenset[int]:
    """Elementos especiales maximales bajo α"""
    below = [b for b in m.specials if m.leq(b, a)]
    return frozenset(b for b in below if not any(c != b and m.leq(b, c) for c in below))


def greatest_special_below(m: FiniteAlgebra, a: int) -> int | None:
    candidates = dual_star_candidates(m, a)
    return next(iter(candidates)) if len(candidates) == 1 else None


def guarded_dual_star(m: FiniteAlgebra) -> tuple[int | None, ...]:
    return tuple(greatest_special_below(m, x) for x in m.elements)


def residuals(m: FiniteAlgebra, a: int, b: int) -> tuple[int, int]:
    """(α\\β, β/α)"""
    return m.right_residual[a][b], m.left_residual[b][a]


@dataclass(frozen=True)
class Kernel:
    """S = Range(*) con ξ ⊔ χ := γ(e(ξ) ∪ e(χ)); e es la inclusión"""
    elements: tuple[int, ...]
    join: tuple[tuple[int, ...], ...]
    zero: int
    gamma: tuple[int, ...]

    def e(self, j) -> int:
        return self.elements[j]


def kernel(m: FiniteAlgebra) -> Kernel:
    table = m.star_table
    elements = tuple(sorted(set(table)))
    index = {value: j for j, value in enumerate(elements)}
    join = tuple(
        tuple(index[table[m.join[x][y]]] for y in elements)
        for x in elements
    )
    return Kernel(elements, join, index[table[m.zero]], tuple(index[table[x]] for x in m.elements))


# ============================================================================
# ÁLGEBRAS HETEROGÉNEAS
# ============================================================================

class HMode(str, Enum):
    HETEROGENEOUS = 'heterogeneous'
    LITERAL = 'literal'
    GUARDED = 'guarded'


@dataclass(frozen=True)
class HeterogeneousAlgebra:
    """(A, S, γ, e[, ι]); los elementos de S son índices y e(j) = special[j]"""
    general: FiniteAlgebra
    special: tuple[int, ...]
    sjoin: tuple[tuple[int, ...], ...]
    szero: int
    gamma: tuple[int, ...]
    iota: tuple[int | None, ...] | None = None
    mode: HMode = HMode.HETEROGENEOUS
    name: str = field(default='H', compare=False)

    @property
    def s_elements(self) -> range:
        return range(len(self.special))

    def e(self, j) -> int:
        return self.special[j]

    def g(self, x) -> int:
        return self.gamma[x]

    def i(self, x) -> int:
        value = None if self.iota is None else self.iota[x]
        if value is None:
            raise IotaPartial(self.general.label(x))
        return value

    def iota_defined(self, x) -> bool:
        return self.iota is not None and self.iota[x] is not None

    def s_leq(self, j, k) -> bool:
        return self.sjoin[j][k] == k

    def tensor1(self, j, x) -> int:
        return self.general.comp[self.e(j)][x]

    def tensor2(self, x, j) -> int:
        return self.general.comp[x][self.e(j)]

    def s_label(self, j) -> str:
        return f"[{self.general.label(self.e(j))}]"


def lift(K: FiniteAlgebra, mode: HMode | str | None = None) -> HeterogeneousAlgebra:
    """K⁺: A es el reducto sin estrellas, S el núcleo, γ = *, e la inclusión.

    ι sale de la tabla ⋆ de K si existe; en modo guarded, si falta, es el
    mayor elemento especial bajo α (indefinido cuando no hay uno).
    """
    if mode is None:
        mode = HMode.HETEROGENEOUS if K.dstar is None else HMode.LITERAL
    mode = HMode(mode)
    kern = kernel(K)
    index = {value: j for j, value in enumerate(kern.elements)}
    iota = None
    if mode is not HMode.HETEROGENEOUS:
        table = K.dstar if K.dstar is not None else guarded_dual_star(K)
        if mode is HMode.LITERAL:
            missing = [x for x in K.elements if table[x] is None]
            if missing:
                raise IotaPartial(K.label(missing[0]))
        iota = tuple(None if v is None else index[v] for v in table)
    return HeterogeneousAlgebra(
        general=K.without_stars(), special=kern.elements, sjoin=kern.join, szero=kern.zero,
        gamma=kern.gamma, iota=iota, mode=mode, name=f"{K.name}+",
    )


def lower(H: HeterogeneousAlgebra, measurable: bool | None = None) -> FiniteAlgebra:
    """H₊: α* := e(γ(α)) y α⋆ := e(ι(α)).

    `measurable=True` exige ι total; `False` descarta ⋆; None conserva la
    tabla parcial tal como está.
    """
    A = H.general
    star_table = tuple(H.e(H.g(x)) for x in A.elements)
    dstar = None
    if measurable is not False and H.iota is not None:
        dstar = tuple(None if v is None else H.e(v) for v in H.iota)
        if measurable and None in dstar:
            raise IotaPartial(A.label(dstar.index(None)))
    elif measurable:
        raise IotaPartial(A.label(A.zero))
    name = H.name[:-1] if H.name.endswith('+') else f"{H.name}-"
    return replace(A, star=star_table, dstar=dstar, name=name)


def iota_mode(K: FiniteAlgebra) -> HMode:
    """LITERAL sólo si K trae una tabla ⋆ total; si no, GUARDED"""
    if K.dstar is None or None in K.dstar:
        return HMode.GUARDED
    return HMode.LITERAL


def roundtrip_check(K: FiniteAlgebra) -> bool:
    """K ≅ (K⁺)₊ con la identidad, incluido el núcleo como semirretículo"""
    base = K if K.star is not None else with_star(K)
    H = lift(base, iota_mode(base))
    back = lower(H)
    if (back.join, back.comp, back.one, back.zero, back.star) != \
            (base.join, base.comp, base.one, base.zero, base.star):
        return False
    if base.dstar is not None and back.dstar != base.dstar:
        return False
    kern = kernel(back)
    return kern.elements == H.special and kern.join == H.sjoin and kern.zero == H.szero


def roundtrip_check_h(H: HeterogeneousAlgebra) -> bool:
    """H ≅ (H₊)⁺ vía ξ ↦ e(ξ)"""
    again = lift(lower(H), H.mode)
    if again.general != H.general:
        return False
    if set(again.special) != set(H.special):
        return False
    to_new = {j: again.special.index(H.e(j)) for j in H.s_elements}
    for j, k in itertools.product(H.s_elements, repeat=2):
        if to_new[H.sjoin[j][k]] != again.sjoin[to_new[j]][to_new[k]]:
            return False
    if to_new[H.szero] != again.szero:
        return False
    if any(to_new[H.gamma[x]] != again.gamma[x] for x in H.general.elements):
        return False
    if H.iota is None:
        return again.iota is None
    return all(
        (H.iota[x] is None and again.iota[x] is None)
        or (H.iota[x] is not None and to_new[H.iota[x]] == again.iota[x])
        for x in H.general.elements
    )


def kernel_remark_witness(K: FiniteAlgebra) -> tuple[int, int] | None:
    """ξ, χ ∈ S con ξ ⊔ χ ≠ ξ ∪ χ, como elementos de K"""
    kern = kernel(K)
    for j, k in itertools.combinations(range(len(kern.elements)), 2):
        if kern.e(kern.join[j][k]) != K.join[kern.e(j)][kern.e(k)]:
            return kern.e(j), kern.e(k)
    return None


# ============================================================================
# EVALUACIÓN
# ============================================================================

class Position(str, Enum):
    PRECEDENT = 'precedent'
    SUCCEDENT = 'succedent'


def _lookup(asg, node, key):
    try:
        return asg[key]
    except KeyError:
        raise KeyError(f"la asignación no cubre {render(node)}") from None


def evaluate(H: HeterogeneousAlgebra, asg: dict, x, position=Position.PRECEDENT, index_value=None):
    """Valor de x en H: fórmulas homomórficamente, estructuras según su posición.

    Las claves de `asg` son nombres de átomos o metavariables. Los valores
    de tipo Special son índices de S.
    """
    A = H.general
    position = Position(position)
    precedent = position is Position.PRECEDENT
    match x:
        case Atom(name):
            return _lookup(asg, x, name)
        case FormulaVar() | StructVar():
            return _lookup(asg, x, x)
        case One():
            return A.one
        case Zero():
            return A.zero
        case Union(l, r):
            return A.join[evaluate(H, asg, l, position)][evaluate(H, asg, r, position)]
        case Comp(l, r):
            return A.comp[evaluate(H, asg, l, position)][evaluate(H, asg, r, position)]
        case BoxF(b):
            return H.e(evaluate(H, asg, b, position))
        case FDia(b):
            return H.g(evaluate(H, asg, b, position))
        case BBox(b):
            return H.i(evaluate(H, asg, b, position))
        case Star() | DualStar():
            raise TypingError(f"{render(x)} no pertenece al lenguaje multi-tipo")
        case Leaf(f):
            return evaluate(H, asg, f, position, index_value)
        case Phi():
            return A.one if precedent else A.zero
        case Odot(l, r):
            if not precedent:
                raise NoInterpretation(f"⊙ no se interpreta en el sucedente: {render(x)}")
            return A.comp[evaluate(H, asg, l, position, index_value)][evaluate(H, asg, r, position, index_value)]
        case LeftRes(l, r):
            if precedent:
                raise NoInterpretation(f"< no se interpreta en el antecedente: {render(x)}")
            top = evaluate(H, asg, l, Position.SUCCEDENT, index_value)
            below = evaluate(H, asg, r, Position.PRECEDENT, index_value)
            return A.left_residual[top][below]
        case RightRes(l, r):
            if precedent:
                raise NoInterpretation(f"> no se interpreta en el antecedente: {render(x)}")
            below = evaluate(H, asg, l, Position.PRECEDENT, index_value)
            top = evaluate(H, asg, r, Position.SUCCEDENT, index_value)
            return A.right_residual[below][top]
        case Circ(b):
            return H.e(evaluate(H, asg, b, position, index_value))
        case Bullet(b):
            value = evaluate(H, asg, b, position, index_value)
            return H.g(value) if precedent else H.i(value)
        case Pow(b, _):
            if not precedent or index_value is None:
                raise NoInterpretation(f"{render(x)} sólo se interpreta en el antecedente con n fijo")
            return A.power(evaluate(H, asg, b, position, index_value), index_value)
    raise TypingError(f"no se puede evaluar {x!r}")


def _sequent_holds(H, asg, s: Sequent, index_value=None) -> bool:
    left = evaluate(H, asg, s.precedent, Position.PRECEDENT, index_value)
    right = evaluate(H, asg, s.succedent, Position.SUCCEDENT, index_value)
    if s.kind is Kind.GENERAL:
        return H.general.leq(left, right)
    return H.s_leq(left, right)


@dataclass(frozen=True)
class Validity:
    valid: bool
    countermodel: dict | None = None
    skipped: int = 0

    def __bool__(self):
        return self.valid


def valid(H: HeterogeneousAlgebra, s: Sequent) -> Validity:
    """s vale en H si precedente ≤ sucedente bajo toda asignación de los átomos"""
    names = atoms(s)
    skipped = 0
    for values in itertools.product(H.general.elements, repeat=len(names)):
        asg = dict(zip(names, values))
        try:
            holds = _sequent_holds(H, asg, s)
        except IotaPartial:
            skipped += 1
            continue
        if not holds:
            labels = {name: H.general.label(v) for name, v in asg.items()}
            return Validity(False, labels, skipped)
    return Validity(True, None, skipped)


def _domain(H, variable):
    if variable.kind is Kind.SPECIAL:
        return H.s_elements
    return H.general.elements


@dataclass(frozen=True)
class SoundnessResult:
    rule: str
    model: str
    sound: bool
    witness: dict | None = None
    checked: int = 0
    skipped: int = 0

    def line(self) -> str:
        if self.sound:
            return f"PASS {self.rule} {self.model} checked={self.checked} skipped={self.skipped}"
        detail = ' '.join(f"{k}={v}" for k, v in self.witness.items())
        return f"FAIL {self.rule} {self.model} {detail}"


def check_rule_soundness(H: HeterogeneousAlgebra, rule) -> SoundnessResult:
    """Premisas válidas ⇒ conclusión válida, para toda asignación de metavariables.

    La familia del ω se evalúa con n desde `omega_start` hasta |A|, que cubre
    todos los valores de α^n. En modo guarded se saltan las asignaciones que
    caen fuera del dominio de ι.
    """
    variables = sorted(rule.metavariables, key=lambda v: v.name)
    domains = [_domain(H, v) for v in variables]
    indices = range(rule.omega_start, H.general.size + 1)
    checked = skipped = 0
    for values in itertools.product(*domains):
        asg = dict(zip(variables, values))
        try:
            if rule.kind is RuleKind.OMEGA:
                premises_hold = all(_sequent_holds(H, asg, rule.premises[0], n) for n in indices)
            else:
                premises_hold = all(_sequent_holds(H, asg, p) for p in rule.premises)
            conclusion_holds = not premises_hold or _sequent_holds(H, asg, rule.conclusion)
        except IotaPartial:
            skipped += 1
            continue
        checked += 1
        if not conclusion_holds:
            witness = {
                v.name: H.s_label(value) if v.kind is Kind.SPECIAL else H.general.label(value)
                for v, value in asg.items()
            }
            logger.debug("regla %s falla en %s: %s", rule.name, H.name, witness)
            return SoundnessResult(rule.name, H.name, False, witness, checked, skipped)
    return SoundnessResult(rule.name, H.name, True, None, checked, skipped)


# ============================================================================
# TRADUCCIÓN
# ============================================================================

def evaluate_single(K: FiniteAlgebra, asg: dict, f: Formula) -> int:
    """Valor de una fórmula de un tipo en K (⋆ parcial lanza IotaPartial)"""
    match f:
        case Atom(name):
            return asg[name]
        case One():
            return K.one
        case Zero():
            return K.zero
        case Union(l, r):
            return K.join[evaluate_single(K, asg, l)][evaluate_single(K, asg, r)]
        case Comp(l, r):
            return K.comp[evaluate_single(K, asg, l)][evaluate_single(K, asg, r)]
        case Star(b):
            return K.star_table[evaluate_single(K, asg, b)]
        case DualStar(b):
            value = evaluate_single(K, asg, b)
            result = None if K.dstar is None else K.dstar[value]
            if result is None:
                raise IotaPartial(K.label(value))
            return result
    raise TypingError(f"{render(f)} no pertenece al lenguaje de un tipo")


def _invariance_lift(K):
    base = K if K.star is not None else with_star(K)
    return lift(base, iota_mode(base))


def pointwise_agreement(K: FiniteAlgebra, f: Formula) -> dict | None:
    """Primera asignación donde f en K difiere de fᵗ en K⁺; None si coinciden"""
    H = _invariance_lift(K)
    translated = translate(f)
    names = atoms(f)
    for values in itertools.product(K.elements, repeat=len(names)):
        asg = dict(zip(names, values))
        try:
            single = evaluate_single(K, asg, f)
            multi = evaluate(H, asg, translated)
        except IotaPartial:
            continue
        if single != multi:
            return {name: K.label(v) for name, v in asg.items()}
    return None


def translation_invariance(K: FiniteAlgebra, alpha: Formula, beta: Formula) -> bool:
    """K ⊨ α ≤ β  sii  K⁺ ⊨ αᵗ ≤ βᵗ"""
    H = _invariance_lift(K)
    names = tuple(sorted(set(atoms(alpha)) | set(atoms(beta))))
    left_t, right_t = translate(alpha), translate(beta)
    in_k = in_h = True
    for values in itertools.product(K.elements, repeat=len(names)):
        asg = dict(zip(names, values))
        try:
            holds_k = K.leq(evaluate_single(K, asg, alpha), evaluate_single(K, asg, beta))
            holds_h = H.general.leq(evaluate(H, asg, left_t), evaluate(H, asg, right_t))
        except IotaPartial:
            continue
        in_k, in_h = in_k and holds_k, in_h and holds_h
    return in_k == in_h


# ============================================================================
# PATRÓN STRATEGY: Axiomas
# ============================================================================

def _show(m, **values):
    return ' '.join(f"{k}={m.label(v)}" for k, v in values.items())


class AxiomStrategy(ABC):
    """Interfaz para la verificación de un axioma"""
    name = ''

    @abstractmethod
    def validate(self, m) -> tuple[bool, str]:
        """
        Verifica el axioma en m
        Returns: (se_cumple, testigo)
        """


class K1Strategy(AxiomStrategy):
    """(K, ∪, 0) semirretículo con mínimo 0"""
    name = 'K1'

    def validate(self, m):
        for x in m.elements:
            if m.join[x][x] != x or m.join[m.zero][x] != x:
                return False, _show(m, α=x)
            for y in m.elements:
                if m.join[x][y] != m.join[y][x]:
                    return False, _show(m, α=x, β=y)
        for x, y, z in itertools.product(m.elements, repeat=3):
            if m.join[m.join[x][y]][z] != m.join[x][m.join[y][z]]:
                return False, _show(m, α=x, β=y, γ=z)
        return True, ""


class K2Strategy(AxiomStrategy):
    """(K, ·, 1) monoide, · distribuye sobre ∪, 0 absorbe"""
    name = 'K2'

    def validate(self, m):
        j, c = m.join, m.comp
        for x in m.elements:
            if c[m.one][x] != x or c[x][m.one] != x:
                return False, _show(m, α=x)
            if c[m.zero][x] != m.zero or c[x][m.zero] != m.zero:
                return False, _show(m, α=x)
        for x, y, z in itertools.product(m.elements, repeat=3):
            if c[c[x][y]][z] != c[x][c[y][z]]:
                return False, _show(m, α=x, β=y, γ=z)
            if c[x][j[y][z]] != j[c[x][y]][c[x][z]] or c[j[y][z]][x] != j[c[y][x]][c[z][x]]:
                return False, _show(m, α=x, β=y, γ=z)
        return True, ""


class K3Strategy(AxiomStrategy):
    """1 ∪ α·α* ≤ α*, 1 ∪ α*·α ≤ α*, 1 ∪ α*·α* ≤ α*"""
    name = 'K3'

    def validate(self, m):
        s, c, j = m.star_table, m.comp, m.join
        for x in m.elements:
            for value in (c[x][s[x]], c[s[x]][x], c[s[x]][s[x]]):
                if not m.leq(j[m.one][value], s[x]):
                    return False, _show(m, α=x)
        return True, ""


class K4Strategy(AxiomStrategy):
    """α·β ≤ β implica α*·β ≤ β"""
    name = 'K4'

    def validate(self, m):
        for x, y in itertools.product(m.elements, repeat=2):
            if m.leq(m.comp[x][y], y) and not m.leq(m.comp[m.star_table[x]][y], y):
                return False, _show(m, α=x, β=y)
        return True, ""


class K5Strategy(AxiomStrategy):
    """β·α ≤ β implica β·α* ≤ β"""
    name = 'K5'

    def validate(self, m):
        for x, y in itertools.product(m.elements, repeat=2):
            if m.leq(m.comp[y][x], y) and not m.leq(m.comp[y][m.star_table[x]], y):
                return False, _show(m, α=x, β=y)
        return True, ""


class K6Strategy(AxiomStrategy):
    name = 'K6'

    def validate(self, m):
        for x in m.elements:
            if m.star_table[x] != star(m, x):
                return False, _show(m, α=x)
        return True, ""


class DualStarStrategy(AxiomStrategy):
    """Base de MK2-MK5: en modo guarded sólo se miran los puntos con ⋆ definido"""

    def __init__(self, guarded=False):
        self.guarded = guarded

    def table(self, m):
        return m.dstar if m.dstar is not None else guarded_dual_star(m)

    def defined(self, m, *points):
        table = self.table(m)
        return all(table[p] is not None for p in points)

    def undefined(self, m):
        """Primer punto sin ⋆ (sólo relevante en modo literal)"""
        if self.guarded:
            return None
        table = self.table(m)
        return next((x for x in m.elements if table[x] is None), None)

    def validate(self, m):
        missing = self.undefined(m)
        if missing is not None:
            return False, f"{_show(m, α=missing)} ⋆ indefinido"
        return self.check(m, self.table(m))

    @abstractmethod
    def check(self, m, d) -> tuple[bool, str]:
        pass


class MK2Strategy(DualStarStrategy):
    """⋆ monótona"""
    name = 'MK2'

    def check(self, m, d):
        for x, y in itertools.product(m.elements, repeat=2):
            if d[x] is None or d[y] is None:
                continue
            if m.leq(x, y) and not m.leq(d[x], d[y]):
                return False, _show(m, α=x, β=y)
        return True, ""


class MK3Strategy(DualStarStrategy):
    """1 ≤ α⋆ y α⋆·α⋆ ≤ α⋆"""
    name = 'MK3'

    def check(self, m, d):
        for x in m.elements:
            if d[x] is None:
                continue
            if not m.leq(m.one, d[x]) or not m.leq(m.comp[d[x]][d[x]], d[x]):
                return False, _show(m, α=x)
        return True, ""


class MK4Strategy(DualStarStrategy):
    """α⋆ ≤ α y α⋆ ≤ α⋆⋆"""
    name = 'MK4'

    def check(self, m, d):
        for x in m.elements:
            if d[x] is None:
                continue
            if not m.leq(d[x], x):
                return False, _show(m, α=x)
            if d[d[x]] is not None and not m.leq(d[x], d[d[x]]):
                return False, _show(m, α=x)
        return True, ""


class MK5Strategy(DualStarStrategy):
    """β ≤ α, 1 ≤ β, β·β ≤ β implican β ≤ α⋆"""
    name = 'MK5'

    def check(self, m, d):
        for x in m.elements:
            if d[x] is None:
                continue
            for b in m.specials:
                if m.leq(b, x) and not m.leq(b, d[x]):
                    return False, _show(m, α=x, β=b)
        return True, ""


class CollapseStrategy(AxiomStrategy):
    """MK3 y MK4 juntos dan 1 ≤ α⋆ ≤ α para todo α"""
    name = 'MK3+MK4'

    def validate(self, m):
        for x in m.elements:
            if not m.leq(m.one, x):
                return False, f"{_show(m, α=x)} 1 ≤ α⋆ ≤ α"
        return True, ""


class H1Strategy(AxiomStrategy):
    """A cumple K1 y K2"""
    name = 'H1'

    def validate(self, H):
        for strategy in (K1Strategy(), K2Strategy()):
            ok, witness = strategy.validate(H.general)
            if not ok:
                return False, witness
        return True, ""


class H2Strategy(AxiomStrategy):
    """(S, ⊔, 0_s) semirretículo con mínimo"""
    name = 'H2'

    def validate(self, H):
        j = H.sjoin
        for x in H.s_elements:
            if j[x][x] != x or j[H.szero][x] != x:
                return False, f"ξ={H.s_label(x)}"
        for x, y, z in itertools.product(H.s_elements, repeat=3):
            if j[x][y] != j[y][x] or j[j[x][y]][z] != j[x][j[y][z]]:
                return False, f"ξ={H.s_label(x)} χ={H.s_label(y)} ζ={H.s_label(z)}"
        return True, ""


class H3Strategy(AxiomStrategy):
    """⊗₁ y ⊗₂ preservan ∪ en la coordenada General y son monótonos en la Special"""
    name = 'H3'

    def validate(self, H):
        A = H.general
        for j in H.s_elements:
            for x, y in itertools.product(A.elements, repeat=2):
                if H.tensor1(j, A.join[x][y]) != A.join[H.tensor1(j, x)][H.tensor1(j, y)]:
                    return False, f"ξ={H.s_label(j)} {_show(A, α=x, β=y)}"
                if H.tensor2(A.join[x][y], j) != A.join[H.tensor2(x, j)][H.tensor2(y, j)]:
                    return False, f"ξ={H.s_label(j)} {_show(A, α=x, β=y)}"
        for j, k in itertools.product(H.s_elements, repeat=2):
            if not H.s_leq(j, k):
                continue
            for x in A.elements:
                if not A.leq(H.tensor1(j, x), H.tensor1(k, x)) or not A.leq(H.tensor2(x, j), H.tensor2(x, k)):
                    return False, f"ξ={H.s_label(j)} χ={H.s_label(k)} {_show(A, α=x)}"
        return True, ""


class H4Strategy(AxiomStrategy):
    """γ ⊣ e y γ(e(ξ)) = ξ"""
    name = 'H4'

    def validate(self, H):
        A = H.general
        for j in H.s_elements:
            if H.g(H.e(j)) != j:
                return False, f"ξ={H.s_label(j)}"
            for x in A.elements:
                if H.s_leq(H.g(x), j) != A.leq(x, H.e(j)):
                    return False, f"ξ={H.s_label(j)} {_show(A, α=x)}"
        return True, ""


class H5Strategy(AxiomStrategy):
    """1 ≤ e(ξ) y e(ξ)·e(ξ) ≤ e(ξ)"""
    name = 'H5'

    def validate(self, H):
        A = H.general
        for j in H.s_elements:
            e = H.e(j)
            if not A.leq(A.one, e) or not A.leq(A.comp[e][e], e):
                return False, f"ξ={H.s_label(j)}"
        return True, ""


class H6Strategy(AxiomStrategy):
    """α·β ≤ β ⇒ γ(α) ⊗₁ β ≤ β, y el simétrico con ⊗₂"""
    name = 'H6'

    def validate(self, H):
        A = H.general
        for x, y in itertools.product(A.elements, repeat=2):
            if A.leq(A.comp[x][y], y) and not A.leq(H.tensor1(H.g(x), y), y):
                return False, _show(A, α=x, β=y)
            if A.leq(A.comp[y][x], y) and not A.leq(H.tensor2(y, H.g(x)), y):
                return False, _show(A, α=x, β=y)
        return True, ""


class H7Strategy(AxiomStrategy):
    """e(γ(α)) = ⋃ α^n"""
    name = 'H7'

    def validate(self, H):
        A = H.general
        for x in A.elements:
            if H.e(H.g(x)) != star(A, x):
                return False, _show(A, α=x)
        return True, ""


class HM4Strategy(AxiomStrategy):
    """e ⊣ ι e ι(e(ξ)) = ξ donde ι está definido"""
    name = 'HM4'

    def __init__(self, guarded=False):
        self.guarded = guarded

    def validate(self, H):
        A = H.general
        for x in A.elements:
            if not H.iota_defined(x):
                if self.guarded:
                    continue
                return False, f"{_show(A, α=x)} ι indefinido"
            for j in H.s_elements:
                if A.leq(H.e(j), x) != H.s_leq(j, H.i(x)):
                    return False, f"ξ={H.s_label(j)} {_show(A, α=x)}"
        for j in H.s_elements:
            e = H.e(j)
            if H.iota_defined(e) and H.i(e) != j:
                return False, f"ξ={H.s_label(j)}"
            if not H.iota_defined(e) and not self.guarded:
                return False, f"ξ={H.s_label(j)} ι indefinido"
        return True, ""


class HM6Strategy(AxiomStrategy):
    """1 ≤ β y β·β ≤ β implican γ(β) ≤ ι(β)"""
    name = 'HM6'

    def validate(self, H):
        A = H.general
        for b in A.specials:
            if H.iota_defined(b) and not H.s_leq(H.g(b), H.i(b)):
                return False, _show(A, β=b)
        return True, ""


@dataclass
class ValidationReport:
    model: str
    mode: str
    results: list = field(default_factory=list)
    skipped: int = 0

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.results)

    def failed(self) -> list[str]:
        return [name for name, passed, _ in self.results if not passed]

    def lines(self) -> list[str]:
        lines = []
        for name, passed, witness in self.results:
            lines.append(f"PASS {name}" if passed else f"FAIL {name} {witness}".rstrip())
        if self.skipped:
            lines.append(f"SKIP {self.skipped} puntos fuera del dominio de ⋆/ι")
        return lines


class AxiomValidator:
    """
    Contexto que ejecuta las estrategias de axiomas
    Implementa el patrón Strategy
    """

    def __init__(self, strategies):
        self.strategies = strategies

    def validate_all(self, m) -> tuple[bool, list[str]]:
        """
        Ejecuta todas las estrategias
        Returns: (todas_validas, lista_errores)
        """
        errores = []
        for strategy in self.strategies:
            es_valido, testigo = strategy.validate(m)
            if not es_valido:
                errores.append(f"{strategy.name} {testigo}".rstrip())
        return len(errores) == 0, errores

    def report(self, m, mode) -> ValidationReport:
        report = ValidationReport(m.name, mode)
        for strategy in self.strategies:
            passed, witness = strategy.validate(m)
            report.results.append((strategy.name, passed, witness))
        return report


_KLEENE = (K1Strategy, K2Strategy, K3Strategy, K4Strategy, K5Strategy, K6Strategy)
_MEASURABLE = (MK2Strategy, MK3Strategy, MK4Strategy, MK5Strategy)
_HETEROGENEOUS = (H1Strategy, H2Strategy, H3Strategy, H4Strategy, H5Strategy, H6Strategy, H7Strategy)
MODES = ('kleene', 'measurable-literal', 'measurable-guarded', 'heterogeneous')


def validator_for(m, mode: str) -> AxiomValidator:
    if isinstance(m, HeterogeneousAlgebra):
        strategies = [cls() for cls in _HETEROGENEOUS]
        if m.iota is not None:
            guarded = m.mode is HMode.GUARDED
            strategies += [HM4Strategy(guarded), HM6Strategy()]
        return AxiomValidator(strategies)
    if mode not in MODES[:3]:
        raise ValueError(f"modo desconocido para un álgebra finita: {mode!r}")
    strategies = [cls() for cls in _KLEENE]
    if mode != 'kleene':
        guarded = mode == 'measurable-guarded'
        strategies += [cls(guarded) for cls in _MEASURABLE]
        if not guarded:
            strategies.append(CollapseStrategy())
    return AxiomValidator(strategies)


def validate(m, mode: str = 'kleene') -> ValidationReport:
    """Chequeo exhaustivo de cada axioma del modo; las fallas traen testigo"""
    if isinstance(m, HeterogeneousAlgebra):
        mode = 'heterogeneous'
    report = validator_for(m, mode).report(m, mode)
    if isinstance(m, HeterogeneousAlgebra):
        if m.mode is HMode.GUARDED:
            report.skipped = sum(1 for x in m.general.elements if not m.iota_defined(x))
    elif mode == 'measurable-guarded':
        table = m.dstar if m.dstar is not None else guarded_dual_star(m)
        report.skipped = sum(1 for v in table if v is None)
    logger.debug("validación de %s (%s): %s", m.name, mode, report.failed() or 'ok')
    return report


# ============================================================================
# MODELOS PREDEFINIDOS
# ============================================================================

def b2() -> FiniteAlgebra:
    """0 < 1, ∪ = max, · = min"""
    return with_star(FiniteAlgebra(
        join=((0, 1), (1, 1)), comp=((0, 0), (0, 1)), one=1, zero=0, name='B2',
    ))


def singleton() -> FiniteAlgebra:
    return FiniteAlgebra(join=((0,),), comp=((0,),), one=0, zero=0, star=(0,), dstar=(0,),
                         name='singleton')


def _relation_label(mask, k):
    pairs = [f"{i}{j}" for i, j in itertools.product(range(k), repeat=2) if mask >> (i * k + j) & 1]
    return '{' + ','.join(pairs) + '}'


def _closure_mask(mask, k):
    graph = nx.DiGraph()
    graph.add_nodes_from(range(k))
    graph.add_edges_from((i, j) for i, j in itertools.product(range(k), repeat=2)
                         if mask >> (i * k + j) & 1)
    closure = nx.transitive_closure(graph, reflexive=True)
    return sum(1 << (i * k + j) for i, j in closure.edges)


@lru_cache(maxsize=None)
def rel(k: int) -> FiniteAlgebra:
    """Todas las relaciones sobre k puntos: ∪ unión, · composición, * clausura refleja-transitiva"""
    if not 1 <= k <= 3:
        raise ValueError(f"rel(k) está disponible para 1 ≤ k ≤ 3, no {k}")
    n = 1 << (k * k)
    row = [(1 << k) - 1 << (i * k) for i in range(k)]

    def compose(r, s):
        result = 0
        for i, j in itertools.product(range(k), repeat=2):
            if r >> (i * k + j) & 1:
                successors = (s & row[j]) >> (j * k)
                result |= successors << (i * k)
        return result

    identity = sum(1 << (i * k + i) for i in range(k))
    return FiniteAlgebra(
        join=tuple(tuple(r | s for s in range(n)) for r in range(n)),
        comp=tuple(tuple(compose(r, s) for s in range(n)) for r in range(n)),
        one=identity,
        zero=0,
        star=tuple(_closure_mask(r, k) for r in range(n)),
        name=f"rel({k})",
        labels=tuple(_relation_label(r, k) for r in range(n)),
    )


def relation(k: int, pairs) -> int:
    """Índice en rel(k) de la relación dada por pares"""
    return sum(1 << (i * k + j) for i, j in pairs)


BUILTINS = {
    'b2': b2,
    'singleton': singleton,
    'rel1': lambda: rel(1),
    'rel2': lambda: rel(2),
    'rel3': lambda: rel(3),
}


# ============================================================================
# ENUMERACIÓN
# ============================================================================

def _orders(n):
    """Tablas ∪ de los órdenes sobre n ≥ 2 elementos con 0 mínimo que son semirretículos"""
    free = [(x, y) for x, y in itertools.permutations(range(1, n), 2)]
    for bits in itertools.product((False, True), repeat=len(free)):
        leq = [[x == y or x == 0 for y in range(n)] for x in range(n)]
        for (x, y), bit in zip(free, bits):
            leq[x][y] = bit
        if any(leq[x][y] and leq[y][x] and x != y for x, y in free):
            continue
        if any(leq[x][y] and leq[y][z] and not leq[x][z]
               for x, y, z in itertools.product(range(n), repeat=3)):
            continue
        join = []
        for x in range(n):
            row = []
            for y in range(n):
                upper = [z for z in range(n) if leq[x][z] and leq[y][z]]
                least = [z for z in upper if all(leq[z][w] for w in upper)]
                if not least:
                    break
                row.append(least[0])
            else:
                join.append(tuple(row))
                continue
            break
        if len(join) == n:
            yield tuple(join)


def _compositions(n, join):
    cells = [(x, y) for x, y in itertools.product(range(2, n), repeat=2)]
    for values in itertools.product(range(n), repeat=len(cells)):
        comp = [[0 if 0 in (x, y) else (y if x == 1 else x if y == 1 else None)
                 for y in range(n)] for x in range(n)]
        for (x, y), value in zip(cells, values):
            comp[x][y] = value
        if all(
            comp[comp[x][y]][z] == comp[x][comp[y][z]]
            and comp[x][join[y][z]] == join[comp[x][y]][comp[x][z]]
            and comp[join[y][z]][x] == join[comp[y][x]][comp[z][x]]
            for x, y, z in itertools.product(range(n), repeat=3)
        ):
            yield tuple(tuple(row) for row in comp)


def _is_canonical(n, join, comp):
    key = (join, comp)
    for perm in itertools.permutations(range(2, n)):
        p = (0, 1) + perm
        relabelled = tuple(
            tuple(tuple(p[table[x][y]] for y in sorted(range(n), key=lambda v: p[v]))
                  for x in sorted(range(n), key=lambda v: p[v]))
            for table in (join, comp)
        )
        if relabelled < key:
            return False
    return True


def kleene_models(size: int):
    """Álgebras de Kleene de tamaño `size` salvo isomorfismo, con * calculada"""
    if size == 1:
        yield FiniteAlgebra(join=((0,),), comp=((0,),), one=0, zero=0, star=(0,), name="K1.0")
        return
    count = 0
    for join in _orders(size):
        for comp in _compositions(size, join):
            if _is_canonical(size, join, comp):
                model = FiniteAlgebra(join=join, comp=comp, one=1, zero=0, name=f"K{size}.{count}")
                count += 1
                yield with_star(model)


def enumerate_models(max_size: int, mode: str = 'kleene'):
    """Modelos validados de tamaño 1..max_size salvo isomorfismo.

    measurable-literal conserva sólo los que admiten ⋆ total válida;
    measurable-guarded agrega la ⋆ parcial (mayor especial bajo α).
    """
    cap = get_setting('MKLEENE_MODEL_SIZE_CAP')
    if max_size > cap:
        raise EnumerationCapExceeded(f"tamaño {max_size} supera el límite configurado {cap}")
    if mode not in MODES[:3]:
        raise ValueError(f"modo desconocido {mode!r}")
    for size in range(1, max_size + 1):
        for model in kleene_models(size):
            if mode != 'kleene':
                model = replace(model, dstar=guarded_dual_star(model))
            if validate(model, mode).ok:
                yield model
