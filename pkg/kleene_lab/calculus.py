"""
Reglas de D.MKL y chequeo de derivaciones.

Cada regla de doble línea aporta dos esquemas dirigidos (`_fwd` de arriba
hacia abajo tal como se dibuja, `_bwd` al revés). El chequeo es un calce
sintáctico de patrones: primero la conclusión, después las premisas con las
metavariables ya ligadas. Las reglas con metavariables frescas toman la
parte fresca de la conclusión escrita.

La regla ω se representa con una familia de premisas: miembro n = 0
(Γ^(0) := Φ), base n = 1 y una plantilla de paso n ↦ n + 1 donde Γ^(n)
es un átomo estructural opaco.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

from .conf import get_setting
from .exceptions import (
    BaseMismatch, KleeneLabError, NotPrincipal, RuleMismatch, ShapeError,
    StepConclusionMismatch, StepHypothesisMismatch, UnknownRule, ZeroMemberMismatch,
)
from .syntax import (
    Atom, BBox, BoxF, Bullet, Circ, Comp, FDia, Formula, FormulaVar, Kind, Leaf,
    LeftRes, Odot, One, Phi, Pow, RightRes, Sequent, StructVar, Union, Zero,
    children, metavariables, parse_pattern, power, render, replace_powers, walk,
)

logger = logging.getLogger(__name__)

HYP = 'hyp'


class RuleKind(str, enum.Enum):
    AXIOM = 'axiom'
    UNARY = 'unary'
    BINARY = 'binary'
    OMEGA = 'omega'


# Claves de los patrones en texto y la metavariable que representan
METAVARS = {
    'G': StructVar('Γ'),
    'D': StructVar('Δ'),
    'T': StructVar('Θ'),
    'G1': StructVar('Γ1'),
    'G2': StructVar('Γ2'),
    'G3': StructVar('Γ3'),
    'P': StructVar('Π', Kind.SPECIAL),
    'X': StructVar('Ξ', Kind.SPECIAL),
    'S': StructVar('Σ', Kind.SPECIAL),
    'A': FormulaVar('α'),
    'B': FormulaVar('β'),
    'A1': FormulaVar('α1'),
    'A2': FormulaVar('α2'),
    'Z': FormulaVar('ξ', Kind.SPECIAL),
    'a': FormulaVar('a', atomic=True),
}


@dataclass(frozen=True)
class RuleSchema:
    name: str
    premises: tuple[Sequent, ...]
    conclusion: Sequent
    kind: RuleKind
    direction: str | None = None
    group: str = 'structural'
    invertible: bool = False
    omega_start: int = 0

    @property
    def fresh_variables(self) -> frozenset:
        seen = set()
        for premise in self.premises:
            seen |= metavariables(premise)
        return frozenset(metavariables(self.conclusion) - seen)

    @property
    def introduces_fresh(self) -> bool:
        return self.kind is not RuleKind.AXIOM and bool(self.fresh_variables)

    @property
    def metavariables(self) -> frozenset:
        found = set(metavariables(self.conclusion))
        for premise in self.premises:
            found |= metavariables(premise)
        return frozenset(found)


def _schema(name, premises, conclusion, direction=None, group='structural', invertible=False):
    premises = tuple(parse_pattern(p, METAVARS) for p in premises)
    kind = (RuleKind.AXIOM, RuleKind.UNARY, RuleKind.BINARY)[len(premises)]
    return RuleSchema(name, premises, parse_pattern(conclusion, METAVARS), kind,
                      direction, group, invertible)


def _double(name, top, bottom, group='display'):
    return [
        _schema(f"{name}_fwd", [top], bottom, 'forward', group, True),
        _schema(f"{name}_bwd", [bottom], top, 'backward', group, True),
    ]


def _omega_schema(name='omega', start=0):
    return RuleSchema(
        name,
        (parse_pattern('pow(G, n) |- D', METAVARS),),
        parse_pattern('o(b(G)) |- D', METAVARS),
        RuleKind.OMEGA, group='omega', omega_start=start,
    )


def _build_catalog():
    rules = [
        _schema('Id', [], 'a |- a', group='axiom'),
        _schema('Cut_g', ['G |- A', 'A |- D'], 'G |- D', group='cut'),
        _schema('Cut_s', ['P |- Z', 'Z |- X'], 'P |- X', group='cut'),
    ]
    rules += _double('res1', '(G , D) |- T', 'D |- (G > T)')
    rules += _double('res2', '(G , D) |- T', 'G |- (T < D)')
    rules += _double('adj1', 'G |- o(X)', 'b(G) |- X')
    rules += _double('adj2', 'o(X) |- G', 'X |- b(G)')
    rules += _double('PhiL', 'G |- D', '(I , G) |- D', group='unit')
    rules += _double('PhiR', 'G |- D', '(G , I) |- D', group='unit')
    rules += _double('assoc', '((G1 , G2) , G3) |- D', '(G1 , (G2 , G3)) |- D')
    rules += [
        _schema('PhiW', ['G |- I'], 'G |- D'),
        _schema('one', [], 'I |- o(P)', group='axiom'),
        _schema('abs', ['G |- o(P)', 'D |- o(P)'], '(G , D) |- o(P)'),
        _schema('b_bal', ['P |- S'], 'b(o(P)) |- b(o(S))'),
    ]
    rules += _double('w_bal', 'P |- X', 'o(P) |- o(X)', group='structural')
    rules += [
        _omega_schema(),
        _schema('circC', ['(o(P) , o(P)) |- D'], 'o(P) |- D'),
        _schema('one_L', ['I |- D'], '1 |- D', group='operational', invertible=True),
        _schema('one_R', [], 'I |- 1', group='axiom'),
        _schema('zero_L', [], '0 |- I', group='axiom'),
        _schema('zero_R', ['G |- I'], 'G |- 0', group='operational', invertible=True),
        _schema('cup_L', ['A1 |- D', 'A2 |- D'], '(A1 + A2) |- D', group='operational', invertible=True),
        _schema('cup_R1', ['G |- A1'], 'G |- (A1 + A2)', group='operational'),
        _schema('cup_R2', ['G |- A2'], 'G |- (A1 + A2)', group='operational'),
        _schema('cdot_L', ['(A , B) |- D'], '(A . B) |- D', group='operational', invertible=True),
        _schema('cdot_R', ['G |- A', 'D |- B'], '(G , D) |- (A . B)', group='operational'),
        _schema('fdia_L', ['b(A) |- P'], 'fdia(A) |- P', group='operational', invertible=True),
        _schema('fdia_R', ['G |- A'], 'b(G) |- fdia(A)', group='operational'),
        _schema('bbox_L', ['A |- G'], 'bbox(A) |- b(G)', group='operational'),
        _schema('bbox_R', ['P |- b(A)'], 'P |- bbox(A)', group='operational', invertible=True),
        _schema('box_L', ['o(Z) |- G'], 'box(Z) |- G', group='operational', invertible=True),
        _schema('box_R', ['G |- o(Z)'], 'G |- box(Z)', group='operational', invertible=True),
    ]
    return rules


_CATALOG = _build_catalog()
_BY_NAME = {rule.name: rule for rule in _CATALOG}


def rule_catalog() -> list[RuleSchema]:
    return list(_CATALOG)


def find_rule(name: str) -> RuleSchema | None:
    return _BY_NAME.get(name)


def get_rule(name: str) -> RuleSchema:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise UnknownRule(f"regla desconocida: {name!r}") from None


def mutated_rules() -> list[RuleSchema]:
    """Variantes deliberadamente incorrectas; el barrido de corrección debe rechazarlas"""
    return [
        _schema('abs_drop_premise', ['G |- o(P)'], '(G , D) |- o(P)'),
        _omega_schema('omega_from_one', start=1),
        _schema('one_unguarded', [], 'I |- D', group='axiom'),
        _schema('cup_L_drop_premise', ['A1 |- D'], '(A1 + A2) |- D', group='operational'),
        _schema('res_wrong_side', ['(G , D) |- T'], 'G |- (D > T)'),
    ]


# ============================================================================
# CALCE DE PATRONES
# ============================================================================

def _match(pattern, term, bindings) -> bool:
    if isinstance(pattern, StructVar):
        if getattr(term, 'kind', None) is not pattern.kind or isinstance(term, Formula):
            return False
        return bindings.setdefault(pattern, term) == term
    if isinstance(pattern, FormulaVar):
        if not isinstance(term, Formula) or term.kind is not pattern.kind:
            return False
        if pattern.atomic and not isinstance(term, Atom):
            return False
        return bindings.setdefault(pattern, term) == term
    if type(pattern) is not type(term):
        return False
    if isinstance(pattern, Pow):
        return pattern.index == term.index and _match(pattern.body, term.body, bindings)
    if isinstance(pattern, Atom):
        return pattern == term
    if isinstance(pattern, Sequent):
        return (_match(pattern.precedent, term.precedent, bindings)
                and _match(pattern.succedent, term.succedent, bindings))
    return all(_match(p, t, bindings) for p, t in zip(children(pattern), children(term)))


def match_pattern(pattern, term, bindings=None) -> dict | None:
    """Extiende `bindings` para que `pattern` calce con `term`; None si no calza"""
    extended = dict(bindings or {})
    return extended if _match(pattern, term, extended) else None


def instantiate(pattern, bindings):
    match pattern:
        case StructVar() | FormulaVar():
            return bindings.get(pattern, pattern)
        case Sequent(p, s):
            return Sequent(instantiate(p, bindings), instantiate(s, bindings))
        case Leaf(f):
            value = instantiate(f, bindings)
            return value if not isinstance(value, Formula) else Leaf(value)
        case Pow(b, idx):
            return Pow(instantiate(b, bindings), idx)
        case Union(l, r) | Comp(l, r) | Odot(l, r) | LeftRes(l, r) | RightRes(l, r):
            return type(pattern)(instantiate(l, bindings), instantiate(r, bindings))
        case BoxF(b) | FDia(b) | BBox(b) | Circ(b) | Bullet(b):
            return type(pattern)(instantiate(b, bindings))
    return pattern


# ============================================================================
# DERIVACIONES
# ============================================================================

@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Sequent
    premises: tuple[Derivation, ...] = ()
    family: PremiseFamily | None = None

    def nodes(self):
        yield self
        for premise in self.premises:
            yield from premise.nodes()
        if self.family is not None:
            for member in self.family.members():
                yield from member.nodes()

    @property
    def height(self) -> int:
        below = [p.height for p in self.premises]
        if self.family is not None:
            below += [m.height for m in self.family.members()]
        return 1 + max(below, default=0)


@dataclass(frozen=True)
class PremiseFamily:
    """Premisas Γ^(n) ⊢ Δ, n ≥ 0: miembro cero, base y plantilla de paso"""
    sequent: Sequent
    base: Derivation
    step: Derivation
    zero: Derivation | None = None
    index: str = 'n'

    def members(self):
        if self.zero is not None:
            yield self.zero
        yield self.base
        yield self.step

    def at_zero(self) -> Sequent:
        return replace_powers(self.sequent, self.index, lambda body: Phi())

    def at_one(self) -> Sequent:
        return replace_powers(self.sequent, self.index, lambda body: body)

    def at_successor(self) -> Sequent:
        return replace_powers(self.sequent, self.index, lambda body: Odot(body, Pow(body, self.index)))

    def at(self, n: int) -> Sequent:
        if n == 0:
            return self.at_zero()
        return replace_powers(self.sequent, self.index, lambda body: power(body, n))


def hypothesis(sequent: Sequent) -> Derivation:
    """Hoja (hyp) de una plantilla de paso"""
    return Derivation(HYP, sequent)


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    path: tuple = ()
    error: KleeneLabError | None = None
    nodes: int = 0

    @property
    def reason(self) -> str:
        return '' if self.error is None else f"{type(self.error).__name__}: {self.error}"

    def lines(self) -> list[str]:
        if self.ok:
            return [f"OK {self.nodes} nodos"]
        lines = [f"FAIL en {'/'.join(map(str, self.path)) or 'raíz'}", self.reason]
        if isinstance(self.error, RuleMismatch) and self.error.expected is not None:
            lines.append(f"esperado: {self.error.expected}")
            lines.append(f"encontrado: {self.error.found}")
        return lines


class _Checker:

    def __init__(self):
        self.nodes = 0
        self.current = ()

    def check(self, d, path=(), hypothesis=None, in_step=False):
        self.nodes += 1
        self.current = path
        if d.rule == HYP:
            self._check_hypothesis(d, path, hypothesis)
            return
        schema = get_rule(d.rule)
        if schema.kind is RuleKind.OMEGA:
            self._check_omega(d, schema, path, in_step)
            return
        if d.family is not None:
            raise RuleMismatch(f"{d.rule} no lleva familia de premisas", path)
        if len(d.premises) != len(schema.premises):
            raise RuleMismatch(
                f"{d.rule} espera {len(schema.premises)} premisas y tiene {len(d.premises)}", path)
        bindings = match_pattern(schema.conclusion, d.conclusion)
        if bindings is None:
            raise RuleMismatch(f"la conclusión no es instancia de {d.rule}", path,
                               render(schema.conclusion), render(d.conclusion))
        for position, (pattern, premise) in enumerate(zip(schema.premises, d.premises)):
            extended = match_pattern(pattern, premise.conclusion, bindings)
            if extended is None:
                raise RuleMismatch(
                    f"la premisa {position} no corresponde a {d.rule}", path,
                    render(instantiate(pattern, bindings)), render(premise.conclusion))
            bindings = extended
        for position, premise in enumerate(d.premises):
            self.check(premise, path + (position,), hypothesis, in_step)

    def _check_hypothesis(self, d, path, hypothesis):
        if hypothesis is None:
            raise RuleMismatch("(hyp) fuera de una plantilla de paso", path)
        if d.premises or d.family is not None:
            raise RuleMismatch("(hyp) es una hoja", path)
        if d.conclusion != hypothesis:
            raise StepHypothesisMismatch(
                "la hipótesis no es la familia en n", path, render(hypothesis), render(d.conclusion))

    def _check_omega(self, d, schema, path, in_step):
        if in_step:
            raise RuleMismatch("ω dentro de una plantilla de paso", path)
        if d.family is None or d.premises:
            raise RuleMismatch(f"{d.rule} necesita exactamente una familia de premisas", path)
        bindings = match_pattern(schema.conclusion, d.conclusion)
        if bindings is None:
            raise RuleMismatch(f"la conclusión no es instancia de {d.rule}", path,
                               render(schema.conclusion), render(d.conclusion))
        gamma, delta = bindings[METAVARS['G']], bindings[METAVARS['D']]
        expected = Sequent(Pow(gamma, d.family.index), delta)
        if d.family.sequent != expected:
            raise RuleMismatch("la familia no corresponde a la conclusión del ω", path,
                               render(expected), render(d.family.sequent))
        self.verify_family(d.family, path + ('family',), schema.omega_start)

    def verify_family(self, fam, path=(), start=0):
        if start == 0:
            if fam.zero is None:
                raise ZeroMemberMismatch("falta el miembro n = 0 de la familia", path + ('zero',))
            if fam.zero.conclusion != fam.at_zero():
                raise ZeroMemberMismatch("el miembro cero no concluye la familia en n = 0",
                                         path + ('zero',), render(fam.at_zero()),
                                         render(fam.zero.conclusion))
            self.check(fam.zero, path + ('zero',))
        if fam.base.conclusion != fam.at_one():
            raise BaseMismatch("la base no concluye la familia en n = 1", path + ('base',),
                               render(fam.at_one()), render(fam.base.conclusion))
        self.check(fam.base, path + ('base',))
        self.check(fam.step, path + ('step',), hypothesis=fam.sequent, in_step=True)
        if fam.step.conclusion != fam.at_successor():
            raise StepConclusionMismatch("el paso no concluye la familia en n + 1", path + ('step',),
                                         render(fam.at_successor()), render(fam.step.conclusion))


def check_derivation(d: Derivation) -> CheckReport:
    checker = _Checker()
    try:
        checker.check(d)
    except KleeneLabError as exc:
        logger.debug("derivación rechazada: %s", exc)
        path = exc.path if isinstance(exc, RuleMismatch) else checker.current
        return CheckReport(False, path, exc, checker.nodes)
    return CheckReport(True, nodes=checker.nodes)


def verify_omega_family(fam: PremiseFamily, start: int = 0) -> None:
    """Certifica Γ^(n) ⊢ Δ para todo n ≥ start; lanza OmegaFamilyError si falla"""
    _Checker().verify_family(fam, start=start)


def substitute_hypothesis(template: Derivation, replacement: Derivation) -> Derivation:
    if template.rule == HYP:
        return replacement
    return Derivation(
        template.rule, template.conclusion,
        tuple(substitute_hypothesis(p, replacement) for p in template.premises),
        template.family,
    )


def _instantiate_template(template, index, body, n, replacement):
    """Plantilla de paso con Pow(Γ, n) desplegado a Γ^(n) y (hyp) reemplazado"""
    def unfold(d):
        if d.rule == HYP:
            return replacement
        conclusion = replace_powers(d.conclusion, index, lambda b: power(b, n))
        return Derivation(d.rule, conclusion, tuple(unfold(p) for p in d.premises), d.family)
    return unfold(template)


@dataclass(frozen=True)
class BoundedReport:
    ok: bool
    bound: int
    failures: tuple[str, ...] = ()
    flag: str = 'unsound-bounded'

    def lines(self) -> list[str]:
        head = f"{'OK' if self.ok else 'FAIL'} ω n≤{self.bound} ({self.flag})"
        return [head] + [f"  {failure}" for failure in self.failures]


def verify_omega_bounded(fam: PremiseFamily, bound: int | None = None) -> BoundedReport:
    """Modo exploratorio: chequea los miembros concretos n = 0..bound (desde 1 si no hay miembro cero)"""
    if bound is None:
        bound = get_setting('MKLEENE_OMEGA_BOUND')
    start = 0 if fam.zero is not None else 1
    failures = []
    members = {}
    if fam.zero is not None:
        members[0] = fam.zero
    members[1] = fam.base
    bodies = {node.body for node in _pow_nodes(fam.sequent, fam.index)}
    body = next(iter(bodies)) if len(bodies) == 1 else None
    for n in range(1, bound):
        if body is None:
            failures.append("la familia no tiene un único Γ en pow(Γ, n)")
            break
        members[n + 1] = _instantiate_template(fam.step, fam.index, body, n, members[n])
    for n in range(start, bound + 1):
        member = members.get(n)
        if member is None:
            failures.append(f"n={n}: sin derivación")
            continue
        report = check_derivation(member)
        if not report.ok:
            failures.append(f"n={n}: {report.reason}")
        elif member.conclusion != fam.at(n):
            failures.append(f"n={n}: concluye {render(member.conclusion)}")
    logger.info("familia ω verificada sólo hasta n=%s (unsound-bounded)", bound)
    return BoundedReport(not failures, bound, tuple(failures))


def _pow_nodes(x, index):
    return [node for node in walk(x) if isinstance(node, Pow) and node.index == index]


# ============================================================================
# APLICACIÓN HACIA ADELANTE
# ============================================================================

def apply_rule(name: str, *premises: Derivation, family: PremiseFamily | None = None, **fresh) -> Derivation:
    """Aplica `name` a las premisas y calcula la conclusión.

    Las metavariables frescas se pasan por nombre de patrón
    (p. ej. ``apply_rule('PhiW', d, D=estructura)``).
    """
    schema = get_rule(name)
    if schema.kind is RuleKind.OMEGA:
        if family is None:
            raise RuleMismatch("ω necesita una familia de premisas")
        pattern = Sequent(Pow(METAVARS['G'], family.index), METAVARS['D'])
        bindings = match_pattern(pattern, family.sequent)
        if bindings is None:
            raise RuleMismatch("la familia no tiene la forma pow(Γ, n) ⊢ Δ", (),
                               render(pattern), render(family.sequent))
        return Derivation(name, instantiate(schema.conclusion, bindings), family=family)
    if len(premises) != len(schema.premises):
        raise RuleMismatch(f"{name} espera {len(schema.premises)} premisas")
    bindings = {}
    for position, (pattern, premise) in enumerate(zip(schema.premises, premises)):
        extended = match_pattern(pattern, premise.conclusion, bindings)
        if extended is None:
            raise RuleMismatch(f"la premisa {position} no calza con {name}", (),
                               render(instantiate(pattern, bindings)), render(premise.conclusion))
        bindings = extended
    for key, value in fresh.items():
        variable = METAVARS[key]
        if isinstance(variable, StructVar) and isinstance(value, Formula):
            value = Leaf(value)
        if not _match(variable, value, bindings):
            raise RuleMismatch(f"{key} no es compatible con {name}", (), variable.name, render(value))
    missing = metavariables(schema.conclusion) - bindings.keys()
    if missing:
        names = ', '.join(sorted(v.name for v in missing))
        raise RuleMismatch(f"{name} necesita las metavariables frescas {names}")
    return Derivation(name, instantiate(schema.conclusion, bindings), tuple(premises))


def derive_identity(f: Formula) -> Derivation:
    """Derivación de f ⊢ f por inducción en f"""
    match f:
        case Atom():
            return apply_rule('Id', a=f)
        case One():
            return apply_rule('one_L', apply_rule('one_R'))
        case Zero():
            return apply_rule('zero_R', apply_rule('zero_L'))
        case Union(l, r):
            return apply_rule(
                'cup_L',
                apply_rule('cup_R1', derive_identity(l), A2=r),
                apply_rule('cup_R2', derive_identity(r), A1=l),
            )
        case Comp(l, r):
            return apply_rule('cdot_L', apply_rule('cdot_R', derive_identity(l), derive_identity(r)))
        case BoxF(x):
            return apply_rule('box_R', apply_rule('box_L', apply_rule('w_bal_fwd', derive_identity(x))))
        case FDia(a):
            return apply_rule('fdia_L', apply_rule('fdia_R', derive_identity(a)))
        case BBox(a):
            return apply_rule('bbox_R', apply_rule('bbox_L', derive_identity(a)))
    raise ShapeError(f"{render(f)} no es una fórmula multi-tipo")


# ============================================================================
# LEMA OMEGA
# ============================================================================

def _formula_of(x):
    return x.formula if isinstance(x, Leaf) and x.kind is Kind.GENERAL else None


def omega_lift(d: Derivation, side: str = 'left') -> PremiseFamily:
    """De α⊙β ⊢ β (o β⊙α ⊢ β) a la familia α^(n)⊙β ⊢ β (o β⊙α^(n) ⊢ β)"""
    report = check_derivation(d)
    if not report.ok:
        raise ShapeError(f"la derivación no chequea: {report.reason}") from report.error
    sequent = d.conclusion
    if not isinstance(sequent.precedent, Odot):
        raise ShapeError(f"{render(sequent)} no tiene la forma α⊙β ⊢ β")
    beta = _formula_of(sequent.succedent)
    if side == 'left':
        alpha, other = _formula_of(sequent.precedent.left), _formula_of(sequent.precedent.right)
    elif side == 'right':
        other, alpha = _formula_of(sequent.precedent.left), _formula_of(sequent.precedent.right)
    else:
        raise ShapeError(f"lado desconocido {side!r}")
    if alpha is None or beta is None or other != beta:
        raise ShapeError(f"{render(sequent)} no tiene la forma requerida ({side})")

    a, b = Leaf(alpha), Leaf(beta)
    if side == 'left':
        fam_sequent = Sequent(Odot(Pow(a), b), b)
        hyp = hypothesis(fam_sequent)
        absorbed = apply_rule('assoc_bwd', apply_rule('cdot_R', derive_identity(alpha), hyp))
        step = apply_rule('Cut_g', absorbed, apply_rule('cdot_L', d))
        zero = apply_rule('PhiL_fwd', derive_identity(beta))
    else:
        fam_sequent = Sequent(Odot(b, Pow(a)), b)
        hyp = hypothesis(fam_sequent)
        displayed = apply_rule('Cut_g', d, apply_rule('res2_fwd', hyp))
        step = apply_rule('assoc_fwd', apply_rule('res2_bwd', displayed))
        zero = apply_rule('PhiR_fwd', derive_identity(beta))
    return PremiseFamily(fam_sequent, d, step, zero)


def _inverse(name):
    if name.endswith('_fwd'):
        return name[:-4] + '_bwd'
    if name.endswith('_bwd'):
        return name[:-4] + '_fwd'
    raise ShapeError(f"{name} no es una regla de display reversible")


def omega_display(fam: PremiseFamily, rules: list[str]) -> PremiseFamily:
    """Empuja cada miembro de la familia por reglas reversibles (p. ej. res2_fwd)"""
    inverses = [_inverse(name) for name in reversed(rules)]

    def push(d):
        for name in rules:
            d = apply_rule(name, d)
        return d

    def pull(d):
        for name in inverses:
            d = apply_rule(name, d)
        return d

    displayed = push(hypothesis(fam.sequent)).conclusion
    step = push(substitute_hypothesis(fam.step, pull(hypothesis(displayed))))
    zero = push(fam.zero) if fam.zero is not None else None
    return PremiseFamily(displayed, push(fam.base), step, zero, fam.index)


def omega_closure(zero: Derivation, base: Derivation, absorb: Derivation) -> PremiseFamily:
    """Familia Γ^(n) ⊢ β a partir de Φ ⊢ β, Γ ⊢ β y Γ⊙β ⊢ β"""
    gamma, beta = base.conclusion.precedent, base.conclusion.succedent
    if _formula_of(beta) is None:
        raise ShapeError(f"{render(beta)} debe ser una fórmula General")
    if zero.conclusion != Sequent(Phi(), beta):
        raise ShapeError(f"el miembro cero debe concluir I |- {render(beta)}")
    if absorb.conclusion != Sequent(Odot(gamma, beta), beta):
        raise ShapeError(f"la absorción debe concluir {render(Sequent(Odot(gamma, beta), beta))}")
    fam_sequent = Sequent(Pow(gamma), beta)
    displayed = apply_rule('Cut_g', hypothesis(fam_sequent), apply_rule('res1_fwd', absorb))
    return PremiseFamily(fam_sequent, base, apply_rule('res1_bwd', displayed), zero)


# ============================================================================
# CORTES PRINCIPALES
# ============================================================================

# conectivo principal -> (reglas derechas que lo introducen, reglas izquierdas)
_INTRODUCTIONS = {
    Atom: ({'Id'}, {'Id'}),
    One: ({'one_R'}, {'one_L'}),
    Zero: ({'zero_R'}, {'zero_L'}),
    Union: ({'cup_R1', 'cup_R2'}, {'cup_L'}),
    Comp: ({'cdot_R'}, {'cdot_L'}),
    BoxF: ({'box_R'}, {'box_L'}),
    FDia: ({'fdia_R'}, {'fdia_L'}),
    BBox: ({'bbox_R'}, {'bbox_L'}),
}


def cut_formula(d: Derivation) -> Formula:
    return d.premises[0].conclusion.succedent.formula


def cut_formulas(d: Derivation) -> list[Formula]:
    return [cut_formula(node) for node in d.nodes() if node.rule in ('Cut_g', 'Cut_s')]


def principal_pair(f: Formula) -> tuple[Derivation, Derivation]:
    """(X ⊢ f terminando en regla derecha de f, f ⊢ Y terminando en regla izquierda)"""
    match f:
        case Atom():
            return derive_identity(f), derive_identity(f)
        case One():
            return apply_rule('one_R'), derive_identity(f)
        case Zero():
            return derive_identity(f), apply_rule('zero_L')
        case Union(l, r):
            return apply_rule('cup_R1', derive_identity(l), A2=r), derive_identity(f)
        case Comp(l, r):
            return apply_rule('cdot_R', derive_identity(l), derive_identity(r)), derive_identity(f)
        case BoxF(x):
            return derive_identity(f), apply_rule('box_L', apply_rule('w_bal_fwd', derive_identity(x)))
        case FDia(a):
            return apply_rule('fdia_R', derive_identity(a)), derive_identity(f)
        case BBox(a):
            return derive_identity(f), apply_rule('bbox_L', derive_identity(a))
    raise ShapeError(f"{render(f)} no es una fórmula multi-tipo")


def principal_cut(f: Formula) -> Derivation:
    left, right = principal_pair(f)
    return apply_rule('Cut_g' if f.kind is Kind.GENERAL else 'Cut_s', left, right)


def reduce_principal_cut(d: Derivation) -> Derivation:
    """Reescribe un corte principal en cortes sobre subfórmulas propias"""
    if d.rule not in ('Cut_g', 'Cut_s'):
        raise NotPrincipal(f"la raíz es {d.rule}, no un corte")
    left, right = d.premises
    f = cut_formula(d)
    right_rules, left_rules = _INTRODUCTIONS[type(f)]
    if left.rule not in right_rules:
        raise NotPrincipal(f"{render(f)} no es principal a la izquierda ({left.rule})")
    if right.rule not in left_rules:
        raise NotPrincipal(f"{render(f)} no es principal a la derecha ({right.rule})")
    logger.debug("reduciendo corte principal sobre %s", render(f))

    match f:
        case Atom():
            return left
        case One():
            return right.premises[0]
        case Zero():
            return left.premises[0]
        case Union():
            branch = 0 if left.rule == 'cup_R1' else 1
            return apply_rule('Cut_g', left.premises[0], right.premises[branch])
        case Comp():
            # extrapolado: mismo patrón de residuación en cada coordenada
            first, second = left.premises
            body = right.premises[0]
            on_first = apply_rule('Cut_g', first, apply_rule('res2_fwd', body))
            on_second = apply_rule('Cut_g', second, apply_rule('res1_fwd', apply_rule('res2_bwd', on_first)))
            return apply_rule('res1_bwd', on_second)
        case BoxF():
            inner = right.premises[0]
            if not isinstance(inner.conclusion.succedent, Circ):
                raise NotPrincipal("el corte sobre □ξ sólo se reduce cuando la premisa de box_L es ∘ξ ⊢ ∘Ξ")
            special = inner.premises[0] if inner.rule == 'w_bal_fwd' else apply_rule('w_bal_bwd', inner)
            displayed = apply_rule('Cut_s', apply_rule('adj1_fwd', left.premises[0]), special)
            return apply_rule('adj1_bwd', displayed)
        case FDia():
            moved = apply_rule('Cut_g', left.premises[0], apply_rule('adj1_bwd', right.premises[0]))
            return apply_rule('adj1_fwd', moved)
        case BBox():
            # extrapolado: simétrico al caso ♦ usando adj2
            moved = apply_rule('Cut_g', apply_rule('adj2_bwd', left.premises[0]), right.premises[0])
            return apply_rule('adj2_fwd', moved)
    raise NotPrincipal(f"sin reducción para {render(f)}")
