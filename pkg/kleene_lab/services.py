"""
Capa de servicios con patrones de diseño:
- Repository Pattern: acceso a modelos (predefinidos, archivos, enumerados)
- Strategy Pattern: leyes verificadas en cada modelo
- Servicios de barrido: corrección de reglas, invariancia de la traducción,
  identidades y reducción de cortes principales
"""

import itertools
import logging
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path

from .algebra import (
    BUILTINS, HMode, enumerate_models, guarded_dual_star, kernel_remark_witness, lift,
    check_rule_soundness, pointwise_agreement, rel, residuals, roundtrip_check,
    roundtrip_check_h, star, translation_invariance,
)
from .calculus import (
    check_derivation, cut_formulas, get_rule, mutated_rules, principal_cut,
    reduce_principal_cut, rule_catalog,
)
from .conf import get_setting
from .exceptions import IotaPartial, KleeneLabError, ModelFormatError
from .search import Failure, SearchBudget, prove
from .serializers import load_model
from .syntax import Kind, Lang, Leaf, Sequent, formulas_up_to, random_formula, render, walk

logger = logging.getLogger(__name__)


# ============================================================================
# PATRÓN REPOSITORY: Acceso a Modelos
# ============================================================================

class ModelRepository:
    """Repository para obtener álgebras finitas y sus levantamientos"""

    @staticmethod
    def builtin_names():
        return tuple(BUILTINS)

    @staticmethod
    def builtin(name):
        """Modelo predefinido por nombre (b2, singleton, rel1, rel2, rel3)"""
        try:
            return BUILTINS[name]()
        except KeyError:
            raise ModelFormatError(f"modelo predefinido desconocido: {name!r}") from None

    @staticmethod
    def load(path):
        """Lee un archivo de modelo; retorna (modelo, modo)"""
        path = Path(path)
        return load_model(path.read_text(encoding='utf-8'), name=path.stem)

    @staticmethod
    def enumerated(max_size=None, mode='kleene'):
        max_size = max_size or get_setting('MKLEENE_DEFAULT_MAX_SIZE')
        return list(enumerate_models(max_size, mode))

    @staticmethod
    def sweep_models(max_size=None):
        """Modelos enumerados más rel(2), como álgebras de Kleene"""
        return ModelRepository.enumerated(max_size) + [rel(2)]

    @staticmethod
    def lifts(max_size=None, mode='guarded'):
        """Levantamientos K⁺ de los modelos del barrido en el modo pedido"""
        mode = HMode(mode)
        if mode is HMode.LITERAL:
            models = ModelRepository.enumerated(max_size, 'measurable-literal')
        else:
            models = ModelRepository.sweep_models(max_size)
        lifted = []
        for model in models:
            try:
                lifted.append(lift(model, mode))
            except IotaPartial:
                logger.debug("%s no admite ι total; fuera del barrido literal", model.name)
        return lifted


# ============================================================================
# BARRIDO DE CORRECCIÓN
# ============================================================================

@dataclass
class RuleVerdict:
    rule: str
    results: list = field(default_factory=list)

    @property
    def sound(self) -> bool:
        return all(result.sound for result in self.results)

    @property
    def counterexample(self):
        return next((result for result in self.results if not result.sound), None)

    @property
    def skipped(self) -> int:
        return sum(result.skipped for result in self.results)

    def line(self) -> str:
        if self.sound:
            return f"PASS {self.rule} modelos={len(self.results)} skipped={self.skipped}"
        return self.counterexample.line()


class SoundnessService:
    """Corre check_rule_soundness de cada regla sobre todos los levantamientos"""

    def __init__(self, max_size=None, mode='guarded'):
        self.models = ModelRepository.lifts(max_size, mode)

    def check(self, rule) -> RuleVerdict:
        verdict = RuleVerdict(rule.name)
        for H in self.models:
            result = check_rule_soundness(H, rule)
            verdict.results.append(result)
            if not result.sound:
                break
        logger.debug("regla %s: %s", rule.name, 'correcta' if verdict.sound else 'falla')
        return verdict

    def sweep(self, selection='all') -> tuple[bool, list[RuleVerdict]]:
        """
        `all` (catálogo), `mutated` (deben fallar todas) o un nombre de regla
        Returns: (veredicto_positivo, veredictos)
        """
        if selection == 'mutated':
            verdicts = [self.check(rule) for rule in mutated_rules()]
            return all(not v.sound for v in verdicts), verdicts
        if selection == 'all':
            rules = rule_catalog()
        else:
            rules = [rule for rule in rule_catalog() + mutated_rules() if rule.name == selection]
            if not rules:
                rules = [get_rule(selection)]
        verdicts = [self.check(rule) for rule in rules]
        return all(v.sound for v in verdicts), verdicts


# ============================================================================
# PATRÓN STRATEGY: Leyes sobre los modelos
# ============================================================================

class LawStrategy(ABC):
    """Interfaz para una ley que debe valer en todo modelo del barrido"""
    name = ''

    @abstractmethod
    def validate(self, m) -> tuple[bool, str]:
        """
        Verifica la ley en m
        Returns: (se_cumple, testigo)
        """


class ClosureLaw(LawStrategy):
    """α ≤ α*, α* = α**, α ≤ β ⇒ α* ≤ β*"""
    name = 'closure'

    def validate(self, m):
        s = m.star_table
        for x in m.elements:
            if not m.leq(x, s[x]) or s[s[x]] != s[x]:
                return False, f"α={m.label(x)}"
        for x, y in itertools.product(m.elements, repeat=2):
            if m.leq(x, y) and not m.leq(s[x], s[y]):
                return False, f"α={m.label(x)} β={m.label(y)}"
        return True, ""


class RetractionLaw(LawStrategy):
    """γ(e(ξ)) = ξ, e ι(e(ξ)) = ξ donde ι está definido"""
    name = 'retraction'

    def validate(self, m):
        H = lift(m, HMode.GUARDED)
        for j in H.s_elements:
            if H.g(H.e(j)) != j:
                return False, f"ξ={H.s_label(j)} γ"
            if H.iota_defined(H.e(j)) and H.i(H.e(j)) != j:
                return False, f"ξ={H.s_label(j)} ι"
        return True, ""


class RangeLaw(LawStrategy):
    """Range(*) = Range(⋆) = {β : 1 ≤ β, β·β ≤ β}"""
    name = 'range'

    def validate(self, m):
        specials = set(m.specials)
        stars = set(m.star_table)
        dstars = {v for v in guarded_dual_star(m) if v is not None}
        if stars != specials:
            return False, f"Range(*)={sorted(map(m.label, stars))}"
        if dstars != specials:
            return False, f"Range(⋆)={sorted(map(m.label, dstars))}"
        return True, ""


class SufficiencyLaw(LawStrategy):
    """α ≤ β, 1 ≤ β, β·β ≤ β implican α* ≤ β"""
    name = 'sufficiency'

    def validate(self, m):
        for x in m.elements:
            for b in m.specials:
                if m.leq(x, b) and not m.leq(star(m, x), b):
                    return False, f"α={m.label(x)} β={m.label(b)}"
        return True, ""


class ResiduationLaw(LawStrategy):
    """x ≤ α\\β ⇔ α·x ≤ β  y  x ≤ β/α ⇔ x·α ≤ β"""
    name = 'residuation'

    def validate(self, m):
        for a, b in itertools.product(m.elements, repeat=2):
            right, left = residuals(m, a, b)
            for x in m.elements:
                if m.leq(x, right) != m.leq(m.comp[a][x], b):
                    return False, f"α={m.label(a)} β={m.label(b)} x={m.label(x)} \\"
                if m.leq(x, left) != m.leq(m.comp[x][a], b):
                    return False, f"α={m.label(a)} β={m.label(b)} x={m.label(x)} /"
        return True, ""


class RoundTripLaw(LawStrategy):
    """K ≅ (K⁺)₊ y H ≅ (H₊)⁺"""
    name = 'roundtrip'

    def validate(self, m):
        if not roundtrip_check(m):
            return False, "K ≇ (K⁺)₊"
        if not roundtrip_check_h(lift(m, HMode.GUARDED)):
            return False, "H ≇ (H₊)⁺"
        return True, ""


class LawService:
    """
    Contexto que ejecuta las leyes sobre cada modelo
    Implementa el patrón Strategy
    """

    def __init__(self, models=None, witness_models=None):
        self.models = models if models is not None else ModelRepository.sweep_models()
        self.witness_models = witness_models if witness_models is not None else [rel(2), rel(3)]
        self.strategies = [
            ClosureLaw(), RetractionLaw(), RangeLaw(), SufficiencyLaw(),
            ResiduationLaw(), RoundTripLaw(),
        ]

    def validate_all(self, m) -> tuple[bool, list[str]]:
        errores = []
        for strategy in self.strategies:
            es_valido, testigo = strategy.validate(m)
            if not es_valido:
                errores.append(f"{strategy.name} {testigo}".rstrip())
        return len(errores) == 0, errores

    def remark_witness(self):
        """(modelo, ξ, χ) con ξ ⊔ χ ≠ ξ ∪ χ, o None"""
        for m in self.witness_models:
            found = kernel_remark_witness(m)
            if found is not None:
                return m, found[0], found[1]
        return None

    def run(self) -> tuple[bool, list[str]]:
        lines = []
        ok = True
        for m in self.models:
            passed, errores = self.validate_all(m)
            ok = ok and passed
            lines.append(f"PASS {m.name}" if passed else f"FAIL {m.name} " + '; '.join(errores))
        witness = self.remark_witness()
        if witness is None:
            ok = False
            lines.append("FAIL remark sin testigo ξ ⊔ χ ≠ ξ ∪ χ")
        else:
            m, xi, chi = witness
            lines.append(f"PASS remark {m.name} ξ={m.label(xi)} χ={m.label(chi)}")
        return ok, lines


# ============================================================================
# INVARIANCIA DE LA TRADUCCIÓN
# ============================================================================

class InvarianceService:
    """Compara K ⊨ α ≤ β con K⁺ ⊨ αᵗ ≤ βᵗ sobre los modelos enumerados"""

    def __init__(self, max_size=None, formula_depth=2, pair_depth=1):
        self.models = ModelRepository.enumerated(max_size)
        self.formulas = formulas_up_to(formula_depth)
        self.pairs = formulas_up_to(pair_depth)

    def run(self) -> tuple[bool, list[str]]:
        violations = []
        for m in self.models:
            for f in self.formulas:
                mismatch = pointwise_agreement(m, f)
                if mismatch is not None:
                    violations.append(f"FAIL {m.name} {render(f)} {mismatch}")
            for alpha, beta in itertools.product(self.pairs, repeat=2):
                if not translation_invariance(m, alpha, beta):
                    violations.append(f"FAIL {m.name} {render(alpha)} <= {render(beta)}")
        checked = len(self.models) * (len(self.formulas) + len(self.pairs) ** 2)
        return not violations, violations + [f"{checked} comprobaciones, {len(violations)} violaciones"]


# ============================================================================
# MUESTRAS: IDENTIDADES Y CORTES PRINCIPALES
# ============================================================================

def sample_formulas(count, depth=3, seed=None, atom_names=('a', 'b')):
    """`count` fórmulas multi-tipo distintas (una de cada cuatro Special), en orden fijo"""
    rng = random.Random(get_setting('MKLEENE_SAMPLE_SEED') if seed is None else seed)
    seen = {}
    attempts = 0
    while len(seen) < count and attempts < count * 50:
        attempts += 1
        kind = Kind.SPECIAL if rng.random() < 0.25 else Kind.GENERAL
        f = random_formula(rng, depth, kind, Lang.MULTI, atom_names)
        seen.setdefault(f, None)
    return list(seen)


class IdentityService:
    """prove(f ⊢ f) para una muestra de fórmulas"""

    def __init__(self, count=None, depth=3, budget=None, seed=None):
        self.formulas = sample_formulas(count or get_setting('MKLEENE_IDENTITY_SAMPLE'), depth, seed)
        self.budget = budget or SearchBudget()

    def run(self) -> tuple[bool, list[str]]:
        lines = []
        for f in self.formulas:
            result = prove(Sequent(Leaf(f), Leaf(f)), self.budget)
            if isinstance(result, Failure):
                lines.append(f"FAIL {render(f)} {result.describe()}")
        proved = len(self.formulas) - len(lines)
        return not lines, lines + [f"{proved}/{len(self.formulas)} identidades"]


class CutReductionService:
    """Reduce cortes principales generados y verifica conclusión, chequeo y subfórmulas"""

    def __init__(self, count=100, depth=3, seed=None):
        self.formulas = sample_formulas(count, depth, seed)

    @staticmethod
    def foreign_cuts(f, derivation) -> list:
        """Fórmulas de corte de la derivación que no son subfórmulas propias de f"""
        proper = set(walk(f)) - {f}
        return [g for g in cut_formulas(derivation) if g not in proper]

    def check(self, f) -> str | None:
        """Motivo de falla para el corte sobre f, o None"""
        cut = principal_cut(f)
        reduced = reduce_principal_cut(cut)
        if reduced.conclusion != cut.conclusion:
            return f"cambia la conclusión a {render(reduced.conclusion)}"
        report = check_derivation(reduced)
        if not report.ok:
            return report.reason
        outside = self.foreign_cuts(f, reduced)
        if outside:
            return f"corte sobre {render(outside[0])}, que no es subfórmula propia"
        return None

    def run(self) -> tuple[bool, list[str]]:
        lines = []
        for f in self.formulas:
            try:
                problem = self.check(f)
            except KleeneLabError as exc:
                problem = f"{type(exc).__name__}: {exc}"
            if problem is not None:
                lines.append(f"FAIL {render(f)} {problem}")
        reduced = len(self.formulas) - len(lines)
        return not lines, lines + [f"{reduced}/{len(self.formulas)} cortes reducidos"]
