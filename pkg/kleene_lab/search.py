"""
Búsqueda hacia atrás sin corte, acotada, y ejecución del corpus dorado.
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .algebra import HMode, enumerate_models, lift, valid
from .calculus import (
    Derivation, check_derivation, get_rule, instantiate, match_pattern, omega_closure,
)
from .conf import get_setting
from .exceptions import InvalidBudget, KleeneLabError, NoInterpretation
from .serializers import parse_proof
from .syntax import Bullet, Circ, Kind, Leaf, Odot, Phi, Pow, Sequent, parse_sequent, render, walk

logger = logging.getLogger(__name__)

# Orden fijo: axiomas, operacionales invertibles, operacionales, estructurales
# que achican, display, estructurales que agrandan. Sin cortes ni PhiL/R_bwd.
RULE_ORDER = (
    'Id', 'one_R', 'zero_L', 'one',
    'one_L', 'zero_R', 'cup_L', 'cdot_L', 'fdia_L', 'box_L', 'box_R', 'bbox_R',
    'cup_R1', 'cup_R2', 'cdot_R', 'fdia_R', 'bbox_L',
    'w_bal_fwd', 'b_bal', 'PhiL_fwd', 'PhiR_fwd', 'abs',
    'res1_fwd', 'res1_bwd', 'res2_fwd', 'res2_bwd',
    'adj1_fwd', 'adj1_bwd', 'adj2_fwd', 'adj2_bwd',
    'assoc_fwd', 'assoc_bwd',
    'w_bal_bwd', 'PhiW', 'circC',
)
OMEGA_POLICIES = ('schematic', 'off')


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = field(default_factory=lambda: get_setting('MKLEENE_DEFAULT_DEPTH'))
    max_visited: int = field(default_factory=lambda: get_setting('MKLEENE_MAX_VISITED'))
    omega_policy: str = 'schematic'
    refutation_max_size: int = field(default_factory=lambda: get_setting('MKLEENE_REFUTATION_MAX_SIZE'))

    def __post_init__(self):
        for name in ('max_depth', 'max_visited'):
            if getattr(self, name) < 1:
                raise InvalidBudget(f"{name} debe ser positivo, no {getattr(self, name)}")
        if self.refutation_max_size < 0:
            raise InvalidBudget("refutation_max_size no puede ser negativo")
        if self.omega_policy not in OMEGA_POLICIES:
            raise InvalidBudget(f"política ω desconocida {self.omega_policy!r}")


@dataclass(frozen=True)
class Failure:
    reason: str
    countermodel: dict | None = None
    model: str | None = None
    visited: int = 0

    def __bool__(self):
        return False

    def describe(self) -> str:
        if self.reason == 'refuted':
            detail = ' '.join(f"{k}={v}" for k, v in self.countermodel.items())
            return f"refuted en {self.model}: {detail}".rstrip()
        return f"exhausted tras {self.visited} secuentes"


class _BudgetExceeded(Exception):
    pass


class Refuter:
    """Busca contramodelos en los levantamientos guarded de los modelos chicos"""

    def __init__(self, max_size):
        self.models = [lift(m, HMode.GUARDED) for m in enumerate_models(max_size)] if max_size else []
        self.cache = {}

    def countermodel(self, goal):
        if goal in self.cache:
            return self.cache[goal]
        found = None
        if not any(isinstance(node, Pow) for node in walk(goal)):
            for H in self.models:
                try:
                    verdict = valid(H, goal)
                except NoInterpretation:
                    break
                if not verdict:
                    found = (H.name, verdict.countermodel)
                    break
        self.cache[goal] = found
        return found


def _backward(schema, goal):
    bindings = match_pattern(schema.conclusion, goal)
    if bindings is None or not schema.metavariables <= bindings.keys():
        return None
    return tuple(instantiate(p, bindings) for p in schema.premises)


class _Search:

    def __init__(self, budget, refuter):
        self.budget = budget
        self.refuter = refuter
        self.rules = [get_rule(name) for name in RULE_ORDER]
        self.visited = 0
        self.failed = {}

    def prove(self, goal, depth, branch):
        if depth < 1 or goal in branch or self.failed.get(goal, 0) >= depth:
            return None
        self.visited += 1
        if self.visited > self.budget.max_visited:
            raise _BudgetExceeded()
        if self.refuter.countermodel(goal) is not None:
            self.failed[goal] = float('inf')
            return None
        branch = branch | {goal}
        for schema in self.rules:
            premises = _backward(schema, goal)
            if premises is None:
                continue
            proofs = []
            for premise in premises:
                proof = self.prove(premise, depth - 1, branch)
                if proof is None:
                    break
                proofs.append(proof)
            else:
                return Derivation(schema.name, goal, tuple(proofs))
        if self.budget.omega_policy == 'schematic':
            proof = self._omega(goal, depth, branch)
            if proof is not None:
                return proof
        self.failed[goal] = max(self.failed.get(goal, 0), depth)
        return None

    def _omega(self, goal, depth, branch):
        """∘•α ⊢ β vía Φ ⊢ β, α ⊢ β y α⊙β ⊢ β"""
        match goal:
            case Sequent(Circ(Bullet(Leaf() as alpha)), Leaf() as beta) if beta.kind is Kind.GENERAL:
                pass
            case _:
                return None
        subgoals = (Sequent(Phi(), beta), Sequent(alpha, beta), Sequent(Odot(alpha, beta), beta))
        proofs = []
        for subgoal in subgoals:
            proof = self.prove(subgoal, depth - 1, branch)
            if proof is None:
                return None
            proofs.append(proof)
        family = omega_closure(*proofs)
        return Derivation('omega', goal, family=family)


def prove(s: Sequent, budget: SearchBudget | None = None) -> Derivation | Failure:
    """Derivación sin corte de s, o Failure(exhausted | refuted)"""
    budget = budget or SearchBudget()
    refuter = Refuter(budget.refutation_max_size)
    witness = refuter.countermodel(s)
    if witness is not None:
        model, countermodel = witness
        logger.info("%s refutado en %s", render(s), model)
        return Failure('refuted', countermodel, model)
    search = _Search(budget, refuter)
    try:
        result = search.prove(s, budget.max_depth, frozenset())
    except _BudgetExceeded:
        result = None
    if result is None:
        logger.info("búsqueda agotada para %s (%s secuentes)", render(s), search.visited)
        return Failure('exhausted', visited=search.visited)
    report = check_derivation(result)
    if not report.ok:
        raise KleeneLabError(f"la búsqueda produjo una derivación inválida: {report.reason}")
    return result


# ============================================================================
# CORPUS
# ============================================================================

_CHECK = re.compile(r'CHECK\s+(\S+)$')
_PROVE = re.compile(r'PROVE\s+"([^"]*)"(?:\s+depth=(\d+))?$')


@dataclass(frozen=True)
class CorpusEntry:
    line: int
    kind: str
    target: str
    status: str
    detail: str = ''

    @property
    def ok(self) -> bool:
        return self.status != 'failed'

    def text(self) -> str:
        suffix = f" {self.detail}" if self.detail else ''
        return f"{self.status} {self.kind} {self.target}{suffix}"


@dataclass
class CorpusReport:
    path: str
    entries: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return bool(self.entries) and all(entry.ok for entry in self.entries)

    def lines(self) -> list[str]:
        passed = sum(entry.ok for entry in self.entries)
        return [entry.text() for entry in self.entries] + [f"{passed}/{len(self.entries)} entradas"]


def _failure_text(exc):
    return f"{type(exc).__name__}: {exc}"


def _check_entry(number, target, base):
    try:
        derivation = parse_proof((base / target).read_text(encoding='utf-8'))
    except (OSError, KleeneLabError) as exc:
        return CorpusEntry(number, 'CHECK', target, 'failed', _failure_text(exc))
    report = check_derivation(derivation)
    if not report.ok:
        return CorpusEntry(number, 'CHECK', target, 'failed', report.reason)
    return CorpusEntry(number, 'CHECK', target, 'checked', render(derivation.conclusion))


def _prove_entry(number, text, depth):
    try:
        sequent = parse_sequent(text)
        budget = SearchBudget(max_depth=depth) if depth else SearchBudget()
        result = prove(sequent, budget)
    except KleeneLabError as exc:
        return CorpusEntry(number, 'PROVE', f'"{text}"', 'failed', _failure_text(exc))
    if isinstance(result, Failure):
        return CorpusEntry(number, 'PROVE', f'"{text}"', 'failed', result.describe())
    return CorpusEntry(number, 'PROVE', f'"{text}"', 'searched', f"altura={result.height}")


def run_corpus(path) -> CorpusReport:
    """Rechequea cada CHECK y busca cada PROVE; los errores de una entrada no detienen el resto"""
    path = Path(path)
    report = CorpusReport(str(path))
    for number, raw in enumerate(path.read_text(encoding='utf-8').splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        if (match := _CHECK.match(line)) is not None:
            entry = _check_entry(number, match.group(1), path.parent)
        elif (match := _PROVE.match(line)) is not None:
            depth = int(match.group(2)) if match.group(2) else None
            entry = _prove_entry(number, match.group(1), depth)
        else:
            entry = CorpusEntry(number, '?', line, 'failed', f"línea {number}: registro desconocido")
        logger.debug("corpus %s:%s %s", path.name, number, entry.status)
        report.entries.append(entry)
    return report
