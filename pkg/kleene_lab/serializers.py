"""
Formatos de archivo del laboratorio:
- Pruebas: s-expresiones `(<regla> "<secuente>" <hijo>*)`
- Modelos: tablas de texto `size=<n> mode=<modo>`, `join:`, `comp:`, ...
"""

import re
from dataclasses import dataclass

from .exceptions import KleeneLabError, ModelFormatError, ProofFormatError
from .calculus import HYP, Derivation, PremiseFamily
from .syntax import parse_sequent, power_indices, render


# ============================================================================
# PRUEBAS
# ============================================================================

_SEXP_TOKEN = re.compile(
    r'(?P<space>\s+)|(?P<comment>;[^\n]*)|(?P<open>\()|(?P<close>\))'
    r'|"(?P<string>[^"]*)"|(?P<symbol>[^\s()";]+)'
)


@dataclass(frozen=True)
class _Text:
    value: str
    position: int


@dataclass(frozen=True)
class _Symbol:
    value: str
    position: int


class _List(list):
    position = 0


def _read_sexp(text):
    stack = [_List()]
    position = 0
    while position < len(text):
        match = _SEXP_TOKEN.match(text, position)
        if match is None:
            raise ProofFormatError("comillas sin cerrar", position)
        kind = match.lastgroup
        if kind == 'open':
            node = _List()
            node.position = position
            stack[-1].append(node)
            stack.append(node)
        elif kind == 'close':
            if len(stack) == 1:
                raise ProofFormatError("paréntesis de cierre sobrante", position)
            stack.pop()
        elif kind == 'string':
            stack[-1].append(_Text(match.group('string'), position))
        elif kind == 'symbol':
            stack[-1].append(_Symbol(match.group('symbol'), position))
        position = match.end()
    if len(stack) != 1:
        raise ProofFormatError("faltan paréntesis de cierre", len(text))
    return stack[0]


def _sequent(item):
    if not isinstance(item, _Text):
        raise ProofFormatError("se esperaba un secuente entre comillas", _position(item))
    try:
        return parse_sequent(item.value)
    except KleeneLabError as exc:
        raise ProofFormatError(f"secuente inválido {item.value!r}: {exc}", item.position) from exc


def _position(item):
    return getattr(item, 'position', None)


def _head(node):
    if not isinstance(node, _List) or not node or not isinstance(node[0], _Symbol):
        raise ProofFormatError("se esperaba un nodo (regla ...)", _position(node))
    return node[0].value


def _to_derivation(node, hypothesis=None):
    rule = _head(node)
    if rule == HYP:
        if len(node) > 2:
            raise ProofFormatError("(hyp) no tiene hijos", node.position)
        if len(node) == 2:
            return Derivation(HYP, _sequent(node[1]))
        if hypothesis is None:
            raise ProofFormatError("(hyp) fuera de una plantilla de paso", node.position)
        return Derivation(HYP, hypothesis)
    if len(node) < 2:
        raise ProofFormatError(f"el nodo {rule} no tiene secuente", node.position)
    conclusion = _sequent(node[1])
    rest = node[2:]
    if rest and isinstance(rest[0], _List) and rest[0] and _head(rest[0]) == 'family':
        if len(rest) != 1:
            raise ProofFormatError("un nodo con familia no tiene otros hijos", node.position)
        return Derivation(rule, conclusion, family=_to_family(rest[0]))
    premises = tuple(_to_derivation(child, hypothesis) for child in rest)
    return Derivation(rule, conclusion, premises)


def _to_family(node):
    if len(node) < 2:
        raise ProofFormatError("la familia no tiene secuente", node.position)
    sequent = _sequent(node[1])
    indices = power_indices(sequent)
    if len(indices) != 1:
        raise ProofFormatError("la familia debe usar exactamente un índice pow(Γ, n)", node.position)
    index = indices.pop()
    members = {}
    for part in node[2:]:
        label = _head(part)
        if label not in ('zero', 'base', 'step') or label in members:
            raise ProofFormatError(f"sección de familia inesperada {label!r}", part.position)
        if len(part) != 2:
            raise ProofFormatError(f"({label} ...) lleva exactamente un árbol", part.position)
        hypothesis = sequent if label == 'step' else None
        members[label] = _to_derivation(part[1], hypothesis)
    for required in ('base', 'step'):
        if required not in members:
            raise ProofFormatError(f"la familia no tiene ({required} ...)", node.position)
    return PremiseFamily(sequent, members['base'], members['step'], members.get('zero'), index)


def parse_proof(text: str) -> Derivation:
    """Lee una derivación desde el formato de s-expresiones"""
    items = _read_sexp(text)
    if len(items) != 1:
        raise ProofFormatError(f"se esperaba una sola derivación, hay {len(items)}", 0)
    return _to_derivation(items[0])


def _derivation_lines(d, depth):
    pad = '  ' * depth
    if d.rule == HYP:
        return [f"{pad}(hyp)"]
    head = f'{pad}({d.rule} "{render(d.conclusion)}"'
    body = []
    for premise in d.premises:
        body += _derivation_lines(premise, depth + 1)
    if d.family is not None:
        body += _family_lines(d.family, depth + 1)
    if not body:
        return [head + ')']
    body[-1] += ')'
    return [head] + body


def _family_lines(fam, depth):
    pad = '  ' * depth
    lines = [f'{pad}(family "{render(fam.sequent)}"']
    for label, member in (('zero', fam.zero), ('base', fam.base), ('step', fam.step)):
        if member is None:
            continue
        inner = _derivation_lines(member, depth + 2)
        inner[-1] += ')'
        lines += [f"{pad}  ({label}"] + inner
    lines[-1] += ')'
    return lines


def dump_proof(x) -> str:
    """Texto de una derivación o familia; `parse_proof` lo vuelve a leer"""
    if isinstance(x, Derivation):
        return '\n'.join(_derivation_lines(x, 0))
    if isinstance(x, PremiseFamily):
        return '\n'.join(_family_lines(x, 0))
    raise TypeError(f"no se puede imprimir {type(x).__name__}")


# ============================================================================
# MODELOS
# ============================================================================

_HEADER = re.compile(r"size\s*=\s*(\d+)(?:\s+mode\s*=\s*([\w-]+))?$")
_CONSTANTS = re.compile(r"one\s*=\s*(\d+)\s+zero\s*=\s*(\d+)$")
_MODES = {'kleene', 'measurable-literal', 'measurable-guarded', 'heterogeneous'}


def _cell(token, size, line_number, partial=False):
    if partial and token == '-':
        return None
    if not token.isdigit() or int(token) >= size:
        raise ModelFormatError(f"línea {line_number}: índice inválido {token!r}")
    return int(token)


def load_model(text: str, name: str = 'K'):
    """Lee un archivo de modelo; retorna (FiniteAlgebra, modo)"""
    from .algebra import FiniteAlgebra

    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(';', 1)[0].split('#', 1)[0].strip()
        if line:
            lines.append((number, line))
    if not lines:
        raise ModelFormatError("archivo de modelo vacío")

    number, header = lines[0]
    match = _HEADER.match(header)
    if match is None:
        raise ModelFormatError(f"línea {number}: se esperaba 'size=<n> mode=<modo>'")
    size, mode = int(match.group(1)), match.group(2) or 'kleene'
    if size < 1:
        raise ModelFormatError("el tamaño debe ser positivo")
    if mode not in _MODES:
        raise ModelFormatError(f"modo desconocido {mode!r}")

    tables, vectors, constants = {}, {}, None
    cursor = 1
    while cursor < len(lines):
        number, line = lines[cursor]
        cursor += 1
        if line in ('join:', 'comp:'):
            rows = lines[cursor:cursor + size]
            if len(rows) != size:
                raise ModelFormatError(f"línea {number}: la tabla {line} necesita {size} filas")
            table = []
            for row_number, row in rows:
                cells = row.split()
                if len(cells) != size:
                    raise ModelFormatError(f"línea {row_number}: se esperaban {size} columnas")
                table.append(tuple(_cell(c, size, row_number) for c in cells))
            tables[line[:-1]] = tuple(table)
            cursor += size
        elif line.startswith(('star:', 'dstar:')):
            label, _, rest = line.partition(':')
            cells = rest.split()
            if len(cells) != size:
                raise ModelFormatError(f"línea {number}: {label} necesita {size} valores")
            vectors[label] = tuple(_cell(c, size, number, partial=label == 'dstar') for c in cells)
        elif (constants_match := _CONSTANTS.match(line)) is not None:
            constants = tuple(_cell(c, size, number) for c in constants_match.groups())
        else:
            raise ModelFormatError(f"línea {number}: no se entiende {line!r}")

    for required in ('join', 'comp'):
        if required not in tables:
            raise ModelFormatError(f"falta la tabla {required}:")
    if constants is None:
        raise ModelFormatError("falta la línea 'one=<i> zero=<i>'")
    model = FiniteAlgebra(
        join=tables['join'], comp=tables['comp'], one=constants[0], zero=constants[1],
        star=vectors.get('star'), dstar=vectors.get('dstar'), name=name,
    )
    return model, mode


def dump_model(model, mode: str = 'kleene') -> str:
    lines = [f"size={model.size} mode={mode}", 'join:']
    lines += [' '.join(map(str, row)) for row in model.join]
    lines.append('comp:')
    lines += [' '.join(map(str, row)) for row in model.comp]
    lines.append(f"one={model.one} zero={model.zero}")
    if model.star is not None:
        lines.append('star: ' + ' '.join(map(str, model.star)))
    if model.dstar is not None:
        lines.append('dstar: ' + ' '.join('-' if v is None else str(v) for v in model.dstar))
    return '\n'.join(lines) + '\n'
