"""
Interfaz de línea de comandos `mkleene`.

Cada subcomando imprime su reporte en stdout y termina con la línea
`RESULT: PASS` o `RESULT: FAIL`. Código de salida: 0 si el veredicto es
positivo, 1 si no, 2 para errores de uso.
"""

import functools
import logging
from pathlib import Path

import click

from .algebra import MODES, HMode, enumerate_models, lift, validate
from .calculus import check_derivation, verify_omega_bounded
from .conf import get_setting
from .exceptions import KleeneLabError
from .search import OMEGA_POLICIES, Failure, SearchBudget, prove, run_corpus
from .serializers import dump_model, dump_proof, parse_proof
from .services import (
    CutReductionService, IdentityService, InvarianceService, LawService, ModelRepository,
    SoundnessService,
)
from .syntax import Lang, parse_formula, parse_sequent, parse_structure, render, translate

logger = logging.getLogger(__name__)

SIZE_OPTION = click.option('--max-size', type=click.IntRange(1), default=None,
                           help='Tamaño máximo de los modelos enumerados')


def _finish(ctx, ok, lines=()):
    for line in lines:
        click.echo(line)
    click.echo(f"RESULT: {'PASS' if ok else 'FAIL'}")
    ctx.exit(0 if ok else 1)


def reporting(command):
    """Convierte los errores del laboratorio en `ERROR: ...` + `RESULT: FAIL`"""
    @functools.wraps(command)
    @click.pass_context
    def wrapper(ctx, *args, **kwargs):
        try:
            return command(ctx, *args, **kwargs)
        except KleeneLabError as exc:
            logger.info("%s falló: %s", ctx.info_name, exc)
            _finish(ctx, False, [f"ERROR: {type(exc).__name__}: {exc}"])
    return wrapper


@click.group(name='mkleene')
def cli():
    """Banco de trabajo para D.MKL y sus modelos finitos."""


# ============================================================================
# SINTAXIS
# ============================================================================

@cli.command()
@click.argument('text')
@click.option('--as', 'category', type=click.Choice(['sequent', 'formula', 'structure']),
              default='sequent', show_default=True)
@click.option('--lang', type=click.Choice([lang.value for lang in Lang]), default=Lang.MULTI.value)
@reporting
def parse(ctx, text, category, lang):
    """Parsea TEXT e imprime su forma canónica."""
    if category == 'formula':
        node = parse_formula(text, Lang(lang))
    elif category == 'structure':
        node = parse_structure(text)
    else:
        node = parse_sequent(text)
    _finish(ctx, True, [render(node)])


@cli.command(name='translate')
@click.argument('text')
@reporting
def translate_command(ctx, text):
    """Traduce una fórmula de un tipo al lenguaje multi-tipo."""
    _finish(ctx, True, [render(translate(parse_formula(text, Lang.SINGLE)))])


# ============================================================================
# DERIVACIONES
# ============================================================================

@cli.command()
@click.argument('proof', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--bounded', is_flag=True,
              help='Además instancia cada familia ω hasta n = --omega-bound (exploratorio)')
@click.option('--omega-bound', type=click.IntRange(1), default=None,
              help='Cota del modo exploratorio (por defecto MKLEENE_OMEGA_BOUND)')
@reporting
def check(ctx, proof, bounded, omega_bound):
    """Chequea un archivo de prueba."""
    derivation = parse_proof(proof.read_text(encoding='utf-8'))
    report = check_derivation(derivation)
    ok, lines = report.ok, [render(derivation.conclusion)] + report.lines()
    if bounded:
        for node in derivation.nodes():
            if node.family is None:
                continue
            bounded_report = verify_omega_bounded(node.family, omega_bound)
            ok = ok and bounded_report.ok
            lines += bounded_report.lines()
    _finish(ctx, ok, lines)


@cli.command(name='prove')
@click.argument('sequent')
@click.option('--depth', type=click.IntRange(1), default=None, help='Profundidad máxima')
@click.option('--max-visited', type=click.IntRange(1), default=None)
@click.option('--omega', type=click.Choice(OMEGA_POLICIES), default='schematic', show_default=True)
@click.option('--refutation-size', type=click.IntRange(0), default=None)
@reporting
def prove_command(ctx, sequent, depth, max_visited, omega, refutation_size):
    """Busca una derivación sin corte de SEQUENT."""
    budget = SearchBudget(
        max_depth=depth or get_setting('MKLEENE_DEFAULT_DEPTH'),
        max_visited=max_visited or get_setting('MKLEENE_MAX_VISITED'),
        omega_policy=omega,
        refutation_max_size=(get_setting('MKLEENE_REFUTATION_MAX_SIZE')
                             if refutation_size is None else refutation_size),
    )
    result = prove(parse_sequent(sequent), budget)
    if isinstance(result, Failure):
        _finish(ctx, False, [result.describe()])
    _finish(ctx, True, [dump_proof(result)])


@cli.command()
@click.option('--count', type=click.IntRange(1), default=None, help='Tamaño de la muestra')
@click.option('--formula-depth', type=click.IntRange(0), default=3, show_default=True)
@click.option('--depth', type=click.IntRange(1), default=None, help='Profundidad de búsqueda')
@click.option('--seed', type=int, default=None)
@reporting
def identity(ctx, count, formula_depth, depth, seed):
    """Busca f ⊢ f para una muestra de fórmulas multi-tipo."""
    budget = SearchBudget(max_depth=depth) if depth else SearchBudget()
    ok, lines = IdentityService(count, formula_depth, budget, seed).run()
    _finish(ctx, ok, lines)


@cli.command(name='reduce-cut')
@click.option('--count', type=click.IntRange(1), default=100, show_default=True)
@click.option('--formula-depth', type=click.IntRange(0), default=3, show_default=True)
@click.option('--seed', type=int, default=None)
@reporting
def reduce_cut(ctx, count, formula_depth, seed):
    """Genera cortes principales y verifica su reducción."""
    ok, lines = CutReductionService(count, formula_depth, seed).run()
    _finish(ctx, ok, lines)


@cli.command()
@click.argument('corpus_file', required=False, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--corpus', 'corpus_option', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@reporting
def corpus(ctx, corpus_file, corpus_option):
    """Rechequea y busca cada entrada de un archivo de corpus."""
    path = corpus_file or corpus_option
    if path is None:
        raise click.UsageError("falta el archivo de corpus (argumento o --corpus)", ctx)
    report = run_corpus(path)
    _finish(ctx, report.ok, report.lines())


# ============================================================================
# MODELOS
# ============================================================================

@cli.command(name='model-validate')
@click.argument('model_file', required=False, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--builtin', type=click.Choice(sorted(ModelRepository.builtin_names())))
@click.option('--mode', type=click.Choice(MODES), default=None,
              help='Por defecto, el modo del archivo (kleene para los predefinidos)')
@reporting
def model_validate(ctx, model_file, builtin, mode):
    """Valida un modelo contra los axiomas del modo."""
    if (model_file is None) == (builtin is None):
        raise click.UsageError("indique un archivo de modelo o --builtin, no ambos", ctx)
    if builtin is not None:
        model, file_mode = ModelRepository.builtin(builtin), 'kleene'
    else:
        model, file_mode = ModelRepository.load(model_file)
    mode = mode or file_mode
    target = model
    if mode == 'heterogeneous':
        partial = model.dstar is not None and None in model.dstar
        target = lift(model, HMode.GUARDED if partial else None)
    report = validate(target, mode)
    _finish(ctx, report.ok, [f"{model.name} ({mode})"] + report.lines())


@cli.command(name='model-enumerate')
@SIZE_OPTION
@click.option('--mode', type=click.Choice(MODES[:3]), default='kleene', show_default=True)
@click.option('--dump', is_flag=True, help='Imprime cada modelo en formato de archivo')
@reporting
def model_enumerate(ctx, max_size, mode, dump):
    """Enumera los modelos válidos salvo isomorfismo."""
    lines = []
    count = 0
    for model in enumerate_models(max_size or get_setting('MKLEENE_DEFAULT_MAX_SIZE'), mode):
        count += 1
        lines.append(f"{model.name} size={model.size}")
        if dump:
            lines.append(dump_model(model, mode).rstrip('\n'))
    lines.append(f"{count} modelos")
    _finish(ctx, True, lines)


@cli.command()
@click.option('--rule', default='all', show_default=True, help='Nombre de regla, all o mutated')
@click.option('--mode', type=click.Choice([HMode.GUARDED.value, HMode.LITERAL.value]), default=None)
@SIZE_OPTION
@reporting
def soundness(ctx, rule, mode, max_size):
    """Barre las reglas sobre los levantamientos K⁺ de los modelos."""
    service = SoundnessService(max_size, mode or get_setting('MKLEENE_DEFAULT_MODE'))
    ok, verdicts = service.sweep(rule)
    _finish(ctx, ok, [verdict.line() for verdict in verdicts])


@cli.command()
@SIZE_OPTION
@click.option('--formula-depth', type=click.IntRange(0), default=2, show_default=True)
@click.option('--pair-depth', type=click.IntRange(0), default=1, show_default=True)
@reporting
def invariance(ctx, max_size, formula_depth, pair_depth):
    """Compara K ⊨ α ≤ β con K⁺ ⊨ αᵗ ≤ βᵗ."""
    ok, lines = InvarianceService(max_size, formula_depth, pair_depth).run()
    _finish(ctx, ok, lines)


@cli.command()
@SIZE_OPTION
@reporting
def laws(ctx, max_size):
    """Clausura, retracción, rango, residuación, ida y vuelta y el testigo del núcleo."""
    ok, lines = LawService(ModelRepository.sweep_models(max_size)).run()
    _finish(ctx, ok, lines)


def main(argv=None) -> int:
    """Punto de entrada; retorna el código de salida"""
    try:
        code = cli.main(args=argv, prog_name='mkleene', standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        return 1
    return code or 0
