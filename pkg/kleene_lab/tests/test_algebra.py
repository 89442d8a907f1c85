"""
Tests del álgebra: modelos finitos, validación de axiomas, levantamientos,
evaluación y enumeración
"""

from dataclasses import replace

from django.conf import settings
from django.test import SimpleTestCase, override_settings

from kleene_lab.algebra import (
    HMode, Position, b2, check_rule_soundness, dual_star_candidates, enumerate_models, evaluate,
    greatest_special_below, guarded_dual_star, iota_mode, kernel, kernel_remark_witness, lift,
    lower, pointwise_agreement, powers, rel, relation, residuals, roundtrip_check,
    roundtrip_check_h, singleton, star, translation_invariance, valid, validate,
)
from kleene_lab.calculus import get_rule, mutated_rules
from kleene_lab.exceptions import (
    EnumerationCapExceeded, IotaPartial, ModelFormatError, NoInterpretation,
)
from kleene_lab.serializers import dump_model, load_model
from kleene_lab.syntax import Lang, parse_formula, parse_sequent, parse_structure

MODELS = settings.BASE_DIR / 'models'


class ModelosTestCase(SimpleTestCase):
    """Tests de los modelos predefinidos"""

    def test_b2_es_kleene(self):
        """Test: B2 satisface K1-K6"""
        report = validate(b2())
        self.assertTrue(report.ok, report.lines())
        self.assertEqual(b2().star, (1, 1))

    def test_relaciones_estrella(self):
        """Test: la clausura de networkx coincide con el oráculo de potencias en rel(2)"""
        m = rel(2)
        self.assertEqual(m.size, 16)
        for x in m.elements:
            self.assertEqual(m.star[x], star(m, x))

    def test_relaciones_kleene(self):
        """Test: rel(2) es un álgebra de Kleene"""
        self.assertTrue(validate(rel(2)).ok)

    def test_relacion_por_pares(self):
        """Test: relation(k, pares) indexa la relación en rel(k)"""
        m = rel(2)
        identity = relation(2, [(0, 0), (1, 1)])
        self.assertEqual(identity, m.one)
        self.assertEqual(m.label(relation(2, [(0, 1)])), '{01}')

    def test_rel_fuera_de_rango(self):
        """Test: rel(k) sólo existe para 1 ≤ k ≤ 3"""
        with self.assertRaises(ValueError):
            rel(4)

    def test_potencias(self):
        """Test: en B2 las potencias de 0 son 1, 0 y el ciclo empieza en 0"""
        result = powers(b2(), 0)
        self.assertEqual(result.values, (1, 0))
        self.assertEqual(result.cycle_start, 1)
        self.assertEqual(star(b2(), 0), 1)
        self.assertEqual(powers(b2(), 1).values, (1,))

    def test_estrella_de_relacion(self):
        """Test: en rel(2) la estrella de {01} es Δ ∪ {01}"""
        m = rel(2)
        self.assertEqual(star(m, relation(2, [(0, 1)])), relation(2, [(0, 0), (0, 1), (1, 1)]))


class ResiduosTestCase(SimpleTestCase):
    """Tests de residuos y candidatos para ⋆"""

    def test_residuos_b2(self):
        """Test: en B2 1\\0 = 0 y 0/1 = 0"""
        self.assertEqual(residuals(b2(), 1, 0), (0, 0))

    def test_identidad_como_divisor(self):
        """Test: en rel(2) Δ\\R = R = R/Δ"""
        m = rel(2)
        for r in m.elements:
            self.assertEqual(residuals(m, m.one, r), (r, r))

    def test_residuacion(self):
        """Test: x ≤ α\\β sii α·x ≤ β, y x ≤ β/α sii x·α ≤ β"""
        for m in [b2(), rel(2)] + list(enumerate_models(3)):
            for a in m.elements:
                self.assertTrue(m.leq(m.one, residuals(m, a, a)[0]))
                for b in m.elements:
                    right, left = residuals(m, a, b)
                    for x in m.elements:
                        self.assertEqual(m.leq(x, right), m.leq(m.comp[a][x], b))
                        self.assertEqual(m.leq(x, left), m.leq(m.comp[x][a], b))

    def test_candidatos_b2(self):
        """Test: bajo 0 no hay especiales; bajo 1 el único es 1"""
        self.assertEqual(dual_star_candidates(b2(), 0), frozenset())
        self.assertEqual(dual_star_candidates(b2(), 1), frozenset({1}))

    def test_dos_candidatos_maximales(self):
        """Test: Δ ∪ {01, 12} contiene dos relaciones reflejas y transitivas maximales"""
        m = rel(3)
        diagonal = [(0, 0), (1, 1), (2, 2)]
        alpha = relation(3, diagonal + [(0, 1), (1, 2)])
        expected = {relation(3, diagonal + [(0, 1)]), relation(3, diagonal + [(1, 2)])}
        self.assertEqual(dual_star_candidates(m, alpha), frozenset(expected))
        self.assertIsNone(greatest_special_below(m, alpha))


class ValidacionTestCase(SimpleTestCase):
    """Tests de la validación de axiomas con testigos"""

    def test_b2_literal_colapsa(self):
        """Test: B2 con ⋆ total falla MK4 y MK3+MK4 en α=0"""
        report = validate(replace(b2(), dstar=(1, 1)), 'measurable-literal')
        self.assertFalse(report.ok)
        self.assertIn('MK4', report.failed())
        self.assertIn('MK3+MK4', report.failed())
        self.assertNotIn('MK3', report.failed())
        self.assertIn('FAIL MK4 α=0', report.lines())

    def test_b2_guarded(self):
        """Test: B2 con ⋆ guarded es válido y salta el punto 0"""
        model = replace(b2(), dstar=guarded_dual_star(b2()))
        self.assertEqual(model.dstar, (None, 1))
        report = validate(model, 'measurable-guarded')
        self.assertTrue(report.ok, report.lines())
        self.assertEqual(report.skipped, 1)

    def test_literal_indefinido(self):
        """Test: en modo literal un ⋆ indefinido es una falla"""
        model = replace(b2(), dstar=(None, 1))
        self.assertIn('MK2', validate(model, 'measurable-literal').failed())

    def test_estrella_incorrecta(self):
        """Test: una tabla * que no es la del oráculo falla K6"""
        report = validate(replace(b2(), star=(0, 1)))
        self.assertIn('K6', report.failed())

    def test_modo_desconocido(self):
        """Test: un modo inexistente es un error"""
        with self.assertRaises(ValueError):
            validate(b2(), 'nope')

    def test_heterogenea(self):
        """Test: el levantamiento de un álgebra de Kleene satisface H1-H7"""
        for m in (b2(), rel(2)):
            with self.subTest(modelo=m.name):
                report = validate(lift(m))
                self.assertTrue(report.ok, report.lines())
                self.assertEqual(report.mode, 'heterogeneous')


class LevantamientoTestCase(SimpleTestCase):
    """Tests de K⁺, H₊ y el núcleo"""

    def test_nucleo_b2(self):
        """Test: el núcleo de B2 es {1} y γ manda todo a él"""
        kern = kernel(b2())
        self.assertEqual(kern.elements, (1,))
        self.assertEqual(kern.gamma, (0, 0))

    def test_iota_guarded(self):
        """Test: en modo guarded ι(0) queda indefinido en B2"""
        H = lift(b2(), HMode.GUARDED)
        self.assertEqual(H.iota, (None, 0))
        self.assertFalse(H.iota_defined(0))
        with self.assertRaises(IotaPartial):
            H.i(0)

    def test_iota_literal(self):
        """Test: en modo literal un ι parcial es un error"""
        with self.assertRaises(IotaPartial):
            lift(b2(), HMode.LITERAL)

    def test_ida_y_vuelta(self):
        """Test: K ≅ (K⁺)₊ y H ≅ (H₊)⁺ en los modelos chicos"""
        for m in [singleton(), b2(), rel(2)] + list(enumerate_models(3)):
            with self.subTest(modelo=m.name):
                self.assertTrue(roundtrip_check(m))
                self.assertTrue(roundtrip_check_h(lift(m, HMode.GUARDED)))

    def test_ida_y_vuelta_con_estrella_dual_parcial(self):
        """Test: un ⋆ parcial se levanta en modo guarded y vuelve igual"""
        chain, _ = load_model((MODELS / 'chain3.model').read_text(encoding='utf-8'))
        guarded_b2 = replace(b2(), dstar=guarded_dual_star(b2()))
        self.assertEqual(iota_mode(chain), HMode.GUARDED)
        self.assertEqual(iota_mode(guarded_b2), HMode.GUARDED)
        self.assertEqual(iota_mode(singleton()), HMode.LITERAL)
        for m in [chain, guarded_b2] + list(enumerate_models(3, 'measurable-guarded')):
            with self.subTest(modelo=m.name):
                self.assertTrue(roundtrip_check(m))

    def test_bajada_medible(self):
        """Test: H₊ con measurable=True exige ι total"""
        with self.assertRaises(IotaPartial):
            lower(lift(b2(), HMode.GUARDED), measurable=True)
        self.assertIsNone(lower(lift(b2()), measurable=False).dstar)

    def test_testigo_del_nucleo(self):
        """Test: ⊔ coincide con ∪ en rel(2) y no en rel(3)"""
        self.assertIsNone(kernel_remark_witness(rel(2)))
        witness = kernel_remark_witness(rel(3))
        self.assertIsNotNone(witness)
        m = rel(3)
        xi, chi = witness
        self.assertNotEqual(m.star[m.join[xi][chi]], m.join[xi][chi])


class EvaluacionTestCase(SimpleTestCase):
    """Tests de evaluación y validez"""

    def setUp(self):
        """Configuración inicial para tests"""
        self.H = lift(b2(), HMode.GUARDED)

    def test_formula(self):
        """Test: □♦a en B2 con a = 0 vale 1"""
        self.assertEqual(evaluate(self.H, {'a': 0}, parse_formula('box(fdia(a))')), 1)

    def test_phi_por_posicion(self):
        """Test: Φ es 1 en el antecedente y 0 en el sucedente"""
        phi = parse_structure('I')
        self.assertEqual(evaluate(self.H, {}, phi, Position.PRECEDENT), 1)
        self.assertEqual(evaluate(self.H, {}, phi, Position.SUCCEDENT), 0)

    def test_sin_interpretacion(self):
        """Test: ⊙ no se interpreta en el sucedente"""
        with self.assertRaises(NoInterpretation):
            evaluate(self.H, {}, parse_structure('(I , I)'), Position.SUCCEDENT)

    def test_contramodelo(self):
        """Test: a |- b es inválido en B2 con a = 1, b = 0"""
        verdict = valid(self.H, parse_sequent('a |- b'))
        self.assertFalse(verdict)
        self.assertEqual(verdict.countermodel, {'a': '1', 'b': '0'})

    def test_secuente_valido(self):
        """Test: □♦0 |- 1 vale en B2"""
        self.assertTrue(valid(self.H, parse_sequent('box(fdia(0)) |- 1')))


class CorreccionTestCase(SimpleTestCase):
    """Tests de corrección de reglas en un modelo"""

    def test_abs_correcta(self):
        """Test: abs es correcta en B2⁺"""
        result = check_rule_soundness(lift(b2(), HMode.GUARDED), get_rule('abs'))
        self.assertTrue(result.sound)
        self.assertGreater(result.checked, 0)

    def test_omega_desde_uno(self):
        """Test: ω sin el miembro n = 0 falla en B2⁺"""
        rule = next(r for r in mutated_rules() if r.name == 'omega_from_one')
        result = check_rule_soundness(lift(b2(), HMode.GUARDED), rule)
        self.assertFalse(result.sound)
        self.assertTrue(result.line().startswith('FAIL omega_from_one'))

    def test_uno_sin_guarda(self):
        """Test: Φ |- Δ sin guarda falla en B2⁺"""
        rule = next(r for r in mutated_rules() if r.name == 'one_unguarded')
        self.assertFalse(check_rule_soundness(lift(b2(), HMode.GUARDED), rule).sound)


class TraduccionSemanticaTestCase(SimpleTestCase):
    """Tests de la invariancia de la traducción"""

    def test_coincidencia_puntual(self):
        """Test: f y fᵗ coinciden en B2 y rel(2)"""
        f = parse_formula('((a^* . b) + 1)', Lang.SINGLE)
        self.assertIsNone(pointwise_agreement(b2(), f))
        self.assertIsNone(pointwise_agreement(rel(2), f))

    def test_invariancia(self):
        """Test: a ≤ a* se preserva y a* ≤ a también (falso en ambos lados)"""
        a = parse_formula('a', Lang.SINGLE)
        a_star = parse_formula('a^*', Lang.SINGLE)
        self.assertTrue(translation_invariance(b2(), a, a_star))
        self.assertTrue(translation_invariance(b2(), a_star, a))

    def test_estrella_dual_parcial(self):
        """Test: con ⋆ parcial se comparan sólo las asignaciones definidas en ambos lados"""
        chain, _ = load_model((MODELS / 'chain3.model').read_text(encoding='utf-8'))
        guarded_b2 = replace(b2(), dstar=guarded_dual_star(b2()))
        a = parse_formula('a', Lang.SINGLE)
        a_dual = parse_formula('a^#', Lang.SINGLE)
        for m in (chain, guarded_b2):
            with self.subTest(modelo=m.name):
                self.assertIsNone(pointwise_agreement(m, a))
                self.assertIsNone(pointwise_agreement(m, a_dual))
                self.assertTrue(translation_invariance(m, a, a))
                self.assertTrue(translation_invariance(m, a_dual, a))
                self.assertTrue(translation_invariance(m, a, a_dual))


class EnumeracionTestCase(SimpleTestCase):
    """Tests de la enumeración de modelos"""

    def test_hasta_tres(self):
        """Test: hay 5 álgebras de Kleene de tamaño ≤ 3 salvo isomorfismo"""
        models = list(enumerate_models(3))
        self.assertEqual(len(models), 5)
        self.assertEqual(models[0].name, 'K1.0')
        self.assertTrue(all(validate(m).ok for m in models))

    def test_literal_solo_trivial(self):
        """Test: con ⋆ total sólo sobrevive el modelo de un elemento"""
        models = list(enumerate_models(3, 'measurable-literal'))
        self.assertEqual([m.name for m in models], ['K1.0'])

    def test_guarded(self):
        """Test: con ⋆ guarded sobreviven todos"""
        self.assertEqual(len(list(enumerate_models(3, 'measurable-guarded'))), 5)

    @override_settings(MKLEENE_MODEL_SIZE_CAP=3)
    def test_limite(self):
        """Test: pedir más que el límite configurado es un error"""
        with self.assertRaises(EnumerationCapExceeded):
            list(enumerate_models(4))


class ArchivosDeModeloTestCase(SimpleTestCase):
    """Tests del formato de archivo de modelos"""

    def test_b2(self):
        """Test: models/b2.model es B2"""
        model, mode = load_model((MODELS / 'b2.model').read_text(encoding='utf-8'))
        self.assertEqual(model, b2())
        self.assertEqual(mode, 'kleene')

    def test_cadena_guarded(self):
        """Test: la cadena de tres elementos valida con ⋆ parcial"""
        model, mode = load_model((MODELS / 'chain3.model').read_text(encoding='utf-8'))
        self.assertEqual(mode, 'measurable-guarded')
        self.assertEqual(model.dstar, (None, 1, 2))
        self.assertTrue(validate(model, mode).ok)

    def test_impresion(self):
        """Test: dump_model produce un archivo que vuelve a leerse igual"""
        model, mode = load_model((MODELS / 'chain3.model').read_text(encoding='utf-8'))
        again, again_mode = load_model(dump_model(model, mode))
        self.assertEqual((again, again_mode), (model, mode))

    def test_archivo_incompleto(self):
        """Test: falta la tabla comp"""
        with self.assertRaises(ModelFormatError):
            load_model("size=2\njoin:\n0 1\n1 1\none=1 zero=0\n")

    def test_indice_fuera_de_rango(self):
        """Test: una celda fuera de rango se reporta con su línea"""
        with self.assertRaises(ModelFormatError) as ctx:
            load_model("size=2\njoin:\n0 1\n1 5\ncomp:\n0 0\n0 1\none=1 zero=0\n")
        self.assertIn('línea 4', str(ctx.exception))
