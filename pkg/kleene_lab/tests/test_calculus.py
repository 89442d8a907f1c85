"""
Tests del cálculo: catálogo de reglas, chequeo de derivaciones, familias ω
y reducción de cortes principales
"""

import random
from dataclasses import replace

from django.conf import settings
from django.test import SimpleTestCase, override_settings

from kleene_lab.algebra import HMode, enumerate_models, lift, rel, valid
from kleene_lab.calculus import (
    Derivation, PremiseFamily, apply_rule, check_derivation, cut_formulas, derive_identity,
    find_rule, get_rule, hypothesis, mutated_rules, omega_display, omega_lift,
    principal_cut, reduce_principal_cut, rule_catalog, verify_omega_bounded, verify_omega_family,
)
from kleene_lab.exceptions import (
    BaseMismatch, NotPrincipal, RuleMismatch, ShapeError, StepConclusionMismatch,
    StepHypothesisMismatch, UnknownRule, ZeroMemberMismatch,
)
from kleene_lab.search import Failure, SearchBudget, prove
from kleene_lab.serializers import dump_proof, parse_proof
from kleene_lab.syntax import (
    Atom, Kind, formula_size, parse_formula, parse_sequent, random_formula, render, walk,
)

PROOFS = settings.BASE_DIR / 'proofs'


def _absorb_c():
    """(1 , c) |- c"""
    seed = apply_rule('PhiL_fwd', derive_identity(Atom('c')))
    return apply_rule('res2_bwd', apply_rule('one_L', apply_rule('res2_fwd', seed)))


def _absorb_c_right():
    """(c , 1) |- c"""
    seed = apply_rule('PhiR_fwd', derive_identity(Atom('c')))
    return apply_rule('res1_bwd', apply_rule('one_L', apply_rule('res1_fwd', seed)))


class CatalogoTestCase(SimpleTestCase):
    """Tests del catálogo de reglas"""

    def test_cuarenta_reglas(self):
        """Test: el catálogo tiene 40 esquemas con nombres únicos"""
        names = [rule.name for rule in rule_catalog()]
        self.assertEqual(len(names), 40)
        self.assertEqual(len(set(names)), 40)

    def test_regla_desconocida(self):
        """Test: get_rule lanza UnknownRule y find_rule retorna None"""
        with self.assertRaises(UnknownRule):
            get_rule('nope')
        self.assertIsNone(find_rule('nope'))

    def test_dobles_lineas(self):
        """Test: cada regla de display aporta _fwd y _bwd con premisa y conclusión cruzadas"""
        forward, backward = get_rule('res1_fwd'), get_rule('res1_bwd')
        self.assertEqual(forward.premises[0], backward.conclusion)
        self.assertEqual(backward.premises[0], forward.conclusion)

    def test_metavariables_frescas(self):
        """Test: PhiW y cup_R1 introducen metavariables frescas; Id es axioma"""
        self.assertTrue(get_rule('PhiW').introduces_fresh)
        self.assertTrue(get_rule('cup_R1').introduces_fresh)
        self.assertFalse(get_rule('Id').introduces_fresh)

    def test_reglas_mutadas(self):
        """Test: las variantes incorrectas no están en el catálogo"""
        names = {rule.name for rule in mutated_rules()}
        self.assertEqual(len(names), 5)
        self.assertFalse(names & {rule.name for rule in rule_catalog()})


class ChequeoTestCase(SimpleTestCase):
    """Tests del chequeo de derivaciones"""

    def test_pruebas_doradas(self):
        """Test: todas las pruebas del directorio proofs/ chequean"""
        files = sorted(PROOFS.glob('*.prf'))
        self.assertGreaterEqual(len(files), 15)
        for path in files:
            with self.subTest(prueba=path.name):
                report = check_derivation(parse_proof(path.read_text(encoding='utf-8')))
                self.assertTrue(report.ok, report.reason)

    def test_conclusion_box_fdia_zero(self):
        """Test: la prueba de □♦0 concluye box(fdia(0)) |- 1"""
        derivation = parse_proof((PROOFS / 'box_fdia_zero.prf').read_text(encoding='utf-8'))
        self.assertEqual(render(derivation.conclusion), 'box(fdia(0)) |- 1')

    def test_impresion_de_pruebas(self):
        """Test: dump_proof de una prueba con familia ω vuelve a leerse igual"""
        derivation = parse_proof((PROOFS / 'box_fdia_one.prf').read_text(encoding='utf-8'))
        self.assertEqual(parse_proof(dump_proof(derivation)), derivation)

    def test_premisa_que_no_calza(self):
        """Test: una premisa que no es instancia de la regla falla en la raíz"""
        bad = Derivation('box_L', parse_sequent('box(bbox(a)) |- a'),
                         (derive_identity(Atom('a')),))
        report = check_derivation(bad)
        self.assertFalse(report.ok)
        self.assertIsInstance(report.error, RuleMismatch)
        self.assertEqual(report.path, ())
        self.assertEqual(report.error.expected, 'o(bbox(a)) |- a')

    def test_camino_del_error(self):
        """Test: el camino del nodo defectuoso se reporta como índices de premisa"""
        leaf = Derivation('Id', parse_sequent('I |- o(fdia(0))'))
        inner = Derivation('box_R', parse_sequent('I |- box(fdia(0))'), (leaf,))
        root = Derivation('one_L', parse_sequent('1 |- box(fdia(0))'), (inner,))
        report = check_derivation(root)
        self.assertFalse(report.ok)
        self.assertEqual(report.path, (0, 0))
        self.assertIn('FAIL en 0/0', report.lines())

    def test_cantidad_de_premisas(self):
        """Test: un nodo con premisas de más no chequea"""
        identity = derive_identity(Atom('a'))
        bad = Derivation('Id', identity.conclusion, (identity,))
        self.assertFalse(check_derivation(bad).ok)

    def test_identidades(self):
        """Test: derive_identity produce f |- f para cada conectivo"""
        for text in ('a', '1', '0', '(a + b)', '(a . b)', 'box(fdia(a))', 'box(bbox((a + 1)))'):
            with self.subTest(formula=text):
                f = parse_formula(text)
                d = derive_identity(f)
                self.assertEqual(render(d.conclusion), f"{text} |- {text}")
                self.assertTrue(check_derivation(d).ok)

    def test_identidades_aleatorias(self):
        """Test: derive_identity chequea para 200 fórmulas aleatorias de profundidad ≤ 5"""
        rng = random.Random(settings.MKLEENE_SAMPLE_SEED)
        for _ in range(200):
            kind = rng.choice([Kind.GENERAL, Kind.SPECIAL])
            f = random_formula(rng, rng.randint(1, 5), kind)
            d = derive_identity(f)
            self.assertEqual(d.conclusion, parse_sequent(f"{render(f)} |- {render(f)}"))
            report = check_derivation(d)
            self.assertTrue(report.ok, f"{render(f)}: {report.reason}")


class CorreccionSemanticaTestCase(SimpleTestCase):
    """Lo que el chequeo acepta vale en los levantamientos guarded de los modelos chicos"""

    def setUp(self):
        """Configuración inicial para tests"""
        models = list(enumerate_models(3)) + [rel(2)]
        self.lifts = [lift(m, HMode.GUARDED) for m in models]

    def _assert_valid_everywhere(self, derivation):
        self.assertTrue(check_derivation(derivation).ok)
        for H in self.lifts:
            verdict = valid(H, derivation.conclusion)
            self.assertTrue(verdict, f"{render(derivation.conclusion)} falla en {H.name}: "
                                     f"{verdict.countermodel}")

    def test_pruebas_doradas(self):
        """Test: la conclusión de cada prueba dorada vale en todos los modelos"""
        for path in sorted(PROOFS.glob('*.prf')):
            with self.subTest(prueba=path.name):
                self._assert_valid_everywhere(parse_proof(path.read_text(encoding='utf-8')))

    def test_pruebas_encontradas(self):
        """Test: las derivaciones que encuentra prove también son válidas"""
        goals = (('(a + c) |- (c + a)', 12), ('box(bbox(a)) |- a', 6), ('(a . b) |- (a . b)', 12))
        for text, depth in goals:
            with self.subTest(secuente=text):
                result = prove(parse_sequent(text), SearchBudget(max_depth=depth))
                self.assertNotIsInstance(result, Failure)
                self._assert_valid_everywhere(result)


class AplicacionTestCase(SimpleTestCase):
    """Tests de apply_rule"""

    def test_premisa_incorrecta(self):
        """Test: PhiW sobre 1 |- 1 no calza"""
        with self.assertRaises(RuleMismatch):
            apply_rule('PhiW', derive_identity(parse_formula('1')))

    def test_falta_metavariable_fresca(self):
        """Test: cup_R1 sin A2 no puede construir la conclusión"""
        with self.assertRaises(RuleMismatch):
            apply_rule('cup_R1', derive_identity(Atom('a')))

    def test_metavariable_fresca(self):
        """Test: PhiW con D explícito"""
        d = apply_rule('PhiW', apply_rule('zero_L'), D=Atom('a'))
        self.assertEqual(render(d.conclusion), '0 |- a')
        self.assertTrue(check_derivation(d).ok)


class OmegaTestCase(SimpleTestCase):
    """Tests de las familias de premisas de ω"""

    def setUp(self):
        """Configuración inicial para tests"""
        derivation = parse_proof((PROOFS / 'box_fdia_one.prf').read_text(encoding='utf-8'))
        self.family = next(node.family for node in derivation.nodes() if node.rule == 'omega')
        self.one_r = apply_rule('one_R')

    def test_familia_valida(self):
        """Test: la familia de la prueba dorada se certifica desde n = 0"""
        verify_omega_family(self.family)

    def test_falta_miembro_cero(self):
        """Test: sin el miembro n = 0 la familia se rechaza, salvo desde n = 1"""
        without_zero = replace(self.family, zero=None)
        with self.assertRaises(ZeroMemberMismatch):
            verify_omega_family(without_zero)
        verify_omega_family(without_zero, start=1)

    def test_base_incorrecta(self):
        """Test: una base que no concluye la familia en n = 1"""
        family = PremiseFamily(parse_sequent('pow(1, n) |- 1'), base=self.one_r,
                               step=hypothesis(parse_sequent('pow(1, n) |- 1')), zero=self.one_r)
        with self.assertRaises(BaseMismatch):
            verify_omega_family(family)

    def test_hipotesis_incorrecta(self):
        """Test: la hoja (hyp) debe ser la familia en n"""
        wrong = apply_rule('PhiL_fwd', hypothesis(parse_sequent('pow(1, n) |- 1')))
        family = PremiseFamily(parse_sequent('pow(I, n) |- 1'), base=self.one_r, step=wrong,
                               zero=self.one_r)
        with self.assertRaises(StepHypothesisMismatch):
            verify_omega_family(family)

    def test_paso_incorrecto(self):
        """Test: el paso debe concluir la familia en n + 1"""
        sequent = parse_sequent('pow(I, n) |- 1')
        family = PremiseFamily(sequent, base=self.one_r, step=hypothesis(sequent), zero=self.one_r)
        with self.assertRaises(StepConclusionMismatch):
            verify_omega_family(family)

    def test_levantamiento(self):
        """Test: de (1 , c) |- c se obtiene la familia (pow(1, n) , c) |- c"""
        family = omega_lift(_absorb_c())
        self.assertEqual(family.sequent, parse_sequent('(pow(1, n) , c) |- c'))
        verify_omega_family(family)

    def test_levantamiento_derecho(self):
        """Test: de (c , 1) |- c se obtiene la familia (c , pow(1, n)) |- c"""
        family = omega_lift(_absorb_c_right(), side='right')
        self.assertEqual(family.sequent, parse_sequent('(c , pow(1, n)) |- c'))
        verify_omega_family(family)
        with self.assertRaises(ShapeError):
            omega_lift(_absorb_c(), side='right')

    def test_levantamiento_forma_incorrecta(self):
        """Test: omega_lift rechaza secuentes sin la forma α⊙β ⊢ β"""
        with self.assertRaises(ShapeError):
            omega_lift(derive_identity(Atom('a')))

    def test_display_y_omega(self):
        """Test: la familia desplegada por res2_fwd alimenta ω"""
        family = omega_display(omega_lift(_absorb_c()), ['res2_fwd'])
        self.assertEqual(family.sequent, parse_sequent('pow(1, n) |- (c < c)'))
        verify_omega_family(family)
        derivation = apply_rule('omega', family=family)
        self.assertEqual(render(derivation.conclusion), 'o(b(1)) |- (c < c)')
        self.assertTrue(check_derivation(derivation).ok)

    def test_modo_acotado(self):
        """Test: el chequeo exploratorio instancia la familia hasta n = 4"""
        report = verify_omega_bounded(omega_lift(_absorb_c()), 4)
        self.assertTrue(report.ok, report.failures)
        self.assertEqual(report.flag, 'unsound-bounded')

    @override_settings(MKLEENE_OMEGA_BOUND=3)
    def test_cota_por_defecto(self):
        """Test: sin cota explícita se usa MKLEENE_OMEGA_BOUND"""
        report = verify_omega_bounded(omega_lift(_absorb_c()))
        self.assertTrue(report.ok, report.failures)
        self.assertEqual(report.bound, 3)
        self.assertEqual(report.lines(), ['OK ω n≤3 (unsound-bounded)'])

    def test_acotado_sin_miembro_cero(self):
        """Test: una familia sin miembro cero se instancia desde n = 1"""
        report = verify_omega_bounded(replace(omega_lift(_absorb_c()), zero=None), 3)
        self.assertTrue(report.ok, report.failures)


class CortesTestCase(SimpleTestCase):
    """Tests de la reducción de cortes principales"""

    def test_reduccion_por_conectivo(self):
        """Test: cada corte principal se reduce a cortes sobre subfórmulas propias"""
        for text in ('a', '1', '0', '(a + b)', '(a . b)', 'box(fdia(a))', 'fdia(a)', 'bbox(a)'):
            with self.subTest(formula=text):
                f = parse_formula(text)
                cut = principal_cut(f)
                reduced = reduce_principal_cut(cut)
                self.assertEqual(reduced.conclusion, cut.conclusion)
                self.assertTrue(check_derivation(reduced).ok)
                self.assertTrue(all(formula_size(g) < formula_size(f) for g in cut_formulas(reduced)))
                self.assertLessEqual(set(cut_formulas(reduced)), set(walk(f)) - {f})

    def test_corte_no_principal(self):
        """Test: un corte entre dos identidades compuestas no es principal"""
        identity = derive_identity(parse_formula('(a + b)'))
        with self.assertRaises(NotPrincipal):
            reduce_principal_cut(apply_rule('Cut_g', identity, identity))

    def test_raiz_sin_corte(self):
        """Test: reducir algo que no es un corte es un error"""
        with self.assertRaises(NotPrincipal):
            reduce_principal_cut(derive_identity(Atom('a')))
