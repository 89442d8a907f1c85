"""
Tests de la interfaz de línea de comandos `mkleene`
"""

from click.testing import CliRunner
from django.conf import settings
from django.test import SimpleTestCase

from kleene_lab.cli import cli, main

PROOFS = settings.BASE_DIR / 'proofs'
MODELS = settings.BASE_DIR / 'models'


class ComandosTestCase(SimpleTestCase):
    """Tests de los subcomandos y sus códigos de salida"""

    def setUp(self):
        """Configuración inicial para tests"""
        self.runner = CliRunner()

    def invoke(self, *args):
        return self.runner.invoke(cli, [str(arg) for arg in args])

    def lines(self, result):
        return result.output.strip().splitlines()

    def test_translate(self):
        """Test: translate '(a^*)' imprime box(fdia(a))"""
        result = self.invoke('translate', '(a^*)')
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(self.lines(result), ['box(fdia(a))', 'RESULT: PASS'])

    def test_parse(self):
        """Test: parse imprime la forma canónica"""
        result = self.invoke('parse', '(a,b) |- (a . b)')
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(self.lines(result)[0], '(a , b) |- (a . b)')

    def test_parse_error(self):
        """Test: un texto mal formado termina con ERROR y código 1"""
        result = self.invoke('parse', '(a + )', '--as', 'formula')
        self.assertEqual(result.exit_code, 1)
        self.assertIn('ERROR: ParseError', result.output)
        self.assertEqual(self.lines(result)[-1], 'RESULT: FAIL')

    def test_check(self):
        """Test: check de la prueba de □♦0 pasa"""
        result = self.invoke('check', PROOFS / 'box_fdia_zero.prf')
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(self.lines(result)[0], 'box(fdia(0)) |- 1')
        self.assertEqual(self.lines(result)[-1], 'RESULT: PASS')

    def test_check_acotado(self):
        """Test: check --bounded instancia la familia ω y la marca unsound-bounded"""
        result = self.invoke('check', PROOFS / 'k4_star_absorb.prf', '--bounded', '--omega-bound', 3)
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn('OK ω n≤3 (unsound-bounded)', self.lines(result))
        self.assertEqual(self.lines(result)[-1], 'RESULT: PASS')

    def test_check_archivo_inexistente(self):
        """Test: un archivo que no existe es un error de uso"""
        result = self.invoke('check', PROOFS / 'no_existe.prf')
        self.assertEqual(result.exit_code, 2)

    def test_prove(self):
        """Test: prove imprime una derivación que se puede rechequear"""
        result = self.invoke('prove', 'box(bbox(a)) |- a', '--depth', 6)
        self.assertEqual(result.exit_code, 0)
        self.assertTrue(result.output.startswith('(box_L "box(bbox(a)) |- a"'))

    def test_prove_refutado(self):
        """Test: un secuente inválido se refuta con contramodelo"""
        result = self.invoke('prove', 'a |- b')
        self.assertEqual(result.exit_code, 1)
        self.assertIn('refuted en K2.0+: a=1 b=0', result.output)

    def test_corpus(self):
        """Test: el corpus dorado pasa completo"""
        result = self.invoke('corpus', PROOFS / 'golden.corpus')
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn('20/20 entradas', result.output)

    def test_corpus_sin_archivo(self):
        """Test: corpus sin archivo es un error de uso"""
        self.assertEqual(self.invoke('corpus').exit_code, 2)

    def test_soundness_abs(self):
        """Test: soundness --rule abs pasa en modo guarded"""
        result = self.invoke('soundness', '--mode', 'guarded', '--max-size', 3, '--rule', 'abs')
        self.assertEqual(result.exit_code, 0)
        self.assertTrue(self.lines(result)[0].startswith('PASS abs modelos=6'))

    def test_soundness_mutadas(self):
        """Test: el barrido de reglas mutadas pasa porque todas fallan"""
        result = self.invoke('soundness', '--rule', 'mutated')
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(sum(line.startswith('FAIL') for line in self.lines(result)), 5)

    def test_model_validate_builtin(self):
        """Test: B2 valida como álgebra de Kleene"""
        result = self.invoke('model-validate', '--builtin', 'b2')
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(self.lines(result)[0], 'B2 (kleene)')

    def test_model_validate_literal(self):
        """Test: B2 con ⋆ total reporta el testigo MK3+MK4"""
        result = self.invoke('model-validate', MODELS / 'b2_literal.model')
        self.assertEqual(result.exit_code, 1)
        self.assertIn('FAIL MK3+MK4 α=0 1 ≤ α⋆ ≤ α', result.output)

    def test_model_validate_heterogenea(self):
        """Test: la cadena guarded levantada satisface los axiomas heterogéneos"""
        result = self.invoke('model-validate', MODELS / 'chain3.model', '--mode', 'heterogeneous')
        self.assertEqual(result.exit_code, 0, result.output)

    def test_model_validate_sin_modelo(self):
        """Test: sin archivo ni --builtin es un error de uso"""
        self.assertEqual(self.invoke('model-validate').exit_code, 2)

    def test_model_enumerate_literal(self):
        """Test: con ⋆ total sólo se enumera el modelo trivial"""
        result = self.invoke('model-enumerate', '--max-size', 3, '--mode', 'measurable-literal')
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(self.lines(result), ['K1.0 size=1', '1 modelos', 'RESULT: PASS'])

    def test_model_enumerate_limite(self):
        """Test: pasar el límite configurado es un error"""
        result = self.invoke('model-enumerate', '--max-size', 9)
        self.assertEqual(result.exit_code, 1)
        self.assertIn('EnumerationCapExceeded', result.output)

    def test_reduce_cut(self):
        """Test: reduce-cut con una muestra chica"""
        result = self.invoke('reduce-cut', '--count', 10, '--seed', 1)
        self.assertEqual(result.exit_code, 0)
        self.assertIn('10/10 cortes reducidos', result.output)

    def test_identity(self):
        """Test: identity con una muestra chica"""
        result = self.invoke('identity', '--count', 5, '--formula-depth', 2, '--seed', 3)
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn('5/5 identidades', result.output)

    def test_invariance(self):
        """Test: invariance sin violaciones en los modelos de tamaño ≤ 2"""
        result = self.invoke('invariance', '--max-size', 2, '--formula-depth', 1)
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn('0 violaciones', result.output)

    def test_laws(self):
        """Test: laws pasa e informa el testigo del núcleo"""
        result = self.invoke('laws', '--max-size', 2)
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn('PASS remark rel(3)', result.output)


class MainTestCase(SimpleTestCase):
    """Tests del punto de entrada"""

    def test_codigo_cero(self):
        """Test: main retorna 0 cuando el veredicto es positivo"""
        self.assertEqual(main(['translate', '(a^*)']), 0)

    def test_codigo_uno(self):
        """Test: main retorna 1 cuando el veredicto es negativo"""
        self.assertEqual(main(['parse', '(a + )']), 1)

    def test_uso_incorrecto(self):
        """Test: un subcomando inexistente retorna 2"""
        self.assertEqual(main(['nope']), 2)
