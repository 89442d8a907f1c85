"""
Jerarquía de errores del laboratorio.

Las funciones de biblioteca lanzan estas excepciones; las funciones que
producen reportes (chequeo de derivaciones, validación de modelos, corpus)
las convierten en datos.
"""


class KleeneLabError(Exception):
    """Error base del laboratorio"""


# ============================================================================
# SINTAXIS
# ============================================================================

class ParseError(KleeneLabError):
    """Texto que no respeta la gramática; guarda la posición del fallo"""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (posición {position})"
        super().__init__(message)


class TypingError(KleeneLabError, TypeError):
    """Un conectivo recibió un hijo del tipo equivocado"""


class KindMismatch(TypingError):
    """Secuente con un lado General y el otro Special"""


# ============================================================================
# CÁLCULO
# ============================================================================

class UnknownRule(KleeneLabError):
    """Nombre de regla fuera del catálogo"""


class RuleMismatch(KleeneLabError):
    """Un nodo no es instancia de la regla que declara"""

    def __init__(self, message, path=(), expected=None, found=None):
        self.path = tuple(path)
        self.expected = expected
        self.found = found
        super().__init__(message)


class OmegaFamilyError(RuleMismatch):
    """Familia de premisas del ω mal formada"""


class BaseMismatch(OmegaFamilyError):
    pass


class ZeroMemberMismatch(BaseMismatch):
    """Falta el miembro n = 0 de la familia o no concluye lo esperado"""


class StepHypothesisMismatch(OmegaFamilyError):
    pass


class StepConclusionMismatch(OmegaFamilyError):
    pass


class ShapeError(KleeneLabError):
    """La derivación de entrada no tiene la forma requerida"""


class NotPrincipal(KleeneLabError):
    """La fórmula de corte no es principal en alguna premisa"""


class ProofFormatError(ParseError):
    """Archivo de prueba (s-expresiones) mal formado"""


# ============================================================================
# ÁLGEBRA
# ============================================================================

class NoInterpretation(KleeneLabError):
    """Conectivo estructural sin lectura en esa posición"""


class IotaPartial(KleeneLabError):
    """ι no está definido en el elemento pedido (modo guarded)"""

    def __init__(self, element):
        self.element = element
        super().__init__(f"ι no está definido en {element}")


class ModelFormatError(KleeneLabError):
    """Archivo de modelo mal formado"""


class EnumerationCapExceeded(KleeneLabError, ValueError):
    """Tamaño pedido por sobre el límite configurado"""


# ============================================================================
# BÚSQUEDA
# ============================================================================

class InvalidBudget(KleeneLabError, ValueError):
    """Presupuesto de búsqueda con cotas no positivas"""
