"""
Acceso a la configuración del laboratorio con valores por defecto.
"""

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    'MKLEENE_DEFAULT_MAX_SIZE': 3,
    'MKLEENE_MODEL_SIZE_CAP': 4,
    'MKLEENE_DEFAULT_DEPTH': 12,
    'MKLEENE_MAX_VISITED': 200000,
    'MKLEENE_DEFAULT_MODE': 'guarded',
    'MKLEENE_REFUTATION_MAX_SIZE': 3,
    'MKLEENE_OMEGA_BOUND': 6,
    'MKLEENE_SAMPLE_SEED': 20240607,
    'MKLEENE_IDENTITY_SAMPLE': 200,
}


def get_setting(name):
    """Lee `name` de settings; usa el valor por defecto si no hay proyecto configurado"""
    try:
        return getattr(settings, name, DEFAULTS[name])
    except ImproperlyConfigured:
        return DEFAULTS[name]
