"""
Django settings del laboratorio D.MKL
"""

from pathlib import Path

from decouple import Choices, config

# Build paths
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config('SECRET_KEY', default='mkleene-lab-local-key')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'django.contrib.contenttypes',

    # Local apps
    'kleene_lab',
]

# El laboratorio no persiste nada; la base existe para el runner de tests
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

LANGUAGE_CODE = 'es-cl'
TIME_ZONE = 'America/Santiago'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# ============================================================================
# LOGGING (stderr y archivo; los reportes van sólo a stdout)
# ============================================================================
MKLEENE_LOG_LEVEL = config('MKLEENE_LOG_LEVEL', default='WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
            'level': MKLEENE_LOG_LEVEL,
        },
        'file': {
            'class': 'logging.FileHandler',
            'filename': BASE_DIR / 'logs' / 'kleene_lab.log',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console', 'file'],
            'level': 'INFO',
        },
        'kleene_lab': {
            'handlers': ['console', 'file'],
            'level': 'DEBUG' if DEBUG else 'INFO',
        },
    },
}

# Crear directorio de logs si no existe
(BASE_DIR / 'logs').mkdir(exist_ok=True)

# ============================================================================
# CONFIGURACIÓN ESPECÍFICA DEL LABORATORIO
# ============================================================================

# Barridos de modelos
MKLEENE_DEFAULT_MAX_SIZE = config('MKLEENE_DEFAULT_MAX_SIZE', default=3, cast=int)
MKLEENE_MODEL_SIZE_CAP = config('MKLEENE_MODEL_SIZE_CAP', default=4, cast=int)
MKLEENE_DEFAULT_MODE = config(
    'MKLEENE_DEFAULT_MODE', default='guarded', cast=Choices(['guarded', 'literal'])
)

# Búsqueda de pruebas
MKLEENE_DEFAULT_DEPTH = config('MKLEENE_DEFAULT_DEPTH', default=12, cast=int)
MKLEENE_MAX_VISITED = config('MKLEENE_MAX_VISITED', default=200000, cast=int)
MKLEENE_REFUTATION_MAX_SIZE = config('MKLEENE_REFUTATION_MAX_SIZE', default=3, cast=int)

# Modo exploratorio del ω (sólo miembros n = 0..cota)
MKLEENE_OMEGA_BOUND = config('MKLEENE_OMEGA_BOUND', default=6, cast=int)

# Muestras reproducibles
MKLEENE_SAMPLE_SEED = config('MKLEENE_SAMPLE_SEED', default=20240607, cast=int)
MKLEENE_IDENTITY_SAMPLE = config('MKLEENE_IDENTITY_SAMPLE', default=200, cast=int)
