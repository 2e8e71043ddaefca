from pathlib import Path
import os

from scipy import constants

BASE_DIR = Path(__file__).resolve().parent.parent
SECRET_KEY = os.environ.get('COULOMB2D_SECRET_KEY', 'django-insecure-coulomb2d-local-key')
DEBUG = False
ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'dirac_scattering',
]

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'dirac_scattering': {
            'level': os.environ.get('DIRAC_SCATTERING_LOG_LEVEL', 'INFO'),
        },
    },
}

# Physics defaults (units hbar = c = mu = 1)
FINE_STRUCTURE_ALPHA = constants.fine_structure
DEFAULT_MASS_MEV = constants.physical_constants['electron mass energy equivalent in MeV'][0]

# Angle grid
FORWARD_CUTOFF = 3.141592653589793 / 64
DEFAULT_ANGLE_COUNT = 64

# Abel regularisation of the partial-wave series
ABEL_EPSILON0 = 0.1
ABEL_LEVELS = 6
RICHARDSON_ORDER = 3
TAIL_TOLERANCE = 1e-12
DIAGNOSTIC_TOLERANCE = 1e-6
DEFAULT_TWO_J_MAX = 401

# Radial integration and asymptotic phase fit
ODE_RHO0 = 1e-4
ODE_RHO_MAX = 200.0
ODE_RTOL = 1e-11
FIT_WINDOW = (100.0, 200.0)
FIT_ORDER = 4

SCATTERING_N_JOBS = 1
