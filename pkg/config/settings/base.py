"""
Django base settings for the bundlelab project.
"""
from pathlib import Path
import os
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent.parent

# Load environment variables from .env file
load_dotenv(BASE_DIR / '.env')

SECRET_KEY = os.getenv('SECRET_KEY', 'bundlelab-local-key')

DEBUG = os.getenv('DEBUG', 'True') == 'True'

ALLOWED_HOSTS = os.getenv('ALLOWED_HOSTS', 'localhost,127.0.0.1').split(',')


# Application definition

BUNDLELAB_APPS = [
    'common',
    'modular_lattice',
    'bundle_algebra',
    'holo_functions',
    'metric_lab',
    'calabi_growth',
    'cli_reports',
]

INSTALLED_APPS = [
    *BUNDLELAB_APPS,
]


# Database
# Nothing is persisted; the test runner still expects a default connection.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / os.getenv('DATABASE_NAME', 'db.sqlite3'),
    }
}

USE_TZ = True

TIME_ZONE = 'UTC'

# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Verification defaults
# Every value can be overridden in .env or by the matching command flag.
BUNDLELAB_SEED = int(os.getenv('BUNDLELAB_SEED', '0xE11'), 0)
BUNDLELAB_TOLERANCE = float(os.getenv('BUNDLELAB_TOLERANCE', '1e-6'))
BUNDLELAB_IDENTITY_TOLERANCE = float(os.getenv('BUNDLELAB_IDENTITY_TOLERANCE', '1e-10'))
BUNDLELAB_SAMPLES = int(os.getenv('BUNDLELAB_SAMPLES', '200'))
BUNDLELAB_WITNESS_SAMPLES = int(os.getenv('BUNDLELAB_WITNESS_SAMPLES', '100'))
BUNDLELAB_FIBER_RADIUS = float(os.getenv('BUNDLELAB_FIBER_RADIUS', '10.0'))
BUNDLELAB_LOG_LEVEL = os.getenv('BUNDLELAB_LOG_LEVEL', 'INFO')


# Logging Configuration
# Reports go to stdout, so every handler writes to stderr.
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': BUNDLELAB_LOG_LEVEL,
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
        **{
            app: {
                'handlers': ['console'],
                'level': BUNDLELAB_LOG_LEVEL,
                'propagate': False,
            }
            for app in BUNDLELAB_APPS
        },
    },
}
