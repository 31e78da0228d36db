"""
Django test settings for the bundlelab project.
"""
import os
from .base import *

DEBUG = False

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': ':memory:',
    }
}

# Suites run thousands of samples; keep the console for warnings only.
BUNDLELAB_LOG_LEVEL = os.getenv('BUNDLELAB_LOG_LEVEL', 'WARNING')
LOGGING['root']['level'] = BUNDLELAB_LOG_LEVEL
for app in BUNDLELAB_APPS:
    LOGGING['loggers'][app]['level'] = BUNDLELAB_LOG_LEVEL
LOGGING['handlers']['console']['formatter'] = 'simple'
