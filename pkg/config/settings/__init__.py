"""
Django settings module.

By default, imports from base settings.
For test runs with quieter logging, set DJANGO_SETTINGS_MODULE=config.settings.test
"""
import os

# Determine which settings to import
env = os.getenv('DJANGO_SETTINGS_MODULE', '')

if env.lower().endswith('.test'):
    from .test import *
else:
    from .base import *
