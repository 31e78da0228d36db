from django.apps import AppConfig


class BundleAlgebraConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'bundle_algebra'
