from django.apps import AppConfig


class CalabiGrowthConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'calabi_growth'
