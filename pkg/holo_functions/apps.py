from django.apps import AppConfig


class HoloFunctionsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'holo_functions'
