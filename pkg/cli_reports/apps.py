from django.apps import AppConfig


class CliReportsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'cli_reports'
