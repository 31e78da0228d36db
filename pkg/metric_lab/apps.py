from django.apps import AppConfig


class MetricLabConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'metric_lab'
