from django.apps import AppConfig


class ModularLatticeConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'modular_lattice'
