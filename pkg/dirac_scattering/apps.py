from django.apps import AppConfig


class DiracScatteringConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'dirac_scattering'
    verbose_name = 'Dirac-Coulomb scattering in two dimensions'
