from django.apps import AppConfig


class StegoLsbConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'stego_lsb'
    verbose_name = 'LSB substitution and injection'
