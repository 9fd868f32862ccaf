from django.apps import AppConfig


class StegoVideoConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'stego_video'
    verbose_name = 'Motion vector steganography'
