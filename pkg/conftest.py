import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'mvstego.settings')
django.setup()
