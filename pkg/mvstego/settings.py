"""
Django settings for the mvstego project.

The project has no web surface: Django provides the management command
runner, form validation for command arguments and the test runner.
Toolkit defaults are read from the environment (optionally a .env file).
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv("SECRET_KEY", 'mvstego-insecure-local-key')

if os.getenv("PRODUCTION") == "true":
    DEBUG = False
else:
    DEBUG = True

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'formats',
    'codec',
    'crypto',
    'stego_video',
    'stego_lsb',
    'analysis',
    'cli',
]

# Only needed so the test runner can start; the toolkit stores nothing.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


def _env_int(name, default):
    value = os.getenv(name)
    if value in (None, ''):
        return default
    return int(value)


# Toolkit defaults. CLI flags override these per invocation.
MVSTEGO = {
    'GOP_SIZE': _env_int('MVSTEGO_GOP_SIZE', 12),
    'QP': _env_int('MVSTEGO_QP', 8),
    'SEARCH_RANGE': _env_int('MVSTEGO_SEARCH_RANGE', 16),
    'INTRA_SAD_THRESHOLD': _env_int('MVSTEGO_INTRA_SAD_THRESHOLD', 16 * 16 * 12),
    'CALIBRATION_SEED': _env_int('MVSTEGO_CALIBRATION_SEED', 2013),
    'CALIBRATION_TRIALS': _env_int('MVSTEGO_CALIBRATION_TRIALS', 100),
}

# Logging goes to stderr; stdout is reserved for command results.
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': os.getenv('MVSTEGO_LOG_LEVEL', 'WARNING'),
    },
}
