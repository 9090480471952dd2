"""
Django settings for the sparse dynamic value estimation project.

The project has no web surface: Django provides the app registry, the
management-command operator surface (train, eval, analyze, plot), the test
runner and logging configuration.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path
from dotenv import load_dotenv
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Nothing is signed or served; the key only satisfies Django's startup checks.
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'sparse-dve-local-only')

DEBUG = os.environ.get('DEBUG', 'False') == 'True'


# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'app_numerics',
    'app_envs',
    'app_dve',
    'app_ppo',
    'app_analysis',
    'app_runs',
]


# Experiment artifacts

SPARSE_DVE_RUNS_DIR = Path(os.environ.get('SPARSE_DVE_RUNS_DIR', BASE_DIR / 'runs'))

SPARSE_DVE_LOG_LEVEL = os.environ.get('SPARSE_DVE_LOG_LEVEL', 'INFO')

SPARSE_DVE_LOG_FILE = os.environ.get('SPARSE_DVE_LOG_FILE', '')

REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'plain',
        },
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': SPARSE_DVE_LOG_LEVEL,
            'propagate': False,
        }
        for app in ('app_numerics', 'app_envs', 'app_dve', 'app_ppo', 'app_analysis', 'app_runs')
    },
}

if SPARSE_DVE_LOG_FILE:
    LOGGING['handlers']['file'] = {
        'class': 'logging.FileHandler',
        'filename': SPARSE_DVE_LOG_FILE,
        'level': 'ERROR',
        'formatter': 'plain',
    }
    for logger in LOGGING['loggers'].values():
        logger['handlers'].append('file')
