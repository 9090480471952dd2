from django.apps import AppConfig


class NumericsAppConfig(AppConfig):
    name = 'app_numerics'
