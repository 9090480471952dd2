from django.apps import AppConfig


class DveAppConfig(AppConfig):
    name = 'app_dve'
