from django.apps import AppConfig


class PpoAppConfig(AppConfig):
    name = 'app_ppo'
