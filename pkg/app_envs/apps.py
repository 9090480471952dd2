from django.apps import AppConfig


class EnvsAppConfig(AppConfig):
    name = 'app_envs'
