from django.apps import AppConfig


class RunsAppConfig(AppConfig):
    name = 'app_runs'
