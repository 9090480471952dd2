from django.apps import AppConfig


class AnalysisAppConfig(AppConfig):
    name = 'app_analysis'
