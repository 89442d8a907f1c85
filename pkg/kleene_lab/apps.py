from django.apps import AppConfig


class KleeneLabConfig(AppConfig):
    """App sin modelos de base de datos: cálculo D.MKL y modelos finitos"""
    name = 'kleene_lab'
    verbose_name = 'Laboratorio D.MKL'
