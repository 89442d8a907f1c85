"""
Banco de trabajo para el cálculo de display D.MKL y sus modelos finitos.
"""
