"""
Пакет для моделей данных.
"""
