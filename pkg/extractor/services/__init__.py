# Путь: services/__init__.py
