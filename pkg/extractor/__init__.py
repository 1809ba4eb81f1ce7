"""
Пакет непрерывного извлечения событий: детекция триггеров и аргументов
на потоке задач с памятью примеров, псевдо-метками, дистилляцией и
прототипами длинного хвоста.
"""
