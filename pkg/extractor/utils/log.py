import logging

logging.getLogger('matplotlib').setLevel(logging.WARNING)  # отключаем лог matplotlib


# 🔧 Инициализация логгера
logging.basicConfig(
    level=logging.INFO,  # DEBUG включает подробный лог обучения
    format='[%(levelname)s] %(message)s'
)

_logger = logging.getLogger('extractor')


def set_level(level: str):
    """Меняет уровень логирования ('DEBUG', 'INFO', ...)."""
    _logger.setLevel(getattr(logging, str(level).upper(), logging.INFO))


# 🎯 Экспортируем удобные короткие функции
def debug(msg: str):
    _logger.debug(msg)

def info(msg: str):
    _logger.info(msg)

def warn(msg: str):
    _logger.warning(msg)

def error(msg: str):
    _logger.error(msg)
