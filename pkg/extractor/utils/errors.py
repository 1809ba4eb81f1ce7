# Путь: extractor/utils/errors.py

class ExtractorError(Exception):
    """Базовое исключение пакета."""


class CorpusFormatError(ExtractorError, ValueError):
    """Строка корпуса не разбирается как JSON или не соответствует формату."""

    def __init__(self, message: str, line_number: int = 0):
        super().__init__(f"строка {line_number}: {message}" if line_number else message)
        self.line_number = line_number


class SchemaValidationError(ExtractorError, ValueError):
    """Аннотация ссылается на неизвестный тип/роль или выходит за границы предложения."""


class ConfigError(ExtractorError, ValueError):
    pass


class CheckpointError(ExtractorError, RuntimeError):
    """Чекпоинт поврежден или не совместим с текущей конфигурацией."""


class NotTrainedError(ExtractorError, RuntimeError):
    pass


class StageRangeError(ExtractorError, ValueError):
    pass


class MemoryStoreError(ExtractorError, KeyError):
    pass


class PrototypeError(ExtractorError, KeyError):
    pass


class RoleHeadError(ExtractorError, KeyError):
    """Нет головы ролей для типа события."""


class UnknownSentenceError(ExtractorError, ValueError):
    """Предсказания ссылаются на предложения, которых нет в золоте."""
