# Путь: extractor/file_parsers/config_parser.py

# =================================================================================
# ПАРСЕР ФАЙЛА КОНФИГУРАЦИИ ЗАПУСКА
#
# ФОРМАТ:
#   Плоский текст "ключ = значение", по паре на строку; '#' начинает
#   комментарий. Значение приводится к типу поля RunConfig:
#   int, float, bool (true/false/yes/no/1/0) или str.
# =================================================================================

from pathlib import Path
from typing import Any, Dict

from extractor.data_models.run_config import RunConfig
from extractor.file_parsers.base_parser import BaseParser
from extractor.utils.errors import ConfigError

_TRUE = {'true', 'yes', '1', 'on'}
_FALSE = {'false', 'no', '0', 'off'}


def coerce_value(key: str, raw: str, target: type) -> Any:
    """Приводит строковое значение к типу поля конфигурации."""
    raw = raw.strip()
    try:
        if target is bool:
            lowered = raw.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(raw)
        if target is int:
            return int(raw)
        if target is float:
            return float(raw)
        return raw.strip('"').strip("'")
    except ValueError as e:
        raise ConfigError(f"ключ '{key}': значение '{raw}' не приводится к {target.__name__}") from e


class ConfigParser(BaseParser):

    def can_parse(self, file_path: str) -> bool:
        return Path(file_path).suffix.lower() in ('.cfg', '.conf', '.ini', '.txt', '')

    def parse(self, file_path: str) -> Dict[str, Any]:
        """Возвращает словарь переопределений (только ключи из файла)."""
        types = RunConfig.field_types()
        values: Dict[str, Any] = {}
        with open(file_path, 'r', encoding='utf-8') as f:
            for line_number, line in enumerate(f, start=1):
                line = line.split('#', 1)[0].strip()
                if not line:
                    continue
                if '=' not in line:
                    raise ConfigError(f"{file_path}, строка {line_number}: ожидается 'ключ = значение'")
                key, raw = (part.strip() for part in line.split('=', 1))
                key = key.replace('-', '_')
                if key not in types:
                    raise ConfigError(f"{file_path}, строка {line_number}: неизвестный ключ '{key}'")
                values[key] = coerce_value(key, raw, types[key])
        return values
