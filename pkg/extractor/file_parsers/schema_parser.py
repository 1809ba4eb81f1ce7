# Путь: extractor/file_parsers/schema_parser.py

import json
from pathlib import Path

from extractor.data_models.schema import EventSchema
from extractor.file_parsers.base_parser import BaseParser
from extractor.utils.errors import CorpusFormatError


class SchemaParser(BaseParser):
    """Файл схемы: JSON {"types": [str], "roles": {type: [str]}}."""

    def can_parse(self, file_path: str) -> bool:
        if Path(file_path).suffix.lower() != '.json':
            return False
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                head = f.read(2048)
            return '"types"' in head
        except OSError:
            return False

    def parse(self, file_path: str) -> EventSchema:
        with open(file_path, 'r', encoding='utf-8') as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise CorpusFormatError(f"файл схемы {file_path}: некорректный JSON: {e.msg}", e.lineno) from e
        if 'types' not in data:
            raise CorpusFormatError(f"файл схемы {file_path}: нет поля 'types'")
        return EventSchema.from_dict(data)
