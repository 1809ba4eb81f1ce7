# Путь: extractor/file_parsers/jsonl_corpus_parser.py

# =================================================================================
# ПАРСЕР КОРПУСА В ФОРМАТЕ JSON-LINES
#
# ФОРМАТ:
#   Одна строка - одно предложение:
#   {"id": str, "tokens": [str],
#    "events": [{"trigger": [start, end], "type": str,
#                "args": [{"span": [start, end], "role": str}]}],
#    "entities": [[start, end]]}
#   Смещения - индексы токенов с нуля, конец включительно.
#
# ЛОГИКА РАБОТЫ:
#   Пустые строки пропускаются. Любая ошибка кодировки, JSON или структуры
#   превращается в CorpusFormatError с номером строки (с единицы).
# =================================================================================

import json
from pathlib import Path
from typing import List

from extractor.data_models.sentence import TokenizedSentence
from extractor.file_parsers.base_parser import BaseParser
from extractor.utils.errors import CorpusFormatError


class JsonlCorpusParser(BaseParser):
    """Парсер корпуса: UTF-8 JSON-lines, по предложению на строку."""

    def can_parse(self, file_path: str) -> bool:
        return Path(file_path).suffix.lower() in ('.jsonl', '.json', '.ndjson')

    def parse(self, file_path: str) -> List[TokenizedSentence]:
        sentences = []
        with open(file_path, 'rb') as f:
            for line_number, raw in enumerate(f, start=1):
                try:
                    line = raw.decode('utf-8').strip()
                except UnicodeDecodeError as e:
                    raise CorpusFormatError(f"строка не в UTF-8: {e.reason}", line_number) from e
                if not line:
                    continue
                sentences.append(self.parse_line(line, line_number))
        return sentences

    @staticmethod
    def parse_line(line: str, line_number: int = 0) -> TokenizedSentence:
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise CorpusFormatError(f"некорректный JSON: {e.msg}", line_number) from e
        if not isinstance(record, dict) or 'id' not in record or 'tokens' not in record:
            raise CorpusFormatError("ожидается объект с полями 'id' и 'tokens'", line_number)
        try:
            return TokenizedSentence.from_dict(record)
        except (KeyError, TypeError, ValueError) as e:
            raise CorpusFormatError(f"некорректная структура аннотаций: {e}", line_number) from e
