# Путь: extractor/services/data_loader.py

import os
from pathlib import Path
from typing import List, Optional, Tuple

from extractor.data_models.schema import EventSchema
from extractor.data_models.sentence import TokenizedSentence
from extractor.file_parsers.base_parser import BaseParser
from extractor.file_parsers.jsonl_corpus_parser import JsonlCorpusParser
from extractor.file_parsers.schema_parser import SchemaParser
from extractor.utils.log import debug, info


class DataLoader:
    """
    Сервис загрузки корпусов, который автоматически определяет
    нужный парсер для каждого файла.
    """
    def __init__(self, parsers: Optional[List[BaseParser]] = None):
        """
        :param parsers: Список экземпляров доступных парсеров.
                        Порядок важен: SchemaParser проверяется раньше корпусного.
        """
        self.parsers = parsers or [SchemaParser(), JsonlCorpusParser()]

    def load_file(self, file_path: str):
        if not os.path.exists(file_path):
            raise FileNotFoundError(f"Файл не найден: {file_path}")
        debug(f"[DataLoader] Загрузка файла: {file_path}")
        for parser in self.parsers:
            if parser.can_parse(file_path):
                debug(f"[DataLoader]   -> Используется парсер: {parser.__class__.__name__}")
                return parser.parse(file_path)
        raise ValueError(f"Не найден подходящий парсер для файла {file_path}")

    def load_corpus(self, path: str, schema_path: Optional[str] = None
                    ) -> Tuple[EventSchema, List[TokenizedSentence]]:
        """
        Загружает корпус и схему; каждое упоминание проверяется по схеме.
        Если файл схемы не задан, ищется соседний '<имя>.schema.json' или
        'schema.json'; иначе схема выводится из самого корпуса.
        """
        if not os.path.exists(path):
            raise FileNotFoundError(f"Файл не найден: {path}")
        sentences = JsonlCorpusParser().parse(path)
        schema_file = schema_path or self._find_schema_file(path)
        if schema_file:
            schema = SchemaParser().parse(schema_file)
        else:
            schema = infer_schema(sentences)
        for sentence in sentences:
            schema.validate_sentence(sentence)
        info(f"[DataLoader] ✅ Загружен корпус {path}: {len(sentences)} предложений, "
             f"{len(schema.event_types)} типов")
        return schema, sentences

    @staticmethod
    def _find_schema_file(path: str) -> Optional[str]:
        p = Path(path)
        for candidate in (p.with_name(p.stem + '.schema.json'), p.with_name('schema.json')):
            if candidate.exists():
                return str(candidate)
        return None


def infer_schema(sentences: List[TokenizedSentence]) -> EventSchema:
    """Схема по порядку первого появления типов и ролей в корпусе."""
    types: List[str] = []
    roles = {}
    for sentence in sentences:
        for event in sentence.events:
            if event.event_type not in roles:
                types.append(event.event_type)
                roles[event.event_type] = []
            for arg in event.arguments:
                if arg.role not in roles[event.event_type]:
                    roles[event.event_type].append(arg.role)
    return EventSchema(event_types=types, roles_of=roles)


def load_corpus(path: str, schema_path: Optional[str] = None) -> Tuple[EventSchema, List[TokenizedSentence]]:
    return DataLoader().load_corpus(path, schema_path)
