# Путь: extractor/services/data_exporter.py

# =================================================================================
# МОДУЛЬ ЭКСПОРТА ДАННЫХ
#
# НАЗНАЧЕНИЕ:
#   Запись корпусов, схем, предсказаний и отчетов на диск.
#   JSON-lines пишутся с sort_keys, чтобы одинаковый вход давал
#   побайтно одинаковый файл.
# =================================================================================

import json
from pathlib import Path
from typing import Dict, Iterable, List

import pandas as pd

from extractor.data_models.schema import EventSchema
from extractor.data_models.sentence import TokenizedSentence
from extractor.utils.log import debug


class DataExporter:
    """Сервис записи артефактов."""

    @staticmethod
    def _prepare(path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_jsonl(self, path, records: Iterable[Dict]):
        path = self._prepare(path)
        with open(path, 'w', encoding='utf-8') as f:
            for record in records:
                f.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + '\n')
        debug(f"[DataExporter] Записан {path}")

    def write_json(self, path, data):
        path = self._prepare(path)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, ensure_ascii=False, sort_keys=True)

    def write_corpus(self, path, sentences: List[TokenizedSentence]):
        self.write_jsonl(path, (s.to_dict() for s in sentences))

    def write_schema(self, path, schema: EventSchema):
        self.write_json(path, schema.to_dict())

    def write_table(self, path, rows: List[Dict]):
        """CSV через pandas: одна строка на запись."""
        path = self._prepare(path)
        pd.DataFrame(rows).to_csv(path, index=False)
        debug(f"[DataExporter] Таблица {path}: {len(rows)} строк")

    @staticmethod
    def read_json(path):
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
