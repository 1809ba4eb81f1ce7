# Путь: extractor/data_models/task_stream.py

from dataclasses import dataclass, field
from typing import Dict, List

from extractor.data_models.schema import EventSchema
from extractor.data_models.sentence import TokenizedSentence
from extractor.utils.errors import StageRangeError


@dataclass
class CorpusSplits:
    """Исходные train/dev/test до разбиения на задачи."""
    train: List[TokenizedSentence] = field(default_factory=list)
    dev: List[TokenizedSentence] = field(default_factory=list)
    test: List[TokenizedSentence] = field(default_factory=list)


@dataclass
class TaskSplit:
    """
    Одна задача потока: ее типы событий и представления train/dev/test.
    В train видны только типы задачи; остальные золотые упоминания лежат
    в masked_events. dev/test хранят полную разметку - маскирование
    невиданных типов делается при оценке.
    """
    task_index: int
    event_types: List[str]
    train: List[TokenizedSentence] = field(default_factory=list)
    dev: List[TokenizedSentence] = field(default_factory=list)
    test: List[TokenizedSentence] = field(default_factory=list)

    def type_counts(self) -> Dict[str, int]:
        """Число видимых золотых упоминаний каждого типа в train."""
        counts = {t: 0 for t in self.event_types}
        for sentence in self.train:
            for event in sentence.gold_events:
                if event.event_type in counts:
                    counts[event.event_type] += 1
        return counts


@dataclass
class TaskStream:
    schema: EventSchema
    tasks: List[TaskSplit]
    permutation_seed: int = 0

    @property
    def K(self) -> int:
        return len(self.tasks)

    @property
    def type_partition(self) -> List[List[str]]:
        return [list(t.event_types) for t in self.tasks]

    def _check_stage(self, i: int):
        if not 1 <= i <= self.K:
            raise StageRangeError(f"номер стадии {i} вне диапазона [1, {self.K}]")

    def task(self, i: int) -> TaskSplit:
        """Задача i (нумерация с 1)."""
        self._check_stage(i)
        return self.tasks[i - 1]

    def seen_types(self, i: int) -> List[str]:
        self._check_stage(i)
        seen = []
        for task in self.tasks[:i]:
            seen.extend(task.event_types)
        return seen

    def new_types(self, i: int) -> List[str]:
        return list(self.task(i).event_types)

    def accumulated_test(self, i: int) -> List[TokenizedSentence]:
        """Объединение test-представлений задач 1..i без повторов sentence_id."""
        return self._accumulate(i, 'test')

    def accumulated_dev(self, i: int) -> List[TokenizedSentence]:
        return self._accumulate(i, 'dev')

    def accumulated_train(self, i: int) -> List[TokenizedSentence]:
        """
        Все обучающие предложения задач 1..i; упоминания всех виданных
        типов видимы (режим joint-training).
        """
        self._check_stage(i)
        seen = set(self.seen_types(i))
        merged: Dict[str, TokenizedSentence] = {}
        for task in self.tasks[:i]:
            for sentence in task.train:
                if sentence.sentence_id in merged:
                    continue
                full = sentence.copy()
                gold = [e for e in full.all_gold_events if e.event_type in seen]
                full.events = sorted(gold, key=lambda e: e.key())
                full.masked_events = [e for e in sentence.all_gold_events if e.event_type not in seen]
                merged[sentence.sentence_id] = full
        return list(merged.values())

    def _accumulate(self, i: int, split: str) -> List[TokenizedSentence]:
        self._check_stage(i)
        result, seen_ids = [], set()
        for task in self.tasks[:i]:
            for sentence in getattr(task, split):
                if sentence.sentence_id not in seen_ids:
                    seen_ids.add(sentence.sentence_id)
                    result.append(sentence)
        return result
