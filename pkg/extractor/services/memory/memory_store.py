# Путь: extractor/services/memory/memory_store.py

import copy
from typing import Dict, Iterator, List

from extractor.data_models.exemplar import Exemplar
from extractor.data_models.sentence import EventMention, TokenizedSentence
from extractor.utils.constants import NA_LABEL
from extractor.utils.errors import MemoryStoreError
from extractor.utils.log import info


class MemoryStore:
    """
    Память повторения: тип события -> список экземпляров (не больше m).
    Негативные (NA) экземпляры не хранятся; типы только добавляются.
    """

    def __init__(self, m: int):
        if m < 0:
            raise ValueError("размер памяти не может быть отрицательным")
        self.m = m
        self.exemplars: Dict[str, List[Exemplar]] = {}

    def __contains__(self, event_type: str) -> bool:
        return event_type in self.exemplars

    def __getitem__(self, event_type: str) -> List[Exemplar]:
        return self.exemplars[event_type]

    def __iter__(self) -> Iterator[Exemplar]:
        for items in self.exemplars.values():
            yield from items

    def __len__(self):
        return sum(len(items) for items in self.exemplars.values())

    def types(self) -> List[str]:
        return list(self.exemplars)

    def add_type(self, event_type: str, items: List[Exemplar]):
        if event_type == NA_LABEL:
            raise MemoryStoreError("негативные экземпляры в памяти не хранятся")
        if event_type in self.exemplars:
            raise MemoryStoreError(f"тип '{event_type}' уже есть в памяти")
        if len(items) > self.m:
            raise MemoryStoreError(f"для типа '{event_type}' {len(items)} экземпляров при m={self.m}")
        self.exemplars[event_type] = list(items)

    def sentences(self) -> List[TokenizedSentence]:
        """
        Предложения памяти, по одному на sentence_id.

        Одно предложение может попасть в память из разных стадий, и каждая
        копия видит только золото своей задачи. Копии сливаются: золото
        объединяется по (start, end, type), скрытые упоминания, ставшие
        видимыми, из masked_events убираются, псевдо-метки на токенах
        золота отбрасываются.
        """
        grouped: Dict[str, List[TokenizedSentence]] = {}
        for exemplar in self:
            copies = grouped.setdefault(exemplar.sentence_id, [])
            if not any(c is exemplar.sentence for c in copies):
                copies.append(exemplar.sentence)
        return [copies[0] if len(copies) == 1 else merge_sentence_views(copies)
                for copies in grouped.values()]

    def replace_sentences(self, updated: Dict[str, TokenizedSentence]):
        """Подменяет все копии предложения (после слияния и переразметки)."""
        for exemplar in self:
            if exemplar.sentence_id in updated:
                exemplar.sentence = updated[exemplar.sentence_id]

    def to_dict(self):
        return {
            'm': self.m,
            'types': {t: [e.to_dict() for e in items] for t, items in self.exemplars.items()},
        }

    @staticmethod
    def from_dict(d):
        store = MemoryStore(int(d['m']))
        for event_type, items in d.get('types', {}).items():
            store.add_type(event_type, [Exemplar.from_dict(e) for e in items])
        return store


def update_memory(store: MemoryStore, stage_selections: Dict[str, List[Exemplar]]) -> MemoryStore:
    """Добавляет отбор стадии; прежние типы не трогаются, повтор типа - ошибка."""
    duplicates = [t for t in stage_selections if t in store]
    if duplicates:
        raise MemoryStoreError(f"типы уже в памяти: {duplicates}")
    for event_type, items in stage_selections.items():
        store.add_type(event_type, items)
    info(f"[MemoryStore] Добавлено типов: {len(stage_selections)}, "
         f"экземпляров: {sum(len(v) for v in stage_selections.values())}, всего в памяти: {len(store)}")
    return store


def merge_sentence_views(copies: List[TokenizedSentence]) -> TokenizedSentence:
    """Сливает копии одного предложения, видевшие разные задачи."""
    merged = copies[0].copy()
    gold: Dict[tuple, EventMention] = {}
    masked: Dict[tuple, EventMention] = {}
    pseudo: List[EventMention] = []
    entities = []
    for view in copies:
        for event in view.gold_events:
            known = gold.get(event.key())
            if known is None or (not known.arguments and event.arguments):
                gold[event.key()] = copy.deepcopy(event)
        for event in view.masked_events:
            masked.setdefault(event.key(), copy.deepcopy(event))
        pseudo.extend(copy.deepcopy(e) for e in view.pseudo_events)
        entities.extend(s for s in view.entities if s not in entities)

    occupied = set()
    for event in gold.values():
        occupied.update(range(event.trigger_start, event.trigger_end + 1))
    seen_pseudo = set()
    kept_pseudo = []
    for event in pseudo:
        tokens = set(range(event.trigger_start, event.trigger_end + 1))
        if tokens & occupied or event.key() in seen_pseudo:
            continue
        seen_pseudo.add(event.key())
        occupied |= tokens
        kept_pseudo.append(event)

    merged.events = sorted(gold.values(), key=lambda e: e.key()) + kept_pseudo
    merged.masked_events = [e for k, e in masked.items() if k not in gold]
    merged.entities = entities
    return merged
