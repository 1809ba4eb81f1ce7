# Путь: extractor/services/corpus/synthetic_generator.py

# =================================================================================
# ГЕНЕРАТОР СИНТЕТИЧЕСКОГО КОРПУСА
#
# НАЗНАЧЕНИЕ:
#   Заменяет лицензированные корпуса при запусках на ноутбуке.
#
# ЛОГИКА РАБОТЫ:
#   1.  У каждого типа свой набор слов-триггеров "trg<тип>_<j>" и 2 роли
#       из общего пула; у каждой роли свои слова сущностей.
#   2.  Пул экземпляров (тип повторен count раз) перемешивается; каждое
#       предложение берет первичный тип и с вероятностью multi_type_prob
#       второй тип другого вида - так появляются многотипные предложения,
#       на которых возникает смешение семантики между задачами.
#   3.  Аргументы есть только у первичного события; сущности-отвлекатели
#       (без роли) вставляются в часть предложений.
#   4.  Отрицательные предложения (без событий) добавляются в доле
#       negative_ratio, затем все предложения перемешиваются и нумеруются.
# =================================================================================

import math
from typing import List, Sequence, Tuple

import numpy as np

from extractor.data_models.schema import EventSchema
from extractor.data_models.sentence import ArgumentMention, EntitySpan, EventMention, TokenizedSentence

ROLE_POOL = ('Agent', 'Patient', 'Place', 'Time', 'Instrument', 'Target', 'Origin', 'Beneficiary')


def power_law_counts(n_types: int, max_count: int, min_count: int) -> List[int]:
    """Число экземпляров по степенному закону от max_count до min_count."""
    if n_types < 1:
        raise ValueError("n_types должен быть >= 1")
    if n_types == 1:
        return [max_count]
    exponent = math.log(max_count / min_count) / math.log(n_types)
    counts = [max(min_count, int(round(max_count * (i + 1) ** -exponent))) for i in range(n_types)]
    counts[-1] = min_count
    return counts


class SyntheticCorpusGenerator:
    """Детерминированный по seed генератор размеченных предложений."""

    def __init__(self, vocab_size: int = 200, triggers_per_type: int = 3, roles_per_type: int = 2,
                 entity_words_per_role: int = 4, multi_type_prob: float = 0.3,
                 negative_ratio: float = 0.2, sentence_length: Tuple[int, int] = (6, 12),
                 argument_prob: float = 0.8, distractor_prob: float = 0.3):
        self.vocab_size = vocab_size
        self.triggers_per_type = triggers_per_type
        self.roles_per_type = roles_per_type
        self.entity_words_per_role = entity_words_per_role
        self.multi_type_prob = multi_type_prob
        self.negative_ratio = negative_ratio
        self.sentence_length = sentence_length
        self.argument_prob = argument_prob
        self.distractor_prob = distractor_prob

    def generate(self, n_types: int, instances_per_type: Sequence[int], seed: int
                 ) -> Tuple[EventSchema, List[TokenizedSentence]]:
        if n_types < 1:
            raise ValueError("n_types должен быть >= 1")
        if len(instances_per_type) != n_types:
            raise ValueError(f"instances_per_type содержит {len(instances_per_type)} значений, ожидалось {n_types}")
        if any(int(c) <= 0 for c in instances_per_type):
            raise ValueError("число экземпляров каждого типа должно быть положительным")

        rng = np.random.default_rng(seed)
        types = [f"Type{t:02d}" for t in range(n_types)]
        roles_of = {}
        for t in types:
            picked = rng.choice(len(ROLE_POOL), size=min(self.roles_per_type, len(ROLE_POOL)), replace=False)
            roles_of[t] = [ROLE_POOL[i] for i in sorted(picked)]
        schema = EventSchema(event_types=types, roles_of=roles_of)

        pool = [t for t, c in zip(types, instances_per_type) for _ in range(int(c))]
        order = rng.permutation(len(pool))
        pending = [pool[i] for i in order]

        drafts = []
        while pending:
            primary = pending.pop(0)
            event_types = [primary]
            if pending and rng.random() < self.multi_type_prob:
                for k, candidate in enumerate(pending):
                    if candidate != primary:
                        event_types.append(pending.pop(k))
                        break
            drafts.append(event_types)

        n_negative = int(round(self.negative_ratio * len(drafts)))
        drafts.extend([[] for _ in range(n_negative)])
        drafts = [drafts[i] for i in rng.permutation(len(drafts))]

        sentences = [self._build_sentence(f"syn-{n:05d}", event_types, schema, rng)
                     for n, event_types in enumerate(drafts)]
        return schema, sentences

    def _build_sentence(self, sentence_id: str, event_types: List[str], schema: EventSchema,
                        rng: np.random.Generator) -> TokenizedSentence:
        # Кусочки: ('filler', слова) / ('trigger', тип) / ('entity', роль или None)
        chunks = [('filler', None)] * int(rng.integers(self.sentence_length[0], self.sentence_length[1] + 1))
        for event_type in event_types:
            chunks.append(('trigger', event_type))
        if event_types:
            for role in schema.roles_of[event_types[0]]:
                if rng.random() < self.argument_prob:
                    chunks.append(('entity', role))
        if rng.random() < self.distractor_prob:
            chunks.append(('entity', None))
        chunks = [chunks[i] for i in rng.permutation(len(chunks))]

        tokens, events, entities, arguments = [], [], [], []
        for kind, payload in chunks:
            if kind == 'filler':
                tokens.append(f"w{int(rng.integers(self.vocab_size))}")
            elif kind == 'trigger':
                index = int(payload[4:])
                tokens.append(f"trg{index}_{int(rng.integers(self.triggers_per_type))}")
                events.append(EventMention(len(tokens) - 1, len(tokens) - 1, payload))
            else:
                stem = payload.lower() if payload else 'ent'
                start = len(tokens)
                tokens.append(f"{stem}{int(rng.integers(self.entity_words_per_role))}")
                if rng.random() < 0.4:
                    tokens.append(f"nn{int(rng.integers(self.entity_words_per_role))}")
                entities.append(EntitySpan(start, len(tokens) - 1))
                if payload:
                    arguments.append(ArgumentMention(start, len(tokens) - 1, payload))
        if events:
            # аргументы принадлежат первичному событию
            primary = next(e for e in events if e.event_type == event_types[0])
            primary.arguments = arguments
        events.sort(key=lambda e: e.key())
        return TokenizedSentence(sentence_id=sentence_id, tokens=tokens, events=events, entities=entities)


def generate_synthetic(n_types: int, instances_per_type: Sequence[int], vocab_size: int, seed: int,
                       **options) -> Tuple[EventSchema, List[TokenizedSentence]]:
    return SyntheticCorpusGenerator(vocab_size=vocab_size, **options).generate(n_types, instances_per_type, seed)
