# Путь: extractor/data_models/sentence.py

import copy
from dataclasses import dataclass, field
from typing import List, Optional, Tuple


@dataclass
class ArgumentMention:
    """Аргумент события: сущность и ее роль."""
    entity_start: int
    entity_end: int
    role: str

    def to_dict(self):
        return {'span': [self.entity_start, self.entity_end], 'role': self.role}

    @staticmethod
    def from_dict(d):
        start, end = d['span']
        return ArgumentMention(entity_start=int(start), entity_end=int(end), role=str(d['role']))


@dataclass
class EventMention:
    """
    Упоминание события: триггер (границы включительно), тип и аргументы.
    Псевдо-метки помечаются is_pseudo и хранят уверенность модели.
    """
    trigger_start: int
    trigger_end: int
    event_type: str
    arguments: List[ArgumentMention] = field(default_factory=list)
    is_pseudo: bool = False
    confidence: Optional[float] = None

    @property
    def trigger(self) -> Tuple[int, int]:
        return self.trigger_start, self.trigger_end

    def key(self) -> Tuple[int, int, str]:
        return self.trigger_start, self.trigger_end, self.event_type

    def to_dict(self):
        d = {
            'trigger': [self.trigger_start, self.trigger_end],
            'type': self.event_type,
            'args': [a.to_dict() for a in self.arguments],
        }
        if self.is_pseudo:
            d['pseudo'] = True
            d['confidence'] = self.confidence
        return d

    @staticmethod
    def from_dict(d):
        start, end = d['trigger']
        return EventMention(
            trigger_start=int(start),
            trigger_end=int(end),
            event_type=str(d['type']),
            arguments=[ArgumentMention.from_dict(a) for a in d.get('args', [])],
            is_pseudo=bool(d.get('pseudo', False)),
            confidence=d.get('confidence'),
        )


@dataclass(frozen=True)
class EntitySpan:
    start: int
    end: int

    def to_list(self):
        return [self.start, self.end]


@dataclass
class TokenizedSentence:
    """
    Предложение с токенами и аннотациями - единица обучения и предсказания.

    masked_events хранит золотые аннотации, скрытые (замаскированные в NA)
    в видимом представлении задачи. В файл корпуса они не пишутся, но нужны
    для оракульной оценки псевдо-меток.
    """
    sentence_id: str
    tokens: List[str]
    events: List[EventMention] = field(default_factory=list)
    entities: List[EntitySpan] = field(default_factory=list)
    masked_events: List[EventMention] = field(default_factory=list)

    def __len__(self):
        return len(self.tokens)

    @property
    def gold_events(self) -> List[EventMention]:
        return [e for e in self.events if not e.is_pseudo]

    @property
    def pseudo_events(self) -> List[EventMention]:
        return [e for e in self.events if e.is_pseudo]

    @property
    def all_gold_events(self) -> List[EventMention]:
        """Видимые и скрытые золотые упоминания вместе."""
        return self.gold_events + list(self.masked_events)

    def event_types(self) -> List[str]:
        return sorted({e.event_type for e in self.gold_events})

    def has_arguments(self) -> bool:
        return any(e.arguments for e in self.all_gold_events)

    def copy(self) -> 'TokenizedSentence':
        return copy.deepcopy(self)

    def to_dict(self):
        return {
            'id': self.sentence_id,
            'tokens': list(self.tokens),
            'events': [e.to_dict() for e in self.events],
            'entities': [s.to_list() for s in self.entities],
        }

    @staticmethod
    def from_dict(d):
        return TokenizedSentence(
            sentence_id=str(d['id']),
            tokens=[str(t) for t in d['tokens']],
            events=[EventMention.from_dict(e) for e in d.get('events', [])],
            entities=[EntitySpan(int(s), int(e)) for s, e in d.get('entities', [])],
        )
