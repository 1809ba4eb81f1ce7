# Путь: extractor/data_models/schema.py

from dataclasses import dataclass, field
from typing import Dict, List

from extractor.data_models.sentence import TokenizedSentence
from extractor.utils.constants import NA_LABEL
from extractor.utils.errors import SchemaValidationError


@dataclass
class EventSchema:
    """Набор типов событий и ролей аргументов для каждого типа."""
    event_types: List[str]
    roles_of: Dict[str, List[str]] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.event_types)) != len(self.event_types):
            raise SchemaValidationError("имена типов событий в схеме повторяются")
        if NA_LABEL in self.event_types:
            raise SchemaValidationError(f"'{NA_LABEL}' зарезервирован и не может быть типом схемы")
        for event_type in self.event_types:
            self.roles_of.setdefault(event_type, [])
        unknown = set(self.roles_of) - set(self.event_types)
        if unknown:
            raise SchemaValidationError(f"роли заданы для неизвестных типов: {sorted(unknown)}")

    @property
    def has_arguments(self) -> bool:
        return any(self.roles_of.values())

    def validate_sentence(self, sentence: TokenizedSentence):
        """Проверяет границы упоминаний и принадлежность типов/ролей схеме."""
        n = len(sentence.tokens)
        if n == 0:
            raise SchemaValidationError(f"предложение {sentence.sentence_id} пустое")

        def check_span(start, end, what):
            if not (0 <= start <= end < n):
                raise SchemaValidationError(
                    f"предложение {sentence.sentence_id}: {what} [{start}, {end}] "
                    f"вне диапазона [0, {n})")

        seen = set()
        for event in sentence.events + sentence.masked_events:
            check_span(event.trigger_start, event.trigger_end, "триггер")
            if event.event_type not in self.roles_of:
                raise SchemaValidationError(
                    f"предложение {sentence.sentence_id}: неизвестный тип события '{event.event_type}'")
            if event.key() in seen:
                raise SchemaValidationError(
                    f"предложение {sentence.sentence_id}: повтор упоминания {event.key()}")
            seen.add(event.key())
            roles = self.roles_of[event.event_type]
            for arg in event.arguments:
                check_span(arg.entity_start, arg.entity_end, "аргумент")
                if arg.role not in roles:
                    raise SchemaValidationError(
                        f"предложение {sentence.sentence_id}: роль '{arg.role}' "
                        f"не определена для типа '{event.event_type}'")
        for span in sentence.entities:
            check_span(span.start, span.end, "сущность")

    def to_dict(self):
        return {'types': list(self.event_types),
                'roles': {t: list(self.roles_of.get(t, [])) for t in self.event_types}}

    @staticmethod
    def from_dict(d):
        return EventSchema(
            event_types=[str(t) for t in d['types']],
            roles_of={str(t): [str(r) for r in rs] for t, rs in d.get('roles', {}).items()},
        )
