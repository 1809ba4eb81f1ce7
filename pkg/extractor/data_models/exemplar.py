# Путь: extractor/data_models/exemplar.py

from dataclasses import dataclass
from typing import Tuple

from extractor.data_models.sentence import TokenizedSentence


@dataclass
class Exemplar:
    """
    Ссылка на экземпляр в памяти: (sentence_id, span) плюс замороженная
    копия разметки предложения (золото и псевдо-метки).
    """
    sentence_id: str
    event_type: str
    span: Tuple[int, int]
    sentence: TokenizedSentence

    def to_dict(self):
        return {
            'sentence_id': self.sentence_id,
            'event_type': self.event_type,
            'span': list(self.span),
            'sentence': self.sentence.to_dict(),
        }

    @staticmethod
    def from_dict(d):
        return Exemplar(
            sentence_id=d['sentence_id'],
            event_type=d['event_type'],
            span=(int(d['span'][0]), int(d['span'][1])),
            sentence=TokenizedSentence.from_dict(d['sentence']),
        )
