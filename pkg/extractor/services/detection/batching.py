# Путь: extractor/services/detection/batching.py

# =================================================================================
# ТОКЕННАЯ РАЗМЕТКА И ДЕКОДИРОВАНИЕ
#
#   Каждый токен триггерного спана получает индекс типа; золото имеет
#   приоритет над псевдо-метками, при совпадении - первое упоминание
#   в порядке (start, end, type). Декодирование склеивает подряд идущие
#   токены одного типа в один триггер.
# =================================================================================

from typing import Dict, Iterator, List, Optional, Sequence

import numpy as np
import torch

from extractor.data_models.sentence import EventMention, TokenizedSentence
from extractor.utils.constants import NA_INDEX


def _ordered_events(sentence: TokenizedSentence, include_pseudo: bool) -> List[EventMention]:
    gold = sorted(sentence.gold_events, key=lambda e: e.key())
    if not include_pseudo:
        return gold
    return gold + sorted(sentence.pseudo_events, key=lambda e: e.key())


def token_types(sentence: TokenizedSentence, include_pseudo: bool = False) -> List[Optional[str]]:
    """Тип каждого токена по разметке предложения или None."""
    types: List[Optional[str]] = [None] * len(sentence)
    for event in _ordered_events(sentence, include_pseudo):
        for j in range(event.trigger_start, event.trigger_end + 1):
            if types[j] is None:
                types[j] = event.event_type
    return types


def token_labels(sentence: TokenizedSentence, index: Dict[str, int]) -> List[int]:
    """Индексы меток токенов (золото и псевдо); типы вне index - NA."""
    labels = []
    for event_type in token_types(sentence, include_pseudo=True):
        labels.append(index.get(event_type, NA_INDEX) if event_type is not None else NA_INDEX)
    return labels


def label_tensor(sentences: Sequence[TokenizedSentence], index: Dict[str, int]) -> torch.Tensor:
    width = max(len(s) for s in sentences)
    labels = torch.full((len(sentences), width), NA_INDEX, dtype=torch.long)
    for row, sentence in enumerate(sentences):
        labels[row, :len(sentence)] = torch.tensor(token_labels(sentence, index), dtype=torch.long)
    return labels


def gold_type_grid(sentences: Sequence[TokenizedSentence]) -> List[Optional[str]]:
    """Золотые типы токенов батча, построчно с паддингом до ширины батча."""
    width = max(len(s) for s in sentences)
    flat: List[Optional[str]] = []
    for sentence in sentences:
        types = token_types(sentence, include_pseudo=False)
        flat.extend(types + [None] * (width - len(types)))
    return flat


def iterate_batches(items: Sequence, batch_size: int,
                    rng: Optional[np.random.Generator] = None) -> Iterator[List]:
    order = rng.permutation(len(items)) if rng is not None else np.arange(len(items))
    for start in range(0, len(items), batch_size):
        yield [items[i] for i in order[start:start + batch_size]]


def decode_events(probs: torch.Tensor, label_space: Sequence[str]) -> List[EventMention]:
    """probs: [n, C] одного предложения -> список предсказанных триггеров."""
    predicted = probs.argmax(dim=-1).tolist()
    events: List[EventMention] = []
    start = None
    for j, label in enumerate(predicted + [NA_INDEX]):
        if start is not None and (label != predicted[start]):
            events.append(EventMention(start, j - 1, label_space[predicted[start]]))
            start = None
        if start is None and label != NA_INDEX:
            start = j
    return events


def predict_events(model, sentences: Sequence[TokenizedSentence],
                   batch_size: int = 32) -> Dict[str, List[EventMention]]:
    """Предсказанные триггеры по sentence_id; model - DetectionModel или ModelSnapshot."""
    label_space = model.label_space
    predictions: Dict[str, List[EventMention]] = {}
    for batch in iterate_batches(sentences, batch_size):
        probs, _ = model.predict_probs([s.tokens for s in batch])
        for row, sentence in enumerate(batch):
            predictions[sentence.sentence_id] = decode_events(probs[row, :len(sentence)], label_space)
    return predictions
