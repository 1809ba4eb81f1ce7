# Путь: extractor/services/arguments/entity_tagger.py

from typing import List, Sequence

import torch
import torch.nn as nn
from torch.nn.utils.rnn import pack_padded_sequence, pad_packed_sequence

from extractor.data_models.sentence import EntitySpan, TokenizedSentence
from extractor.services.arguments.crf import TAG_B, TAG_I, TAG_O, BioCRF
from extractor.utils.constants import BIO_TAGS


class EntityTagger(nn.Module):
    """BiLSTM + CRF над признаками токенов модели аргументов."""

    def __init__(self, feature_dim: int, hidden_dim: int = 0):
        super().__init__()
        hidden_dim = hidden_dim or max(feature_dim // 2, 8)
        self.lstm = nn.LSTM(feature_dim, hidden_dim, batch_first=True, bidirectional=True)
        self.emission = nn.Linear(2 * hidden_dim, len(BIO_TAGS))
        self.crf = BioCRF()
        self.trained = False

    def emissions(self, features: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        lengths = mask.long().sum(dim=1).cpu()
        packed = pack_padded_sequence(features, lengths, batch_first=True, enforce_sorted=False)
        output, _ = self.lstm(packed)
        output, _ = pad_packed_sequence(output, batch_first=True, total_length=features.shape[1])
        return self.emission(output)

    def loss(self, features: torch.Tensor, tags: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        return self.crf.neg_log_likelihood(self.emissions(features, mask), tags, mask)

    def decode(self, features: torch.Tensor, mask: torch.Tensor) -> List[List[int]]:
        return self.crf.decode(self.emissions(features, mask), mask)


def entity_spans(sentence: TokenizedSentence) -> List[EntitySpan]:
    """
    Сущности предложения; если список сущностей пуст, берутся спаны
    аргументов золотых событий (включая скрытые).
    """
    if sentence.entities:
        spans = list(sentence.entities)
    else:
        spans = [EntitySpan(a.entity_start, a.entity_end)
                 for e in sentence.all_gold_events for a in e.arguments]
    return sorted(set(spans), key=lambda s: (s.start, s.end))


def bio_tags(sentence: TokenizedSentence) -> List[int]:
    """BIO-теги; перекрывающиеся сущности разрешаются в пользу более ранней."""
    tags = [TAG_O] * len(sentence)
    for span in entity_spans(sentence):
        if any(tags[j] != TAG_O for j in range(span.start, span.end + 1)):
            continue
        tags[span.start] = TAG_B
        for j in range(span.start + 1, span.end + 1):
            tags[j] = TAG_I
    return tags


def bio_tensor(sentences: Sequence[TokenizedSentence]) -> torch.Tensor:
    width = max(len(s) for s in sentences)
    tags = torch.full((len(sentences), width), TAG_O, dtype=torch.long)
    for row, sentence in enumerate(sentences):
        tags[row, :len(sentence)] = torch.tensor(bio_tags(sentence), dtype=torch.long)
    return tags


def spans_from_tags(tags: Sequence[int]) -> List[EntitySpan]:
    spans: List[EntitySpan] = []
    start = None
    for j, tag in enumerate(list(tags) + [TAG_O]):
        if start is not None and tag != TAG_I:
            spans.append(EntitySpan(start, j - 1))
            start = None
        if tag == TAG_B:
            start = j
    return spans
