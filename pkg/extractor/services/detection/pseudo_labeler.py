# Путь: extractor/services/detection/pseudo_labeler.py

# =================================================================================
# ПСЕВДО-РАЗМЕТКА
#
#   Токен, размеченный как NA, получает псевдо-метку, если максимальная
#   вероятность учителя по типам (без NA) не меньше tau. Золотые токены
#   не переписываются никогда. Уверенное предсказание NA меток не создает.
# =================================================================================

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from extractor.data_models.sentence import EventMention, TokenizedSentence
from extractor.services.detection.batching import iterate_batches, token_types
from extractor.services.memory.memory_store import MemoryStore
from extractor.utils.log import info


@dataclass
class PseudoLabel:
    """Запись журнала аугментации."""
    sentence_id: str
    position: int
    token: str
    event_type: str
    confidence: float
    source: str = 'train'

    def to_dict(self):
        return {
            'id': self.sentence_id,
            'position': self.position,
            'token': self.token,
            'type': self.event_type,
            'confidence': self.confidence,
            'source': self.source,
        }


def augment_with_pseudo_labels(sentences: Sequence[TokenizedSentence], teacher, tau: float,
                               batch_size: int = 32, source: str = 'train'
                               ) -> Tuple[List[TokenizedSentence], List[PseudoLabel]]:
    """
    Возвращает копии предложений с добавленными псевдо-метками и журнал.
    teacher - любой объект с label_space и predict_probs(token_lists).
    """
    label_space = teacher.label_space
    augmented: List[TokenizedSentence] = []
    records: List[PseudoLabel] = []
    for batch in iterate_batches(sentences, batch_size):
        probs, _ = teacher.predict_probs([s.tokens for s in batch])
        for row, sentence in enumerate(batch):
            result = sentence.copy()
            if len(label_space) > 1:
                occupied = token_types(result, include_pseudo=True)
                confidence, index = probs[row, :len(sentence), 1:].max(dim=-1)
                for j, (conf, idx) in enumerate(zip(confidence.tolist(), index.tolist())):
                    if occupied[j] is not None or conf < tau:
                        continue
                    event_type = label_space[idx + 1]
                    result.events.append(EventMention(j, j, event_type, is_pseudo=True, confidence=conf))
                    records.append(PseudoLabel(sentence.sentence_id, j, sentence.tokens[j], event_type, conf, source))
                result.events.sort(key=lambda e: (e.key(), e.is_pseudo))
            augmented.append(result)
    return augmented, records


def relabel_memory(memory: MemoryStore, model, tau: float, batch_size: int = 32) -> List[PseudoLabel]:
    """
    Пересчитывает псевдо-метки предложений памяти только что обученной
    моделью: старые псевдо-метки снимаются, золото сохраняется.
    """
    stripped = []
    for sentence in memory.sentences():
        clean = sentence.copy()
        clean.events = clean.gold_events
        stripped.append(clean)
    if not stripped:
        return []
    relabeled, records = augment_with_pseudo_labels(stripped, model, tau, batch_size, source='memory')
    updated: Dict[str, TokenizedSentence] = {s.sentence_id: s for s in relabeled}
    memory.replace_sentences(updated)
    info(f"[relabel_memory] Псевдо-меток в памяти: {len(records)} на {len(stripped)} предложениях")
    return records
