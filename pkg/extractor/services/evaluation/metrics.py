# Путь: extractor/services/evaluation/metrics.py

# =================================================================================
# МЕТРИКИ
#
#   Микро-F1 по упоминаниям: триггер засчитывается при точном совпадении
#   спана и типа, аргумент - при совпадении типа события, спана и роли.
#   Набор оцениваемых типов ограничивается параметром types (виданные типы
#   на стадии), одинаково для золота и предсказаний.
# =================================================================================

from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from extractor.data_models.sentence import EventMention, TokenizedSentence
from extractor.data_models.stage_report import F1Matrix, Score
from extractor.utils.errors import UnknownSentenceError


def score_counts(n_gold: int, n_predicted: int, n_correct: int) -> Score:
    precision = n_correct / n_predicted if n_predicted else 0.0
    recall = n_correct / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return Score(precision, recall, f1, n_gold, n_predicted, n_correct)


def _check_ids(predictions: Dict[str, List[EventMention]], gold: Sequence[TokenizedSentence]):
    known = {s.sentence_id for s in gold}
    unknown = sorted(set(predictions) - known)
    if unknown:
        raise UnknownSentenceError(f"предсказания для неизвестных предложений: {unknown[:5]}")


def _trigger_set(sentence_id: str, events: Iterable[EventMention], types: Optional[Set[str]]) -> Set[Tuple]:
    return {(sentence_id,) + e.key() for e in events
            if not e.is_pseudo and (types is None or e.event_type in types)}


def _argument_set(sentence_id: str, events: Iterable[EventMention], types: Optional[Set[str]]) -> Set[Tuple]:
    return {(sentence_id, e.event_type, a.entity_start, a.entity_end, a.role)
            for e in events if not e.is_pseudo and (types is None or e.event_type in types)
            for a in e.arguments}


def _micro(predictions, gold, types, extract) -> Score:
    _check_ids(predictions, gold)
    types = set(types) if types is not None else None
    n_gold = n_predicted = n_correct = 0
    for sentence in gold:
        gold_set = extract(sentence.sentence_id, sentence.gold_events, types)
        predicted_set = extract(sentence.sentence_id, predictions.get(sentence.sentence_id, []), types)
        n_gold += len(gold_set)
        n_predicted += len(predicted_set)
        n_correct += len(gold_set & predicted_set)
    return score_counts(n_gold, n_predicted, n_correct)


def detection_f1(predictions: Dict[str, List[EventMention]], gold: Sequence[TokenizedSentence],
                 types: Optional[Iterable[str]] = None) -> Score:
    return _micro(predictions, gold, types, _trigger_set)


def argument_f1(predictions: Dict[str, List[EventMention]], gold: Sequence[TokenizedSentence],
                types: Optional[Iterable[str]] = None) -> Score:
    return _micro(predictions, gold, types, _argument_set)


def long_tail_slice(predictions: Dict[str, List[EventMention]], gold: Sequence[TokenizedSentence],
                    long_tail_types: Iterable[str]) -> Optional[Score]:
    """F1 только по редким типам; None, если в золоте нет их упоминаний."""
    long_tail = set(long_tail_types)
    score = detection_f1(predictions, gold, long_tail)
    return score if score.n_gold > 0 else None


def bwt(matrix: F1Matrix, K: Optional[int] = None) -> float:
    """(1/(K-1)) * sum_{i<K} (F1_{K,i} - F1_{i,i})."""
    K = K or matrix.n_stages
    if K < 2:
        raise ValueError(f"BWT определен только для K >= 2, получено K={K}")
    if not matrix.is_complete(K):
        raise ValueError(f"матрица F1 не заполнена до стадии {K}")
    return sum(matrix.get(K, i) - matrix.get(i, i) for i in range(1, K)) / (K - 1)


def average_f1(matrix: F1Matrix, stage: int) -> float:
    """Среднее F1_{stage, j} по задачам j <= stage."""
    values = [matrix.get(stage, j) for j in range(1, stage + 1)]
    return sum(values) / len(values)


def pseudo_label_precision(sentences: Sequence[TokenizedSentence]) -> Optional[float]:
    """
    Доля псевдо-меток, совпавших со скрытым золотом (тот же тип накрывает
    тот же токен). None, если псевдо-меток нет.
    """
    n_pseudo = n_correct = 0
    for sentence in sentences:
        for event in sentence.pseudo_events:
            n_pseudo += 1
            if any(m.event_type == event.event_type
                   and m.trigger_start <= event.trigger_start and event.trigger_end <= m.trigger_end
                   for m in sentence.masked_events):
                n_correct += 1
    return n_correct / n_pseudo if n_pseudo else None
