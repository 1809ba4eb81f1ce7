# Путь: extractor/services/corpus/corpus_splitter.py

# =================================================================================
# РАЗБИЕНИЕ КОРПУСА НА TRAIN / DEV / TEST
#
# ЛОГИКА РАБОТЫ:
#   1.  Типы, у которых во всем корпусе меньше min_type_instances
#       упоминаний, не попадают в dev/test: их предложения остаются в train.
#   2.  dev_ratio предложений (из допустимых) случайно уходит в dev.
#   3.  Для каждого типа test добирается из train, пока доля его
#       упоминаний в test не достигнет min_test_ratio; в train всегда
#       остается хотя бы одно упоминание типа.
# =================================================================================

import math
from collections import Counter
from typing import List

import numpy as np

from extractor.data_models.sentence import TokenizedSentence
from extractor.data_models.task_stream import CorpusSplits
from extractor.utils.log import info


def _type_counter(sentences: List[TokenizedSentence]) -> Counter:
    return Counter(e.event_type for s in sentences for e in s.all_gold_events)


def split_corpus(sentences: List[TokenizedSentence], seed: int = 0, dev_ratio: float = 0.1,
                 min_test_ratio: float = 0.1, min_type_instances: int = 3) -> CorpusSplits:
    rng = np.random.default_rng(seed)
    totals = _type_counter(sentences)
    rare = {t for t, c in totals.items() if c < min_type_instances}

    eligible = [i for i, s in enumerate(sentences)
                if not any(e.event_type in rare for e in s.all_gold_events)]
    eligible = [eligible[j] for j in rng.permutation(len(eligible))]

    n_dev = int(round(dev_ratio * len(sentences)))
    dev_ids = set(eligible[:n_dev])
    pool = [i for i in eligible[n_dev:]]

    test_ids = set()
    test_counts: Counter = Counter()
    train_counts = _type_counter([sentences[i] for i in range(len(sentences)) if i not in dev_ids])
    for event_type in sorted(totals):
        if event_type in rare:
            continue
        need = math.ceil(min_test_ratio * totals[event_type])
        for i in pool:
            if test_counts[event_type] >= need:
                break
            if i in test_ids:
                continue
            sentence_counts = _type_counter([sentences[i]])
            if event_type not in sentence_counts:
                continue
            # не оставляем тип без единого упоминания в train
            if any(train_counts[t] - c < 1 for t, c in sentence_counts.items()):
                continue
            test_ids.add(i)
            test_counts.update(sentence_counts)
            train_counts.subtract(sentence_counts)

    splits = CorpusSplits(
        train=[s for i, s in enumerate(sentences) if i not in dev_ids and i not in test_ids],
        dev=[sentences[i] for i in sorted(dev_ids)],
        test=[sentences[i] for i in sorted(test_ids)],
    )
    info(f"[CorpusSplitter] train={len(splits.train)}, dev={len(splits.dev)}, test={len(splits.test)}, "
         f"исключено из dev/test типов: {len(rare)}")
    return splits
