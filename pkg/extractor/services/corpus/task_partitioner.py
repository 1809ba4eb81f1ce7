# Путь: extractor/services/corpus/task_partitioner.py

# =================================================================================
# РАЗБИЕНИЕ НА ПОТОК ЗАДАЧ
#
# ЛОГИКА РАБОТЫ:
#   1.  Типы схемы перемешиваются по seed и раздаются по кругу в K групп
#       (33 типа, K=5 -> 7,7,7,6,6).
#   2.  train-представление задачи k: каждое предложение, где есть
#       упоминание типа из группы k, копируется; видимы только упоминания
#       группы, остальные уходят в masked_events. Многотипное предложение
#       попадает в train каждой своей задачи - это и есть источник
#       смешения семантики, его нельзя схлопывать.
#   3.  Отрицательные предложения train раздаются задачам по кругу
#       в порядке следования.
#   4.  dev/test задачи k: предложения с упоминанием типа из группы k,
#       разметка полная (маскирование невиданных типов - при оценке).
# =================================================================================

from typing import List, Union

import numpy as np

from extractor.data_models.schema import EventSchema
from extractor.data_models.sentence import TokenizedSentence
from extractor.data_models.task_stream import CorpusSplits, TaskSplit, TaskStream
from extractor.services.corpus.corpus_splitter import split_corpus
from extractor.utils.errors import StageRangeError
from extractor.utils.log import info


def assign_types(event_types: List[str], K: int, seed: int) -> List[List[str]]:
    if K < 1 or K > len(event_types):
        raise StageRangeError(f"K={K} должно лежать в [1, {len(event_types)}] (число типов)")
    order = np.random.default_rng(seed).permutation(len(event_types))
    shuffled = [event_types[i] for i in order]
    groups: List[List[str]] = [[] for _ in range(K)]
    for index, event_type in enumerate(shuffled):
        groups[index % K].append(event_type)
    return groups


def _train_view(sentence: TokenizedSentence, group: set) -> TokenizedSentence:
    view = sentence.copy()
    gold = sentence.all_gold_events
    view.events = [e for e in gold if e.event_type in group]
    view.masked_events = [e for e in gold if e.event_type not in group]
    return view


def partition_tasks(schema: EventSchema, corpus: Union[List[TokenizedSentence], CorpusSplits],
                    K: int, seed: int, split_seed: int = 0, dev_ratio: float = 0.1,
                    min_test_ratio: float = 0.1, min_type_instances: int = 3) -> TaskStream:
    """
    Строит поток из K задач. Если передан список предложений, он сначала
    разбивается на train/dev/test (split_seed не зависит от перестановки типов).
    """
    groups = assign_types(schema.event_types, K, seed)
    splits = corpus if isinstance(corpus, CorpusSplits) else split_corpus(
        corpus, split_seed, dev_ratio=dev_ratio, min_test_ratio=min_test_ratio,
        min_type_instances=min_type_instances)

    tasks = [TaskSplit(task_index=k + 1, event_types=list(g)) for k, g in enumerate(groups)]
    group_sets = [set(g) for g in groups]

    negative_counter = 0
    for sentence in splits.train:
        gold_types = {e.event_type for e in sentence.all_gold_events}
        if not gold_types:
            tasks[negative_counter % K].train.append(sentence.copy())
            negative_counter += 1
            continue
        for task, group in zip(tasks, group_sets):
            if gold_types & group:
                task.train.append(_train_view(sentence, group))

    for split_name in ('dev', 'test'):
        for sentence in getattr(splits, split_name):
            gold_types = {e.event_type for e in sentence.all_gold_events}
            for task, group in zip(tasks, group_sets):
                if gold_types & group:
                    getattr(task, split_name).append(sentence)

    stream = TaskStream(schema=schema, tasks=tasks, permutation_seed=seed)
    info(f"[TaskPartitioner] K={K}, размеры групп: {[len(g) for g in groups]}, "
         f"отрицательных в train: {negative_counter}")
    return stream


def accumulated_test(stream: TaskStream, i: int) -> List[TokenizedSentence]:
    return stream.accumulated_test(i)
