# Путь: extractor/services/evaluation/stage_evaluator.py

from typing import Dict, List, Optional, Sequence, Tuple

from extractor.data_models.sentence import EventMention, TokenizedSentence
from extractor.data_models.stage_report import F1Matrix, StageReport
from extractor.data_models.task_stream import TaskStream
from extractor.services.arguments.role_classifier import ArgumentModel, attach_arguments
from extractor.services.detection.batching import predict_events
from extractor.services.evaluation.metrics import (argument_f1, detection_f1, long_tail_slice,
                                                   pseudo_label_precision)
from extractor.utils.log import info


class StageEvaluator:
    """
    Оценка после стадии i на накопленном test: золото и предсказания
    ограничены виданными типами. F1_{i,j} считается на test задачи j
    по типам задачи j.
    """

    def __init__(self, stream: TaskStream, batch_size: int = 32):
        self.stream = stream
        self.batch_size = batch_size

    def predict(self, detection_model, argument_model: Optional[ArgumentModel],
                sentences: Sequence[TokenizedSentence]) -> Dict[str, List[EventMention]]:
        predictions = predict_events(detection_model, sentences, self.batch_size)
        if argument_model is not None and argument_model.tagger.trained:
            known = set(argument_model.head_types)
            for sentence in sentences:
                events = [e for e in predictions[sentence.sentence_id] if e.event_type in known]
                if events:
                    attach_arguments(argument_model, sentence, events)
        return predictions

    def evaluate_stage(self, stage: int, detection_model, argument_model: Optional[ArgumentModel],
                       f1_matrix: F1Matrix, long_tail: Sequence[str] = (),
                       augmented_train: Sequence[TokenizedSentence] = (),
                       memory_size: int = 0) -> Tuple[StageReport, Dict[str, List[EventMention]]]:
        test = self.stream.accumulated_test(stage)
        seen = self.stream.seen_types(stage)
        predictions = self.predict(detection_model, argument_model, test)

        report = StageReport(stage=stage, memory_size=memory_size)
        report.detection = detection_f1(predictions, test, seen)
        if argument_model is not None:
            report.argument = argument_f1(predictions, test, seen)
        report.long_tail = long_tail_slice(predictions, test, long_tail) if long_tail else None
        for j in range(1, stage + 1):
            task = self.stream.task(j)
            task_predictions = {s.sentence_id: predictions[s.sentence_id] for s in task.test}
            score = detection_f1(task_predictions, task.test, task.event_types)
            report.task_f1[j] = score.f1
            f1_matrix.set(stage, j, score.f1)

        counts = {t: 0 for t in seen}
        for sentence in test:
            for event in sentence.gold_events:
                if event.event_type in counts:
                    counts[event.event_type] += 1
        report.per_type_counts = counts
        report.pseudo_label_precision = pseudo_label_precision(augmented_train)
        report.n_pseudo_labels = sum(len(s.pseudo_events) for s in augmented_train)

        info(f"[StageEvaluator] Стадия {stage}: F1 детекции {report.detection.f1:.4f}"
             + (f", F1 аргументов {report.argument.f1:.4f}" if report.argument else "")
             + (f", длинный хвост {report.long_tail.f1:.4f}" if report.long_tail else ""))
        return report, predictions


def prediction_records(sentences: Sequence[TokenizedSentence],
                       predictions: Dict[str, List[EventMention]]) -> List[Dict]:
    """Записи predictions.jsonl в формате корпуса."""
    records = []
    for sentence in sentences:
        record = TokenizedSentence(sentence.sentence_id, list(sentence.tokens),
                                   events=predictions.get(sentence.sentence_id, [])).to_dict()
        record.pop('entities')
        records.append(record)
    return records
