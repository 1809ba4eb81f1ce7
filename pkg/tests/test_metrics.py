# Путь: tests/test_metrics.py

import pytest

from extractor.data_models.sentence import ArgumentMention, EventMention
from extractor.data_models.stage_report import F1Matrix, Score, StageReport
from extractor.services.evaluation.metrics import (argument_f1, average_f1, bwt, detection_f1, long_tail_slice,
                                                   score_counts)
from extractor.utils.errors import UnknownSentenceError

from conftest import make_sentence


@pytest.fixture
def gold():
    return [
        make_sentence('a', ['x', 'y', 'z'], [(0, 0, 'Attack'), (2, 2, 'Meet')]),
        make_sentence('b', ['x', 'y'], [(1, 1, 'Die')]),
    ]


def test_perfect_predictions_score_one(gold):
    predictions = {s.sentence_id: list(s.events) for s in gold}
    score = detection_f1(predictions, gold)
    assert (score.precision, score.recall, score.f1) == (1.0, 1.0, 1.0)


def test_hand_counted_detection_score(gold):
    predictions = {'a': [EventMention(0, 0, 'Attack'), EventMention(1, 1, 'Meet')], 'b': []}
    score = detection_f1(predictions, gold)
    assert score.precision == pytest.approx(0.5)
    assert score.recall == pytest.approx(1 / 3)
    assert score.f1 == pytest.approx(0.4)


def test_empty_predictions_score_zero(gold):
    assert detection_f1({}, gold).f1 == 0.0
    assert score_counts(0, 0, 0).f1 == 0.0


def test_unknown_sentence_id_is_rejected(gold):
    with pytest.raises(UnknownSentenceError):
        detection_f1({'zzz': []}, gold)


def test_type_restriction_masks_gold_and_predictions(gold):
    predictions = {'a': [EventMention(0, 0, 'Attack')], 'b': [EventMention(0, 0, 'Die')]}
    score = detection_f1(predictions, gold, types=['Attack'])
    assert (score.n_gold, score.n_predicted, score.n_correct) == (1, 1, 1)


def test_detection_f1_is_order_invariant(gold):
    predictions = {'a': [EventMention(2, 2, 'Meet')], 'b': [EventMention(1, 1, 'Die')]}
    assert detection_f1(predictions, gold) == detection_f1(predictions, list(reversed(gold)))


def test_pseudo_predictions_are_not_counted(gold):
    predictions = {'b': [EventMention(1, 1, 'Die', is_pseudo=True, confidence=0.9)]}
    assert detection_f1(predictions, gold).n_predicted == 0


def test_argument_f1_requires_matching_event_type():
    gold = [make_sentence('s', ['r', 'bombed', 'c'], [(1, 1, 'Attack', [(0, 0, 'Attacker'), (2, 2, 'Place')])])]
    right = EventMention(1, 1, 'Attack', [ArgumentMention(0, 0, 'Attacker'), ArgumentMention(2, 2, 'Target')])
    score = argument_f1({'s': [right]}, gold)
    assert (score.n_gold, score.n_predicted, score.n_correct) == (2, 2, 1)

    wrong_type = EventMention(1, 1, 'Meet', [ArgumentMention(0, 0, 'Attacker')])
    assert argument_f1({'s': [wrong_type]}, gold).n_correct == 0


def test_mixed_two_sentence_argument_case():
    gold = [
        make_sentence('a', ['p', 'met', 'q'], [(1, 1, 'Meet', [(0, 0, 'Entity'), (2, 2, 'Entity')])]),
        make_sentence('b', ['v', 'died'], [(1, 1, 'Die', [(0, 0, 'Victim')])]),
    ]
    predictions = {
        'a': [EventMention(1, 1, 'Meet', [ArgumentMention(0, 0, 'Entity')])],
        'b': [EventMention(1, 1, 'Die', [ArgumentMention(0, 0, 'Victim'), ArgumentMention(1, 1, 'Victim')])],
    }
    score = argument_f1(predictions, gold)
    assert (score.n_gold, score.n_predicted, score.n_correct) == (3, 3, 2)
    assert score.f1 == pytest.approx(2 / 3)


def test_bwt_direct_substitution():
    matrix = F1Matrix()
    matrix.set(1, 1, 0.8)
    matrix.set(2, 1, 0.5)
    matrix.set(2, 2, 0.9)
    assert bwt(matrix) == pytest.approx(-0.3)


def test_bwt_without_forgetting_is_zero():
    matrix = F1Matrix()
    for i in range(1, 4):
        for j in range(1, i + 1):
            matrix.set(i, j, 0.1 * j + 0.3)
    assert bwt(matrix, 3) == 0.0


def test_bwt_errors():
    matrix = F1Matrix()
    matrix.set(1, 1, 0.5)
    with pytest.raises(ValueError):
        bwt(matrix)
    matrix.set(2, 2, 0.4)
    with pytest.raises(ValueError):
        bwt(matrix, 2)


def test_f1_matrix_is_lower_triangular_and_bounded():
    matrix = F1Matrix()
    with pytest.raises(ValueError):
        matrix.set(1, 2, 0.5)
    with pytest.raises(ValueError):
        matrix.set(2, 1, 1.5)
    matrix.set(2, 1, 0.25)
    matrix.set(1, 1, 0.75)
    matrix.set(2, 2, 0.5)
    assert matrix.rows() == [[0.75, None], [0.25, 0.5]]
    assert average_f1(matrix, 2) == pytest.approx(0.375)
    assert F1Matrix.from_dict(matrix.to_dict()).entries == matrix.entries


def test_long_tail_slice_hand_count():
    gold = [
        make_sentence('a', ['x', 'y', 'z'], [(0, 0, 'Popular'), (1, 1, 'Popular'), (2, 2, 'Rare')]),
        make_sentence('b', ['x', 'y'], [(0, 0, 'Rare')]),
    ]
    predictions = {'a': [EventMention(0, 0, 'Popular'), EventMention(2, 2, 'Rare')],
                   'b': [EventMention(1, 1, 'Rare')]}
    score = long_tail_slice(predictions, gold, ['Rare'])
    assert (score.n_gold, score.n_predicted, score.n_correct) == (2, 2, 1)
    assert score.f1 == pytest.approx(0.5)


def test_long_tail_slice_absent_and_all_types(gold):
    predictions = {'a': [EventMention(0, 0, 'Attack')]}
    assert long_tail_slice(predictions, gold, ['Transfer']) is None
    everything = long_tail_slice(predictions, gold, ['Attack', 'Meet', 'Die'])
    assert everything == detection_f1(predictions, gold)


def test_stage_report_serialization_and_rows():
    report = StageReport(stage=2, detection=score_counts(4, 4, 3), long_tail=score_counts(2, 1, 1),
                         task_f1={1: 0.5, 2: 0.75}, pseudo_label_precision=0.9)
    restored = StageReport.from_dict(report.to_dict())
    assert restored.task_f1 == {1: 0.5, 2: 0.75}
    assert restored.detection == report.detection
    metrics = {row['metric'] for row in report.metric_rows()}
    assert {'detection_f1', 'long_tail_f1', 'pseudo_label_precision', 'task1_f1', 'task2_f1'} <= metrics
    assert 'argument_f1' not in metrics
    assert Score.from_dict(None) is None
