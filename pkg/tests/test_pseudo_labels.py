# Путь: tests/test_pseudo_labels.py

import pytest
import torch

from extractor.data_models.exemplar import Exemplar
from extractor.data_models.sentence import EventMention
from extractor.services.detection.pseudo_labeler import augment_with_pseudo_labels, relabel_memory
from extractor.services.evaluation.metrics import pseudo_label_precision
from extractor.services.memory import MemoryStore

from conftest import make_sentence

LABELS = ['NA', 'Marry', 'Attack', 'Meet']


class ScriptedTeacher:
    """Возвращает заранее заданные распределения по токенам; по умолчанию уверенный NA."""

    def __init__(self, rows_by_token, label_space=LABELS):
        self.rows_by_token = rows_by_token
        self.label_space = list(label_space)
        self.calls = 0

    def predict_probs(self, token_lists):
        self.calls += 1
        width = max(len(t) for t in token_lists)
        C = len(self.label_space)
        probs = torch.zeros(len(token_lists), width, C, dtype=torch.float64)
        probs[..., 0] = 1.0
        mask = torch.zeros(len(token_lists), width, dtype=torch.bool)
        for b, tokens in enumerate(token_lists):
            for j, token in enumerate(tokens):
                if token in self.rows_by_token:
                    probs[b, j] = torch.tensor(self.rows_by_token[token], dtype=torch.float64)
                mask[b, j] = True
        return probs, mask


def test_confident_token_gets_pseudo_label():
    teacher = ScriptedTeacher({'married': [0.1, 0.85, 0.03, 0.02]})
    sentence = make_sentence('s', ['melony', 'was', 'married'])

    augmented, records = augment_with_pseudo_labels([sentence], teacher, tau=0.8)

    event = augmented[0].events[0]
    assert (event.trigger_start, event.trigger_end, event.event_type) == (2, 2, 'Marry')
    assert event.is_pseudo and event.confidence == pytest.approx(0.85)
    assert records[0].to_dict()['type'] == 'Marry'
    assert records[0].source == 'train'
    assert sentence.events == []


def test_below_threshold_stays_na():
    teacher = ScriptedTeacher({'married': [0.2, 0.75, 0.03, 0.02]})
    augmented, records = augment_with_pseudo_labels([make_sentence('s', ['was', 'married'])], teacher, 0.8)
    assert augmented[0].events == [] and records == []


def test_threshold_boundary_is_inclusive():
    teacher = ScriptedTeacher({'married': [0.2, 0.8, 0.0, 0.0]})
    augmented, _ = augment_with_pseudo_labels([make_sentence('s', ['married'])], teacher, 0.8)
    assert len(augmented[0].pseudo_events) == 1


def test_confident_na_creates_no_label():
    teacher = ScriptedTeacher({'the': [0.97, 0.01, 0.01, 0.01]})
    augmented, _ = augment_with_pseudo_labels([make_sentence('s', ['the'])], teacher, 0.8)
    assert augmented[0].events == []


def test_gold_labels_are_never_overwritten():
    teacher = ScriptedTeacher({'bombed': [0.0, 0.0, 0.0, 1.0], 'met': [0.0, 0.0, 0.05, 0.95]})
    sentence = make_sentence('s', ['rebels', 'bombed', 'and', 'met'], [(1, 1, 'Attack')])

    augmented, records = augment_with_pseudo_labels([sentence], teacher, 0.8)

    gold = augmented[0].gold_events
    assert [(e.trigger_start, e.event_type) for e in gold] == [(1, 'Attack')]
    assert [(e.trigger_start, e.event_type) for e in augmented[0].pseudo_events] == [(3, 'Meet')]
    assert len(records) == 1


def test_teacher_with_only_na_adds_nothing():
    teacher = ScriptedTeacher({}, label_space=['NA'])
    augmented, records = augment_with_pseudo_labels([make_sentence('s', ['a', 'b'])], teacher, 0.5)
    assert augmented[0].events == [] and records == []


def test_relabel_memory_replaces_stale_pseudo_labels():
    sentence = make_sentence('m', ['rebels', 'bombed', 'then', 'met'], [(1, 1, 'Attack')])
    sentence.events.append(EventMention(0, 0, 'Marry', is_pseudo=True, confidence=0.9))
    store = MemoryStore(2)
    store.add_type('Attack', [Exemplar('m', 'Attack', (1, 1), sentence)])
    model = ScriptedTeacher({'met': [0.05, 0.0, 0.05, 0.9]})

    records = relabel_memory(store, model, tau=0.8)

    relabeled = store['Attack'][0].sentence
    assert [(e.trigger_start, e.event_type) for e in relabeled.pseudo_events] == [(3, 'Meet')]
    assert [(e.trigger_start, e.event_type) for e in relabeled.gold_events] == [(1, 'Attack')]
    assert records[0].source == 'memory'


def test_unreachable_threshold_changes_nothing_in_memory():
    sentence = make_sentence('m', ['a', 'b'], [(0, 0, 'Attack')])
    store = MemoryStore(1)
    store.add_type('Attack', [Exemplar('m', 'Attack', (0, 0), sentence)])
    model = ScriptedTeacher({'b': [0.3, 0.4, 0.2, 0.1]})
    assert relabel_memory(store, model, tau=1.0) == []
    assert store['Attack'][0].sentence.pseudo_events == []


def test_relabel_keeps_gold_from_every_stage_view():
    tokens = ['rebels', 'bombed', 'then', 'met']
    attack_view = make_sentence('m', tokens, [(1, 1, 'Attack')])
    attack_view.masked_events = [EventMention(3, 3, 'Meet')]
    meet_view = make_sentence('m', tokens, [(3, 3, 'Meet')])
    meet_view.masked_events = [EventMention(1, 1, 'Attack')]
    store = MemoryStore(2)
    store.add_type('Attack', [Exemplar('m', 'Attack', (1, 1), attack_view)])
    store.add_type('Meet', [Exemplar('m', 'Meet', (3, 3), meet_view)])

    relabel_memory(store, ScriptedTeacher({}), tau=0.8)

    for exemplar in store:
        assert [e.key() for e in exemplar.sentence.gold_events] == [(1, 1, 'Attack'), (3, 3, 'Meet')]
        assert exemplar.sentence.pseudo_events == []


def test_relabel_empty_memory_skips_model():
    model = ScriptedTeacher({})
    assert relabel_memory(MemoryStore(3), model, 0.8) == []
    assert model.calls == 0


def test_pseudo_label_precision_against_masked_gold():
    sentence = make_sentence('s', ['a', 'b', 'c'], [(0, 0, 'Meet')])
    sentence.masked_events = [EventMention(1, 1, 'Attack')]
    sentence.events += [EventMention(1, 1, 'Attack', is_pseudo=True, confidence=0.9),
                        EventMention(2, 2, 'Attack', is_pseudo=True, confidence=0.85)]
    assert pseudo_label_precision([sentence]) == pytest.approx(0.5)
    assert pseudo_label_precision([make_sentence('x', ['a'])]) is None
