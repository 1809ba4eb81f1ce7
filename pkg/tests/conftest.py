# Путь: tests/conftest.py

import pytest
import torch

from extractor.data_models.encoder_config import EncoderConfig
from extractor.data_models.run_config import RunConfig
from extractor.data_models.schema import EventSchema
from extractor.data_models.sentence import ArgumentMention, EntitySpan, EventMention, TokenizedSentence
from extractor.services.corpus import generate_synthetic, partition_tasks, power_law_counts
from extractor.services.encoder import ToyTransformerEncoder, Vocabulary


def make_sentence(sentence_id, tokens, events=(), entities=()):
    """events: кортежи (start, end, type) или (start, end, type, [(s, e, role)])."""
    mentions = []
    for event in events:
        start, end, event_type = event[:3]
        args = [ArgumentMention(s, e, r) for s, e, r in (event[3] if len(event) > 3 else [])]
        mentions.append(EventMention(start, end, event_type, args))
    return TokenizedSentence(sentence_id, list(tokens), events=mentions,
                             entities=[EntitySpan(s, e) for s, e in entities])


@pytest.fixture
def tiny_schema():
    return EventSchema(event_types=['Attack', 'Meet', 'Die'],
                       roles_of={'Attack': ['Attacker', 'Place'], 'Meet': ['Entity'], 'Die': ['Victim']})


@pytest.fixture
def tiny_corpus():
    return [
        make_sentence('s1', ['rebels', 'bombed', 'the', 'city'],
                      [(1, 1, 'Attack', [(0, 0, 'Attacker'), (3, 3, 'Place')])], [(0, 0), (3, 3)]),
        make_sentence('s2', ['leaders', 'met', 'in', 'paris'],
                      [(1, 1, 'Meet', [(0, 0, 'Entity')])], [(0, 0), (3, 3)]),
        make_sentence('s3', ['the', 'soldier', 'died', 'after', 'the', 'attack'],
                      [(2, 2, 'Die', [(1, 1, 'Victim')]), (5, 5, 'Attack')], [(1, 1)]),
        make_sentence('s4', ['nothing', 'happened', 'today']),
    ]


@pytest.fixture
def toy_encoder_config():
    return EncoderConfig(n_layers=2, n_heads=2, d=32, L=2, dropout_rate=0.0, seed=0, max_length=16)


@pytest.fixture
def toy_vocab(tiny_corpus):
    return Vocabulary.from_sentences(s.tokens for s in tiny_corpus)


@pytest.fixture
def toy_encoder(toy_vocab, toy_encoder_config):
    return ToyTransformerEncoder(toy_vocab, toy_encoder_config)


@pytest.fixture
def float64():
    previous = torch.get_default_dtype()
    torch.set_default_dtype(torch.float64)
    yield torch.float64
    torch.set_default_dtype(previous)


@pytest.fixture
def synthetic_corpus():
    counts = power_law_counts(6, 24, 6)
    return generate_synthetic(6, counts, vocab_size=30, seed=3)


@pytest.fixture
def synthetic_stream(synthetic_corpus):
    schema, sentences = synthetic_corpus
    return partition_tasks(schema, sentences, K=3, seed=0, split_seed=0)


@pytest.fixture
def small_run_config(tmp_path):
    return RunConfig.toy(n_types=6, max_count=24, min_count=6, vocab_size=30, K=3, memory_size=2,
                         epochs=2, warmup_epochs=1, argument_epochs=1, batch_size=8,
                         output_dir=str(tmp_path / 'run'), plot=False, log_level='WARNING')
