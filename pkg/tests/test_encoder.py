# Путь: tests/test_encoder.py

import pytest
import torch

from extractor.data_models.encoder_config import EncoderConfig
from extractor.services.encoder import (FeatureProjector, ToyTransformerEncoder, attentive_features,
                                        build_encoder, context_attention, project_features)
from extractor.services.encoder.checkpoint import load_checkpoint, restore_state, save_checkpoint
from extractor.services.encoder.toy_encoder import EncoderOutput
from extractor.utils.errors import CheckpointError, ConfigError

from conftest import make_sentence


def test_encode_shapes_and_row_stochastic_attention(toy_encoder, tiny_corpus):
    toy_encoder.eval()
    output = toy_encoder.encode(tiny_corpus[2])
    n = len(tiny_corpus[2])
    assert output.hidden.shape == (n, 32)
    assert output.attention.shape == (2, 2, n, n)
    assert torch.allclose(output.attention.sum(dim=-1), torch.ones(2, 2, n), atol=1e-5)


def test_padding_does_not_change_real_tokens(toy_encoder, tiny_corpus):
    toy_encoder.eval()
    short, long = tiny_corpus[0], tiny_corpus[2]
    with torch.no_grad():
        alone = toy_encoder.encode(short)
        batch = toy_encoder.encode_batch([short.tokens, long.tokens]).single(0)
    assert torch.allclose(alone.hidden, batch.hidden, atol=1e-5)
    assert torch.allclose(alone.attention, batch.attention, atol=1e-5)


def test_padded_keys_get_no_attention(toy_encoder, tiny_corpus):
    toy_encoder.eval()
    with torch.no_grad():
        output = toy_encoder.encode_batch([tiny_corpus[0].tokens, tiny_corpus[2].tokens])
    n = len(tiny_corpus[0])
    assert torch.all(output.attention[0, :, :, :n, n:] < 1e-6)


def test_encoder_seed_fixes_parameters_and_keeps_global_rng(toy_vocab, toy_encoder_config):
    torch.manual_seed(123)
    expected = torch.rand(3)
    torch.manual_seed(123)
    first = ToyTransformerEncoder(toy_vocab, toy_encoder_config)
    after = torch.rand(3)
    second = ToyTransformerEncoder(toy_vocab, toy_encoder_config)

    assert torch.equal(expected, after)
    for a, b in zip(first.parameters(), second.parameters()):
        assert torch.equal(a, b)


def test_encoder_rejects_empty_and_too_long(toy_encoder):
    with pytest.raises(ValueError):
        toy_encoder.encode_batch([[]])
    with pytest.raises(ValueError):
        toy_encoder.encode(make_sentence('long', ['w'] * 17))


def test_unknown_tokens_map_to_unk(toy_encoder):
    toy_encoder.eval()
    output = toy_encoder.encode(make_sentence('u', ['never', 'seen', 'words']))
    assert torch.isfinite(output.hidden).all()


def test_context_attention_averages_last_layers():
    attention = torch.rand(3, 2, 4, 4)
    attention = attention / attention.sum(dim=-1, keepdim=True)
    output = EncoderOutput(hidden=torch.zeros(4, 8), attention=attention)

    phi = context_attention(output, 2)
    assert torch.allclose(phi, attention[1:].mean(dim=(0, 1)))
    assert torch.allclose(phi.sum(dim=-1), torch.ones(4), atol=1e-5)
    assert torch.allclose(context_attention(output, 1), attention[2].mean(dim=0))


def test_context_attention_rejects_bad_depth():
    output = EncoderOutput(hidden=torch.zeros(2, 4), attention=torch.full((2, 1, 2, 2), 0.5))
    with pytest.raises(ValueError):
        context_attention(output, 0)
    with pytest.raises(ValueError):
        context_attention(output, 3)


def test_attentive_features_hand_oracle():
    features = torch.tensor([[1.0, 0.0], [0.0, 1.0]])
    attn = torch.tensor([[0.5, 0.5], [1.0, 0.0]])
    expected = torch.tensor([[0.25, 0.25], [0.5, 0.0]])
    assert torch.allclose(attentive_features(features, attn), expected)


def test_attentive_features_batch_uses_true_lengths():
    features = torch.tensor([[[2.0], [4.0]], [[6.0], [0.0]]])
    attn = torch.tensor([[[0.5, 0.5], [0.5, 0.5]], [[1.0, 0.0], [0.0, 0.0]]])
    mask = torch.tensor([[True, True], [True, False]])
    result = attentive_features(features, attn, mask)
    assert torch.allclose(result[0], torch.tensor([[1.5], [1.5]]))
    assert result[1, 0, 0].item() == pytest.approx(6.0)


def test_attentive_features_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        attentive_features(torch.zeros(3, 4), torch.zeros(2, 2))


def test_feature_projector_normalizes_tokens(toy_encoder, tiny_corpus):
    projector = FeatureProjector(32, 16, dropout_rate=0.0)
    features = project_features(toy_encoder.encode(tiny_corpus[0]), projector)
    assert features.shape == (4, 16)
    assert torch.allclose(features.mean(dim=-1), torch.zeros(4), atol=1e-5)
    with pytest.raises(ValueError):
        projector(torch.zeros(4, 8))


def test_checkpoint_roundtrip_and_errors(tmp_path):
    module = torch.nn.Linear(3, 2)
    path = tmp_path / 'model.pt'
    save_checkpoint(path, 'linear', {'note': 1}, module.state_dict())

    payload = load_checkpoint(path, 'linear')
    assert payload['meta'] == {'note': 1}
    other = torch.nn.Linear(3, 2)
    restore_state(other, payload['state_dict'], path)
    assert torch.equal(other.weight, module.weight)

    with pytest.raises(CheckpointError):
        load_checkpoint(path, 'detection')
    with pytest.raises(CheckpointError):
        restore_state(torch.nn.Linear(4, 2), payload['state_dict'], path)
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / 'absent.pt', 'linear')
    broken = tmp_path / 'broken.pt'
    broken.write_bytes(b'not a checkpoint')
    with pytest.raises(CheckpointError):
        load_checkpoint(broken, 'linear')


def test_build_encoder_needs_vocabulary_for_toy(toy_encoder_config):
    with pytest.raises(ValueError):
        build_encoder(toy_encoder_config)


def test_encoder_config_validates_depth():
    with pytest.raises(ConfigError):
        EncoderConfig(n_layers=2, L=3)
    with pytest.raises(ConfigError):
        EncoderConfig(d=30, n_heads=4)


class _WordPieceEncoding(dict):

    def __init__(self, input_ids, attention_mask, word_ids):
        super().__init__(input_ids=input_ids, attention_mask=attention_mask)
        self._word_ids = word_ids

    def word_ids(self, row):
        return self._word_ids[row]


class _SplittingTokenizer:
    """[CLS] + по два подтокена на длинное слово + [SEP]."""

    def __call__(self, batch, is_split_into_words=True, padding=True, return_tensors='pt'):
        rows, words = [], []
        for tokens in batch:
            ids, owners = [1], [None]
            for w, token in enumerate(tokens):
                pieces = 2 if len(token) > 4 else 1
                ids.extend([5 + (hash(token) + p) % 40 for p in range(pieces)])
                owners.extend([w] * pieces)
            ids.append(2)
            owners.append(None)
            rows.append(ids)
            words.append(owners)
        width = max(len(r) for r in rows)
        input_ids = torch.zeros(len(rows), width, dtype=torch.long)
        mask = torch.zeros(len(rows), width, dtype=torch.long)
        for i, r in enumerate(rows):
            input_ids[i, :len(r)] = torch.tensor(r)
            mask[i, :len(r)] = 1
            words[i] = words[i] + [None] * (width - len(r))
        return _WordPieceEncoding(input_ids, mask, words)


def test_pretrained_adapter_maps_subtokens_to_words():
    transformers = pytest.importorskip('transformers')
    from extractor.services.encoder.pretrained_encoder import PretrainedEncoder

    bert_config = transformers.BertConfig(vocab_size=50, hidden_size=16, num_hidden_layers=2,
                                          num_attention_heads=2, intermediate_size=32)
    model = transformers.BertModel._from_config(bert_config, attn_implementation='eager')
    model.eval()
    config = EncoderConfig(kind='external-pretrained', n_layers=2, n_heads=2, d=16, L=2)
    encoder = PretrainedEncoder(config, model=model, tokenizer=_SplittingTokenizer())

    with torch.no_grad():
        output = encoder.encode_batch([['a', 'bombing', 'city'], ['met']])
    assert output.hidden.shape == (2, 3, 16)
    assert output.attention.shape == (2, 2, 2, 3, 3)
    assert output.mask.tolist() == [[True, True, True], [True, False, False]]
    assert torch.allclose(output.attention[0].sum(dim=-1), torch.ones(2, 2, 3), atol=1e-5)

    with pytest.raises(ConfigError):
        PretrainedEncoder(EncoderConfig(kind='external-pretrained', n_layers=4, L=3), model=model,
                          tokenizer=_SplittingTokenizer())
