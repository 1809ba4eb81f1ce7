# Путь: tests/test_prototypes.py

import math

import pytest
import torch

from extractor.data_models.prototype import Prototype, PrototypeStore
from extractor.services.math.prototypes import (LongTailEnhancer, associated_std, compute_prototype,
                                                enhance_long_tail, long_tail_types, sample_intensive_vector)
from extractor.utils.errors import PrototypeError


def _store(*prototypes):
    store = PrototypeStore()
    for p in prototypes:
        store.add(p)
    return store


def _proto(name, mu, sigma):
    return Prototype(name, torch.tensor(mu, dtype=torch.float64), torch.tensor(sigma, dtype=torch.float64))


def test_prototype_mean_and_population_std_oracle():
    rows = [[1.0, 2.0], [3.0, 2.0], [5.0, 8.0]]
    prototype = compute_prototype('Attack', torch.tensor(rows, dtype=torch.float64))

    for dim in range(2):
        column = [r[dim] for r in rows]
        mean = sum(column) / 3
        std = math.sqrt(sum((v - mean) ** 2 for v in column) / 3)
        assert prototype.mu[dim].item() == pytest.approx(mean, abs=1e-9)
        assert prototype.sigma[dim].item() == pytest.approx(std, abs=1e-9)
    assert prototype.count == 3


def test_single_instance_prototype_has_zero_std():
    prototype = compute_prototype('Die', torch.tensor([[0.3, -0.2]]))
    assert torch.equal(prototype.sigma, torch.zeros(2))


def test_prototype_requires_tokens():
    with pytest.raises(ValueError):
        compute_prototype('Meet', torch.zeros(0, 4))


def test_associated_std_excludes_self_and_clamps_negative_weights():
    target = _proto('A', [1.0, 0.0], [9.0, 9.0])
    close = _proto('B', [1.0, 1.0], [0.2, 0.4])
    opposite = _proto('C', [-1.0, 0.0], [5.0, 5.0])
    orthogonal = _proto('D', [0.0, 2.0], [7.0, 7.0])

    result = associated_std(target, _store(target, close, opposite, orthogonal))

    weight = 1.0 / math.sqrt(2.0)
    assert result.tolist() == pytest.approx([weight * 0.2, weight * 0.4], abs=1e-9)


def test_associated_std_alone_is_zero():
    target = _proto('A', [1.0, 0.0], [1.0, 1.0])
    assert torch.equal(associated_std(target, _store(target)), torch.zeros(2, dtype=torch.float64))


def test_sampling_statistics_follow_sigma():
    sigma = torch.tensor([0.5, 1.0, 2.0], dtype=torch.float64)
    generator = torch.Generator().manual_seed(0)
    draws = torch.stack([sample_intensive_vector(sigma, generator) for _ in range(10000)])

    assert torch.all(draws.mean(dim=0).abs() < 0.05)
    ratio = draws.std(dim=0) / sigma
    assert torch.all((ratio - 1.0).abs() < 0.05)


def test_zero_sigma_leaves_features_unchanged():
    features = torch.randn(3, 2, dtype=torch.float64)
    store = _store(_proto('A', [1.0, 0.0], [0.0, 0.0]), _proto('B', [1.0, 0.0], [0.0, 0.0]))
    enhanced = enhance_long_tail(features, ['A', None, 'A'], ['A'], store)
    assert torch.equal(enhanced, features)


def test_negative_sigma_is_rejected():
    with pytest.raises(ValueError):
        sample_intensive_vector(torch.tensor([0.1, -0.1]))


def test_long_tail_selects_least_frequent_with_name_ties():
    counts = {'A': 50, 'B': 3, 'C': 3, 'D': 10, 'E': 1}
    assert long_tail_types(counts, 0.8) == ['E', 'B', 'C', 'D']
    assert long_tail_types(counts, 0.0) == []
    ten = {f"T{i}": i for i in range(10)}
    assert len(long_tail_types(ten, 0.8)) == 8


def test_enhancement_only_touches_long_tail_tokens_in_training():
    store = _store(_proto('Rare', [1.0, 0.0], [1.0, 1.0]), _proto('Head', [1.0, 0.1], [2.0, 2.0]))
    features = torch.zeros(4, 2, dtype=torch.float64)
    generator = torch.Generator().manual_seed(1)
    types = ['Rare', 'Head', None, 'Rare']

    enhanced = enhance_long_tail(features, types, ['Rare'], store, generator)
    assert torch.equal(enhanced[1], features[1])
    assert torch.equal(enhanced[2], features[2])
    assert not torch.equal(enhanced[0], features[0])
    assert not torch.equal(enhanced[0], enhanced[3])

    assert enhance_long_tail(features, types, ['Rare'], store, generator, training=False) is features


def test_missing_prototype_for_long_tail_type():
    store = _store(_proto('Head', [1.0, 0.0], [1.0, 1.0]))
    with pytest.raises(PrototypeError):
        enhance_long_tail(torch.zeros(1, 2), ['Rare'], ['Rare'], store)


def test_enhancer_caches_associated_std_and_is_seeded():
    store = _store(_proto('Rare', [1.0, 0.0], [1.0, 1.0]), _proto('Head', [1.0, 0.5], [0.5, 0.5]))
    features = torch.zeros(2, 2, dtype=torch.float64)

    first = LongTailEnhancer(store, ['Rare'], torch.Generator().manual_seed(3))
    second = LongTailEnhancer(store, ['Rare'], torch.Generator().manual_seed(3))
    assert torch.equal(first(features, ['Rare', None]), second(features, ['Rare', None]))
    assert set(first.assoc) == {'Rare'}
    assert torch.equal(first(features, ['Rare', None], training=False), features)


def test_prototype_store_serialization():
    store = _store(_proto('A', [1.0, 2.0], [0.1, 0.2]))
    restored = PrototypeStore.from_dict(store.to_dict())
    assert restored.types() == ['A']
    assert restored['A'].mu.tolist() == pytest.approx([1.0, 2.0])
