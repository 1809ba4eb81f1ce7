# Путь: extractor/services/math/prototypes.py
# =================================================================================
# ПРОТОТИПЫ ТИПОВ СОБЫТИЙ И УСИЛЕНИЕ ДЛИННОГО ХВОСТА
#
#   Прототип - среднее и популяционное стандартное отклонение признаков типа.
#   Связанное отклонение типа - сумма sigma других типов с весами
#   max(cos(mu_e, mu'), 0); собственный прототип в сумму не входит.
#   Редкие типы во время обучения получают f* = f + шум ~ N(0, sigma_assoc^2).
# =================================================================================
import math
from typing import Dict, List, Optional, Sequence

import torch

from extractor.data_models.prototype import Prototype, PrototypeStore
from extractor.services.math.losses import cosine_similarity
from extractor.utils.constants import LONG_TAIL_RATIO
from extractor.utils.log import debug, info


def compute_prototype(event_type: str, features: torch.Tensor) -> Prototype:
    """features: [N_e, h] - признаки триггерных токенов типа."""
    if features.ndim != 2 or features.shape[0] == 0:
        raise ValueError(f"нет токенов для прототипа типа '{event_type}'")
    features = features.detach()
    return Prototype(
        event_type=event_type,
        mu=features.mean(dim=0),
        sigma=features.std(dim=0, unbiased=False),
        count=int(features.shape[0]),
    )


def associated_std(target: Prototype, store: PrototypeStore) -> torch.Tensor:
    others = [p for p in store if p.event_type != target.event_type]
    result = torch.zeros_like(target.sigma)
    if not others:
        debug(f"[associated_std] Для '{target.event_type}' нет других прототипов")
        return result
    means = torch.stack([p.mu.to(target.mu) for p in others])
    weights = cosine_similarity(target.mu.unsqueeze(0).expand_as(means), means).clamp_min(0.0)
    if float(weights.sum()) == 0.0:
        debug(f"[associated_std] Все веса для '{target.event_type}' нулевые")
        return result
    sigmas = torch.stack([p.sigma.to(target.sigma) for p in others])
    return (weights.unsqueeze(1) * sigmas).sum(dim=0)


def sample_intensive_vector(sigma_assoc: torch.Tensor,
                            generator: Optional[torch.Generator] = None) -> torch.Tensor:
    """Независимая по измерениям гауссова выборка N(0, sigma_assoc^2)."""
    if bool((sigma_assoc < 0).any()):
        raise ValueError("стандартное отклонение не может быть отрицательным")
    noise = torch.randn(sigma_assoc.shape, generator=generator, dtype=sigma_assoc.dtype)
    return noise.to(sigma_assoc.device) * sigma_assoc


def long_tail_types(type_counts: Dict[str, int], ratio: float = LONG_TAIL_RATIO) -> List[str]:
    """floor(ratio * n) наименее частых типов; равные счетчики упорядочены по имени."""
    ranked = sorted(type_counts.items(), key=lambda kv: (kv[1], kv[0]))
    size = math.floor(ratio * len(ranked) + 1e-9)
    return [name for name, _ in ranked[:size]]


def enhance_long_tail(features: torch.Tensor, token_types: Sequence[Optional[str]],
                      long_tail: Sequence[str], store: PrototypeStore,
                      generator: Optional[torch.Generator] = None, training: bool = True,
                      assoc: Optional[Dict[str, torch.Tensor]] = None) -> torch.Tensor:
    """
    features: [N, h]; token_types[i] - золотой тип токена или None.
    Токены редких типов получают f + свежий шум, остальные не меняются.
    В режиме оценки функция тождественна. assoc - кэш связанных отклонений.
    """
    if not training or not long_tail:
        return features
    long_tail = set(long_tail)
    rows = [i for i, t in enumerate(token_types) if t is not None and t in long_tail]
    if not rows:
        return features
    assoc = {} if assoc is None else assoc
    noise = torch.zeros_like(features)
    for i in rows:
        event_type = token_types[i]
        if event_type not in assoc:
            assoc[event_type] = associated_std(store[event_type], store)
        noise[i] = sample_intensive_vector(assoc[event_type], generator).to(features.dtype)
    return features + noise


class LongTailEnhancer:
    """Усиление признаков редких типов на одной стадии; связанные отклонения кэшируются."""

    def __init__(self, store: PrototypeStore, long_tail: Sequence[str], generator: torch.Generator):
        self.store = store
        self.long_tail = list(long_tail)
        self.generator = generator
        self.assoc: Dict[str, torch.Tensor] = {}
        info(f"[LongTailEnhancer] Редких типов: {len(self.long_tail)} из {len(store)}")

    def __call__(self, features: torch.Tensor, token_types: Sequence[Optional[str]],
                 training: bool = True) -> torch.Tensor:
        return enhance_long_tail(features, token_types, self.long_tail, self.store,
                                 self.generator, training, self.assoc)
