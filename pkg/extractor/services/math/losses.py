# Путь: extractor/services/math/losses.py
# =================================================================================
# ФУНКЦИИ ПОТЕРЬ
#
#   classification_loss - кросс-энтропия по вероятностям классификатора;
#   afd_loss - дистилляция внимательных признаков, +(1/|N|) * sum(1 - cos);
#   spd_loss - избирательная дистилляция предсказаний по прежним типам
#              (без NA) на токенах, не помеченных новыми типами;
#   combined_loss - (1 - rho) * cls + rho * (alpha * afd + beta * spd),
#              rho = |прежние типы| / |все виданные типы|;
#   role_loss - кросс-энтропия ролей аргументов.
#
#   Все функции принимают уже «сплющенные» токены: [N, C] или [N, h].
# =================================================================================
from typing import Optional, Sequence

import torch

from extractor.utils.constants import PROBABILITY_FLOOR
from extractor.utils.log import debug, warn


def _select(tensor: torch.Tensor, token_mask: Optional[torch.Tensor]) -> torch.Tensor:
    return tensor if token_mask is None else tensor[token_mask]


def _clamped_log(probs: torch.Tensor, source: str) -> torch.Tensor:
    n_clamped = int((probs < PROBABILITY_FLOOR).sum())
    if n_clamped:
        warn(f"[{source}] {n_clamped} вероятностей ниже {PROBABILITY_FLOOR} ограничены снизу")
    return torch.log(probs.clamp_min(PROBABILITY_FLOOR))


def _cross_entropy(probs, gold, token_mask, source) -> torch.Tensor:
    probs = _select(probs, token_mask)
    gold = _select(gold, token_mask)
    if probs.shape[0] == 0:
        return probs.new_zeros(())
    gold_probs = probs.gather(1, gold.long().unsqueeze(1)).squeeze(1)
    return -_clamped_log(gold_probs, source).mean()


def classification_loss(probs: torch.Tensor, gold_labels: torch.Tensor,
                        token_mask: Optional[torch.Tensor] = None) -> torch.Tensor:
    """
    -(1/|N|) * sum_x log P(gold(x) | x). N - все настоящие токены батча,
    положительные и NA; token_mask отбрасывает паддинг.
    """
    return _cross_entropy(probs, gold_labels, token_mask, 'classification_loss')


def role_loss(role_probs: torch.Tensor, gold_roles: torch.Tensor) -> torch.Tensor:
    """Средняя кросс-энтропия по кандидатам; индекс 0 - роль None."""
    return _cross_entropy(role_probs, gold_roles, None, 'role_loss')


def cosine_similarity(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    """Построчный косинус; строка с нулевой нормой дает 0."""
    norms = a.norm(dim=-1) * b.norm(dim=-1)
    zero = norms == 0
    if bool(zero.any()):
        debug(f"[cosine_similarity] {int(zero.sum())} векторов с нулевой нормой, косинус принят за 0")
    dots = (a * b).sum(dim=-1)
    return torch.where(zero, torch.zeros_like(dots), dots / torch.where(zero, torch.ones_like(norms), norms))


def afd_loss(student_attentive: torch.Tensor, teacher_attentive: torch.Tensor,
             token_mask: Optional[torch.Tensor] = None) -> torch.Tensor:
    student = _select(student_attentive, token_mask)
    teacher = _select(teacher_attentive, token_mask)
    if student.shape != teacher.shape:
        raise ValueError(f"формы ученика {tuple(student.shape)} и учителя {tuple(teacher.shape)} различны")
    if student.shape[0] == 0:
        return student.new_zeros(())
    return (1.0 - cosine_similarity(student, teacher)).mean()


def spd_loss(student_probs: torch.Tensor, teacher_probs: torch.Tensor,
             token_mask: Optional[torch.Tensor], prev_indices: Sequence[int]) -> torch.Tensor:
    """
    -(1/|Ñ|) * sum_{x in Ñ} sum_{e in прежние} P_teacher(e|x) * log P_student(e|x).

    token_mask задает Ñ; prev_indices - индексы прежних типов (без NA)
    в расширенном классификаторе. Распределение ученика перенормируется
    на прежние типы, вероятности учителя берутся как есть: токен весит
    столько, сколько массы учитель отдал прежним типам. Минимум достигается,
    когда отношения вероятностей ученика совпадают с учительскими, и равен
    -sum P_t * log(P_t / S_t), где S_t - масса учителя на прежних типах.
    На логиты NA и новых типов потеря градиента не дает.
    """
    if len(prev_indices) == 0:
        return student_probs.new_zeros(())
    student = _select(student_probs, token_mask)
    teacher = _select(teacher_probs, token_mask)
    if student.shape[0] == 0:
        debug("[spd_loss] Пустое множество токенов, потеря равна 0")
        return student_probs.new_zeros(())
    index = torch.as_tensor(list(prev_indices), dtype=torch.long, device=student.device)
    student_prev = student.index_select(1, index)
    student_prev = student_prev / student_prev.sum(dim=1, keepdim=True).clamp_min(PROBABILITY_FLOOR)
    teacher_prev = teacher.index_select(1, index)
    return -(teacher_prev * _clamped_log(student_prev, 'spd_loss')).sum(dim=1).mean()


def distillation_ratio(n_prev_types: int, n_seen_types: int) -> float:
    if n_prev_types > n_seen_types:
        raise ValueError(f"прежних типов ({n_prev_types}) больше, чем виданных ({n_seen_types})")
    if n_seen_types == 0:
        return 0.0
    return n_prev_types / n_seen_types


def combined_loss(l_cls, l_afd, l_spd, n_prev_types: int, n_seen_types: int,
                  alpha: float = 1.0, beta: float = 1.0):
    rho = distillation_ratio(n_prev_types, n_seen_types)
    if rho == 0.0:
        return l_cls
    return (1.0 - rho) * l_cls + rho * (alpha * l_afd + beta * l_spd)
