# Путь: extractor/services/encoder/attention.py

# =================================================================================
# ВНИМАНИЕ В КОНТЕКСТЕ
#
#   context_attention: среднее самовнимания последних L слоев по всем головам,
#   направление запрос -> ключ (строка j - распределение внимания токена j).
#   attentive_features: A_j = (1/n) * sum_k attn[j, k] * f_k. Множитель 1/n
#   применяется поверх строчно-нормированного внимания.
# =================================================================================

from typing import Optional

import torch

from extractor.services.encoder.toy_encoder import EncoderOutput


def context_attention(output: EncoderOutput, L: int) -> torch.Tensor:
    """[n, n] для одного предложения или [B, n, n] для батча."""
    attention = output.attention
    n_layers = attention.shape[-4]
    if not 1 <= L <= n_layers:
        raise ValueError(f"L={L} вне диапазона [1, {n_layers}]")
    return attention[..., -L:, :, :, :].mean(dim=(-4, -3))


def attentive_features(features: torch.Tensor, attn: torch.Tensor,
                       mask: Optional[torch.Tensor] = None) -> torch.Tensor:
    """
    features: [n, h] или [B, n, h]; attn: [n, n] или [B, n, n].
    Для батча n - число настоящих токенов каждого предложения (mask).
    """
    if attn.shape[-1] != features.shape[-2] or attn.shape[-2] != features.shape[-2]:
        raise ValueError(
            f"форма внимания {tuple(attn.shape)} не согласована с признаками {tuple(features.shape)}")
    weighted = attn @ features
    if mask is None:
        return weighted / features.shape[-2]
    lengths = mask.sum(dim=-1).clamp_min(1).to(features.dtype)
    return weighted / lengths[..., None, None]
