# Путь: extractor/services/encoder/feature_projector.py

import torch
import torch.nn as nn

from extractor.services.encoder.toy_encoder import EncoderOutput


class FeatureProjector(nn.Module):
    """f = LayerNorm(W · Dropout(h) + b): из скрытого размера d в размер признаков h."""

    def __init__(self, hidden_dim: int, feature_dim: int, dropout_rate: float = 0.2):
        super().__init__()
        self.hidden_dim = hidden_dim
        self.feature_dim = feature_dim
        self.dropout = nn.Dropout(dropout_rate)
        self.linear = nn.Linear(hidden_dim, feature_dim)
        self.norm = nn.LayerNorm(feature_dim)

    def forward(self, hidden: torch.Tensor) -> torch.Tensor:
        if hidden.shape[-1] != self.hidden_dim:
            raise ValueError(
                f"размер скрытого состояния {hidden.shape[-1]} не совпадает с {self.hidden_dim}")
        return self.norm(self.linear(self.dropout(hidden)))


def project_features(output: EncoderOutput, projector: FeatureProjector) -> torch.Tensor:
    return projector(output.hidden)
