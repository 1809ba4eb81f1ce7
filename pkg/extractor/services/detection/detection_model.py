# Путь: extractor/services/detection/detection_model.py

# =================================================================================
# МОДЕЛЬ ДЕТЕКЦИИ СОБЫТИЙ
#
#   Кодировщик + проектор признаков + растущий линейный softmax-классификатор
#   над виданными типами и NA (индекс 0). Пространство меток только растет:
#   при расширении старые строки классификатора копируются без изменений,
#   новые инициализируются N(0, 0.02) от переданного генератора, bias = 0.
#
#   ModelSnapshot - замороженная копия модели прошлой стадии (учитель).
# =================================================================================

import copy
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import torch
import torch.nn as nn

from extractor.data_models.encoder_config import EncoderConfig
from extractor.data_models.sentence import TokenizedSentence
from extractor.services.encoder import (ContextEncoder, FeatureProjector, ToyTransformerEncoder,
                                        Vocabulary, build_encoder, context_attention)
from extractor.services.encoder.checkpoint import load_checkpoint, restore_state, save_checkpoint
from extractor.utils.constants import NA_LABEL, NEW_ROW_INIT_STD
from extractor.utils.log import debug

CHECKPOINT_KIND = 'detection'


@dataclass
class DetectionForward:
    """features: [B, n, h]; attention: усредненное внимание [B, n, n]; mask: [B, n]."""
    features: torch.Tensor
    attention: torch.Tensor
    mask: torch.Tensor


class DetectionModel(nn.Module):

    def __init__(self, encoder: ContextEncoder, feature_dim: int, dropout_rate: float = 0.2,
                 L: int = 3, seed: int = 0):
        super().__init__()
        self.encoder = encoder
        self.feature_dim = feature_dim
        self.dropout_rate = dropout_rate
        self.L = L
        self.seed = seed
        generator_state = torch.random.get_rng_state()
        torch.manual_seed(seed)
        self.projector = FeatureProjector(encoder.hidden_dim, feature_dim, dropout_rate)
        self.classifier = nn.Linear(feature_dim, 1)
        torch.random.set_rng_state(generator_state)
        self.label_space: List[str] = [NA_LABEL]

    # --- Пространство меток ---

    @property
    def n_labels(self) -> int:
        return len(self.label_space)

    @property
    def seen_types(self) -> List[str]:
        return self.label_space[1:]

    def label_index(self) -> Dict[str, int]:
        return {t: i for i, t in enumerate(self.label_space)}

    def widen(self, new_types: Sequence[str], generator: Optional[torch.Generator] = None):
        """Добавляет строки классификатора для новых типов."""
        added = [t for t in new_types if t not in self.label_space]
        if not added:
            return
        old = self.classifier
        n_old = old.out_features
        layer = nn.Linear(self.feature_dim, n_old + len(added)).to(device=old.weight.device, dtype=old.weight.dtype)
        with torch.no_grad():
            rows = torch.randn(len(added), self.feature_dim, generator=generator, dtype=old.weight.dtype)
            layer.weight[:n_old] = old.weight
            layer.weight[n_old:] = rows.to(old.weight.device) * NEW_ROW_INIT_STD
            layer.bias[:n_old] = old.bias
            layer.bias[n_old:] = 0.0
        self.classifier = layer
        self.label_space.extend(added)
        debug(f"[DetectionModel] Классификатор расширен: {n_old} -> {self.n_labels} меток")

    # --- Прямой проход ---

    def forward(self, token_lists: Sequence[Sequence[str]]) -> DetectionForward:
        output = self.encoder.encode_batch(token_lists)
        features = self.projector(output.hidden)
        return DetectionForward(features=features, attention=context_attention(output, self.L), mask=output.mask)

    def probabilities(self, features: torch.Tensor) -> torch.Tensor:
        return torch.softmax(self.classifier(features), dim=-1)

    def predict_probs(self, token_lists: Sequence[Sequence[str]]) -> Tuple[torch.Tensor, torch.Tensor]:
        """Вероятности [B, n, C] и маска в режиме оценки; исходный режим восстанавливается."""
        was_training = self.training
        self.eval()
        try:
            with torch.no_grad():
                forward = self(token_lists)
                return self.probabilities(forward.features), forward.mask
        finally:
            self.train(was_training)

    def classify_tokens(self, sentence: TokenizedSentence) -> torch.Tensor:
        """[n, |виданные типы| + 1]: строка j - P(. | x_j)."""
        probs, _ = self.predict_probs([sentence.tokens])
        return probs[0, :len(sentence)]

    def snapshot(self) -> 'ModelSnapshot':
        return ModelSnapshot(self)

    # --- Чекпоинты ---

    def save(self, path):
        meta = {
            'encoder': self.encoder.config.to_dict(),
            'vocab': self.encoder.vocab.to_dict() if isinstance(self.encoder, ToyTransformerEncoder) else None,
            'feature_dim': self.feature_dim,
            'dropout_rate': self.dropout_rate,
            'L': self.L,
            'seed': self.seed,
            'label_space': list(self.label_space),
        }
        save_checkpoint(path, CHECKPOINT_KIND, meta, self.state_dict())

    @staticmethod
    def load(path) -> 'DetectionModel':
        payload = load_checkpoint(path, CHECKPOINT_KIND)
        meta = payload['meta']
        vocab = Vocabulary.from_dict(meta['vocab']) if meta.get('vocab') else None
        encoder = build_encoder(EncoderConfig.from_dict(meta['encoder']), vocab)
        model = DetectionModel(encoder, meta['feature_dim'], meta['dropout_rate'], meta['L'], meta['seed'])
        model.label_space = list(meta['label_space'])
        model.classifier = nn.Linear(model.feature_dim, len(model.label_space))
        restore_state(model, payload['state_dict'], path)
        return model


class ModelSnapshot:
    """Неизменяемая копия модели: всегда в режиме оценки, без градиентов."""

    def __init__(self, model: DetectionModel):
        self._model = copy.deepcopy(model)
        self._model.eval()
        self._model.requires_grad_(False)

    @property
    def label_space(self) -> List[str]:
        return list(self._model.label_space)

    def to(self, device) -> 'ModelSnapshot':
        self._model.to(device)
        return self

    def forward(self, token_lists: Sequence[Sequence[str]]) -> DetectionForward:
        with torch.no_grad():
            return self._model(token_lists)

    def probabilities(self, features: torch.Tensor) -> torch.Tensor:
        with torch.no_grad():
            return self._model.probabilities(features)

    def predict_probs(self, token_lists: Sequence[Sequence[str]]) -> Tuple[torch.Tensor, torch.Tensor]:
        return self._model.predict_probs(token_lists)

    def classify_tokens(self, sentence: TokenizedSentence) -> torch.Tensor:
        return self._model.classify_tokens(sentence)
