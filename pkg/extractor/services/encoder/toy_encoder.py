# Путь: extractor/services/encoder/toy_encoder.py

# =================================================================================
# КОНТЕКСТНЫЕ КОДИРОВЩИКИ
#
# НАЗНАЧЕНИЕ:
#   Интерфейс ContextEncoder выдает скрытые состояния токенов и карты
#   самовнимания всех слоев и голов. Внимание отдается явно, чтобы
#   внимательные признаки ученика и учителя считались каждым своей
#   картой внимания.
#
#   ToyTransformerEncoder - маленький трансформер, обучаемый с нуля
#   (2 слоя, 2 головы, d=32 по умолчанию).
# =================================================================================

from dataclasses import dataclass
from typing import List, Optional, Sequence

import torch
import torch.nn as nn

from extractor.data_models.encoder_config import EncoderConfig
from extractor.data_models.sentence import TokenizedSentence
from extractor.services.encoder.vocabulary import Vocabulary


@dataclass
class EncoderOutput:
    """
    hidden: [n, d] или [B, n, d];
    attention: [n_layers, n_heads, n, n] или [B, n_layers, n_heads, n, n];
    mask: [B, n] для батча (True - настоящий токен).
    """
    hidden: torch.Tensor
    attention: torch.Tensor
    mask: Optional[torch.Tensor] = None

    def single(self, row: int) -> 'EncoderOutput':
        """Вырезает одно предложение из батча без паддинга."""
        n = int(self.mask[row].sum()) if self.mask is not None else self.hidden.shape[1]
        return EncoderOutput(hidden=self.hidden[row, :n],
                             attention=self.attention[row, :, :, :n, :n])


class ContextEncoder(nn.Module):
    """Общий интерфейс кодировщиков."""

    config: EncoderConfig

    @property
    def hidden_dim(self) -> int:
        return self.config.d

    def encode_batch(self, token_lists: Sequence[Sequence[str]]) -> EncoderOutput:
        raise NotImplementedError()

    def check_length(self, token_lists: Sequence[Sequence[str]]):
        for tokens in token_lists:
            if len(tokens) == 0:
                raise ValueError("пустое предложение нельзя закодировать")
            if len(tokens) > self.config.max_length:
                raise ValueError(
                    f"длина предложения {len(tokens)} превышает max_length={self.config.max_length}")

    def encode(self, sentence: TokenizedSentence) -> EncoderOutput:
        return self.encode_batch([sentence.tokens]).single(0)


class ToyEncoderLayer(nn.Module):
    """Пост-нормированный слой трансформера, возвращающий веса всех голов."""

    def __init__(self, d: int, n_heads: int, dropout: float):
        super().__init__()
        self.attention = nn.MultiheadAttention(d, n_heads, dropout=0.0, batch_first=True)
        self.norm1 = nn.LayerNorm(d)
        self.norm2 = nn.LayerNorm(d)
        self.feed_forward = nn.Sequential(nn.Linear(d, 4 * d), nn.GELU(), nn.Linear(4 * d, d))
        self.dropout = nn.Dropout(dropout)

    def forward(self, x: torch.Tensor, padding_mask: torch.Tensor):
        out, weights = self.attention(x, x, x, key_padding_mask=padding_mask,
                                      need_weights=True, average_attn_weights=False)
        x = self.norm1(x + self.dropout(out))
        x = self.norm2(x + self.dropout(self.feed_forward(x)))
        return x, weights


class ToyTransformerEncoder(ContextEncoder):

    def __init__(self, vocab: Vocabulary, config: EncoderConfig):
        super().__init__()
        self.vocab = vocab
        self.config = config
        generator_state = torch.random.get_rng_state()
        torch.manual_seed(config.seed)
        self.embedding = nn.Embedding(len(vocab), config.d, padding_idx=0)
        self.position = nn.Embedding(config.max_length, config.d)
        self.embedding_dropout = nn.Dropout(config.dropout_rate)
        self.layers = nn.ModuleList(
            ToyEncoderLayer(config.d, config.n_heads, config.dropout_rate) for _ in range(config.n_layers))
        torch.random.set_rng_state(generator_state)

    def forward(self, token_ids: torch.Tensor, mask: torch.Tensor) -> EncoderOutput:
        positions = torch.arange(token_ids.shape[1], device=token_ids.device).unsqueeze(0)
        x = self.embedding_dropout(self.embedding(token_ids) + self.position(positions))
        attentions: List[torch.Tensor] = []
        for layer in self.layers:
            x, weights = layer(x, ~mask)
            attentions.append(weights)
        return EncoderOutput(hidden=x, attention=torch.stack(attentions, dim=1), mask=mask)

    def encode_batch(self, token_lists: Sequence[Sequence[str]]) -> EncoderOutput:
        self.check_length(token_lists)
        ids, mask = self.vocab.batch(token_lists)
        device = self.embedding.weight.device
        return self(ids.to(device), mask.to(device))
