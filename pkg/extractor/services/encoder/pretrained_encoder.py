# Путь: extractor/services/encoder/pretrained_encoder.py

from typing import Sequence

import torch

from extractor.data_models.encoder_config import EncoderConfig
from extractor.services.encoder.toy_encoder import ContextEncoder, EncoderOutput
from extractor.utils.errors import ConfigError
from extractor.utils.log import info


class PretrainedEncoder(ContextEncoder):
    """
    Адаптер к предобученной модели HuggingFace. Скрытое состояние слова -
    первый подтокен; внимание слова - строки/столбцы первых подтокенов,
    перенормированные по строкам.
    """

    def __init__(self, config: EncoderConfig, model=None, tokenizer=None):
        super().__init__()
        from transformers import AutoModel, AutoTokenizer

        self.config = config
        self.model = model or AutoModel.from_pretrained(
            config.pretrained_name, output_attentions=True, attn_implementation='eager')
        self.tokenizer = tokenizer or AutoTokenizer.from_pretrained(config.pretrained_name, use_fast=True)
        self.config.d = self.model.config.hidden_size
        self.config.n_layers = self.model.config.num_hidden_layers
        self.config.n_heads = self.model.config.num_attention_heads
        if self.config.L > self.config.n_layers:
            raise ConfigError(f"L={self.config.L} больше числа слоев модели {self.config.n_layers}")
        info(f"[PretrainedEncoder] Модель {config.pretrained_name or type(self.model).__name__}: "
             f"{self.config.n_layers} слоев, {self.config.n_heads} голов, d={self.config.d}")

    def encode_batch(self, token_lists: Sequence[Sequence[str]]) -> EncoderOutput:
        self.check_length(token_lists)
        encoded = self.tokenizer([list(t) for t in token_lists], is_split_into_words=True,
                                 padding=True, return_tensors='pt')
        device = next(self.model.parameters()).device
        outputs = self.model(input_ids=encoded['input_ids'].to(device),
                             attention_mask=encoded['attention_mask'].to(device),
                             output_attentions=True)
        sub_attention = torch.stack(outputs.attentions, dim=1)  # [B, layers, heads, s, s]

        width = max(len(t) for t in token_lists)
        batch = len(token_lists)
        hidden = outputs.last_hidden_state.new_zeros(batch, width, outputs.last_hidden_state.shape[-1])
        attention = sub_attention.new_zeros(batch, sub_attention.shape[1], sub_attention.shape[2], width, width)
        mask = torch.zeros(batch, width, dtype=torch.bool, device=device)
        for row in range(batch):
            first = {}
            for position, word in enumerate(encoded.word_ids(row)):
                if word is not None and word not in first:
                    first[word] = position
            index = torch.tensor([first[w] for w in range(len(token_lists[row]))], device=device)
            n = len(index)
            hidden[row, :n] = outputs.last_hidden_state[row, index]
            words = sub_attention[row][:, :, index][:, :, :, index]
            attention[row, :, :, :n, :n] = words / words.sum(dim=-1, keepdim=True).clamp_min(1e-12)
            mask[row, :n] = True
        return EncoderOutput(hidden=hidden, attention=attention, mask=mask)
