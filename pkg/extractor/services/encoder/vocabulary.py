# Путь: extractor/services/encoder/vocabulary.py

from typing import Dict, Iterable, List, Sequence, Tuple

import torch

from extractor.utils.constants import PAD_TOKEN, UNK_TOKEN


class Vocabulary:
    """Словарь токенов игрушечного кодировщика; 0 - паддинг, 1 - неизвестный."""

    def __init__(self, tokens: Iterable[str] = ()):
        self.token_to_id: Dict[str, int] = {PAD_TOKEN: 0, UNK_TOKEN: 1}
        for token in tokens:
            self.add(token)

    @classmethod
    def from_sentences(cls, token_lists: Iterable[Sequence[str]]) -> 'Vocabulary':
        vocab = cls()
        for tokens in token_lists:
            for token in tokens:
                vocab.add(token)
        return vocab

    def add(self, token: str) -> int:
        if token not in self.token_to_id:
            self.token_to_id[token] = len(self.token_to_id)
        return self.token_to_id[token]

    def __len__(self):
        return len(self.token_to_id)

    def ids(self, tokens: Sequence[str]) -> List[int]:
        unk = self.token_to_id[UNK_TOKEN]
        return [self.token_to_id.get(t, unk) for t in tokens]

    def batch(self, token_lists: Sequence[Sequence[str]]) -> Tuple[torch.Tensor, torch.Tensor]:
        """(ids [B, n], mask [B, n]) с паддингом до самого длинного предложения."""
        width = max(len(t) for t in token_lists)
        ids = torch.zeros(len(token_lists), width, dtype=torch.long)
        mask = torch.zeros(len(token_lists), width, dtype=torch.bool)
        for row, tokens in enumerate(token_lists):
            ids[row, :len(tokens)] = torch.tensor(self.ids(tokens), dtype=torch.long)
            mask[row, :len(tokens)] = True
        return ids, mask

    def to_dict(self):
        return {'tokens': [t for t, _ in sorted(self.token_to_id.items(), key=lambda kv: kv[1])]}

    @staticmethod
    def from_dict(d):
        vocab = Vocabulary()
        for token in d['tokens']:
            vocab.add(token)
        return vocab
