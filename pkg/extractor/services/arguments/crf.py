# Путь: extractor/services/arguments/crf.py

# =================================================================================
# ЛИНЕЙНО-ЦЕПОЧЕЧНЫЙ CRF НАД BIO-ТЕГАМИ
#
#   Теги: O=0, B=1, I=2. Переходы O -> I и старт -> I запрещены: им
#   добавляется большой штраф и в функции правдоподобия, и при декодировании
#   Витерби, так что декодер никогда не выдает недопустимую цепочку.
# =================================================================================

from typing import List

import torch
import torch.nn as nn

from extractor.utils.constants import BIO_TAGS

TAG_O, TAG_B, TAG_I = 0, 1, 2
FORBIDDEN = -1e4


class BioCRF(nn.Module):

    def __init__(self):
        super().__init__()
        n = len(BIO_TAGS)
        self.transitions = nn.Parameter(torch.zeros(n, n))
        self.start_transitions = nn.Parameter(torch.zeros(n))
        self.end_transitions = nn.Parameter(torch.zeros(n))
        constraint = torch.zeros(n, n)
        constraint[TAG_O, TAG_I] = FORBIDDEN
        start_constraint = torch.zeros(n)
        start_constraint[TAG_I] = FORBIDDEN
        self.register_buffer('constraint', constraint)
        self.register_buffer('start_constraint', start_constraint)

    def _transitions(self):
        return self.transitions + self.constraint, self.start_transitions + self.start_constraint

    def _path_score(self, emissions, tags, mask):
        transitions, start = self._transitions()
        batch = torch.arange(emissions.shape[0], device=emissions.device)
        score = start[tags[:, 0]] + emissions[batch, 0, tags[:, 0]]
        for t in range(1, emissions.shape[1]):
            step = transitions[tags[:, t - 1], tags[:, t]] + emissions[batch, t, tags[:, t]]
            score = score + step * mask[:, t]
        lengths = mask.long().sum(dim=1)
        last_tags = tags[batch, lengths - 1]
        return score + self.end_transitions[last_tags]

    def _log_partition(self, emissions, mask):
        transitions, start = self._transitions()
        alpha = start + emissions[:, 0]
        for t in range(1, emissions.shape[1]):
            candidate = alpha.unsqueeze(2) + transitions.unsqueeze(0) + emissions[:, t].unsqueeze(1)
            next_alpha = torch.logsumexp(candidate, dim=1)
            alpha = torch.where(mask[:, t].unsqueeze(1).bool(), next_alpha, alpha)
        return torch.logsumexp(alpha + self.end_transitions, dim=1)

    def neg_log_likelihood(self, emissions: torch.Tensor, tags: torch.Tensor,
                           mask: torch.Tensor) -> torch.Tensor:
        """emissions [B, n, 3], tags [B, n], mask [B, n]; среднее по батчу."""
        mask = mask.to(emissions.dtype)
        return (self._log_partition(emissions, mask) - self._path_score(emissions, tags, mask)).mean()

    def decode(self, emissions: torch.Tensor, mask: torch.Tensor) -> List[List[int]]:
        """Витерби с учетом запретов; возвращает теги настоящих токенов."""
        transitions, start = self._transitions()
        score = start + emissions[:, 0]
        history = []
        for t in range(1, emissions.shape[1]):
            candidate = score.unsqueeze(2) + transitions.unsqueeze(0)
            best, index = candidate.max(dim=1)
            next_score = best + emissions[:, t]
            score = torch.where(mask[:, t].unsqueeze(1).bool(), next_score, score)
            history.append(index)
        score = score + self.end_transitions
        lengths = mask.long().sum(dim=1).tolist()
        paths = []
        for row, length in enumerate(lengths):
            best_tag = int(score[row].argmax())
            path = [best_tag]
            for t in range(length - 1, 0, -1):
                best_tag = int(history[t - 1][row, best_tag])
                path.append(best_tag)
            paths.append(path[::-1])
        return paths
