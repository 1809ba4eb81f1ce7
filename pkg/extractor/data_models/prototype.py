# Путь: extractor/data_models/prototype.py

from dataclasses import dataclass, field
from typing import Dict, Iterator, List

import torch

from extractor.utils.errors import PrototypeError


@dataclass
class Prototype:
    """Среднее и поэлементное стандартное отклонение признаков типа."""
    event_type: str
    mu: torch.Tensor
    sigma: torch.Tensor
    count: int = 1

    def to_dict(self):
        return {
            'event_type': self.event_type,
            'mu': self.mu.detach().cpu().tolist(),
            'sigma': self.sigma.detach().cpu().tolist(),
            'count': self.count,
        }

    @staticmethod
    def from_dict(d):
        return Prototype(
            event_type=d['event_type'],
            mu=torch.tensor(d['mu'], dtype=torch.float32),
            sigma=torch.tensor(d['sigma'], dtype=torch.float32),
            count=int(d.get('count', 1)),
        )


@dataclass
class PrototypeStore:
    prototypes: Dict[str, Prototype] = field(default_factory=dict)

    def __contains__(self, event_type: str) -> bool:
        return event_type in self.prototypes

    def __len__(self):
        return len(self.prototypes)

    def __iter__(self) -> Iterator[Prototype]:
        return iter(self.prototypes.values())

    def __getitem__(self, event_type: str) -> Prototype:
        if event_type not in self.prototypes:
            raise PrototypeError(f"нет прототипа для типа '{event_type}'")
        return self.prototypes[event_type]

    def add(self, prototype: Prototype):
        self.prototypes[prototype.event_type] = prototype

    def types(self) -> List[str]:
        return list(self.prototypes)

    def to_dict(self):
        return {t: p.to_dict() for t, p in self.prototypes.items()}

    @staticmethod
    def from_dict(d):
        return PrototypeStore({t: Prototype.from_dict(p) for t, p in d.items()})
