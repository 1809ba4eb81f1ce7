# Путь: extractor/data_models/stage_report.py

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple


@dataclass
class Score:
    """Микро-усредненные точность, полнота и F1."""
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    n_gold: int = 0
    n_predicted: int = 0
    n_correct: int = 0

    def to_dict(self):
        return {
            'precision': self.precision,
            'recall': self.recall,
            'f1': self.f1,
            'n_gold': self.n_gold,
            'n_predicted': self.n_predicted,
            'n_correct': self.n_correct,
        }

    @staticmethod
    def from_dict(d):
        if d is None:
            return None
        return Score(**{k: d[k] for k in ('precision', 'recall', 'f1', 'n_gold', 'n_predicted', 'n_correct') if k in d})


@dataclass
class F1Matrix:
    """F1_{i,j}: F1 на test задачи j после стадии i (j <= i), нумерация с 1."""
    entries: Dict[Tuple[int, int], float] = field(default_factory=dict)

    def set(self, i: int, j: int, value: float):
        if j > i:
            raise ValueError(f"F1Matrix нижнетреугольная: j={j} > i={i}")
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"F1 должен лежать в [0, 1], получено {value}")
        self.entries[(i, j)] = float(value)

    def get(self, i: int, j: int) -> float:
        return self.entries[(i, j)]

    @property
    def n_stages(self) -> int:
        return max((i for i, _ in self.entries), default=0)

    def is_complete(self, K: int) -> bool:
        return all((i, j) in self.entries for i in range(1, K + 1) for j in range(1, i + 1))

    def rows(self) -> List[List[Optional[float]]]:
        K = self.n_stages
        return [[self.entries.get((i, j)) for j in range(1, K + 1)] for i in range(1, K + 1)]

    def to_dict(self):
        return {'rows': self.rows()}

    @staticmethod
    def from_dict(d):
        matrix = F1Matrix()
        for i, row in enumerate(d.get('rows', []), start=1):
            for j, value in enumerate(row, start=1):
                if value is not None:
                    matrix.set(i, j, value)
        return matrix


@dataclass
class StageReport:
    """Итог стадии: F1 на накопленном test, срез длинного хвоста, счетчики."""
    stage: int
    detection: Score = field(default_factory=Score)
    argument: Optional[Score] = None
    long_tail: Optional[Score] = None
    task_f1: Dict[int, float] = field(default_factory=dict)
    per_type_counts: Dict[str, int] = field(default_factory=dict)
    pseudo_label_precision: Optional[float] = None
    n_pseudo_labels: int = 0
    memory_size: int = 0

    def to_dict(self):
        return {
            'stage': self.stage,
            'detection': self.detection.to_dict(),
            'argument': self.argument.to_dict() if self.argument else None,
            'long_tail': self.long_tail.to_dict() if self.long_tail else None,
            'task_f1': {str(k): v for k, v in self.task_f1.items()},
            'per_type_counts': dict(self.per_type_counts),
            'pseudo_label_precision': self.pseudo_label_precision,
            'n_pseudo_labels': self.n_pseudo_labels,
            'memory_size': self.memory_size,
        }

    @staticmethod
    def from_dict(d):
        return StageReport(
            stage=int(d['stage']),
            detection=Score.from_dict(d['detection']),
            argument=Score.from_dict(d.get('argument')),
            long_tail=Score.from_dict(d.get('long_tail')),
            task_f1={int(k): float(v) for k, v in d.get('task_f1', {}).items()},
            per_type_counts=dict(d.get('per_type_counts', {})),
            pseudo_label_precision=d.get('pseudo_label_precision'),
            n_pseudo_labels=int(d.get('n_pseudo_labels', 0)),
            memory_size=int(d.get('memory_size', 0)),
        )

    def metric_rows(self) -> List[Dict]:
        """Строки для CSV: одна на метрику."""
        rows = [{'stage': self.stage, 'metric': 'detection_f1', 'value': self.detection.f1},
                {'stage': self.stage, 'metric': 'detection_precision', 'value': self.detection.precision},
                {'stage': self.stage, 'metric': 'detection_recall', 'value': self.detection.recall}]
        if self.argument is not None:
            rows.append({'stage': self.stage, 'metric': 'argument_f1', 'value': self.argument.f1})
        if self.long_tail is not None:
            rows.append({'stage': self.stage, 'metric': 'long_tail_f1', 'value': self.long_tail.f1})
        if self.pseudo_label_precision is not None:
            rows.append({'stage': self.stage, 'metric': 'pseudo_label_precision',
                         'value': self.pseudo_label_precision})
        for j, value in sorted(self.task_f1.items()):
            rows.append({'stage': self.stage, 'metric': f'task{j}_f1', 'value': value})
        return rows
