# Путь: extractor/services/plot/plot_manager.py

"""
PlotManager отвечает исключительно за визуализацию кривых F1.
Он не считает метрики и не хранит состояние запуска.
"""

from pathlib import Path
from typing import List, Optional

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from extractor.data_models.stage_report import F1Matrix, StageReport  # noqa: E402
from extractor.utils.log import debug  # noqa: E402


class PlotManager:
    def __init__(self, figsize=(7, 4.5)):
        self.figure, self.ax = plt.subplots(figsize=figsize)

    def _clear_plot(self):
        self.ax.clear()

    def draw_f1_curve(self, reports: List[StageReport], matrix: F1Matrix, title: Optional[str] = None):
        """
        F1 на накопленном test по стадиям, F1 на test первой задачи
        и срез длинного хвоста (если он есть).
        """
        self._clear_plot()
        stages = [r.stage for r in reports]
        self.ax.plot(stages, [100 * r.detection.f1 for r in reports], marker='o', label='накопленный test')
        task1 = [100 * matrix.get(s, 1) for s in stages if (s, 1) in matrix.entries]
        if task1:
            self.ax.plot(stages[:len(task1)], task1, marker='s', linestyle='--', label='test задачи 1')
        tail = [(r.stage, 100 * r.long_tail.f1) for r in reports if r.long_tail is not None]
        if tail:
            self.ax.plot([s for s, _ in tail], [v for _, v in tail], marker='^', linestyle=':',
                         label='длинный хвост')
        self.ax.set_xlabel('стадия')
        self.ax.set_ylabel('F1, %')
        self.ax.set_xticks(stages)
        self.ax.set_ylim(0, 100)
        self.ax.grid(True, alpha=0.3)
        self.ax.legend()
        if title:
            self.ax.set_title(title)

    def save(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.figure.tight_layout()
        self.figure.savefig(path, dpi=120)
        plt.close(self.figure)
        debug(f"[PlotManager] График сохранен: {path}")
