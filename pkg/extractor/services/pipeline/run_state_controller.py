# Путь: extractor/services/pipeline/run_state_controller.py

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from extractor.data_models.run_config import RunConfig
from extractor.data_models.stage_report import F1Matrix, StageReport
from extractor.services.arguments.role_classifier import ArgumentModel
from extractor.services.detection.detection_model import DetectionModel
from extractor.services.memory.memory_store import MemoryStore
from extractor.utils.constants import (ARGUMENT_CHECKPOINT, ARGUMENT_MEMORY_FILE, CONFIG_FILE,
                                       DETECTION_CHECKPOINT, MEMORY_FILE, RUN_STATE_FILE)
from extractor.utils.errors import CheckpointError, ConfigError
from extractor.utils.log import info

# Поля, которые можно менять при продолжении запуска
_RESUME_NEUTRAL = {'output_dir', 'log_level', 'device', 'workers', 'plot'}


@dataclass
class RunState:
    """Что нужно для продолжения запуска после стадии completed_stages."""
    completed_stages: int = 0
    type_counts: Dict[str, int] = field(default_factory=dict)
    f1_matrix: F1Matrix = field(default_factory=F1Matrix)
    reports: List[StageReport] = field(default_factory=list)

    def to_dict(self):
        return {
            'completed_stages': self.completed_stages,
            'type_counts': dict(self.type_counts),
            'f1_matrix': self.f1_matrix.to_dict(),
            'reports': [r.to_dict() for r in self.reports],
        }

    @staticmethod
    def from_dict(d):
        return RunState(
            completed_stages=int(d['completed_stages']),
            type_counts={k: int(v) for k, v in d.get('type_counts', {}).items()},
            f1_matrix=F1Matrix.from_dict(d.get('f1_matrix', {})),
            reports=[StageReport.from_dict(r) for r in d.get('reports', [])],
        )


class RunStateController:
    """
    Управляет сохранением и восстановлением состояния запуска
    в его каталоге.
    """
    def __init__(self, run_dir):
        self.run_dir = Path(run_dir)

    def stage_dir(self, stage: int) -> Path:
        return self.run_dir / f"stage_{stage}"

    def check_config(self, config: RunConfig):
        """Каталог с другим конфигом продолжать нельзя."""
        path = self.run_dir / CONFIG_FILE
        if not path.exists():
            return
        with open(path, 'r', encoding='utf-8') as f:
            saved = json.load(f)
        current = config.to_dict()
        differing = sorted(k for k in current
                           if k not in _RESUME_NEUTRAL and saved.get(k) != current[k])
        if differing:
            raise ConfigError(f"каталог {self.run_dir} создан с другой конфигурацией: {differing}")

    def save_config(self, config: RunConfig):
        self.run_dir.mkdir(parents=True, exist_ok=True)
        with open(self.run_dir / CONFIG_FILE, 'w', encoding='utf-8') as f:
            json.dump(config.to_dict(), f, indent=2, ensure_ascii=False, sort_keys=True)

    def load_state(self) -> Optional[RunState]:
        path = self.run_dir / RUN_STATE_FILE
        if not path.exists():
            return None
        try:
            with open(path, 'r', encoding='utf-8') as f:
                state = RunState.from_dict(json.load(f))
        except (ValueError, KeyError) as e:
            raise CheckpointError(f"файл состояния поврежден: {path} ({e})") from e
        info(f"[RunStateController] 🔁 Найдено состояние: завершено стадий {state.completed_stages}")
        return state

    def save_state(self, state: RunState):
        path = self.run_dir / RUN_STATE_FILE
        tmp_path = path.with_suffix('.tmp')
        with open(tmp_path, 'w', encoding='utf-8') as f:
            json.dump(state.to_dict(), f, indent=2, ensure_ascii=False)
        os.replace(tmp_path, path)

    def save_stage(self, stage: int, detection: DetectionModel, arguments: Optional[ArgumentModel],
                   memory: MemoryStore, arg_memory: Optional[MemoryStore]):
        stage_dir = self.stage_dir(stage)
        stage_dir.mkdir(parents=True, exist_ok=True)
        detection.save(stage_dir / DETECTION_CHECKPOINT)
        if arguments is not None:
            arguments.save(stage_dir / ARGUMENT_CHECKPOINT)
        self._write_json(stage_dir / MEMORY_FILE, memory.to_dict())
        if arg_memory is not None:
            self._write_json(stage_dir / ARGUMENT_MEMORY_FILE, arg_memory.to_dict())

    def restore_stage(self, stage: int, with_arguments: bool):
        """(детекция, аргументы, память, память аргументов) после стадии stage."""
        stage_dir = self.stage_dir(stage)
        detection = DetectionModel.load(stage_dir / DETECTION_CHECKPOINT)
        arguments = ArgumentModel.load(stage_dir / ARGUMENT_CHECKPOINT) if with_arguments else None
        memory = MemoryStore.from_dict(self._read_json(stage_dir / MEMORY_FILE))
        arg_memory = (MemoryStore.from_dict(self._read_json(stage_dir / ARGUMENT_MEMORY_FILE))
                      if with_arguments else None)
        info(f"[RunStateController] ✅ Восстановлена стадия {stage} из {stage_dir}")
        return detection, arguments, memory, arg_memory

    @staticmethod
    def _write_json(path: Path, data):
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, ensure_ascii=False)

    @staticmethod
    def _read_json(path: Path):
        if not path.exists():
            raise CheckpointError(f"не найден файл стадии: {path}")
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except ValueError as e:
            raise CheckpointError(f"файл стадии поврежден: {path} ({e})") from e
