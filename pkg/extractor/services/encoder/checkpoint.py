# Путь: extractor/services/encoder/checkpoint.py

# =================================================================================
# ЧЕКПОИНТЫ
#
#   Один самоописывающий файл: тип модели, конфигурация, словарь, метки
#   и тензоры параметров. Любая ошибка чтения превращается в CheckpointError
#   с именем файла.
# =================================================================================

import os
from pathlib import Path
from typing import Any, Dict

import torch

from extractor.utils.errors import CheckpointError
from extractor.utils.log import debug

CHECKPOINT_FORMAT = 1


def save_checkpoint(path, kind: str, meta: Dict[str, Any], state_dict: Dict[str, torch.Tensor]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        'format': CHECKPOINT_FORMAT,
        'kind': kind,
        'meta': meta,
        'state_dict': {k: v.detach().cpu() for k, v in state_dict.items()},
    }
    tmp_path = path.with_suffix(path.suffix + '.tmp')
    torch.save(payload, tmp_path)
    os.replace(tmp_path, path)
    debug(f"[Checkpoint] Сохранен {path} ({kind}, {len(state_dict)} тензоров)")


def load_checkpoint(path, kind: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise CheckpointError(f"чекпоинт не найден: {path}")
    try:
        payload = torch.load(path, map_location='cpu', weights_only=False)
    except Exception as e:
        raise CheckpointError(f"чекпоинт поврежден: {path} ({e})") from e
    if not isinstance(payload, dict) or payload.get('format') != CHECKPOINT_FORMAT:
        raise CheckpointError(f"неизвестный формат чекпоинта: {path}")
    if payload.get('kind') != kind:
        raise CheckpointError(f"чекпоинт {path} содержит '{payload.get('kind')}', ожидался '{kind}'")
    return payload


def restore_state(module: torch.nn.Module, state_dict: Dict[str, torch.Tensor], path):
    try:
        module.load_state_dict(state_dict)
    except RuntimeError as e:
        raise CheckpointError(f"параметры чекпоинта {path} не совпадают с моделью: {e}") from e
