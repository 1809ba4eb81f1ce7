# Путь: extractor/services/detection/detection_trainer.py

# =================================================================================
# ОБУЧЕНИЕ ДЕТЕКЦИИ НА ОДНОЙ СТАДИИ
#
# ПОРЯДОК:
#   0. Расширение классификатора под типы задачи.
#   1. Псевдо-разметка train учителем (стадии >= 2).
#   2. Разогрев на train только классификационной потерей.
#   3. Прототипы: новые типы по train, прежние - по памяти.
#   4. Основное обучение на train + память: комбинированная потеря
#      и усиление редких типов. Лучшая эпоха выбирается по F1 на dev.
#   5. Отбор экземпляров новых типов в память.
#   6. Переразметка памяти обученной моделью.
#
#   На первой стадии учителя нет: шаги 1-3 и дистилляция пропускаются,
#   поэтому полная модель и дообучение на T1 совпадают.
# =================================================================================

import copy
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set

import numpy as np
import torch
from tqdm import tqdm

from extractor.data_models.exemplar import Exemplar
from extractor.data_models.prototype import PrototypeStore
from extractor.data_models.run_config import RunConfig
from extractor.data_models.sentence import TokenizedSentence
from extractor.data_models.task_stream import TaskSplit
from extractor.services.detection.batching import (gold_type_grid, iterate_batches, label_tensor,
                                                   predict_events, token_types)
from extractor.services.detection.detection_model import DetectionModel, ModelSnapshot
from extractor.services.detection.pseudo_labeler import PseudoLabel, augment_with_pseudo_labels, relabel_memory
from extractor.services.encoder.attention import attentive_features
from extractor.services.evaluation.metrics import detection_f1
from extractor.services.math.losses import afd_loss, classification_loss, combined_loss, spd_loss
from extractor.services.math.prototypes import LongTailEnhancer, compute_prototype, long_tail_types
from extractor.services.memory.exemplar_selector import select_exemplars
from extractor.services.memory.memory_store import MemoryStore, update_memory
from extractor.utils.log import debug, info


@dataclass
class DetectionStageResult:
    model: DetectionModel
    train: List[TokenizedSentence]
    prototypes: PrototypeStore = field(default_factory=PrototypeStore)
    long_tail: List[str] = field(default_factory=list)
    augmentation: List[PseudoLabel] = field(default_factory=list)
    memory_relabels: List[PseudoLabel] = field(default_factory=list)
    curve: List[Dict] = field(default_factory=list)
    selections: Dict[str, List[Exemplar]] = field(default_factory=dict)


def has_dev_signal(dev: Sequence[TokenizedSentence], seen_types: Sequence[str]) -> bool:
    """Есть ли в dev золото уже известных типов (иначе F1 на dev выбирать не из чего)."""
    seen = set(seen_types)
    return any(e.event_type in seen for s in dev for e in s.gold_events)


class DetectionTrainer:
    """Обучение модели детекции на стадиях непрерывного потока."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.device = torch.device(config.device)
        self.show_progress = config.log_level.upper() == 'DEBUG'

    def _stage_seed(self, stage: int) -> int:
        return self.config.model_seed * 1000 + stage

    def train_task(self, model: DetectionModel, teacher: Optional[ModelSnapshot], task: TaskSplit,
                   memory: MemoryStore, stage: int, type_counts: Dict[str, int],
                   dev: Sequence[TokenizedSentence] = ()) -> DetectionStageResult:
        cfg = self.config
        seed = self._stage_seed(stage)
        torch.manual_seed(seed)
        self.rng = np.random.default_rng(seed)
        generator = torch.Generator().manual_seed(seed)

        model.to(self.device)
        if teacher is not None:
            teacher.to(self.device)
        model.widen(task.event_types, generator=generator)
        new_types = set(task.event_types)

        train = list(task.train)
        result = DetectionStageResult(model=model, train=train)
        if teacher is not None and cfg.use_da:
            train, result.augmentation = augment_with_pseudo_labels(train, teacher, cfg.tau, cfg.batch_size)
            result.train = train
            info(f"[DetectionTrainer] Стадия {stage}: псевдо-меток {len(result.augmentation)}")

        enhancer = None
        if teacher is not None and cfg.use_pkt:
            self._run_epochs(model, None, list(task.train), cfg.warmup_epochs, 'warmup', stage, result.curve)
            result.prototypes = self.compute_prototypes(model, task.train, memory, new_types)
            seen = model.seen_types
            result.long_tail = long_tail_types({t: type_counts.get(t, 0) for t in seen}, cfg.long_tail_ratio)
            enhanced = [t for t in result.long_tail if t in result.prototypes]
            skipped = sorted(set(result.long_tail) - set(enhanced))
            if skipped:
                debug(f"[DetectionTrainer] Нет прототипов для редких типов {skipped}, усиление пропущено")
            enhancer = LongTailEnhancer(result.prototypes, enhanced, generator)

        data = train + memory.sentences()
        self._run_epochs(model, teacher, data, cfg.epochs, 'train', stage, result.curve,
                         enhancer=enhancer, dev=dev)

        if cfg.effective_memory_size > 0:
            result.selections = self.select_memory(model, train, task.event_types, stage)
            update_memory(memory, result.selections)
        if cfg.use_da and len(memory):
            result.memory_relabels = relabel_memory(memory, model, cfg.tau, cfg.batch_size)
        return result

    # --- Оптимизация ---

    def _optimizer(self, model: DetectionModel) -> torch.optim.Optimizer:
        cfg = self.config
        head = list(model.projector.parameters()) + list(model.classifier.parameters())
        return torch.optim.AdamW([
            {'params': [p for p in model.encoder.parameters() if p.requires_grad], 'lr': cfg.lr_encoder},
            {'params': head, 'lr': cfg.lr_classifier},
        ])

    def _run_epochs(self, model: DetectionModel, teacher: Optional[ModelSnapshot],
                    sentences: List[TokenizedSentence], epochs: int, phase: str, stage: int,
                    curve: List[Dict], enhancer: Optional[LongTailEnhancer] = None,
                    dev: Sequence[TokenizedSentence] = ()):
        if not sentences or epochs <= 0:
            return
        cfg = self.config
        optimizer = self._optimizer(model)
        select_on_dev = phase == 'train' and has_dev_signal(dev, model.seen_types)
        best_f1, best_state = 0.0, None
        for epoch in range(1, epochs + 1):
            model.train()
            batches = list(iterate_batches(sentences, cfg.batch_size, self.rng))
            totals = defaultdict(float)
            optimizer.zero_grad()
            progress = tqdm(batches, desc=f"T{stage} {phase} {epoch}/{epochs}", leave=False,
                            disable=not self.show_progress)
            for step, batch in enumerate(progress, start=1):
                losses = self.batch_losses(model, teacher, batch, enhancer)
                (losses['loss'] / cfg.gradient_accumulation).backward()
                if step % cfg.gradient_accumulation == 0 or step == len(batches):
                    optimizer.step()
                    optimizer.zero_grad()
                for name, value in losses.items():
                    totals[name] += value.item()
            row = {'stage': stage, 'phase': phase, 'epoch': epoch}
            row.update({name: value / len(batches) for name, value in totals.items()})
            if select_on_dev:
                score = detection_f1(predict_events(model, dev, cfg.batch_size), dev, model.seen_types)
                row['dev_f1'] = score.f1
                # при равенстве побеждает более поздняя эпоха; нулевой F1 весов не фиксирует
                if score.f1 > 0 and score.f1 >= best_f1:
                    best_f1, best_state = score.f1, copy.deepcopy(model.state_dict())
            curve.append(row)
            debug(f"[DetectionTrainer] {row}")
        if best_state is not None and best_f1 > row.get('dev_f1', 0.0):
            model.load_state_dict(best_state)
            debug(f"[DetectionTrainer] Стадия {stage}: лучшая эпоха по dev, F1={best_f1:.4f}")

    def batch_losses(self, model: DetectionModel, teacher: Optional[ModelSnapshot],
                     batch: List[TokenizedSentence],
                     enhancer: Optional[LongTailEnhancer] = None) -> Dict[str, torch.Tensor]:
        """Потери одного батча: классификация и, при наличии учителя, дистилляция."""
        cfg = self.config
        tokens = [s.tokens for s in batch]
        forward = model(tokens)
        mask = forward.mask.reshape(-1)
        labels = label_tensor(batch, model.label_index()).to(forward.features.device).reshape(-1)
        features = forward.features.reshape(-1, model.feature_dim)
        plain_probs = probs = model.probabilities(features)
        if enhancer is not None:
            probs = model.probabilities(enhancer(features, gold_type_grid(batch), training=model.training))
        l_cls = classification_loss(probs, labels, mask)
        losses = {'cls': l_cls}

        distill = teacher is not None and (cfg.use_afd or cfg.use_spd)
        if not distill:
            losses['loss'] = l_cls
            return losses

        n_prev = len(teacher.label_space) - 1
        target = teacher.forward(tokens)
        l_afd = l_spd = probs.new_zeros(())
        if cfg.use_afd:
            student_att = attentive_features(forward.features, forward.attention, forward.mask)
            teacher_att = attentive_features(target.features, target.attention, target.mask)
            l_afd = afd_loss(student_att.reshape(-1, model.feature_dim),
                             teacher_att.reshape(-1, model.feature_dim), mask)
        if cfg.use_spd:
            teacher_probs = teacher.probabilities(target.features).reshape(-1, n_prev + 1)
            # токены новых типов (золото или псевдо) в Ñ не входят; ученик без усиления прототипами
            keep = mask & (labels <= n_prev)
            l_spd = spd_loss(plain_probs, teacher_probs, keep, range(1, n_prev + 1))
        losses.update(afd=l_afd, spd=l_spd)
        losses['loss'] = combined_loss(l_cls, l_afd, l_spd, n_prev, len(model.seen_types), cfg.alpha, cfg.beta)
        return losses

    # --- Признаки для прототипов и памяти ---

    def _eval_features(self, model: DetectionModel, sentences: Sequence[TokenizedSentence]):
        """(предложение, признаки [n, h]) в режиме оценки."""
        was_training = model.training
        model.eval()
        try:
            with torch.no_grad():
                for batch in iterate_batches(sentences, self.config.batch_size):
                    forward = model([s.tokens for s in batch])
                    for row, sentence in enumerate(batch):
                        yield sentence, forward.features[row, :len(sentence)]
        finally:
            model.train(was_training)

    def compute_prototypes(self, model: DetectionModel, train: Sequence[TokenizedSentence],
                           memory: MemoryStore, new_types: Set[str]) -> PrototypeStore:
        collected: Dict[str, List[torch.Tensor]] = defaultdict(list)
        old_types = set(model.seen_types) - new_types
        for source, wanted in ((train, new_types), (memory.sentences(), old_types)):
            for sentence, features in self._eval_features(model, source):
                for j, event_type in enumerate(token_types(sentence)):
                    if event_type in wanted:
                        collected[event_type].append(features[j])
        store = PrototypeStore()
        for event_type in model.seen_types:
            if collected.get(event_type):
                store.add(compute_prototype(event_type, torch.stack(collected[event_type])))
        debug(f"[DetectionTrainer] Прототипов: {len(store)} из {len(model.seen_types)} типов")
        return store

    def select_memory(self, model: DetectionModel, train: Sequence[TokenizedSentence],
                      event_types: Sequence[str], stage: int) -> Dict[str, List[Exemplar]]:
        """k-means отбор по признакам триггеров (среднее по токенам спана)."""
        instances: Dict[str, List] = defaultdict(list)
        features: Dict[str, List[torch.Tensor]] = defaultdict(list)
        wanted = set(event_types)
        for sentence, sentence_features in self._eval_features(model, train):
            for event in sentence.gold_events:
                if event.event_type in wanted:
                    instances[event.event_type].append((sentence, event))
                    span = sentence_features[event.trigger_start:event.trigger_end + 1]
                    features[event.event_type].append(span.mean(dim=0).cpu())

        frozen: Dict[str, TokenizedSentence] = {}
        selections: Dict[str, List[Exemplar]] = {}
        for event_type in event_types:
            if not instances.get(event_type):
                continue
            chosen = select_exemplars(instances[event_type], torch.stack(features[event_type]).numpy(),
                                      self.config.effective_memory_size, seed=self._stage_seed(stage))
            selections[event_type] = [
                Exemplar(s.sentence_id, event_type, e.trigger, frozen.setdefault(s.sentence_id, s.copy()))
                for s, e in chosen
            ]
        return selections
