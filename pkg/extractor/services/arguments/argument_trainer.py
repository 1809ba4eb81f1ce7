# Путь: extractor/services/arguments/argument_trainer.py

# =================================================================================
# ОБУЧЕНИЕ АРГУМЕНТОВ НА СТАДИИ
#
#   Тэггер и головы ролей учатся на train задачи и памяти аргументов.
#   Кандидаты при обучении - золотые сущности плюс выход тэггера; кандидат,
#   не являющийся аргументом события, получает роль None. Потеря -
#   NLL CRF плюс средняя кросс-энтропия ролей по всем кандидатам.
#   После обучения в память отбираются события новых типов с аргументами.
# =================================================================================

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np
import torch
from tqdm import tqdm

from extractor.data_models.exemplar import Exemplar
from extractor.data_models.run_config import RunConfig
from extractor.data_models.schema import EventSchema
from extractor.data_models.sentence import EntitySpan, TokenizedSentence
from extractor.data_models.task_stream import TaskSplit
from extractor.services.arguments.entity_tagger import bio_tensor, entity_spans, spans_from_tags
from extractor.services.arguments.role_classifier import ArgumentModel, encode_candidates
from extractor.services.detection.batching import iterate_batches
from extractor.services.math.losses import role_loss
from extractor.services.memory.exemplar_selector import select_exemplars
from extractor.services.memory.memory_store import MemoryStore, update_memory
from extractor.utils.log import debug, info


@dataclass
class ArgumentStageResult:
    model: ArgumentModel
    curve: List[Dict] = field(default_factory=list)
    selections: Dict[str, List[Exemplar]] = field(default_factory=dict)


class ArgumentTrainer:

    def __init__(self, config: RunConfig, schema: EventSchema):
        self.config = config
        self.schema = schema
        self.device = torch.device(config.device)
        self.show_progress = config.log_level.upper() == 'DEBUG'

    def train_argument_task(self, model: ArgumentModel, task: TaskSplit, arg_memory: MemoryStore,
                            stage: int) -> ArgumentStageResult:
        cfg = self.config
        seed = cfg.model_seed * 1000 + stage
        torch.manual_seed(seed)
        rng = np.random.default_rng(seed)
        generator = torch.Generator().manual_seed(seed)

        model.to(self.device)
        model.add_heads(task.event_types, self.schema.roles_of, generator)
        result = ArgumentStageResult(model=model)
        data = list(task.train) + arg_memory.sentences()
        if not data:
            return result

        optimizer = torch.optim.AdamW([
            {'params': list(model.encoder.parameters()) + list(model.projector.parameters())
                       + list(model.role_heads.parameters()), 'lr': cfg.lr_argument},
            {'params': model.tagger.parameters(), 'lr': cfg.lr_entity},
        ])
        for epoch in range(1, cfg.argument_epochs + 1):
            model.train()
            batches = list(iterate_batches(data, cfg.batch_size, rng))
            totals = defaultdict(float)
            optimizer.zero_grad()
            progress = tqdm(batches, desc=f"T{stage} arguments {epoch}/{cfg.argument_epochs}",
                            leave=False, disable=not self.show_progress)
            for step, batch in enumerate(progress, start=1):
                losses = self.batch_losses(model, batch)
                (losses['loss'] / cfg.gradient_accumulation).backward()
                if step % cfg.gradient_accumulation == 0 or step == len(batches):
                    optimizer.step()
                    optimizer.zero_grad()
                for name, value in losses.items():
                    totals[name] += value.item()
            model.tagger.trained = True
            row = {'stage': stage, 'phase': 'arguments', 'epoch': epoch}
            row.update({name: value / len(batches) for name, value in totals.items()})
            result.curve.append(row)
            debug(f"[ArgumentTrainer] {row}")

        if cfg.effective_memory_size > 0:
            result.selections = self.select_memory(model, task.train, task.event_types, stage)
            update_memory(arg_memory, result.selections)
        return result

    def batch_losses(self, model: ArgumentModel, batch: List[TokenizedSentence]) -> Dict[str, torch.Tensor]:
        features, mask = model([s.tokens for s in batch])
        tags = bio_tensor(batch).to(features.device)
        l_tag = model.tagger.loss(features, tags, mask)
        with torch.no_grad():
            tagged = model.tagger.decode(features.detach(), mask)

        weighted, n_candidates = features.new_zeros(()), 0
        for row, sentence in enumerate(batch):
            spans = sorted(set(entity_spans(sentence)) | set(spans_from_tags(tagged[row])),
                           key=lambda s: (s.start, s.end))
            if not spans:
                continue
            candidates = encode_candidates(features[row, :len(sentence)], spans)
            for event in sentence.gold_events:
                if event.event_type not in model.head_types:
                    continue
                roles = model.role_space(event.event_type)
                gold = {(a.entity_start, a.entity_end): roles.index(a.role)
                        for a in event.arguments if a.role in roles}
                labels = torch.tensor([gold.get((s.start, s.end), 0) for s in spans],
                                      dtype=torch.long, device=features.device)
                probs = model.role_probabilities(event.event_type, candidates)
                weighted = weighted + role_loss(probs, labels) * len(spans)
                n_candidates += len(spans)
        l_role = weighted / n_candidates if n_candidates else weighted
        return {'tag': l_tag, 'role': l_role, 'loss': l_tag + l_role}

    def select_memory(self, model: ArgumentModel, train: Sequence[TokenizedSentence],
                      event_types: Sequence[str], stage: int) -> Dict[str, List[Exemplar]]:
        """k-means по среднему вектору кандидатов-аргументов события."""
        instances: Dict[str, List] = defaultdict(list)
        features: Dict[str, List[torch.Tensor]] = defaultdict(list)
        wanted = set(event_types)
        annotated = [s for s in train if any(e.arguments for e in s.gold_events if e.event_type in wanted)]
        was_training = model.training
        model.eval()
        with torch.no_grad():
            for batch in iterate_batches(annotated, self.config.batch_size):
                batch_features, _ = model([s.tokens for s in batch])
                for row, sentence in enumerate(batch):
                    for event in sentence.gold_events:
                        if event.event_type in wanted and event.arguments:
                            spans = [EntitySpan(a.entity_start, a.entity_end) for a in event.arguments]
                            vectors = encode_candidates(batch_features[row, :len(sentence)], spans)
                            instances[event.event_type].append((sentence, event))
                            features[event.event_type].append(vectors.mean(dim=0).cpu())
        model.train(was_training)

        frozen: Dict[str, TokenizedSentence] = {}
        selections: Dict[str, List[Exemplar]] = {}
        for event_type in event_types:
            if not instances.get(event_type):
                continue
            chosen = select_exemplars(instances[event_type], torch.stack(features[event_type]).numpy(),
                                      self.config.effective_memory_size, seed=self.config.model_seed * 1000 + stage)
            selections[event_type] = [
                Exemplar(s.sentence_id, event_type, e.trigger, frozen.setdefault(s.sentence_id, s.copy()))
                for s, e in chosen
            ]
        info(f"[ArgumentTrainer] Стадия {stage}: в память аргументов отобрано "
             f"{sum(len(v) for v in selections.values())} экземпляров")
        return selections
