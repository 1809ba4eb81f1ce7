# Путь: extractor/services/pipeline/continual_runner.py

# =================================================================================
# КОНВЕЙЕР НЕПРЕРЫВНОГО ОБУЧЕНИЯ
#
# НАЗНАЧЕНИЕ:
#   Выполняет K стадий: обучение детекции, обучение аргументов (если в
#   корпусе есть аргументы), оценку на накопленном test и запись
#   артефактов стадии. После каждой стадии сохраняется run_state.json,
#   поэтому прерванный запуск продолжается с первой незавершенной стадии.
#
# СТРАТЕГИИ:
#   full           - все модули по флагам абляции;
#   fine-tuning    - без памяти, псевдо-меток, дистилляции и прототипов;
#   joint-training - на каждой стадии новая модель на всех виданных данных.
# =================================================================================

from pathlib import Path
from typing import List, Optional, Tuple

from extractor.data_models.encoder_config import EncoderConfig
from extractor.data_models.run_config import RunConfig
from extractor.data_models.stage_report import StageReport
from extractor.data_models.task_stream import CorpusSplits, TaskSplit, TaskStream
from extractor.services.arguments.argument_trainer import ArgumentTrainer
from extractor.services.arguments.role_classifier import ArgumentModel
from extractor.services.corpus import generate_synthetic, partition_tasks, power_law_counts
from extractor.services.data_exporter import DataExporter
from extractor.services.data_loader import DataLoader
from extractor.services.detection.detection_model import DetectionModel
from extractor.services.detection.detection_trainer import DetectionTrainer
from extractor.services.encoder import Vocabulary, build_encoder
from extractor.services.evaluation.metrics import average_f1, bwt
from extractor.services.evaluation.stage_evaluator import StageEvaluator, prediction_records
from extractor.services.math.prototypes import long_tail_types
from extractor.services.memory.memory_store import MemoryStore
from extractor.services.pipeline.run_state_controller import RunState, RunStateController
from extractor.services.plot.plot_manager import PlotManager
from extractor.utils.constants import (AUGMENTATION_LOG, F1_PLOT, PREDICTIONS_FILE, PROTOTYPES_FILE,
                                       REPORTS_CSV, STAGE_REPORT, SUMMARY_JSON, TRAINING_CURVE)
from extractor.utils.log import info, set_level


def build_stream(config: RunConfig) -> TaskStream:
    """Поток задач из файлов корпуса или из синтетического генератора."""
    loader = DataLoader()
    schema_path = config.schema_path or None
    if config.train_path:
        schema, train = loader.load_corpus(config.train_path, schema_path)
        splits = CorpusSplits(train=train)
        if config.dev_path:
            splits.dev = loader.load_corpus(config.dev_path, schema_path)[1]
        if config.test_path:
            splits.test = loader.load_corpus(config.test_path, schema_path)[1]
        corpus = splits
    elif config.corpus_path:
        schema, corpus = loader.load_corpus(config.corpus_path, schema_path)
    else:
        counts = power_law_counts(config.n_types, config.max_count, config.min_count)
        schema, corpus = generate_synthetic(config.n_types, counts, config.vocab_size, config.data_seed,
                                            multi_type_prob=config.multi_type_prob,
                                            negative_ratio=config.negative_ratio)
    return partition_tasks(schema, corpus, config.K, config.permutation_seed, split_seed=config.data_seed,
                           dev_ratio=config.dev_ratio, min_test_ratio=config.min_test_ratio,
                           min_type_instances=config.min_type_instances)


def stream_vocabulary(stream: TaskStream) -> Vocabulary:
    return Vocabulary.from_sentences(
        s.tokens for task in stream.tasks for split in (task.train, task.dev, task.test) for s in split)


class ContinualRunner:
    """Запуск одной конфигурации на одной перестановке задач."""

    def __init__(self, config: RunConfig, stream: Optional[TaskStream] = None):
        self.config = config
        self.run_dir = Path(config.output_dir)
        self.stream = stream
        self.vocab: Optional[Vocabulary] = None
        self.controller = RunStateController(self.run_dir)
        self.exporter = DataExporter()

    # --- Построение моделей ---

    def _encoder_config(self, seed: int) -> EncoderConfig:
        cfg = self.config
        return EncoderConfig(kind=cfg.encoder_kind, n_layers=cfg.n_layers, n_heads=cfg.n_heads, d=cfg.hidden_dim,
                             L=cfg.attention_layers, dropout_rate=cfg.dropout, seed=seed,
                             max_length=cfg.max_length, pretrained_name=cfg.pretrained_name)

    def new_detection_model(self) -> DetectionModel:
        cfg = self.config
        encoder = build_encoder(self._encoder_config(cfg.model_seed), self.vocab)
        return DetectionModel(encoder, cfg.feature_dim, cfg.dropout, cfg.attention_layers, cfg.model_seed)

    def new_argument_model(self) -> ArgumentModel:
        cfg = self.config
        encoder = build_encoder(self._encoder_config(cfg.model_seed + 1), self.vocab)
        return ArgumentModel(encoder, cfg.feature_dim, cfg.dropout, cfg.model_seed + 1)

    # --- Запуск ---

    def run(self) -> Path:
        cfg = self.config
        set_level(cfg.log_level)
        self.controller.check_config(cfg)
        self.controller.save_config(cfg)
        if self.stream is None:
            self.stream = build_stream(cfg)
        stream = self.stream
        self.vocab = stream_vocabulary(stream)
        with_arguments = cfg.train_arguments and stream.schema.has_arguments
        info(f"[ContinualRunner] 🚀 Запуск '{cfg.strategy}' в {self.run_dir}: K={stream.K}, "
             f"типов {len(stream.schema.event_types)}, аргументы: {'да' if with_arguments else 'нет'}")
        if cfg.use_pkt:
            info("[ContinualRunner] Связанное отклонение: собственный прототип типа исключен, "
                 "отрицательные косинусные веса обнуляются")

        state = self.controller.load_state() or RunState()
        if state.completed_stages > 0:
            detection, arguments, memory, arg_memory = self.controller.restore_stage(
                state.completed_stages, with_arguments)
        else:
            detection = self.new_detection_model()
            arguments = self.new_argument_model() if with_arguments else None
            memory = MemoryStore(cfg.effective_memory_size)
            arg_memory = MemoryStore(cfg.effective_memory_size) if with_arguments else None

        detection_trainer = DetectionTrainer(cfg)
        argument_trainer = ArgumentTrainer(cfg, stream.schema) if with_arguments else None
        evaluator = StageEvaluator(stream, cfg.batch_size)

        for stage in range(state.completed_stages + 1, stream.K + 1):
            task = stream.task(stage)
            state.type_counts.update(task.type_counts())
            teacher = None
            if cfg.strategy == 'joint-training':
                detection = self.new_detection_model()
                arguments = self.new_argument_model() if with_arguments else None
                task = TaskSplit(stage, stream.seen_types(stage), train=stream.accumulated_train(stage))
            elif cfg.is_continual and stage > 1:
                teacher = detection.snapshot()

            det_result = detection_trainer.train_task(detection, teacher, task, memory, stage,
                                                      state.type_counts, stream.accumulated_dev(stage))
            arg_curve: List = []
            if argument_trainer is not None:
                arg_curve = argument_trainer.train_argument_task(arguments, task, arg_memory, stage).curve

            seen = stream.seen_types(stage)
            long_tail = long_tail_types({t: state.type_counts[t] for t in seen}, cfg.long_tail_ratio)
            report, predictions = evaluator.evaluate_stage(
                stage, detection, arguments, state.f1_matrix, long_tail=long_tail,
                augmented_train=det_result.train, memory_size=len(memory))

            stage_dir = self.controller.stage_dir(stage)
            self.controller.save_stage(stage, detection, arguments, memory, arg_memory)
            self.exporter.write_json(stage_dir / PROTOTYPES_FILE, det_result.prototypes.to_dict())
            self.exporter.write_jsonl(stage_dir / AUGMENTATION_LOG,
                                      (r.to_dict() for r in det_result.augmentation + det_result.memory_relabels))
            self.exporter.write_table(stage_dir / TRAINING_CURVE, det_result.curve + arg_curve)
            test = stream.accumulated_test(stage)
            self.exporter.write_jsonl(stage_dir / PREDICTIONS_FILE, prediction_records(test, predictions))
            self.exporter.write_json(stage_dir / STAGE_REPORT, report.to_dict())

            state.completed_stages = stage
            state.reports.append(report)
            self.controller.save_state(state)

        self.write_summary(state)
        return self.run_dir

    def write_summary(self, state: RunState):
        rows = [row for report in state.reports for row in report.metric_rows()]
        K = state.completed_stages
        summary = {
            'strategy': self.config.strategy,
            'K': K,
            'f1_matrix': state.f1_matrix.to_dict(),
            'average_f1': [average_f1(state.f1_matrix, i) for i in range(1, K + 1)],
            'detection_f1': [r.detection.f1 for r in state.reports],
            'long_tail_f1': [r.long_tail.f1 if r.long_tail else None for r in state.reports],
            'argument_f1': [r.argument.f1 if r.argument else None for r in state.reports],
            'bwt': bwt(state.f1_matrix, K) if K >= 2 else None,
        }
        rows.append({'stage': K, 'metric': 'average_f1', 'value': summary['average_f1'][-1]})
        if summary['bwt'] is not None:
            rows.append({'stage': K, 'metric': 'bwt', 'value': summary['bwt']})
        self.exporter.write_table(self.run_dir / REPORTS_CSV, rows)
        self.exporter.write_json(self.run_dir / SUMMARY_JSON, summary)
        if self.config.plot:
            plot = PlotManager()
            plot.draw_f1_curve(state.reports, state.f1_matrix, title=self.config.strategy)
            plot.save(self.run_dir / F1_PLOT)
        info(f"[ContinualRunner] ✅ Готово: средний F1 {summary['average_f1'][-1]:.4f}"
             + (f", BWT {summary['bwt']:.4f}" if summary['bwt'] is not None else ""))


def run(config: RunConfig, stream: Optional[TaskStream] = None) -> Path:
    return ContinualRunner(config, stream).run()


def load_summary(run_dir) -> Tuple[dict, List[StageReport]]:
    exporter = DataExporter()
    summary = exporter.read_json(Path(run_dir) / SUMMARY_JSON)
    state = RunStateController(run_dir).load_state()
    return summary, (state.reports if state else [])
