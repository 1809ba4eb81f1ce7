# Путь: tests/test_pipeline.py

import json
from dataclasses import replace
from pathlib import Path

import pandas as pd
import pytest

from extractor.data_models.run_config import ABLATIONS, RunConfig
from extractor.data_models.stage_report import F1Matrix
from extractor.file_parsers.jsonl_corpus_parser import JsonlCorpusParser
from extractor.services.evaluation.metrics import argument_f1
from extractor.services.pipeline import ReportMerger, RunStateController, run
from extractor.services.pipeline.continual_runner import build_stream, load_summary
from extractor.services.pipeline.sweep_runner import AGGREGATE_CSV, final_metric, sweep
from extractor.utils.constants import (DETECTION_CHECKPOINT, F1_PLOT, PREDICTIONS_FILE, REPORTS_CSV, STAGE_REPORT,
                                       SUMMARY_JSON, TRAINING_CURVE)
from extractor.utils.errors import CheckpointError, ConfigError


def _truncate_state(run_dir, stages: int):
    controller = RunStateController(run_dir)
    state = controller.load_state()
    state.completed_stages = stages
    state.reports = state.reports[:stages]
    matrix = F1Matrix()
    for (i, j), value in state.f1_matrix.entries.items():
        if i <= stages:
            matrix.set(i, j, value)
    state.f1_matrix = matrix
    controller.save_state(state)


def test_run_writes_stage_artifacts(small_run_config):
    run_dir = run(small_run_config)
    for stage in range(1, small_run_config.K + 1):
        stage_dir = run_dir / f"stage_{stage}"
        for name in (DETECTION_CHECKPOINT, PREDICTIONS_FILE, STAGE_REPORT, TRAINING_CURVE):
            assert (stage_dir / name).exists()
    summary, reports = load_summary(run_dir)
    assert summary['K'] == small_run_config.K
    assert len(summary['average_f1']) == small_run_config.K and summary['bwt'] is not None
    assert [r.stage for r in reports] == [1, 2, 3]
    assert all(0.0 <= r.detection.f1 <= 1.0 for r in reports)

    rows = pd.read_csv(run_dir / REPORTS_CSV)
    assert {'stage', 'metric', 'value'} <= set(rows.columns)
    assert 'bwt' in set(rows['metric'])


def test_completed_run_is_not_retrained(small_run_config):
    run_dir = run(small_run_config)
    checkpoint = run_dir / 'stage_3' / DETECTION_CHECKPOINT
    stamp = checkpoint.stat().st_mtime_ns
    summary = json.loads((run_dir / SUMMARY_JSON).read_text(encoding='utf-8'))

    run(small_run_config)
    assert checkpoint.stat().st_mtime_ns == stamp
    assert json.loads((run_dir / SUMMARY_JSON).read_text(encoding='utf-8')) == summary


def test_interrupted_run_resumes_from_next_stage(small_run_config):
    run_dir = run(small_run_config)
    summary = json.loads((run_dir / SUMMARY_JSON).read_text(encoding='utf-8'))
    stage_one = (run_dir / 'stage_1' / DETECTION_CHECKPOINT).stat().st_mtime_ns

    _truncate_state(run_dir, 1)
    run(small_run_config)

    assert (run_dir / 'stage_1' / DETECTION_CHECKPOINT).stat().st_mtime_ns == stage_one
    resumed = json.loads((run_dir / SUMMARY_JSON).read_text(encoding='utf-8'))
    assert resumed['average_f1'] == pytest.approx(summary['average_f1'], abs=1e-6)


def test_corrupted_checkpoint_stops_resume(small_run_config):
    run_dir = run(small_run_config)
    _truncate_state(run_dir, 2)
    (run_dir / 'stage_2' / DETECTION_CHECKPOINT).write_bytes(b'not a checkpoint')
    with pytest.raises(CheckpointError):
        run(small_run_config)


def test_changed_config_cannot_reuse_run_dir(small_run_config):
    run(replace(small_run_config, K=1))
    controller = RunStateController(small_run_config.output_dir)
    controller.check_config(replace(small_run_config, K=1, log_level='DEBUG', plot=True))
    with pytest.raises(ConfigError):
        controller.check_config(replace(small_run_config, K=1, tau=0.5))


def test_first_stage_is_identical_for_full_and_fine_tuning(small_run_config, tmp_path):
    config = replace(small_run_config, K=1)
    full = run(replace(config, output_dir=str(tmp_path / 'full')))
    plain = run(replace(config, strategy='fine-tuning', output_dir=str(tmp_path / 'plain')))
    f1_full = load_summary(full)[0]['f1_matrix']['rows'][0][0]
    f1_plain = load_summary(plain)[0]['f1_matrix']['rows'][0][0]
    assert f1_full == pytest.approx(f1_plain, abs=1e-9)


def test_run_draws_f1_curve(small_run_config):
    run_dir = run(replace(small_run_config, K=2, plot=True))
    assert (run_dir / F1_PLOT).stat().st_size > 0


def test_build_stream_from_synthetic_settings(small_run_config):
    stream = build_stream(small_run_config)
    assert stream.K == 3
    assert set(t for part in stream.type_partition for t in part) <= set(stream.schema.event_types)
    assert all(part for part in stream.type_partition)


def test_report_merger_keeps_partial_metrics():
    a = pd.DataFrame({'stage': [1, 2], 'metric': ['detection_f1', 'detection_f1'], 'value': [0.4, 0.6]})
    b = pd.DataFrame({'stage': [1, 2, 2], 'metric': ['detection_f1', 'detection_f1', 'bwt'],
                      'value': [0.2, 0.8, -0.1]})
    merger = ReportMerger()
    merged = merger.merge_reports({'perm_0': a, 'perm_1': b, 'broken': pd.DataFrame({'x': [1]})})
    assert list(merged.columns) == ['stage', 'metric', 'perm_0', 'perm_1']
    aggregate = merger.aggregate(merged).set_index(['stage', 'metric'])
    assert aggregate.loc[(2, 'detection_f1'), 'mean'] == pytest.approx(0.7)
    assert aggregate.loc[(2, 'detection_f1'), 'std'] == pytest.approx(0.1)
    assert aggregate.loc[(2, 'bwt'), 'n'] == 1


def test_sweep_aggregate_is_mean_over_permutations(small_run_config):
    config = replace(small_run_config, K=2, epochs=1, argument_epochs=1)
    result = sweep(config, permutations=2)

    root = config.output_dir
    values = [pd.read_csv(f"{root}/full/perm_{p}/{REPORTS_CSV}").query("metric == 'average_f1'")['value'].iloc[0]
              for p in range(2)]
    mean, _ = final_metric(result, 'average_f1', 'full')
    assert mean == pytest.approx(sum(values) / 2)
    assert set(result['variant']) == {'full'}


def test_sweep_needs_a_permutation(small_run_config):
    with pytest.raises(ConfigError):
        sweep(small_run_config, permutations=0)


def test_sweep_writes_a_run_per_permutation(small_run_config):
    config = replace(small_run_config, K=2, epochs=1, argument_epochs=1, train_arguments=False)
    result = sweep(config, permutations=6)

    root = Path(config.output_dir) / 'full'
    assert sorted(p.name for p in root.iterdir() if p.is_dir()) == [f"perm_{p}" for p in range(6)]
    assert all((root / f"perm_{p}" / REPORTS_CSV).exists() for p in range(6))
    aggregate = pd.read_csv(root / AGGREGATE_CSV).set_index(['stage', 'metric'])
    assert aggregate.loc[(2, 'average_f1'), 'n'] == 6
    assert final_metric(result, 'average_f1', 'full')[0] == pytest.approx(aggregate.loc[(2, 'average_f1'), 'mean'])


# --- Длинные регрессии на синтетическом потоке ---
# 20 типов со степенными частотами 200..5, K=5, память 10, игрушечный кодировщик.
# Прогоны кэшируются на модуль: полная модель считается один раз.

def _regression_config(output_dir, **overrides) -> RunConfig:
    base = dict(n_types=20, max_count=200, min_count=5, vocab_size=200, K=5, memory_size=10,
                train_arguments=False, plot=False, log_level='WARNING', output_dir=str(output_dir))
    base.update(overrides)
    return RunConfig.toy(**base)


class RegressionRuns:
    """Прогоны по имени; повторный запрос возвращает уже готовый каталог."""

    def __init__(self, root: Path):
        self.root = root
        self.configs = {}
        self.run_dirs = {}

    def __call__(self, name: str, **overrides) -> Path:
        if name not in self.run_dirs:
            self.configs[name] = _regression_config(self.root / name, **overrides)
            self.run_dirs[name] = run(self.configs[name])
        return self.run_dirs[name]

    def config(self, name: str) -> RunConfig:
        return self.configs[name]


@pytest.fixture(scope='module')
def regression_run(tmp_path_factory):
    return RegressionRuns(tmp_path_factory.mktemp('regression'))


def _final(run_dir, key):
    summary = load_summary(run_dir)[0]
    return summary[key][-1] if isinstance(summary[key], list) else summary[key]


def _task_one_argument_f1(run_dir, config):
    stream = build_stream(config)
    task = stream.task(1)
    predicted = JsonlCorpusParser().parse(str(Path(run_dir) / f"stage_{config.K}" / PREDICTIONS_FILE))
    ids = {s.sentence_id for s in task.test}
    predictions = {s.sentence_id: list(s.events) for s in predicted if s.sentence_id in ids}
    return argument_f1(predictions, task.test, set(task.event_types)).f1


@pytest.mark.slow
def test_first_stage_learns_the_synthetic_task(regression_run):
    rows = load_summary(regression_run('full'))[0]['f1_matrix']['rows']
    assert rows[0][0] >= 0.9


@pytest.mark.slow
def test_full_model_beats_fine_tuning(regression_run):
    full = regression_run('full')
    plain = regression_run('fine-tuning', strategy='fine-tuning')
    assert _final(full, 'average_f1') >= _final(plain, 'average_f1') + 0.10
    assert _final(full, 'bwt') > _final(plain, 'bwt')


@pytest.mark.slow
def test_fine_tuning_forgets_the_first_task(regression_run):
    rows = load_summary(regression_run('fine-tuning', strategy='fine-tuning'))[0]['f1_matrix']['rows']
    first_task = [row[0] for row in rows]
    for earlier, later in zip(first_task, first_task[1:]):
        assert later <= earlier + 0.02
    assert first_task[-1] < first_task[0] / 2


@pytest.mark.slow
def test_joint_training_is_an_upper_reference(regression_run):
    full = regression_run('full')
    joint = regression_run('joint-training', strategy='joint-training')
    assert _final(joint, 'average_f1') >= _final(full, 'average_f1') - 0.02


@pytest.mark.slow
@pytest.mark.parametrize('module', ABLATIONS)
def test_each_ablation_scores_at_most_full(regression_run, module):
    full = regression_run('full')
    ablated = regression_run(f"wo_{module}", **{module: False})
    assert _final(ablated, 'average_f1') <= _final(full, 'average_f1')


@pytest.mark.slow
def test_long_tail_slice_favours_full_model(regression_run):
    full = regression_run('full')
    plain = regression_run('fine-tuning', strategy='fine-tuning')
    assert _final(full, 'long_tail_f1') > _final(plain, 'long_tail_f1')


@pytest.mark.slow
def test_memory_helps_over_no_memory(regression_run):
    with_memory = regression_run('full')
    without = regression_run('m0', memory_size=0)
    assert _final(with_memory, 'average_f1') > _final(without, 'average_f1')


@pytest.mark.slow
def test_pseudo_labels_agree_with_masked_gold(regression_run):
    reports = load_summary(regression_run('full'))[1]
    scored = [r for r in reports if r.pseudo_label_precision is not None]
    assert sum(r.n_pseudo_labels for r in reports) > 0
    assert scored
    assert sum(r.pseudo_label_precision for r in scored) / len(scored) >= 0.7


@pytest.mark.slow
def test_argument_memory_protects_first_task_roles(regression_run):
    with_memory = regression_run('args_m10', train_arguments=True)
    without = regression_run('args_m0', train_arguments=True, memory_size=0)

    assert load_summary(with_memory)[0]['argument_f1'][0] >= 0.8
    assert (_task_one_argument_f1(without, regression_run.config('args_m0'))
            < _task_one_argument_f1(with_memory, regression_run.config('args_m10')))
