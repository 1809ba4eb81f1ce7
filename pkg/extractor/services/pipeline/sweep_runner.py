# Путь: extractor/services/pipeline/sweep_runner.py

# =================================================================================
# СЕРИЯ ЗАПУСКОВ
#
#   Каждая комбинация (стратегия, абляция, размер памяти) запускается на
#   permutations перестановках задач с seed = base + p в каталоге
#   <output_dir>/<вариант>/perm_<p>. По каждому варианту пишется
#   aggregate.csv (mean/std по перестановкам), по всей серии - sweep.csv.
#   Упавший запуск не останавливает остальные; ошибка поднимается после
#   записи частичных результатов.
# =================================================================================

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from extractor.data_models.run_config import RunConfig
from extractor.services.data_exporter import DataExporter
from extractor.services.pipeline.continual_runner import run
from extractor.services.pipeline.report_merger import ReportMerger
from extractor.utils.constants import REPORTS_CSV
from extractor.utils.errors import ConfigError, ExtractorError
from extractor.utils.log import error, info

AGGREGATE_CSV = 'aggregate.csv'
SWEEP_CSV = 'sweep.csv'


@dataclass
class SweepVariant:
    name: str
    runs: List[RunConfig]


def _run_one(config_dict: dict) -> str:
    """Точка входа процесса-исполнителя."""
    return str(run(RunConfig.from_dict(config_dict)))


class SweepRunner:

    def __init__(self, config: RunConfig, permutations: int = 6,
                 memory_sizes: Optional[Sequence[int]] = None,
                 strategies: Optional[Sequence[str]] = None,
                 ablations: Optional[Sequence[str]] = None):
        if permutations < 1:
            raise ConfigError("permutations должно быть >= 1")
        self.config = config
        self.permutations = permutations
        self.memory_sizes = list(memory_sizes) if memory_sizes else None
        self.strategies = list(strategies) if strategies else [config.strategy]
        self.ablations = list(ablations or [])
        self.root = Path(config.output_dir)
        self.merger = ReportMerger()
        self.exporter = DataExporter()

    def variants(self) -> List[SweepVariant]:
        variants = []
        for strategy in self.strategies:
            modules = [None] + (self.ablations if strategy == 'full' else [])
            for module in modules:
                for m in self.memory_sizes or [self.config.memory_size]:
                    name = strategy + (f"_wo_{module}" if module else "") + (f"_m{m}" if self.memory_sizes else "")
                    base = replace(self.config, strategy=strategy, memory_size=m)
                    if module:
                        base = base.without(module)
                    runs = [replace(base, permutation_seed=self.config.permutation_seed + p,
                                    output_dir=str(self.root / name / f"perm_{p}"))
                            for p in range(self.permutations)]
                    variants.append(SweepVariant(name, runs))
        return variants

    def _execute(self, configs: List[RunConfig]) -> Dict[str, Optional[Exception]]:
        outcomes: Dict[str, Optional[Exception]] = {}
        if self.config.workers > 1:
            with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
                futures = {c.output_dir: pool.submit(_run_one, c.to_dict()) for c in configs}
                for output_dir, future in futures.items():
                    try:
                        future.result()
                        outcomes[output_dir] = None
                    except Exception as e:
                        outcomes[output_dir] = e
        else:
            for c in configs:
                try:
                    run(c)
                    outcomes[c.output_dir] = None
                except Exception as e:
                    outcomes[c.output_dir] = e
        for output_dir, failure in outcomes.items():
            if failure is not None:
                error(f"[SweepRunner] ❌ Запуск {output_dir} завершился ошибкой: {failure}")
        return outcomes

    def sweep(self) -> pd.DataFrame:
        variants = self.variants()
        configs = [c for v in variants for c in v.runs]
        info(f"[SweepRunner] Вариантов: {len(variants)}, запусков: {len(configs)}")
        outcomes = self._execute(configs)

        tables = []
        for variant in variants:
            reports = {}
            for c in variant.runs:
                path = Path(c.output_dir) / REPORTS_CSV
                if outcomes.get(c.output_dir) is None and path.exists():
                    reports[Path(c.output_dir).name] = pd.read_csv(path)
            if not reports:
                continue
            merged = self.merger.merge_reports(reports)
            aggregate = self.merger.aggregate(merged)
            self.exporter.write_table(self.root / variant.name / AGGREGATE_CSV, aggregate.to_dict('records'))
            aggregate.insert(0, 'variant', variant.name)
            tables.append(aggregate)

        result = pd.concat(tables, ignore_index=True) if tables else pd.DataFrame()
        if not result.empty:
            self.exporter.write_table(self.root / SWEEP_CSV, result.to_dict('records'))
        failures = [d for d, e in outcomes.items() if e is not None]
        if failures:
            raise ExtractorError(f"{len(failures)} из {len(configs)} запусков завершились ошибкой: {failures}")
        return result


def sweep(config: RunConfig, permutations: int = 6, **options) -> pd.DataFrame:
    return SweepRunner(config, permutations, **options).sweep()


def final_metric(aggregate: pd.DataFrame, metric: str, variant: Optional[str] = None) -> Tuple[float, float]:
    """(mean, std) метрики на последней стадии."""
    rows = aggregate[aggregate['metric'] == metric]
    if variant is not None:
        rows = rows[rows['variant'] == variant]
    last = rows[rows['stage'] == rows['stage'].max()].iloc[0]
    return float(last['mean']), float(last['std'])
