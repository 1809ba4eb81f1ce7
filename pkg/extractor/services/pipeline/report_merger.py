# Путь: extractor/services/pipeline/report_merger.py

# =================================================================================
# МОДУЛЬ ОБЪЕДИНЕНИЯ ОТЧЕТОВ
#
# НАЗНАЧЕНИЕ:
#   Слияние таблиц reports.csv нескольких запусков (перестановок задач)
#   в одну общую таблицу и расчет среднего и стандартного отклонения.
#
# ЛОГИКА РАБОТЫ:
#   1.  Оставляет только таблицы с колонками ключа (stage, metric).
#   2.  Колонка value каждого запуска переименовывается по имени запуска.
#   3.  Выполняет внешнее объединение (outer merge) по ключу, чтобы
#       метрика, отсутствующая в одном запуске, не пропала из других.
#   4.  Считает mean и std (ddof=0) по запускам, пропуски не учитываются.
# =================================================================================

from typing import Dict, List

import pandas as pd

from extractor.utils.log import info, warn

KEY_COLUMNS = ['stage', 'metric']


class ReportMerger:
    """Сервис объединения отчетов запусков по ключу (stage, metric)."""

    def merge_reports(self, reports: Dict[str, pd.DataFrame]) -> pd.DataFrame:
        """
        :param reports: имя запуска -> таблица с колонками stage, metric, value.
        :return: таблица stage, metric и по колонке значений на запуск.
        """
        valid = {name: df for name, df in reports.items()
                 if set(KEY_COLUMNS + ['value']).issubset(df.columns)}
        if len(valid) < len(reports):
            warn(f"[ReportMerger] Пропущены таблицы без колонок {KEY_COLUMNS + ['value']}: "
                 f"{sorted(set(reports) - set(valid))}")
        if not valid:
            return pd.DataFrame(columns=KEY_COLUMNS)

        frames: List[pd.DataFrame] = [
            df[KEY_COLUMNS + ['value']].rename(columns={'value': name}) for name, df in valid.items()
        ]
        merged = frames[0]
        for frame in frames[1:]:
            merged = pd.merge(merged, frame, on=KEY_COLUMNS, how='outer')
        merged = merged.sort_values(by=KEY_COLUMNS).reset_index(drop=True)
        info(f"[ReportMerger] Объединено запусков: {len(frames)}, строк: {merged.shape[0]}")
        return merged

    def aggregate(self, merged: pd.DataFrame) -> pd.DataFrame:
        """stage, metric, mean, std, n - по всем колонкам запусков."""
        runs = [c for c in merged.columns if c not in KEY_COLUMNS]
        result = merged[KEY_COLUMNS].copy()
        values = merged[runs].astype(float)
        result['mean'] = values.mean(axis=1)
        result['std'] = values.std(axis=1, ddof=0)
        result['n'] = values.notna().sum(axis=1)
        return result
