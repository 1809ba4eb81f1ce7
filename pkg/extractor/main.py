# Путь: extractor/main.py

# =================================================================================
# КОМАНДНАЯ СТРОКА
#
# КОМАНДЫ:
#   run       - один запуск из K стадий;
#   sweep     - серия запусков по перестановкам задач (и, по желанию,
#               по стратегиям, абляциям и размерам памяти);
#   evaluate  - оценка файла предсказаний против золотого корпуса;
#   gen-data  - запись синтетического корпуса и схемы.
#
# КОНФИГУРАЦИЯ:
#   Сначала значения по умолчанию (или пресет --toy), затем файл --config,
#   затем флаги. Флаг есть для каждого поля RunConfig: --memory-size 20,
#   --da false и т.д.
# =================================================================================

import argparse
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from extractor.data_models.run_config import ABLATIONS, STRATEGIES, RunConfig
from extractor.file_parsers.config_parser import ConfigParser, coerce_value
from extractor.file_parsers.jsonl_corpus_parser import JsonlCorpusParser
from extractor.services.corpus import generate_synthetic, power_law_counts
from extractor.services.data_exporter import DataExporter
from extractor.services.data_loader import DataLoader
from extractor.services.evaluation.metrics import argument_f1, detection_f1
from extractor.utils.errors import ConfigError, ExtractorError
from extractor.utils.log import error, info, set_level


def _flag(name: str) -> str:
    return '--' + name.replace('_', '-')


def _int_list(raw: str) -> List[int]:
    try:
        return [int(part) for part in raw.split(',') if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"ожидается список целых через запятую, получено '{raw}'") from e


def _str_list(raw: str) -> List[str]:
    return [part.strip() for part in raw.split(',') if part.strip()]


def _add_config_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--config', help="файл 'ключ = значение' с настройками запуска")
    parser.add_argument('--toy', action='store_true',
                        help="пресет маленького трансформера для CPU")
    group = parser.add_argument_group('поля RunConfig')
    for name, field_type in RunConfig.field_types().items():
        type_name = getattr(field_type, '__name__', str(field_type))
        group.add_argument(_flag(name), dest=name, default=None, metavar=type_name.upper())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='extractor', description="Непрерывное извлечение событий: детекция триггеров и аргументов.")
    commands = parser.add_subparsers(dest='command', required=True)

    run_parser = commands.add_parser('run', help="один запуск из K стадий")
    _add_config_flags(run_parser)

    sweep_parser = commands.add_parser('sweep', help="серия запусков по перестановкам задач")
    _add_config_flags(sweep_parser)
    sweep_parser.add_argument('--permutations', type=int, default=6)
    sweep_parser.add_argument('--memory-sizes', type=_int_list, default=None,
                              help="например 5,10,20")
    sweep_parser.add_argument('--strategies', type=_str_list, default=None,
                              help=f"подмножество {','.join(STRATEGIES)}")
    sweep_parser.add_argument('--ablations', type=_str_list, default=None,
                              help=f"подмножество {','.join(ABLATIONS)}")

    evaluate_parser = commands.add_parser('evaluate', help="оценка предсказаний против золотого корпуса")
    evaluate_parser.add_argument('predictions', help="predictions.jsonl")
    evaluate_parser.add_argument('gold', help="золотой корпус в JSON-lines")
    evaluate_parser.add_argument('--schema', default=None)
    evaluate_parser.add_argument('--types', type=_str_list, default=None,
                                 help="оценивать только эти типы событий")
    evaluate_parser.add_argument('--output', default=None, help="куда записать JSON с метриками")
    evaluate_parser.add_argument('--log-level', default='INFO')

    data_parser = commands.add_parser('gen-data', help="синтетический корпус со степенным распределением")
    data_parser.add_argument('output', help="путь к corpus.jsonl; схема пишется рядом")
    data_parser.add_argument('--n-types', type=int, default=20)
    data_parser.add_argument('--max-count', type=int, default=200)
    data_parser.add_argument('--min-count', type=int, default=5)
    data_parser.add_argument('--vocab-size', type=int, default=200)
    data_parser.add_argument('--multi-type-prob', type=float, default=0.3)
    data_parser.add_argument('--negative-ratio', type=float, default=0.2)
    data_parser.add_argument('--seed', type=int, default=7)
    data_parser.add_argument('--log-level', default='INFO')
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Пресет, затем файл, затем флаги командной строки."""
    values: Dict[str, object] = {}
    if args.config:
        if not Path(args.config).exists():
            raise ConfigError(f"Файл конфигурации не найден: {args.config}")
        values.update(ConfigParser().parse(args.config))
    for name, field_type in RunConfig.field_types().items():
        raw = getattr(args, name, None)
        if raw is not None:
            values[name] = coerce_value(name, raw, field_type)
    return RunConfig.toy(**values) if args.toy else RunConfig(**values)


def _command_run(args) -> int:
    from extractor.services.pipeline.continual_runner import load_summary, run

    config = resolve_config(args)
    set_level(config.log_level)
    run_dir = run(config)
    summary, _ = load_summary(run_dir)
    print(json.dumps({'run_dir': str(run_dir), 'average_f1': summary['average_f1'][-1],
                      'bwt': summary['bwt']}, ensure_ascii=False))
    return 0


def _command_sweep(args) -> int:
    from extractor.services.pipeline.sweep_runner import sweep

    config = resolve_config(args)
    set_level(config.log_level)
    result = sweep(config, args.permutations, memory_sizes=args.memory_sizes,
                   strategies=args.strategies, ablations=args.ablations)
    if not result.empty:
        last = result[result['stage'] == result['stage'].max()]
        print(last.to_string(index=False))
    return 0


def evaluate_file(predictions_path: str, gold_path: str, schema_path: Optional[str] = None,
                  types: Optional[Sequence[str]] = None) -> Dict[str, dict]:
    """Метрики детекции и аргументов для файла предсказаний."""
    if not Path(predictions_path).exists():
        raise FileNotFoundError(f"Файл не найден: {predictions_path}")
    _, gold = DataLoader().load_corpus(gold_path, schema_path)
    predicted = JsonlCorpusParser().parse(predictions_path)
    predictions = {s.sentence_id: list(s.events) for s in predicted}
    type_set = set(types) if types else None
    result = {'detection': detection_f1(predictions, gold, type_set).to_dict()}
    if any(e.arguments for s in gold for e in s.events):
        result['argument'] = argument_f1(predictions, gold, type_set).to_dict()
    return result


def _command_evaluate(args) -> int:
    set_level(args.log_level)
    result = evaluate_file(args.predictions, args.gold, args.schema, args.types)
    if args.output:
        DataExporter().write_json(args.output, result)
    for name, score in result.items():
        info(f"[evaluate] {name}: P={score['precision']:.4f} R={score['recall']:.4f} F1={score['f1']:.4f}")
    print(json.dumps(result, ensure_ascii=False))
    return 0


def _command_gen_data(args) -> int:
    set_level(args.log_level)
    counts = power_law_counts(args.n_types, args.max_count, args.min_count)
    schema, sentences = generate_synthetic(args.n_types, counts, args.vocab_size, args.seed,
                                           multi_type_prob=args.multi_type_prob,
                                           negative_ratio=args.negative_ratio)
    output = Path(args.output)
    exporter = DataExporter()
    exporter.write_corpus(output, sentences)
    exporter.write_schema(output.with_name(output.stem + '.schema.json'), schema)
    info(f"[gen-data] ✅ Записано {len(sentences)} предложений, {len(schema.event_types)} типов: {output}")
    return 0


COMMANDS = {
    'run': _command_run,
    'sweep': _command_sweep,
    'evaluate': _command_evaluate,
    'gen-data': _command_gen_data,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Главная функция командной строки. Возвращает код выхода:
    0 - успех, 1 - ошибка данных, конфигурации или файловой системы.
    """
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ExtractorError, OSError) as e:
        error(f"[main] ❌ {e}")
        return 1


if __name__ == '__main__':
    sys.exit(main())
