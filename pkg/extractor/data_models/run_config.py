# Путь: extractor/data_models/run_config.py

from dataclasses import asdict, dataclass, fields, replace
from typing import Dict

from extractor.utils.errors import ConfigError

STRATEGIES = ('full', 'fine-tuning', 'joint-training')
ENCODER_KINDS = ('toy-transformer', 'external-pretrained')
ABLATIONS = ('da', 'afd', 'spd', 'pkd', 'pkt')


@dataclass
class RunConfig:
    """
    Полная конфигурация запуска. Значения по умолчанию соответствуют
    гиперпараметрам исходной модели (batch 8, dropout 0.2, alpha=beta=1,
    L=3, признаки 512, tau=0.8, память 10).
    """
    # --- Данные ---
    corpus_path: str = ""
    schema_path: str = ""
    train_path: str = ""
    dev_path: str = ""
    test_path: str = ""
    dev_ratio: float = 0.1
    min_test_ratio: float = 0.1
    min_type_instances: int = 3

    # --- Синтетический корпус (если corpus_path пуст) ---
    n_types: int = 20
    max_count: int = 200
    min_count: int = 5
    vocab_size: int = 200
    multi_type_prob: float = 0.3
    negative_ratio: float = 0.2
    data_seed: int = 7

    # --- Поток задач и память ---
    K: int = 5
    memory_size: int = 10
    strategy: str = 'full'

    # --- Модули (выключение = строка абляции) ---
    da: bool = True
    afd: bool = True
    spd: bool = True
    pkd: bool = True
    pkt: bool = True

    tau: float = 0.8
    alpha: float = 1.0
    beta: float = 1.0
    attention_layers: int = 3
    long_tail_ratio: float = 0.8

    # --- Кодировщик ---
    encoder_kind: str = 'toy-transformer'
    pretrained_name: str = 'bert-base-uncased'
    n_layers: int = 4
    n_heads: int = 4
    hidden_dim: int = 768
    feature_dim: int = 512
    max_length: int = 128
    dropout: float = 0.2

    # --- Оптимизация ---
    batch_size: int = 8
    gradient_accumulation: int = 1
    lr_encoder: float = 5e-5
    lr_classifier: float = 5e-5
    lr_argument: float = 5e-5
    lr_entity: float = 3e-5
    epochs: int = 5
    warmup_epochs: int = 1
    argument_epochs: int = 5
    train_arguments: bool = True

    # --- Воспроизводимость и вывод ---
    permutation_seed: int = 0
    model_seed: int = 0
    output_dir: str = 'runs/default'
    log_level: str = 'INFO'
    device: str = 'cpu'
    workers: int = 1
    plot: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"strategy должен быть одним из {STRATEGIES}, получено '{self.strategy}'")
        if self.encoder_kind not in ENCODER_KINDS:
            raise ConfigError(f"encoder_kind должен быть одним из {ENCODER_KINDS}")
        if not 0.0 < self.tau <= 1.0:
            raise ConfigError(f"tau должен лежать в (0, 1], получено {self.tau}")
        if self.alpha < 0 or self.beta < 0:
            raise ConfigError("alpha и beta должны быть неотрицательными")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout должен лежать в [0, 1), получено {self.dropout}")
        if not 1 <= self.attention_layers <= self.n_layers:
            raise ConfigError(
                f"attention_layers={self.attention_layers} вне диапазона [1, n_layers={self.n_layers}]")
        if self.K < 1:
            raise ConfigError("K должен быть не меньше 1")
        if self.memory_size < 0:
            raise ConfigError("memory_size не может быть отрицательным")
        if self.batch_size < 1 or self.gradient_accumulation < 1:
            raise ConfigError("batch_size и gradient_accumulation должны быть >= 1")

    # --- Эффективные переключатели с учетом стратегии ---

    @property
    def is_continual(self) -> bool:
        return self.strategy == 'full'

    @property
    def effective_memory_size(self) -> int:
        return self.memory_size if self.is_continual else 0

    @property
    def use_da(self) -> bool:
        return self.is_continual and self.da

    @property
    def use_afd(self) -> bool:
        return self.is_continual and self.pkd and self.afd

    @property
    def use_spd(self) -> bool:
        return self.is_continual and self.pkd and self.spd

    @property
    def use_pkt(self) -> bool:
        return self.is_continual and self.pkt

    def without(self, module: str) -> 'RunConfig':
        """Копия конфигурации с выключенным модулем (строка таблицы абляции)."""
        if module not in ABLATIONS:
            raise ConfigError(f"неизвестный модуль абляции '{module}', допустимы {ABLATIONS}")
        return replace(self, **{module: False})

    @classmethod
    def toy(cls, **overrides) -> 'RunConfig':
        """
        Настройки для обучения маленького трансформера с нуля на CPU.
        При меньшем числе шагов первая стадия остается в режиме "все токены NA".
        """
        base = dict(
            n_layers=2, n_heads=2, hidden_dim=32, feature_dim=64, max_length=64,
            attention_layers=2, dropout=0.1, lr_encoder=5e-3, lr_classifier=5e-3,
            lr_argument=5e-3, lr_entity=5e-3, epochs=15, warmup_epochs=2, argument_epochs=10,
            batch_size=8,
        )
        base.update(overrides)
        return cls(**base)

    @classmethod
    def field_types(cls) -> Dict[str, type]:
        return {f.name: f.type for f in fields(cls)}

    def to_dict(self):
        return asdict(self)

    @staticmethod
    def from_dict(d):
        known = RunConfig.field_types()
        unknown = set(d) - set(known)
        if unknown:
            raise ConfigError(f"неизвестные ключи конфигурации: {sorted(unknown)}")
        return RunConfig(**d)
