# Путь: extractor/data_models/encoder_config.py

from dataclasses import asdict, dataclass

from extractor.utils.errors import ConfigError


@dataclass
class EncoderConfig:
    """Параметры кодировщика; L - глубина усреднения внимания."""
    kind: str = 'toy-transformer'
    n_layers: int = 2
    n_heads: int = 2
    d: int = 32
    L: int = 2
    dropout_rate: float = 0.2
    seed: int = 0
    max_length: int = 64
    pretrained_name: str = ''

    def __post_init__(self):
        if not 1 <= self.L <= self.n_layers:
            raise ConfigError(f"L={self.L} вне диапазона [1, n_layers={self.n_layers}]")
        if self.d % self.n_heads != 0:
            raise ConfigError(f"d={self.d} должно делиться на n_heads={self.n_heads}")

    def to_dict(self):
        return asdict(self)

    @staticmethod
    def from_dict(d):
        return EncoderConfig(**d)
