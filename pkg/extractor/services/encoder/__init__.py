from extractor.data_models.encoder_config import EncoderConfig
from extractor.services.encoder.attention import attentive_features, context_attention
from extractor.services.encoder.feature_projector import FeatureProjector, project_features
from extractor.services.encoder.toy_encoder import ContextEncoder, EncoderOutput, ToyTransformerEncoder
from extractor.services.encoder.vocabulary import Vocabulary


def build_encoder(config: EncoderConfig, vocab: Vocabulary = None) -> ContextEncoder:
    """Игрушечный трансформер или адаптер предобученной модели по config.kind."""
    if config.kind == 'toy-transformer':
        if vocab is None:
            raise ValueError("для игрушечного кодировщика нужен словарь")
        return ToyTransformerEncoder(vocab, config)
    from extractor.services.encoder.pretrained_encoder import PretrainedEncoder
    return PretrainedEncoder(config)


__all__ = [
    'EncoderOutput', 'ContextEncoder', 'ToyTransformerEncoder', 'FeatureProjector',
    'Vocabulary', 'project_features', 'context_attention', 'attentive_features', 'build_encoder',
]
