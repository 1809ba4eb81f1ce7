# Путь: extractor/services/arguments/role_classifier.py

# =================================================================================
# МОДЕЛЬ АРГУМЕНТОВ
#
#   Собственный кодировщик и проектор признаков, тэггер сущностей
#   (BiLSTM + CRF) и по одной линейной softmax-голове ролей на тип события
#   (индекс 0 - роль None). Кандидат кодируется как [f_start ; f_end].
#   Головы только добавляются; существующие не меняются.
# =================================================================================

from typing import Dict, List, Optional, Sequence, Tuple

import torch
import torch.nn as nn

from extractor.data_models.encoder_config import EncoderConfig
from extractor.data_models.sentence import ArgumentMention, EntitySpan, EventMention, TokenizedSentence
from extractor.services.arguments.entity_tagger import EntityTagger, spans_from_tags
from extractor.services.encoder import ContextEncoder, FeatureProjector, ToyTransformerEncoder, Vocabulary, build_encoder
from extractor.services.encoder.checkpoint import load_checkpoint, restore_state, save_checkpoint
from extractor.utils.constants import NEW_ROW_INIT_STD, NONE_ROLE
from extractor.utils.errors import NotTrainedError, RoleHeadError

CHECKPOINT_KIND = 'arguments'


class ArgumentModel(nn.Module):

    def __init__(self, encoder: ContextEncoder, feature_dim: int, dropout_rate: float = 0.2, seed: int = 0):
        super().__init__()
        self.encoder = encoder
        self.feature_dim = feature_dim
        self.dropout_rate = dropout_rate
        self.seed = seed
        generator_state = torch.random.get_rng_state()
        torch.manual_seed(seed)
        self.projector = FeatureProjector(encoder.hidden_dim, feature_dim, dropout_rate)
        self.tagger = EntityTagger(feature_dim)
        torch.random.set_rng_state(generator_state)
        self.role_heads = nn.ModuleList()
        self.head_types: List[str] = []
        self.roles_of: Dict[str, List[str]] = {}

    def add_heads(self, event_types: Sequence[str], roles_of: Dict[str, List[str]],
                  generator: Optional[torch.Generator] = None):
        device = self.projector.linear.weight.device
        dtype = self.projector.linear.weight.dtype
        for event_type in event_types:
            if event_type in self.head_types:
                continue
            roles = list(roles_of.get(event_type, []))
            head = nn.Linear(2 * self.feature_dim, len(roles) + 1).to(device=device, dtype=dtype)
            with torch.no_grad():
                head.weight.copy_(torch.randn(head.weight.shape, generator=generator, dtype=dtype) * NEW_ROW_INIT_STD)
                head.bias.zero_()
            self.role_heads.append(head)
            self.head_types.append(event_type)
            self.roles_of[event_type] = roles

    def head(self, event_type: str) -> nn.Linear:
        if event_type not in self.head_types:
            raise RoleHeadError(f"нет головы ролей для типа '{event_type}'")
        return self.role_heads[self.head_types.index(event_type)]

    def role_space(self, event_type: str) -> List[str]:
        return [NONE_ROLE] + self.roles_of[event_type]

    def forward(self, token_lists: Sequence[Sequence[str]]) -> Tuple[torch.Tensor, torch.Tensor]:
        output = self.encoder.encode_batch(token_lists)
        return self.projector(output.hidden), output.mask

    def role_probabilities(self, event_type: str, candidates: torch.Tensor) -> torch.Tensor:
        return torch.softmax(self.head(event_type)(candidates), dim=-1)

    # --- Чекпоинты ---

    def save(self, path):
        meta = {
            'encoder': self.encoder.config.to_dict(),
            'vocab': self.encoder.vocab.to_dict() if isinstance(self.encoder, ToyTransformerEncoder) else None,
            'feature_dim': self.feature_dim,
            'dropout_rate': self.dropout_rate,
            'seed': self.seed,
            'head_types': list(self.head_types),
            'roles_of': dict(self.roles_of),
            'tagger_trained': self.tagger.trained,
        }
        save_checkpoint(path, CHECKPOINT_KIND, meta, self.state_dict())

    @staticmethod
    def load(path) -> 'ArgumentModel':
        payload = load_checkpoint(path, CHECKPOINT_KIND)
        meta = payload['meta']
        vocab = Vocabulary.from_dict(meta['vocab']) if meta.get('vocab') else None
        encoder = build_encoder(EncoderConfig.from_dict(meta['encoder']), vocab)
        model = ArgumentModel(encoder, meta['feature_dim'], meta['dropout_rate'], meta['seed'])
        model.add_heads(meta['head_types'], meta['roles_of'])
        restore_state(model, payload['state_dict'], path)
        model.tagger.trained = bool(meta.get('tagger_trained', False))
        return model


def encode_candidate(sentence_features: torch.Tensor, span: EntitySpan) -> torch.Tensor:
    """[f_start ; f_end] длины 2h."""
    n = sentence_features.shape[0]
    if not 0 <= span.start <= span.end < n:
        raise ValueError(f"спан [{span.start}, {span.end}] вне предложения длины {n}")
    return torch.cat([sentence_features[span.start], sentence_features[span.end]], dim=-1)


def encode_candidates(sentence_features: torch.Tensor, spans: Sequence[EntitySpan]) -> torch.Tensor:
    if not spans:
        return sentence_features.new_zeros(0, 2 * sentence_features.shape[-1])
    return torch.stack([encode_candidate(sentence_features, s) for s in spans])


def _eval_features(model: ArgumentModel, sentence: TokenizedSentence):
    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            features, mask = model([sentence.tokens])
            tags = model.tagger.decode(features, mask)[0]
    finally:
        model.train(was_training)
    return features[0, :len(sentence)], spans_from_tags(tags)


def tag_entities(model: ArgumentModel, sentence: TokenizedSentence) -> List[EntitySpan]:
    if not model.tagger.trained:
        raise NotTrainedError("тэггер сущностей еще не обучен")
    return _eval_features(model, sentence)[1]


def extract_arguments(model: ArgumentModel, sentence: TokenizedSentence,
                      detected_events: Sequence[EventMention]) -> List[Tuple[str, EntitySpan, str]]:
    """(тип события, сущность, роль) для каждого найденного типа; роль None отбрасывается."""
    if not detected_events:
        return []
    for event in detected_events:
        model.head(event.event_type)
    if not model.tagger.trained:
        raise NotTrainedError("тэггер сущностей еще не обучен")
    features, entities = _eval_features(model, sentence)
    if not entities:
        return []
    candidates = encode_candidates(features, entities)
    triples: List[Tuple[str, EntitySpan, str]] = []
    with torch.no_grad():
        for event_type in dict.fromkeys(e.event_type for e in detected_events):
            roles = model.role_space(event_type)
            predicted = model.role_probabilities(event_type, candidates).argmax(dim=-1).tolist()
            triples.extend((event_type, span, roles[r]) for span, r in zip(entities, predicted) if r != 0)
    return triples


def attach_arguments(model: ArgumentModel, sentence: TokenizedSentence,
                     events: List[EventMention]) -> List[EventMention]:
    """Заполняет arguments каждого предсказанного события по его типу."""
    by_type: Dict[str, List[ArgumentMention]] = {}
    for event_type, span, role in extract_arguments(model, sentence, events):
        by_type.setdefault(event_type, []).append(ArgumentMention(span.start, span.end, role))
    for event in events:
        event.arguments = list(by_type.get(event.event_type, []))
    return events
