from extractor.services.arguments.argument_trainer import ArgumentStageResult, ArgumentTrainer
from extractor.services.arguments.crf import BioCRF
from extractor.services.arguments.entity_tagger import EntityTagger, bio_tags, spans_from_tags
from extractor.services.arguments.role_classifier import (ArgumentModel, attach_arguments, encode_candidate,
                                                          extract_arguments, tag_entities)

__all__ = [
    'ArgumentModel', 'ArgumentTrainer', 'ArgumentStageResult', 'BioCRF', 'EntityTagger',
    'bio_tags', 'spans_from_tags', 'encode_candidate', 'extract_arguments', 'attach_arguments', 'tag_entities',
]
