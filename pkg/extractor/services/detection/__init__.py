from extractor.services.detection.detection_model import DetectionForward, DetectionModel, ModelSnapshot
from extractor.services.detection.detection_trainer import DetectionStageResult, DetectionTrainer
from extractor.services.detection.pseudo_labeler import PseudoLabel, augment_with_pseudo_labels, relabel_memory

__all__ = [
    'DetectionModel', 'DetectionForward', 'ModelSnapshot', 'DetectionTrainer', 'DetectionStageResult',
    'PseudoLabel', 'augment_with_pseudo_labels', 'relabel_memory',
]
