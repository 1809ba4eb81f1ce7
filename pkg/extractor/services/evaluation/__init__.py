from extractor.services.evaluation.metrics import (argument_f1, average_f1, bwt, detection_f1, long_tail_slice,
                                                   pseudo_label_precision, score_counts)

__all__ = ['detection_f1', 'argument_f1', 'bwt', 'long_tail_slice', 'pseudo_label_precision',
           'average_f1', 'score_counts']
