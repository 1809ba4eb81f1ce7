from .synthetic_generator import SyntheticCorpusGenerator, generate_synthetic, power_law_counts
from .corpus_splitter import split_corpus
from .task_partitioner import partition_tasks, accumulated_test

__all__ = ['SyntheticCorpusGenerator', 'generate_synthetic', 'power_law_counts',
           'split_corpus', 'partition_tasks', 'accumulated_test']
