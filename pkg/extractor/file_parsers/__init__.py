from .base_parser import BaseParser
from .jsonl_corpus_parser import JsonlCorpusParser
from .schema_parser import SchemaParser
from .config_parser import ConfigParser

__all__ = ['BaseParser', 'JsonlCorpusParser', 'SchemaParser', 'ConfigParser']
