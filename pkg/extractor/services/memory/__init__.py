from extractor.services.memory.exemplar_selector import select_exemplars
from extractor.services.memory.memory_store import MemoryStore, update_memory

__all__ = ['select_exemplars', 'MemoryStore', 'update_memory']
