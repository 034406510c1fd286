"""
Loading and caching of the worked-example corpus
"""
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional
import json
import logging

from qfps.models.schemas import CorpusEntry, IdentityEntry

logger = logging.getLogger(__name__)

CORPUS_FILE = Path(__file__).with_name("corpus.json")


class CorpusLoader:
    """Singleton class for loading and caching the example corpus"""

    _instance = None
    _entries: Optional[List[CorpusEntry]] = None
    _identities: Optional[List[IdentityEntry]] = None
    _loaded_at: Optional[datetime] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(CorpusLoader, cls).__new__(cls)
        return cls._instance

    def load(self, force_reload: bool = False) -> List[CorpusEntry]:
        """
        Load the corpus from disk, validating every entry

        Args:
            force_reload: Re-read the file even if cached

        Returns:
            All corpus entries
        """
        if self._entries is not None and not force_reload:
            return self._entries

        logger.info(f"Loading corpus from {CORPUS_FILE}")
        raw = json.loads(CORPUS_FILE.read_text(encoding="utf-8"))
        self._entries = [CorpusEntry(**entry) for entry in raw["entries"]]
        self._identities = [IdentityEntry(**entry) for entry in raw.get("identities", [])]
        self._loaded_at = datetime.now()
        logger.info(f"Corpus loaded: {len(self._entries)} entries, {len(self._identities)} identities")
        return self._entries

    def entries(self, include_slow: bool = True) -> List[CorpusEntry]:
        return [e for e in self.load() if include_slow or not e.slow]

    def identities(self) -> List[IdentityEntry]:
        self.load()
        return list(self._identities or [])

    def get(self, name: str) -> CorpusEntry:
        for entry in self.load():
            if entry.name == name:
                return entry
        raise KeyError(f"no corpus entry named '{name}'")

    @property
    def corpus_info(self) -> Dict[str, Any]:
        """Summary for the health check"""
        if self._entries is None:
            return {"loaded": False}
        return {
            "loaded": True,
            "entries": len(self._entries),
            "identities": len(self._identities or []),
            "loaded_at": self._loaded_at.isoformat() if self._loaded_at else None,
        }


# Global instance
corpus_loader = CorpusLoader()
