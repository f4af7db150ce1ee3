"""In-memory dataset store keyed by content hash.

Uploading the same bytes twice lands on the same id, so clients can treat
upload as idempotent. Tables are immutable, which makes the registry safe
to read without holding the lock; the lock only orders writers.
"""

from __future__ import annotations

import threading

from ..table import ColumnarTable, LoadError, content_id, load_csv


class DatasetRegistry:
    def __init__(self) -> None:
        self._tables: dict[str, ColumnarTable] = {}
        self._lock = threading.Lock()

    def add_bytes(self, data: bytes, name: str, lenient: bool = False) -> tuple[str, ColumnarTable]:
        """Load CSV bytes and store the table; raises LoadError on bad input."""
        dataset_id = content_id(data)
        with self._lock:
            existing = self._tables.get(dataset_id)
            if existing is not None:
                return dataset_id, existing
            table = load_csv(data, name=name, lenient=lenient)
            self._tables[dataset_id] = table
            return dataset_id, table

    def get(self, dataset_id: str) -> ColumnarTable | None:
        return self._tables.get(dataset_id)

    def items(self) -> list[tuple[str, ColumnarTable]]:
        return list(self._tables.items())


__all__ = ["DatasetRegistry", "LoadError"]
