"""Append-only JSONL store of solver outcomes keyed by instance hash."""

from __future__ import annotations

import json
import threading
from pathlib import Path


class ResultStore:
    def __init__(self, path: str | Path | None) -> None:
        self.path = Path(path) if path else None
        self._rows: dict[str, dict] = {}
        self._lock = threading.Lock()
        if self.path and self.path.exists():
            for lineno, line in enumerate(self.path.read_text().splitlines(), 1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                    self._rows[row["hash"]] = row
                except (ValueError, KeyError) as exc:
                    raise ValueError(f"{self.path}:{lineno}: malformed store line ({exc})") from exc

    def __contains__(self, key: str) -> bool:
        return key in self._rows

    def __len__(self) -> int:
        return len(self._rows)

    def get(self, key: str) -> dict | None:
        return self._rows.get(key)

    def put(self, key: str, row: dict) -> None:
        row = {"hash": key, **row}
        with self._lock:
            self._rows[key] = row
            if self.path:
                with self.path.open("a") as fh:
                    fh.write(json.dumps(row, sort_keys=True) + "\n")
                    fh.flush()

    def rows(self) -> list[dict]:
        return list(self._rows.values())
