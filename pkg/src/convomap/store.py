"""File-backed conversation store with atomic writes and per-conversation
locking shared between the HTTP service and the CLI."""

from __future__ import annotations

import json
import os
import tempfile
import threading
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterator

try:
    import fcntl
except ImportError:  # non-POSIX: in-process locking only
    fcntl = None  # type: ignore[assignment]

from .cache import DiskCache
from .errors import NotFoundError, StateError
from .model import Conversation, validate_conversation

STORE_FORMAT_VERSION = 1


def default_clock() -> str:
    """UTC timestamp; CONVOMAP_FIXED_TIME pins it for reproducible runs."""
    fixed = os.environ.get("CONVOMAP_FIXED_TIME")
    if fixed:
        return fixed
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Store:
    """One JSON document per conversation plus shared metadata and the
    provider cache. All writes go through temp-file-then-rename, so a crash
    mid-write leaves the previous version intact."""

    def __init__(self, root: str | Path, clock=default_clock):
        self.root = Path(root)
        self.clock = clock
        self.conversations_dir = self.root / "conversations"
        self.locks_dir = self.root / "locks"
        self.cache = DiskCache(self.root / "cache")
        self._thread_locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self.root.mkdir(parents=True, exist_ok=True)
        self.conversations_dir.mkdir(exist_ok=True)
        self.locks_dir.mkdir(exist_ok=True)
        if not self._metadata_path().exists():
            self._write_metadata(
                {
                    "format_version": STORE_FORMAT_VERSION,
                    "next_conversation": 1,
                    "embedding_provider": None,
                    "embedding_dimension": None,
                    "llm_provider": None,
                    "summarize_template_version": None,
                    "context_prompt_version": None,
                }
            )

    # -- metadata ----------------------------------------------------------

    def _metadata_path(self) -> Path:
        return self.root / "store.json"

    def metadata(self) -> dict[str, Any]:
        with self._metadata_path().open("r", encoding="utf-8") as fh:
            return json.load(fh)

    def _write_metadata(self, meta: dict[str, Any]) -> None:
        _atomic_write(self._metadata_path(), canonical_json(meta))

    def update_metadata(self, **fields: Any) -> dict[str, Any]:
        meta = self.metadata()
        meta.update(fields)
        self._write_metadata(meta)
        return meta

    def record_providers(
        self,
        embedding_provider: str,
        embedding_dimension: int,
        llm_provider: str,
        summarize_template_version: int,
        context_prompt_version: int,
    ) -> None:
        """Pin provider identity at first use; mixing dimensions is an error."""
        meta = self.metadata()
        known = meta.get("embedding_dimension")
        if known is not None and known != embedding_dimension:
            raise StateError(
                f"store dimension is {known}, provider produces {embedding_dimension}"
            )
        self.update_metadata(
            embedding_provider=embedding_provider,
            embedding_dimension=embedding_dimension,
            llm_provider=llm_provider,
            summarize_template_version=summarize_template_version,
            context_prompt_version=context_prompt_version,
        )

    def new_conversation_id(self) -> str:
        with self._registry_lock:
            meta = self.metadata()
            serial = meta["next_conversation"]
            meta["next_conversation"] = serial + 1
            self._write_metadata(meta)
        return f"c{serial:04d}"

    # -- conversations -----------------------------------------------------

    def _conversation_path(self, conv_id: str) -> Path:
        return self.conversations_dir / f"{conv_id}.json"

    def list_ids(self) -> list[str]:
        return sorted(path.stem for path in self.conversations_dir.glob("c*.json"))

    def exists(self, conv_id: str) -> bool:
        return self._conversation_path(conv_id).exists()

    def save(self, conv: Conversation, geometry: dict[str, Any] | None = None) -> None:
        doc = conv.to_dict()
        doc["geometry"] = geometry
        _atomic_write(self._conversation_path(conv.id), canonical_json(doc))

    def load_document(self, conv_id: str) -> dict[str, Any]:
        path = self._conversation_path(conv_id)
        if not path.exists():
            raise NotFoundError(f"conversation {conv_id!r} does not exist")
        with path.open("r", encoding="utf-8") as fh:
            return json.load(fh)

    def load(self, conv_id: str) -> Conversation:
        conv = Conversation.from_dict(self.load_document(conv_id))
        violations = validate_conversation(conv)
        if violations:
            raise StateError(
                f"persisted conversation {conv_id!r} is invalid: " + "; ".join(violations)
            )
        return conv

    def load_geometry(self, conv_id: str) -> dict[str, Any] | None:
        return self.load_document(conv_id).get("geometry")

    # -- locking -----------------------------------------------------------

    @contextmanager
    def lock(self, conv_id: str) -> Iterator[None]:
        """Serialize writers on one conversation across threads and processes."""
        with self._registry_lock:
            thread_lock = self._thread_locks.setdefault(conv_id, threading.Lock())
        with thread_lock:
            lock_path = self.locks_dir / f"{conv_id}.lock"
            with lock_path.open("w") as fh:
                if fcntl is not None:
                    fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
                try:
                    yield
                finally:
                    if fcntl is not None:
                        fcntl.flock(fh.fileno(), fcntl.LOCK_UN)
