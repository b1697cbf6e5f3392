"""Content-addressed snapshot store with an append-only journal.

Every candidate proposal is saved as a blob named by the full sha-256 of
its bytes, then recorded in a journal row (sequence number, hash,
description). The journal is the recovery spine: a journal row without a
matching results row identifies the exact bytes whose evaluation was
interrupted, so a crashed run resumes byte-identically. Writes are atomic
(temp file + rename) and blobs are immutable once written.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path
from typing import NamedTuple

from ..errors import HarnessError, LogCorruptionError

JOURNAL_HEADER = "seq\tcommit\tdescription"


class JournalEntry(NamedTuple):
    seq: int
    commit: str
    description: str


def write_atomic(path, data):
    """All-or-nothing file replacement (same-directory temp + rename)."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def content_id(data):
    """Full sha-256 hex digest of the bytes."""
    return hashlib.sha256(data).hexdigest()


def sanitize_text(text):
    """Single-line description: tabs/newlines collapse to single spaces."""
    return " ".join(str(text).split())


def _is_hex_id(s):
    return len(s) == 64 and all(c in "0123456789abcdef" for c in s)


class SnapshotStore:
    """Blob directory plus journal under one root."""

    def __init__(self, root, create=False):
        self.root = Path(root)
        self.blobs = self.root / "blobs"
        self.journal_path = self.root / "journal.tsv"
        if create:
            self.blobs.mkdir(parents=True, exist_ok=True)
            if not self.journal_path.exists():
                write_atomic(self.journal_path, (JOURNAL_HEADER + "\n").encode())
        elif not self.journal_path.exists():
            raise HarnessError(f"no snapshot store at {self.root}")

    def entries(self):
        """Strictly parsed journal rows, oldest first."""
        lines = self.journal_path.read_text(encoding="utf-8").splitlines()
        if not lines or lines[0] != JOURNAL_HEADER:
            raise LogCorruptionError(
                f"bad journal header in {self.journal_path}", line=1)
        out = []
        for i, ln in enumerate(lines[1:], start=2):
            parts = ln.split("\t")
            if len(parts) != 3:
                raise LogCorruptionError(
                    f"journal row needs 3 fields, got {len(parts)}", line=i)
            seq_s, commit, description = parts
            if not seq_s.isdigit() or int(seq_s) != i - 2:
                raise LogCorruptionError(
                    f"journal sequence broken at row {i}: {seq_s!r}", line=i)
            if not _is_hex_id(commit):
                raise LogCorruptionError(
                    f"malformed snapshot id {commit!r}", line=i)
            out.append(JournalEntry(int(seq_s), commit, description))
        return out

    def last(self):
        entries = self.entries()
        return entries[-1] if entries else None

    def has(self, commit):
        return (self.blobs / commit).exists()

    def save(self, data, description):
        """Blob write (idempotent) then journal append; returns the entry."""
        if isinstance(data, str):
            data = data.encode("utf-8")
        commit = content_id(data)
        blob = self.blobs / commit
        if not blob.exists():
            write_atomic(blob, data)
        entries = self.entries()
        entry = JournalEntry(len(entries), commit, sanitize_text(description))
        body = [JOURNAL_HEADER] + [
            f"{e.seq}\t{e.commit}\t{e.description}" for e in entries + [entry]]
        write_atomic(self.journal_path, ("\n".join(body) + "\n").encode())
        return entry

    def load(self, commit):
        """Blob bytes, verified against the id they are stored under."""
        blob = self.blobs / commit
        if not blob.exists():
            raise LogCorruptionError(f"missing snapshot blob {commit}")
        data = blob.read_bytes()
        if content_id(data) != commit:
            raise LogCorruptionError(f"snapshot blob {commit} fails its hash")
        return data
