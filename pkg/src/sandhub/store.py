"""Persistence and query layer: applications, users, permissions, datasets, shares.

A single-file SQLite store. Reads are concurrent; every public method takes
the store lock, which serialises writes at desk scale. The clock and the
randomness source are injected so expiry and token tests are deterministic.

Stored manifests and datasets are immutable: a new version is a new record,
and nothing here ever mutates or decrypts a stored share blob.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import secrets
import sqlite3
import threading
import time
from base64 import urlsafe_b64encode
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from .manifest import (
    ApplicationManifest,
    SourceRef,
    ValidationReport,
    serialize_manifest,
    validate_manifest,
    version_key,
)
from .sealing import SealedBlob  # structural check only; the store cannot decrypt

DEFAULT_SHARE_TTL_SECONDS = 7 * 24 * 3600
DEFAULT_SESSION_TTL_SECONDS = 24 * 3600

_CREDENTIAL_ITERATIONS = 100_000


class StoreError(Exception):
    pass


class UnknownUser(StoreError):
    pass


class DuplicateHandle(StoreError):
    pass


class DuplicateNameVersion(StoreError):
    pass


class PermissionDenied(StoreError):
    pass


class NotFound(StoreError):
    pass


class NotAdmin(StoreError):
    pass


class NoSuchRequest(StoreError):
    pass


class DuplicatePending(StoreError):
    pass


class PermissionKind(str, Enum):
    PUBLISH_APP = "publish_app"
    UPLOAD_DATA = "upload_data"


class RequestStatus(str, Enum):
    PENDING = "pending"
    GRANTED = "granted"
    DENIED = "denied"


@dataclass(frozen=True)
class UserAccount:
    user_id: str
    handle: str
    can_publish_app: bool
    can_upload_data: bool
    is_admin: bool


@dataclass(frozen=True)
class PermissionRequest:
    request_id: str
    user_id: str
    kind: PermissionKind
    status: RequestStatus
    created_at: float


@dataclass(frozen=True)
class DatasetSummary:
    dataset_id: str
    name: str
    description: str
    byte_size: int


@dataclass(frozen=True)
class SampleDataset:
    dataset_id: str
    name: str
    description: str
    content: bytes
    uploader: str
    byte_size: int


_SCHEMA = """
CREATE TABLE IF NOT EXISTS users (
    user_id TEXT PRIMARY KEY,
    handle TEXT NOT NULL UNIQUE,
    credential_salt BLOB NOT NULL,
    credential_hash BLOB NOT NULL,
    can_publish_app INTEGER NOT NULL DEFAULT 0,
    can_upload_data INTEGER NOT NULL DEFAULT 0,
    is_admin INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS applications (
    name TEXT NOT NULL,
    version TEXT NOT NULL,
    document TEXT NOT NULL,
    publisher TEXT NOT NULL,
    created_at REAL NOT NULL,
    PRIMARY KEY (name, version)
);
CREATE TABLE IF NOT EXISTS permission_requests (
    request_id TEXT PRIMARY KEY,
    user_id TEXT NOT NULL,
    kind TEXT NOT NULL,
    status TEXT NOT NULL,
    created_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS shares (
    token TEXT PRIMARY KEY,
    blob BLOB NOT NULL,
    owner TEXT NOT NULL,
    created_at REAL NOT NULL,
    expires_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS datasets (
    dataset_id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    description TEXT NOT NULL,
    content BLOB NOT NULL,
    uploader TEXT NOT NULL,
    byte_size INTEGER NOT NULL,
    created_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
    token TEXT PRIMARY KEY,
    user_id TEXT NOT NULL,
    issued_at REAL NOT NULL,
    expires_at REAL NOT NULL
);
"""


def _hash_credential(password: str, salt: bytes) -> bytes:
    return hashlib.pbkdf2_hmac(
        "sha256", password.encode("utf-8"), salt, _CREDENTIAL_ITERATIONS, dklen=32
    )


def _url_token(raw: bytes) -> str:
    return urlsafe_b64encode(raw).rstrip(b"=").decode("ascii")


class Store:
    """SQLite-backed registry. ``path=":memory:"`` gives an ephemeral store."""

    def __init__(
        self,
        path: str = ":memory:",
        clock: Callable[[], float] = time.time,
        token_bytes: Callable[[int], bytes] = secrets.token_bytes,
        share_ttl_seconds: float = DEFAULT_SHARE_TTL_SECONDS,
        session_ttl_seconds: float = DEFAULT_SESSION_TTL_SECONDS,
    ) -> None:
        self._db = sqlite3.connect(path, check_same_thread=False)
        self._db.execute("PRAGMA foreign_keys = ON")
        self._db.executescript(_SCHEMA)
        self._lock = threading.RLock()
        self.clock = clock
        self.token_bytes = token_bytes
        self.share_ttl_seconds = share_ttl_seconds
        self.session_ttl_seconds = session_ttl_seconds

    def close(self) -> None:
        self._db.close()

    # -- users and permissions ------------------------------------------------

    def create_user(
        self,
        handle: str,
        password: str,
        can_publish_app: bool = False,
        can_upload_data: bool = False,
        is_admin: bool = False,
    ) -> UserAccount:
        """Register an account. Flag overrides are for operator bootstrap only;
        the network registration path always uses the defaults (both false)."""
        if not handle or not handle.strip():
            raise StoreError("handle must be non-empty")
        if not password:
            raise StoreError("password must be non-empty")
        with self._lock:
            user_id = self.token_bytes(16).hex()
            salt = self.token_bytes(16)
            digest = _hash_credential(password, salt)
            try:
                self._db.execute(
                    "INSERT INTO users VALUES (?, ?, ?, ?, ?, ?, ?)",
                    (user_id, handle, salt, digest, int(can_publish_app), int(can_upload_data), int(is_admin)),
                )
            except sqlite3.IntegrityError:
                raise DuplicateHandle(f"handle {handle!r} is taken") from None
            self._db.commit()
            return UserAccount(user_id, handle, can_publish_app, can_upload_data, is_admin)

    def authenticate(self, handle: str, password: str) -> Optional[UserAccount]:
        """The account on correct credentials, else None."""
        with self._lock:
            row = self._db.execute(
                "SELECT user_id, handle, credential_salt, credential_hash,"
                " can_publish_app, can_upload_data, is_admin FROM users WHERE handle = ?",
                (handle,),
            ).fetchone()
        if row is None:
            return None
        user_id, handle, salt, stored, publish, upload, admin = row
        if not hmac.compare_digest(stored, _hash_credential(password, salt)):
            return None
        return UserAccount(user_id, handle, bool(publish), bool(upload), bool(admin))

    def get_user(self, user_id: str) -> UserAccount:
        with self._lock:
            row = self._db.execute(
                "SELECT user_id, handle, can_publish_app, can_upload_data, is_admin"
                " FROM users WHERE user_id = ?",
                (user_id,),
            ).fetchone()
        if row is None:
            raise UnknownUser(f"no user {user_id!r}")
        return UserAccount(row[0], row[1], bool(row[2]), bool(row[3]), bool(row[4]))

    def get_user_by_handle(self, handle: str) -> UserAccount:
        with self._lock:
            row = self._db.execute(
                "SELECT user_id FROM users WHERE handle = ?", (handle,)
            ).fetchone()
        if row is None:
            raise UnknownUser(f"no user with handle {handle!r}")
        return self.get_user(row[0])

    def request_permission(self, user_id: str, kind: PermissionKind) -> PermissionRequest:
        with self._lock:
            self.get_user(user_id)
            pending = self._db.execute(
                "SELECT 1 FROM permission_requests WHERE user_id = ? AND kind = ? AND status = ?",
                (user_id, kind.value, RequestStatus.PENDING.value),
            ).fetchone()
            if pending is not None:
                raise DuplicatePending(f"a {kind.value} request is already pending")
            request = PermissionRequest(
                request_id=self.token_bytes(16).hex(),
                user_id=user_id,
                kind=kind,
                status=RequestStatus.PENDING,
                created_at=self.clock(),
            )
            self._db.execute(
                "INSERT INTO permission_requests VALUES (?, ?, ?, ?, ?)",
                (request.request_id, user_id, kind.value, request.status.value, request.created_at),
            )
            self._db.commit()
            return request

    def _resolve_request(self, admin_id: str, request_id: str, grant: bool) -> UserAccount:
        with self._lock:
            admin = self.get_user(admin_id)
            if not admin.is_admin:
                raise NotAdmin(f"user {admin.handle!r} is not an admin")
            row = self._db.execute(
                "SELECT user_id, kind, status FROM permission_requests WHERE request_id = ?",
                (request_id,),
            ).fetchone()
            if row is None:
                raise NoSuchRequest(f"no request {request_id!r}")
            user_id, kind, status = row
            if status != RequestStatus.PENDING.value:
                raise NoSuchRequest(f"request {request_id!r} was already {status}")
            new_status = RequestStatus.GRANTED if grant else RequestStatus.DENIED
            self._db.execute(
                "UPDATE permission_requests SET status = ? WHERE request_id = ?",
                (new_status.value, request_id),
            )
            if grant:
                column = (
                    "can_publish_app"
                    if kind == PermissionKind.PUBLISH_APP.value
                    else "can_upload_data"
                )
                self._db.execute(
                    f"UPDATE users SET {column} = 1 WHERE user_id = ?", (user_id,)
                )
            self._db.commit()
            return self.get_user(user_id)

    def grant_permission(self, admin_id: str, request_id: str) -> UserAccount:
        """Grant a pending request (admin only) and flip the user's flag."""
        return self._resolve_request(admin_id, request_id, grant=True)

    def deny_permission(self, admin_id: str, request_id: str) -> UserAccount:
        """Deny a pending request (admin only); flags are untouched."""
        return self._resolve_request(admin_id, request_id, grant=False)

    def set_permission(self, handle: str, column: str, granted: bool = True) -> UserAccount:
        """Local-operator action (CLI with direct storage access): set a flag
        outright, bypassing the request workflow. ``column`` is one of
        can_publish_app / can_upload_data / is_admin."""
        if column not in ("can_publish_app", "can_upload_data", "is_admin"):
            raise StoreError(f"unknown permission column {column!r}")
        with self._lock:
            user = self.get_user_by_handle(handle)
            self._db.execute(
                f"UPDATE users SET {column} = ? WHERE user_id = ?",
                (int(granted), user.user_id),
            )
            self._db.commit()
            return self.get_user(user.user_id)

    def pending_requests(self) -> list[PermissionRequest]:
        with self._lock:
            rows = self._db.execute(
                "SELECT request_id, user_id, kind, status, created_at"
                " FROM permission_requests WHERE status = ? ORDER BY created_at",
                (RequestStatus.PENDING.value,),
            ).fetchall()
        return [
            PermissionRequest(r[0], r[1], PermissionKind(r[2]), RequestStatus(r[3]), r[4])
            for r in rows
        ]

    # -- applications ----------------------------------------------------------

    def put_application(self, manifest: ApplicationManifest, publisher: str) -> tuple[str, str]:
        """Store a validated manifest immutably; returns (name, version)."""
        user = self.get_user(publisher)
        if not user.can_publish_app:
            raise PermissionDenied(f"user {user.handle!r} may not publish applications")
        document = json.dumps(serialize_manifest(manifest), sort_keys=True)
        with self._lock:
            try:
                self._db.execute(
                    "INSERT INTO applications VALUES (?, ?, ?, ?, ?)",
                    (manifest.name, manifest.version, document, publisher, self.clock()),
                )
            except sqlite3.IntegrityError:
                raise DuplicateNameVersion(
                    f"({manifest.name!r}, {manifest.version!r}) is already published"
                ) from None
            self._db.commit()
        return manifest.name, manifest.version

    def _load_manifest(self, document: str) -> ApplicationManifest:
        # Stored documents were validated at publish time; origin re-checks are
        # unnecessary and the configured whitelist may legitimately differ now.
        result = validate_manifest(json.loads(document), allowed_origins=("https://*",))
        if isinstance(result, ValidationReport):
            raise StoreError(f"stored manifest no longer validates:\n{result}")
        return result

    def get_application(self, name: str, version: str) -> ApplicationManifest:
        with self._lock:
            row = self._db.execute(
                "SELECT document FROM applications WHERE name = ? AND version = ?",
                (name, version),
            ).fetchone()
        if row is None:
            raise NotFound(f"no application ({name!r}, {version!r})")
        return self._load_manifest(row[0])

    def get_application_source(self, name: str, version: str) -> SourceRef:
        return self.get_application(name, version).source

    def search_applications(
        self,
        tag: Optional[str] = None,
        text: Optional[str] = None,
        include_all_versions: bool = False,
    ) -> list[ApplicationManifest]:
        """Case-insensitive search; filters conjoin and only narrow.

        Results are ordered by name, then descending version; one entry per
        name (the latest version) unless include_all_versions is set.
        """
        with self._lock:
            rows = self._db.execute("SELECT document FROM applications").fetchall()
        manifests = [self._load_manifest(r[0]) for r in rows]

        if tag is not None:
            wanted = tag.lower()
            manifests = [m for m in manifests if wanted in m.tags]
        if text is not None:
            needle = text.lower()
            manifests = [
                m
                for m in manifests
                if needle in m.name.lower() or needle in m.short_description.lower()
            ]

        manifests.sort(key=lambda m: (m.name, version_key(m.version)))
        if not include_all_versions:
            latest: dict[str, ApplicationManifest] = {}
            for m in manifests:
                latest[m.name] = m  # sorted ascending, so the last wins
            manifests = list(latest.values())
            manifests.sort(key=lambda m: m.name)
        else:
            manifests.sort(key=lambda m: (m.name, tuple(-x for x in version_key(m.version))))
        return manifests

    # -- sealed shares ---------------------------------------------------------

    def store_share(self, blob: bytes, owner: str) -> tuple[str, float]:
        """Store an opaque sealed blob; returns (token, expires_at).

        Only the structural layout is checked — the server cannot and must not
        decrypt. Raises sealing.MalformedBlob on structural defects. Each
        store also sweeps out expired rows, so the table never accumulates
        dead blobs between explicit purges.
        """
        SealedBlob.from_bytes(blob)
        self.get_user(owner)
        now = self.clock()
        token = _url_token(self.token_bytes(16))
        expires_at = now + self.share_ttl_seconds
        with self._lock:
            self._db.execute("DELETE FROM shares WHERE expires_at <= ?", (now,))
            self._db.execute(
                "INSERT INTO shares VALUES (?, ?, ?, ?, ?)",
                (token, blob, owner, now, expires_at),
            )
            self._db.commit()
        return token, expires_at

    def fetch_share(self, token: str) -> bytes:
        """Stored bytes for a live token. Unknown, expired, and purged tokens
        are indistinguishable (all NotFound); expired rows are purged lazily."""
        now = self.clock()
        with self._lock:
            row = self._db.execute(
                "SELECT blob, expires_at FROM shares WHERE token = ?", (token,)
            ).fetchone()
            if row is not None and now >= row[1]:
                self._db.execute("DELETE FROM shares WHERE token = ?", (token,))
                self._db.commit()
                row = None
        if row is None:
            raise NotFound("no such share")
        return bytes(row[0])

    def purge_expired_shares(self) -> int:
        """Periodic sweep; returns how many rows were removed."""
        now = self.clock()
        with self._lock:
            cursor = self._db.execute("DELETE FROM shares WHERE expires_at <= ?", (now,))
            self._db.commit()
            return cursor.rowcount

    # -- sample datasets ---------------------------------------------------------

    def put_sample_dataset(
        self, name: str, description: str, content: bytes, uploader: str
    ) -> str:
        user = self.get_user(uploader)
        if not user.can_upload_data:
            raise PermissionDenied(f"user {user.handle!r} may not upload sample data")
        dataset_id = self.token_bytes(16).hex()
        with self._lock:
            self._db.execute(
                "INSERT INTO datasets VALUES (?, ?, ?, ?, ?, ?, ?)",
                (dataset_id, name, description, content, uploader, len(content), self.clock()),
            )
            self._db.commit()
        return dataset_id

    def list_sample_datasets(self) -> list[DatasetSummary]:
        with self._lock:
            rows = self._db.execute(
                "SELECT dataset_id, name, description, byte_size FROM datasets ORDER BY created_at"
            ).fetchall()
        return [DatasetSummary(*row) for row in rows]

    def get_sample_dataset(self, dataset_id: str) -> SampleDataset:
        with self._lock:
            row = self._db.execute(
                "SELECT dataset_id, name, description, content, uploader, byte_size"
                " FROM datasets WHERE dataset_id = ?",
                (dataset_id,),
            ).fetchone()
        if row is None:
            raise NotFound(f"no dataset {dataset_id!r}")
        return SampleDataset(row[0], row[1], row[2], bytes(row[3]), row[4], row[5])

    # -- sessions ----------------------------------------------------------------

    def create_session(self, user_id: str) -> tuple[str, float]:
        self.get_user(user_id)
        now = self.clock()
        token = _url_token(self.token_bytes(32))
        expires_at = now + self.session_ttl_seconds
        with self._lock:
            self._db.execute(
                "INSERT INTO sessions VALUES (?, ?, ?, ?)", (token, user_id, now, expires_at)
            )
            self._db.commit()
        return token, expires_at

    def session_user(self, token: str) -> Optional[UserAccount]:
        """The account a live session token authenticates, else None."""
        now = self.clock()
        with self._lock:
            row = self._db.execute(
                "SELECT user_id, expires_at FROM sessions WHERE token = ?", (token,)
            ).fetchone()
            if row is not None and now >= row[1]:
                self._db.execute("DELETE FROM sessions WHERE token = ?", (token,))
                self._db.commit()
                row = None
        if row is None:
            return None
        try:
            return self.get_user(row[0])
        except UnknownUser:
            return None

    def delete_session(self, token: str) -> None:
        with self._lock:
            self._db.execute("DELETE FROM sessions WHERE token = ?", (token,))
            self._db.commit()
