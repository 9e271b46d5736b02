"""The HTTP face of the hub.

Routes are deliberately few and fixed: browsing and fetching never require a
session, publishing and sharing always do, and nothing here receives
execution telemetry — the server cannot know when, how, or with which
parameters an application ran. Every response carries the Content-Security-
Policy header built from the egress whitelist.

Errors are structured problem documents: {"code", "message"} plus
{"violations": [{"path", "message"}]} where field anchoring applies.
"""

from __future__ import annotations

import threading
from base64 import b64decode
from datetime import datetime, timezone
from typing import Any, Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import sealing, store as store_mod
from .config import ServerConfig
from .manifest import ValidationReport, serialize_manifest, validate_manifest
from .netpolicy import CspPolicy, csp_header
from .store import Store, UserAccount


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, violations: Optional[list] = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.violations = violations

    def body(self) -> dict:
        doc: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.violations is not None:
            doc["violations"] = self.violations
        return doc


class _RateLimiter:
    """Fixed sliding window per key."""

    def __init__(self, limit: int, window_seconds: float = 60.0):
        self.limit = limit
        self.window = window_seconds
        self._hits: dict[str, list[float]] = {}
        self._lock = threading.Lock()

    def allow(self, key: str, now: float) -> bool:
        with self._lock:
            hits = [t for t in self._hits.get(key, []) if now - t < self.window]
            if len(hits) >= self.limit:
                self._hits[key] = hits
                return False
            hits.append(now)
            self._hits[key] = hits
            return True


def _iso(ts: float) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).isoformat().replace("+00:00", "Z")


async def _json_body(request: Request) -> Any:
    try:
        return await request.json()
    except Exception:
        raise ApiError(400, "malformed_body", "request body is not valid JSON") from None


def _require_str(doc: Any, key: str) -> str:
    if not isinstance(doc, dict) or not isinstance(doc.get(key), str) or not doc[key]:
        raise ApiError(422, "invalid_field", f"{key} must be a non-empty string")
    return doc[key]


def _session_user(request: Request) -> UserAccount:
    auth = request.headers.get("authorization", "")
    scheme, _, token = auth.partition(" ")
    if scheme.lower() != "bearer" or not token:
        raise ApiError(401, "unauthenticated", "a session token is required")
    user = request.app.state.store.session_user(token.strip())
    if user is None:
        raise ApiError(401, "unauthenticated", "session is invalid or expired")
    return user


def _summary(manifest) -> dict:
    return {
        "name": manifest.name,
        "version": manifest.version,
        "runtime": manifest.runtime.value,
        "short_description": manifest.short_description,
        "tags": sorted(manifest.tags),
    }


def create_app(config: ServerConfig | None = None, store: Store | None = None) -> FastAPI:
    config = config or ServerConfig()
    if store is None:
        store = Store(
            config.storage_path,
            share_ttl_seconds=config.share_ttl_hours * 3600,
            session_ttl_seconds=config.session_ttl_hours * 3600,
        )
    policy = CspPolicy(config.public_origin)
    header_name, header_value = csp_header(policy)
    limiter = _RateLimiter(config.share_rate_limit_per_minute)

    # No docs/openapi endpoints: the mounted route table is the contract and
    # contains exactly the routes below.
    app = FastAPI(openapi_url=None, docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.config = config
    app.state.csp_policy = policy

    @app.middleware("http")
    async def attach_csp(request: Request, call_next):
        response = await call_next(request)
        response.headers[header_name] = header_value
        return response

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    # -- catalogue (public) ---------------------------------------------------

    @app.get("/applications")
    async def list_applications(
        tag: Optional[str] = None, q: Optional[str] = None, all_versions: bool = False
    ):
        manifests = store.search_applications(tag=tag, text=q, include_all_versions=all_versions)
        return [_summary(m) for m in manifests]

    @app.post("/applications", status_code=201)
    async def publish_application(request: Request):
        user = _session_user(request)
        if not user.can_publish_app:
            raise ApiError(403, "permission_denied", "publishing requires the publish-app permission")
        doc = await _json_body(request)
        result = validate_manifest(doc, allowed_origins=policy.origins)
        if isinstance(result, ValidationReport):
            raise ApiError(
                422,
                "validation_failed",
                "manifest failed validation",
                violations=[{"path": v.path, "message": v.message} for v in result.violations],
            )
        try:
            name, version = store.put_application(result, user.user_id)
        except store_mod.DuplicateNameVersion as exc:
            raise ApiError(409, "duplicate_name_version", str(exc)) from None
        return {"name": name, "version": version}

    @app.get("/applications/{name}/{version}")
    async def application_detail(name: str, version: str):
        try:
            manifest = store.get_application(name, version)
        except store_mod.NotFound as exc:
            raise ApiError(404, "not_found", str(exc)) from None
        return serialize_manifest(manifest)

    @app.get("/applications/{name}/{version}/source")
    async def application_source(name: str, version: str):
        try:
            source = store.get_application_source(name, version)
        except store_mod.NotFound as exc:
            raise ApiError(404, "not_found", str(exc)) from None
        if source.inline is not None:
            return {"inline": source.inline}
        return {"url": source.url}

    # -- accounts ---------------------------------------------------------------

    @app.post("/auth/register", status_code=201)
    async def register(request: Request):
        doc = await _json_body(request)
        handle = _require_str(doc, "handle")
        password = _require_str(doc, "password")
        try:
            user = store.create_user(handle, password)
        except store_mod.DuplicateHandle as exc:
            raise ApiError(409, "duplicate_handle", str(exc)) from None
        return {"user_id": user.user_id, "handle": user.handle}

    @app.post("/auth/login")
    async def login(request: Request):
        doc = await _json_body(request)
        handle = _require_str(doc, "handle")
        password = _require_str(doc, "password")
        user = store.authenticate(handle, password)
        if user is None:
            raise ApiError(401, "bad_credentials", "unknown handle or wrong password")
        token, expires_at = store.create_session(user.user_id)
        return {"token": token, "expires_at": _iso(expires_at)}

    @app.post("/auth/logout", status_code=204)
    async def logout(request: Request):
        _session_user(request)
        token = request.headers["authorization"].partition(" ")[2].strip()
        store.delete_session(token)
        return Response(status_code=204)

    # -- sealed result shares ------------------------------------------------------

    @app.post("/share", status_code=201)
    async def store_share(request: Request):
        user = _session_user(request)
        if not limiter.allow(user.user_id, store.clock()):
            raise ApiError(429, "rate_limited", "too many shares; retry later")
        blob = await request.body()
        try:
            token, expires_at = store.store_share(blob, user.user_id)
        except sealing.MalformedBlob as exc:
            raise ApiError(400, "malformed_blob", str(exc)) from None
        return {"token": token, "expires_at": _iso(expires_at)}

    @app.get("/share/{token}")
    async def fetch_share(token: str):
        try:
            blob = store.fetch_share(token)
        except store_mod.NotFound:
            raise ApiError(404, "not_found", "unknown or expired share") from None
        return Response(content=blob, media_type="application/octet-stream")

    # -- sample datasets --------------------------------------------------------------

    @app.post("/data", status_code=201)
    async def upload_dataset(request: Request):
        user = _session_user(request)
        if not user.can_upload_data:
            raise ApiError(403, "permission_denied", "uploading requires the upload-data permission")
        doc = await _json_body(request)
        name = _require_str(doc, "name")
        description = _require_str(doc, "description")
        content_b64 = _require_str(doc, "content_b64")
        try:
            content = b64decode(content_b64, validate=True)
        except Exception:
            raise ApiError(422, "invalid_field", "content_b64 is not valid base64") from None
        dataset_id = store.put_sample_dataset(name, description, content, user.user_id)
        return {"dataset_id": dataset_id}

    @app.get("/data")
    async def list_datasets():
        return [
            {
                "dataset_id": d.dataset_id,
                "name": d.name,
                "description": d.description,
                "byte_size": d.byte_size,
            }
            for d in store.list_sample_datasets()
        ]

    @app.get("/data/{dataset_id}")
    async def dataset_content(dataset_id: str):
        try:
            dataset = store.get_sample_dataset(dataset_id)
        except store_mod.NotFound:
            raise ApiError(404, "not_found", "no such dataset") from None
        return Response(content=dataset.content, media_type="application/octet-stream")

    return app


def route_table(app: FastAPI) -> set[tuple[str, str]]:
    """(method, path) for every mounted route. Auto-added HEAD twins of GET
    routes are omitted; they are transport plumbing, not additional surface."""
    table = set()
    for route in app.routes:
        for method in route.methods:
            if method == "HEAD":
                continue
            table.add((method, route.path))
    return table


SPECIFIED_ROUTES = {
    ("GET", "/applications"),
    ("POST", "/applications"),
    ("GET", "/applications/{name}/{version}"),
    ("GET", "/applications/{name}/{version}/source"),
    ("POST", "/auth/register"),
    ("POST", "/auth/login"),
    ("POST", "/auth/logout"),
    ("POST", "/share"),
    ("GET", "/share/{token}"),
    ("POST", "/data"),
    ("GET", "/data"),
    ("GET", "/data/{dataset_id}"),
}
