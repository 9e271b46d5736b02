from __future__ import annotations

import re

import pytest

from sandhub import sealing
from sandhub.config import ServerConfig
from sandhub.netpolicy import CSP_HEADER_NAME, CspPolicy
from sandhub.seeds import seed_manifests
from sandhub.server import SPECIFIED_ROUTES, create_app, route_table
from sandhub.store import Store

from conftest import register_and_login
from test_manifest import valid_document

GOLDEN_CSP = (
    "default-src 'self'; "
    "connect-src https://localhost:8443 https://*.r-wasm.org https://cdn.jsdelivr.net"
    " https://pypi.org https://files.pythonhosted.org https://raw.githubusercontent.com; "
    "script-src https://localhost:8443 https://*.r-wasm.org https://cdn.jsdelivr.net"
    " https://pypi.org https://files.pythonhosted.org https://raw.githubusercontent.com"
    " 'unsafe-eval'; "
    "style-src https://localhost:8443 https://*.r-wasm.org https://cdn.jsdelivr.net"
    " https://pypi.org https://files.pythonhosted.org https://raw.githubusercontent.com"
    " 'unsafe-inline'"
)


@pytest.fixture
def seeded(store: Store, client):
    publisher = store.create_user("seed-bot", "pw", can_publish_app=True)
    for manifest in seed_manifests():
        store.put_application(manifest, publisher.user_id)


def grant(store: Store, handle: str, column: str):
    store.set_permission(handle, column)


class TestCatalogue:
    def test_list_seeded_applications(self, client, seeded):
        response = client.get("/applications")
        assert response.status_code == 200
        summaries = response.json()
        assert len(summaries) >= 15
        sample = summaries[0]
        assert set(sample) == {"name", "version", "runtime", "short_description", "tags"}

    def test_text_query_finds_umap(self, client, seeded):
        response = client.get("/applications", params={"q": "UMAP"})
        assert "2D UMAP" in [s["name"] for s in response.json()]

    def test_tag_query(self, client, seeded):
        names = [s["name"] for s in client.get("/applications", params={"tag": "r"}).json()]
        assert {"netANOVA", "netMUG", "GMIC", "Demo"} <= set(names)

    def test_unknown_tag_is_empty_200(self, client, seeded):
        response = client.get("/applications", params={"tag": "nonexistent"})
        assert response.status_code == 200
        assert response.json() == []

    def test_detail_includes_parameters_and_long_description(self, client, seeded):
        response = client.get("/applications/netANOVA/1.0.0")
        assert response.status_code == 200
        doc = response.json()
        assert doc["long_description"]
        assert doc["entry_point"]["parameters"]
        assert doc["entry_point"]["returns"] == "file"

    def test_inline_source_byte_identical(self, client, seeded, store):
        expected = store.get_application_source("Demo", "1.0.0").inline
        response = client.get("/applications/Demo/1.0.0/source")
        assert response.json() == {"inline": expected}

    def test_url_source_unmodified(self, client, seeded, store):
        expected = store.get_application_source("netANOVA", "1.0.0").url
        response = client.get("/applications/netANOVA/1.0.0/source")
        assert response.json() == {"url": expected}

    def test_unknown_application_404(self, client, seeded):
        assert client.get("/applications/nope/1.0.0").status_code == 404
        assert client.get("/applications/netANOVA/9.9.9").status_code == 404

    def test_browse_requires_no_login(self, client, seeded):
        # no Authorization header anywhere in this class; spot-check explicitly
        for path in ("/applications", "/applications/Demo/1.0.0", "/data"):
            assert client.get(path).status_code == 200


class TestAuth:
    def test_register_login_logout_cycle(self, client):
        headers = register_and_login(client, "casey", "pw123")
        assert client.post("/auth/logout", headers=headers).status_code == 204
        # the session is gone: authenticated calls now fail
        assert client.post("/share", headers=headers, content=b"x").status_code == 401

    def test_duplicate_handle_409(self, client):
        client.post("/auth/register", json={"handle": "dup", "password": "pw"})
        response = client.post("/auth/register", json={"handle": "dup", "password": "pw"})
        assert response.status_code == 409

    def test_wrong_password_401(self, client):
        client.post("/auth/register", json={"handle": "casey", "password": "right"})
        response = client.post("/auth/login", json={"handle": "casey", "password": "wrong"})
        assert response.status_code == 401

    def test_expired_session_401(self, client, clock, server_config):
        headers = register_and_login(client, "casey", "pw")
        clock.advance(server_config.session_ttl_hours * 3600 + 1)
        assert client.post("/share", headers=headers, content=b"x").status_code == 401

    def test_malformed_body_400(self, client):
        response = client.post(
            "/auth/register", content=b"{nope", headers={"Content-Type": "application/json"}
        )
        assert response.status_code == 400

    def test_missing_fields_422(self, client):
        assert client.post("/auth/register", json={"handle": "x"}).status_code == 422


class TestPublish:
    def test_publish_requires_session(self, client):
        assert client.post("/applications", json=valid_document()).status_code == 401

    def test_publish_requires_permission(self, client):
        headers = register_and_login(client)
        response = client.post("/applications", json=valid_document(), headers=headers)
        assert response.status_code == 403

    def test_permitted_publish_201(self, client, store):
        headers = register_and_login(client)
        grant(store, "dev", "can_publish_app")
        response = client.post("/applications", json=valid_document(), headers=headers)
        assert response.status_code == 201
        assert response.json() == {"name": "netANOVA", "version": "1.0.0"}
        assert client.get("/applications/netANOVA/1.0.0").status_code == 200

    def test_sixth_parameter_kind_422_with_path(self, client, store):
        headers = register_and_login(client)
        grant(store, "dev", "can_publish_app")
        doc = valid_document()
        doc["entry_point"]["parameters"][0]["kind"] = "dataframe"
        response = client.post("/applications", json=doc, headers=headers)
        assert response.status_code == 422
        violations = response.json()["violations"]
        assert violations[0]["path"] == "entry_point.parameters[0].kind"

    def test_duplicate_name_version_409(self, client, store):
        headers = register_and_login(client)
        grant(store, "dev", "can_publish_app")
        assert client.post("/applications", json=valid_document(), headers=headers).status_code == 201
        assert client.post("/applications", json=valid_document(), headers=headers).status_code == 409

    def test_source_url_may_use_own_origin(self, client, store):
        # the whitelist used at publish time includes the configured origin
        headers = register_and_login(client)
        grant(store, "dev", "can_publish_app")
        doc = valid_document(source={"url": "https://localhost:8443/apps/netanova.R"})
        assert client.post("/applications", json=doc, headers=headers).status_code == 201


class TestShare:
    def _blob(self) -> bytes:
        return sealing.seal(b"analysis output", "out.html", "pw").to_bytes()

    def test_round_trip(self, client):
        headers = register_and_login(client)
        blob = self._blob()
        response = client.post("/share", content=blob, headers=headers)
        assert response.status_code == 201
        body = response.json()
        assert set(body) == {"token", "expires_at"}
        fetched = client.get(f"/share/{body['token']}")
        assert fetched.status_code == 200
        assert fetched.content == blob
        assert fetched.headers["content-type"] == "application/octet-stream"

    def test_unauthenticated_post_401(self, client):
        assert client.post("/share", content=self._blob()).status_code == 401

    def test_fetch_requires_no_login(self, client):
        headers = register_and_login(client)
        token = client.post("/share", content=self._blob(), headers=headers).json()["token"]
        assert client.get(f"/share/{token}").status_code == 200

    def test_47_byte_body_400(self, client):
        headers = register_and_login(client)
        response = client.post("/share", content=b"\x00" * 47, headers=headers)
        assert response.status_code == 400

    def test_ttl_expiry_404(self, client, clock, server_config):
        headers = register_and_login(client)
        token = client.post("/share", content=self._blob(), headers=headers).json()["token"]
        clock.advance(server_config.share_ttl_hours * 3600 + 1)
        # session also expired; fetching needs no session though
        assert client.get(f"/share/{token}").status_code == 404

    def test_unknown_token_404(self, client):
        assert client.get("/share/unknowntoken").status_code == 404

    def test_rate_limit_429(self, store, clock):
        config = ServerConfig(share_rate_limit_per_minute=3)
        app = create_app(config, store)
        from fastapi.testclient import TestClient

        with TestClient(app) as client:
            headers = register_and_login(client)
            for _ in range(3):
                assert client.post("/share", content=self._blob(), headers=headers).status_code == 201
            assert client.post("/share", content=self._blob(), headers=headers).status_code == 429
            clock.advance(61)
            assert client.post("/share", content=self._blob(), headers=headers).status_code == 201


class TestData:
    def test_upload_requires_permission(self, client):
        headers = register_and_login(client)
        body = {"name": "iris", "description": "d", "content_b64": "aGVsbG8="}
        assert client.post("/data", json=body, headers=headers).status_code == 403

    def test_upload_then_anonymous_download(self, client, store):
        headers = register_and_login(client, "provider", "pw")
        grant(store, "provider", "can_upload_data")
        body = {"name": "iris", "description": "flowers", "content_b64": "aGVsbG8="}
        response = client.post("/data", json=body, headers=headers)
        assert response.status_code == 201
        dataset_id = response.json()["dataset_id"]
        listing = client.get("/data").json()
        assert [(d["name"], d["byte_size"]) for d in listing] == [("iris", 5)]
        assert client.get(f"/data/{dataset_id}").content == b"hello"

    def test_empty_listing(self, client):
        assert client.get("/data").json() == []

    def test_unknown_dataset_404(self, client):
        assert client.get("/data/missing").status_code == 404

    def test_bad_base64_422(self, client, store):
        headers = register_and_login(client, "provider", "pw")
        grant(store, "provider", "can_upload_data")
        body = {"name": "x", "description": "d", "content_b64": "@@@"}
        assert client.post("/data", json=body, headers=headers).status_code == 422


class TestCsp:
    def test_golden_header_value(self, client):
        response = client.get("/applications")
        assert response.headers[CSP_HEADER_NAME] == GOLDEN_CSP

    def test_identical_header_on_different_routes(self, client):
        values = {
            client.get(path).headers[CSP_HEADER_NAME]
            for path in ("/applications", "/data", "/share/zzz")
        }
        assert values == {GOLDEN_CSP}

    def test_error_responses_carry_header_too(self, client):
        response = client.get("/applications/none/0.0.0")
        assert response.status_code == 404
        assert response.headers[CSP_HEADER_NAME] == GOLDEN_CSP

    def test_own_origin_substitution(self, store):
        config = ServerConfig(public_origin="https://hub.example.net")
        app = create_app(config, store)
        from fastapi.testclient import TestClient

        with TestClient(app) as client:
            value = client.get("/applications").headers[CSP_HEADER_NAME]
        assert "https://hub.example.net" in value
        assert "localhost:8443" not in value

    def test_exactly_six_origins(self, client):
        value = client.get("/applications").headers[CSP_HEADER_NAME]
        origins = set(re.findall(r"https://[^\s;]+", value))
        assert origins == set(CspPolicy("https://localhost:8443").origins)
        assert len(origins) == 6


class TestRouteSurface:
    def test_route_table_is_exactly_the_contract(self, app):
        assert route_table(app) == SPECIFIED_ROUTES

    def test_no_telemetry_route_names(self, app):
        pattern = re.compile(r"(run|telemetry|metric|track|analytic|report)", re.IGNORECASE)
        for route in app.routes:
            assert not pattern.search(route.path), route.path

    def test_all_routes_carry_csp(self, client, store, seeded):
        # touch every mounted route once (success or error, either is fine)
        headers = register_and_login(client, "probe", "pw")
        grant(store, "probe", "can_publish_app")
        grant(store, "probe", "can_upload_data")
        blob = sealing.seal(b"x", "f", "pw").to_bytes()
        calls = [
            ("GET", "/applications", {}),
            ("POST", "/applications", {"json": valid_document(), "headers": headers}),
            ("GET", "/applications/Demo/1.0.0", {}),
            ("GET", "/applications/Demo/1.0.0/source", {}),
            ("POST", "/auth/register", {"json": {"handle": "n", "password": "p"}}),
            ("POST", "/auth/login", {"json": {"handle": "probe", "password": "pw"}}),
            ("POST", "/auth/logout", {"headers": headers}),
            ("POST", "/share", {"content": blob, "headers": headers}),
            ("GET", "/share/sometoken", {}),
            ("POST", "/data", {"json": {"name": "d", "description": "d", "content_b64": "eA=="}, "headers": headers}),
            ("GET", "/data", {}),
            ("GET", "/data/someid", {}),
        ]
        exercised = set()
        for method, path, kwargs in calls:
            response = client.request(method, path, **kwargs)
            assert response.headers.get(CSP_HEADER_NAME) == GOLDEN_CSP, (method, path)
            exercised.add((method, re.sub(r"/(sometoken|someid|Demo/1\.0\.0.*)$", "", path)))
        # every specified route shape was hit
        assert len(calls) == len(SPECIFIED_ROUTES)
