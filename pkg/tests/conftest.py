from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from sandhub.config import ServerConfig
from sandhub.server import create_app
from sandhub.store import Store


class FakeClock:
    """Injectable clock; tests advance it to cross TTL boundaries."""

    def __init__(self, start: float = 1_700_000_000.0):
        self.now = start

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: float) -> None:
        self.now += seconds


@pytest.fixture
def clock() -> FakeClock:
    return FakeClock()


@pytest.fixture
def store(clock: FakeClock) -> Store:
    s = Store(":memory:", clock=clock)
    yield s
    s.close()


@pytest.fixture
def server_config() -> ServerConfig:
    return ServerConfig(public_origin="https://localhost:8443")


@pytest.fixture
def app(server_config: ServerConfig, store: Store):
    return create_app(server_config, store)


@pytest.fixture
def client(app) -> TestClient:
    with TestClient(app) as c:
        yield c


def register_and_login(client: TestClient, handle: str = "dev", password: str = "hunter22") -> dict:
    """Returns Authorization headers for a fresh account."""
    response = client.post("/auth/register", json={"handle": handle, "password": password})
    assert response.status_code == 201, response.text
    response = client.post("/auth/login", json={"handle": handle, "password": password})
    assert response.status_code == 200, response.text
    return {"Authorization": f"Bearer {response.json()['token']}"}
