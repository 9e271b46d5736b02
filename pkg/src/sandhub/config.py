"""Server configuration, sourced from SANDHUB_* environment variables."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping


@dataclass(frozen=True)
class ServerConfig:
    bind_host: str = "127.0.0.1"
    bind_port: int = 8080
    public_origin: str = "https://localhost:8443"
    storage_path: str = "sandhub.db"
    share_ttl_hours: float = 168.0
    session_ttl_hours: float = 24.0
    share_rate_limit_per_minute: int = 30

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None) -> "ServerConfig":
        env = os.environ if env is None else env
        base = cls()
        return cls(
            bind_host=env.get("SANDHUB_BIND_HOST", base.bind_host),
            bind_port=int(env.get("SANDHUB_BIND_PORT", base.bind_port)),
            public_origin=env.get("SANDHUB_PUBLIC_ORIGIN", base.public_origin),
            storage_path=env.get("SANDHUB_STORAGE_PATH", base.storage_path),
            share_ttl_hours=float(env.get("SANDHUB_SHARE_TTL_HOURS", base.share_ttl_hours)),
            session_ttl_hours=float(env.get("SANDHUB_SESSION_TTL_HOURS", base.session_ttl_hours)),
            share_rate_limit_per_minute=int(
                env.get("SANDHUB_SHARE_RATE_LIMIT_PER_MINUTE", base.share_rate_limit_per_minute)
            ),
        )
