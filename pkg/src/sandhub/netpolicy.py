"""The egress whitelist: the only network origins sandboxed applications may touch.

One list drives everything — the Content-Security-Policy header the server
attaches to every response, and the origin check applied to URL-hosted
application sources at publish time.
"""

from __future__ import annotations

from dataclasses import dataclass
from urllib.parse import urlsplit

# Interpreter runtimes, their package indexes, and hosted application sources.
# Order is part of the deterministic header serialization.
EXTERNAL_ORIGINS = (
    "https://*.r-wasm.org",
    "https://cdn.jsdelivr.net",
    "https://pypi.org",
    "https://files.pythonhosted.org",
    "https://raw.githubusercontent.com",
)

CSP_HEADER_NAME = "Content-Security-Policy"


def url_origin(url: str) -> str:
    """Extract scheme://host[:port] from a URL, lowercased."""
    parts = urlsplit(url)
    if not parts.scheme or not parts.netloc:
        raise ValueError(f"not an absolute URL: {url!r}")
    return f"{parts.scheme.lower()}://{parts.netloc.lower()}"


def origin_matches(origin: str, pattern: str) -> bool:
    """Match an origin against a whitelist pattern.

    ``https://*.example.org`` matches any subdomain of example.org but not
    the apex, mirroring CSP host-wildcard semantics.
    """
    origin = origin.lower()
    pattern = pattern.lower()
    p_scheme, sep, p_host = pattern.partition("://")
    if not sep:
        return False
    o_scheme, sep, o_host = origin.partition("://")
    if not sep or o_scheme != p_scheme:
        return False
    if p_host == "*":
        return True
    if p_host.startswith("*."):
        return o_host.endswith(p_host[1:])
    return o_host == p_host


def origin_allowed(url: str, patterns: tuple[str, ...] | list[str]) -> bool:
    try:
        origin = url_origin(url)
    except ValueError:
        return False
    return any(origin_matches(origin, p) for p in patterns)


@dataclass(frozen=True)
class CspPolicy:
    """The fixed whitelist plus the deployment's own origin."""

    own_origin: str

    @property
    def origins(self) -> tuple[str, ...]:
        return (self.own_origin, *EXTERNAL_ORIGINS)

    def header_value(self) -> str:
        sources = " ".join(self.origins)
        # 'unsafe-eval' lets the WASM interpreters instantiate; 'unsafe-inline'
        # styles let application HTML output render. Both are keywords, not
        # origins; the origin list itself stays exactly the six above.
        return (
            "default-src 'self'; "
            f"connect-src {sources}; "
            f"script-src {sources} 'unsafe-eval'; "
            f"style-src {sources} 'unsafe-inline'"
        )


def csp_header(policy: CspPolicy) -> tuple[str, str]:
    """(header name, header value) for attaching to every response."""
    return (CSP_HEADER_NAME, policy.header_value())
