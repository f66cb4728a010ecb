"""HTTP transport seam: real sockets or in-process dispatch to a testbed app.

The flow driver never talks to a socket directly; it issues requests
through a transport so heavy test suites (isolation sweeps, fuzz batteries)
can run against in-process target apps while the CLI exercises the same
code over real HTTP.
"""

from __future__ import annotations

import json
import ssl
from dataclasses import dataclass
from http.client import HTTPConnection, HTTPSConnection, HTTPException
from typing import Mapping, Protocol
from urllib.parse import urlsplit

__all__ = [
    "HttpResponse",
    "Transport",
    "TransportError",
    "HttpTransport",
    "InProcessTransport",
]


class TransportError(OSError):
    """Connection-level failure (target unreachable, TLS error, timeout)."""


@dataclass(frozen=True)
class HttpResponse:
    status: int
    headers: tuple[tuple[str, str], ...]
    body: bytes

    def header_values(self, name: str) -> list[str]:
        wanted = name.lower()
        return [value for key, value in self.headers if key.lower() == wanted]

    def first_header(self, name: str) -> str | None:
        values = self.header_values(name)
        return values[0] if values else None

    def json(self):
        try:
            return json.loads(self.body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            return None


class Transport(Protocol):
    def request(
        self,
        method: str,
        url: str,
        headers: Mapping[str, str],
        body: bytes | None = None,
    ) -> HttpResponse: ...


class HttpTransport:
    """Socket transport on http.client; one connection per request."""

    def __init__(self, timeout: float = 10.0, verify_tls: bool = True):
        self.timeout = timeout
        self.verify_tls = verify_tls

    def request(
        self,
        method: str,
        url: str,
        headers: Mapping[str, str],
        body: bytes | None = None,
    ) -> HttpResponse:
        parts = urlsplit(url)
        if parts.scheme not in ("http", "https"):
            raise TransportError(f"unsupported URL scheme {parts.scheme!r}")
        host = parts.hostname or ""
        path = parts.path or "/"
        if parts.query:
            path = f"{path}?{parts.query}"
        if parts.scheme == "https":
            context = None if self.verify_tls else ssl._create_unverified_context()
            conn = HTTPSConnection(host, parts.port or 443, timeout=self.timeout, context=context)
        else:
            conn = HTTPConnection(host, parts.port or 80, timeout=self.timeout)
        try:
            conn.request(method, path, body=body, headers=dict(headers))
            raw = conn.getresponse()
            payload = raw.read()
            header_pairs = tuple((k, v) for k, v in raw.getheaders())
            return HttpResponse(status=raw.status, headers=header_pairs, body=payload)
        except (OSError, HTTPException) as exc:
            raise TransportError(f"{method} {url}: {exc}") from exc
        finally:
            conn.close()


class InProcessTransport:
    """Dispatches requests straight to registered target apps by netloc.

    Apps must expose ``handle(method, path, headers, body, client_ip)``
    returning (status, header pairs, body bytes) -- the same contract the
    socket server adapter uses.
    """

    def __init__(self, apps: Mapping[str, object] | None = None, client_ip: str = "127.0.0.1"):
        self._apps = dict(apps or {})
        self.client_ip = client_ip

    def register(self, netloc: str, app) -> None:
        self._apps[netloc] = app

    def request(
        self,
        method: str,
        url: str,
        headers: Mapping[str, str],
        body: bytes | None = None,
    ) -> HttpResponse:
        parts = urlsplit(url)
        app = self._apps.get(parts.netloc)
        if app is None:
            raise TransportError(f"no in-process app registered for {parts.netloc!r}")
        path = parts.path or "/"
        if parts.query:
            path = f"{path}?{parts.query}"
        status, header_pairs, payload = app.handle(
            method, path, dict(headers), body or b"", client_ip=self.client_ip
        )
        return HttpResponse(status=status, headers=tuple(header_pairs), body=payload)
