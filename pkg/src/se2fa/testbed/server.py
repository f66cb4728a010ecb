"""HTTP server wrapper around TargetApp instances."""

from __future__ import annotations

import ssl
import tempfile
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable

from .app import TargetApp
from .config import TargetConfig

__all__ = ["PortInUse", "ServiceHandle", "serve_target", "serve_matrix"]


class PortInUse(OSError):
    pass


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    app: TargetApp  # set on the subclass created per server

    def _dispatch(self) -> None:
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length) if length else b""
        headers = {key: value for key, value in self.headers.items()}
        status, response_headers, payload = self.app.handle(
            self.command,
            self.path,
            headers,
            body,
            client_ip=self.client_address[0],
        )
        self.send_response(status)
        for key, value in response_headers:
            self.send_header(key, value)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    do_GET = _dispatch
    do_POST = _dispatch

    def log_message(self, *args) -> None:  # keep test output quiet
        pass


class ServiceHandle:
    """A running mock target; stop() shuts the listener down."""

    def __init__(self, app: TargetApp, server: ThreadingHTTPServer, scheme: str):
        self.app = app
        self.server = server
        self.scheme = scheme
        self.thread = threading.Thread(target=server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def port(self) -> int:
        return self.server.server_address[1]

    @property
    def base_url(self) -> str:
        return f"{self.scheme}://127.0.0.1:{self.port}"

    def stop(self) -> None:
        self.server.shutdown()
        self.server.server_close()
        self.thread.join(timeout=5)

    def __enter__(self) -> "ServiceHandle":
        return self

    def __exit__(self, *exc_info) -> None:
        self.stop()


def serve_target(
    config: TargetConfig,
    port: int = 0,
    clock: Callable[[], float] = time.time,
    expose_truth: bool = False,
    tls: bool = False,
) -> ServiceHandle:
    """Start one mock service; port 0 picks a free port."""
    app = TargetApp(config, clock=clock, expose_truth=expose_truth)
    handler = type("BoundHandler", (_Handler,), {"app": app})
    try:
        server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    except OSError as exc:
        raise PortInUse(f"cannot bind port {port}: {exc}") from exc
    scheme = "http"
    if tls:
        context = ssl.SSLContext(ssl.PROTOCOL_TLS_SERVER)
        cert_path, key_path = _ephemeral_certificate()
        context.load_cert_chain(cert_path, key_path)
        server.socket = context.wrap_socket(server.socket, server_side=True)
        scheme = "https"
    return ServiceHandle(app=app, server=server, scheme=scheme)


def serve_matrix(
    configs: list[TargetConfig],
    base_port: int,
    clock: Callable[[], float] = time.time,
    expose_truth: bool = False,
    tls: bool = False,
) -> list[ServiceHandle]:
    """Serve each config on consecutive ports starting at base_port."""
    handles: list[ServiceHandle] = []
    try:
        for offset, config in enumerate(configs):
            handles.append(
                serve_target(
                    config,
                    port=base_port + offset,
                    clock=clock,
                    expose_truth=expose_truth,
                    tls=tls,
                )
            )
    except PortInUse:
        for handle in handles:
            handle.stop()
        raise
    return handles


def _ephemeral_certificate() -> tuple[str, str]:
    """Self-signed localhost certificate for header-realism TLS runs."""
    from datetime import datetime, timedelta, timezone

    from cryptography import x509
    from cryptography.hazmat.primitives import hashes, serialization
    from cryptography.hazmat.primitives.asymmetric import rsa
    from cryptography.x509.oid import NameOID

    key = rsa.generate_private_key(public_exponent=65537, key_size=2048)
    name = x509.Name([x509.NameAttribute(NameOID.COMMON_NAME, "127.0.0.1")])
    now = datetime.now(timezone.utc)
    cert = (
        x509.CertificateBuilder()
        .subject_name(name)
        .issuer_name(name)
        .public_key(key.public_key())
        .serial_number(x509.random_serial_number())
        .not_valid_before(now - timedelta(minutes=5))
        .not_valid_after(now + timedelta(days=7))
        .add_extension(
            x509.SubjectAlternativeName([x509.DNSName("localhost")]), critical=False
        )
        .sign(key, hashes.SHA256())
    )
    cert_file = tempfile.NamedTemporaryFile(suffix=".pem", delete=False)
    cert_file.write(cert.public_bytes(serialization.Encoding.PEM))
    cert_file.close()
    key_file = tempfile.NamedTemporaryFile(suffix=".pem", delete=False)
    key_file.write(
        key.private_bytes(
            serialization.Encoding.PEM,
            serialization.PrivateFormat.TraditionalOpenSSL,
            serialization.NoEncryption(),
        )
    )
    key_file.close()
    return cert_file.name, key_file.name
