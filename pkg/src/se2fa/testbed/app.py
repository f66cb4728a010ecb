"""Mock 2FA service with configurable risk controls and planted flaws.

One TargetApp instance is one simulated website. It speaks a small JSON
protocol (/login, /2fa, /account, /logout) plus test hooks
(/__notifications, /__ground_truth, /__reset). The app is transport
agnostic: ``handle()`` takes a parsed request and returns a response
triple, so it can sit behind a real HTTP server or be called in-process.

Trust is conjunctive: every configured risk control must pass before the
2FA prompt is suppressed. Trust-cookie values are produced per the
configured scheme; the schemes with planted flaws (fixed, shared,
timestamp, base64 profile) validate values the same forgiving way a
carelessly built production service would.
"""

from __future__ import annotations

import base64
import hashlib
import hmac
import json
import re
import secrets
import threading
import time
from dataclasses import dataclass, field
from typing import Callable
from urllib.parse import parse_qs, urlsplit

from ..totp import totp_code
from .config import TargetConfig, TrustCookieSpec

__all__ = ["TargetApp", "NotificationRecord"]

Clock = Callable[[], float]

_TIMESTAMP_SKEW_SECONDS = 60
_DEFAULT_TRUST_WINDOW = 30 * 86400


@dataclass(frozen=True)
class NotificationRecord:
    """One simulated alert to the account owner (email stand-in)."""

    account: str
    type: str  # configured N1..N6
    kind: str  # observable record shape, e.g. "new-device"
    at: float
    detail: dict

    def to_json(self) -> dict:
        return {
            "account": self.account,
            "kind": self.kind,
            "at": self.at,
            "detail": self.detail,
        }


@dataclass
class _AccountState:
    issued_cookie_values: dict[str, set[str]] = field(default_factory=dict)
    trusted_fingerprints: set[str] = field(default_factory=set)
    trusted_ips: set[str] = field(default_factory=set)
    device_tokens: set[str] = field(default_factory=set)
    consumed_codes: set[tuple[int, str]] = field(default_factory=set)
    seen_fingerprints: set[str] = field(default_factory=set)
    seen_ips: set[str] = field(default_factory=set)


@dataclass
class _Session:
    username: str
    authenticated: bool = False
    pending_2fa: bool = False


class TargetApp:
    def __init__(
        self,
        config: TargetConfig,
        clock: Clock = time.time,
        expose_truth: bool = False,
    ):
        config.validate()
        self.config = config
        self.clock = clock
        self.expose_truth = expose_truth
        # Key material survives /__reset: resetting account state models a
        # fresh test account, not a redeployment of the service.
        self._service_secret = secrets.token_bytes(32)
        self._lock = threading.RLock()
        self._reset_state()

    def _reset_state(self) -> None:
        self._accounts = {a.username: _AccountState() for a in self.config.accounts}
        self._sessions: dict[str, _Session] = {}
        self.notifications: list[NotificationRecord] = []

    # -- request plumbing ----------------------------------------------------

    def handle(
        self,
        method: str,
        path: str,
        headers: dict[str, str],
        body: bytes,
        client_ip: str = "127.0.0.1",
    ) -> tuple[int, list[tuple[str, str]], bytes]:
        parts = urlsplit(path)
        route = (method.upper(), parts.path)
        query = parse_qs(parts.query)
        lowered = {k.lower(): v for k, v in headers.items()}
        ip = lowered.get("x-forwarded-for", client_ip).split(",")[0].strip()
        fingerprint = lowered.get("x-device-fingerprint", "")
        device_token = lowered.get("x-device-token", "")
        cookies = _parse_cookie_header(lowered.get("cookie", ""))
        payload = _parse_json(body)

        with self._lock:
            if route == ("POST", "/login"):
                return self._login(payload, cookies, fingerprint, ip, device_token)
            if route == ("POST", "/2fa"):
                return self._second_factor(payload, cookies, fingerprint, ip)
            if route == ("GET", "/account"):
                return self._account(cookies)
            if route == ("POST", "/logout"):
                return self._logout(cookies)
            if route == ("GET", "/__notifications"):
                return self._notifications_hook(query)
            if route == ("GET", "/__ground_truth"):
                return self._ground_truth_hook()
            if route == ("POST", "/__reset"):
                self._reset_state()
                return _json_response(200, {"status": "ok"})
        return _json_response(404, {"status": "not-found"})

    # -- endpoint handlers ---------------------------------------------------

    def _login(
        self,
        payload: dict,
        cookies: dict[str, str],
        fingerprint: str,
        ip: str,
        device_token: str,
    ) -> tuple[int, list[tuple[str, str]], bytes]:
        username = payload.get("username")
        password = payload.get("password")
        spec = self.config.account(username) if isinstance(username, str) else None
        if spec is None or not isinstance(password, str):
            return _json_response(401, {"status": "invalid-credentials"})
        digest = hashlib.sha256(password.encode("utf-8")).hexdigest()
        if not hmac.compare_digest(digest, spec.password_hash):
            return _json_response(401, {"status": "invalid-credentials"})

        state = self._accounts[username]
        if self.config.notification == "N3" and ip not in state.seen_ips:
            self.record_notification(username, kind="abnormal-ip", detail={"ip": ip})

        if self.config.broken_2fa:
            trusted, requires2fa = True, False
        else:
            trusted = self.evaluate_trust(username, cookies, fingerprint, ip, device_token)[0]
            requires2fa = not trusted

        sid = secrets.token_hex(16)
        self._sessions[sid] = _Session(
            username=username, authenticated=not requires2fa, pending_2fa=requires2fa
        )
        extra_headers = [("Set-Cookie", f"sid={sid}; Path=/; HttpOnly")]
        extra_headers += self._decoy_headers()
        if not requires2fa:
            self._note_completed_login(username, fingerprint, ip)
        return _json_response(
            200, {"status": "ok", "requires2fa": requires2fa}, extra_headers
        )

    def _second_factor(
        self, payload: dict, cookies: dict[str, str], fingerprint: str, ip: str
    ) -> tuple[int, list[tuple[str, str]], bytes]:
        session = self._sessions.get(cookies.get("sid", ""))
        if session is None or not session.pending_2fa:
            return _json_response(400, {"status": "no-challenge"})
        code = payload.get("code")
        remember = bool(payload.get("rememberDevice", False))
        outcome, issued_headers, body_extra = self.verify_second_factor(
            session, code, remember, fingerprint=fingerprint, ip=ip
        )
        if outcome == "ok":
            headers = issued_headers + self._decoy_headers()
            doc = {"status": "ok"}
            doc.update(body_extra)
            return _json_response(200, doc, headers)
        return _json_response(401, {"status": outcome})

    def _account(self, cookies: dict[str, str]) -> tuple[int, list[tuple[str, str]], bytes]:
        session = self._sessions.get(cookies.get("sid", ""))
        if session is None or not session.authenticated:
            return _json_response(401, {"status": "unauthorized"})
        return _json_response(200, {"status": "ok", "username": session.username})

    def _logout(self, cookies: dict[str, str]) -> tuple[int, list[tuple[str, str]], bytes]:
        sid = cookies.get("sid", "")
        self._sessions.pop(sid, None)
        headers = [("Set-Cookie", "sid=; Path=/; Max-Age=0; HttpOnly")]
        return _json_response(200, {"status": "ok"}, headers)

    def _notifications_hook(self, query: dict) -> tuple[int, list[tuple[str, str]], bytes]:
        wanted = query.get("account", [None])[0]
        records = [
            r.to_json() for r in self.notifications if wanted is None or r.account == wanted
        ]
        return _json_response(200, {"notifications": records})

    def _ground_truth_hook(self) -> tuple[int, list[tuple[str, str]], bytes]:
        if not self.expose_truth:
            return _json_response(404, {"status": "not-found"})
        return _json_response(200, {"config": self.config.to_json()})

    # -- core service logic --------------------------------------------------

    def verify_second_factor(
        self,
        session: _Session,
        code,
        remember_device: bool,
        fingerprint: str = "",
        ip: str = "",
    ) -> tuple[str, list[tuple[str, str]], dict]:
        """Check the OTP and, when permitted, issue trust artifacts.

        Returns (outcome, set-cookie headers, extra body fields); outcome is
        "ok", "bad-code", or "replayed-code". A code is accepted at most
        once per account per window.
        """
        username = session.username
        spec = self.config.account(username)
        state = self._accounts[username]
        now = self.clock()
        seed = spec.totp_seed.encode("utf-8")

        matched_counter = None
        if isinstance(code, str):
            base_counter = int(now // 30)
            for counter in (base_counter, base_counter - 1, base_counter + 1):
                if counter >= 0 and totp_code(seed, counter * 30) == code:
                    matched_counter = counter
                    break
        if matched_counter is None:
            if self.config.notification == "N6":
                self.record_notification(
                    username, kind="bad-2fa-code", detail={"submitted": str(code)[:16]}
                )
            return "bad-code", [], {}
        if (matched_counter, code) in state.consumed_codes:
            return "replayed-code", [], {}
        state.consumed_codes.add((matched_counter, code))

        session.authenticated = True
        session.pending_2fa = False

        headers: list[tuple[str, str]] = []
        body_extra: dict = {}
        placement = self.config.remember_placement
        issue = placement == "InSettings" or (
            remember_device and placement in ("AtChallenge", "RememberMe")
        )
        if issue:
            controls = self.config.risk_controls
            if controls.cookie_based:
                for cookie_spec in self.config.trust_cookies:
                    value = self._mint_cookie_value(cookie_spec, username, code, ip, now)
                    state.issued_cookie_values.setdefault(cookie_spec.name, set()).add(value)
                    headers.append(("Set-Cookie", _render_set_cookie(cookie_spec, value)))
            if controls.fingerprint_based and fingerprint:
                state.trusted_fingerprints.add(fingerprint)
            if controls.ip_based and ip:
                state.trusted_ips.add(ip)
            if controls.device_token_based:
                token = secrets.token_hex(16)
                state.device_tokens.add(token)
                body_extra["deviceToken"] = token

        self._note_completed_login(username, fingerprint, ip)
        return "ok", headers, body_extra

    def evaluate_trust(
        self,
        username: str,
        cookies: dict[str, str],
        fingerprint: str,
        ip: str,
        device_token: str,
    ) -> tuple[bool, list[str]]:
        """All configured risk controls must pass; reasons list the failures."""
        controls = self.config.risk_controls
        state = self._accounts[username]
        reasons: list[str] = []
        if not controls.any():
            return False, ["no-risk-controls-configured"]
        if self.config.remember_placement == "None":
            return False, ["remember-device-not-offered"]
        if controls.cookie_based:
            for spec in self.config.trust_cookies:
                value = cookies.get(spec.name)
                if value is None:
                    reasons.append(f"cookie-missing:{spec.name}")
                elif not self._cookie_value_valid(spec, username, value):
                    reasons.append(f"cookie-invalid:{spec.name}")
        if controls.fingerprint_based and fingerprint not in state.trusted_fingerprints:
            reasons.append("fingerprint-unknown")
        if controls.ip_based and ip not in state.trusted_ips:
            reasons.append("ip-unknown")
        if controls.device_token_based and device_token not in state.device_tokens:
            reasons.append("device-token-unknown")
        return not reasons, reasons

    def record_notification(self, account: str, kind: str, detail: dict) -> NotificationRecord:
        record = NotificationRecord(
            account=account,
            type=self.config.notification or "",
            kind=kind,
            at=self.clock(),
            detail=detail,
        )
        self.notifications.append(record)
        return record

    def _note_completed_login(self, username: str, fingerprint: str, ip: str) -> None:
        """Mark the device as seen, alerting first if it is new."""
        state = self._accounts[username]
        notification = self.config.notification
        new_device = fingerprint not in state.seen_fingerprints
        if new_device and notification in ("N1", "N2", "N4", "N5"):
            if notification == "N1":
                self.record_notification(username, kind="new-device", detail={})
            elif notification == "N2":
                self.record_notification(
                    username,
                    kind="new-device",
                    detail={"time": self.clock(), "location": f"geo:{ip}"},
                )
            elif notification == "N4":
                self.record_notification(
                    username, kind="suspicious-login-verification", detail={}
                )
            else:
                self.record_notification(username, kind="password-reset", detail={})
        if fingerprint:
            state.seen_fingerprints.add(fingerprint)
        if ip:
            state.seen_ips.add(ip)

    # -- trust-cookie value schemes -------------------------------------------

    def _derived_value(self, label: str) -> str:
        return hmac.new(self._service_secret, label.encode("utf-8"), hashlib.sha256).hexdigest()[:32]

    def _mint_cookie_value(
        self, spec: TrustCookieSpec, username: str, code: str, ip: str, now: float
    ) -> str:
        scheme = spec.value_scheme
        if scheme == "Random128":
            return secrets.token_hex(16)
        if scheme == "FixedPerAccount":
            return self._derived_value(f"fixed|{username}|{spec.name}")
        if scheme == "GlobalShared":
            return self._derived_value(f"shared|{spec.name}")
        if scheme == "TimestampSeconds":
            return str(int(now))
        if scheme == "TimestampMillis":
            return str(int(now * 1000))
        if scheme == "Base64Profile":
            day = time.strftime("%Y-%m-%d", time.gmtime(now))
            profile = {"ip": ip or "0.0.0.0", "date": day, "otp": code}
            return base64.b64encode(json.dumps(profile).encode("utf-8")).decode("ascii")
        raise AssertionError(f"unhandled scheme {scheme}")

    def _cookie_value_valid(self, spec: TrustCookieSpec, username: str, value: str) -> bool:
        scheme = spec.value_scheme
        state = self._accounts[username]
        now = self.clock()
        window = spec.max_age_seconds or _DEFAULT_TRUST_WINDOW
        if scheme == "Random128":
            return value in state.issued_cookie_values.get(spec.name, set())
        if scheme == "FixedPerAccount":
            return hmac.compare_digest(value, self._derived_value(f"fixed|{username}|{spec.name}"))
        if scheme == "GlobalShared":
            return hmac.compare_digest(value, self._derived_value(f"shared|{spec.name}"))
        if scheme == "TimestampSeconds":
            if not re.fullmatch(r"\d{1,12}", value):
                return False
            stamp = int(value)
            return stamp <= now + _TIMESTAMP_SKEW_SECONDS and now - stamp <= window
        if scheme == "TimestampMillis":
            if not re.fullmatch(r"\d{1,15}", value):
                return False
            stamp = int(value) / 1000.0
            return stamp <= now + _TIMESTAMP_SKEW_SECONDS and now - stamp <= window
        if scheme == "Base64Profile":
            try:
                decoded = base64.b64decode(value.encode("ascii"), validate=True)
                doc = json.loads(decoded.decode("utf-8"))
            except Exception:
                return False
            if not (isinstance(doc, dict) and {"ip", "date", "otp"} <= set(doc)):
                return False
            # The profile is bound to the account through the OTP it was
            # minted with; another account's profile will not validate.
            spent = {code for _, code in state.consumed_codes}
            return doc.get("otp") in spent
        return False

    def _decoy_headers(self) -> list[tuple[str, str]]:
        return [
            ("Set-Cookie", f"pref{i + 1}={secrets.token_hex(8)}; Path=/")
            for i in range(self.config.decoy_cookies)
        ]


def _render_set_cookie(spec: TrustCookieSpec, value: str) -> str:
    parts = [f"{spec.name}={value}", "Path=/"]
    if spec.max_age_seconds is not None:
        parts.append(f"Max-Age={spec.max_age_seconds}")
    if spec.secure:
        parts.append("Secure")
    if spec.http_only:
        parts.append("HttpOnly")
    return "; ".join(parts)


def _parse_cookie_header(header: str) -> dict[str, str]:
    cookies: dict[str, str] = {}
    for chunk in header.split(";"):
        name, sep, value = chunk.partition("=")
        if sep:
            cookies[name.strip()] = value.strip()
    return cookies


def _parse_json(body: bytes) -> dict:
    if not body:
        return {}
    try:
        doc = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        return {}
    return doc if isinstance(doc, dict) else {}


def _json_response(
    status: int, doc: dict, extra_headers: list[tuple[str, str]] | None = None
) -> tuple[int, list[tuple[str, str]], bytes]:
    body = json.dumps(doc).encode("utf-8")
    headers = [("Content-Type", "application/json")]
    headers += extra_headers or []
    return status, headers, body
