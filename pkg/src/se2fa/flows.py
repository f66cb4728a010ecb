"""Scripted login/2FA flow execution from a simulated device environment.

A flow is a sequence of steps (login, solve the challenge, snapshot the
jar, clear data, ...) executed over HTTP against one target. The simulated
device carries a mutable cookie jar, a fingerprint token, a simulated
source IP, and a localStorage-style device-token store; the three
non-cookie factors travel as the X-Device-Fingerprint / X-Forwarded-For /
X-Device-Token request headers.

The clock is injectable so challenge codes, cookie expiry, and
timestamp-scheme analysis are all deterministic under test.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence
from urllib.parse import urlsplit

from .cookies import (
    CookieKey,
    CookieRecord,
    CookieSnapshot,
    domain_matches,
    parse_set_cookie,
    path_matches,
    utc_from_epoch,
)
from .totp import totp_code
from .transport import HttpResponse, HttpTransport, Transport, TransportError

__all__ = [
    "FlowError",
    "TargetUnreachable",
    "AuthFailed",
    "ChallengeFailed",
    "ScriptInvalid",
    "AmbiguousPrompt",
    "FlowAssertionError",
    "Account",
    "load_credentials",
    "CookieJar",
    "SessionEnv",
    "Login",
    "Solve2FA",
    "Logout",
    "ClearAll",
    "Snapshot",
    "ImportCookies",
    "ToggleMask",
    "AssertPrompt",
    "FlowScript",
    "load_flow_script",
    "TargetProfile",
    "load_target_profile",
    "RequestTrace",
    "FlowResult",
    "detect_2fa_prompt",
    "execute_flow",
    "fetch_account_status",
]

Clock = Callable[[], float]


class FlowError(Exception):
    """Base class for flow execution errors."""


class TargetUnreachable(FlowError):
    pass


class AuthFailed(FlowError):
    def __init__(self, step_index: int, message: str = "login rejected"):
        super().__init__(f"step {step_index}: {message}")
        self.step_index = step_index


class ChallengeFailed(FlowError):
    def __init__(self, step_index: int, message: str = "challenge rejected"):
        super().__init__(f"step {step_index}: {message}")
        self.step_index = step_index


class ScriptInvalid(FlowError):
    pass


class AmbiguousPrompt(FlowError):
    """Challenge matcher produced no usable signal for a response."""


class FlowAssertionError(FlowError):
    """An AssertPrompt step observed the opposite of its expectation."""


@dataclass(frozen=True)
class Account:
    username: str
    password: str
    totp_seed: str

    @property
    def seed_bytes(self) -> bytes:
        return self.totp_seed.encode("utf-8")


def load_credentials(path: str | Path) -> Account:
    """Read a credentials file: {"username", "password", "totpSeed"}."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        return Account(
            username=doc["username"],
            password=doc["password"],
            totp_seed=doc["totpSeed"],
        )
    except KeyError as exc:
        raise ScriptInvalid(f"credentials file missing field {exc}") from exc


class CookieJar:
    """Mutable per-device cookie store keyed by (name, domain, path).

    Expired cookies are purged whenever the jar is read, and a record with
    secure=True is never produced for a request when the environment is not
    a secure context.
    """

    def __init__(self) -> None:
        self._records: dict[CookieKey, CookieRecord] = {}

    def __len__(self) -> int:
        return len(self._records)

    def records(self) -> tuple[CookieRecord, ...]:
        return tuple(
            sorted(self._records.values(), key=lambda r: (r.domain, r.path, r.name))
        )

    def store(self, record: CookieRecord) -> None:
        # A Set-Cookie that is already expired deletes the matching record.
        if record.expires_at is not None and record.expires_at <= record.created_at:
            self._records.pop(record.key, None)
        else:
            self._records[record.key] = record

    def set_from_header(
        self, header: str, origin: tuple[str, str, str], now: float
    ) -> CookieRecord | None:
        try:
            record = parse_set_cookie(header, origin, now)
        except Exception:
            return None
        self.store(record)
        return record

    def purge_expired(self, now: float) -> None:
        cutoff = utc_from_epoch(now)
        stale = [
            key
            for key, record in self._records.items()
            if record.expires_at is not None and record.expires_at <= cutoff
        ]
        for key in stale:
            del self._records[key]

    def cookies_for_request(
        self, host: str, path: str, now: float, secure_context: bool
    ) -> tuple[CookieRecord, ...]:
        self.purge_expired(now)
        matching = [
            record
            for record in self._records.values()
            if domain_matches(host, record.domain)
            and path_matches(path, record.path)
            and (secure_context or not record.secure)
        ]
        return tuple(sorted(matching, key=lambda r: (r.domain, r.path, r.name)))

    def snapshot(self, label: str, now: float) -> CookieSnapshot:
        self.purge_expired(now)
        return CookieSnapshot(
            label=label, taken_at=utc_from_epoch(now), cookies=self.records()
        )

    def import_records(self, records: Iterable[CookieRecord]) -> None:
        for record in records:
            self._records[record.key] = record

    def apply_mask(self, enabled: Iterable[CookieKey]) -> None:
        enabled_set = {tuple(key) for key in enabled}
        self._records = {
            key: record for key, record in self._records.items() if key in enabled_set
        }

    def clear(self) -> None:
        self._records.clear()


@dataclass
class SessionEnv:
    """One simulated device: jar + fingerprint + IP + device-token store.

    An environment is confined to one logical flow at a time; spin up a
    fresh one per trial rather than sharing.
    """

    fingerprint: str
    simulated_ip: str
    jar: CookieJar = field(default_factory=CookieJar)
    device_tokens: dict[str, str] = field(default_factory=dict)
    secure_context: bool = True
    clock: Clock = time.time

    def clear_browser_data(self) -> None:
        self.jar.clear()
        self.device_tokens.clear()


# --- Flow steps -------------------------------------------------------------


@dataclass(frozen=True)
class Login:
    username: str | None = None
    password: str | None = None


@dataclass(frozen=True)
class Solve2FA:
    remember_device: bool = False


@dataclass(frozen=True)
class Logout:
    pass


@dataclass(frozen=True)
class ClearAll:
    pass


@dataclass(frozen=True)
class Snapshot:
    label: str


@dataclass(frozen=True)
class ImportCookies:
    snapshot: CookieSnapshot


@dataclass(frozen=True)
class ToggleMask:
    enabled: tuple[CookieKey, ...]


@dataclass(frozen=True)
class AssertPrompt:
    expected: bool


FlowStep = (
    Login | Solve2FA | Logout | ClearAll | Snapshot | ImportCookies | ToggleMask | AssertPrompt
)


@dataclass(frozen=True)
class FlowScript:
    steps: tuple[FlowStep, ...]

    def validate(self) -> None:
        seen_login = False
        labels: set[str] = set()
        for index, step in enumerate(self.steps):
            if isinstance(step, Login):
                seen_login = True
            elif isinstance(step, Solve2FA) and not seen_login:
                raise ScriptInvalid(f"step {index}: solve2fa before any login")
            elif isinstance(step, Snapshot):
                if step.label in labels:
                    raise ScriptInvalid(f"step {index}: duplicate snapshot label {step.label!r}")
                labels.add(step.label)


def load_flow_script(path: str | Path) -> FlowScript:
    """Read a flow script file: {"steps": [{"action": ...}, ...]}.

    ``importCookies`` steps reference snapshot files by path, resolved
    relative to the script file.
    """
    script_path = Path(path)
    doc = json.loads(script_path.read_text(encoding="utf-8"))
    raw_steps = doc.get("steps")
    if not isinstance(raw_steps, list):
        raise ScriptInvalid("flow script must contain a 'steps' array")
    steps: list[FlowStep] = []
    for index, entry in enumerate(raw_steps):
        if not isinstance(entry, dict) or "action" not in entry:
            raise ScriptInvalid(f"step {index}: each step needs an 'action'")
        action = entry["action"]
        if action == "login":
            steps.append(Login(entry.get("username"), entry.get("password")))
        elif action == "solve2fa":
            steps.append(Solve2FA(bool(entry.get("rememberDevice", False))))
        elif action == "logout":
            steps.append(Logout())
        elif action == "clearAll":
            steps.append(ClearAll())
        elif action == "snapshot":
            if not isinstance(entry.get("label"), str):
                raise ScriptInvalid(f"step {index}: snapshot needs a string 'label'")
            steps.append(Snapshot(entry["label"]))
        elif action == "toggleMask":
            keys = entry.get("enabled")
            if not isinstance(keys, list):
                raise ScriptInvalid(f"step {index}: toggleMask needs 'enabled' keys")
            steps.append(
                ToggleMask(tuple((k["name"], k["domain"], k["path"]) for k in keys))
            )
        elif action == "importCookies":
            raw = entry.get("path")
            if not isinstance(raw, str):
                raise ScriptInvalid(f"step {index}: importCookies needs a snapshot 'path'")
            snapshot_path = Path(raw)
            if not snapshot_path.is_absolute():
                snapshot_path = script_path.parent / snapshot_path
            from .cookies import parse_snapshot

            try:
                loaded = parse_snapshot(snapshot_path.read_bytes())
            except (OSError, ValueError) as exc:
                raise ScriptInvalid(f"step {index}: cannot load snapshot: {exc}") from exc
            steps.append(ImportCookies(loaded))
        elif action == "assertPrompt":
            steps.append(AssertPrompt(bool(entry.get("expected"))))
        else:
            raise ScriptInvalid(f"step {index}: unknown action {action!r}")
    script = FlowScript(steps=tuple(steps))
    script.validate()
    return script


# --- Challenge detection ----------------------------------------------------


@dataclass(frozen=True)
class TargetProfile:
    """Challenge matcher for targets that do not speak the testbed protocol."""

    login_url: str | None = None
    positive_patterns: tuple[str, ...] = ()
    negative_patterns: tuple[str, ...] = ()
    positive_statuses: tuple[int, ...] = ()


def load_target_profile(path: str | Path) -> TargetProfile:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    matcher = doc.get("challengeMatcher", {})
    return TargetProfile(
        login_url=doc.get("loginUrl"),
        positive_patterns=tuple(matcher.get("positivePatterns", ())),
        negative_patterns=tuple(matcher.get("negativePatterns", ())),
        positive_statuses=tuple(matcher.get("statusCodes", ())),
    )


def detect_2fa_prompt(response: HttpResponse, profile: TargetProfile | None = None) -> bool:
    """Decide whether a login response is challenging for a second factor.

    Without a profile the machine-readable marker is used: a JSON body with
    a boolean ``requires2fa`` field. With a profile, positive/negative body
    patterns (and optional status codes) decide; if both or neither side
    matches the signal is unusable and AmbiguousPrompt is raised.
    """
    if profile is None:
        doc = response.json()
        if isinstance(doc, dict) and isinstance(doc.get("requires2fa"), bool):
            return doc["requires2fa"]
        raise AmbiguousPrompt("response carries no requires2fa marker")
    body = response.body.decode("utf-8", errors="replace")
    positive = response.status in profile.positive_statuses or any(
        re.search(p, body) for p in profile.positive_patterns
    )
    negative = any(re.search(p, body) for p in profile.negative_patterns)
    if positive == negative:
        raise AmbiguousPrompt("challenge matcher positive/negative patterns disagree")
    return positive


# --- Execution --------------------------------------------------------------


@dataclass(frozen=True)
class RequestTrace:
    method: str
    url: str
    cookies_sent: tuple[CookieRecord, ...]
    status: int
    set_cookie_headers: tuple[str, ...]


@dataclass
class FlowResult:
    snapshots: dict[str, CookieSnapshot]
    prompts: tuple[tuple[int, bool], ...]
    final_authenticated: bool
    http_trace: tuple[RequestTrace, ...]

    def prompt_flags(self) -> tuple[bool, ...]:
        return tuple(flag for _, flag in self.prompts)


MAX_REDIRECTS = 10


class _FlowDriver:
    def __init__(
        self,
        env: SessionEnv,
        target: str,
        account: Account,
        transport: Transport,
        profile: TargetProfile | None,
    ):
        self.env = env
        self.target = target.rstrip("/")
        self.account = account
        self.transport = transport
        self.profile = profile
        parts = urlsplit(self.target)
        if not parts.scheme or not parts.netloc:
            raise ScriptInvalid(f"target must be an absolute URL, got {target!r}")
        self.netloc = parts.netloc
        self.host = parts.hostname or ""
        self.trace: list[RequestTrace] = []
        self._last_codes: dict[tuple[str, str], str] = {}

    def request(self, method: str, path: str, payload: dict | None = None) -> HttpResponse:
        url = self.target + path
        body = None if payload is None else json.dumps(payload).encode("utf-8")
        response: HttpResponse | None = None
        for _ in range(MAX_REDIRECTS + 1):
            now = self.env.clock()
            parts = urlsplit(url)
            cookies = self.env.jar.cookies_for_request(
                parts.hostname or "", parts.path or "/", now, self.env.secure_context
            )
            headers = {
                "Content-Type": "application/json",
                "X-Device-Fingerprint": self.env.fingerprint,
                "X-Forwarded-For": self.env.simulated_ip,
            }
            token = self.env.device_tokens.get(self.netloc)
            if token:
                headers["X-Device-Token"] = token
            if cookies:
                headers["Cookie"] = "; ".join(f"{c.name}={c.value}" for c in cookies)
            try:
                response = self.transport.request(method, url, headers, body)
            except TransportError as exc:
                raise TargetUnreachable(str(exc)) from exc
            set_cookies = tuple(response.header_values("Set-Cookie"))
            origin = (parts.scheme, parts.hostname or "", parts.path or "/")
            for header in set_cookies:
                self.env.jar.set_from_header(header, origin, now)
            self.trace.append(
                RequestTrace(
                    method=method,
                    url=url,
                    cookies_sent=cookies,
                    status=response.status,
                    set_cookie_headers=set_cookies,
                )
            )
            if response.status in (301, 302, 303, 307, 308):
                location = response.first_header("Location")
                if not location:
                    return response
                url = location if "://" in location else self.target + location
                if response.status in (301, 302, 303):
                    method, body = "GET", None
                continue
            return response
        raise TargetUnreachable(f"redirect depth exceeded for {url}")

    def login(self, step_index: int, step: Login) -> bool:
        payload = {
            "username": step.username or self.account.username,
            "password": step.password or self.account.password,
        }
        response = self.request("POST", "/login", payload)
        if response.status == 401:
            raise AuthFailed(step_index)
        if response.status >= 500:
            raise TargetUnreachable(f"login returned {response.status}")
        return detect_2fa_prompt(response, self.profile)

    def solve(self, step_index: int, step: Solve2FA) -> None:
        now = self.env.clock()
        key = (self.netloc, self.account.username)
        # The target consumes each code once per account per window; when a
        # code collides with one already spent (rapid consecutive flows),
        # fall back to the adjacent windows, which the verifier tolerates.
        candidates = [totp_code(self.account.seed_bytes, at) for at in (now, now + 30, now - 30)]
        last = self._last_codes.get(key)
        candidates.sort(key=lambda c: c == last)
        response = None
        for code in candidates:
            payload = {"code": code, "rememberDevice": step.remember_device}
            response = self.request("POST", "/2fa", payload)
            if response.status == 200:
                self._last_codes[key] = code
                doc = response.json()
                if isinstance(doc, dict) and isinstance(doc.get("deviceToken"), str):
                    self.env.device_tokens[self.netloc] = doc["deviceToken"]
                return
            doc = response.json()
            if not (isinstance(doc, dict) and doc.get("status") == "replayed-code"):
                break
        status = response.status if response is not None else "none"
        raise ChallengeFailed(step_index, f"status {status}")

    def logout(self) -> None:
        self.request("POST", "/logout")


def execute_flow(
    script: FlowScript | Sequence[FlowStep],
    env: SessionEnv,
    target: str,
    account: Account,
    transport: Transport | None = None,
    profile: TargetProfile | None = None,
) -> FlowResult:
    """Run the script's steps in order and collect snapshots and prompts."""
    if not isinstance(script, FlowScript):
        script = FlowScript(steps=tuple(script))
    script.validate()
    driver = _FlowDriver(env, target, account, transport or HttpTransport(), profile)

    snapshots: dict[str, CookieSnapshot] = {}
    prompts: list[tuple[int, bool]] = []
    authenticated = False

    for index, step in enumerate(script.steps):
        if isinstance(step, Login):
            prompted = driver.login(index, step)
            prompts.append((index, prompted))
            authenticated = not prompted
        elif isinstance(step, Solve2FA):
            driver.solve(index, step)
            authenticated = True
        elif isinstance(step, Logout):
            driver.logout()
            authenticated = False
        elif isinstance(step, ClearAll):
            env.clear_browser_data()
            authenticated = False
        elif isinstance(step, Snapshot):
            snapshots[step.label] = env.jar.snapshot(step.label, env.clock())
        elif isinstance(step, ImportCookies):
            env.jar.import_records(step.snapshot.cookies)
        elif isinstance(step, ToggleMask):
            env.jar.apply_mask(step.enabled)
        elif isinstance(step, AssertPrompt):
            if not prompts:
                raise ScriptInvalid(f"step {index}: assertPrompt before any login")
            observed = prompts[-1][1]
            if observed != step.expected:
                raise FlowAssertionError(
                    f"step {index}: expected prompt={step.expected}, observed {observed}"
                )
        else:  # pragma: no cover - the FlowStep union is closed
            raise ScriptInvalid(f"step {index}: unsupported step {step!r}")

    return FlowResult(
        snapshots=snapshots,
        prompts=tuple(prompts),
        final_authenticated=authenticated,
        http_trace=tuple(driver.trace),
    )


def fetch_account_status(
    env: SessionEnv,
    target: str,
    account: Account,
    transport: Transport | None = None,
) -> int:
    """GET the authenticated-only resource; returns the HTTP status."""
    driver = _FlowDriver(env, target, account, transport or HttpTransport(), None)
    response = driver.request("GET", "/account")
    return response.status
