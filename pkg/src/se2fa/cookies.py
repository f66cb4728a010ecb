"""Cookie records, snapshots, and diffs with RFC 6265 attribute semantics.

This is the substrate for everything else in the toolkit: flows capture
snapshots of a jar, trust isolation works on snapshot diffs, and the
attribute audit reads the parsed Secure/HttpOnly/expiry state. The stdlib
cookie modules are too lossy for security analysis (they drop attribute
detail and merge headers), so parsing is implemented here against the RFC
grammar directly.

Timestamps are timezone-aware UTC datetimes throughout; a session cookie
(no Expires, no Max-Age) is represented by ``expires_at=None``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone
from typing import Iterable, Sequence

__all__ = [
    "CookieError",
    "MalformedCookie",
    "FormatError",
    "UnknownKey",
    "CookieRecord",
    "CookieSnapshot",
    "SnapshotDiff",
    "parse_set_cookie",
    "parse_cookie_date",
    "diff_snapshots",
    "serialize_snapshot",
    "parse_snapshot",
    "apply_toggle_mask",
    "rfc3339",
    "parse_rfc3339",
    "utc_from_epoch",
]

CookieKey = tuple[str, str, str]  # (name, domain, path)

SAME_SITE_VALUES = ("Strict", "Lax", "None")

# Expiry deltas are clamped so absurd Max-Age values cannot overflow datetime
# arithmetic (roughly 3000 years each way).
_MAX_DELTA_SECONDS = 100_000_000_000


class CookieError(ValueError):
    """Base class for cookie layer errors."""


class MalformedCookie(CookieError):
    """Set-Cookie header whose name-value pair cannot be parsed."""


class FormatError(CookieError):
    """Snapshot interchange document that violates the schema."""

    def __init__(self, message: str, record_index: int | None = None):
        super().__init__(message)
        self.record_index = record_index


class UnknownKey(CookieError):
    """Toggle mask references a cookie key not present in the snapshot."""


def utc_from_epoch(ts: float) -> datetime:
    return datetime.fromtimestamp(ts, tz=timezone.utc)


def _as_utc(value: float | datetime) -> datetime:
    if isinstance(value, datetime):
        if value.tzinfo is None:
            return value.replace(tzinfo=timezone.utc)
        return value.astimezone(timezone.utc)
    return utc_from_epoch(value)


def rfc3339(dt: datetime) -> str:
    """Render a UTC datetime as an RFC 3339 string with a Z suffix."""
    return _as_utc(dt).isoformat().replace("+00:00", "Z")


def parse_rfc3339(text: str) -> datetime:
    if not isinstance(text, str):
        raise FormatError(f"expected RFC 3339 string, got {type(text).__name__}")
    normalized = text[:-1] + "+00:00" if text.endswith("Z") else text
    try:
        parsed = datetime.fromisoformat(normalized)
    except ValueError as exc:
        raise FormatError(f"bad RFC 3339 timestamp {text!r}") from exc
    return _as_utc(parsed)


_NAME_FORBIDDEN = re.compile(r"[=;\s]")


@dataclass(frozen=True)
class CookieRecord:
    """One parsed cookie with its security-relevant attributes.

    Identity is the (name, domain, path) triple, matching browser jar
    semantics. ``same_site`` is one of "Strict"/"Lax"/"None" or ``None``
    when the attribute was absent.
    """

    name: str
    value: str
    domain: str
    path: str
    secure: bool = False
    http_only: bool = False
    same_site: str | None = None
    expires_at: datetime | None = None
    created_at: datetime = datetime(1970, 1, 1, tzinfo=timezone.utc)

    def __post_init__(self) -> None:
        if not self.name:
            raise MalformedCookie("cookie name must be non-empty")
        if _NAME_FORBIDDEN.search(self.name) or _has_ctl(self.name):
            raise MalformedCookie(f"illegal character in cookie name {self.name!r}")
        if self.same_site is not None and self.same_site not in SAME_SITE_VALUES:
            raise MalformedCookie(f"bad SameSite value {self.same_site!r}")

    @property
    def key(self) -> CookieKey:
        return (self.name, self.domain, self.path)

    @property
    def is_session(self) -> bool:
        return self.expires_at is None

    def expired(self, now: float | datetime) -> bool:
        return self.expires_at is not None and self.expires_at <= _as_utc(now)

    def lifetime_days(self) -> int | None:
        """Whole-day lifetime (ceiling), or None for a session cookie."""
        if self.expires_at is None:
            return None
        seconds = (self.expires_at - self.created_at).total_seconds()
        return max(0, -(-int(seconds) // 86400))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "domain": self.domain,
            "path": self.path,
            "secure": self.secure,
            "httpOnly": self.http_only,
            "sameSite": self.same_site,
            "expiresAt": None if self.expires_at is None else rfc3339(self.expires_at),
            "createdAt": rfc3339(self.created_at),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CookieRecord":
        if not isinstance(doc, dict):
            raise FormatError("cookie entry must be an object")
        required = ("name", "value", "domain", "path", "secure", "httpOnly")
        for field_name in required:
            if field_name not in doc:
                raise FormatError(f"cookie entry missing field {field_name!r}")
        for flag in ("secure", "httpOnly"):
            if not isinstance(doc[flag], bool):
                raise FormatError(f"cookie field {flag!r} must be a boolean")
        for text_field in ("name", "value", "domain", "path"):
            if not isinstance(doc[text_field], str):
                raise FormatError(f"cookie field {text_field!r} must be a string")
        same_site = doc.get("sameSite")
        if same_site is not None and same_site not in SAME_SITE_VALUES:
            raise FormatError(f"bad sameSite value {same_site!r}")
        expires = doc.get("expiresAt")
        try:
            return cls(
                name=doc["name"],
                value=doc["value"],
                domain=doc["domain"],
                path=doc["path"],
                secure=doc["secure"],
                http_only=doc["httpOnly"],
                same_site=same_site,
                expires_at=None if expires is None else parse_rfc3339(expires),
                created_at=parse_rfc3339(doc.get("createdAt", "1970-01-01T00:00:00Z")),
            )
        except MalformedCookie as exc:
            raise FormatError(str(exc)) from exc


def _has_ctl(text: str) -> bool:
    return any(ord(ch) < 0x20 or ord(ch) == 0x7F for ch in text)


@dataclass(frozen=True)
class CookieSnapshot:
    """Point-in-time capture of a jar, ordered for deterministic output."""

    label: str
    taken_at: datetime
    cookies: tuple[CookieRecord, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.cookies, key=lambda r: (r.domain, r.path, r.name)))
        seen: set[CookieKey] = set()
        for record in ordered:
            if record.key in seen:
                raise CookieError(f"duplicate cookie key {record.key!r} in snapshot")
            seen.add(record.key)
        object.__setattr__(self, "cookies", ordered)
        object.__setattr__(self, "taken_at", _as_utc(self.taken_at))

    def keys(self) -> tuple[CookieKey, ...]:
        return tuple(record.key for record in self.cookies)

    def by_key(self) -> dict[CookieKey, CookieRecord]:
        return {record.key: record for record in self.cookies}

    def get(self, key: CookieKey) -> CookieRecord | None:
        return self.by_key().get(key)


@dataclass(frozen=True)
class SnapshotDiff:
    """Delta between two snapshots; keys never appear in two buckets."""

    added: tuple[CookieRecord, ...]
    removed: tuple[CookieRecord, ...]
    changed: tuple[tuple[CookieRecord, CookieRecord], ...]

    @property
    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.changed)

    def candidate_keys(self) -> tuple[CookieKey, ...]:
        """Keys added or changed, the trust-cookie candidate set."""
        keys = [r.key for r in self.added] + [after.key for _, after in self.changed]
        return tuple(sorted(keys))

    def to_json(self) -> dict:
        return {
            "added": [r.to_json() for r in self.added],
            "removed": [r.to_json() for r in self.removed],
            "changed": [
                {"before": before.to_json(), "after": after.to_json()}
                for before, after in self.changed
            ],
        }


def diff_snapshots(before: CookieSnapshot, after: CookieSnapshot) -> SnapshotDiff:
    """Partition keys into added/removed/changed; attribute-only edits count.

    An attribute regression (HttpOnly dropped, lifetime extended) is a
    security finding even when the value is unchanged, so records compare
    field-for-field.
    """
    old = before.by_key()
    new = after.by_key()
    added = tuple(new[k] for k in sorted(new.keys() - old.keys()))
    removed = tuple(old[k] for k in sorted(old.keys() - new.keys()))
    changed = tuple(
        (old[k], new[k]) for k in sorted(old.keys() & new.keys()) if old[k] != new[k]
    )
    return SnapshotDiff(added=added, removed=removed, changed=changed)


def serialize_snapshot(snapshot: CookieSnapshot) -> bytes:
    """Encode a snapshot in the interchange schema (UTF-8 JSON)."""
    doc = {
        "label": snapshot.label,
        "takenAt": rfc3339(snapshot.taken_at),
        "cookies": [record.to_json() for record in snapshot.cookies],
    }
    return json.dumps(doc, ensure_ascii=False).encode("utf-8")


def parse_snapshot(data: bytes | str) -> CookieSnapshot:
    """Decode an interchange document, reporting the offending record index."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError("snapshot file is not valid UTF-8") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise FormatError(f"snapshot file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("snapshot document must be a JSON object")
    label = doc.get("label")
    if not isinstance(label, str):
        raise FormatError("snapshot field 'label' must be a string")
    if "takenAt" not in doc:
        raise FormatError("snapshot field 'takenAt' is required")
    taken_at = parse_rfc3339(doc["takenAt"])
    raw_cookies = doc.get("cookies")
    if not isinstance(raw_cookies, list):
        raise FormatError("snapshot field 'cookies' must be an array")
    records = []
    for index, entry in enumerate(raw_cookies):
        try:
            records.append(CookieRecord.from_json(entry))
        except FormatError as exc:
            raise FormatError(f"cookie record {index}: {exc}", record_index=index) from exc
    try:
        return CookieSnapshot(label=label, taken_at=taken_at, cookies=tuple(records))
    except CookieError as exc:
        raise FormatError(str(exc)) from exc


def apply_toggle_mask(
    snapshot: CookieSnapshot, enabled: Iterable[CookieKey]
) -> CookieSnapshot:
    """Keep exactly the records whose keys are in ``enabled``."""
    enabled_set = {tuple(key) for key in enabled}
    known = set(snapshot.keys())
    stray = enabled_set - known
    if stray:
        raise UnknownKey(f"mask references unknown cookie keys: {sorted(stray)!r}")
    kept = tuple(record for record in snapshot.cookies if record.key in enabled_set)
    return CookieSnapshot(label=snapshot.label, taken_at=snapshot.taken_at, cookies=kept)


# --- Set-Cookie parsing ----------------------------------------------------

_MONTHS = {
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "may": 5, "jun": 6,
    "jul": 7, "aug": 8, "sep": 9, "oct": 10, "nov": 11, "dec": 12,
}
_DATE_DELIMITERS = re.compile(r"[\x09\x20-\x2f\x3b-\x40\x5b-\x60\x7b-\x7e]+")
_TIME_TOKEN = re.compile(r"^(\d{1,2}):(\d{1,2}):(\d{1,2})(?:\D.*)?$")
_DAY_TOKEN = re.compile(r"^(\d{1,2})(?:\D.*)?$")
_YEAR_TOKEN = re.compile(r"^(\d{2,4})(?:\D.*)?$")
_MAX_AGE_VALUE = re.compile(r"^-?\d+$")


def parse_cookie_date(text: str) -> datetime | None:
    """Tolerant cookie-date parser (RFC 6265 section 5.1.1 algorithm).

    Handles RFC 1123, RFC 850, and asctime shapes plus the usual deviations
    (dashes, two-digit years). Returns None when no date can be recovered.
    """
    time_fields = day = month = year = None
    for token in _DATE_DELIMITERS.split(text):
        if not token:
            continue
        if time_fields is None:
            match = _TIME_TOKEN.match(token)
            if match:
                time_fields = tuple(int(g) for g in match.groups())
                continue
        if day is None:
            match = _DAY_TOKEN.match(token)
            if match:
                day = int(match.group(1))
                continue
        if month is None and _MONTHS.get(token[:3].lower()) is not None:
            month = _MONTHS[token[:3].lower()]
            continue
        if year is None:
            match = _YEAR_TOKEN.match(token)
            if match:
                year = int(match.group(1))
                continue
    if time_fields is None or day is None or month is None or year is None:
        return None
    if 70 <= year <= 99:
        year += 1900
    elif 0 <= year <= 69:
        year += 2000
    hour, minute, second = time_fields
    if year < 1601 or not 1 <= day <= 31 or hour > 23 or minute > 59 or second > 59:
        return None
    try:
        return datetime(year, month, day, hour, minute, second, tzinfo=timezone.utc)
    except ValueError:
        return None


def parse_set_cookie(
    header: str | bytes,
    origin: tuple[str, str, str],
    now: float | datetime,
) -> CookieRecord:
    """Parse one Set-Cookie header value into a record.

    ``origin`` is the (scheme, host, path) of the response that carried the
    header; it supplies the RFC default domain and path. Max-Age wins over
    Expires when both are present. Unknown attributes are ignored, and the
    parser is total: any input either yields a record or MalformedCookie.
    """
    if isinstance(header, bytes):
        header = header.decode("latin-1")
    now_dt = _as_utc(now)
    _, origin_host, origin_path = origin

    pair, _, attr_text = header.partition(";")
    if "=" not in pair:
        raise MalformedCookie("missing '=' in cookie name-value pair")
    raw_name, _, raw_value = pair.partition("=")
    name = raw_name.strip()
    value = raw_value.strip()
    if not name:
        raise MalformedCookie("empty cookie name")
    if _NAME_FORBIDDEN.search(name) or _has_ctl(name):
        raise MalformedCookie(f"illegal character in cookie name {name!r}")

    domain = origin_host.lower()
    path = _default_path(origin_path)
    secure = False
    http_only = False
    same_site: str | None = None
    max_age: int | None = None
    expires_dt: datetime | None = None

    for chunk in attr_text.split(";"):
        attr_name, _, attr_value = chunk.partition("=")
        attr_name = attr_name.strip().lower()
        attr_value = attr_value.strip()
        if attr_name == "secure":
            secure = True
        elif attr_name == "httponly":
            http_only = True
        elif attr_name == "max-age":
            if _MAX_AGE_VALUE.match(attr_value):
                max_age = int(attr_value)
        elif attr_name == "expires":
            parsed = parse_cookie_date(attr_value)
            if parsed is not None:
                expires_dt = parsed
        elif attr_name == "domain":
            candidate = attr_value.lstrip(".").lower()
            if candidate:
                domain = candidate
        elif attr_name == "path":
            if attr_value.startswith("/"):
                path = attr_value
        elif attr_name == "samesite":
            normalized = attr_value.capitalize()
            if normalized in SAME_SITE_VALUES:
                same_site = normalized

    if max_age is not None:
        clamped = max(-_MAX_DELTA_SECONDS, min(_MAX_DELTA_SECONDS, max_age))
        expires_at = now_dt + timedelta(seconds=clamped)
    elif expires_dt is not None:
        expires_at = expires_dt
    else:
        expires_at = None

    return CookieRecord(
        name=name,
        value=value,
        domain=domain,
        path=path,
        secure=secure,
        http_only=http_only,
        same_site=same_site,
        expires_at=expires_at,
        created_at=now_dt,
    )


def _default_path(request_path: str) -> str:
    # RFC 6265 section 5.1.4 default-path computation.
    if not request_path or not request_path.startswith("/"):
        return "/"
    cut = request_path.rfind("/")
    if cut == 0:
        return "/"
    return request_path[:cut]


def domain_matches(request_host: str, cookie_domain: str) -> bool:
    """RFC 6265 section 5.1.3 domain matching (IP heuristics included)."""
    host = request_host.lower()
    domain = cookie_domain.lower()
    if host == domain:
        return True
    if not host.endswith("." + domain):
        return False
    if host.replace(".", "").isdigit() or ":" in host:
        return False
    return True


def path_matches(request_path: str, cookie_path: str) -> bool:
    """RFC 6265 section 5.1.4 path matching."""
    if request_path == cookie_path:
        return True
    if request_path.startswith(cookie_path):
        return cookie_path.endswith("/") or request_path[len(cookie_path):].startswith("/")
    return False


def with_value(record: CookieRecord, value: str) -> CookieRecord:
    """Copy a record with a replacement value, keeping key and attributes."""
    return replace(record, value=value)
