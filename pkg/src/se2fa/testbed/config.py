"""Ground-truth configuration for one mock 2FA target."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

__all__ = [
    "InvalidConfig",
    "VALUE_SCHEMES",
    "PLACEMENTS",
    "NOTIFICATION_TYPES",
    "RiskControls",
    "TrustCookieSpec",
    "AccountSpec",
    "TargetConfig",
    "load_matrix",
    "load_matrix_expectations",
    "hash_password",
]

VALUE_SCHEMES = (
    "Random128",
    "FixedPerAccount",
    "GlobalShared",
    "TimestampSeconds",
    "TimestampMillis",
    "Base64Profile",
)
PLACEMENTS = ("AtChallenge", "InSettings", "RememberMe", "None")
NOTIFICATION_TYPES = ("N1", "N2", "N3", "N4", "N5", "N6")


class InvalidConfig(ValueError):
    pass


def hash_password(password: str) -> str:
    return hashlib.sha256(password.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RiskControls:
    cookie_based: bool = False
    fingerprint_based: bool = False
    ip_based: bool = False
    device_token_based: bool = False

    def any(self) -> bool:
        return (
            self.cookie_based
            or self.fingerprint_based
            or self.ip_based
            or self.device_token_based
        )

    def to_json(self) -> dict:
        return {
            "cookieBased": self.cookie_based,
            "fingerprintBased": self.fingerprint_based,
            "ipBased": self.ip_based,
            "deviceTokenBased": self.device_token_based,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RiskControls":
        return cls(
            cookie_based=bool(doc.get("cookieBased", False)),
            fingerprint_based=bool(doc.get("fingerprintBased", False)),
            ip_based=bool(doc.get("ipBased", False)),
            device_token_based=bool(doc.get("deviceTokenBased", False)),
        )


@dataclass(frozen=True)
class TrustCookieSpec:
    name: str
    value_scheme: str
    secure: bool = True
    http_only: bool = True
    max_age_seconds: int | None = None  # None = session cookie

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "valueScheme": self.value_scheme,
            "secure": self.secure,
            "httpOnly": self.http_only,
            "maxAgeSeconds": self.max_age_seconds,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TrustCookieSpec":
        return cls(
            name=doc["name"],
            value_scheme=doc["valueScheme"],
            secure=bool(doc.get("secure", True)),
            http_only=bool(doc.get("httpOnly", True)),
            max_age_seconds=doc.get("maxAgeSeconds"),
        )


@dataclass(frozen=True)
class AccountSpec:
    username: str
    password_hash: str
    totp_seed: str

    @classmethod
    def make(cls, username: str, password: str, totp_seed: str) -> "AccountSpec":
        return cls(username=username, password_hash=hash_password(password), totp_seed=totp_seed)

    def to_json(self) -> dict:
        return {
            "username": self.username,
            "passwordHash": self.password_hash,
            "totpSeed": self.totp_seed,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "AccountSpec":
        return cls(
            username=doc["username"],
            password_hash=doc["passwordHash"],
            totp_seed=doc["totpSeed"],
        )


@dataclass(frozen=True)
class TargetConfig:
    """Everything the mock service needs, and the evaluator must recover."""

    id: str
    risk_controls: RiskControls = field(default_factory=RiskControls)
    remember_placement: str = "AtChallenge"
    trust_cookies: tuple[TrustCookieSpec, ...] = ()
    decoy_cookies: int = 0
    broken_2fa: bool = False
    notification: str | None = None
    accounts: tuple[AccountSpec, ...] = ()

    def validate(self) -> None:
        if not self.id:
            raise InvalidConfig("config id must be non-empty")
        if self.remember_placement not in PLACEMENTS:
            raise InvalidConfig(f"unknown rememberPlacement {self.remember_placement!r}")
        if self.notification is not None and self.notification not in NOTIFICATION_TYPES:
            raise InvalidConfig(f"unknown notification type {self.notification!r}")
        if self.broken_2fa and self.trust_cookies:
            raise InvalidConfig("a broken-2FA target must not configure trust cookies")
        if self.risk_controls.cookie_based and not self.trust_cookies and not self.broken_2fa:
            raise InvalidConfig("cookie-based risk control needs at least one trust cookie")
        names = [c.name for c in self.trust_cookies]
        if len(names) != len(set(names)):
            raise InvalidConfig("trust cookie names must be unique")
        for spec in self.trust_cookies:
            if spec.value_scheme not in VALUE_SCHEMES:
                raise InvalidConfig(f"unknown valueScheme {spec.value_scheme!r}")
        if not self.accounts:
            raise InvalidConfig("config needs at least one account")
        for account in self.accounts:
            if len(account.totp_seed.encode("utf-8")) < 16:
                raise InvalidConfig(f"totp seed for {account.username!r} shorter than 16 bytes")

    def account(self, username: str) -> AccountSpec | None:
        for spec in self.accounts:
            if spec.username == username:
                return spec
        return None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "riskControls": self.risk_controls.to_json(),
            "rememberPlacement": self.remember_placement,
            "trustCookies": [c.to_json() for c in self.trust_cookies],
            "decoyCookies": self.decoy_cookies,
            "broken2fa": self.broken_2fa,
            "notification": self.notification,
            "accounts": [a.to_json() for a in self.accounts],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "TargetConfig":
        try:
            config = cls(
                id=doc["id"],
                risk_controls=RiskControls.from_json(doc.get("riskControls", {})),
                remember_placement=doc.get("rememberPlacement", "AtChallenge"),
                trust_cookies=tuple(
                    TrustCookieSpec.from_json(c) for c in doc.get("trustCookies", ())
                ),
                decoy_cookies=int(doc.get("decoyCookies", 0)),
                broken_2fa=bool(doc.get("broken2fa", False)),
                notification=doc.get("notification"),
                accounts=tuple(AccountSpec.from_json(a) for a in doc.get("accounts", ())),
            )
        except KeyError as exc:
            raise InvalidConfig(f"config missing field {exc}") from exc
        config.validate()
        return config


def load_matrix(path: str | Path) -> list[TargetConfig]:
    """Read a matrix file: {"targets": [config, ...]}."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    targets = doc.get("targets")
    if not isinstance(targets, list):
        raise InvalidConfig("matrix file must contain a 'targets' array")
    configs = [TargetConfig.from_json(entry) for entry in targets]
    ids = [c.id for c in configs]
    if len(ids) != len(set(ids)):
        raise InvalidConfig("target ids in a matrix must be unique")
    return configs


def load_matrix_expectations(path: str | Path) -> dict[str, dict]:
    """Expected-verdict blocks keyed by target id (harness-side data)."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    out: dict[str, dict] = {}
    for entry in doc.get("targets", ()):
        if "expected" in entry:
            out[entry["id"]] = entry["expected"]
    return out
