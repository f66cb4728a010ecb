"""Detection procedures: which risk controls guard remember-device, which
cookies carry the trust, and whether the trust set bypasses from a foreign
device.

Trust semantics are assumed monotone and conjunctive (every required cookie
must be present), which is what justifies single-pass greedy elimination
during isolation; if the full candidate set does not bypass, IsolationFailed
is raised rather than guessing.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable
from urllib.parse import urlsplit

from .cookies import CookieKey, CookieRecord, CookieSnapshot, diff_snapshots
from .flows import (
    Account,
    ClearAll,
    Login,
    Logout,
    SessionEnv,
    Snapshot,
    Solve2FA,
    execute_flow,
    fetch_account_status,
)
from .transport import Transport

__all__ = [
    "ProbeError",
    "Inconclusive",
    "IsolationFailed",
    "MeasureSet",
    "TrustCookieSet",
    "DeviceProfile",
    "EnvFactory",
    "reset_target",
    "run_remember_flow",
    "probe_remember_device",
    "probe_cookie_based",
    "probe_additional_measures",
    "isolate_trust_cookies",
    "verify_bypass",
]


class ProbeError(Exception):
    pass


class Inconclusive(ProbeError):
    """No equalized factor combination suppressed the prompt."""


class IsolationFailed(ProbeError):
    """The full candidate cookie set does not bypass the challenge."""


@dataclass(frozen=True)
class MeasureSet:
    cookie_based: bool = False
    fingerprint_based: bool = False
    ip_based: bool = False
    device_token_based: bool = False

    @property
    def cookie_only(self) -> bool:
        return (
            self.cookie_based
            and not self.fingerprint_based
            and not self.ip_based
            and not self.device_token_based
        )

    @property
    def storage_only(self) -> bool:
        """Trust lives entirely in browser storage (cookies or localStorage)."""
        return (
            (self.cookie_based or self.device_token_based)
            and not self.fingerprint_based
            and not self.ip_based
        )

    def to_json(self) -> dict:
        return {
            "cookieBased": self.cookie_based,
            "fingerprintBased": self.fingerprint_based,
            "ipBased": self.ip_based,
            "deviceTokenBased": self.device_token_based,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "MeasureSet":
        return cls(
            cookie_based=bool(doc.get("cookieBased", False)),
            fingerprint_based=bool(doc.get("fingerprintBased", False)),
            ip_based=bool(doc.get("ipBased", False)),
            device_token_based=bool(doc.get("deviceTokenBased", False)),
        )


@dataclass(frozen=True)
class TrustCookieSet:
    keys: tuple[CookieKey, ...]
    records: tuple[CookieRecord, ...]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(sorted(name for name, _, _ in self.keys))

    def to_json(self) -> dict:
        return {
            "keys": [{"name": n, "domain": d, "path": p} for n, d, p in self.keys],
            "records": [r.to_json() for r in self.records],
        }

    @staticmethod
    def empty() -> "TrustCookieSet":
        return TrustCookieSet(keys=(), records=())


@dataclass(frozen=True)
class DeviceProfile:
    fingerprint: str
    ip: str


@dataclass
class EnvFactory:
    """Builds fresh simulated devices sharing one injectable clock."""

    clock: Callable[[], float] = time.time
    secure_context: bool = True

    def fresh(self, profile: DeviceProfile) -> SessionEnv:
        return SessionEnv(
            fingerprint=profile.fingerprint,
            simulated_ip=profile.ip,
            secure_context=self.secure_context,
            clock=self.clock,
        )


def reset_target(target: str, transport: Transport) -> bool:
    """Best-effort account-state reset via the testbed hook."""
    try:
        response = transport.request("POST", target.rstrip("/") + "/__reset", {}, b"")
    except Exception:
        return False
    return response.status == 200


def run_remember_flow(
    target: str,
    account: Account,
    env: SessionEnv,
    transport: Transport,
    remember: bool = True,
):
    """Login + solve with the remember choice, snapshotting around the solve."""
    result = execute_flow(
        [Login(), Snapshot("pre-remember"), Solve2FA(remember_device=remember), Snapshot("post-remember"), Logout()],
        env,
        target,
        account,
        transport,
    )
    return result


def probe_remember_device(
    target: str,
    account: Account,
    env_factory: Callable[[], SessionEnv],
    transport: Transport,
) -> tuple[bool, tuple[bool, bool]]:
    """True when re-logins after a remembered solve skip the challenge.

    Runs one verification login plus one confirmation login and returns
    both observations alongside the verdict.
    """
    env = env_factory()
    result = execute_flow(
        [Login(), Solve2FA(remember_device=True), Logout(), Login(), Logout(), Login()],
        env,
        target,
        account,
        transport,
    )
    flags = result.prompt_flags()
    verification, confirmation = flags[1], flags[2]
    return (not verification and not confirmation), (verification, confirmation)


def probe_cookie_based(
    target: str,
    account: Account,
    env_factory: Callable[[], SessionEnv],
    transport: Transport,
) -> bool:
    """Clear-all-browser-data test: does the challenge come back?"""
    env = env_factory()
    result = execute_flow(
        [Login(), Solve2FA(remember_device=True), Logout(), ClearAll(), Login()],
        env,
        target,
        account,
        transport,
    )
    return result.prompt_flags()[1]


@dataclass
class _VictimState:
    jar_snapshot: CookieSnapshot
    device_token: str | None
    pre_snapshot: CookieSnapshot
    post_snapshot: CookieSnapshot


def _mint_victim_trust(
    target: str,
    account: Account,
    victim_env: SessionEnv,
    transport: Transport,
) -> _VictimState:
    result = run_remember_flow(target, account, victim_env, transport)
    netloc = urlsplit(target).netloc
    return _VictimState(
        jar_snapshot=victim_env.jar.snapshot("victim-jar", victim_env.clock()),
        device_token=victim_env.device_tokens.get(netloc),
        pre_snapshot=result.snapshots["pre-remember"],
        post_snapshot=result.snapshots["post-remember"],
    )


def _login_trusted(
    target: str,
    account: Account,
    env: SessionEnv,
    transport: Transport,
) -> bool:
    result = execute_flow([Login()], env, target, account, transport)
    return not result.prompt_flags()[0]


# Attribution order is fixed for determinism: single factors first
# (fingerprint, IP, device token), then pairs, then all three.
_FACTOR_COMBOS: tuple[frozenset[str], ...] = (
    frozenset(),
    frozenset({"fingerprint"}),
    frozenset({"ip"}),
    frozenset({"token"}),
    frozenset({"fingerprint", "ip"}),
    frozenset({"fingerprint", "token"}),
    frozenset({"ip", "token"}),
    frozenset({"fingerprint", "ip", "token"}),
)


def probe_additional_measures(
    target: str,
    account: Account,
    victim_profile: DeviceProfile,
    attacker_profile: DeviceProfile,
    env_factory: EnvFactory,
    transport: Transport,
) -> MeasureSet:
    """Replay the victim's jar from a foreign device, then selectively
    equalize fingerprint/IP/device-token to attribute the enforced factors.

    The returned MeasureSet reflects exactly the factors whose equalization
    suppressed the prompt; cookie participation is attributed by retrying
    the suppressing combination without the jar.
    """
    victim_env = env_factory.fresh(victim_profile)
    victim = _mint_victim_trust(target, account, victim_env, transport)
    netloc = urlsplit(target).netloc

    def attempt(equalized: frozenset[str], with_jar: bool) -> bool:
        env = env_factory.fresh(
            DeviceProfile(
                fingerprint=victim_profile.fingerprint
                if "fingerprint" in equalized
                else attacker_profile.fingerprint,
                ip=victim_profile.ip if "ip" in equalized else attacker_profile.ip,
            )
        )
        if with_jar:
            env.jar.import_records(victim.jar_snapshot.cookies)
        if "token" in equalized and victim.device_token:
            env.device_tokens[netloc] = victim.device_token
        return _login_trusted(target, account, env, transport)

    for combo in _FACTOR_COMBOS:
        if "token" in combo and victim.device_token is None:
            continue
        if attempt(combo, with_jar=True):
            cookie_based = not attempt(combo, with_jar=False)
            return MeasureSet(
                cookie_based=cookie_based,
                fingerprint_based="fingerprint" in combo,
                ip_based="ip" in combo,
                device_token_based="token" in combo,
            )
    raise Inconclusive("no factor combination suppressed the challenge")


def isolate_trust_cookies(
    target: str,
    account: Account,
    victim_env: SessionEnv,
    attacker_env_factory: Callable[[], SessionEnv],
    transport: Transport,
    copy_device_token: bool = False,
) -> TrustCookieSet:
    """Greedy elimination over the pre/post-remember snapshot diff.

    Every candidate is masked out in turn; a cookie is dropped when the
    bypass still succeeds without it. The surviving set is re-verified as
    sufficient before being returned.
    """
    victim = _mint_victim_trust(target, account, victim_env, transport)
    diff = diff_snapshots(victim.pre_snapshot, victim.post_snapshot)
    candidates = list(diff.candidate_keys())
    records_by_key = victim.post_snapshot.by_key()
    netloc = urlsplit(target).netloc

    def bypass(keys: list[CookieKey]) -> bool:
        env = attacker_env_factory()
        env.jar.clear()
        env.jar.import_records(records_by_key[k] for k in keys)
        if copy_device_token and victim.device_token:
            env.device_tokens[netloc] = victim.device_token
        return _login_trusted(target, account, env, transport)

    if not bypass(candidates):
        raise IsolationFailed(
            f"candidate set of {len(candidates)} cookies does not bypass the challenge"
        )
    kept = list(candidates)
    for key in candidates:
        trial = [k for k in kept if k != key]
        if bypass(trial):
            kept = trial
    if not bypass(kept):
        raise IsolationFailed("greedy elimination lost sufficiency; trust is not conjunctive")
    kept_sorted = tuple(sorted(kept))
    return TrustCookieSet(
        keys=kept_sorted,
        records=tuple(records_by_key[k] for k in kept_sorted),
    )


def verify_bypass(
    target: str,
    account: Account,
    trust: TrustCookieSet,
    attacker_env: SessionEnv,
    transport: Transport,
) -> bool:
    """Login with only the trust records imported; confirm with /account."""
    attacker_env.jar.clear()
    attacker_env.jar.import_records(trust.records)
    result = execute_flow([Login()], attacker_env, target, account, transport)
    if result.prompt_flags()[0]:
        return False
    return fetch_account_status(attacker_env, target, account, transport) == 200
