"""Attack typing, expiry audit, value-scheme analysis, forging."""

from __future__ import annotations

import base64
import json
import random
import secrets

import pytest

from conftest import FakeClock, config_by_id, make_local_target

from se2fa.attacks import (
    AttackType,
    CookieAuditEntry,
    DesignFlaw,
    EmptyAudit,
    InsufficientSets,
    TrustCookieAudit,
    Unforgeable,
    analyze_value_scheme,
    audit_expiry,
    classify_attack_surface,
    classify_notifications,
    detect_broken_2fa,
    forge_cookie_value,
    screen_value,
    shannon_entropy,
    test_cross_account_reuse as run_cross_account_reuse,
)
from se2fa.cookies import CookieRecord, utc_from_epoch
from se2fa.flows import FlowResult, Login, execute_flow
from se2fa.probes import DeviceProfile, EnvFactory, TrustCookieSet, run_remember_flow, verify_bypass

A1, A2, A3, A4 = AttackType.A1, AttackType.A2, AttackType.A3, AttackType.A4
T0 = 1_750_000_000.0


def entry(secure=True, http_only=True, days=30, name="t") -> CookieAuditEntry:
    return CookieAuditEntry(key=(name, "site", "/"), secure=secure, http_only=http_only, lifetime_days=days)


def audit(entries, flaws=(), local_storage=False, cookie_only=True) -> TrustCookieAudit:
    return TrustCookieAudit(
        cookie_only=cookie_only,
        uses_local_storage=local_storage,
        per_cookie=tuple(entries),
        flaws=frozenset(flaws),
    )


# --- classify_attack_surface ---------------------------------------------------


def test_all_flags_set_no_flaws_is_a3_only():
    assert classify_attack_surface(audit([entry()])) == {A3}


def test_both_flags_missing():
    result = classify_attack_surface(audit([entry(secure=False, http_only=False)]))
    assert result == {A1, A2, A3}


def test_only_httponly_missing():
    assert classify_attack_surface(audit([entry(http_only=False)])) == {A2, A3}


def test_flaw_adds_a4():
    result = classify_attack_surface(audit([entry()], flaws={DesignFlaw.CROSS_ACCOUNT_REUSE}))
    assert result == {A3, A4}


def test_local_storage_scheme():
    result = classify_attack_surface(audit([], local_storage=True, cookie_only=False))
    assert result == {A2, A3}


def test_broken_2fa_dominates():
    result = classify_attack_surface(
        audit([], flaws={DesignFlaw.BROKEN_2FA}, cookie_only=False)
    )
    assert result == {A4}


def test_mixed_flags_use_per_cookie_conjunction():
    mixed = audit([entry(secure=True, http_only=True), entry(secure=False, http_only=False)])
    assert classify_attack_surface(mixed) == {A3}


def test_empty_audit_rejected():
    with pytest.raises(EmptyAudit):
        classify_attack_surface(audit([]))


def test_monotonicity_weakening_flags_never_shrinks():
    rng = random.Random(42)
    for _ in range(200):
        entries = [
            entry(secure=rng.random() < 0.5, http_only=rng.random() < 0.5, name=f"c{i}")
            for i in range(rng.randrange(1, 4))
        ]
        base = classify_attack_surface(audit(entries))
        weakened_secure = classify_attack_surface(
            audit([entry(secure=False, http_only=e.http_only, name=e.key[0]) for e in entries])
        )
        weakened_http = classify_attack_surface(
            audit([entry(secure=e.secure, http_only=False, name=e.key[0]) for e in entries])
        )
        assert base <= weakened_secure
        assert base <= weakened_http


# --- audit_expiry -----------------------------------------------------------------


@pytest.mark.parametrize(
    "days,bucket",
    [(2, "<=7"), (7, "<=7"), (14, "8-29"), (30, "30"), (90, "31-364"), (364, "31-364"), (365, ">=365"), (400, ">=365")],
)
def test_expiry_buckets(days, bucket):
    result = audit_expiry([entry(days=days)])
    assert result.bucket == bucket and result.max_lifetime_days == days


def test_expiry_from_max_age_seconds():
    created = utc_from_epoch(T0)
    record = CookieRecord(
        name="t",
        value="v",
        domain="site",
        path="/",
        expires_at=utc_from_epoch(T0 + 2_592_000),
        created_at=created,
    )
    trust = TrustCookieSet(keys=(record.key,), records=(record,))
    result = audit_expiry(trust)
    assert result.max_lifetime_days == 30 and result.bucket == "30"


def test_expiry_400_days():
    record = CookieRecord(
        name="t",
        value="v",
        domain="site",
        path="/",
        expires_at=utc_from_epoch(T0 + 34_560_000),
        created_at=utc_from_epoch(T0),
    )
    result = audit_expiry(TrustCookieSet(keys=(record.key,), records=(record,)))
    assert result.max_lifetime_days == 400 and result.bucket == ">=365"


def test_expiry_session_bucket():
    assert audit_expiry([entry(days=None)]).bucket == "Session"
    mixed = audit_expiry([entry(days=None), entry(days=30, name="u")])
    assert mixed.bucket == "30"


def test_expiry_empty_set_rejected():
    with pytest.raises(EmptyAudit):
        audit_expiry([])


# --- value screens -----------------------------------------------------------------


def trust_set(value: str, name="trust") -> TrustCookieSet:
    record = CookieRecord(
        name=name,
        value=value,
        domain="site",
        path="/",
        created_at=utc_from_epoch(T0),
    )
    return TrustCookieSet(keys=(record.key,), records=(record,))


def test_timestamp_values_detected():
    times = [T0, T0 + 90, T0 + 500, T0 + 700]
    sets = [trust_set(str(int(t))) for t in times]
    flaws, _ = analyze_value_scheme(sets, times)
    assert set(flaws) == {DesignFlaw.PREDICTABLE_TIMESTAMP}


def test_timestamp_millis_detected():
    times = [T0, T0 + 60, T0 + 120, T0 + 180]
    sets = [trust_set(str(int(t * 1000))) for t in times]
    flaws, _ = analyze_value_scheme(sets, times)
    assert DesignFlaw.PREDICTABLE_TIMESTAMP in flaws


def test_base64_profile_detected():
    payload = {"ip": "1.2.3.4", "date": "2024-06-10", "otp": "123456"}
    value = base64.b64encode(json.dumps(payload).encode()).decode()
    flaws, _ = screen_value(value, T0)
    assert DesignFlaw.SENSITIVE_ENCODING in flaws


def test_random_values_clean():
    times = [T0 + i * 60 for i in range(4)]
    sets = [trust_set(secrets.token_hex(16)) for _ in range(4)]
    flaws, _ = analyze_value_scheme(sets, times)
    assert flaws == {}


def test_random_values_clean_bulk():
    # the thresholds were chosen for zero false positives on 128-bit values
    rng = random.Random(2024)
    for _ in range(1000):
        value = bytes(rng.randrange(256) for _ in range(16)).hex()
        flaws, _ = screen_value(value, T0)
        assert flaws == {}, value


def test_all_identical_means_fixed_and_reused():
    times = [T0 + i * 60 for i in range(4)]
    sets = [trust_set("constant-token") for _ in range(4)]
    flaws, _ = analyze_value_scheme(sets, times)
    assert set(flaws) == {DesignFlaw.FIXED_VALUE, DesignFlaw.CROSS_ACCOUNT_REUSE}


def test_per_account_constant_is_fixed_only():
    times = [T0 + i * 60 for i in range(4)]
    sets = [trust_set(v) for v in ("alpha", "alpha", "beta", "beta")]
    flaws, _ = analyze_value_scheme(sets, times)
    assert set(flaws) == {DesignFlaw.FIXED_VALUE}


def test_insufficient_sets_rejected():
    with pytest.raises(InsufficientSets):
        analyze_value_scheme([trust_set("x")] * 3, [T0] * 3)


def test_low_entropy_is_warning_not_flaw():
    times = [T0 + i * 60 for i in range(4)]
    sets = [trust_set(v) for v in ("aaaa1", "aaaa2", "aaaa3", "aaaa4")]
    flaws, warnings = analyze_value_scheme(sets, times)
    assert flaws == {}
    assert any(w.startswith("LowEntropy") for w in warnings)
    assert shannon_entropy("aaaaaaa") < 1.0


# --- forge_cookie_value ---------------------------------------------------------


def template(value: str) -> CookieRecord:
    return CookieRecord(name="trust", value=value, domain="site", path="/")


def test_forge_timestamp_seconds():
    forged = forge_cookie_value(DesignFlaw.PREDICTABLE_TIMESTAMP, template("1718000000"), T0)
    assert forged.value == str(int(T0))
    assert forged.key == template("x").key


def test_forge_timestamp_millis():
    forged = forge_cookie_value(
        DesignFlaw.PREDICTABLE_TIMESTAMP, template("1718000000000"), T0
    )
    assert forged.value == str(int(T0 * 1000))


def test_forge_fixed_value_replays_constant():
    forged = forge_cookie_value(DesignFlaw.FIXED_VALUE, template("const"), T0)
    assert forged.value == "const"


def test_forge_random_scheme_unforgeable():
    with pytest.raises(Unforgeable):
        forge_cookie_value(DesignFlaw.SENSITIVE_ENCODING, template("whatever"), T0)
    with pytest.raises(Unforgeable):
        forge_cookie_value(DesignFlaw.PREDICTABLE_TIMESTAMP, template(secrets.token_hex(16)), T0)


# --- detect_broken_2fa ------------------------------------------------------------


def flow_result(*prompts: bool) -> FlowResult:
    return FlowResult(
        snapshots={},
        prompts=tuple((i, p) for i, p in enumerate(prompts)),
        final_authenticated=False,
        http_trace=(),
    )


def test_broken_detection():
    assert detect_broken_2fa([flow_result(False), flow_result(False), flow_result(False)])
    assert not detect_broken_2fa([flow_result(True), flow_result(True), flow_result(True)])
    assert not detect_broken_2fa([flow_result(True), flow_result(False), flow_result(True)])
    assert not detect_broken_2fa([])


# --- notifications ------------------------------------------------------------------


def test_classify_notifications_mapping():
    assert classify_notifications([{"kind": "new-device", "detail": {}}]) == "N1"
    assert (
        classify_notifications([{"kind": "new-device", "detail": {"time": 1, "location": "x"}}])
        == "N2"
    )
    assert classify_notifications([{"kind": "abnormal-ip", "detail": {"ip": "1.1.1.1"}}]) == "N3"
    assert classify_notifications([{"kind": "suspicious-login-verification", "detail": {}}]) == "N4"
    assert classify_notifications([{"kind": "password-reset", "detail": {}}]) == "N5"
    assert classify_notifications([{"kind": "bad-2fa-code", "detail": {}}]) == "N6"
    assert classify_notifications([]) is None


# --- active cross-account test -------------------------------------------------------


def test_cross_account_reuse_on_shared_and_random(matrix_configs, fake_clock):
    factory = EnvFactory(clock=fake_clock)
    victim = DeviceProfile("fp-v", "203.0.113.10")
    attacker = DeviceProfile("fp-a", "198.51.100.77")

    shared = make_local_target(config_by_id(matrix_configs, "t06-cookie-global-shared"), clock=fake_clock)
    assert run_cross_account_reuse(
        shared.url,
        shared.account("alice"),
        shared.account("bob"),
        factory.fresh(attacker),
        lambda: factory.fresh(attacker),
        shared.transport,
    )

    independent = make_local_target(config_by_id(matrix_configs, "t01-cookie-random-strict"), clock=fake_clock)
    assert not run_cross_account_reuse(
        independent.url,
        independent.account("alice"),
        independent.account("bob"),
        factory.fresh(attacker),
        lambda: factory.fresh(attacker),
        independent.transport,
    )

    fixed = make_local_target(config_by_id(matrix_configs, "t05-cookie-fixed-account"), clock=fake_clock)
    assert not run_cross_account_reuse(
        fixed.url,
        fixed.account("alice"),
        fixed.account("bob"),
        factory.fresh(attacker),
        lambda: factory.fresh(attacker),
        fixed.transport,
    )


# --- forge + bypass end to end (single scheme; acceptance sweeps all) -----------------


def test_forged_timestamp_bypasses_after_clock_advance(matrix_configs, fake_clock):
    target = make_local_target(config_by_id(matrix_configs, "t07-cookie-ts-seconds"), clock=fake_clock)
    factory = EnvFactory(clock=fake_clock)
    victim_env = factory.fresh(DeviceProfile("fp-v", "203.0.113.10"))
    run_remember_flow(target.url, target.account(), victim_env, target.transport)
    observed = next(r for r in victim_env.jar.records() if r.name == "otp_time")

    fake_clock.advance(3 * 86400)
    forged = forge_cookie_value(DesignFlaw.PREDICTABLE_TIMESTAMP, observed, fake_clock())
    trust = TrustCookieSet(keys=(forged.key,), records=(forged,))
    attacker_env = factory.fresh(DeviceProfile("fp-a", "198.51.100.77"))
    assert verify_bypass(target.url, target.account(), trust, attacker_env, target.transport)
