"""Mock-service semantics: attribute fidelity, conjunctive trust, hooks."""

from __future__ import annotations

import json

import pytest

from conftest import FakeClock, config_by_id, make_local_target

from se2fa.flows import Account, Login, Logout, SessionEnv, Solve2FA, execute_flow
from se2fa.testbed import (
    AccountSpec,
    InvalidConfig,
    RiskControls,
    TargetApp,
    TargetConfig,
    TrustCookieSpec,
    serve_target,
)
from se2fa.totp import totp_code
from se2fa.transport import HttpTransport, InProcessTransport


def small_config(**overrides) -> TargetConfig:
    base = dict(
        id="unit-target",
        risk_controls=RiskControls(cookie_based=True),
        remember_placement="AtChallenge",
        trust_cookies=(TrustCookieSpec("trust", "Random128", max_age_seconds=2_592_000),),
        decoy_cookies=0,
        broken_2fa=False,
        notification=None,
        accounts=(AccountSpec.make("alice", "alice-pass", "seedseedseedseed-alice"),),
    )
    base.update(overrides)
    config = TargetConfig(**base)
    config.validate()
    return config


def login(app, clock, username="alice", password="alice-pass", cookies="", fingerprint="fp", ip="1.2.3.4", token=""):
    headers = {"X-Device-Fingerprint": fingerprint, "X-Forwarded-For": ip}
    if cookies:
        headers["Cookie"] = cookies
    if token:
        headers["X-Device-Token"] = token
    body = json.dumps({"username": username, "password": password}).encode()
    return app.handle("POST", "/login", headers, body)


def solve(app, clock, sid, seed, remember=True, fingerprint="fp", ip="1.2.3.4", code=None):
    code = code or totp_code(seed.encode(), clock())
    headers = {
        "Cookie": f"sid={sid}",
        "X-Device-Fingerprint": fingerprint,
        "X-Forwarded-For": ip,
    }
    body = json.dumps({"code": code, "rememberDevice": remember}).encode()
    return app.handle("POST", "/2fa", headers, body)


def sid_from(headers) -> str:
    for key, value in headers:
        if key == "Set-Cookie" and value.startswith("sid="):
            return value.split(";")[0].split("=", 1)[1]
    raise AssertionError("no sid cookie issued")


def set_cookie_headers(headers) -> list[str]:
    return [value for key, value in headers if key == "Set-Cookie"]


def test_set_cookie_attribute_fidelity():
    clock = FakeClock()
    config = small_config(
        trust_cookies=(
            TrustCookieSpec("strict", "Random128", secure=True, http_only=True, max_age_seconds=2_592_000),
            TrustCookieSpec("loose", "Random128", secure=False, http_only=False, max_age_seconds=None),
        )
    )
    app = TargetApp(config, clock=clock)
    status, headers, _ = login(app, clock)
    sid = sid_from(headers)
    status, headers, _ = solve(app, clock, sid, config.accounts[0].totp_seed)
    assert status == 200
    cookies = set_cookie_headers(headers)
    strict = next(h for h in cookies if h.startswith("strict="))
    loose = next(h for h in cookies if h.startswith("loose="))
    value = strict.split(";")[0].split("=", 1)[1]
    assert strict == f"strict={value}; Path=/; Max-Age=2592000; Secure; HttpOnly"
    loose_value = loose.split(";")[0].split("=", 1)[1]
    assert loose == f"loose={loose_value}; Path=/"


def test_invalid_code_no_cookie_and_replay_guard():
    clock = FakeClock()
    config = small_config()
    app = TargetApp(config, clock=clock)
    seed = config.accounts[0].totp_seed

    status, headers, body = login(app, clock)
    sid = sid_from(headers)
    status, headers, body = solve(app, clock, sid, seed, code="00000000")
    assert status == 401 and json.loads(body)["status"] == "bad-code"
    assert not set_cookie_headers(headers)

    good = totp_code(seed.encode(), clock())
    status, _, _ = solve(app, clock, sid, seed, code=good)
    assert status == 200
    # same code replayed inside the window is rejected
    status, headers, body = login(app, clock)
    sid2 = sid_from(headers)
    status, _, body = solve(app, clock, sid2, seed, code=good)
    assert status == 401 and json.loads(body)["status"] == "replayed-code"


def test_adjacent_window_codes_accepted():
    clock = FakeClock()
    config = small_config()
    app = TargetApp(config, clock=clock)
    seed = config.accounts[0].totp_seed
    _, headers, _ = login(app, clock)
    sid = sid_from(headers)
    previous_window = totp_code(seed.encode(), clock() - 30)
    status, _, _ = solve(app, clock, sid, seed, code=previous_window)
    assert status == 200


def test_conjunctive_trust_all_factors_required():
    clock = FakeClock()
    config = small_config(
        risk_controls=RiskControls(cookie_based=True, fingerprint_based=True, ip_based=True),
    )
    app = TargetApp(config, clock=clock)
    seed = config.accounts[0].totp_seed
    _, headers, _ = login(app, clock, fingerprint="fp-v", ip="10.0.0.1")
    sid = sid_from(headers)
    _, headers, _ = solve(app, clock, sid, seed, fingerprint="fp-v", ip="10.0.0.1")
    trust_value = next(
        h.split(";")[0].split("=", 1)[1] for h in set_cookie_headers(headers) if h.startswith("trust=")
    )

    full = {"cookie": f"trust={trust_value}", "fingerprint": "fp-v", "ip": "10.0.0.1"}
    for dropped in full:
        kwargs = {
            "cookies": full["cookie"] if dropped != "cookie" else "",
            "fingerprint": full["fingerprint"] if dropped != "fingerprint" else "fp-x",
            "ip": full["ip"] if dropped != "ip" else "10.9.9.9",
        }
        _, _, body = login(app, clock, **kwargs)
        assert json.loads(body)["requires2fa"] is True, f"dropping {dropped} must re-challenge"
    _, _, body = login(app, clock, cookies=full["cookie"], fingerprint="fp-v", ip="10.0.0.1")
    assert json.loads(body)["requires2fa"] is False


def test_conjunctive_trust_exhaustive_over_matrix(matrix_configs):
    # For every non-broken matrix target: the full factor set suppresses the
    # challenge and removing any single required factor restores it.
    for config in matrix_configs:
        if config.broken_2fa:
            continue
        clock = FakeClock()
        target = make_local_target(config, clock=clock)
        env = SessionEnv(fingerprint="fp-v", simulated_ip="10.0.0.1", clock=clock)
        execute_flow(
            [Login(), Solve2FA(remember_device=True), Logout()],
            env,
            target.url,
            target.account(),
            target.transport,
        )
        jar_records = env.jar.records()
        trust_names = {spec.name for spec in config.trust_cookies}
        token = env.device_tokens.get("testbed.local", "")
        acct = target.account()

        def attempt(drop_cookie=None, wrong_fp=False, wrong_ip=False, drop_token=False):
            cookie_header = "; ".join(
                f"{r.name}={r.value}" for r in jar_records if r.name != drop_cookie and r.name != "sid"
            )
            _, _, body = login(
                target.app,
                clock,
                username=acct.username,
                password=acct.password,
                cookies=cookie_header,
                fingerprint="fp-x" if wrong_fp else "fp-v",
                ip="10.9.9.9" if wrong_ip else "10.0.0.1",
                token="" if drop_token else token,
            )
            return not json.loads(body)["requires2fa"]

        assert attempt(), config.id
        for name in trust_names:
            assert not attempt(drop_cookie=name), f"{config.id}: cookie {name}"
        if config.risk_controls.fingerprint_based:
            assert not attempt(wrong_fp=True), config.id
        if config.risk_controls.ip_based:
            assert not attempt(wrong_ip=True), config.id
        if config.risk_controls.device_token_based:
            assert not attempt(drop_token=True), config.id


def test_random128_values_differ_between_flows():
    clock = FakeClock()
    config = small_config()
    app = TargetApp(config, clock=clock)
    seed = config.accounts[0].totp_seed
    values = []
    for _ in range(2):
        _, headers, _ = login(app, clock)
        sid = sid_from(headers)
        clock.advance(31)
        _, headers, _ = solve(app, clock, sid, seed)
        values.append(
            next(h.split(";")[0].split("=", 1)[1] for h in set_cookie_headers(headers) if h.startswith("trust="))
        )
    assert values[0] != values[1]


def test_broken_target_never_challenges():
    clock = FakeClock()
    config = small_config(
        id="broken",
        risk_controls=RiskControls(),
        trust_cookies=(),
        broken_2fa=True,
    )
    app = TargetApp(config, clock=clock)
    for _ in range(3):
        _, headers, body = login(app, clock)
        assert json.loads(body)["requires2fa"] is False
        status, _, _ = app.handle("GET", "/account", {"Cookie": f"sid={sid_from(headers)}"}, b"")
        assert status == 200


def test_remember_placement_none_never_issues():
    clock = FakeClock()
    config = small_config(remember_placement="None")
    app = TargetApp(config, clock=clock)
    seed = config.accounts[0].totp_seed
    _, headers, _ = login(app, clock)
    sid = sid_from(headers)
    _, headers, _ = solve(app, clock, sid, seed, remember=True)
    assert not any(h.startswith("trust=") for h in set_cookie_headers(headers))


def test_in_settings_placement_issues_without_flag():
    clock = FakeClock()
    config = small_config(remember_placement="InSettings")
    app = TargetApp(config, clock=clock)
    seed = config.accounts[0].totp_seed
    _, headers, _ = login(app, clock)
    sid = sid_from(headers)
    _, headers, _ = solve(app, clock, sid, seed, remember=False)
    assert any(h.startswith("trust=") for h in set_cookie_headers(headers))


def test_notification_log_append_only_new_devices(matrix_configs):
    clock = FakeClock()
    config = config_by_id(matrix_configs, "t01-cookie-random-strict")
    target = make_local_target(config, clock=clock)
    env = SessionEnv(fingerprint="fp-n1", simulated_ip="10.1.1.1", clock=clock)
    execute_flow(
        [Login(), Solve2FA(remember_device=True), Logout()],
        env,
        target.url,
        target.account(),
        target.transport,
    )
    log = target.app.notifications
    assert len(log) == 1 and log[0].kind == "new-device"
    # trusted re-login from the same device adds nothing
    execute_flow([Login(), Logout()], env, target.url, target.account(), target.transport)
    assert len(target.app.notifications) == 1
    # a different device bypassing with the same cookies alerts again
    env2 = SessionEnv(fingerprint="fp-n2", simulated_ip="10.2.2.2", clock=clock)
    env2.jar.import_records(env.jar.records())
    execute_flow([Login()], env2, target.url, target.account(), target.transport)
    assert len(target.app.notifications) == 2


def test_notification_hook_and_reset():
    clock = FakeClock()
    config = small_config(notification="N6")
    app = TargetApp(config, clock=clock)
    seed = config.accounts[0].totp_seed
    _, headers, _ = login(app, clock)
    sid = sid_from(headers)
    solve(app, clock, sid, seed, code="99999999")
    status, _, body = app.handle("GET", "/__notifications?account=alice", {}, b"")
    records = json.loads(body)["notifications"]
    assert status == 200 and len(records) == 1
    assert records[0]["kind"] == "bad-2fa-code"
    status, _, _ = app.handle("POST", "/__reset", {}, b"")
    assert status == 200
    _, _, body = app.handle("GET", "/__notifications?account=alice", {}, b"")
    assert json.loads(body)["notifications"] == []


def test_ground_truth_hook_gated():
    clock = FakeClock()
    hidden = TargetApp(small_config(), clock=clock)
    status, _, _ = hidden.handle("GET", "/__ground_truth", {}, b"")
    assert status == 404
    exposed = TargetApp(small_config(), clock=clock, expose_truth=True)
    status, _, body = exposed.handle("GET", "/__ground_truth", {}, b"")
    assert status == 200
    assert json.loads(body)["config"]["id"] == "unit-target"


def test_config_validation_rules():
    with pytest.raises(InvalidConfig):
        small_config(broken_2fa=True)  # broken targets must not configure cookies
    with pytest.raises(InvalidConfig):
        small_config(accounts=(AccountSpec.make("a", "pw", "short"),))
    with pytest.raises(InvalidConfig):
        small_config(trust_cookies=(TrustCookieSpec("t", "NotAScheme"),))
    with pytest.raises(InvalidConfig):
        small_config(remember_placement="Sometimes")
    with pytest.raises(InvalidConfig):
        small_config(notification="N9")


def test_timestamp_scheme_mints_epoch_value():
    clock = FakeClock()
    config = small_config(
        trust_cookies=(TrustCookieSpec("when", "TimestampSeconds", max_age_seconds=2_592_000),)
    )
    app = TargetApp(config, clock=clock)
    seed = config.accounts[0].totp_seed
    _, headers, _ = login(app, clock)
    _, headers, _ = solve(app, clock, sid_from(headers), seed)
    value = next(
        h.split(";")[0].split("=", 1)[1] for h in set_cookie_headers(headers) if h.startswith("when=")
    )
    assert value == str(int(clock()))


def test_port_in_use_raises():
    from se2fa.testbed import PortInUse

    with serve_target(small_config(), port=0) as handle:
        with pytest.raises(PortInUse):
            serve_target(small_config(), port=handle.port)


def test_serve_target_tls_mode():
    config = small_config()
    with serve_target(config, port=0, tls=True) as handle:
        assert handle.base_url.startswith("https://")
        transport = HttpTransport(timeout=5.0, verify_tls=False)
        env = SessionEnv(fingerprint="fp-tls", simulated_ip="10.4.4.4")
        account = Account("alice", "alice-pass", config.accounts[0].totp_seed)
        result = execute_flow([Login()], env, handle.base_url, account, transport)
        assert result.prompt_flags() == (True,)


def test_serve_target_over_real_http():
    config = small_config()
    with serve_target(config, port=0) as handle:
        transport = HttpTransport(timeout=5.0)
        env = SessionEnv(fingerprint="fp-http", simulated_ip="10.3.3.3")
        account = Account("alice", "alice-pass", config.accounts[0].totp_seed)
        result = execute_flow(
            [Login(), Solve2FA(remember_device=True), Logout(), Login()],
            env,
            handle.base_url,
            account,
            transport,
        )
        assert result.prompt_flags() == (True, False)
