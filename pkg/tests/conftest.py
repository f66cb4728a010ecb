"""Shared fixtures: matrix loading, in-process targets, fake clock."""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass

import pytest

from se2fa.flows import Account
from se2fa.fixtures import fixture_path
from se2fa.testbed import TargetApp, TargetConfig, load_matrix, load_matrix_expectations
from se2fa.transport import InProcessTransport

MATRIX_PATH = fixture_path("testbed", "matrix24.json")


class FakeClock:
    """Deterministic, manually advanced clock shared by driver and target."""

    def __init__(self, start: float = 1_750_000_000.0):
        self.now = start

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: float) -> None:
        self.now += seconds


def account_for(config: TargetConfig, username: str) -> Account:
    """Rebuild matrix test-account credentials from the naming convention.

    The matrix stores only password hashes; the plaintext convention is
    verified against the stored hash so the two cannot drift apart.
    """
    password = f"{username}#pass#{config.id}"
    spec = config.account(username)
    assert spec is not None, f"{config.id} has no account {username!r}"
    assert hashlib.sha256(password.encode()).hexdigest() == spec.password_hash
    return Account(username=username, password=password, totp_seed=spec.totp_seed)


@dataclass
class LocalTarget:
    config: TargetConfig
    app: TargetApp
    transport: InProcessTransport
    url: str

    def account(self, username: str = "alice") -> Account:
        return account_for(self.config, username)


def make_local_target(config: TargetConfig, clock=time.time) -> LocalTarget:
    app = TargetApp(config, clock=clock)
    transport = InProcessTransport({"testbed.local": app})
    return LocalTarget(config=config, app=app, transport=transport, url="http://testbed.local")


@pytest.fixture(scope="session")
def matrix_configs() -> list[TargetConfig]:
    return load_matrix(MATRIX_PATH)


@pytest.fixture(scope="session")
def matrix_expectations() -> dict[str, dict]:
    return load_matrix_expectations(MATRIX_PATH)


@pytest.fixture()
def fake_clock() -> FakeClock:
    return FakeClock()


def config_by_id(configs: list[TargetConfig], config_id: str) -> TargetConfig:
    for config in configs:
        if config.id == config_id:
            return config
    raise KeyError(config_id)
