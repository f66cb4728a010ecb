"""Configurable mock 2FA services with known ground truth."""

from .app import NotificationRecord, TargetApp
from .config import (
    NOTIFICATION_TYPES,
    PLACEMENTS,
    VALUE_SCHEMES,
    AccountSpec,
    InvalidConfig,
    RiskControls,
    TargetConfig,
    TrustCookieSpec,
    hash_password,
    load_matrix,
    load_matrix_expectations,
)
from .server import PortInUse, ServiceHandle, serve_matrix, serve_target

__all__ = [
    "NotificationRecord",
    "TargetApp",
    "NOTIFICATION_TYPES",
    "PLACEMENTS",
    "VALUE_SCHEMES",
    "AccountSpec",
    "InvalidConfig",
    "RiskControls",
    "TargetConfig",
    "TrustCookieSpec",
    "hash_password",
    "load_matrix",
    "load_matrix_expectations",
    "PortInUse",
    "ServiceHandle",
    "serve_matrix",
    "serve_target",
]
