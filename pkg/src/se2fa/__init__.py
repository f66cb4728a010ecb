"""SE2FA: security evaluation toolkit for 2FA remember-device implementations.

Drives scripted login/2FA flows, isolates the cookies that mark a device
as trusted, classifies the attack surface, detects trust-cookie design
flaws, and checks every verdict against a built-in testbed of mock 2FA
services with known ground truth.
"""

__version__ = "0.1.0"

from .attacks import AttackType, DesignFlaw, TrustCookieAudit, classify_attack_surface
from .cookies import (
    CookieRecord,
    CookieSnapshot,
    SnapshotDiff,
    diff_snapshots,
    parse_set_cookie,
    parse_snapshot,
    serialize_snapshot,
)
from .evaluator import EvaluationSettings, EvaluationVerdict, evaluate_target
from .flows import Account, FlowScript, SessionEnv, execute_flow
from .probes import MeasureSet, TrustCookieSet
from .testbed import TargetConfig, serve_target
from .totp import totp_code

__all__ = [
    "AttackType",
    "DesignFlaw",
    "TrustCookieAudit",
    "classify_attack_surface",
    "CookieRecord",
    "CookieSnapshot",
    "SnapshotDiff",
    "diff_snapshots",
    "parse_set_cookie",
    "parse_snapshot",
    "serialize_snapshot",
    "EvaluationSettings",
    "EvaluationVerdict",
    "evaluate_target",
    "Account",
    "FlowScript",
    "SessionEnv",
    "execute_flow",
    "MeasureSet",
    "TrustCookieSet",
    "TargetConfig",
    "serve_target",
    "totp_code",
]
