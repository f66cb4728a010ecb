"""Site grouping, aggregate statistics, report rendering, and mitigations.

The bundled reference dataset (fixtures/paper) encodes a measurement
corpus of 910 2FA-supporting sites: group assignments, per-site
verification methods, notification behavior, and the trust-cookie audit
table for the sites whose remember-device trust lives entirely in browser
storage. Aggregates computed here are pinned against that dataset by the
acceptance suite.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .attacks import (
    AttackType,
    CookieAuditEntry,
    DesignFlaw,
    TrustCookieAudit,
    audit_expiry,
    classify_attack_surface,
)
from .fixtures import fixture_path

__all__ = [
    "Unclassifiable",
    "UnsupportedFormat",
    "SiteGroup",
    "SiteRecord",
    "TableRow",
    "ReportRow",
    "classify_group",
    "aggregate_stats",
    "StatsBundle",
    "render_report",
    "recommend_mitigations",
    "load_table_rows",
    "load_sites",
    "load_notification_table",
    "load_methods_table",
    "load_directory_comparison",
]

METHOD_NAMES = (
    "SMS",
    "PhoneCall",
    "SpecificApp",
    "HardwareToken",
    "Email",
    "Passkey",
    "AuthenticatorApp",
    "Biometrics",
    "RecoveryCode",
)


class Unclassifiable(ValueError):
    pass


class UnsupportedFormat(ValueError):
    pass


class SiteGroup(str, Enum):
    G1 = "G1"
    G2_COOKIE_ONLY = "G2CookieOnly"
    G2_OTHER = "G2Other"
    G3 = "G3"
    G4 = "G4"
    G5 = "G5"


@dataclass(frozen=True)
class TableRow:
    """One row of the shipped trust-cookie audit table."""

    no: int
    website: str
    amount: int | None
    http_only: bool | None
    secure: bool | None
    expiry_days: int | str | None  # days, "Session", or None when no cookie exists
    flaw: str | None
    attack_types: tuple[str, ...]
    notification: str | None = None

    def to_audit(self) -> TrustCookieAudit:
        """Reconstruct the audit this row summarizes."""
        if self.flaw == "broken-2fa":
            return TrustCookieAudit(
                cookie_only=False,
                uses_local_storage=False,
                per_cookie=(),
                flaws=frozenset({DesignFlaw.BROKEN_2FA}),
            )
        if self.flaw == "local-storage":
            return TrustCookieAudit(
                cookie_only=False,
                uses_local_storage=True,
                per_cookie=(),
                flaws=frozenset(),
            )
        lifetime = None if self.expiry_days in ("Session", None) else int(self.expiry_days)
        entries = tuple(
            CookieAuditEntry(
                key=(f"trust{i + 1}", self.website, "/"),
                secure=bool(self.secure),
                http_only=bool(self.http_only),
                lifetime_days=lifetime,
            )
            for i in range(self.amount or 0)
        )
        flaw_map = {
            "cross-account-reuse": DesignFlaw.CROSS_ACCOUNT_REUSE,
            "predictable-value": DesignFlaw.PREDICTABLE_TIMESTAMP,
        }
        flaws = frozenset({flaw_map[self.flaw]}) if self.flaw in flaw_map else frozenset()
        return TrustCookieAudit(
            cookie_only=True,
            uses_local_storage=False,
            per_cookie=entries,
            flaws=flaws,
        )

    @classmethod
    def from_json(cls, doc: dict) -> "TableRow":
        return cls(
            no=doc["no"],
            website=doc["website"],
            amount=doc.get("amount"),
            http_only=doc.get("httpOnly"),
            secure=doc.get("secure"),
            expiry_days=doc.get("expiryDays"),
            flaw=doc.get("flaw"),
            attack_types=tuple(doc.get("attackTypes", ())),
            notification=doc.get("notification"),
        )


@dataclass(frozen=True)
class SiteRecord:
    domain: str
    rank: int
    registrable: bool
    requires_third_party: bool
    supports_2fa: bool
    can_enable_2fa: bool
    has_remember_device: bool
    cookie_only: bool | None
    methods: frozenset[str] = frozenset()
    table_row: TableRow | None = None

    @classmethod
    def from_json(cls, doc: dict, table_rows: Mapping[int, TableRow] | None = None) -> "SiteRecord":
        row = None
        if table_rows and doc.get("auditRow") is not None:
            row = table_rows.get(doc["auditRow"])
        return cls(
            domain=doc["domain"],
            rank=doc["rank"],
            registrable=doc["registrable"],
            requires_third_party=doc["requiresThirdParty"],
            supports_2fa=doc["supports2fa"],
            can_enable_2fa=doc["canEnable2fa"],
            has_remember_device=doc["hasRememberDevice"],
            cookie_only=doc.get("cookieOnly"),
            methods=frozenset(doc.get("methods", ())),
            table_row=row,
        )


def classify_group(record: SiteRecord) -> SiteGroup:
    """Total partition over 2FA-supporting sites."""
    if not record.supports_2fa:
        raise Unclassifiable(f"{record.domain}: grouping applies to 2FA-supporting sites")
    if not record.registrable:
        return SiteGroup.G4
    if record.requires_third_party:
        return SiteGroup.G3
    if not record.can_enable_2fa:
        return SiteGroup.G5
    if not record.has_remember_device:
        return SiteGroup.G1
    return SiteGroup.G2_COOKIE_ONLY if record.cookie_only else SiteGroup.G2_OTHER


@dataclass
class StatsBundle:
    group_counts: dict[str, int]
    remember_device_total: int
    cookie_only_count: int
    cookie_only_fraction: float
    expiry_histogram: dict[str, int]
    expiry_day_counts: dict[int, int]
    rank_histogram: dict[str, int]
    method_totals: dict[str, int]
    methods_by_count: dict[str, dict[int, int]]
    methods_per_site: dict[int, int]
    notification_counts: dict[str, int]

    def to_json(self) -> dict:
        return {
            "groupCounts": self.group_counts,
            "rememberDeviceTotal": self.remember_device_total,
            "cookieOnlyCount": self.cookie_only_count,
            "cookieOnlyFraction": self.cookie_only_fraction,
            "expiryHistogram": self.expiry_histogram,
            "expiryDayCounts": {str(k): v for k, v in sorted(self.expiry_day_counts.items())},
            "rankHistogram": self.rank_histogram,
            "methodTotals": self.method_totals,
            "methodsByCount": {
                m: {str(k): v for k, v in sorted(by.items())}
                for m, by in self.methods_by_count.items()
            },
            "methodsPerSite": {str(k): v for k, v in sorted(self.methods_per_site.items())},
            "notificationCounts": self.notification_counts,
        }


def aggregate_stats(records: Sequence[SiteRecord]) -> StatsBundle:
    group_counts = {group.value: 0 for group in SiteGroup}
    for record in records:
        group_counts[classify_group(record).value] += 1

    remember_total = group_counts["G2CookieOnly"] + group_counts["G2Other"]
    cookie_only = group_counts["G2CookieOnly"]

    expiry_histogram = {bucket: 0 for bucket in ("<=7", "8-29", "30", "31-364", ">=365", "Session")}
    expiry_day_counts: dict[int, int] = {}
    notification_counts = {f"N{i}": 0 for i in range(1, 7)}
    for record in records:
        row = record.table_row
        if row is None or not record.cookie_only:
            continue
        if row.notification:
            notification_counts[row.notification] += 1
        audit = row.to_audit()
        if not audit.per_cookie:
            continue
        result = audit_expiry(audit.per_cookie)
        expiry_histogram[result.bucket] += 1
        if result.max_lifetime_days is not None:
            expiry_day_counts[result.max_lifetime_days] = (
                expiry_day_counts.get(result.max_lifetime_days, 0) + 1
            )

    rank_histogram: dict[str, int] = {}
    for record in records:
        bucket_start = ((record.rank - 1) // 1000) * 1000 + 1
        label = f"{bucket_start}-{bucket_start + 999}"
        rank_histogram[label] = rank_histogram.get(label, 0) + 1
    rank_histogram = dict(sorted(rank_histogram.items(), key=lambda kv: int(kv[0].split("-")[0])))

    method_totals = {name: 0 for name in METHOD_NAMES}
    methods_by_count: dict[str, dict[int, int]] = {name: {} for name in METHOD_NAMES}
    methods_per_site: dict[int, int] = {}
    for record in records:
        size = len(record.methods)
        if size == 0:
            continue
        methods_per_site[size] = methods_per_site.get(size, 0) + 1
        for method in record.methods:
            if method not in method_totals:
                continue
            method_totals[method] += 1
            methods_by_count[method][size] = methods_by_count[method].get(size, 0) + 1

    return StatsBundle(
        group_counts=group_counts,
        remember_device_total=remember_total,
        cookie_only_count=cookie_only,
        cookie_only_fraction=(cookie_only / remember_total) if remember_total else 0.0,
        expiry_histogram=expiry_histogram,
        expiry_day_counts=expiry_day_counts,
        rank_histogram=rank_histogram,
        method_totals=method_totals,
        methods_by_count=methods_by_count,
        methods_per_site=dict(sorted(methods_per_site.items())),
        notification_counts=notification_counts,
    )


# --- rendering ----------------------------------------------------------------

REPORT_COLUMNS = (
    "No.",
    "Website",
    "Amount",
    "HTTPOnly",
    "Secure",
    "Expiries (days)",
    "Design Flaws",
    "Attack Type",
)


@dataclass(frozen=True)
class ReportRow:
    website: str
    rank: int
    amount: int | None
    http_only: bool | None
    secure: bool | None
    expiry: int | str | None
    design_flaws: tuple[str, ...]
    attack_types: tuple[str, ...]

    def cells(self, number: int) -> tuple[str, ...]:
        return (
            str(number),
            self.website,
            "-" if self.amount is None else str(self.amount),
            _flag_cell(self.http_only),
            _flag_cell(self.secure),
            "-" if self.expiry is None else str(self.expiry),
            ", ".join(self.design_flaws) if self.design_flaws else "-",
            ", ".join(self.attack_types) if self.attack_types else "-",
        )


def _flag_cell(flag: bool | None) -> str:
    if flag is None:
        return "-"
    return "yes" if flag else "no"


def report_row_from_table(row: TableRow, rank: int = 0) -> ReportRow:
    flaw_labels = {
        "cross-account-reuse": "CrossAccountReuse",
        "predictable-value": "PredictableTimestamp",
        "local-storage": "LocalStorage",
        "broken-2fa": "Broken2FA",
    }
    return ReportRow(
        website=row.website,
        rank=rank or row.no,
        amount=row.amount,
        http_only=row.http_only,
        secure=row.secure,
        expiry=row.expiry_days,
        design_flaws=(flaw_labels[row.flaw],) if row.flaw else (),
        attack_types=row.attack_types,
    )


def report_row_from_verdict(doc: dict, website: str = "", rank: int = 0) -> ReportRow:
    """Build a row from an evaluation verdict JSON document."""
    audit = doc.get("audit", {})
    per_cookie = audit.get("perCookie", [])
    amount = len(per_cookie) or None
    lifetimes = [c["lifetimeDays"] for c in per_cookie]
    expiry: int | str | None = None
    numeric = [d for d in lifetimes if isinstance(d, int)]
    if numeric:
        expiry = max(numeric)
    elif lifetimes:
        expiry = "Session"
    if audit.get("usesLocalStorage") and not per_cookie:
        amount = 1
    return ReportRow(
        website=website or doc.get("target", ""),
        rank=rank,
        amount=amount,
        http_only=any(c["httpOnly"] for c in per_cookie) if per_cookie else None,
        secure=any(c["secure"] for c in per_cookie) if per_cookie else None,
        expiry=expiry,
        design_flaws=tuple(audit.get("flaws", ())),
        attack_types=tuple(doc.get("attacks", ())),
    )


def render_report(rows: Sequence[ReportRow], fmt: str) -> str:
    """Render the audit table; ordering is rank then website, deterministic."""
    ordered = sorted(rows, key=lambda r: (r.rank, r.website))
    if fmt == "md":
        lines = [
            "| " + " | ".join(REPORT_COLUMNS) + " |",
            "|" + "|".join(" --- " for _ in REPORT_COLUMNS) + "|",
        ]
        for number, row in enumerate(ordered, start=1):
            lines.append("| " + " | ".join(row.cells(number)) + " |")
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for number, row in enumerate(ordered, start=1):
            writer.writerow(row.cells(number))
        return buffer.getvalue()
    if fmt == "json":
        docs = []
        for number, row in enumerate(ordered, start=1):
            cells = row.cells(number)
            docs.append({column: cell for column, cell in zip(REPORT_COLUMNS, cells)})
        return json.dumps(docs, indent=2) + "\n"
    raise UnsupportedFormat(f"unknown report format {fmt!r}")


# --- mitigations ----------------------------------------------------------------

MITIGATION_TEXT = {
    "SetSecure": "Set the Secure attribute on every trust cookie.",
    "SetHttpOnly": "Set the HttpOnly attribute on every trust cookie.",
    "ShortenExpiry": "Expire trust cookies within a few days rather than weeks or months.",
    "AddRiskFactors": (
        "Combine additional risk signals (browser fingerprint, IP/geolocation, "
        "behavioral analytics) instead of trusting cookies alone."
    ),
    "EnableNotifications": "Alert the account owner when a new or unusual device signs in.",
}


def recommend_mitigations(verdict) -> list[str]:
    """Rule-driven hardening recommendations for one evaluated target."""
    audit = verdict.audit if hasattr(verdict, "audit") else None
    if audit is not None:
        per_cookie = audit.per_cookie
        flaws = sorted(f.value for f in audit.flaws)
        cookie_only = audit.cookie_only
        lifetimes = [e.lifetime_days for e in per_cookie if e.lifetime_days is not None]
        notification = verdict.notification
        secure_flags = [e.secure for e in per_cookie]
        http_only_flags = [e.http_only for e in per_cookie]
    else:  # verdict JSON document
        doc = verdict.get("audit", {})
        per_cookie = doc.get("perCookie", [])
        flaws = sorted(doc.get("flaws", ()))
        cookie_only = doc.get("cookieOnly", False)
        lifetimes = [
            c["lifetimeDays"] for c in per_cookie if isinstance(c.get("lifetimeDays"), int)
        ]
        notification = verdict.get("notification")
        secure_flags = [c["secure"] for c in per_cookie]
        http_only_flags = [c["httpOnly"] for c in per_cookie]

    if "Broken2FA" in flaws:
        return ["FixLogic(Broken2FA)"]
    recommendations: list[str] = []
    if secure_flags and not all(secure_flags):
        recommendations.append("SetSecure")
    if http_only_flags and not all(http_only_flags):
        recommendations.append("SetHttpOnly")
    if lifetimes and max(lifetimes) > 7:
        recommendations.append("ShortenExpiry")
    if cookie_only:
        recommendations.append("AddRiskFactors")
    if notification is None:
        recommendations.append("EnableNotifications")
    recommendations.extend(f"FixLogic({flaw})" for flaw in flaws)
    return recommendations


# --- fixture loading -------------------------------------------------------------


def load_table_rows(path: str | Path | None = None) -> list[TableRow]:
    source = Path(path) if path else fixture_path("paper", "table3_7.json")
    doc = json.loads(Path(source).read_text(encoding="utf-8"))
    return [TableRow.from_json(entry) for entry in doc["rows"]]


def load_sites(path: str | Path | None = None, table_rows: Sequence[TableRow] | None = None) -> list[SiteRecord]:
    source = Path(path) if path else fixture_path("paper", "sites.json")
    doc = json.loads(Path(source).read_text(encoding="utf-8"))
    rows_by_no = {row.no: row for row in (table_rows or load_table_rows())}
    return [SiteRecord.from_json(entry, rows_by_no) for entry in doc["sites"]]


def load_notification_table(path: str | Path | None = None) -> dict[str, int]:
    source = Path(path) if path else fixture_path("paper", "table6.json")
    doc = json.loads(Path(source).read_text(encoding="utf-8"))
    return {key: int(value) for key, value in doc["counts"].items()}


def load_methods_table(path: str | Path | None = None) -> dict[str, dict]:
    source = Path(path) if path else fixture_path("paper", "table4.json")
    doc = json.loads(Path(source).read_text(encoding="utf-8"))
    return doc["methods"]


def load_directory_comparison(path: str | Path | None = None) -> tuple[list[str], list[str]]:
    source = Path(path) if path else fixture_path("paper", "directory.json")
    doc = json.loads(Path(source).read_text(encoding="utf-8"))
    return list(doc["baselineDomains"]), list(doc["spiderDomains"])
