#!/usr/bin/env python3
"""Build the bundled fixture files deterministically.

Outputs (committed to the repo, regenerate only when the encoding changes):
  src/se2fa/fixtures/paper/    reference dataset: audit table, sites,
                               notification and method tables, directory sets
  src/se2fa/fixtures/spider/   labeled synthetic search corpus
  src/se2fa/fixtures/testbed/  24-target variant matrix with expected verdicts

Every published aggregate the test suite pins is re-derived and asserted
here, so a transcription slip fails the build instead of shipping.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "src" / "se2fa" / "fixtures"

# --- audit table (95 rows) -----------------------------------------------------
# (no, website, amount, httpOnly, secure, expiryDays, flaw, attacks)
# expiry "S" = session cookies; None = no cookie artifact to audit.
T = True
F = False
ROWS = [
    (1, "Social Networking - 1", 1, T, T, 3, None, ["A3"]),
    (2, "Computers & Technology - 1", 1, T, T, 400, None, ["A3"]),
    (3, "Professional Networking - 1", 2, T, T, 17, None, ["A3"]),
    (4, "Shopping - 1", 1, T, T, 365, None, ["A3"]),
    (5, "Personal StorageComputers & Technology - 1", 1, T, T, 90, None, ["A3"]),
    (6, "Computers & Technology - 2", 1, T, T, 100, None, ["A3"]),
    (7, "Computers & Technology - 3", 1, T, T, 30, None, ["A3"]),
    (8, "Games - 1", 1, T, T, 400, None, ["A3"]),
    (9, "Games - 2", 1, T, T, 90, None, ["A3"]),
    (10, "Search Engines & Portals - 1", 1, F, F, 365, None, ["A1", "A2", "A3"]),
    (11, "BusinessComputers & Technology - 1", 1, T, T, 365, None, ["A3"]),
    (12, "Personal Storage - 1", 1, T, T, 400, None, ["A3"]),
    (13, "Computers & Technology - 4", 1, T, T, 30, None, ["A3"]),
    (14, "Business - 1", 1, T, T, 14, None, ["A3"]),
    (15, "GamesForums & Newsgroups - 1", 1, T, T, 30, "cross-account-reuse", ["A3", "A4"]),
    (16, "Business - 2", 1, T, T, 180, None, ["A3"]),
    (17, "Shopping - 2", 1, F, T, 365, None, ["A2", "A3"]),
    (18, "Games - 3", 1, T, T, 400, None, ["A3"]),
    (19, "Business - 3", 1, T, T, 30, None, ["A3"]),
    (20, "Computers & Technology - 5", 1, F, T, 30, None, ["A2", "A3"]),
    (21, "Computers & Technology - 6", 1, T, T, 90, None, ["A3"]),
    (22, "Search Engines & Portals - 2", 1, T, T, 30, None, ["A3"]),
    (23, "Computers & Technology - 7", 1, F, T, 30, None, ["A2", "A3"]),
    (24, "Pornography/Sexually Explicit - 1", 1, T, T, 400, None, ["A3"]),
    (25, "Business - 4", 2, T, T, 365, None, ["A3"]),
    (26, "Education - 1", 1, T, T, 200, None, ["A3"]),
    (27, "Social NetworkingArts - 1", 1, T, T, 200, None, ["A3"]),
    (28, "Computers & Technology - 8", 1, T, T, 30, None, ["A3"]),
    (29, "Social NetworkingEntertainmentBusiness - 1", 1, T, T, "S", None, ["A3"]),
    (30, "Games - 4", 1, T, T, 400, None, ["A3"]),
    (31, "Business - 5", 2, T, T, 30, None, ["A3"]),
    (32, "Computers & Technology - 9", 2, T, T, 7, None, ["A3"]),
    (33, "Remote Access - 1", 1, T, T, 2, None, ["A3"]),
    (34, "Computers & Technology - 10", 1, T, T, 365, None, ["A3"]),
    (35, "Pornography/Sexually Explicit - 2", 1, T, T, 400, None, ["A3"]),
    (36, "Computers & Technology - 11", 1, T, T, 14, None, ["A3"]),
    (37, "Computers & Technology - 12", 1, T, T, 30, None, ["A3"]),
    (38, "Computers & Technology - 13", 1, F, F, 92, None, ["A1", "A2", "A3"]),
    (39, "Computers & Technology - 14", 1, F, T, 7, None, ["A2", "A3"]),
    (40, "Computers & Technology - 15", 1, T, F, 30, None, ["A1", "A3"]),
    (41, "BusinessComputers & Technology - 2", 1, T, T, 400, None, ["A3"]),
    (42, "Games - 5", 1, T, T, 30, None, ["A3"]),
    (43, "FinanceComputers & Technology - 1", 1, T, T, 30, None, ["A3"]),
    (44, "Education - 2", 1, T, T, 400, None, ["A3"]),
    (45, "Computers & Technology - 16", 1, T, T, 90, None, ["A3"]),
    (46, "Computers & Technology - 17", 1, T, T, 7, None, ["A3"]),
    (47, "Image Sharing - 1", 1, T, T, 30, None, ["A3"]),
    (48, "Computers & TechnologyBusiness - 1", 1, T, T, 30, None, ["A3"]),
    (49, "Computers & Technology - 18", 1, T, T, 30, None, ["A3"]),
    (50, "Information Security - 1", 1, T, T, 90, None, ["A3"]),
    (51, "EntertainmentForums & Newsgroups - 1", 2, T, T, 400, None, ["A3"]),
    (52, "Computers & Technology - 19", 1, T, T, 365, None, ["A3"]),
    (53, "EntertainmentStreaming Media & Downloads - 1", 1, T, T, 400, None, ["A3"]),
    (54, "Computers & Technology - 20", 1, T, T, 365, None, ["A3"]),
    (55, "Computers & Technology - 21", 1, T, T, 365, None, ["A3"]),
    (56, "BusinessComputers & Technology - 3", 2, T, T, 365, None, ["A3"]),
    (57, "Games - 6", 1, T, T, 90, None, ["A3"]),
    (58, "Computers & TechnologyBusiness - 2", 2, T, T, 30, None, ["A3"]),
    (59, "Real Estate - 1", 1, T, F, 400, None, ["A1", "A3"]),
    (60, "Business - 6", 2, T, T, 7, None, ["A3"]),
    (61, "Computers & Technology - 22", 1, T, T, 180, None, ["A3"]),
    (62, "Computers & Technology - 23", 2, T, T, 30, None, ["A3"]),
    (63, "ShoppingComputers & Technology - 1", 1, F, T, 400, None, ["A2", "A3"]),
    (64, "Computers & Technology - 24", 1, T, T, 365, None, ["A3"]),
    (65, "Computers & Technology - 25", 1, T, T, 7, "predictable-value", ["A3", "A4"]),
    (66, "Transportation - 1", 2, F, F, 30, None, ["A1", "A2", "A3"]),
    (67, "Computers & Technology - 26", 2, T, T, 30, None, ["A3"]),
    (68, "Shopping - 3", 2, T, T, 7, None, ["A3"]),
    (69, "Business - 7", 2, F, F, "S", None, ["A1", "A2", "A3"]),
    (70, "GamesShopping - 1", 1, T, T, 400, None, ["A3"]),
    (71, "Government - 1", 1, T, T, 30, None, ["A3"]),
    (72, "Business - 8", 1, T, T, 14, None, ["A3"]),
    (73, "GamesForums & Newsgroups - 2", 1, T, T, 45, None, ["A3"]),
    (74, "Computers & TechnologyBusiness - 3", 2, T, T, 30, None, ["A3"]),
    (75, "Remote Access - 2", 1, T, T, 365, None, ["A3"]),
    (76, "Real EstateComputers & Technology - 1", 1, T, T, 7, None, ["A3"]),
    (77, "Computers & Technology - 27", 1, T, T, 30, None, ["A3"]),
    (78, "Business - 9", 2, F, T, 30, None, ["A2", "A3"]),
    (79, "BusinessComputers & Technology - 4", 1, T, T, 14, None, ["A3"]),
    (80, "Shopping - 4", 1, T, T, 365, None, ["A3"]),
    (81, "Health & Medicine - 1", 1, T, T, 30, None, ["A3"]),
    (82, "Image Sharing - 2", 1, F, F, 30, None, ["A1", "A2", "A3"]),
    (83, "Computers & Technology - 28", 1, T, T, 400, "predictable-value", ["A3", "A4"]),
    (84, "Government - 2", 1, T, T, 30, None, ["A3"]),
    (85, "Computers & Technology - 29", 2, T, T, 45, None, ["A3"]),
    (86, "Shopping - 5", 2, T, T, 365, None, ["A3"]),
    (87, "Computers & Technology - 30", 1, T, T, "S", None, ["A3"]),
    (88, "BusinessComputers & Technology - 5", 1, T, T, 30, None, ["A3"]),
    (89, "Computers & Technology - 31", 2, T, T, 14, None, ["A3"]),
    (90, "Computers & Technology - 32", 1, T, T, 30, None, ["A3"]),
    (91, "Computers & Technology - 33", 1, T, F, 30, None, ["A1", "A3"]),
    (92, "BusinessComputers & Technology - 6", 1, T, T, 365, None, ["A3"]),
    (93, "Computers & Technology - 34", 1, None, None, None, "local-storage", ["A2", "A3"]),
    (94, "Games - 7", None, None, None, None, "broken-2fa", ["A4"]),
    (95, "ShoppingEntertainment - 1", None, None, None, None, "broken-2fa", ["A4"]),
]

NOTIFICATION_PLAN = [("N1", 24), ("N2", 12), ("N3", 5), ("N4", 2), ("N5", 1), ("N6", 1)]

# method -> count of sites offering it among sites with exactly k methods (k=1..5)
METHOD_MATRIX = {
    "SMS": [46, 126, 99, 52, 7],
    "PhoneCall": [4, 19, 40, 46, 7],
    "SpecificApp": [62, 19, 18, 14, 5],
    "HardwareToken": [2, 17, 32, 21, 5],
    "Email": [58, 65, 43, 26, 5],
    "Passkey": [0, 6, 6, 4, 3],
    "AuthenticatorApp": [356, 141, 101, 45, 7],
    "Biometrics": [3, 3, 0, 2, 1],
    "RecoveryCode": [2, 6, 6, 2, 0],
}

GROUP_SIZES = {"G1": 227, "G2CookieOnly": 93, "G2Other": 87, "G3": 62, "G4": 430, "G5": 11}
RANK_BUCKET_ALLOCATION = [280, 150, 110, 90, 70, 60, 50, 42, 33, 25]

DIRECTORY_SHARED = 421
DIRECTORY_ONLY = 112
SPIDER_ONLY = 377


def check_table() -> None:
    assert len(ROWS) == 95
    cookie_rows = [r for r in ROWS if isinstance(r[2], int) and r[6] != "local-storage"]
    assert len(cookie_rows) == 92
    missing_secure = [r for r in cookie_rows if r[4] is False]
    missing_http_only = [r for r in cookie_rows if r[3] is False]
    assert len(missing_secure) == 8, len(missing_secure)
    assert len(missing_http_only) == 11, len(missing_http_only)
    numeric = [r[5] for r in cookie_rows if isinstance(r[5], int)]
    assert len(numeric) == 89
    sessions = [r for r in cookie_rows if r[5] == "S"]
    assert len(sessions) == 3
    assert sum(1 for d in numeric if d <= 7) == 9
    assert sum(1 for d in numeric if d == 30) == 30
    assert sum(1 for d in numeric if d == 400) == 15
    assert sum(1 for d in numeric if d >= 365) == 30
    assert sum(1 for d in numeric if d >= 30) == 74
    # no websites repeated
    names = [r[1] for r in ROWS]
    assert len(names) == len(set(names))


def derive_attacks(row) -> list[str]:
    _, _, amount, http_only, secure, _, flaw, _ = row
    if flaw == "broken-2fa":
        return ["A4"]
    attacks = {"A3"}
    if flaw == "local-storage":
        attacks.add("A2")
    else:
        if secure is False:
            attacks.add("A1")
        if http_only is False:
            attacks.add("A2")
        if flaw is not None:
            attacks.add("A4")
    return sorted(attacks)


def build_table() -> list[dict]:
    check_table()
    notifications = []
    for code, count in NOTIFICATION_PLAN:
        notifications.extend([code] * count)
    rows = []
    for row in ROWS:
        no, website, amount, http_only, secure, expiry, flaw, attacks = row
        assert derive_attacks(row) == sorted(attacks), f"row {no} attack mismatch"
        rows.append(
            {
                "no": no,
                "website": website,
                "amount": amount,
                "httpOnly": http_only,
                "secure": secure,
                "expiryDays": "Session" if expiry == "S" else expiry,
                "flaw": flaw,
                "attackTypes": attacks,
                "notification": notifications[no - 1] if no <= len(notifications) else None,
            }
        )
    return rows


def build_method_sets() -> list[frozenset[str]]:
    """Greedy realization of the method/methods-count contingency table."""
    methods = list(METHOD_MATRIX)
    sets: list[frozenset[str]] = []
    for k in range(1, 6):
        remaining = {m: METHOD_MATRIX[m][k - 1] for m in methods}
        total = sum(remaining.values())
        assert total % k == 0
        count = total // k
        for _ in range(count):
            chosen = sorted(remaining, key=lambda m: (-remaining[m], methods.index(m)))[:k]
            assert all(remaining[m] > 0 for m in chosen)
            for m in chosen:
                remaining[m] -= 1
            sets.append(frozenset(chosen))
        assert all(v == 0 for v in remaining.values()), remaining
    assert len(sets) == 910
    totals = {m: sum(1 for s in sets if m in s) for m in methods}
    assert totals == {m: sum(METHOD_MATRIX[m]) for m in methods}
    return sets


def build_sites(table_rows: list[dict]) -> list[dict]:
    rng = random.Random(20240610)
    sites: list[dict] = []

    def record(domain, registrable, third_party, can_enable, remember, cookie_only, audit_row=None):
        sites.append(
            {
                "domain": domain,
                "rank": 0,
                "registrable": registrable,
                "requiresThirdParty": third_party,
                "supports2fa": True,
                "canEnable2fa": can_enable,
                "hasRememberDevice": remember,
                "cookieOnly": cookie_only,
                "methods": [],
                "auditRow": audit_row,
            }
        )

    for row in table_rows[:93]:
        record(row["website"], True, False, True, True, True, audit_row=row["no"])
    for i in range(GROUP_SIZES["G2Other"]):
        record(f"Other Measures - {i + 1}", True, False, True, True, False)
    # The two targets whose 2FA never challenges expose no remember-device
    # behavior; they sit in G1 but keep their audit rows for traceability.
    record("Games - 7", True, False, True, False, None, audit_row=94)
    record("ShoppingEntertainment - 1", True, False, True, False, None, audit_row=95)
    for i in range(GROUP_SIZES["G1"] - 2):
        record(f"Registered Site - {i + 1}", True, False, True, False, None)
    for i in range(GROUP_SIZES["G3"]):
        record(f"Third Party - {i + 1}", True, True, True, False, None)
    for i in range(GROUP_SIZES["G4"]):
        record(f"Restricted Site - {i + 1}", False, False, False, False, None)
    for i in range(GROUP_SIZES["G5"]):
        record(f"Locked 2FA - {i + 1}", True, False, False, False, None)
    assert len(sites) == 910

    # ranks: denser 2FA support in the higher buckets
    ranks: list[int] = []
    for bucket, count in enumerate(RANK_BUCKET_ALLOCATION):
        offsets = sorted(rng.sample(range(1, 1001), count))
        ranks.extend(bucket * 1000 + offset for offset in offsets)
    assert len(ranks) == 910 and len(set(ranks)) == 910
    order = list(range(910))
    rng.shuffle(order)
    for rank, index in zip(ranks, order):
        sites[index]["rank"] = rank

    method_sets = build_method_sets()
    assignment = list(range(910))
    rng.shuffle(assignment)
    for method_set, index in zip(method_sets, assignment):
        sites[index]["methods"] = sorted(method_set)

    sites.sort(key=lambda s: s["rank"])
    return sites


def build_directory() -> dict:
    shared = [f"shared-{i:04d}.example" for i in range(1, DIRECTORY_SHARED + 1)]
    directory_only = [f"directory-only-{i:04d}.example" for i in range(1, DIRECTORY_ONLY + 1)]
    spider_only = [f"spider-only-{i:04d}.example" for i in range(1, SPIDER_ONLY + 1)]
    return {
        "baselineDomains": shared + directory_only,
        "spiderDomains": shared + spider_only,
    }


def build_spider_corpus() -> tuple[list[dict], dict[str, bool]]:
    docs: list[dict] = []
    labels: dict[str, bool] = {}

    def doc(domain, title, snippet, url, engine="google"):
        docs.append(
            {
                "domain": domain,
                "sourceEngine": engine,
                "title": title,
                "snippet": snippet,
                "url": url,
            }
        )

    for i in range(1, 31):
        domain = f"site-{i:03d}.example"
        labels[domain] = True
        doc(domain, f"How to enable 2FA on {domain}", "Step by step security guide.", f"https://docs.{domain}/security")
        doc(domain, f"{domain} two-factor and MFA setup guide", "Protect your account.", f"https://{domain}/help")
        doc(domain, f"Review: shopping on {domain}", f"Visit {domain} for deals and recipes.", f"https://blog.example/{i}")
        doc(domain, "MFA two-step hardening tips", "General advice for admins.", f"https://news.example/{i}", engine="bing")
        doc(domain, f"Protect your {domain} account with two-step verification", "Account safety.", f"https://{domain}/blog", engine="yandex")
    for i in range(31, 49):
        domain = f"site-{i:03d}.example"
        labels[domain] = False
        doc(domain, f"{domain} launches new cooking show", "Celebrity chefs join the lineup.", f"https://tv.example/{i}")
        doc(domain, "Enable 2FA on your favorite sites today", "A general security reminder.", f"https://security.example/{i}", engine="yahoo")
        doc(domain, f"{domain} pricing and plans", "Compare subscription tiers.", f"https://{domain}/pricing")
    assert len(labels) == 48 and len(docs) == 30 * 5 + 18 * 3
    return docs, labels


# --- testbed matrix -------------------------------------------------------------

DAY = 86400


def account_material(config_id: str, username: str) -> tuple[str, str]:
    """Deterministic password and OTP seed for a matrix test account."""
    password = f"{username}#pass#{config_id}"
    seed = f"seed::{config_id}::{username}::0123456789abcdef"
    return password, seed


def build_matrix() -> dict:
    import hashlib

    def accounts(config_id):
        out = []
        for username in ("alice", "bob"):
            password, seed = account_material(config_id, username)
            out.append(
                {
                    "username": username,
                    "passwordHash": hashlib.sha256(password.encode()).hexdigest(),
                    "totpSeed": seed,
                }
            )
        return out

    def cookie(name, scheme, secure=True, http_only=True, max_age=30 * DAY):
        return {
            "name": name,
            "valueScheme": scheme,
            "secure": secure,
            "httpOnly": http_only,
            "maxAgeSeconds": max_age,
        }

    def measures(cookie=False, fingerprint=False, ip=False, token=False):
        return {
            "cookieBased": cookie,
            "fingerprintBased": fingerprint,
            "ipBased": ip,
            "deviceTokenBased": token,
        }

    def lifetime(max_age):
        return "Session" if max_age is None else -(-max_age // DAY)

    targets = []

    def target(config_id, *, controls, cookies=(), placement="AtChallenge", decoys=1,
               broken=False, notification=None, attacks, flaws):
        expected_lifetimes = {c["name"]: lifetime(c["maxAgeSeconds"]) for c in cookies}
        targets.append(
            {
                "id": config_id,
                "riskControls": controls,
                "rememberPlacement": placement,
                "trustCookies": list(cookies),
                "decoyCookies": decoys,
                "broken2fa": broken,
                "notification": notification,
                "accounts": accounts(config_id),
                "expected": {
                    "measures": controls if not broken else measures(),
                    "trustCookieNames": sorted(c["name"] for c in cookies),
                    "attacks": sorted(attacks),
                    "flaws": sorted(flaws),
                    "notification": notification,
                    "lifetimeDays": expected_lifetimes,
                },
            }
        )

    target("t01-cookie-random-strict", controls=measures(cookie=True),
           cookies=[cookie("trust_device", "Random128")], decoys=2,
           notification="N1", attacks=["A3"], flaws=[])
    target("t02-cookie-random-nosecure", controls=measures(cookie=True),
           cookies=[cookie("trust_token", "Random128", secure=False, max_age=90 * DAY)],
           notification="N2", attacks=["A1", "A3"], flaws=[])
    target("t03-cookie-random-nohttponly", controls=measures(cookie=True),
           cookies=[cookie("device_ok", "Random128", http_only=False)], decoys=2,
           notification="N3", attacks=["A2", "A3"], flaws=[])
    target("t04-cookie-random-bareflags", controls=measures(cookie=True),
           cookies=[cookie("remember", "Random128", secure=False, http_only=False, max_age=365 * DAY)],
           notification=None, attacks=["A1", "A2", "A3"], flaws=[])
    target("t05-cookie-fixed-account", controls=measures(cookie=True),
           cookies=[cookie("trusted", "FixedPerAccount")], decoys=2,
           notification="N1", attacks=["A3", "A4"], flaws=["FixedValue"])
    target("t06-cookie-global-shared", controls=measures(cookie=True),
           cookies=[cookie("org_trust", "GlobalShared", max_age=90 * DAY)],
           notification="N2", attacks=["A3", "A4"],
           flaws=["CrossAccountReuse", "FixedValue"])
    target("t07-cookie-ts-seconds", controls=measures(cookie=True),
           cookies=[cookie("otp_time", "TimestampSeconds")], decoys=2,
           notification=None, attacks=["A3", "A4"], flaws=["PredictableTimestamp"])
    target("t08-cookie-ts-millis", controls=measures(cookie=True),
           cookies=[cookie("verified_ms", "TimestampMillis")],
           notification="N3", attacks=["A3", "A4"], flaws=["PredictableTimestamp"])
    target("t09-cookie-base64-profile", controls=measures(cookie=True),
           cookies=[cookie("profile_b64", "Base64Profile")], decoys=2,
           notification="N1", attacks=["A3", "A4"], flaws=["SensitiveEncoding"])
    target("t10-broken-2fa-a", controls=measures(), broken=True,
           notification=None, attacks=["A4"], flaws=["Broken2FA"])
    target("t11-broken-2fa-b", controls=measures(), broken=True, decoys=0,
           notification=None, attacks=["A4"], flaws=["Broken2FA"])
    target("t12-cookie-fingerprint", controls=measures(cookie=True, fingerprint=True),
           cookies=[cookie("trust_fp", "Random128")], decoys=2,
           notification="N1", attacks=[], flaws=[])
    target("t13-cookie-ip", controls=measures(cookie=True, ip=True),
           cookies=[cookie("trust_ip", "Random128")],
           notification="N3", attacks=[], flaws=[])
    target("t14-localstorage", controls=measures(token=True), decoys=2,
           notification="N1", attacks=["A2", "A3"], flaws=[])
    target("t15-remember-me", controls=measures(cookie=True), placement="RememberMe",
           cookies=[cookie("keep_signed_in", "Random128", max_age=365 * DAY)],
           notification="N2", attacks=["A3"], flaws=[])
    target("t16-in-settings", controls=measures(cookie=True), placement="InSettings",
           cookies=[cookie("settings_trust", "Random128")], decoys=2,
           notification=None, attacks=["A3"], flaws=[])
    target("t17-two-cookies", controls=measures(cookie=True),
           cookies=[cookie("pair_a", "Random128", max_age=17 * DAY),
                    cookie("pair_b", "Random128", max_age=17 * DAY)], decoys=2,
           notification="N1", attacks=["A3"], flaws=[])
    target("t18-session-cookie", controls=measures(cookie=True),
           cookies=[cookie("session_trust", "Random128", max_age=None)],
           notification=None, attacks=["A3"], flaws=[])
    target("t19-long-400d", controls=measures(cookie=True),
           cookies=[cookie("long_trust", "Random128", max_age=400 * DAY)],
           notification="N2", attacks=["A3"], flaws=[])
    target("t20-short-7d", controls=measures(cookie=True),
           cookies=[cookie("short_trust", "Random128", max_age=7 * DAY)], decoys=2,
           notification="N1", attacks=["A3"], flaws=[])
    target("t21-cookie-fp-ip", controls=measures(cookie=True, fingerprint=True, ip=True),
           cookies=[cookie("strict_trust", "Random128")],
           notification="N3", attacks=[], flaws=[])
    target("t22-mixed-flags", controls=measures(cookie=True),
           cookies=[cookie("good_cookie", "Random128", max_age=90 * DAY),
                    cookie("weak_cookie", "Random128", secure=False, http_only=False, max_age=90 * DAY)],
           notification=None, attacks=["A3"], flaws=[])
    target("t23-ts-nohttponly", controls=measures(cookie=True),
           cookies=[cookie("when_auth", "TimestampSeconds", http_only=False)],
           notification="N2", attacks=["A2", "A3", "A4"], flaws=["PredictableTimestamp"])
    target("t24-global-bare", controls=measures(cookie=True),
           cookies=[cookie("corp_trust", "GlobalShared", secure=False, http_only=False, max_age=365 * DAY)],
           decoys=2, notification="N3", attacks=["A1", "A2", "A3", "A4"],
           flaws=["CrossAccountReuse", "FixedValue"])

    assert len(targets) == 24
    schemes = {c["valueScheme"] for t in targets for c in t["trustCookies"]}
    assert schemes == {"Random128", "FixedPerAccount", "GlobalShared",
                       "TimestampSeconds", "TimestampMillis", "Base64Profile"}
    notif = {t["notification"] for t in targets}
    assert notif == {"N1", "N2", "N3", None}
    placements = {t["rememberPlacement"] for t in targets}
    assert placements == {"AtChallenge", "InSettings", "RememberMe"}
    return {"targets": targets}


FIXTURE_README = """\
# Reference dataset

Regression fixtures for the reporting and classification layers. All files
are generated by `tools/build_fixtures.py`; edit that script, not these
files.

- `table3_7.json` — trust-cookie audit table for the 95 anonymized sites
  whose remember-device implementation was evaluated end to end: cookie
  amount, HttpOnly/Secure flags, expiry in days (or `Session`), planted
  design flaw, published attack typing, and the notification behavior
  observed on new-device logins (45 of the 93 browser-storage sites alert;
  counts match `table6.json`).
- `sites.json` — the full 910-site corpus with group assignments
  (227 / 93+87 / 62 / 430 / 11), Tranco-style ranks, and per-site 2FA
  verification methods whose marginals reproduce `table4.json` exactly.
- `table6.json` — notification-type counts (N1..N6 = 24/12/5/2/1/1).
- `table4.json` — verification-method counts split by how many methods a
  site offers.
- `directory.json` — directory-vs-crawler comparison sets
  (533 baseline / 798 crawler / 421 shared).

Known wrinkle: the audit table tallies 15 sites with 400-day expiries while
the companion summary statistic quotes 14 (multi-cookie rows make the
prose count ambiguous). Aggregate checks therefore pin the table tally
exactly and accept the quoted figure within ±1.
"""


def main() -> None:
    paper = FIXTURES / "paper"
    spider = FIXTURES / "spider"
    testbed = FIXTURES / "testbed"
    for directory in (paper, spider, testbed):
        directory.mkdir(parents=True, exist_ok=True)

    table_rows = build_table()
    (paper / "table3_7.json").write_text(
        json.dumps({"rows": table_rows}, indent=1) + "\n", encoding="utf-8"
    )

    sites = build_sites(table_rows)
    (paper / "sites.json").write_text(
        json.dumps({"sites": sites}, indent=1) + "\n", encoding="utf-8"
    )

    (paper / "table6.json").write_text(
        json.dumps(
            {
                "counts": dict(NOTIFICATION_PLAN),
                "descriptions": {
                    "N1": "New device login notification only",
                    "N2": "New device login time and location notification",
                    "N3": "Abnormal IP login notification",
                    "N4": "Suspicious login verification",
                    "N5": "Unauthorized login attempt notification and automatic password reset",
                    "N6": "Notification that the 2FA code is incorrect but the account password is correct",
                },
            },
            indent=1,
        )
        + "\n",
        encoding="utf-8",
    )

    (paper / "table4.json").write_text(
        json.dumps(
            {
                "methods": {
                    name: {
                        "total": sum(by_count),
                        "byCount": {str(k + 1): v for k, v in enumerate(by_count)},
                    }
                    for name, by_count in METHOD_MATRIX.items()
                }
            },
            indent=1,
        )
        + "\n",
        encoding="utf-8",
    )

    (paper / "directory.json").write_text(
        json.dumps(build_directory(), indent=1) + "\n", encoding="utf-8"
    )
    (paper / "README.md").write_text(FIXTURE_README, encoding="utf-8")

    docs, labels = build_spider_corpus()
    with open(spider / "corpus.jsonl", "w", encoding="utf-8") as handle:
        for doc in docs:
            handle.write(json.dumps(doc) + "\n")
    (spider / "labels.json").write_text(json.dumps(labels, indent=1) + "\n", encoding="utf-8")
    (spider / "domains.txt").write_text(
        "\n".join(sorted(labels)) + "\n", encoding="utf-8"
    )
    (spider / "baseline.txt").write_text(
        "\n".join(sorted(d for d, positive in labels.items() if positive)) + "\n",
        encoding="utf-8",
    )

    (testbed / "matrix24.json").write_text(
        json.dumps(build_matrix(), indent=1) + "\n", encoding="utf-8"
    )

    print(f"fixtures written under {FIXTURES}")


if __name__ == "__main__":
    main()
