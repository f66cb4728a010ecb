"""se2fa command line interface.

Subcommands:
  testbed    serve mock 2FA targets from a matrix file
  evaluate   run the full evaluation pipeline against one target
  audit      static attribute/value analysis of an exported cookie snapshot
  spider     corpus-mode 2FA-support detection and baseline comparison
  report     render audit tables and aggregate statistics
  flow       execute a scripted flow and export labeled snapshots
  diff       diff two snapshot interchange files
"""

from __future__ import annotations

import argparse
import json
import signal
import sys
import time
from pathlib import Path

from .attacks import (
    DesignFlaw,
    TrustCookieAudit,
    audit_expiry,
    classify_attack_surface,
    CookieAuditEntry,
    screen_value,
)
from .cookies import diff_snapshots, parse_snapshot, serialize_snapshot
from .evaluator import (
    DEFAULT_ATTACKER,
    DEFAULT_VICTIM,
    EvaluationSettings,
    evaluate_target,
    save_verdict,
)
from .flows import SessionEnv, load_credentials, load_flow_script, execute_flow
from .probes import DeviceProfile
from .reporting import (
    aggregate_stats,
    load_sites,
    load_table_rows,
    render_report,
    report_row_from_table,
    report_row_from_verdict,
)
from .spider import (
    ScoreConfig,
    compare_with_baseline,
    load_corpus,
    load_domains,
    run_spider,
)
from .testbed import load_matrix, serve_matrix


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = getattr(args, "handler", None)
    if handler is None:
        parser.print_help()
        return 2
    return handler(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="se2fa", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("testbed", help="serve mock 2FA targets")
    p.add_argument("--config", required=True, help="matrix JSON file")
    p.add_argument("--base-port", type=int, default=8440)
    p.add_argument("--expose-truth", action="store_true")
    p.add_argument("--tls", action="store_true")
    p.set_defaults(handler=cmd_testbed)

    p = sub.add_parser("evaluate", help="evaluate one target")
    p.add_argument("--target", required=True, help="base URL")
    p.add_argument("--creds", required=True, help="credentials JSON file")
    p.add_argument("--creds2", help="second account credentials (flaw battery)")
    p.add_argument("--out", required=True, help="verdict output path")
    p.add_argument("--victim-fingerprint", default=DEFAULT_VICTIM.fingerprint)
    p.add_argument("--victim-ip", default=DEFAULT_VICTIM.ip)
    p.add_argument("--attacker-fingerprint", default=DEFAULT_ATTACKER.fingerprint)
    p.add_argument("--attacker-ip", default=DEFAULT_ATTACKER.ip)
    p.add_argument(
        "--no-secure-context",
        action="store_true",
        help="simulate an insecure channel (Secure cookies withheld)",
    )
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("audit", help="static analysis of a cookie snapshot")
    p.add_argument("--cookies", required=True, help="interchange snapshot file")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_audit)

    p = sub.add_parser("spider", help="corpus-mode 2FA support detection")
    p.add_argument("--corpus", required=True, help="JSONL of search documents")
    p.add_argument("--domains", required=True, help="domains file, one per line")
    p.add_argument("--threshold", type=int, default=None)
    p.add_argument("--terms-config", help="scoring config JSON")
    p.add_argument("--baseline", help="directory baseline, one domain per line")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_spider)

    p = sub.add_parser("report", help="render audit tables and statistics")
    p.add_argument("--verdicts", help="verdict JSON file or directory")
    p.add_argument("--sites", help="sites fixture JSON")
    p.add_argument("--table", help="audit table fixture JSON")
    p.add_argument("--format", default="md", choices=("json", "csv", "md"))
    p.add_argument("--out", required=True)
    p.add_argument("--stats", help="also write aggregate statistics JSON here")
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("flow", help="run a scripted flow, exporting snapshots")
    p.add_argument("--target", required=True)
    p.add_argument("--script", required=True, help="flow script JSON file")
    p.add_argument("--creds", required=True)
    p.add_argument("--export-snapshots", help="directory for labeled snapshot files")
    p.add_argument("--fingerprint", default=DEFAULT_VICTIM.fingerprint)
    p.add_argument("--ip", default=DEFAULT_VICTIM.ip)
    p.set_defaults(handler=cmd_flow)

    p = sub.add_parser("diff", help="diff two snapshot files")
    p.add_argument("--before", required=True)
    p.add_argument("--after", required=True)
    p.add_argument("--out", help="write diff JSON here (default stdout)")
    p.set_defaults(handler=cmd_diff)

    return parser


def cmd_testbed(args) -> int:
    configs = load_matrix(args.config)
    handles = serve_matrix(
        configs,
        base_port=args.base_port,
        expose_truth=args.expose_truth,
        tls=args.tls,
    )
    for config, handle in zip(configs, handles):
        print(f"{config.id}: {handle.base_url}")
    print(f"serving {len(handles)} targets; Ctrl-C to stop", flush=True)
    stop = {"flag": False}

    def _sigint(_signum, _frame):
        stop["flag"] = True

    signal.signal(signal.SIGINT, _sigint)
    try:
        while not stop["flag"]:
            time.sleep(0.2)
    finally:
        for handle in handles:
            handle.stop()
    return 0


def cmd_evaluate(args) -> int:
    account = load_credentials(args.creds)
    second = load_credentials(args.creds2) if args.creds2 else None
    settings = EvaluationSettings(
        victim=DeviceProfile(args.victim_fingerprint, args.victim_ip),
        attacker=DeviceProfile(args.attacker_fingerprint, args.attacker_ip),
        secure_context=not args.no_secure_context,
    )
    verdict = evaluate_target(args.target, account, second, settings=settings)
    save_verdict(verdict, args.out)
    print(
        f"{args.target}: attacks={','.join(verdict.attack_names) or '-'} "
        f"flaws={','.join(verdict.flaw_names) or '-'} "
        f"notification={verdict.notification or '-'}"
    )
    return 0


def cmd_audit(args) -> int:
    snapshot = parse_snapshot(Path(args.cookies).read_bytes())
    entries = tuple(
        CookieAuditEntry(
            key=record.key,
            secure=record.secure,
            http_only=record.http_only,
            lifetime_days=record.lifetime_days(),
        )
        for record in snapshot.cookies
    )
    flaws: dict[str, str] = {}
    warnings: list[str] = []
    taken = snapshot.taken_at.timestamp()
    for record in snapshot.cookies:
        record_flaws, record_warnings = screen_value(record.value, taken)
        for flaw, evidence in record_flaws.items():
            flaws.setdefault(flaw.value, f"cookie {record.name!r}: {evidence}")
        warnings.extend(f"cookie {record.name!r}: {w}" for w in record_warnings)
    # Static mode cannot attribute risk controls; the attribute audit assumes
    # the snapshot holds the full trust material.
    audit = TrustCookieAudit(
        cookie_only=True,
        uses_local_storage=False,
        per_cookie=entries,
        flaws=frozenset(DesignFlaw(f) for f in flaws),
        evidence=tuple(sorted(flaws.items())),
        warnings=tuple(warnings),
    )
    doc = {"snapshot": snapshot.label, "audit": audit.to_json()}
    if entries:
        expiry = audit_expiry(entries)
        doc["expiry"] = {
            "maxLifetimeDays": expiry.max_lifetime_days,
            "bucket": expiry.bucket,
        }
        doc["attacks"] = sorted(a.value for a in classify_attack_surface(audit))
    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    print(f"audited {len(entries)} cookies -> {args.out}")
    return 0


def cmd_spider(args) -> int:
    config = ScoreConfig.load(args.terms_config) if args.terms_config else ScoreConfig()
    docs = load_corpus(args.corpus)
    domains = load_domains(args.domains)
    verdicts = run_spider(docs, domains, threshold=args.threshold, config=config)
    doc = {"verdicts": [v.to_json() for v in verdicts]}
    if args.baseline:
        comparison = compare_with_baseline(verdicts, load_domains(args.baseline))
        doc["comparison"] = comparison.to_json()
        print(
            f"baseline-only={comparison.only_baseline} spider-only={comparison.only_spider} "
            f"intersection={comparison.intersection} accuracy={comparison.accuracy:.2f}"
        )
    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    positive = sum(1 for v in verdicts if v.supports_2fa)
    print(f"{positive}/{len(verdicts)} domains classified as supporting 2FA -> {args.out}")
    return 0


def cmd_report(args) -> int:
    rows = []
    if args.verdicts:
        verdict_path = Path(args.verdicts)
        files = (
            sorted(verdict_path.glob("*.json")) if verdict_path.is_dir() else [verdict_path]
        )
        for index, file in enumerate(files, start=1):
            doc = json.loads(file.read_text(encoding="utf-8"))
            rows.append(report_row_from_verdict(doc, rank=index))
    else:
        table_rows = load_table_rows(args.table)
        rows = [report_row_from_table(row) for row in table_rows]
    rendered = render_report(rows, args.format)
    Path(args.out).write_text(rendered, encoding="utf-8")
    print(f"wrote {len(rows)} rows -> {args.out}")
    if args.stats:
        sites = load_sites(args.sites) if args.sites else load_sites()
        stats = aggregate_stats(sites)
        Path(args.stats).write_text(
            json.dumps(stats.to_json(), indent=2) + "\n", encoding="utf-8"
        )
        print(f"wrote aggregate statistics -> {args.stats}")
    return 0


def cmd_flow(args) -> int:
    script = load_flow_script(args.script)
    account = load_credentials(args.creds)
    env = SessionEnv(fingerprint=args.fingerprint, simulated_ip=args.ip)
    result = execute_flow(script, env, args.target, account)
    for index, prompted in result.prompts:
        print(f"step {index}: login prompted2fa={prompted}")
    print(f"final authenticated: {result.final_authenticated}")
    if args.export_snapshots:
        out_dir = Path(args.export_snapshots)
        out_dir.mkdir(parents=True, exist_ok=True)
        for label, snapshot in result.snapshots.items():
            path = out_dir / f"{label}.json"
            path.write_bytes(serialize_snapshot(snapshot))
            print(f"exported snapshot {label!r} -> {path}")
    return 0


def cmd_diff(args) -> int:
    before = parse_snapshot(Path(args.before).read_bytes())
    after = parse_snapshot(Path(args.after).read_bytes())
    diff = diff_snapshots(before, after)
    rendered = json.dumps(diff.to_json(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
        print(
            f"added={len(diff.added)} removed={len(diff.removed)} "
            f"changed={len(diff.changed)} -> {args.out}"
        )
    else:
        sys.stdout.write(rendered)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
