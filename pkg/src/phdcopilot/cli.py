"""Operator command line: serve, ingest, triage, audit verification, replay."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import DeploymentConfig
from .governance.audit import AuditLog, AuditStorageError
from .retrieval.corpus import CorpusClass, load_corpus_dir
from .retrieval.bm25 import index_corpus
from .triage.catalog import CatalogFormatError, load_catalog, validate_catalog
from .triage.report import render_figures, render_report


def build_deployment(config: DeploymentConfig):
    from .deployment import Deployment

    deployment = Deployment(config=config)
    for corpus_cfg in config.corpora:
        corpus_class = _parse_class(corpus_cfg.corpus_class)
        corpus = load_corpus_dir(corpus_cfg.directory, corpus_class)
        actor_id = _ingest_actor(deployment, corpus_class)
        deployment.ingest_corpus(actor_id, corpus)
    return deployment


def _parse_class(raw: str) -> CorpusClass:
    if raw == "policy":
        return CorpusClass.policy()
    if raw.startswith("student:"):
        return CorpusClass.student(raw.split(":", 1)[1])
    raise ValueError(f"corpus class must be 'policy' or 'student:<id>', got {raw!r}")


def _ingest_actor(deployment, corpus_class: CorpusClass) -> str:
    from .governance.actors import Role

    if corpus_class.kind == "policy":
        for actor in deployment.actors.all():
            if actor.role is Role.GRS:
                return actor.id
        raise ValueError("config ingests a policy corpus but registers no GRS actor")
    return corpus_class.student_id


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import create_app

    config = DeploymentConfig.from_file(args.config)
    deployment = build_deployment(config)
    tokens = {a.token: a.id for a in config.actors if a.token}
    app = create_app(deployment, tokens, console_dist=config.console_dist)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def cmd_ingest_corpus(args: argparse.Namespace) -> int:
    try:
        corpus_class = _parse_class(args.corpus_class)
        corpus = load_corpus_dir(args.directory, corpus_class)
        index = index_corpus(corpus)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"ingest failed: {exc}", file=sys.stderr)
        return 1
    stats = index.stats()
    print(
        f"{corpus.id}: {stats.document_count} documents, "
        f"{stats.passage_count} passages, avg passage length {stats.avg_passage_len:.1f} tokens"
    )
    return 0


def cmd_triage_validate(args: argparse.Namespace) -> int:
    try:
        records = load_catalog(args.file)
    except (CatalogFormatError, OSError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    violations = validate_catalog(records)
    if violations:
        for v in violations:
            print(f"{v.issue_id}: {v.rule}: {v.message}", file=sys.stderr)
        return 1
    print(f"{len(records)} issues, no violations")
    return 0


def cmd_triage_report(args: argparse.Namespace) -> int:
    try:
        records = load_catalog(args.file)
    except (CatalogFormatError, OSError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    violations = validate_catalog(records)
    if violations:
        for v in violations:
            print(f"{v.issue_id}: {v.rule}: {v.message}", file=sys.stderr)
        return 1
    report = render_report(records, args.format)
    if args.out:
        Path(args.out).write_text(report, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(report)
    if args.figures:
        paths = render_figures(records, args.figures)
        for path in paths:
            print(f"wrote {path}")
    return 0


def cmd_audit_verify(args: argparse.Namespace) -> int:
    try:
        log = AuditLog(path=args.log)
    except (AuditStorageError, OSError, KeyError, TypeError) as exc:
        print(f"unreadable log: {exc}", file=sys.stderr)
        return 1
    status = log.verify()
    print(str(status))
    return 0 if status.valid else 1


def cmd_replay(args: argparse.Namespace) -> int:
    from .transcripts import load_transcript

    config = DeploymentConfig.from_file(args.config)
    deployment = build_deployment(config)
    transcript = load_transcript(args.transcript)
    results = deployment.replay(transcript)
    mismatches = [r for r in results if not r[1]]
    for index, ok, _text in results:
        print(f"event {index}: {'match' if ok else 'MISMATCH'}")
    if mismatches:
        print(f"{len(mismatches)} of {len(results)} events diverged", file=sys.stderr)
        return 1
    print(f"replayed {len(results)} events, all byte-identical")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phdcopilot")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", required=True)
    serve.set_defaults(func=cmd_serve)

    ingest = sub.add_parser("ingest-corpus", help="validate and index a corpus directory")
    ingest.add_argument("--class", dest="corpus_class", required=True,
                        help="policy or student:<id>")
    ingest.add_argument("directory")
    ingest.set_defaults(func=cmd_ingest_corpus)

    triage = sub.add_parser("triage", help="issue-catalog tools")
    triage_sub = triage.add_subparsers(dest="triage_command", required=True)
    validate = triage_sub.add_parser("validate", help="check a catalog file")
    validate.add_argument("file")
    validate.set_defaults(func=cmd_triage_validate)
    report = triage_sub.add_parser("report", help="render a catalog report")
    report.add_argument("file")
    report.add_argument("--format", choices=("table", "csv"), default="table")
    report.add_argument("--out", help="write the report here instead of stdout")
    report.add_argument("--figures", help="directory for chart files")
    report.set_defaults(func=cmd_triage_report)

    audit = sub.add_parser("audit", help="audit log tools")
    audit_sub = audit.add_subparsers(dest="audit_command", required=True)
    verify = audit_sub.add_parser("verify", help="verify a persisted chain")
    verify.add_argument("log")
    verify.set_defaults(func=cmd_audit_verify)

    replay = sub.add_parser("replay", help="re-run a recorded session transcript")
    replay.add_argument("transcript")
    replay.add_argument("--config", required=True)
    replay.set_defaults(func=cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
