"""Command-line entry point.

Exit codes: 0 success, 1 validation failure (bad labels, one-class input,
taxonomy violations...), 2 unreadable input or usage errors. Diagnostics go
to stderr; machine output goes to stdout or the requested files.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import _backend, corpus, manifest, protocol, report, separability, synth
from .bootstrap import BootstrapConfig, bootstrap_pad_metrics
from .errors import ParseError, ValidationError
from .metrics import load_scores, pad_metrics, write_scores

log = logging.getLogger("opensetpad")


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _alphas(raw: str) -> list[float]:
    try:
        vals = [float(x) / 100.0 for x in raw.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --apcer-points {raw!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("--apcer-points needs at least one value")
    return vals


# ---------------------------------------------------------------- handlers


def cmd_manifest_validate(args) -> int:
    recs = manifest.load_manifest(args.manifest, vsia_strict=args.vsia_strict, dedupe=args.dedupe)
    _emit(_dump({"manifest": str(args.manifest), "records": len(recs), "valid": True}), None)
    return 0


def cmd_manifest_summarize(args) -> int:
    recs = manifest.load_manifest(args.manifest, vsia_strict=args.vsia_strict, dedupe=args.dedupe)
    summary = manifest.summarize(recs)
    if args.format == "md":
        _emit(manifest.summary_markdown(summary), args.out)
    else:
        _emit(_dump(summary.to_dict()), args.out)
    return 0


def cmd_manifest_fixture(args) -> int:
    recs = corpus.corpus_manifest(nir=not args.no_nir, vis=not args.no_vis, scale=args.scale)
    manifest.write_manifest(recs, args.out)
    log.info("wrote %d records to %s", len(recs), args.out)
    return 0


def cmd_protocol_gen(args) -> int:
    recs = manifest.load_manifest(args.manifest, vsia_strict=args.vsia_strict, dedupe=args.dedupe)
    runs = protocol.protocol_runs(
        recs, args.protocol, held_dataset=args.held_dataset, held_pai=args.held_pai, seed=args.seed
    )
    paths = protocol.write_runs(runs, args.out)
    for run in runs:
        log.info(
            "%s: train %d, val %d, test %d%s",
            run.run_id, len(run.train_ids), len(run.val_ids), len(run.test_ids),
            " (degenerate)" if run.degenerate else "",
        )
    _emit(_dump({"runs": [r.run_id for r in runs], "files": [str(p) for p in paths]}), None)
    return 0


def _score_result(path: Path, args, condition: str | None = None) -> dict:
    direction = "bonafide_high" if args.bonafide_high else "attack_high"
    scores = load_scores(path, direction)
    if args.bootstrap > 0:
        cfg = BootstrapConfig(args.bootstrap, args.ci / 100.0, args.seed)
        cis = bootstrap_pad_metrics(scores, cfg, args.apcer_points, workers=args.workers)
        metrics = {name: ci.to_dict() for name, ci in cis.items()}
    else:
        metrics = pad_metrics(scores, args.apcer_points).as_dict()
    doc = report.result_payload(condition or path.stem, args.model, args.variant, metrics)
    doc["n_bonafide"] = scores.n_bonafide
    doc["n_attack"] = scores.n_attack
    doc["score_direction"] = direction
    if args.bootstrap > 0:
        doc["bootstrap"] = {"replicates": args.bootstrap, "ci_level": args.ci / 100.0, "seed": args.seed}
    return doc


def cmd_metrics(args) -> int:
    doc = _score_result(Path(args.scores), args, args.condition)
    _emit(_dump(doc), args.out)
    return 0


def cmd_separability(args) -> int:
    ind = separability.load_embeddings(args.in_domain)
    sh = separability.load_embeddings(args.shifted)
    rep = separability.shift_report(ind, sh)
    doc = report.result_payload(
        args.condition or Path(args.shifted).stem, args.model, args.variant,
        separability=rep.to_dict(),
    )
    doc["in_domain"] = separability.class_geometry(ind).to_dict()
    doc["shifted"] = separability.class_geometry(sh).to_dict()
    _emit(_dump(doc), args.out)
    return 0


def cmd_synth_scores(args) -> int:
    spec = synth.GaussianScoreSpec.from_dict(json.loads(Path(args.spec).read_text(encoding="utf-8")))
    write_scores(synth.gen_scores(spec), args.out)
    return 0


def cmd_synth_embeddings(args) -> int:
    spec = synth.GaussianEmbeddingSpec.from_dict(
        json.loads(Path(args.spec).read_text(encoding="utf-8"))
    )
    separability.save_embeddings(synth.gen_embeddings(spec), args.out)
    return 0


def cmd_report(args) -> int:
    results = report.load_results(args.results)
    if not results:
        raise ParseError(f"no result documents in {args.results}")
    table = report.table_from_results(results, center=args.center)
    _emit(report.emit_table(table, args.format), args.out)
    return 0


def cmd_evaluate(args) -> int:
    out = Path(args.out)
    res_dir = out / "results"
    res_dir.mkdir(parents=True, exist_ok=True)
    docs = []
    for path in map(Path, args.scores):
        doc = _score_result(path, args)
        (res_dir / f"{path.stem}.json").write_text(_dump(doc), encoding="utf-8", newline="\n")
        docs.append(doc)
    table = report.table_from_results(docs, center=args.center)
    (out / "report.md").write_text(report.emit_table(table, "md"), encoding="utf-8", newline="\n")
    (out / "report.csv").write_text(report.emit_table(table, "csv"), encoding="utf-8", newline="\n")
    _emit(_dump({"results": [str(res_dir / f"{Path(p).stem}.json") for p in args.scores],
                 "report": [str(out / "report.md"), str(out / "report.csv")]}), None)
    return 0


# ------------------------------------------------------------------ parser


def _manifest_flags(p):
    p.add_argument("--manifest", required=True)
    p.add_argument("--vsia-strict", action="store_true", help="enforce VIS <=> VSIA")
    p.add_argument("--dedupe", action="store_true", help="drop repeated ids, keep first")


def _score_flags(p):
    p.add_argument("--apcer-points", type=_alphas, default=[0.05, 0.10], metavar="5,10")
    p.add_argument("--bonafide-high", action="store_true", help="higher score = more bona fide")
    p.add_argument("--bootstrap", type=int, default=0, metavar="B")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ci", type=float, default=95.0, help="confidence level in percent")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--model", default="model")
    p.add_argument("--variant", default="-")


def _tag_flags(p):
    p.add_argument("--condition")
    p.add_argument("--model", default="model")
    p.add_argument("--variant", default="-")
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="opensetpad", description="Open-set iris PAD evaluation toolkit.")
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("--backend", choices=_backend.BACKENDS, help="kernel backend override")
    sub = ap.add_subparsers(dest="command", required=True)

    man = sub.add_parser("manifest", help="validate or summarize a manifest").add_subparsers(
        dest="action", required=True
    )
    p = man.add_parser("validate")
    _manifest_flags(p)
    p.set_defaults(func=cmd_manifest_validate)
    p = man.add_parser("summarize")
    _manifest_flags(p)
    p.add_argument("--format", choices=("json", "md"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_manifest_summarize)
    p = man.add_parser("fixture", help="write a manifest with the published corpus counts")
    p.add_argument("--out", required=True)
    p.add_argument("--no-nir", action="store_true")
    p.add_argument("--no-vis", action="store_true")
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=cmd_manifest_fixture)

    pro = sub.add_parser("protocol", help="generate protocol partitions").add_subparsers(
        dest="action", required=True
    )
    p = pro.add_parser("gen")
    _manifest_flags(p)
    p.add_argument("--protocol", required=True, choices=("1", "2", "3", "4", "reverse"))
    p.add_argument("--held-dataset")
    p.add_argument("--held-pai")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_protocol_gen)

    p = sub.add_parser("metrics", help="D-EER and BPCER@APCER for a scores CSV")
    p.add_argument("--scores", required=True)
    _score_flags(p)
    p.add_argument("--condition")
    p.add_argument("--out")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("separability", help="R, SRD and DDP between two embedding files")
    p.add_argument("--in-domain", required=True)
    p.add_argument("--shifted", required=True)
    _tag_flags(p)
    p.set_defaults(func=cmd_separability)

    syn = sub.add_parser("synth", help="synthetic Gaussian fixtures").add_subparsers(
        dest="action", required=True
    )
    p = syn.add_parser("scores")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth_scores)
    p = syn.add_parser("embeddings")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth_embeddings)

    p = sub.add_parser("report", help="render result JSONs as a table")
    p.add_argument("--results", required=True)
    p.add_argument("--format", choices=("md", "markdown", "csv"), default="md")
    p.add_argument("--center", choices=("mean", "point"), default="mean")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("evaluate", help="scores -> metrics -> bootstrap -> report")
    p.add_argument("--scores", required=True, nargs="+")
    p.add_argument("--out", required=True)
    _score_flags(p)
    p.set_defaults(bootstrap=1000)
    p.add_argument("--center", choices=("mean", "point"), default="mean")
    p.set_defaults(func=cmd_evaluate)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.backend:
            _backend.set_backend(args.backend)
        return args.func(args)
    except ValidationError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 1
    except (ParseError, OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 2
    except (ValueError, TypeError, KeyError) as exc:
        log.error("invalid input: %s", exc)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
