"""Command line entry points.

Exit codes: 0 on success, 2 when inputs fail validation (argparse uses
the same convention for flag errors).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .engine import Engine, EngineConfig, EngineError
from .experiment import ExperimentReport, SimulationConfig, simulate, write_report
from .genetic import GPConfig
from .graph import GraphError
from .metrics import EXISTENCE, SEMANTIC
from .ontology import OntologyError
from .storage import (
    AnonymizationPolicy,
    BundleError,
    bundle_to_zip_bytes,
    export_bundle,
    import_bundle,
    load_feedback,
    load_holdout,
    load_weights,
)
from .synth import MECHANISMS, SyntheticSpec, generate


def _parse_counts(text: str) -> dict:
    counts = {}
    for part in text.split(","):
        name, _, value = part.partition("=")
        if not value:
            raise ValueError("node counts look like Person=40,Stop=40")
        counts[name.strip()] = int(value)
    return counts


def _parse_mix(text: str) -> tuple:
    values = tuple(float(x) for x in text.split(","))
    if len(values) != len(MECHANISMS):
        raise ValueError("mix needs %d comma-separated weights" % len(MECHANISMS))
    return values


def _spec_from_args(args, seed: int) -> SyntheticSpec:
    return SyntheticSpec(
        node_counts=_parse_counts(args.nodes),
        mechanism_mix=_parse_mix(args.mix),
        holdout=args.holdout,
        target_links=args.target_links,
        rng_seed=seed,
    )


def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nodes", default="Person=40,Stop=40,City=40")
    p.add_argument("--mix", default="0.5,0.3,0.2", help="triadic,affinity,recency weights")
    p.add_argument("--holdout", type=float, default=0.2)
    p.add_argument("--target-links", type=int, default=900)


def _cmd_generate(args) -> int:
    spec = _spec_from_args(args, args.seed)
    visible, hidden = generate(spec)
    export_bundle(visible, args.out, holdout=hidden)
    print(
        "generated %d nodes, %d visible links, %d hidden -> %s"
        % (visible.node_count(), visible.link_count(), len(hidden), args.out)
    )
    return 0


def _cmd_simulate(args) -> int:
    seeds = [int(s) for s in args.seeds.split(",")]
    reports = []
    for seed in seeds:
        if args.bundle:
            visible = import_bundle(args.bundle)
            hidden = load_holdout(args.bundle)
            if not hidden:
                raise ValueError("bundle has no holdout file; nothing for the oracle")
        else:
            visible, hidden = generate(_spec_from_args(args, seed))
        config = SimulationConfig(
            mode=args.mode,
            batch_size=args.batch,
            candidate_size=args.candidate_size,
            retrain_every=args.retrain_every,
            train_size=args.train_size,
            seed=seed,
            scoring_disabled=args.no_scoring,
        )
        report = simulate(visible, hidden, args.budget, config)
        reports.append(report)
        print(
            "seed %d: tp_genetic %.4f tp_baseline %.4f uplift %.4f ks %.4f "
            "(%d/%d hidden found, %d retrains)"
            % (
                seed, report.tp_genetic, report.tp_baseline, report.uplift,
                report.ks_statistic, report.found_hidden, report.hidden_total,
                report.trained,
            )
        )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump([dataclasses.asdict(r) for r in reports], fh, indent=1, sort_keys=True)
        print("wrote %s" % args.out)
    return 0


def _cmd_report(args) -> int:
    with open(args.runs, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    reports = [
        ExperimentReport(
            **{
                **doc,
                "positive_scores": tuple(doc.get("positive_scores", ())),
                "negative_scores": tuple(doc.get("negative_scores", ())),
            }
        )
        for doc in raw
    ]
    for path in write_report(reports, args.out):
        print("wrote %s" % path)
    return 0


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("config file must hold one object")
    return doc


def _cmd_serve(args) -> int:
    from .service import serve

    file_cfg = _load_config_file(args.config)
    bundle = args.bundle or file_cfg.get("bundle")
    if not bundle:
        raise ValueError("serve needs --bundle (or a config file naming one)")
    port = args.port if args.port is not None else int(file_cfg.get("port", 8776))
    retrain = (
        args.retrain_every
        if args.retrain_every is not None
        else int(file_cfg.get("retrain_every", 200))
    )
    candidate = (
        args.candidate_size
        if args.candidate_size is not None
        else int(file_cfg.get("candidate_size", 30))
    )
    seed = args.seed if args.seed is not None else int(file_cfg.get("seed", 0))
    engine = Engine(
        bundle_dir=bundle,
        config=EngineConfig(
            candidate_size=candidate,
            retrain_every=retrain,
            seed=seed,
            gp=GPConfig(rng_seed=seed),
        ),
    )
    print("serving %s on 127.0.0.1:%d" % (bundle, port))
    serve(engine, port=port)
    return 0


def _cmd_import(args) -> int:
    source = args.source
    if source.endswith(".zip"):
        if not args.out:
            raise ValueError("importing a zip needs --out for the unpacked bundle")
        import zipfile

        with zipfile.ZipFile(source) as zf:
            zf.extractall(args.out)
        source = args.out
    g = import_bundle(source)
    print(
        "bundle ok: %d concepts, %d relations, %d nodes, %d links, %d non-links"
        % (
            len(g.ontology.concepts),
            len(g.ontology.relations),
            g.node_count(),
            g.link_count(),
            len(g.all_non_links()),
        )
    )
    return 0


def _cmd_export(args) -> int:
    g = import_bundle(args.bundle)
    policy = None
    if args.anonymize:
        policy = AnonymizationPolicy(
            args.salt.encode("utf-8"), frozenset(g.ontology.concepts)
        )
    weights_docs = {}
    for mode in (EXISTENCE, SEMANTIC):
        doc = load_weights(args.bundle, mode)
        if doc is not None:
            weights_docs[mode] = doc
    events = load_feedback(args.bundle)
    if args.out.endswith(".zip"):
        import tempfile

        with tempfile.TemporaryDirectory(prefix="kglf-export-") as tmp:
            export_bundle(g, tmp, policy, weights_docs, events)
            payload = bundle_to_zip_bytes(tmp)
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        export_bundle(g, args.out, policy, weights_docs, events)
    print("exported %s -> %s" % (args.bundle, args.out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kglf")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a synthetic bundle with a holdout")
    _add_spec_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("simulate", help="run the simulated-oracle experiment")
    _add_spec_flags(p)
    p.add_argument("--bundle", help="existing bundle with a holdout file")
    p.add_argument("--seeds", default="0")
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--mode", choices=[EXISTENCE, SEMANTIC], default=EXISTENCE)
    p.add_argument("--batch", type=int, default=9)
    p.add_argument("--candidate-size", type=int, default=30)
    p.add_argument("--retrain-every", type=int, default=200)
    p.add_argument("--train-size", type=int, default=40)
    p.add_argument("--no-scoring", action="store_true", help="zero-score control run")
    p.add_argument("--out", help="write raw run results as JSON")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("report", help="turn raw run results into plot-ready TSVs")
    p.add_argument("--runs", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_report)

    p = sub.add_parser("serve", help="serve a bundle over HTTP")
    p.add_argument("--bundle")
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--port", type=int)
    p.add_argument("--retrain-every", type=int)
    p.add_argument("--candidate-size", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("import", help="validate a bundle directory or zip")
    p.add_argument("source")
    p.add_argument("--out", help="unpack target when source is a zip")
    p.set_defaults(fn=_cmd_import)

    p = sub.add_parser("export", help="re-export a bundle, optionally anonymized")
    p.add_argument("--bundle", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--anonymize", action="store_true")
    p.add_argument("--salt", default="local-export")
    p.set_defaults(fn=_cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, BundleError, GraphError, OntologyError, EngineError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
