"""Command-line interface.

Exit codes: 0 success, 1 domain error, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import eventlog
from .config import FORMATS, ConfigError, RunConfig, load_config
from .emotion import compare as cmp
from .emotion.dataset import (FORMATS as DATASET_FORMATS, DatasetError, gaussian_blobs, ingest_dataset,
                              read_feature_rows, remove_outliers, split)
from .emotion.learners import KINDS, ModelError, load_model, save_model, train
from .engine import MissingEmotionModel, StreamOrderError, recognize
from .model import DefinitionError, Registry, load_bundled, parse_definitions, validate_definition
from .pipeline import model_resolver, run_pipeline
from .simulation import ScenarioError, parse_scenario, simulate_trace
from .ux import (LearnedPredictor, RulePredictor, UXError, evaluate_ux, load_ux_model, read_ux_samples,
                 save_ux_model, train_ux, write_predictions)

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2

DOMAIN_ERRORS = (DefinitionError, DatasetError, ModelError, ScenarioError, UXError, ConfigError,
                 StreamOrderError, MissingEmotionModel, eventlog.EventLogError, ValueError, KeyError, IndexError)


class UsageError(Exception):
    pass


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from None


def _config(args) -> RunConfig:
    source = _read(args.config) if args.config else None
    overrides = {"seed": args.seed, "format": args.format}
    for name in ("train_fraction", "z_max", "learner", "mood_window", "timeout_min", "core_required",
                 "step_gap_s", "ux_alpha"):
        if hasattr(args, name):
            overrides[name] = getattr(args, name)
    return load_config(source, overrides)


def _registry(args) -> Registry:
    if not args.definitions:
        return Registry(load_bundled())
    defs = []
    for p in args.definitions:
        defs.extend(parse_definitions(_read(p)))
    return Registry(defs)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_validate(args) -> int:
    bad = 0
    for path in args.paths:
        defs = parse_definitions(_read(path), validate=False)
        for d in defs:
            report = validate_definition(d)
            if report.ok:
                print(f"{path}: {d.code}: ok")
            else:
                bad += 1
                for v in report.violations:
                    print(f"{path}: {d.code}: {v}")
    return EXIT_DOMAIN if bad else EXIT_OK


def cmd_recognize(args) -> int:
    cfg = _config(args)
    registry = _registry(args)
    events = eventlog.parse_events(_read(args.events), args.event_format)
    resolver = _resolver(args)
    records = recognize(registry, events, timeout_ms=cfg.timeout_ms, core_required=cfg.core_required,
                        valence_map=cfg.valence_mapping(), resolve_emotion=resolver)
    _write(args.out, eventlog.write_records(records))
    return EXIT_OK


def _resolver(args):
    if not getattr(args, "model", None):
        if getattr(args, "features", None):
            raise UsageError("--features requires --model")
        return None
    if not args.features:
        raise UsageError("--model requires --features")
    return model_resolver(load_model(_read(args.model)), read_feature_rows(_read(args.features)))


def _load_dataset(args, cfg: RunConfig):
    if args.dataset:
        return ingest_dataset(_read(args.dataset), args.dataset_format, provenance=args.dataset)
    return gaussian_blobs(args.blob_samples, args.blob_dim, seed=cfg.seed)


def cmd_train_emotion(args) -> int:
    cfg = _config(args)
    ds = _load_dataset(args, cfg)
    clean = remove_outliers(ds, cfg.z_max)
    tr, te = split(clean, cfg.train_fraction, cfg.seed)
    model = train(cfg.learner, tr, cfg.hyperparameters.get(cfg.learner), cfg.seed)
    _write(args.out, save_model(model))
    cm = cmp.evaluate(model, te)
    if cfg.format == "json":
        sys.stdout.write(_dump({"config": cfg.to_dict(), "model": args.out, "n_train": len(tr),
                                "n_test": len(te), "n_removed": len(ds) - len(clean),
                                "test_confusion": cm.to_dict()}))
    else:
        sys.stdout.write(cm.to_text())
    return EXIT_OK


def cmd_eval_emotion(args) -> int:
    cfg = _config(args)
    model = load_model(_read(args.model))
    ds = ingest_dataset(_read(args.dataset), args.dataset_format, provenance=args.dataset)
    cm = cmp.evaluate(model, ds)
    if cfg.format == "json":
        sys.stdout.write(_dump({"config": cfg.to_dict(), "confusion": cm.to_dict()}))
    elif cfg.format == "csv":
        lines = ["label,precision,recall"] + [f"{l},{p:.6f},{r:.6f}" for l, p, r in
                                              zip(cm.labels, cm.precisions, cm.recalls)]
        sys.stdout.write("\n".join(lines) + f"\naccuracy,{cm.accuracy:.6f},\n")
    else:
        sys.stdout.write(cm.to_text())
    return EXIT_OK


def cmd_compare_learners(args) -> int:
    cfg = _config(args)
    ds = _load_dataset(args, cfg)
    report = cmp.compare_learners(ds, seed=cfg.seed, train_fraction=cfg.train_fraction, z_max=cfg.z_max,
                                  hyperparameters=cfg.hyperparameters)
    if cfg.format == "csv":
        sys.stdout.write(report.to_csv())
    elif cfg.format == "table":
        sys.stdout.write(report.to_table())
    else:
        sys.stdout.write(_dump({"config": cfg.to_dict(), **report.to_dict()}))
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _config(args)
    registry = _registry(args)
    events = simulate_trace(registry, parse_scenario(_read(args.scenario)), cfg.seed, cfg.step_gap_s)
    _write(args.out, eventlog.write_events(events, args.event_format or "csv"))
    return EXIT_OK


def cmd_pipeline(args) -> int:
    cfg = _config(args)
    registry = _registry(args)
    if bool(args.scenario) == bool(args.events):
        raise UsageError("give exactly one of --scenario or --events")
    if args.scenario:
        events = simulate_trace(registry, parse_scenario(_read(args.scenario)), cfg.seed, cfg.step_gap_s)
    else:
        events = eventlog.parse_events(_read(args.events), args.event_format)
    predictor = LearnedPredictor(load_ux_model(_read(args.ux_model))) if args.ux_model else RulePredictor()
    report = run_pipeline(registry, events, cfg, resolve_emotion=_resolver(args), ux_predictor=predictor)
    if cfg.format == "table":
        text = report.to_table()
    elif cfg.format == "csv":
        lines = ["occurrence,code,start_ms,end_ms,score,outcome,overall_emotion,valence,mood"]
        lines += [f"{i},{r.code},{r.start_ms},{r.end_ms},{r.score:.6f},{r.outcome.value},"
                  f"{r.overall_emotion.value},{r.valence.value},{t['mood']}"
                  for i, (r, t) in enumerate(zip(report.records, report.mood_timeline))]
        text = "\n".join(lines) + "\n"
    else:
        text = report.to_json()
    _write(args.out, text)
    return EXIT_OK


def cmd_ux_eval(args) -> int:
    cfg = _config(args)
    samples = read_ux_samples(_read(args.samples))
    if args.predictor == "rule":
        predictor = RulePredictor()
        model = None
    else:
        train_samples = read_ux_samples(_read(args.train)) if args.train else samples
        model = train_ux(train_samples, cfg.ux_alpha)
        predictor = LearnedPredictor(model)
        if args.save_model:
            _write(args.save_model, save_ux_model(model))
    cm, preds = evaluate_ux(predictor, samples)
    if cfg.format == "csv":
        sys.stdout.write(write_predictions(samples, preds))
    elif cfg.format == "table":
        sys.stdout.write(cm.to_text())
    else:
        sys.stdout.write(_dump({
            "config": cfg.to_dict(),
            "predictor": args.predictor,
            "model": model.to_dict() if model else None,
            "confusion": cm.to_dict(),
            "predictions": [{"row": i, "ux": s.ux.value, "prediction": p.label.value,
                             "confidence_positive": p.confidence_positive,
                             "confidence_negative": p.confidence_negative,
                             "mood": s.mood.value, "outcome": s.outcome.value}
                            for i, (s, p) in enumerate(zip(samples, preds), start=1)],
        }))
    return EXIT_OK


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--seed", type=int, help="master random seed")
    p.add_argument("--format", choices=FORMATS, help="output format")


def _defs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--definitions", action="append", metavar="PATH",
                   help="definition file (repeatable; default: all bundled definitions)")


def _engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--timeout-min", dest="timeout_min", type=float, help="inactivity timeout in minutes")
    p.add_argument("--core-required", dest="core_required", action=argparse.BooleanOptionalAction, default=None,
                   help="require every core step for Success")
    p.add_argument("--mood-window", dest="mood_window", type=int, help="mood window size")
    p.add_argument("--model", help="emotion model for @row references")
    p.add_argument("--features", help="feature-vector file for @row references")
    p.add_argument("--event-format", dest="event_format", choices=("csv", "jsonl"))


def _dataset_flags(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--dataset", required=required, help="dataset file (default: synthetic blobs)")
    p.add_argument("--dataset-format", dest="dataset_format", choices=DATASET_FORMATS, default="generic-csv")
    p.add_argument("--train-fraction", dest="train_fraction", type=float)
    p.add_argument("--z-max", dest="z_max", type=float, help="outlier z-score cut-off")
    if not required:
        p.add_argument("--blob-samples", dest="blob_samples", type=int, default=100,
                       help="synthetic samples per class")
        p.add_argument("--blob-dim", dest="blob_dim", type=int, default=16, help="synthetic feature dimension")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="affectaware", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check definition files")
    p.add_argument("paths", nargs="+", metavar="PATH")
    _common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("recognize", help="detect occurrences in an event log")
    _common(p)
    _defs(p)
    _engine_flags(p)
    p.add_argument("--events", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("train-emotion", help="train an emotion classifier")
    _common(p)
    _dataset_flags(p)
    p.add_argument("--learner", choices=KINDS)
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=cmd_train_emotion)

    p = sub.add_parser("eval-emotion", help="score a saved emotion model on a dataset")
    _common(p)
    _dataset_flags(p, required=True)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_eval_emotion)

    p = sub.add_parser("compare-learners", help="compare all learners on one shared split")
    _common(p)
    _dataset_flags(p)
    p.set_defaults(func=cmd_compare_learners)

    p = sub.add_parser("simulate", help="generate an event log from a scenario")
    _common(p)
    _defs(p)
    p.add_argument("--scenario", required=True)
    p.add_argument("--step-gap-s", dest="step_gap_s", type=float, help="seconds between steps")
    p.add_argument("--event-format", dest="event_format", choices=("csv", "jsonl"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pipeline", help="recognition, affect, mood and UX forecasts")
    _common(p)
    _defs(p)
    _engine_flags(p)
    p.add_argument("--scenario")
    p.add_argument("--events")
    p.add_argument("--step-gap-s", dest="step_gap_s", type=float)
    p.add_argument("--ux-model", dest="ux_model", help="learned UX model (default: rule table)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("ux-eval", help="evaluate a UX predictor on labelled samples")
    _common(p)
    p.add_argument("--samples", required=True)
    p.add_argument("--predictor", choices=("rule", "learned"), default="rule")
    p.add_argument("--train", help="training samples for the learned predictor (default: --samples)")
    p.add_argument("--ux-alpha", dest="ux_alpha", type=float, help="Laplace smoothing")
    p.add_argument("--save-model", dest="save_model")
    p.set_defaults(func=cmd_ux_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
