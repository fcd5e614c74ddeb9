"""Command-line entry point for the replication pipeline and utilities.

Every command that writes artifacts also writes a run manifest (resolved
parameters plus SHA-256 hashes of its inputs) so a run can be reproduced
bit-for-bit. All randomness flows from --seed; sub-streams are derived with
SeedSequence spawn keys as documented in the cohort and forest modules.

Exit codes: 0 success, 2 usage or input validation problem, 1 internal error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from importlib import metadata
from pathlib import Path

from . import cohort as cohort_mod
from . import pipeline, service
from .errors import GladpredError, ValidationError
from .evaluation import EvalReport
from .forest import Hyperparams
from .modelstore import load_bundle, save_bundle
from .schema import builtin_dictionary
from .selection import Variant


def _version() -> str:
    try:
        return metadata.version("gladpred")
    except metadata.PackageNotFoundError:
        return "0.0.0"


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False))
        f.write("\n")


def _write_manifest(path: Path, command: str, params: dict, inputs: dict[str, Path]) -> None:
    manifest = {
        "tool": "gladpred",
        "version": _version(),
        "command": command,
        "params": params,
        "inputs": {name: _sha256(p) for name, p in inputs.items()},
    }
    _write_json(path, manifest)


def _parse_margins(text: str) -> tuple[float, ...]:
    try:
        margins = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise GladpredError(f"cannot parse margins {text!r}") from None
    if not margins:
        raise GladpredError("margins list is empty")
    return margins


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as f:
        obj = json.load(f)
    if not isinstance(obj, dict):
        raise GladpredError("config file must contain a JSON object")
    return obj


def _resolve(args: argparse.Namespace, config: dict, key: str, default):
    """Flag > config file > built-in default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _hyper_from(args, config) -> Hyperparams:
    return Hyperparams(
        n_trees=int(_resolve(args, config, "trees", 100)),
        max_depth=int(_resolve(args, config, "depth", 10)),
        seed=int(_resolve(args, config, "seed", 42)),
        min_samples_leaf=int(config.get("min_samples_leaf", 1)),
        mtry=config.get("mtry"),
        bootstrap=bool(config.get("bootstrap", True)),
    )


def _write_report_csv(path: Path, comparison) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["variant", "mean_rmse", "mean_r2", "margin", "rho_personalized", "rho_average"])
        for variant, mean_rmse, mean_r2, rho_p, rho_a in comparison.rows:
            writer.writerow([variant, repr(mean_rmse), repr(mean_r2), repr(comparison.margin), repr(rho_p), repr(rho_a)])


def _write_margin_sweep_csv(path: Path, report: EvalReport) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["margin", "rho_personalized", "rho_average"])
        for margin, rho_p, rho_a in report.margin_table.rows:
            writer.writerow([repr(margin), repr(rho_p), repr(rho_a)])


def _write_importance_csv(path: Path, ranking) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["rank", "variable_id", "importance"])
        for i, (vid, value) in enumerate(ranking.entries, start=1):
            writer.writerow([i, vid, repr(value)])


def cmd_synth(args) -> int:
    config = _load_config(args.config)
    n = int(_resolve(args, config, "n", None) or 0)
    if n < 1:
        raise GladpredError("--n must be >= 1")
    seed = int(_resolve(args, config, "seed", 42))
    r2 = float(_resolve(args, config, "r2", 0.32))
    edition = _resolve(args, config, "dict", "base34")
    dictionary = builtin_dictionary(edition)
    outcome_sd = config.get("outcome_sd")
    outcome_mean = config.get("outcome_mean")

    synth_config = cohort_mod.calibrate_signal(dictionary, r2, outcome_sd, outcome_mean)
    cohort = cohort_mod.generate_synthetic(synth_config, n, seed)
    out = Path(args.out)
    cohort_mod.write_csv(cohort, out)
    _write_manifest(
        out.with_name(out.name + ".manifest.json"),
        "synth",
        {
            "n": n,
            "seed": seed,
            "r2": r2,
            "dict": edition,
            "dict_hash": dictionary.content_hash,
            "synthetic_config": synth_config.to_json_obj(),
            "out": out.name,
        },
        {},
    )
    print(f"wrote {cohort.n} records to {out}", file=sys.stderr)
    return 0


def _common_run_params(args, config, hyper, edition, extra: dict) -> dict:
    params = {
        "dict": edition,
        "dict_hash": builtin_dictionary(edition).content_hash,
        "hyper": hyper.to_json_obj(),
        "jobs": int(_resolve(args, config, "jobs", 1)),
    }
    params.update(extra)
    return params


def cmd_train(args) -> int:
    config = _load_config(args.config)
    hyper = _hyper_from(args, config)
    edition = _resolve(args, config, "dict", "base34")
    variant = Variant.parse(_resolve(args, config, "variant", "concise"))
    folds = int(_resolve(args, config, "folds", 10))
    margins = _parse_margins(_resolve(args, config, "margins", "5,10,15,20"))
    jobs = int(_resolve(args, config, "jobs", 1))
    mode = _resolve(args, config, "importance_mode", "cv")

    cohort, exclusions = pipeline.load_cohort(edition, args.data)
    bundle = pipeline.train_bundle(cohort, variant, hyper, folds, margins, jobs, mode)
    out = Path(args.out)
    save_bundle(bundle, out)
    _write_manifest(
        out.with_name(out.name + ".manifest.json"),
        "train",
        _common_run_params(
            args,
            config,
            hyper,
            edition,
            {
                "variant": variant.label,
                "folds": folds,
                "margins": list(margins),
                "importance_mode": mode,
                "exclusions": exclusions.to_json_obj(),
                "out": out.name,
            },
        ),
        {"data": Path(args.data)},
    )
    print(f"trained {variant.label} bundle on {cohort.n} records -> {out}", file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    config = _load_config(args.config)
    hyper = _hyper_from(args, config)
    edition = _resolve(args, config, "dict", "base34")
    folds = int(_resolve(args, config, "folds", 10))
    if folds < 2:
        raise GladpredError("--folds must be >= 2")
    margins = _parse_margins(_resolve(args, config, "margins", "5,10,15,20"))
    comparison_margin = 15.0 if 15.0 in margins else margins[-1]
    variant_text = _resolve(args, config, "variants", "full,topk:11,concise")
    variants = [Variant.parse(tok) for tok in variant_text.split(",") if tok.strip()]
    jobs = int(_resolve(args, config, "jobs", 1))
    mode = _resolve(args, config, "importance_mode", "cv")

    cohort, exclusions = pipeline.load_cohort(edition, args.data)
    fold_plan = cohort_mod.kfold_plan(cohort.n, folds, hyper.seed)
    run = pipeline.evaluate_variants(cohort, variants, hyper, fold_plan, margins, jobs, mode, comparison_margin)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "exclusions.json", exclusions.to_json_obj())
    _write_json(
        out_dir / "report.json",
        {
            "variants": [v.label for v in variants],
            "n": cohort.n,
            "folds": folds,
            "seed": hyper.seed,
            "margins": list(margins),
            "reports": [r.to_json_obj() for r in run.reports],
            "comparison": run.comparison.to_json_obj(),
            "elbow_suggested_k": run.elbow_k,
        },
    )
    _write_report_csv(out_dir / "report.csv", run.comparison)
    sweep_report = next((r for r in run.reports if r.variant_label == "concise"), run.reports[0])
    _write_margin_sweep_csv(out_dir / "margin_sweep.csv", sweep_report)
    if run.ranking is not None:
        _write_importance_csv(out_dir / "importance.csv", run.ranking)
    _write_manifest(
        out_dir / "manifest.json",
        "evaluate",
        _common_run_params(
            args,
            config,
            hyper,
            edition,
            {
                "variants": [v.label for v in variants],
                "folds": folds,
                "margins": list(margins),
                "importance_mode": mode,
                "comparison_margin": comparison_margin,
            },
        ),
        {"data": Path(args.data)},
    )
    for variant, mean_rmse, mean_r2, rho_p, rho_a in run.comparison.rows:
        print(
            f"{variant}: rmse={mean_rmse:.2f} r2={mean_r2:.3f} "
            f"rho_personalized({comparison_margin:g})={rho_p:.4f} rho_average={rho_a:.4f}",
            file=sys.stderr,
        )
    return 0


def cmd_importance(args) -> int:
    config = _load_config(args.config)
    hyper = _hyper_from(args, config)
    edition = _resolve(args, config, "dict", "base34")
    folds = int(_resolve(args, config, "folds", 10))
    jobs = int(_resolve(args, config, "jobs", 1))
    mode = _resolve(args, config, "mode", "cv")

    cohort, _ = pipeline.load_cohort(edition, args.data)
    fold_plan = cohort_mod.kfold_plan(cohort.n, folds, hyper.seed)
    ranking, _ = pipeline.compute_ranking(cohort, hyper, fold_plan, mode, jobs)
    from .selection import elbow_suggest

    k = elbow_suggest(ranking)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_importance_csv(out_dir / "importance.csv", ranking)
    _write_json(out_dir / "elbow.json", {"suggested_k": k})
    _write_manifest(
        out_dir / "manifest.json",
        "importance",
        _common_run_params(args, config, hyper, edition, {"folds": folds, "mode": mode}),
        {"data": Path(args.data)},
    )
    print(f"top variable: {ranking.entries[0][0]}; suggested k = {k}", file=sys.stderr)
    return 0


def _read_input_record(path: Path) -> dict:
    if path.suffix.lower() == ".json":
        with open(path, "r", encoding="utf-8") as f:
            obj = json.load(f)
        if not isinstance(obj, dict):
            raise GladpredError("input JSON must be an object of field values")
        return obj
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows:
        raise GladpredError("input CSV has no data rows")
    return rows[0]


def cmd_predict(args) -> int:
    bundle = load_bundle(args.model)
    payload = _read_input_record(Path(args.input))
    margin = float(args.margin)
    if margin <= 0:
        raise GladpredError("--margin must be > 0")
    values, bad = service.validate_request_fields(bundle, payload)
    if bad:
        raise ValidationError(f"missing or out-of-range fields: {', '.join(bad)}")
    response = service.prediction_response(bundle, values, margin)
    print(json.dumps(response, indent=2, sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    bundle = load_bundle(args.model)
    host, _, port = args.addr.rpartition(":")
    app = service.create_app(
        bundle,
        static_dir=args.static,
        cors_origins=tuple(args.cors.split(",")) if args.cors else ("*",),
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gladpred", description=__doc__)
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file supplying any flag; flags override it")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--trees", type=int, default=None)
        p.add_argument("--depth", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--dict", choices=("base34", "extended46"), default=None)

    p = sub.add_parser("synth", help="generate a calibrated synthetic cohort CSV")
    add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r2", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a model bundle from a cohort CSV")
    add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--variant", default=None, help="full, topk:K, or concise")
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--margins", default=None)
    p.add_argument("--importance-mode", dest="importance_mode", choices=("cv", "full"), default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="cross-validated comparison of model variants")
    add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--variants", default=None, help="comma list of full, topk:K, concise")
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--margins", default=None)
    p.add_argument("--importance-mode", dest="importance_mode", choices=("cv", "full"), default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("importance", help="importance ranking and elbow suggestion")
    add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--mode", choices=("cv", "full"), default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("predict", help="predict one record with a saved bundle")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="JSON object or single-row CSV")
    p.add_argument("--margin", type=float, default=15.0)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("serve", help="run the prediction HTTP service")
    p.add_argument("--model", required=True)
    p.add_argument("--addr", default="127.0.0.1:8000")
    p.add_argument("--static", default=None, help="directory of UI files to serve at /")
    p.add_argument("--cors", default="*", help="comma list of allowed origins")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GladpredError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
