"""Batch front-end: run seeded experiment suites, recompute metrics, export
plot-ready CSVs and print brute-force oracle reference values.

Subcommands:
    run     execute a suite config (one directory per variant x seed)
    eval    recompute metric reports from stored records and verify them
    export  merge run directories into per-figure CSV files
    oracle  print the brute-force oracle reference values
"""

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import evaluation, inference, mdn, oracles, presets, simulators, summaries
from .heuristics import EdgeConfig, ModeConfig
from .inference import Heuristic, InferenceConfig, Simulator
from .mog import MixtureOfGaussians, SupportBounds
from .seeding import derive_seed

log = logging.getLogger("lfi_adapt")

SCHEMA_VERSION = 1

_REQUIRED_VARIANT_KEYS = {
    "name": str,
    "simulator": str,
    "heuristic": str,
    "initial_support": dict,
    "feasible_domain": dict,
    "n_iterations": int,
    "successes_per_iter": int,
    "max_attempts_per_iter": int,
    "mdn": dict,
    "ground_truth": list,
    "observation_seed": int,
}
_REQUIRED_MDN_KEYS = {
    "hidden_layers": list,
    "n_components": int,
    "learning_rate": (int, float),
    "batch_size": int,
    "max_epochs": int,
    "patience": int,
    "warm_start": bool,
}


def validate_config(cfg: dict) -> list:
    """Returns a list of offending-key error strings; empty means valid."""
    errors = []
    if cfg.get("schema_version") != SCHEMA_VERSION:
        errors.append(f"schema_version: expected {SCHEMA_VERSION}")
    if not isinstance(cfg.get("seeds"), list) or not cfg.get("seeds"):
        errors.append("seeds: must be a nonempty list of ints")
    variants = cfg.get("variants")
    if not isinstance(variants, list) or not variants:
        errors.append("variants: must be a nonempty list")
        return errors
    names = set()
    for vi, var in enumerate(variants):
        loc = f"variants[{vi}]"
        for key, typ in _REQUIRED_VARIANT_KEYS.items():
            if key not in var:
                errors.append(f"{loc}.{key}: missing")
            elif not isinstance(var[key], typ):
                errors.append(f"{loc}.{key}: wrong type")
        name = var.get("name")
        if name in names:
            errors.append(f"{loc}.name: duplicate variant name {name!r}")
        names.add(name)
        if var.get("simulator") not in ("lotka_volterra", "mg1"):
            errors.append(f"{loc}.simulator: unknown value")
        if var.get("heuristic") not in ("none", "edge", "mode", "centre"):
            errors.append(f"{loc}.heuristic: unknown value")
        for box_key in ("initial_support", "feasible_domain"):
            box = var.get(box_key)
            if isinstance(box, dict) and not ("lower" in box and "upper" in box):
                errors.append(f"{loc}.{box_key}: needs lower/upper")
        for key, typ in _REQUIRED_MDN_KEYS.items():
            if isinstance(var.get("mdn"), dict):
                if key not in var["mdn"]:
                    errors.append(f"{loc}.mdn.{key}: missing")
                elif not isinstance(var["mdn"][key], typ):
                    errors.append(f"{loc}.mdn.{key}: wrong type")
    return errors


def _build_config(var: dict, seed: int) -> InferenceConfig:
    support = SupportBounds.from_dict(var["initial_support"])
    phi = SupportBounds.from_dict(var["feasible_domain"])
    mdn_cfg = var["mdn"]
    arch = mdn.MDNArchitecture(
        input_dim=1, param_dim=support.dim,  # input_dim resolved at train time
        hidden_layers=tuple(mdn_cfg["hidden_layers"]),
        n_components=mdn_cfg["n_components"],
        activation=mdn_cfg.get("activation", "relu"))
    train = mdn.TrainConfig(
        learning_rate=mdn_cfg["learning_rate"], batch_size=mdn_cfg["batch_size"],
        max_epochs=mdn_cfg["max_epochs"], patience=mdn_cfg["patience"],
        warm_start=mdn_cfg["warm_start"])
    cfg = InferenceConfig(
        simulator=Simulator(var["simulator"]),
        initial_support=support,
        feasible_domain=phi,
        observed_summary=np.zeros(1),  # replaced after the observation is made
        n_iterations=var["n_iterations"],
        successes_per_iter=var["successes_per_iter"],
        max_attempts_per_iter=var["max_attempts_per_iter"],
        heuristic=Heuristic(var["heuristic"]),
        edge_config=EdgeConfig(**var.get("edge", {})),
        mode_config=ModeConfig(**var.get("mode", {})),
        mdn_arch=arch,
        mdn_train=train,
        ground_truth=np.array(var["ground_truth"], dtype=float),
        master_seed=seed,
        lv_config=simulators.LotkaVolterraConfig(**var.get("lv", {})),
        mg1_config=simulators.MG1Config(**var.get("mg1", {})),
        lv_summary_mode=summaries.LVSummaryMode(
            var.get("lv_summary_mode", "flat_subsampled")),
    )
    return cfg


def run_one(var: dict, seed: int, out_dir: str) -> list:
    """Run one variant x seed, write records, return summary.csv rows."""
    import dataclasses

    cfg = _build_config(var, seed)
    observed, reference = inference.make_observation(cfg, var["observation_seed"])
    cfg = dataclasses.replace(cfg, observed_summary=observed)
    run_dir = os.path.join(out_dir, var["name"], str(seed))
    os.makedirs(run_dir, exist_ok=True)
    log.info("running %s seed %d -> %s", var["name"], seed, run_dir)
    records = inference.run_inference(cfg, snapshot_dir=run_dir)

    eval_cfg = var.get("eval", {})
    n_samples = eval_cfg.get("n_samples", 20)
    alpha = eval_cfg.get("alpha", 1.0)
    simulate = inference.simulator_fn(cfg)
    rows = []
    cum_failures = 0
    for rec in records:
        report = evaluation.score_posterior(
            rec.posterior, cfg.ground_truth, reference, simulate,
            n_samples=n_samples, seed=derive_seed(seed, "metrics", rec.iteration),
            alpha=alpha)
        rec.metrics = report.to_dict()
        with open(os.path.join(run_dir, f"iter_{rec.iteration}.json"), "w") as fh:
            json.dump(rec.to_dict(), fh, indent=1)
        cum_failures += rec.failures
        row = {
            "variant": var["name"], "seed": seed, "iteration": rec.iteration,
            "attempts": rec.attempts, "failures": rec.failures,
            "success_rate": rec.success_rate, "cum_failures": cum_failures,
            "traj_score": report.traj_score,
        }
        for d in range(cfg.initial_support.dim):
            row[f"lower_{d}"] = rec.support_after.lower[d]
            row[f"upper_{d}"] = rec.support_after.upper[d]
            row[f"param_score_{d + 1}"] = report.param_scores[d]
        rows.append(row)
    meta = {
        "variant": var, "seed": seed,
        "observed_summary": observed.tolist(),
        "reference_trajectory": np.asarray(reference).tolist(),
        "eval": {"n_samples": n_samples, "alpha": alpha},
    }
    with open(os.path.join(run_dir, "meta.json"), "w") as fh:
        json.dump(meta, fh, indent=1)
    return rows


def _summary_fieldnames(rows):
    names = []
    for row in rows:
        for key in row:
            if key not in names:
                names.append(key)
    return names


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    errors = validate_config(cfg)
    if errors:
        json.dump({"error": "invalid config", "keys": errors}, sys.stderr, indent=1)
        sys.stderr.write("\n")
        return 2
    seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else cfg["seeds"]
    variants = cfg["variants"]
    if args.variant:
        variants = [v for v in variants if v["name"] == args.variant]
        if not variants:
            json.dump({"error": f"unknown variant {args.variant!r}"}, sys.stderr)
            return 2
    os.makedirs(args.out, exist_ok=True)
    jobs = [(var, seed) for var in variants for seed in seeds]
    all_rows = []
    failures = {}
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futs = {pool.submit(run_one, var, seed, args.out): (var["name"], seed)
                    for var, seed in jobs}
            for fut, key in futs.items():
                try:
                    all_rows.extend(fut.result())
                except Exception as exc:  # per-run failures don't abort the suite
                    failures["/".join(map(str, key))] = str(exc)
    else:
        for var, seed in jobs:
            try:
                all_rows.extend(run_one(var, seed, args.out))
            except Exception as exc:
                failures[f"{var['name']}/{seed}"] = str(exc)
    all_rows.sort(key=lambda r: (r["variant"], r["seed"], r["iteration"]))
    if all_rows:
        with open(os.path.join(args.out, "summary.csv"), "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=_summary_fieldnames(all_rows))
            writer.writeheader()
            writer.writerows(all_rows)
    if failures:
        with open(os.path.join(args.out, "failures.json"), "w") as fh:
            json.dump(failures, fh, indent=1)
        json.dump({"error": "some runs failed", "runs": failures}, sys.stderr, indent=1)
        return 1
    return 0


def _iter_run_dirs(root):
    for variant in sorted(os.listdir(root)):
        vdir = os.path.join(root, variant)
        if not os.path.isdir(vdir):
            continue
        for seed in sorted(os.listdir(vdir), key=lambda s: (len(s), s)):
            run_dir = os.path.join(vdir, seed)
            if os.path.isfile(os.path.join(run_dir, "meta.json")):
                yield variant, int(seed), run_dir


def _load_records(run_dir):
    with open(os.path.join(run_dir, "meta.json")) as fh:
        meta = json.load(fh)
    records = []
    i = 0
    while os.path.isfile(os.path.join(run_dir, f"iter_{i}.json")):
        with open(os.path.join(run_dir, f"iter_{i}.json")) as fh:
            records.append(json.load(fh))
        i += 1
    return meta, records


def cmd_eval(args) -> int:
    """Recompute metric reports from stored records; verify bit-exactness."""
    mismatches = []
    n_checked = 0
    for variant, seed, run_dir in _iter_run_dirs(args.out):
        meta, records = _load_records(run_dir)
        cfg = _build_config(meta["variant"], meta["seed"])
        simulate = inference.simulator_fn(cfg)
        reference = np.array(meta["reference_trajectory"])
        for rec in records:
            posterior = MixtureOfGaussians.from_dict(rec["posterior"])
            report = evaluation.score_posterior(
                posterior, cfg.ground_truth, reference, simulate,
                n_samples=meta["eval"]["n_samples"],
                seed=derive_seed(seed, "metrics", rec["iteration"]),
                alpha=meta["eval"]["alpha"])
            n_checked += 1
            if report.to_dict() != rec["metrics"]:
                mismatches.append(f"{variant}/{seed}/iter_{rec['iteration']}")
    result = {"checked": n_checked, "mismatches": mismatches}
    json.dump(result, sys.stdout, indent=1)
    sys.stdout.write("\n")
    return 1 if mismatches else 0


def cmd_export(args) -> int:
    """Merge run directories into the per-figure CSVs."""
    os.makedirs(args.export_dir, exist_ok=True)
    loss_rows, eff_rows, support_rows, sample_rows = [], [], [], []
    last_posteriors = {}
    for variant, seed, run_dir in _iter_run_dirs(args.out):
        meta, records = _load_records(run_dir)
        cum_failures = 0
        for rec in records:
            it = rec["iteration"]
            metrics = rec["metrics"] or {}
            row = {"variant": variant, "seed": seed, "iteration": it,
                   "traj_score": metrics.get("traj_score")}
            for d, score in enumerate(metrics.get("param_scores", [])):
                row[f"param_score_{d + 1}"] = score
            loss_rows.append(row)
            cum_failures += rec["failures"]
            eff_rows.append({
                "variant": variant, "seed": seed, "iteration": it,
                "attempts": rec["attempts"], "failures": rec["failures"],
                "success_rate": rec["success_rate"],
                "cum_failures": cum_failures})
            bounds = rec["support_after"]
            for d in range(len(bounds["lower"])):
                support_rows.append({
                    "variant": variant, "seed": seed, "iteration": it,
                    "dim": d, "lower": bounds["lower"][d],
                    "upper": bounds["upper"][d]})
            for theta in rec.get("new_thetas") or []:
                srow = {"variant": variant, "seed": seed, "iteration": it}
                for d, value in enumerate(theta):
                    srow[f"theta_{d}"] = value
                sample_rows.append(srow)
        if records:
            last_posteriors[f"{variant}_{seed}"] = records[-1]["posterior"]
    for fname, rows in (("loss_curves.csv", loss_rows),
                        ("efficiency.csv", eff_rows),
                        ("support.csv", support_rows),
                        ("samples.csv", sample_rows)):
        if not rows:
            continue
        with open(os.path.join(args.export_dir, fname), "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=_summary_fieldnames(rows))
            writer.writeheader()
            writer.writerows(rows)
    with open(os.path.join(args.export_dir, "posteriors.json"), "w") as fh:
        json.dump(last_posteriors, fh, indent=1)
    return 0


def cmd_oracle(args) -> int:
    rng = np.random.default_rng(11)
    weights = rng.dirichlet(np.ones(3))
    means = rng.normal(size=(3, 1))
    variances = rng.uniform(0.1, 1.0, size=(3, 1))
    values = {
        "lv_oscillation_fraction": oracles.lv_oscillation_fraction(
            n_seeds=args.quick and 20 or 100),
        "mg1_mean_median_idt": oracles.mg1_median_idt(
            n_jobs=args.quick and 10_000 or 100_000,
            n_seeds=args.quick and 10 or 100),
        "mog_mass_example": oracles.mog_mass_monte_carlo(
            weights, means, variances, 0, -0.5, 1.2,
            n=args.quick and 100_000 or 1_000_000),
    }
    json.dump(values, sys.stdout, indent=1)
    sys.stdout.write("\n")
    return 0


def _load_config(path: str) -> dict:
    if path in presets.PRESETS:
        return presets.get_preset(path)
    with open(path) as fh:
        return json.load(fh)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lfi-adapt",
        description="Sequential likelihood-free inference with support adaptation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment suite")
    p_run.add_argument("--config", required=True,
                       help="suite config path or preset name "
                            f"({', '.join(presets.PRESETS)})")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seeds", default=None, help="comma-separated seed list")
    p_run.add_argument("--variant", default=None, help="run a single variant")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel processes")
    p_run.set_defaults(func=cmd_run)

    p_eval = sub.add_parser("eval", help="recompute metrics from stored records")
    p_eval.add_argument("--out", required=True, help="run directory to verify")
    p_eval.set_defaults(func=cmd_eval)

    p_export = sub.add_parser("export", help="merge runs into plot-ready CSVs")
    p_export.add_argument("--out", required=True, help="run directory to read")
    p_export.add_argument("--export-dir", required=True, help="CSV destination")
    p_export.set_defaults(func=cmd_export)

    p_oracle = sub.add_parser("oracle", help="print brute-force reference values")
    p_oracle.add_argument("--quick", action="store_true",
                          help="smaller sample counts for a fast sanity pass")
    p_oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("LFI_ADAPT_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
