"""Command-line entry point: ``gbgpp granulate | benchmark | ablate``."""

from __future__ import annotations

import argparse
import hashlib
import itertools
import sys
import time
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .classify import Rule
from .granulation import GranulationConfig, Method, heterogeneous_nestings, run_granulation
from .io import export_balls, fit_apply_minmax, load_dataset, write_json
from .evaluation import (
    DEFAULT_KNN_GRID,
    cross_validate,
    cross_validate_knn,
    inject_label_noise,
    wilcoxon_signed_rank,
)

DEFAULT_SEED = 0
DEFAULT_NOISE_SEED = 1
METHODS = ("gbg++", "kmeans", "knn")


def _purity(text: str) -> float:
    value = float(text)
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"purity must be in (0, 1], got {text}")
    return value


def _float_list(text: str) -> list[float]:
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if any(not 0 <= v <= 1 for v in values):
        raise argparse.ArgumentTypeError("noise rates must lie in [0, 1]")
    return values


def _int_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("k values must be positive")
    return values


def _sweep(text: str) -> list[float]:
    try:
        start, end, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:end:step, got {text!r}")
    if step <= 0 or not 0 < start <= end <= 1:
        raise argparse.ArgumentTypeError("sweep needs 0 < start <= end <= 1 and step > 0")
    count = int(np.floor((end - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def _methods(text: str) -> list[str]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [n for n in names if n not in METHODS]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"methods must be drawn from {', '.join(METHODS)}")
    return names


def _add_data_args(p: argparse.ArgumentParser, multiple: bool) -> None:
    if multiple:
        p.add_argument("--input", action="append", required=True, help="dataset file (repeatable)")
    else:
        p.add_argument("--input", required=True, help="dataset file")
    p.add_argument("--format", choices=("csv", "libsvm"), help="default: by file extension")
    p.add_argument("--label-column", default="-1", help="CSV label column: index or header name")
    p.add_argument("--no-header", action="store_true", help="CSV has no header row")


def _add_granulation_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--purity", type=_purity, default=1.0)
    p.add_argument("--kmeans-seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--no-am", action="store_true", help="build children on all undivided samples")
    p.add_argument("--no-outlier-detection", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gbgpp", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("granulate", help="granulate one dataset and write its ball set")
    _add_data_args(g, multiple=False)
    _add_granulation_args(g)
    g.add_argument("--method", choices=[m.value for m in Method], default=Method.GBG_PLUS_PLUS.value)
    g.add_argument("--raw", action="store_true", help="skip min-max normalization")
    g.add_argument("--output", help="ball-set file (default: <input>.balls.jsonl)")

    b = sub.add_parser("benchmark", help="cross-validate methods over datasets")
    _add_data_args(b, multiple=True)
    _add_granulation_args(b)
    b.add_argument("--methods", type=_methods, default=["gbg++", "kmeans"])
    b.add_argument("--folds", type=int, default=10)
    b.add_argument("--seed", type=int, default=DEFAULT_SEED, help="fold seed")
    b.add_argument("--noise-seed", type=int, default=DEFAULT_NOISE_SEED)
    b.add_argument("--noise", type=_float_list, default=None, help="e.g. 0.1,0.2,0.3,0.4")
    b.add_argument("--purity-sweep", type=_sweep, default=None, help="start:end:step")
    b.add_argument("--knn-k", type=_int_list, default=list(DEFAULT_KNN_GRID))
    b.add_argument("--output", help="JSON report path")

    a = sub.add_parser("ablate", help="paired runs with a module switched off")
    _add_data_args(a, multiple=True)
    _add_granulation_args(a)
    a.add_argument("--folds", type=int, default=10)
    a.add_argument("--seed", type=int, default=DEFAULT_SEED)
    a.add_argument("--noise-seed", type=int, default=DEFAULT_NOISE_SEED)
    a.add_argument("--noise", type=_float_list, default=None)
    a.add_argument("--output", help="JSON report path")
    return parser


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _load(args, path: str):
    label = int(args.label_column) if args.label_column.lstrip("-").isdigit() else args.label_column
    return load_dataset(path, args.format, label, header=False if args.no_header else None)


def _manifest(args, argv, started: float) -> dict:
    inputs = args.input if isinstance(args.input, list) else [args.input]
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("input", "output")}
    return {
        "command": args.command,
        "argv": list(argv),
        "config": config,
        "inputs": [{"path": p, "sha256": _sha256(Path(p)) if Path(p).is_file() else None} for p in inputs],
        "version": __version__,
        "started": datetime.fromtimestamp(started, timezone.utc).isoformat(),
        "finished": datetime.now(timezone.utc).isoformat(),
    }


def _base_config(args, method: str = Method.GBG_PLUS_PLUS.value) -> GranulationConfig:
    return GranulationConfig(
        purity_threshold=args.purity,
        method=method,
        enable_am=not args.no_am,
        enable_outlier_detection=not args.no_outlier_detection,
        kmeans_seed=args.kmeans_seed,
    )


def cmd_granulate(args, argv) -> int:
    started = time.time()
    dataset = _load(args, args.input)
    if not args.raw:
        dataset, _, _ = fit_apply_minmax(dataset)
    result = run_granulation(dataset, _base_config(args, args.method))
    out = Path(args.output or f"{args.input}.balls.jsonl")
    export_balls(result, out)
    write_json(_manifest(args, argv, started), out.with_name(out.name + ".manifest.json"))
    purities = sorted({round(b.purity, 12) for b in result.balls})
    print(f"dataset              {dataset.name} (n={dataset.n}, q={dataset.q})")
    print(f"method               {result.config.method.value}")
    print(f"balls                {len(result.balls)}")
    print(f"outliers             {result.outliers.size}")
    print(f"iterations           {result.iterations}")
    print(f"distance evaluations {result.distance_evaluations}")
    print(f"wall time            {result.wall_time:.4f}s")
    print(f"purities             {', '.join(f'{p:g}' for p in purities)}")
    print(f"nested conflicts     {len(heterogeneous_nestings(result.balls))}")
    print(f"ball file            {out}")
    return 0


def _evaluate(dataset, method: str, args, config: GranulationConfig | None = None):
    if method == "knn":
        return cross_validate_knn(dataset, args.knn_k, args.folds, args.seed)
    if method == "kmeans":
        cfg = config or _base_config(args, Method.KMEANS_BASELINE.value)
        return cross_validate(dataset, cfg, Rule.SURFACE, args.folds, args.seed, method="kmeans")
    cfg = config or _base_config(args)
    return cross_validate(dataset, cfg, Rule.HARMONIC, args.folds, args.seed, method="gbg++")


def _row(report, **extra) -> dict:
    return extra | {
        "dataset": report.dataset,
        "method": report.method,
        "mean_accuracy": report.mean_accuracy,
        "sd_accuracy": report.sd_accuracy,
        "lnt": report.lnt,
        "distance_evaluations": report.distance_evaluations,
        "per_fold_accuracies": report.per_fold_accuracies,
        "granulate_time": report.granulate_time,
        "predict_time": report.predict_time,
        "config": report.config,
        "fold_seed": report.seed,
    }


def _print_table(title: str, rows: list[dict], keys: list[str]) -> None:
    print(f"\n== {title}")
    print("  ".join(f"{k:>14}" for k in keys))
    for r in rows:
        cells = []
        for k in keys:
            v = r.get(k)
            cells.append(f"{v:>14.4f}" if isinstance(v, float) else f"{str(v):>14}")
        print("  ".join(cells))


def _wilcoxon_rows(rows: list[dict], methods: list[str]) -> list[dict]:
    out = []
    for a, b in itertools.combinations(methods, 2):
        groups = {}
        for r in rows:
            groups.setdefault((r["dataset"], r.get("noise", 0.0)), {})[r["method"]] = r
        for (name, noise), by_method in sorted(groups.items()):
            if a in by_method and b in by_method:
                diffs = np.subtract(by_method[a]["per_fold_accuracies"], by_method[b]["per_fold_accuracies"])
                w = wilcoxon_signed_rank(diffs)
                out.append({
                    "pair": f"{a} - {b}", "dataset": name, "noise": noise, "n": w.n,
                    "r_plus": w.r_plus, "r_minus": w.r_minus, "T": w.statistic_T,
                    "reject_at_0_05": w.reject_at_0_05,
                })
    return out


def cmd_benchmark(args, argv) -> int:
    started = time.time()
    rows, sweep, failures = [], [], []
    noise_rates = args.noise if args.noise is not None else [0.0]
    for path in args.input:
        try:
            clean = _load(args, path)
        except Exception as exc:  # noqa: BLE001 - reported per run
            failures.append({"input": path, "error": str(exc)})
            continue
        for rate in noise_rates:
            data = inject_label_noise(clean, rate, args.noise_seed) if rate else clean
            for method in args.methods:
                try:
                    rows.append(_row(_evaluate(data, method, args), noise=rate))
                except Exception as exc:  # noqa: BLE001
                    failures.append({"input": path, "method": method, "noise": rate, "error": str(exc)})
        if args.purity_sweep:
            for p in args.purity_sweep:
                cfg = replace(_base_config(args), purity_threshold=p)
                try:
                    sweep.append(_row(_evaluate(clean, "gbg++", args, cfg), purity=p))
                except Exception as exc:  # noqa: BLE001
                    failures.append({"input": path, "purity": p, "error": str(exc)})

    tests = _wilcoxon_rows(rows, args.methods)
    keys = ["dataset", "noise", "method", "mean_accuracy", "sd_accuracy", "lnt", "distance_evaluations"]
    for rate in noise_rates:
        _print_table(f"accuracy (noise {rate:g})", [r for r in rows if r["noise"] == rate], keys)
    if sweep:
        _print_table("purity sweep (gbg++)", sweep, ["dataset", "purity", "mean_accuracy", "sd_accuracy"])
    if tests:
        _print_table("wilcoxon signed-rank on per-fold accuracy", tests,
                     ["pair", "dataset", "noise", "r_plus", "r_minus", "T"])
    return _finish(args, argv, started, {"rows": rows, "purity_sweep": sweep, "wilcoxon": tests}, failures)


def cmd_ablate(args, argv) -> int:
    started = time.time()
    studies = []
    if args.no_am or not args.no_outlier_detection:
        studies.append(("am", {"enable_am": False}))
    if args.no_outlier_detection or not args.no_am:
        studies.append(("outlier_detection", {"enable_outlier_detection": False}))
    noise_rates = args.noise if args.noise is not None else [0.0]
    base = GranulationConfig(purity_threshold=args.purity)
    rows, failures = [], []
    for path in args.input:
        try:
            clean = _load(args, path)
        except Exception as exc:  # noqa: BLE001
            failures.append({"input": path, "error": str(exc)})
            continue
        for (study, off), rate in itertools.product(studies, noise_rates):
            data = inject_label_noise(clean, rate, args.noise_seed) if rate else clean
            try:
                with_mod = cross_validate(data, base, Rule.HARMONIC, args.folds, args.seed)
                without = cross_validate(data, replace(base, **off), Rule.HARMONIC, args.folds, args.seed)
            except Exception as exc:  # noqa: BLE001
                failures.append({"input": path, "study": study, "noise": rate, "error": str(exc)})
                continue
            rows.append({
                "study": study, "dataset": data.name, "noise": rate,
                "with": with_mod.mean_accuracy, "without": without.mean_accuracy,
                "with_sd": with_mod.sd_accuracy, "without_sd": without.sd_accuracy,
                "with_per_fold": with_mod.per_fold_accuracies,
                "without_per_fold": without.per_fold_accuracies,
            })
    _print_table("ablation (GBkNN++ accuracy with / without module)", rows,
                 ["study", "dataset", "noise", "with", "without"])
    return _finish(args, argv, started, {"rows": rows}, failures)


def _finish(args, argv, started, body: dict, failures: list[dict]) -> int:
    report = {"manifest": _manifest(args, argv, started), **body, "failures": failures}
    if args.output:
        write_json(report, args.output)
        print(f"\nreport written to {args.output}")
    if failures:
        print(f"\n{len(failures)} run(s) failed:", file=sys.stderr)
        for f in failures:
            print(f"  {f}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"granulate": cmd_granulate, "benchmark": cmd_benchmark, "ablate": cmd_ablate}
    try:
        return handlers[args.command](args, argv)
    except (OSError, ValueError) as exc:
        print(f"gbgpp: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
