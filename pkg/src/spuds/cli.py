"""Command-line entry point: ``spuds cluster | nmi | asymptotics``.

Exit codes: 0 success, 1 error, 2 success with warnings (single-cluster
fallback or the ``c_max`` cap was hit).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .algorithm import SpudsConfig, spuds_cluster
from .asymptotics import STATISTICS, HalfspaceSurface, convergence_study, make_model
from .dataset import DataMatrix, check_same_length, load_csv, load_labels
from .errors import SpudsError
from .kmeans import KMeansConfig
from .metrics import nmi

log = logging.getLogger("spuds")

# Flag name -> config key, in echo order.
CLUSTER_KEYS = {
    "input": "input",
    "label_column": "label_column",
    "has_header": "has_header",
    "sigma": "sigma_override",
    "c0": "c0",
    "lam": "lambda",
    "gamma_frac": "gamma_frac",
    "step": "step",
    "c_max": "c_max",
    "seed": "seed",
    "restarts": "kmeans_restarts",
    "max_iters": "kmeans_max_iters",
    "segment_grid": "segment_grid",
    "subsample": "subsample",
}


def _set_threads(threads):
    if threads is None:
        return
    import numba
    from threadpoolctl import threadpool_limits

    numba.set_num_threads(max(1, min(threads, numba.config.NUMBA_NUM_THREADS)))
    threadpool_limits(threads)


def _cluster_config(args) -> dict:
    cfg = {key: getattr(args, attr) for attr, key in CLUSTER_KEYS.items()}
    if args.config:
        record = json.loads(Path(args.config).read_text(encoding="utf-8"))
        saved = record.get("config", record)
        defaults = vars(build_parser().parse_args(["cluster"]))
        explicit = {a for a in CLUSTER_KEYS if getattr(args, a) != defaults[a]}
        for attr, key in CLUSTER_KEYS.items():
            if key in saved and attr not in explicit:
                cfg[key] = saved[key]
    if cfg["input"] is None:
        raise SpudsError("--input is required (directly or via --config)")
    return cfg


def cmd_cluster(args) -> int:
    cfg = _cluster_config(args)
    timings = {}
    t = time.perf_counter()
    X, y = load_csv(cfg["input"], cfg["label_column"], bool(cfg["has_header"]))
    if cfg["subsample"] is not None and cfg["subsample"] < X.n:
        rng = np.random.Generator(np.random.Philox(int(cfg["seed"])))
        idx = np.sort(rng.choice(X.n, size=int(cfg["subsample"]), replace=False))
        X = DataMatrix(X.values[idx])
        y = y[idx] if y is not None else None
    else:
        idx = None
    timings["load"] = time.perf_counter() - t

    spuds_cfg = SpudsConfig(
        c0=int(cfg["c0"]),
        lam=float(cfg["lambda"]),
        gamma_frac=float(cfg["gamma_frac"]),
        step=int(cfg["step"]),
        c_max=None if cfg["c_max"] is None else int(cfg["c_max"]),
        sigma_override=None if cfg["sigma_override"] is None else float(cfg["sigma_override"]),
        kmeans=KMeansConfig(restarts=int(cfg["kmeans_restarts"]), max_iters=int(cfg["kmeans_max_iters"])),
        seed=int(cfg["seed"]),
        segment_grid=int(cfg["segment_grid"]),
    )
    result = spuds_cluster(X, spuds_cfg)
    timings.update(result.timings)

    resolved = dict(cfg)
    resolved.update(
        sigma=result.sigma,
        gamma=result.gamma,
        c_max_resolved=spuds_cfg.resolved_c_max(X.n),
        n=X.n,
        d=X.d,
    )
    if result.scale is not None:
        resolved.update(intrinsic_dim=result.scale.intrinsic_dim, s_value=result.scale.s_value)
    record = {
        "version": __version__,
        "seed": spuds_cfg.seed,
        "config": resolved,
        "result": result.as_dict(),
        "timings": timings,
    }
    if idx is not None:
        record["subsample_indices"] = idx.tolist()
    if y is not None:
        record["nmi"] = nmi(result.partition, y)
    text = json.dumps(record, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    if args.labels_out:
        Path(args.labels_out).write_text(
            "".join(f"{v}\n" for v in result.labels.tolist()), encoding="utf-8"
        )
    for w in result.warnings:
        log.warning("warning: %s", w)
    return 2 if result.warnings else 0


def cmd_nmi(args) -> int:
    pred = load_labels(args.pred)
    truth = load_labels(args.truth)
    check_same_length(pred, truth)
    print(f"{nmi(pred, truth):.6f}")
    return 0


def cmd_asymptotics(args) -> int:
    model = make_model(args.model, args.separation)
    if args.statistic not in STATISTICS:
        raise SpudsError(f"unknown statistic {args.statistic!r}; valid: {', '.join(STATISTICS)}")
    n_grid = [int(tok) for tok in args.n_grid.split(",") if tok.strip()]
    surface = HalfspaceSurface.axis(model.dim, args.surface_offset)
    run = convergence_study(
        model, surface, args.statistic, n_grid, args.seeds, args.alpha, args.base_seed
    )
    text = run.to_json(indent=2)
    if args.output:
        out = Path(args.output)
        out.write_text(text + "\n", encoding="utf-8")
        Path(args.csv or out.with_suffix(".csv")).write_text(run.to_csv(), encoding="utf-8")
    else:
        print(text)
        if args.csv:
            Path(args.csv).write_text(run.to_csv(), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spuds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--threads", type=int, default=None, help="cap internal parallelism")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a CSV file with SPUDS")
    p.add_argument("--input", help="CSV file of observations")
    p.add_argument("--config", help="re-run the config echoed in a previous JSON record")
    p.add_argument("--label-column", type=int, default=None)
    p.add_argument("--has-header", action="store_true")
    p.add_argument("--sigma", type=float, default=None, help="fixed scale; skips the data-driven rule")
    p.add_argument("--c0", type=int, default=30)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--gamma-frac", type=float, default=1 / 200)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--c-max", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--segment-grid", type=int, default=100)
    p.add_argument("--subsample", type=int, default=None)
    p.add_argument("--output", help="write the JSON record here instead of stdout")
    p.add_argument("--labels-out", help="write one cluster id per line")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("nmi", help="normalised mutual information of two label files")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.set_defaults(func=cmd_nmi)

    p = sub.add_parser("asymptotics", help="Monte Carlo convergence study")
    p.add_argument("--model", default="gauss1d")
    p.add_argument("--separation", type=float, default=4.0, help="mixture1d component distance")
    p.add_argument("--surface-offset", type=float, default=0.0)
    p.add_argument("--statistic", default="ncut")
    p.add_argument("--n-grid", default="1000,4000,16000")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=None, help="sigma_n = n^-alpha; default 1/(2d+3)")
    p.add_argument("--output", help="JSON path; cells CSV goes next to it")
    p.add_argument("--csv", help="explicit CSV path")
    p.set_defaults(func=cmd_asymptotics)
    return parser




def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        _set_threads(args.threads)
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 1
    except (SpudsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
