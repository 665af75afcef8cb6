"""Command-line front end: data generation, solving, training, evaluation,
and complexity benchmarking.

Exit codes: 0 ok, 2 config/usage error, 3 I/O error, 4 solver error,
5 diverged training, 6 model/data width mismatch.  Every command writes a
manifest JSON next to its main output; JSON summaries reference it.  All
outputs are reproducible from (flags, seeds, input files) except fields
whose names end in _ns or _seconds.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import datetime
import json
import os
import subprocess
import sys
import time

import numpy as np

from . import deepfp, objective, solvers
from .channel import (
    ChecksumMismatch,
    FormatVersionMismatch,
    NetworkConfig,
    derive_sample_seed,
    generate_rayleigh,
    generate_scenario,
    load_dataset_full,
    save_dataset,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_SOLVER = 4
EXIT_DIVERGED = 5
EXIT_WIDTH = 6

LN2 = float(np.log(2.0))

_CONFIG_KEYS = {
    "L": int, "K": int, "Nt": int, "Nr": int, "d": int,
    "power_dbm": float, "noise_dbm": float,
    "cell_distance_km": float, "shadowing_std_db": float, "weight": float,
}


class ConfigFileError(Exception):
    pass


def parse_config_file(path) -> NetworkConfig:
    """Flat key-value text; '#' starts a comment; unknown keys are errors."""
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigFileError(f"cannot read config file: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" in body:
            key, _, raw = body.partition("=")
        else:
            parts = body.split(None, 1)
            if len(parts) != 2:
                raise ConfigFileError(f"line {lineno}: expected 'key = value'")
            key, raw = parts
        key, raw = key.strip(), raw.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigFileError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](raw)
        except ValueError as exc:
            raise ConfigFileError(f"line {lineno}: bad value for {key!r}: {raw!r}") from exc
    missing = [k for k in ("L", "K", "Nt", "Nr", "d") if k not in values]
    if missing:
        raise ConfigFileError(f"missing required keys: {', '.join(missing)}")
    try:
        return NetworkConfig.from_dbm(
            L=values["L"], K=values["K"], Nt=values["Nt"], Nr=values["Nr"],
            d=values["d"],
            power_dbm=values.get("power_dbm", 20.0),
            noise_dbm=values.get("noise_dbm", -90.0),
            cell_distance_km=values.get("cell_distance_km", 0.8),
            shadowing_std_db=values.get("shadowing_std_db", 8.0),
            weight=values.get("weight", 1.0),
        )
    except ValueError as exc:
        raise ConfigFileError(str(exc)) from exc


def _source_revision() -> str:
    try:
        out = subprocess.run(["git", "rev-parse", "HEAD"], capture_output=True,
                             text=True, timeout=10)
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def write_manifest(out_path: str, command: str, args: argparse.Namespace,
                   extra: dict | None = None) -> str:
    manifest_path = str(out_path) + ".manifest.json"
    doc = {
        "command": command,
        "args": {k: v for k, v in vars(args).items() if k != "func"},
        "source_revision": _source_revision(),
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": [str(out_path)],
    }
    if extra:
        doc.update(extra)
    with open(manifest_path, "w") as fh:
        json.dump(doc, fh, indent=2, default=str)
        fh.write("\n")
    return manifest_path


def worker_count(serial: bool) -> int:
    if serial:
        return 1
    env = os.environ.get("BEAMUNFOLD_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def _map_samples(fn, items, workers: int):
    if workers <= 1:
        return [fn(i) for i in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- gen-data ------------------------------------------------------------------

def cmd_gen_data(args) -> int:
    try:
        config = parse_config_file(args.config)
    except ConfigFileError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    gen = generate_rayleigh if args.fading == "rayleigh" else generate_scenario
    samples = [gen(config, derive_sample_seed(args.seed, i))
               for i in range(args.samples)]
    try:
        save_dataset(args.out, config, samples, fading=args.fading)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    write_manifest(args.out, "gen-data", args,
                   {"sample_seeds": [s.seed for s in samples]})
    print(f"wrote {args.samples} samples to {args.out}")
    return EXIT_OK


# -- solve ---------------------------------------------------------------------

def _load_dataset_or_exit(path):
    try:
        return load_dataset_full(path)
    except (FormatVersionMismatch, ChecksumMismatch) as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def _percentiles(values, qs=(10, 50, 90)):
    if len(values) == 0:
        return {f"p{q}": None for q in qs}
    return {f"p{q}": float(np.percentile(values, q)) for q in qs}


def cmd_solve(args) -> int:
    config, samples, _ = _load_dataset_or_exit(args.data)
    if args.limit is not None:
        samples = samples[: args.limit]

    def run(indexed):
        idx, sample = indexed
        V0 = solvers.initial_beamformers(config, sample.seed)
        try:
            if args.algo == "fp":
                tr = solvers.fp_solve(sample, config, V0, max_iters=args.iters,
                                      tol=args.tol)
            elif args.algo == "fastfp":
                tr = solvers.fastfp_solve(sample, config, V0, max_iters=args.iters,
                                          tol=args.tol, stepsize_policy=args.policy)
            else:
                tr = solvers.wmmse_sc_solve(sample, config, V0,
                                            max_iters=args.iters, tol=args.tol)
        except solvers.SolverError as exc:
            return idx, {"sample": idx, "error": f"{type(exc).__name__}: {exc}"}
        doc = tr.to_json_dict()
        doc["sample"] = idx
        doc["seed"] = sample.seed
        doc["total_wall_ns"] = int(sum(tr.wall_ns))
        if args.no_traces:
            doc.pop("trace")
        return idx, doc

    results = _map_samples(run, list(enumerate(samples)), worker_count(args.serial))
    results = [doc for _, doc in sorted(results, key=lambda t: t[0])]
    ok = [r for r in results if "error" not in r]
    failed = [r for r in results if "error" in r]

    wsr_bits = [r["final_wsr_bits"] for r in ok]
    wall = [r["total_wall_ns"] for r in ok]
    summary = {
        "algo": args.algo,
        "samples": len(results),
        "failed": len(failed),
        "mean_wsr_bits": float(np.mean(wsr_bits)) if wsr_bits else None,
        "mean_wsr_nats": float(np.mean(wsr_bits)) * LN2 if wsr_bits else None,
        "wsr_bits_percentiles": _percentiles(wsr_bits),
        "mean_wall_seconds": float(np.mean(wall)) / 1e9 if wall else None,
        "mean_iterations": float(np.mean([r["iterations"] for r in ok])) if ok else None,
    }
    manifest = write_manifest(args.out, "solve", args)
    try:
        with open(args.out, "w") as fh:
            json.dump({"manifest": manifest, "summary": summary, "samples": results},
                      fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if failed:
        for r in failed:
            print(f"sample {r['sample']} failed: {r['error']}", file=sys.stderr)
        return EXIT_SOLVER
    print(f"{args.algo}: mean WSR {summary['mean_wsr_bits']:.4f} bits over "
          f"{len(ok)} samples")
    return EXIT_OK


# -- train ---------------------------------------------------------------------

def cmd_train(args) -> int:
    config, train_samples, _ = _load_dataset_or_exit(args.data)
    val_config, val_samples, _ = _load_dataset_or_exit(args.val)
    if (val_config.Nt, val_config.d, val_config.L, val_config.K, val_config.Nr) != \
            (config.Nt, config.d, config.L, config.K, config.Nr):
        print("train/validation datasets have different dimensions", file=sys.stderr)
        return EXIT_CONFIG

    state = None
    if args.resume is not None:
        try:
            net, state = deepfp.load_model(args.resume)
        except (OSError, deepfp.DeepFPError) as exc:
            print(f"cannot resume: {exc}", file=sys.stderr)
            return EXIT_IO
        if state is None:
            print("checkpoint has no training state; cannot resume", file=sys.stderr)
            return EXIT_CONFIG
        if net.T != args.layers:
            print("resume checkpoint layer count differs from --layers", file=sys.stderr)
            return EXIT_CONFIG
    else:
        net = deepfp.init_stepsize_net(args.layers, config.Nt, config.d,
                                       hidden_layers=args.hidden_layers,
                                       hidden_units=args.hidden_units,
                                       seed=args.seed)

    tc = deepfp.TrainConfig(
        batch_size=args.batch_size, initial_lr=args.lr,
        lr_halving_epochs=args.lr_halving_epochs,
        epochs_stage1=args.epochs_stage1, epochs_stage2=args.epochs_stage2,
        label_solver_iters=args.label_iters, seed=args.seed,
    )
    log_path = args.log if args.log is not None else str(args.out) + ".log.jsonl"
    ckpt_path = str(args.out) + ".ckpt"
    try:
        best, entries, state = deepfp.train(
            net, config, train_samples, val_samples, tc,
            log_path=log_path, state=state, checkpoint_path=ckpt_path)
    except deepfp.DivergedTraining as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except deepfp.EmptyDataset as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        deepfp.save_model(args.out, best)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    write_manifest(args.out, "train", args, {
        "epochs_run": len(entries),
        "best_val_wsr_nats": state.best_val_nats,
        "log": log_path, "checkpoint": ckpt_path,
    })
    print(f"trained model saved to {args.out}; "
          f"best validation WSR {state.best_val_nats / LN2:.4f} bits")
    return EXIT_OK


# -- eval ----------------------------------------------------------------------

class _PaddedPredictor:
    """Experimental width adapter: zero-pad or truncate flattened MLP inputs."""

    def __init__(self, net: deepfp.StepsizeNet, data_half_width: int):
        self.net = net
        self.T = net.T
        self.data_half = data_half_width
        self.model_half = net.input_width // 2

    def _fit(self, flat: np.ndarray) -> np.ndarray:
        L, K = flat.shape[0], flat.shape[1]
        if self.data_half >= self.model_half:
            return flat[:, :, : self.model_half, :]
        out = np.zeros((L, K, self.model_half, 1), dtype=np.complex128)
        out[:, :, : self.data_half, :] = flat
        return out

    def stepsizes(self, tau, V, Lambda, gram, direction):
        L, K = V.shape[0], V.shape[1]
        v_flat = self._fit(V.reshape(L, K, -1, 1))
        d_flat = self._fit(direction.reshape(L, K, -1, 1))
        x = np.concatenate([v_flat, d_flat], axis=2)
        raw = deepfp._mlp_raw(self.net.layers[tau], x)
        sp = np.maximum(raw, 0.0) + np.log1p(np.exp(-np.abs(raw)))
        return sp + deepfp.STEPSIZE_EPS


def _histogram(values, bins: int):
    if len(values) == 0:
        return {"bin_edges": [], "counts": []}
    counts, edges = np.histogram(values, bins=bins)
    return {"bin_edges": [float(e) for e in edges],
            "counts": [int(c) for c in counts]}


def _ecdf(values):
    if len(values) == 0:
        return {"values": [], "cdf": []}
    xs = np.sort(np.asarray(values))
    cdf = np.arange(1, len(xs) + 1) / len(xs)
    return {"values": [float(x) for x in xs], "cdf": [float(c) for c in cdf]}


def cmd_eval(args) -> int:
    config, samples, _ = _load_dataset_or_exit(args.data)
    if args.limit is not None:
        samples = samples[: args.limit]

    base_algo, _, base_iters = args.baseline.partition("@")
    if base_algo != "fastfp" or not base_iters.isdigit():
        print(f"unsupported baseline {args.baseline!r}; use fastfp@N", file=sys.stderr)
        return EXIT_CONFIG
    base_iters = int(base_iters)

    if args.model == "eigen-stub":
        predictor = deepfp.EigenStub(T=args.stub_layers)
    else:
        try:
            net, _ = deepfp.load_model(args.model)
        except (OSError, deepfp.DeepFPError) as exc:
            print(f"cannot load model: {exc}", file=sys.stderr)
            return EXIT_IO
        data_width = 2 * config.Nt * config.d
        if net.input_width != data_width:
            if not args.pad_experimental:
                print(f"model input width {net.input_width} != dataset width "
                      f"{data_width}; rerun with --pad-experimental to force",
                      file=sys.stderr)
                return EXIT_WIDTH
            predictor = _PaddedPredictor(net, data_width // 2)
        else:
            predictor = net

    collect = args.lambda_stats and args.model != "eigen-stub"

    def run(indexed):
        idx, sample = indexed
        V0 = solvers.initial_beamformers(config, sample.seed)
        t0 = time.perf_counter_ns()
        V_net, trace = deepfp.unfold_forward(predictor, sample, V0, config,
                                             collect_eigen=collect)
        net_ns = time.perf_counter_ns() - t0
        t0 = time.perf_counter_ns()
        base = solvers.fastfp_solve(sample, config, V0, max_iters=base_iters, tol=0.0)
        base_ns = time.perf_counter_ns() - t0
        net_nats = objective.wsr_fast(sample.H, V_net, config.weights,
                                      config.noise_power)
        base_nats = base.final_wsr_nats()
        row = {
            "sample": idx,
            "deepfp_wsr_bits": net_nats / LN2,
            "baseline_wsr_bits": base_nats / LN2,
            "ratio": net_nats / base_nats if base_nats != 0 else None,
            "deepfp_wall_ns": net_ns,
            "baseline_wall_ns": base_ns,
        }
        if collect:
            row["mean_predicted_lambda"] = float(
                np.mean([np.mean(s) for s in trace.stepsizes]))
            row["mean_eigen_lambda"] = float(
                np.mean([np.mean(s) for s in trace.eigen_stepsizes]))
        return idx, row

    results = _map_samples(run, list(enumerate(samples)), worker_count(args.serial))
    rows = [r for _, r in sorted(results, key=lambda t: t[0])]

    net_bits = [r["deepfp_wsr_bits"] for r in rows]
    base_bits = [r["baseline_wsr_bits"] for r in rows]
    ratios = [r["ratio"] for r in rows if r["ratio"] is not None]
    summary = {
        "samples": len(rows),
        "baseline": args.baseline,
        "mean_deepfp_wsr_bits": float(np.mean(net_bits)) if net_bits else None,
        "mean_baseline_wsr_bits": float(np.mean(base_bits)) if base_bits else None,
        "mean_ratio": float(np.mean(ratios)) if ratios else None,
        "mean_deepfp_wall_seconds": float(np.mean([r["deepfp_wall_ns"] for r in rows])) / 1e9 if rows else None,
        "mean_baseline_wall_seconds": float(np.mean([r["baseline_wall_ns"] for r in rows])) / 1e9 if rows else None,
    }
    if collect and rows:
        summary["mean_predicted_lambda"] = float(
            np.mean([r["mean_predicted_lambda"] for r in rows]))
        summary["mean_eigen_lambda"] = float(
            np.mean([r["mean_eigen_lambda"] for r in rows]))

    csv_path = str(args.out) + ".csv"
    manifest = write_manifest(args.out, "eval", args, {"csv": csv_path})
    doc = {
        "manifest": manifest,
        "summary": summary,
        "histogram_deepfp_bits": _histogram(net_bits, args.bins),
        "histogram_baseline_bits": _histogram(base_bits, args.bins),
        "cdf_deepfp_bits": _ecdf(net_bits),
        "cdf_baseline_bits": _ecdf(base_bits),
    }
    try:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        with open(csv_path, "w", newline="") as fh:
            fieldnames = list(rows[0].keys()) if rows else [
                "sample", "deepfp_wsr_bits", "baseline_wsr_bits", "ratio",
                "deepfp_wall_ns", "baseline_wall_ns"]
            writer = csv.DictWriter(fh, fieldnames=fieldnames)
            writer.writeheader()
            writer.writerows(rows)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if summary["mean_ratio"] is not None:
        print(f"mean DeepFP/baseline ratio: {summary['mean_ratio']:.4f}")
    else:
        print("no samples evaluated")
    return EXIT_OK


# -- bench ---------------------------------------------------------------------

def _parse_sweep(text: str) -> list[int]:
    key, _, vals = text.partition("=")
    if key.strip().lower() != "nt" or not vals:
        raise ConfigFileError(f"bad sweep {text!r}; expected nt=8,16,32,64")
    try:
        return [int(x) for x in vals.split(",")]
    except ValueError as exc:
        raise ConfigFileError(f"bad sweep values in {text!r}") from exc


def _bench_once(algo: str, config: NetworkConfig, sample, V0, net) -> float:
    t0 = time.perf_counter_ns()
    if algo == "fastfp":
        solvers.fastfp_layer(sample.H, V0, config.weights, config.power,
                             config.noise_power,
                             lambda V, Lam, gram, direction:
                             np.repeat(solvers.eigen_stepsizes(gram)[:, None],
                                       config.K, axis=1))
    else:
        solvers.fastfp_layer(sample.H, V0, config.weights, config.power,
                             config.noise_power,
                             lambda V, Lam, gram, direction:
                             net.stepsizes(0, V, Lam, gram, direction))
    return time.perf_counter_ns() - t0


def cmd_bench(args) -> int:
    try:
        sizes = _parse_sweep(args.sweep)
    except ConfigFileError as exc:
        print(f"sweep error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    results = []
    for nt in sizes:
        config = NetworkConfig.from_dbm(L=args.cells, K=args.users, Nt=nt,
                                        Nr=args.nr, d=args.streams)
        sample = generate_scenario(config, derive_sample_seed(args.seed, nt))
        V0 = solvers.initial_beamformers(config, sample.seed)
        net = deepfp.init_stepsize_net(1, nt, args.streams,
                                       hidden_layers=2, hidden_units=args.hidden_units,
                                       seed=args.seed) if args.algo == "deepfp" else None
        _bench_once(args.algo, config, sample, V0, net)  # warm-up, discarded
        times = [_bench_once(args.algo, config, sample, V0, net)
                 for _ in range(args.reps)]
        results.append({"nt": nt, "median_ns": float(np.median(times)),
                        "times_ns": [int(t) for t in times]})
    xs = np.log([r["nt"] for r in results])
    ys = np.log([r["median_ns"] for r in results])
    slope = float(np.polyfit(xs, ys, 1)[0])
    manifest = write_manifest(args.out, "bench", args)
    doc = {"manifest": manifest, "algo": args.algo, "sizes": results,
           "loglog_slope": slope}
    try:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"{args.algo} per-iteration log-log slope over Nt: {slope:.3f}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamunfold",
        description="Weighted-sum-rate beamforming toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate a channel dataset")
    p.add_argument("--config", required=True, help="key-value scenario file")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--fading", choices=["shadowed", "rayleigh"], default="shadowed")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("solve", help="run a model-driven solver over a dataset")
    p.add_argument("--algo", choices=["fp", "fastfp", "wmmse-sc"], required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--policy", choices=["eigen", "frobenius"], default="eigen")
    p.add_argument("--out", required=True)
    p.add_argument("--serial", action="store_true",
                   help="single-threaded execution for timing fidelity")
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--no-traces", action="store_true",
                   help="drop per-iteration traces from the output JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("train", help="train the unfolded stepsize network")
    p.add_argument("--data", required=True)
    p.add_argument("--val", required=True)
    p.add_argument("--layers", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--hidden-layers", type=int, default=2)
    p.add_argument("--hidden-units", type=int, default=16)
    p.add_argument("--batch-size", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.005)
    p.add_argument("--lr-halving-epochs", type=int, default=20)
    p.add_argument("--epochs-stage1", type=int, default=60)
    p.add_argument("--epochs-stage2", type=int, default=40)
    p.add_argument("--label-iters", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resume", default=None,
                   help="continue from a training checkpoint")
    p.add_argument("--log", default=None, help="JSON-lines training log path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="compare a trained model against a solver")
    p.add_argument("--model", required=True,
                   help="model checkpoint path, or 'eigen-stub'")
    p.add_argument("--data", required=True)
    p.add_argument("--baseline", default="fastfp@100", help="fastfp@N")
    p.add_argument("--out", required=True)
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--stub-layers", type=int, default=8,
                   help="layer count when --model eigen-stub")
    p.add_argument("--serial", action="store_true")
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--lambda-stats", action="store_true",
                   help="also record predicted vs dominant-eigenvalue stepsizes")
    p.add_argument("--pad-experimental", action="store_true",
                   help="force-run a model whose input width mismatches the data")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="per-iteration wall-clock scaling sweep")
    p.add_argument("--sweep", default="nt=8,16,32,64")
    p.add_argument("--algo", choices=["fastfp", "deepfp"], required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--cells", type=int, default=3)
    p.add_argument("--users", type=int, default=3)
    p.add_argument("--nr", type=int, default=2)
    p.add_argument("--streams", type=int, default=2)
    p.add_argument("--hidden-units", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--serial", action="store_true")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "train" and args.layers < 1:
        parser.error("--layers must be >= 1")
    if args.command == "gen-data" and args.samples < 0:
        parser.error("--samples must be >= 0")
    try:
        return args.func(args)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_CONFIG
        return code


if __name__ == "__main__":
    sys.exit(main())
