"""Command line interface.

Subcommands: run, sweep, compare, probe, oracle, verify.  Config values come
from an optional JSON file (flat keys mirroring ExperimentConfig) with flags
taking precedence; the fully resolved config is echoed into every output file.
Exit codes: 0 success, 1 verification or runtime failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import verify as verify_mod
from .game import StrategyParams
from .harness import (
    ExperimentConfig,
    TRACE_LEVELS,
    config_comment,
    cosh_drift_probe,
    drift_probe,
    inject_state,
    majority_tail_probe,
    run_experiment,
    sweep_rows,
    write_sweep_csv,
    write_summary_json,
    write_tail_csv,
    SWEEP_HEADER,
)
from .oracles import offline_optimum, pz_enumerate, spread_enumerate
from .strategies import KINDS, canonical_kind

_DEFAULTS = StrategyParams()


def _add_param_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", type=Path, help="JSON config file; flags override its values")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--c", type=float)
    sp.add_argument("--p", type=int)
    sp.add_argument("--H", type=float)
    sp.add_argument("--c-cosh", dest="c_cosh", type=float)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--trace", choices=TRACE_LEVELS)
    sp.add_argument("--out", help="output directory (default: out)")
    sp.add_argument("--backend", choices=["numba", "numpy"], help="kernel backend override")


def _load_config_file(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError:
        raise ValueError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ValueError(f"config file is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ValueError("config file must contain a JSON object")
    return data


class _Resolver:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file = _load_config_file(getattr(args, "config", None))

    def get(self, key: str, default=None):
        flag = getattr(self.args, key, None)
        if flag is not None:
            return flag
        if key in self.file:
            return self.file[key]
        return default


def _experiment_config(res: _Resolver, n, T, strategy: str) -> ExperimentConfig:
    return ExperimentConfig(
        strategy=strategy,
        n=n,
        T=T,
        trials=int(res.get("trials", 100)),
        seed=int(res.get("seed", 0)),
        c=float(res.get("c", _DEFAULTS.c)),
        p=int(res.get("p", _DEFAULTS.p)),
        H=float(res.get("H", _DEFAULTS.H)),
        c_cosh=float(res.get("c_cosh", _DEFAULTS.c_cosh)),
        workers=int(res.get("workers", 1)),
        trace=res.get("trace", "summary"),
        out_dir=None,
    )


def _int_list(text) -> list[int]:
    if isinstance(text, list):
        return [int(v) for v in text]
    return [int(part) for part in str(text).split(",") if part.strip()]


def _float_list(text) -> list[float]:
    if isinstance(text, list):
        return [float(v) for v in text]
    return [float(part) for part in str(text).split(",") if part.strip()]


def _print_cells(summary) -> None:
    for cell in summary.cells:
        print(
            f"n={cell.n} T={cell.T} strategy={cell.strategy} trials={cell.trials} "
            f"median_V={cell.final_V['median']:g} q95_V={cell.final_V['q95']:g} "
            f"breaches={cell.breach_total}"
        )


def cmd_run(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    n = res.get("n")
    if n is None:
        raise ValueError("n must be >= 1")
    n = int(n)
    T = res.get("T")
    T = n if T is None else int(T)
    strategy = res.get("strategy", "power_greedy")
    config = _experiment_config(res, [n], [T], strategy)
    config.out_dir = str(res.get("out", "out"))
    summary = run_experiment(config, backend=res.get("backend"))
    _print_cells(summary)
    print(f"wrote {config.out_dir}/summary.json")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    n_raw = res.get("n")
    if n_raw is None:
        raise ValueError("sweep needs an n list with at least 2 values")
    n = _int_list(n_raw)
    if len(n) < 2:
        raise ValueError("sweep needs an n list with at least 2 values")
    T_raw = res.get("T")
    T = _int_list(T_raw) if T_raw is not None else None
    strategies = [canonical_kind(s) for s in str(res.get("strategies", "power_greedy,random")).split(",")]
    out_dir = Path(res.get("out", "out"))
    summaries = []
    for strategy in strategies:
        config = _experiment_config(res, n, T, strategy)
        summary = run_experiment(config, backend=res.get("backend"))
        summaries.append(summary)
        write_summary_json(out_dir / f"summary_{strategy}.json", summary)
        _print_cells(summary)
    comment_cfg = dict(summaries[0].config)
    comment_cfg["strategy"] = ",".join(strategies)
    write_sweep_csv(out_dir / "sweep.csv", summaries, config_comment(comment_cfg))
    print(f"wrote {out_dir}/sweep.csv")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    n = res.get("n")
    if n is None:
        raise ValueError("n must be >= 1")
    n = int(n)
    T = res.get("T")
    T = n if T is None else int(T)
    strategies_raw = res.get("strategies")
    strategies = (
        [canonical_kind(s) for s in str(strategies_raw).split(",")] if strategies_raw else list(KINDS)
    )
    out_dir = Path(res.get("out", "out"))
    summaries = []
    print(SWEEP_HEADER)
    for strategy in strategies:
        config = _experiment_config(res, [n], [T], strategy)
        summary = run_experiment(config, backend=res.get("backend"))
        summaries.append(summary)
        for row in sweep_rows(summary):
            print(row)
    comment_cfg = dict(summaries[0].config)
    comment_cfg["strategy"] = ",".join(strategies)
    write_sweep_csv(out_dir / "compare.csv", summaries, config_comment(comment_cfg))
    print(f"wrote {out_dir}/compare.csv")
    return 0


def cmd_probe(args: argparse.Namespace) -> int:
    res = _Resolver(args)
    kind = args.kind
    seed = int(res.get("seed", 0))
    samples = int(res.get("samples", 10_000))
    out_dir = Path(res.get("out", "out"))
    params = StrategyParams(
        c=float(res.get("c", _DEFAULTS.c)),
        p=int(res.get("p", _DEFAULTS.p)),
        H=float(res.get("H", _DEFAULTS.H)),
        c_cosh=float(res.get("c_cosh", _DEFAULTS.c_cosh)),
        seed=seed,
    )
    echo = {
        "kind": kind,
        "seed": seed,
        "c": params.c,
        "p": params.p,
        "H": params.H,
        "c_cosh": params.c_cosh,
    }
    if kind == "drift":
        n = int(res.get("n", 64))
        kappa = float(args.kappa)
        d_val = math.floor((1.0 - kappa) * math.sqrt(params.c * n))
        state = inject_state(np.full(n, d_val, dtype=np.int64), params=params)
        report = drift_probe(state, samples=samples, seed=seed, multiplier=float(args.multiplier))
        echo.update(n=n, samples=samples, kappa=kappa, d=d_val, multiplier=float(args.multiplier))
        print(
            f"drift probe n={n} phi={report.phi:.4f} E[dphi]={report.mean_delta_phi:.3e} "
            f"P(|L|>={args.multiplier}Q)={report.p_large_L:.4f}"
        )
    elif kind == "cosh":
        n = int(res.get("n", 64))
        lam = params.lam(n)
        d_val = math.ceil(math.acosh(2.0) / lam)
        state = inject_state(np.full(n, d_val, dtype=np.int64), params=params)
        report = cosh_drift_probe(state, samples=samples, seed=seed)
        echo.update(n=n, samples=samples, d=d_val)
        print(
            f"cosh probe n={n} phi={report.phi:.4f} "
            f"P(|L|>={params.c_cosh / 2:g}Q)={report.p_large_L:.4f}"
        )
    elif kind == "tail":
        n = int(res.get("n", 32))
        T = int(res.get("T", 100_000))
        trials = int(res.get("trials", 20))
        report = majority_tail_probe(n, T, trials=trials, seed=seed, backend=res.get("backend"))
        echo.update(n=n, T=T, trials=trials)
        write_tail_csv(out_dir / "tail.csv", report, config_comment(echo))
        print(
            f"tail probe n={n} T={T} max_position={report.max_position} "
            f"slope={report.slope:.4f} r2={report.r_squared:.4f}"
        )
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown probe kind: {kind}")
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {"config": echo, "report": report.to_dict()}
    (out_dir / "probe.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n", encoding="ascii"
    )
    print(f"wrote {out_dir}/probe.json")
    return 0


def _report_dict(rep) -> dict:
    return {
        "total": rep.total,
        "hits": rep.hits,
        "fraction": rep.fraction,
        "threshold": rep.threshold,
    }


def cmd_oracle(args: argparse.Namespace) -> int:
    kind = args.kind
    if kind == "pz":
        if not args.weights:
            raise ValueError("pz oracle needs --weights")
        rep = pz_enumerate(_float_list(args.weights))
        payload = {"kind": "pz", "weights": _float_list(args.weights), "report": _report_dict(rep)}
    elif kind == "spread":
        if not args.weights or args.halfwidth is None:
            raise ValueError("spread oracle needs --weights and --halfwidth")
        rep = spread_enumerate(_float_list(args.weights), args.halfwidth, center=args.center)
        payload = {
            "kind": "spread",
            "weights": _float_list(args.weights),
            "halfwidth": args.halfwidth,
            "center": args.center,
            "report": _report_dict(rep),
        }
    elif kind == "offline":
        if args.vectors:
            vectors = np.asarray(json.loads(args.vectors), dtype=np.int8)
        elif args.vectors_file:
            vectors = np.asarray(json.loads(Path(args.vectors_file).read_text()), dtype=np.int8)
        else:
            raise ValueError("offline oracle needs --vectors or --vectors-file")
        value = offline_optimum(vectors)
        payload = {
            "kind": "offline",
            "T": int(vectors.shape[0]),
            "n": int(vectors.shape[1]),
            "offline_optimum": int(value),
        }
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown oracle kind: {kind}")
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    results = verify_mod.run_all(induce_fault=args.induce_fault)
    print(verify_mod.format_table(results))
    failed = [r for r in results if not r.ok]
    if failed:
        print(f"error: verification failed: {failed[0].name}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signbalance",
        description="Online vector balancing: strategies, Monte-Carlo harness, and self-checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("run", help="run one (strategy, n, T) cell and write summary/trial/trace files")
    sp.add_argument("--strategy", choices=KINDS + ("power", "cosh"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--T", type=int)
    _add_param_flags(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="run a grid of n values (and strategies) and write sweep.csv")
    sp.add_argument("--strategies", help="comma-separated strategy list")
    sp.add_argument("--n", help="comma-separated n list (at least 2 values)")
    sp.add_argument("--T", help="comma-separated T list (default: T = n per cell)")
    _add_param_flags(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("compare", help="run several strategies on one cell and tabulate")
    sp.add_argument("--strategies", help="comma-separated strategy list (default: all)")
    sp.add_argument("--n", type=int)
    sp.add_argument("--T", type=int)
    _add_param_flags(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("probe", help="drift/cosh/tail probes at injected or long-run states")
    sp.add_argument("--kind", choices=["drift", "cosh", "tail"], required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--T", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--kappa", type=float, default=0.2, help="drift probe: d = (1-kappa) sqrt(cn)")
    sp.add_argument("--multiplier", type=float, default=10.0, help="drift probe threshold on |L| vs Q")
    _add_param_flags(sp)
    sp.set_defaults(func=cmd_probe)

    sp = sub.add_parser("oracle", help="exact enumeration oracles")
    sp.add_argument("--kind", choices=["offline", "pz", "spread"], required=True)
    sp.add_argument("--weights", help="comma-separated weights")
    sp.add_argument("--halfwidth", type=float, help="spread interval halfwidth S")
    sp.add_argument("--center", type=float, default=0.0)
    sp.add_argument("--vectors", help="JSON list of +-1 rows")
    sp.add_argument("--vectors-file", help="path to JSON list of +-1 rows")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("verify", help="run the deterministic invariant battery")
    sp.add_argument("--induce-fault", action="store_true", help="self-test: misplace a class boundary")
    sp.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
