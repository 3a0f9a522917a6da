"""Command-line surface.

Exit codes: 0 success, 1 usage error, 2 config/validation error, 3 runtime
failure. Results land as CSV/JSON in the output directory (--out, or the
PSEUDOMIX_OUT environment variable, or the working directory), together with
a manifest.json recording the artifact version and the full parsed
configuration; re-feeding a run manifest through --config reproduces the
outputs bit for bit. Progress goes to stderr only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .distinguisher import (
    Tolerance,
    VerdictKind,
    as_fraction,
    error_probability_bound,
    restricted_search,
)
from .errors import ConfigError, UsageError
from .harness import (
    ChannelModel,
    ExperimentConfig,
    IDEAL_CHANNEL,
    channel_stats,
    run_experiment,
    sweep_lmax,
    write_aggregate_csv,
    write_lmax_sweep_csv,
    write_runs_csv,
)
from .povm import build_ic_povm, check_povm, povm_to_json_dict
from .programs import build_search_list
from .qudit import PREPARATION_PRESETS, run_qudit_trials
from .rng import substream
from .sequences import BitString, symbol_frequencies


def _parse_int_range(text: str) -> list[int]:
    """"5" -> [5]; "1:16" -> [1, ..., 16]."""
    try:
        if ":" in text:
            lo_s, hi_s = text.split(":", 1)
            lo, hi = int(lo_s), int(hi_s)
            if hi < lo:
                raise UsageError(f"empty range {text!r}")
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"cannot parse {text!r} as an integer or a:b range") from exc


def _output_dir(args) -> Path:
    out = args.out or os.environ.get("PSEUDOMIX_OUT") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(out_dir: Path, subcommand: str, config: dict) -> None:
    payload = {
        "artifact_version": __version__,
        "subcommand": subcommand,
        "config": config,
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if isinstance(data, dict) and "config" in data and isinstance(data["config"], dict):
        return data["config"]
    if isinstance(data, dict):
        return data
    raise ConfigError(f"config {path} must hold a JSON object")


def _progress(message: str) -> None:
    print(message, file=sys.stderr)


def _cmd_bound(args) -> int:
    out_dir = _output_dir(args)
    q = as_fraction(args.q)
    ks = _parse_int_range(args.k)
    rows = [(k, error_probability_bound(q, k)) for k in ks]
    with open(out_dir / "bound.csv", "w", newline="") as fh:
        fh.write("k,bound,vacuous\n")
        for k, b in rows:
            value = "" if b.value is None else f"{b.value:.9g}"
            fh.write(f"{k},{value},{str(b.vacuous).lower()}\n")
    _write_manifest(out_dir, "bound", {"q": str(q), "k_values": ks})
    return 0


def _cmd_povm(args) -> int:
    out_dir = _output_dir(args)
    povm = build_ic_povm(args.d)
    report = check_povm(povm) if args.check else None
    payload = povm_to_json_dict(povm, report)
    with open(out_dir / "povm.json", "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")
    _write_manifest(out_dir, "povm", {"d": args.d, "check": bool(args.check)})
    return 0


def _read_bit_file(path: str) -> BitString:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read bit file {path}: {exc}") from exc
    bits = [c for c in text if not c.isspace()]
    if any(c not in "01" for c in bits):
        raise ConfigError(f"{path} holds characters other than 0/1")
    return BitString(int(c) for c in bits)


def _cmd_distinguish(args) -> int:
    out_dir = _output_dir(args)
    m_even = _read_bit_file(args.even_file)
    m_odd = _read_bit_file(args.odd_file)
    search_list = build_search_list(args.lmax)
    verdict = restricted_search(
        m_even, m_odd, search_list, Tolerance(as_fraction(args.q), args.k)
    )
    guess = {
        VerdictKind.GUESS_EVEN_STREAM: "even",
        VerdictKind.GUESS_ODD_STREAM: "odd",
        VerdictKind.INCONCLUSIVE: "inconclusive",
    }[verdict.kind]
    payload = {
        "guess": guess,
        "program_index": (
            verdict.matched_program.program_index if verdict.matched_program else None
        ),
        "length": verdict.matched_length,
        "distance": verdict.matched_distance,
        "bits_compared": verdict.bits_compared,
    }
    with open(out_dir / "verdict.json", "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")
    _write_manifest(
        out_dir,
        "distinguish",
        {
            "even_file": args.even_file,
            "odd_file": args.odd_file,
            "q": str(as_fraction(args.q)),
            "k": args.k,
            "l_max": args.lmax,
        },
    )
    return 0


def _experiment_config_from_args(args) -> ExperimentConfig:
    if args.config:
        return ExperimentConfig.from_json_dict(_load_config_file(args.config))
    channel = IDEAL_CHANNEL
    if args.channel == "poisson-exact":
        channel = ChannelModel("poisson", args.mu, "exact")
    elif args.channel == "poisson-linear":
        channel = ChannelModel("poisson", args.mu, "linear")
    return ExperimentConfig(
        l_max=args.lmax,
        k_values=tuple(_parse_int_range(args.k)),
        q=as_fraction(args.q),
        f=args.f,
        reps=args.reps,
        master_seed=args.master_seed,
        channel=channel,
    )


def _cmd_run(args) -> int:
    out_dir = _output_dir(args)
    config = _experiment_config_from_args(args)
    _progress(
        f"running {config.reps} reps for k in {list(config.k_values)} "
        f"(l_max={config.l_max}, q={config.q}, f={config.f})"
    )
    result = run_experiment(config, workers=args.workers)
    write_runs_csv(result.runs, out_dir / "runs.csv")
    write_aggregate_csv(result.per_k, out_dir / "aggregate.csv")
    _write_manifest(out_dir, "run", config.to_json_dict())
    _progress(f"wrote {out_dir / 'runs.csv'} and {out_dir / 'aggregate.csv'}")
    return 0


def _cmd_sweep_lmax(args) -> int:
    out_dir = _output_dir(args)
    if args.config:
        raw = _load_config_file(args.config)
        l_max_values = [int(v) for v in raw["l_max_values"]]
        k = int(raw["k"])
        q = as_fraction(raw["q"])
        f = float(raw["f"])
        reps = int(raw["reps"])
        master_seed = int(raw["master_seed"])
    else:
        l_max_values = _parse_int_range(args.lmax)
        k = int(args.k)
        q = as_fraction(args.q)
        f = args.f
        reps = args.reps
        master_seed = args.master_seed
    base = ExperimentConfig(
        l_max=max(l_max_values),
        k_values=(k,),
        q=q,
        f=f,
        reps=reps,
        master_seed=master_seed,
    )
    _progress(f"sweeping l_max over {l_max_values} at k={k}, q={q}, reps={reps}")
    rows = sweep_lmax(base, l_max_values, k, q, workers=args.workers)
    write_lmax_sweep_csv(rows, out_dir / "lmax_sweep.csv")
    _write_manifest(
        out_dir,
        "sweep-lmax",
        {
            "l_max_values": l_max_values,
            "k": k,
            "q": str(q),
            "f": f,
            "reps": reps,
            "master_seed": master_seed,
        },
    )
    _progress(f"wrote {out_dir / 'lmax_sweep.csv'}")
    return 0


def _cmd_qudit_demo(args) -> int:
    out_dir = _output_dir(args)
    if args.prep not in PREPARATION_PRESETS:
        raise ConfigError(f"unknown preparation preset {args.prep!r}")
    prep = PREPARATION_PRESETS[args.prep](args.d)
    povm = build_ic_povm(args.d)
    outcome = run_qudit_trials(
        prep,
        povm,
        horizon=args.horizon,
        margin=args.delta,
        epsilon=args.eps,
        master_seed=args.master_seed,
        trials=1,
    )[0]
    freq_tables = [
        [float(x) for x in symbol_frequencies(stream)] for stream in outcome.streams
    ]
    payload = {
        "dimension": args.d,
        "preparation": args.prep,
        "identified": outcome.identified.value,
        "computable_box": outcome.computable_box.value,
        "correct": outcome.correct,
        "selected_frequencies": list(outcome.frequencies),
        "per_effect_frequencies": {"box1": freq_tables[0], "box2": freq_tables[1]},
    }
    with open(out_dir / "qudit_demo.json", "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")
    _write_manifest(
        out_dir,
        "qudit-demo",
        {
            "d": args.d,
            "horizon": args.horizon,
            "delta": args.delta,
            "eps": args.eps,
            "prep": args.prep,
            "master_seed": args.master_seed,
        },
    )
    return 0


def _cmd_channel(args) -> int:
    out_dir = _output_dir(args)
    approx = {"poisson-exact": "exact", "poisson-linear": "linear"}.get(args.channel)
    if approx is None:
        raise ConfigError("channel must be poisson-exact or poisson-linear")
    rng = substream(args.master_seed, 0)
    mean = channel_stats(args.mu, approx, args.reps, rng)
    payload = {
        "mu": args.mu,
        "approx": approx,
        "trials": args.reps,
        "mean_pulses_per_accepted_qubit": mean,
    }
    with open(out_dir / "channel.json", "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")
    _write_manifest(
        out_dir,
        "channel",
        {
            "mu": args.mu,
            "channel": args.channel,
            "reps": args.reps,
            "master_seed": args.master_seed,
        },
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pseudomix",
        description="Simulations distinguishing pseudorandom state mixtures "
        "from maximally mixed preparations.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_out(p):
        p.add_argument("--out", default=None, help="output directory "
                       "(default: $PSEUDOMIX_OUT or the working directory)")

    p = sub.add_parser("bound", help="closed-form wrong-guess bound vs k")
    p.add_argument("--q", required=True, help='tolerance, e.g. "0.15" or "3/20"')
    p.add_argument("--k", required=True, help="single value or range a:b")
    add_out(p)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("povm", help="emit the canonical IC POVM as JSON")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--check", action="store_true", help="include the check report")
    add_out(p)
    p.set_defaults(func=_cmd_povm)

    p = sub.add_parser("distinguish", help="search two measured bit-string files")
    p.add_argument("even_file", help="file with the even-position record")
    p.add_argument("odd_file", help="file with the odd-position record")
    p.add_argument("--q", default="0.15")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lmax", type=int, default=10)
    add_out(p)
    p.set_defaults(func=_cmd_distinguish)

    p = sub.add_parser("run", help="full transmission + search experiment")
    p.add_argument("--config", default=None, help="JSON config or manifest file")
    p.add_argument("--lmax", type=int, default=10)
    p.add_argument("--k", default="1:16", help="single value or range a:b")
    p.add_argument("--q", default="0.15")
    p.add_argument("--f", type=float, default=0.03)
    p.add_argument("--reps", type=int, default=3100)
    p.add_argument("--master-seed", type=int, default=1)
    p.add_argument("--channel", choices=["ideal", "poisson-exact", "poisson-linear"],
                   default="ideal")
    p.add_argument("--mu", type=float, default=0.1)
    p.add_argument("--workers", type=int, default=1)
    add_out(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep-lmax", help="error rate vs search-list size")
    p.add_argument("--config", default=None)
    p.add_argument("--lmax", default="1:11", help="range of list size exponents")
    p.add_argument("--k", type=int, default=14)
    p.add_argument("--q", default="0.15")
    p.add_argument("--f", type=float, default=0.03)
    p.add_argument("--reps", type=int, default=10000)
    p.add_argument("--master-seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    add_out(p)
    p.set_defaults(func=_cmd_sweep_lmax)

    p = sub.add_parser("qudit-demo", help="one generalized two-box game")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--horizon", type=int, default=1300)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--prep", default="constant",
                   choices=sorted(PREPARATION_PRESETS))
    p.add_argument("--master-seed", type=int, default=1)
    add_out(p)
    p.set_defaults(func=_cmd_qudit_demo)

    p = sub.add_parser("channel", help="pulses per accepted qubit statistics")
    p.add_argument("--mu", type=float, default=0.1)
    p.add_argument("--channel", default="poisson-linear",
                   choices=["poisson-exact", "poisson-linear"])
    p.add_argument("--reps", type=int, default=100000)
    p.add_argument("--master-seed", type=int, default=1)
    add_out(p)
    p.set_defaults(func=_cmd_channel)

    return parser


def parse_and_dispatch(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - boundary of the process
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
