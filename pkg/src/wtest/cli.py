"""Batch command-line front end.

Every subcommand validates its inputs, runs one library operation, and
writes outputs atomically (temp file + rename in the target directory).
Exit codes: 0 success, 2 input error, 3 numeric or capacity error.
Randomized commands are bit-reproducible given --seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .bootstrap import run_bootstrap
from .datagen import DistSpec, generate
from .dual import train_dual_critic
from .errors import CapacityError, InputError, NumericError
from .exact import DEFAULT_COST_BUDGET, wasserstein1_1d_exact, wasserstein1_lp_exact
from .inference import (
    anti_concentration_diagnostic,
    check_parameter_budget,
    confidence_interval,
    one_sample_test,
    qq_reference,
    two_sample_test,
)
from .mmd import mmd_permutation_test
from .nn import TrainConfig
from .samples import format_csv, load_csv


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".wtest-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


def _manifest(args, started: float, config_digest=None, inputs=()) -> dict:
    return {
        "command": args.command,
        "version": __version__,
        "seed": int(getattr(args, "seed", 0) or 0),
        "config_digest": config_digest,
        "input_digests": {p: _file_digest(p) for p in inputs},
        "wall_clock_s": time.monotonic() - started,
    }


def _load_config(path: str | None) -> TrainConfig:
    if path is None:
        return TrainConfig()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as err:
        raise InputError(f"{path}: invalid JSON config: {err}")
    if not isinstance(raw, dict):
        raise InputError(f"{path}: config must be a JSON object")
    return TrainConfig.from_dict(raw)


def _threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        return max(1, args.threads)
    env = os.environ.get("WTEST_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"WTEST_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def _dist_spec(args) -> DistSpec:
    location = None
    if args.location is not None:
        location = tuple(float(v) for v in args.location.split(","))
    return DistSpec(
        family=args.dist.replace("-", "_"),
        d=args.d,
        shift=args.shift,
        rate_shift=args.rate_shift,
        location=location,
    )


def _add_dist_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dist", required=True, help="family name (e.g. gaussian, circle-plain)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--shift", type=float, default=0.0, help="gaussian mean shift")
    p.add_argument("--rate-shift", type=float, default=0.0, help="exponential rate increment")
    p.add_argument("--location", default=None, help="point-mass coordinates, comma separated")


def _write_json(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_gen(args) -> int:
    spec = _dist_spec(args)
    sample = generate(spec, args.n, args.seed)
    header = [f"x{i}" for i in range(sample.d)] if args.header else None
    _atomic_write(args.out, format_csv(sample.data, header))
    return 0


def cmd_exact(args) -> int:
    x = load_csv(args.x)
    y = load_csv(args.y)
    if x.d == 1 and y.d == 1:
        value = wasserstein1_1d_exact(x, y)
    else:
        value = wasserstein1_lp_exact(x, y, max_cost_entries=args.budget)
    print(f"{value:.17g}")
    return 0


def cmd_dual(args) -> int:
    x = load_csv(args.x)
    y = load_csv(args.y)
    cfg = _load_config(args.config).with_seed(args.seed)
    estimate = train_dual_critic(x, y, cfg)
    print(f"{estimate.value:.17g} {estimate.lipschitz_certificate:.17g}")
    return 0


def cmd_bootstrap(args) -> int:
    data = load_csv(args.data)
    cfg = _load_config(args.config)
    draws = run_bootstrap(data, args.T, cfg, seed=args.seed, threads=_threads(args))
    _atomic_write(args.out, format_csv(draws.draws))
    return 0


def cmd_one_sample(args) -> int:
    started = time.monotonic()
    data = load_csv(args.data)
    ref = load_csv(args.ref)
    cfg = _load_config(args.config)
    report = one_sample_test(
        data, ref, args.alpha, cfg, T=args.T, seed=args.seed, threads=_threads(args)
    )
    payload = report.to_json_dict()
    payload["manifest"] = _manifest(
        args, started, config_digest=cfg.digest(), inputs=[args.data, args.ref]
    )
    _write_json(args.out, payload)
    return 0


def cmd_two_sample(args) -> int:
    started = time.monotonic()
    x = load_csv(args.x)
    y = load_csv(args.y)
    cfg_x = _load_config(args.config_x)
    cfg_y = _load_config(args.config_y) if args.config_y else cfg_x
    report, quantile_info = two_sample_test(
        x, y, args.alpha, cfg_x, cfg_y, T=args.T, seed=args.seed, threads=_threads(args)
    )
    payload = report.to_json_dict()
    payload["two_sample"] = quantile_info.to_json_dict()
    payload["manifest"] = _manifest(
        args,
        started,
        config_digest=[cfg_x.digest(), cfg_y.digest()],
        inputs=[args.x, args.y],
    )
    _write_json(args.out, payload)
    return 0


def cmd_ci(args) -> int:
    started = time.monotonic()
    data = load_csv(args.data)
    ref = load_csv(args.ref)
    cfg = _load_config(args.config)
    lo, hi = confidence_interval(
        data, ref, args.alpha, cfg, T=args.T, seed=args.seed, threads=_threads(args)
    )
    payload = {
        "lo": lo,
        "hi": hi,
        "alpha": args.alpha,
        "n": data.n,
        "m": ref.n,
        "T": args.T,
        "seed": args.seed,
        "config_digest": cfg.digest(),
        "manifest": _manifest(
            args, started, config_digest=cfg.digest(), inputs=[args.data, args.ref]
        ),
    }
    _write_json(args.out, payload)
    return 0


def cmd_mmd(args) -> int:
    started = time.monotonic()
    x = load_csv(args.x)
    y = load_csv(args.y)
    report = mmd_permutation_test(
        x, y, args.alpha, permutations=args.permutations, seed=args.seed,
        bandwidth=args.bandwidth,
    )
    payload = {
        "mmd2_unbiased": report.mmd2_unbiased,
        "bandwidth": report.bandwidth,
        "permutations": report.permutations,
        "p_value": report.p_value,
        "decision": report.decision,
        "alpha": report.alpha,
        "n": report.n,
        "m": report.m,
        "seed": report.seed,
        "manifest": _manifest(args, started, inputs=[args.x, args.y]),
    }
    _write_json(args.out, payload)
    return 0


def cmd_qq(args) -> int:
    spec = _dist_spec(args)
    cfg = _load_config(args.config)
    refs = qq_reference(spec, args.n, args.reps, seed=args.seed, cfg=cfg)
    T = args.T if args.T is not None else args.reps
    sample = generate(spec, args.n, args.seed)
    draws = run_bootstrap(sample, T, cfg, seed=args.seed, threads=_threads(args))
    rows = max(refs.size, draws.T)
    lines = ["reference,bootstrap"]
    for i in range(rows):
        left = f"{refs[i]:.17g}" if i < refs.size else ""
        right = f"{draws.draws[i]:.17g}" if i < draws.T else ""
        lines.append(f"{left},{right}")
    _atomic_write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_diag_anti_concentration(args) -> int:
    spec = _dist_spec(args)
    deltas = tuple(float(v) for v in args.deltas.split(","))
    table = anti_concentration_diagnostic(
        spec, args.n, args.reps, m_ref=args.m_ref, deltas=deltas, seed=args.seed
    )
    lines = ["r,delta,c_estimate"]
    for r, delta, c in table.rows():
        lines.append(f"{r:.17g},{delta:.17g},{c:.17g}")
    _atomic_write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_budget(args) -> int:
    report = check_parameter_budget(args.n, args.d, args.S)
    print(
        json.dumps(
            {"admissible": report.admissible, "lower": report.lower, "upper": report.upper}
        )
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wtest",
        description="Wasserstein goodness-of-fit tests with neural dual critics",
    )
    parser.add_argument("--version", action="version", version=f"wtest {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write synthetic samples as CSV")
    _add_dist_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--header", action="store_true")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("exact", help="exact W1 between two CSV samples")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_COST_BUDGET)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("dual", help="trained dual estimate plus Lipschitz certificate")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("bootstrap", help="multiplier bootstrap draws as CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("one-sample", help="one-sample test against a reference CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_one_sample)

    p = sub.add_parser("two-sample", help="two-sample test")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--config-x", default=None)
    p.add_argument("--config-y", default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_two_sample)

    p = sub.add_parser("ci", help="bootstrap confidence interval")
    p.add_argument("--data", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--T", type=int, default=300)
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("mmd", help="MMD permutation two-sample baseline")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--permutations", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mmd)

    p = sub.add_parser("qq", help="reference vs bootstrap columns for Q-Q plots")
    _add_dist_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--T", type=int, default=None, help="bootstrap draws (default: reps)")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_qq)

    p = sub.add_parser("diag", help="diagnostics")
    diag_sub = p.add_subparsers(dest="diag_command", required=True)
    pd = diag_sub.add_parser(
        "anti-concentration", help="interval-mass estimates of the distance distribution"
    )
    _add_dist_flags(pd)
    pd.add_argument("--n", type=int, required=True)
    pd.add_argument("--reps", type=int, required=True)
    pd.add_argument("--deltas", default="0.02,0.04,0.06,0.08,0.10")
    pd.add_argument("--m-ref", type=int, default=None)
    pd.add_argument("--seed", type=int, default=0)
    pd.add_argument("--out", required=True)
    pd.set_defaults(func=cmd_diag_anti_concentration)

    p = sub.add_parser("budget", help="parameter-count admissibility window")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--S", type=int, required=True)
    p.set_defaults(func=cmd_budget)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (CapacityError, NumericError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
