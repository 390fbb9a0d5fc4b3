"""``baker-lab <command> --config <path> [--key value ...]``

Exit codes: 0 ok, 1 invalid config, 2 unwritable output, 3 branch lost
during ``trace``, 4 oracle inconclusive at the ``classify`` seed, 5 a
``verify`` check failed.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import tables
from .checks import run_battery
from .config import COMMANDS, ConfigError, build_config, parse_grid, read_config_file
from .continuation import FAMILIES, horocyclic_statistic, track_fixed_point
from .dynamics import (EscapeOracle, RightEscapeOracle, stabilize_along_curve,
                       step_distance_sequence)
from .errors import (BakerLabError, BranchLost, FoldSuspected, OracleInconclusive,
                     QueryOutsideDomain, UndefinedStatistic)
from .maps import AffineDamped, RayCurve, ScalarMultiple
from .render import render

EXIT_OK, EXIT_CONFIG, EXIT_OUTPUT, EXIT_BRANCH, EXIT_ORACLE, EXIT_VERIFY = range(6)

TRACE_HEADER = ["param", "re_z", "im_z", "re_rho", "im_rho", "abs_rho",
                "horocyclic_stat", "escaped"]
PERTURB_HEADER = ["s", "coeff_re", "coeff_im", "fp_re", "fp_im", "abs_rho",
                  "one_minus_abs_rho", "horocyclic_stat", "branch"]


class OutputError(Exception):
    pass


def _write_bytes(path, data: bytes):
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from None


def _write_text(path, text: str):
    _write_bytes(path, text.encode())


def _stat(rho):
    try:
        return horocyclic_statistic(rho)
    except UndefinedStatistic:
        return math.inf


def run_render(cfg, out=None) -> int:
    result = render(cfg.build_map(), cfg.xmin, cfg.xmax, cfg.ymin, cfg.ymax,
                    cfg.width, cfg.height, cfg.max_iter, cfg.escape_radius)
    _write_bytes(cfg.output_path(), result.to_pgm())
    print(result.summary(), file=out or sys.stdout)
    return EXIT_OK


def trace_rows(trace):
    rows = []
    for i, (p, z, r, st) in enumerate(zip(trace.params, trace.locations,
                                          trace.multipliers, trace.horocyclic_stats)):
        escaped = trace.escaped_at is not None and i >= trace.escaped_at
        rows.append([float(p), z.real, z.imag, r.real, r.imag, abs(r), float(st), int(escaped)])
    return rows


def run_trace(cfg, out=None) -> int:
    if cfg.family not in FAMILIES:
        raise ConfigError(f"unknown family {cfg.family!r}")
    family = FAMILIES[cfg.family]() if cfg.family == "fatou" else FAMILIES[cfg.family](cfg.c)
    grid = parse_grid(cfg.grid)
    if cfg.guess == "auto":
        guess = family.guess(grid[0])
    else:
        try:
            guess = complex(cfg.guess.replace(" ", "").replace("i", "j"))
        except ValueError:
            raise ConfigError(f"bad guess {cfg.guess!r}") from None
    code = EXIT_OK
    try:
        trace = track_fixed_point(family, grid, guess, R=cfg.escape_radius, tol=cfg.tol)
    except (BranchLost, FoldSuspected) as exc:
        trace = exc.trace
        print(f"baker-lab: {exc} after {len(trace)} of {len(grid)} grid points",
              file=sys.stderr)
        code = EXIT_BRANCH
    _write_text(cfg.output_path(), tables.dumps(TRACE_HEADER, trace_rows(trace)))
    return code


def _coefficient(f):
    while isinstance(f, AffineDamped):
        f = f.base
    return f.coeff if isinstance(f, ScalarMultiple) else 1 + 0j


def perturb_rows(base, gamma, s_values):
    rows = []
    for s in s_values:
        try:
            g, rec, branch = stabilize_along_curve(base, gamma, s)
        except BakerLabError as exc:
            nan = math.nan
            rows.append([float(s), nan, nan, nan, nan, nan, nan, nan, f"failed: {exc}"])
            continue
        k = _coefficient(g)
        z, rho = rec.location, rec.multiplier
        rows.append([float(s), k.real, k.imag, z.real, z.imag, abs(rho),
                     1 - abs(rho), _stat(rho), branch])
    return rows


def run_perturb(cfg, out=None) -> int:
    s_values = parse_grid(cfg.s_values)
    if any(s <= 0 for s in s_values):
        raise ConfigError("s_values must be positive")
    try:
        gamma = RayCurve(cfg.ray_direction, cfg.ray_anchor)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows = perturb_rows(cfg.build_map(), gamma, s_values)
    _write_text(cfg.output_path(), tables.dumps(PERTURB_HEADER, rows))
    return EXIT_OK


def _oracle(cfg, f):
    kind = cfg.oracle
    if kind == "auto":
        kind = "right" if cfg.alpha == 1 else "escape"
    if kind == "right":
        return RightEscapeOracle(f)
    if kind == "escape":
        return EscapeOracle(f)
    raise ConfigError(f"unknown oracle {cfg.oracle!r}")


def _fmt(x):
    return "absent" if x is None else f"{x:.6g}"


def classify_report(cfg, seq) -> str:
    up = seq.upper
    lines = [
        f"map: alpha={cfg.alpha} c={cfg.c}",
        f"seed point: {cfg.z0}  steps computed: {len(up)}",
        "first upper bounds: " + " ".join(_fmt(u) for u in up[:10]),
        "last upper bounds: " + " ".join(_fmt(u) for u in up[-10:]),
        f"tail median: {seq.tail_median():.6g}",
        f"verdict: {seq.verdict}",
    ]
    return "\n".join(lines) + "\n"


def run_classify(cfg, out=None) -> int:
    f = cfg.build_map()
    oracle = _oracle(cfg, f)
    try:
        seq = step_distance_sequence(f, cfg.z0, oracle, cfg.n, steps=cfg.steps,
                                     rays=cfg.rays, rel_tol=cfg.rel_tol)
    except OracleInconclusive:
        print("baker-lab: oracle inconclusive at the seed point", file=sys.stderr)
        return EXIT_ORACLE
    except QueryOutsideDomain:
        raise ConfigError("seed point is outside the domain") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _write_text(cfg.output_path(), classify_report(cfg, seq))
    print(f"verdict: {seq.verdict}", file=out or sys.stdout)
    return EXIT_OK


def run_verify(cfg, out=None) -> int:
    checks = run_battery(cfg)
    lines = [f"seed: {cfg.seed}", *(c.line() for c in checks)]
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    _write_text(cfg.output_path(), "\n".join(lines) + "\n")
    print(lines[-1], file=out or sys.stdout)
    return EXIT_VERIFY if failed else EXIT_OK


RUNNERS = {"render": run_render, "trace": run_trace, "perturb": run_perturb,
           "classify": run_classify, "verify": run_verify}


def parse_overrides(tokens) -> dict:
    pairs = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            try:
                value = next(it)
            except StopIteration:
                raise ConfigError(f"missing value for --{key}") from None
        pairs[key.replace("-", "_")] = value
    return pairs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="baker-lab", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="key = value file")
    parser.add_argument("--seed", type=int, help="seed for property-test sampling")
    args, rest = parser.parse_known_args(argv)
    try:
        pairs = read_config_file(args.config) if args.config else {}
        pairs.update(parse_overrides(rest))
        pairs["command"] = args.command
        if args.seed is not None:
            pairs["seed"] = str(args.seed)
        cfg = build_config(pairs)
        return RUNNERS[cfg.command](cfg)
    except (ConfigError, OSError) as exc:
        if isinstance(exc, OSError) and args.config and exc.filename == args.config:
            msg = f"cannot read config {args.config}"
        else:
            msg = str(exc)
        print(f"baker-lab: invalid config: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"baker-lab: {exc}", file=sys.stderr)
        return EXIT_OUTPUT


if __name__ == "__main__":
    sys.exit(main())

