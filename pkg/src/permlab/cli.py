"""Command-line front end: every experiment as a CSV or JSON table.

Each table ends with a ``check`` column (OK / FAIL, or SKIP where no check
applies) and the process exits nonzero if any row fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass

from . import boson, estimators, spectral
from .errors import CapacityError
from .expansion import MAX_EXACT_G
from .matrices import NoiseParameter, sample_gaussian

OK, FAIL, SKIP = "OK", "FAIL", "SKIP"
MC_TOL = 3.0
ABS_FLOOR = 1e-12


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n: list
    m: int | None
    epsilon: list | None
    c: list | None
    kind: str
    d: list | None
    samples: int | None
    seed: int
    power: list
    output_format: str
    output_path: str | None


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _jsonable(value):
    if isinstance(value, float):
        return float(f"{value:.12g}")
    return value


def render_table(columns, rows, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
        return buf.getvalue()
    payload = {"columns": list(columns), "rows": [{c: _jsonable(row[c]) for c in columns} for row in rows]}
    return json.dumps(payload, indent=1) + "\n"


def _noise_list(cfg: RunConfig, n: int) -> list[NoiseParameter]:
    if cfg.c is not None:
        return [NoiseParameter.from_c(c, n) for c in cfg.c]
    return [NoiseParameter.from_epsilon(e) for e in cfg.epsilon]


def cmd_moments(cfg: RunConfig):
    columns = ["n", "kind", "power", "closed_form", "mc_mean", "stderr", "samples", "seed", "check"]
    rows = []
    for n in cfg.n:
        for power in cfg.power:
            closed = spectral.second_moment(n) if power == 2 else spectral.fourth_moment(n, cfg.kind)
            try:
                est = estimators.estimate_moment(n, power, cfg.kind, cfg.samples, cfg.seed)
            except CapacityError as exc:
                warnings.warn(f"n={n}, power={power}: {exc}; closed form only")
                rows.append(dict(n=n, kind=cfg.kind, power=power, closed_form=float(closed), mc_mean=None,
                                 stderr=None, samples=cfg.samples, seed=cfg.seed, check=SKIP))
                continue
            ok = est.within(closed, MC_TOL)
            rows.append(dict(n=n, kind=cfg.kind, power=power, closed_form=float(closed), mc_mean=est.mean,
                             stderr=est.stderr, samples=cfg.samples, seed=cfg.seed, check=OK if ok else FAIL))
    return columns, rows


def cmd_figure1(cfg: RunConfig):
    columns = ["c", "corr_asymptotic", "corr_n10", "corr_n20", "corr_n30", "check"]
    rows = []
    for c in cfg.c:
        if c > 10:
            raise UsageError("c must not exceed 10 (epsilon = c/10 must stay <= 1)")
        asym = spectral.corr_asymptotic(c)
        vals = {k: spectral.corr_closed_form(k, c / k, "complex") for k in (10, 20, 30)}
        gap10, gap30 = abs(vals[10] - asym), abs(vals[30] - asym)
        ok = gap30 < gap10 or max(gap10, gap30) < ABS_FLOOR
        rows.append(dict(c=c, corr_asymptotic=asym, corr_n10=vals[10], corr_n20=vals[20],
                         corr_n30=vals[30], check=OK if ok else FAIL))
    return columns, rows


def cmd_corr(cfg: RunConfig):
    columns = ["n", "epsilon", "kind", "corr_closed", "corr_mc", "stderr", "check"]
    rows = []
    for n in cfg.n:
        for noise in _noise_list(cfg, n):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                closed = spectral.corr_closed_form(n, noise, cfg.kind)
            row = dict(n=n, epsilon=noise.epsilon, kind=cfg.kind, corr_closed=closed)
            if n > MAX_EXACT_G:
                warnings.warn(f"n={n} exceeds the exact-g limit {MAX_EXACT_G}; closed form only")
                rows.append(dict(row, corr_mc=None, stderr=None, check=SKIP))
                continue
            if noise.epsilon == 1.0:
                warnings.warn(f"n={n}: g is constant at full noise; closed-form limit only")
                rows.append(dict(row, corr_mc=None, stderr=None, check=SKIP))
                continue
            est = estimators.estimate_corr(n, noise, cfg.kind, cfg.samples, cfg.seed)
            ok = abs(est.mean - closed) <= max(MC_TOL * est.stderr, ABS_FLOOR)
            rows.append(dict(row, corr_mc=est.mean, stderr=est.stderr, check=OK if ok else FAIL))
    return columns, rows


def cmd_truncate(cfg: RunConfig):
    columns = ["n", "epsilon", "d", "bound_exact", "mse_empirical", "stderr", "check"]
    rows = []
    for n in cfg.n:
        if n > MAX_EXACT_G:
            raise CapacityError(f"truncate evaluates g exactly and is limited to n <= {MAX_EXACT_G}")
        for noise in _noise_list(cfg, n):
            if not 0 < noise.epsilon < 1:
                raise UsageError("truncate needs 0 < epsilon < 1")
            ds = cfg.d if cfg.d is not None else list(range(0, 2 * n + 1, 2))
            for d in ds:
                if not 0 <= d <= 2 * n:
                    raise UsageError(f"d={d} outside [0, {2 * n}]")
                bound = spectral.truncation_error_bound(n, noise, d, cfg.kind)
                est = estimators.truncation_mse(n, noise, d, cfg.kind, cfg.samples, cfg.seed)
                ok = abs(est.mean - bound) <= max(MC_TOL * est.stderr, ABS_FLOOR)
                rows.append(dict(n=n, epsilon=noise.epsilon, d=d, bound_exact=bound, mse_empirical=est.mean,
                                 stderr=est.stderr, check=OK if ok else FAIL))
    return columns, rows


def cmd_cycles(cfg: RunConfig):
    columns = ["n", "cycle_sum", "factorial_n_plus_1", "literal_n_plus_1", "top_weight_pairsum",
               "top_weight_closed", "check"]
    rows = []
    for n in cfg.n:
        total = spectral.cycle_sum_identity(n)
        target = math.factorial(n + 1)
        pairsum = spectral.top_degree_weight_pairsum(n) if n <= 5 else None
        closed = (n + 1) * math.factorial(n) ** 2
        ok = total == target and (pairsum is None or pairsum == closed)
        rows.append(dict(n=n, cycle_sum=total, factorial_n_plus_1=target, literal_n_plus_1=n + 1,
                         top_weight_pairsum=pairsum, top_weight_closed=closed, check=OK if ok else FAIL))
    return columns, rows


def cmd_boson(cfg: RunConfig) -> tuple[str, bool]:
    """Ideal vs noisy distributions for one sampled n x m matrix over an epsilon grid."""
    n = cfg.n[0]
    if len(cfg.n) != 1:
        raise UsageError("boson takes a single --n")
    m = cfg.m if cfg.m is not None else 2 * n
    A = sample_gaussian(n, m, cfg.kind, cfg.seed)
    noises = _noise_list(cfg, n)
    reports, all_ok, prev_tv = [], True, None
    for noise in noises:
        rep = boson.noisy_distribution(A, noise)
        checks = [abs(rep.ideal_probs.sum() - 1) <= 1e-9, abs(rep.noisy_probs.sum() - 1) <= 1e-9,
                  bool((rep.ideal_probs >= 0).all() and (rep.noisy_probs >= -1e-15).all())]
        if noise.epsilon == 0:
            checks.append(rep.metrics["tv"] <= ABS_FLOOR)
        if prev_tv is not None:
            checks.append(rep.metrics["tv"] >= prev_tv - ABS_FLOOR)
        prev_tv = rep.metrics["tv"]
        rep.metrics["check"] = OK if all(checks) else FAIL
        all_ok &= all(checks)
        reports.append(rep)
    if cfg.output_format == "json":
        dicts = []
        for rep in reports:
            d = rep.to_dict()
            d["metrics"] = {k: _jsonable(v) for k, v in d["metrics"].items()}
            for row in d["outcomes"]:
                row["p_ideal"] = _jsonable(row["p_ideal"])
                row["p_noisy"] = _jsonable(row["p_noisy"])
            dicts.append(d)
        return json.dumps(dicts[0] if len(dicts) == 1 else dicts, indent=1) + "\n", all_ok
    if len(reports) == 1:
        return reports[0].to_csv(), all_ok
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["outcome", "mu", "p_ideal"] + [f"p_noisy[eps={_fmt(r.epsilon)}]" for r in reports])
    for k, S in enumerate(reports[0].outcomes):
        writer.writerow([" ".join(map(str, S.parts)), str(S.mu), _fmt(float(reports[0].ideal_probs[k]))]
                        + [_fmt(float(r.noisy_probs[k])) for r in reports])
    return buf.getvalue(), all_ok


TABLE_COMMANDS = {
    "moments": cmd_moments,
    "figure1": cmd_figure1,
    "corr": cmd_corr,
    "truncate": cmd_truncate,
    "cycles": cmd_cycles,
}

DEFAULTS = {
    "moments": dict(n="1,2,3,4", samples=100_000),
    "figure1": dict(c="0.25,0.5,1,1.5,2,3,4,5"),
    "corr": dict(n="3,4,5,6", epsilon="0,0.1,0.3,0.5", samples=10_000),
    "truncate": dict(n="5", epsilon="0.5", samples=200),
    "boson": dict(n="2", epsilon="0,0.1,0.3,0.5,0.7,0.9"),
    "cycles": dict(n="1,2,3,4,5,6,7,8"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "moments": "Monte Carlo vs closed-form moments E|perm|^2 and E|perm|^4",
        "figure1": "noise correlation at n = 10, 20, 30 and its large-n limit over a c grid",
        "corr": "closed-form vs sampled correlation of |perm|^2 with its noisy version",
        "truncate": "exact tail weight vs empirical error of the degree-d approximator",
        "boson": "ideal vs noisy BosonSampling distribution over an epsilon grid",
        "cycles": "brute-force sum over S_n of 2^cyc and the top-degree real weight",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--n", type=_ints, default=None, help="comma-separated matrix orders")
        p.add_argument("--m", type=int, default=None, help="number of modes (boson)")
        noise = p.add_mutually_exclusive_group()
        noise.add_argument("--epsilon", type=_floats, default=None, help="comma-separated noise levels")
        noise.add_argument("--c", type=_floats, default=None, help="comma-separated c, epsilon = c/n")
        p.add_argument("--kind", choices=("complex", "real"), default="complex")
        p.add_argument("--d", type=_ints, default=None, help="comma-separated degree cutoffs")
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--power", type=_ints, default=[2, 4], help="moment powers (moments)")
        p.add_argument("--format", choices=("csv", "json"), default="csv", dest="output_format")
        p.add_argument("--out", default=None, dest="output_path", metavar="PATH")
    return parser


def _config(args) -> RunConfig:
    defaults = DEFAULTS[args.command]
    n = args.n if args.n is not None else _ints(defaults.get("n", "1"))
    c = args.c
    epsilon = args.epsilon
    if args.command == "figure1":
        if epsilon is not None:
            raise UsageError("figure1 takes --c, not --epsilon")
        c = c if c is not None else _floats(defaults["c"])
        if any(v <= 0 for v in c):
            raise UsageError("c must be positive")
    elif args.command in ("corr", "truncate", "boson"):
        if c is None and epsilon is None:
            epsilon = _floats(defaults["epsilon"])
        if epsilon is not None and any(not 0 <= e <= 1 for e in epsilon):
            raise UsageError("epsilon must lie in [0, 1]")
        if c is not None and any(v <= 0 or v > min(n) for v in c):
            raise UsageError("c must lie in (0, n] so that epsilon = c/n <= 1")
    samples = args.samples if args.samples is not None else defaults.get("samples")
    if samples is not None and samples < 2:
        raise UsageError("--samples must be at least 2")
    if any(v < 1 for v in n):
        raise UsageError("--n values must be positive")
    if args.m is not None and args.m < 1:
        raise UsageError("--m must be positive")
    if args.seed < 0:
        raise UsageError("--seed must be nonnegative")
    if any(p not in (2, 4) for p in args.power):
        raise UsageError("--power values must be 2 or 4")
    return RunConfig(args.command, n, args.m, epsilon, c, args.kind, args.d, samples, args.seed,
                     args.power, args.output_format, args.output_path)


def run(cfg: RunConfig) -> tuple[str, bool]:
    if cfg.command == "boson":
        return cmd_boson(cfg)
    columns, rows = TABLE_COMMANDS[cfg.command](cfg)
    return render_table(columns, rows, cfg.output_format), all(r["check"] != FAIL for r in rows)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        text, ok = run(cfg)
    except (UsageError, ValueError) as exc:
        parser.error(str(exc))  # exits with status 2
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
