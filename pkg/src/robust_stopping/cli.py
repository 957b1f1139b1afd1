"""Command-line front end.

Subcommands: ``monopoly``, ``bounds``, ``prophet``, ``simulate`` and
``figure2`` (bounds for the Frechet example under square-root scaling).
Exit status is 0 when every requested row succeeded, 2 when some rows
failed and 1 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .adversary import instance_for_policy, min_payoff_finite_random, min_payoff_uniform
from .bounds import DEFAULT_C2, beta_cutoff, bound_report, upper_envelope
from .distributions import MaxDistribution, Scaled, frechet_base, from_spec
from .errors import RobustStoppingError
from .monopoly import solve_monopoly
from .policies import Deterministic, FiniteRandom, UniformRandom, policy_from_spec
from .prophet import solve_worst_ratio
from .sim import SimConfig, simulate_policy_vs_instance

BOUND_COLUMNS = [
    "n",
    "lower_det",
    "lower_uniform",
    "upper_universal",
    "upper_partition",
    "upper_envelope",
    "lower_const",
    "upper_const",
    "eps_uniform",
    "eps_partition",
    "steps",
    "beta",
    "status",
]
FIGURE2_N = list(range(2, 51))


class InputError(Exception):
    """Malformed command-line input."""


@dataclass(frozen=True)
class RunSpec:
    command: str
    distribution: dict[str, Any] | None
    n_list: tuple[int, ...]
    output: str | None
    seed: int

    def __post_init__(self) -> None:
        if self.command in ("bounds", "figure2"):
            if not self.n_list:
                raise InputError("--n must list at least one value")
            if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
                raise InputError(f"--n must be strictly increasing, got {list(self.n_list)}")


def parse_json(text: str, what: str) -> Any:
    """Inline JSON or a path to a JSON file; errors name line and column."""
    source = text
    if not text.lstrip().startswith(("{", "[")):
        path = Path(text)
        if not path.exists():
            raise InputError(f"{what}: {text!r} is neither JSON nor an existing file")
        source = path.read_text()
    try:
        return json.loads(source)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def parse_n_list(text: str) -> tuple[int, ...]:
    """``"2,3,10"`` or with ranges ``"2-50,100"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                lo, hi = part.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise InputError(f"--n: cannot parse {part!r} as an integer or range") from None
    if any(n < 1 for n in out):
        raise InputError("--n values must be positive")
    return tuple(out)


def _fmt(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def bound_row(base: MaxDistribution, n: int, scaling: str, c2: float) -> dict[str, Any]:
    factor = math.sqrt(n) if scaling == "sqrt_n" else 1.0
    d = Scaled(base, factor) if factor != 1.0 else base
    row: dict[str, Any] = {"n": n}
    try:
        r = bound_report(d, n)
    except RobustStoppingError as exc:
        row["status"] = f"error: {type(exc).__name__}: {exc}"
        return row
    row.update(
        lower_det=r.lower_det,
        lower_uniform=r.lower_uniform,
        upper_universal=r.upper_universal,
        upper_partition=r.upper_partition,
        eps_uniform=r.meta.get("eps_uniform"),
        eps_partition=r.meta.get("eps_partition"),
        steps=r.meta.get("steps"),
        beta=r.meta.get("beta"),
    )
    # constants of the n^-2 terms, in base-law units
    for key, value in (("lower_const", r.lower_uniform), ("upper_const", r.upper_partition)):
        row[key] = None if value is None else (value - r.lower_det) * n * n / factor
    if n > c2 and r.meta.get("c_const") is not None:
        row["upper_envelope"] = upper_envelope(d, n, c2)
    skipped = r.meta["skipped"]
    row["status"] = "ok" if not skipped else "; ".join(f"{k}: {v}" for k, v in skipped.items())
    return row


def _rows(base: MaxDistribution, ns: tuple[int, ...], scaling: str, c2: float, jobs: int) -> list[dict[str, Any]]:
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(bound_row, [base] * len(ns), ns, [scaling] * len(ns), [c2] * len(ns)))
    return [bound_row(base, n, scaling, c2) for n in ns]


def render_rows(rows: list[dict[str, Any]], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BOUND_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row.get(col)) for col in BOUND_COLUMNS])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj: dict[str, Any]) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_monopoly(args: argparse.Namespace) -> int:
    d = from_spec(parse_json(args.dist, "--dist"))
    m = solve_monopoly(d)
    report: dict[str, Any] = {"p_star": m.p_star, "pi_star": m.pi_star, "c": m.c_const, "unique": m.unique}
    try:
        report["beta"] = beta_cutoff(d, m.pi_star, m.p_star)
    except RobustStoppingError as exc:
        report["beta"] = None
        report["beta_error"] = str(exc)
    _emit(_json(report), args.out)
    return 0


def _run_bounds(args: argparse.Namespace, base: MaxDistribution, scaling: str, default_n: str | None) -> int:
    text = args.n if args.n is not None else default_n
    if text is None:
        raise InputError("--n is required")
    spec = RunSpec(args.command, base.to_spec(), parse_n_list(text), args.out, 0)
    rows = _rows(base, spec.n_list, scaling, args.c2, args.jobs)
    _emit(render_rows(rows, args.format), args.out)
    return 0 if all(row.get("status") == "ok" for row in rows) else 2


def cmd_bounds(args: argparse.Namespace) -> int:
    return _run_bounds(args, from_spec(parse_json(args.dist, "--dist")), args.scaling, None)


def cmd_figure2(args: argparse.Namespace) -> int:
    return _run_bounds(args, frechet_base(), "sqrt_n", ",".join(map(str, FIGURE2_N)))


def cmd_prophet(args: argparse.Namespace) -> int:
    s = solve_worst_ratio(args.mu, args.sigma2)
    _emit(
        _json(
            {
                "mu": s.mu,
                "sigma2": s.sigma2,
                "cv2": s.cv2,
                "z": s.z,
                "pi": s.pi,
                "k_top": s.k_top,
                "explicit_bound": s.explicit_bound,
                "beta": s.beta_used,
                "alpha": s.alpha_used,
                "c": s.c_used,
                "residual": s.residual,
            }
        ),
        args.out,
    )
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    d = from_spec(parse_json(args.dist, "--dist"))
    policy = policy_from_spec(parse_json(args.policy, "--policy"))
    ns = parse_n_list(args.n)
    if len(ns) != 1:
        raise InputError("simulate takes a single --n")
    n = ns[0]
    instance = instance_for_policy(policy, n)
    if isinstance(policy, Deterministic):
        analytic = policy.t * d.survival(max(policy.t, 0.0))
    elif isinstance(policy, FiniteRandom):
        analytic = min_payoff_finite_random(d, policy, n)
    elif isinstance(policy, UniformRandom):
        analytic = min_payoff_uniform(d, policy.lo, policy.hi, n, exact=True)
    cfg = SimConfig(args.samples, args.seed, args.antithetic, args.jobs)
    res = simulate_policy_vs_instance(d, instance, policy, cfg)
    z = (res.mean_payoff - analytic) / res.std_error if res.std_error > 0 else 0.0
    _emit(
        _json(
            {
                "analytic": analytic,
                "mc_mean": res.mean_payoff,
                "std_error": res.std_error,
                "z_score": z,
                "samples": res.samples,
                "seed": args.seed,
            }
        ),
        args.out,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robust-stopping", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("monopoly", help="monopoly price, revenue, curvature constant and cutoff")
    p.add_argument("--dist", required=True, help="distribution as JSON or a JSON file")
    common(p)
    p.set_defaults(func=cmd_monopoly)

    for name, helptext in (("bounds", "bounds table for a distribution"), ("figure2", "Frechet example table")):
        p = sub.add_parser(name, help=helptext)
        if name == "bounds":
            p.add_argument("--dist", required=True, help="distribution as JSON or a JSON file")
            p.add_argument("--scaling", choices=["none", "sqrt_n"], default="none")
            p.set_defaults(func=cmd_bounds)
        else:
            p.set_defaults(func=cmd_figure2)
        p.add_argument("--n", help="comma list of n, ranges like 2-50 allowed")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--c2", type=float, default=DEFAULT_C2, help="offset in the asymptotic envelope")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for rows")
        common(p)

    p = sub.add_parser("prophet", help="worst prophet ratio for given mean and variance")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--sigma2", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_prophet)

    p = sub.add_parser("simulate", help="Monte Carlo against the matching worst-case instance")
    p.add_argument("--dist", required=True, help="distribution as JSON or a JSON file")
    p.add_argument("--policy", required=True, help='e.g. {"kind": "uniform", "lo": 0.9, "hi": 1.1}')
    p.add_argument("--n", required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--antithetic", action="store_true")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    common(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, RobustStoppingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
