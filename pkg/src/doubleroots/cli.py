"""Command-line front end with machine-readable, reproducible output.

Every subcommand echoes its fully resolved configuration, emits JSON (or CSV
for table-shaped results), and uses fixed exit codes so scripts can branch on
outcomes: 0 success, 2 usage or validation error, 3 size budget exceeded,
4 root finder did not converge.

Wall-clock timings are recorded but only serialized with --timings, so a
fixed (config, seed) pair reproduces byte-identical output across runs and
worker counts.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from fractions import Fraction

from . import anticoncentration as ac
from . import core, experiments, mixture, polyalg
from .errors import BudgetExceeded, DomainError, MaxAtomTooLarge, NonConverged, ZeroInput

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_NONCONVERGED = 4

BUDGET_ENV_VAR = "DOUBLEROOTS_BUDGET"

_UNIFORM_RE = re.compile(r"^uniform(-?\d+)\.\.(-?\d+)$")
_SIGNED_RE = re.compile(r"^signed-uniform(\d+)$")


class UsageError(ValueError):
    pass


def parse_distribution(spec: str) -> core.IntegerDistribution:
    """Parse a distribution spec: a shortcut name, inline JSON, or a file path.

    Shortcuts: "rademacher", "uniformLO..HI" (e.g. uniform0..3), and
    "signed-uniformM" for the uniform law on {-M, ..., M}.  Inline JSON maps
    values to "num/den" weights: {"1": "1/4", "2": "3/4"}.
    """
    spec = spec.strip()
    if spec == "rademacher":
        return core.IntegerDistribution.rademacher()
    m = _UNIFORM_RE.match(spec)
    if m:
        return core.IntegerDistribution.uniform_range(int(m.group(1)), int(m.group(2)))
    m = _SIGNED_RE.match(spec)
    if m:
        radius = int(m.group(1))
        return core.IntegerDistribution.uniform_range(-radius, radius)
    if spec.startswith("{"):
        raw = json.loads(spec)
    elif os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    else:
        raise UsageError(f"unrecognized distribution spec: {spec!r}")
    if isinstance(raw, dict) and "atoms" in raw:
        return core.distribution_from_json_dict(raw)
    try:
        return core.IntegerDistribution.from_mapping(
            {int(v): core.parse_fraction(w) for v, w in raw.items()}
        )
    except (ValueError, AttributeError) as exc:
        raise UsageError(f"invalid distribution spec: {exc}") from exc


def parse_poly(text: str) -> core.IntPolynomial:
    """Comma-separated ascending coefficients, e.g. "3,-1,3" for 3 - x + 3x^2."""
    try:
        return core.IntPolynomial.from_coeffs(int(c) for c in text.split(","))
    except ValueError as exc:
        raise UsageError(f"invalid polynomial spec: {exc}") from exc


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"invalid integer list: {text!r}") from exc


def parse_n_values(args) -> list[int]:
    """Resolve --n / --n-range / --ns into an explicit degree list."""
    if getattr(args, "ns", None):
        return parse_int_list(args.ns)
    if getattr(args, "n_range", None):
        m = re.match(r"^(\d+):(\d+)$", args.n_range)
        if not m:
            raise UsageError("--n-range must look like LO:HI")
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise UsageError("--n-range must be non-decreasing")
        return list(range(lo, hi + 1))
    if getattr(args, "n", None) is not None:
        return [args.n]
    raise UsageError("one of --n, --n-range, or --ns is required")


def _default_budget(fallback: int) -> int:
    env = os.environ.get(BUDGET_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"{BUDGET_ENV_VAR} must be an integer") from exc
    return fallback


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doubleroots",
        description="Exact and Monte Carlo experiments on random integer polynomials",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, seeded=False, budgeted=False, workers=False):
        p.add_argument("--out", help="write the report to this file instead of stdout")
        p.add_argument("--format", choices=["json", "csv"], default="json",
                       help="output format (default: %(default)s)")
        p.add_argument("--timings", action="store_true",
                       help="include wall-clock timings in the report (breaks byte-stability)")
        if seeded:
            p.add_argument("--seed", type=int, default=0,
                           help="64-bit master seed (default: %(default)s)")
        if budgeted:
            p.add_argument("--budget", type=int, default=None,
                           help=f"size budget; default from ${BUDGET_ENV_VAR} or built-in")
        if workers:
            p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                           help="worker processes (default: machine cores)")

    p = sub.add_parser("decompose", help="split a law into fair two-point components",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--dist", required=True)
    add_common(p)

    p = sub.add_parser("sample", help="draw from the (I, Δ, fair-bit) representation",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--dist", required=True)
    p.add_argument("--count", type=int, default=10)
    add_common(p, seeded=True)

    p = sub.add_parser("pmax", help="exact max point mass of P(a) per degree",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--n-range")
    p.add_argument("--ns")
    p.add_argument("--a", type=int, default=2)
    add_common(p, budgeted=True)

    p = sub.add_parser("lambda", help="decay rate table -ln(p_max)/(n+1)",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--n-range")
    p.add_argument("--ns")
    p.add_argument("--a", type=int, default=2)
    add_common(p, budgeted=True)

    p = sub.add_parser("coins", help="exact fair-coin sum mass vs the dyadic bound",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--b", required=True, help="comma-separated offsets b_i")
    p.add_argument("--d", required=True, help="comma-separated nonzero steps d_i")
    add_common(p)

    p = sub.add_parser("wstat", help="exact law of W = |{i + w_i}| and its bounds",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--w-dist", required=True, help="law of the displacements w_i")
    p.add_argument("--n", type=int, required=True)
    add_common(p, budgeted=True)

    p = sub.add_parser("fn", help="rate function f_n on a grid plus the threshold c0",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--alpha-min", type=float, default=0.01)
    p.add_argument("--alpha-max", type=float, default=0.99)
    add_common(p)

    p = sub.add_parser("doubleroot-exact", help="exhaustive double-root census",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True)
    add_common(p, budgeted=True, workers=True)

    p = sub.add_parser("doubleroot-mc", help="Monte Carlo double-root frequencies",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=100000)
    add_common(p, seeded=True, workers=True)

    p = sub.add_parser("scaling", help="n² · p(double root) across degrees",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--dist", required=True)
    p.add_argument("--ns", help="comma-separated degrees (default 3,7,11 for rademacher)")
    p.add_argument("--mc-trials", type=int, default=None,
                   help="Monte Carlo fallback for degrees beyond the exact budget")
    add_common(p, seeded=True, budgeted=True, workers=True)

    p = sub.add_parser("divisibility", help="empirical P(k² divides P(a))",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=int, default=2)
    p.add_argument("--ks", required=True, help="comma-separated moduli k")
    p.add_argument("--trials", type=int, default=100000)
    add_common(p, seeded=True)

    p = sub.add_parser("tail2", help="empirical P(|P(a)| ≤ n^-C · 2^n)",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=int, default=2)
    p.add_argument("--c", type=float, default=2.0, help="tail exponent C")
    p.add_argument("--trials", type=int, default=100000)
    add_common(p, seeded=True)

    p = sub.add_parser("house", help="maximum root modulus of an integer polynomial",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--poly", required=True, help="ascending coefficients, e.g. 3,-1,3")
    p.add_argument("--tol", type=float, default=1e-10)
    add_common(p)

    p = sub.add_parser("census", help="count small-house polynomials of fixed degree/lead",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", default="1/6", help="threshold parameter as a fraction")
    p.add_argument("--tol", type=float, default=1e-9)
    add_common(p, budgeted=True)

    p = sub.add_parser("power-sums", help="exact power sums of the roots",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--poly", required=True, help="ascending coefficients")
    p.add_argument("--upto", type=int, required=True)
    add_common(p)

    return parser


def _frac(q: Fraction) -> str:
    return core.format_fraction(q)


def run_command(args) -> tuple[dict, str | None, dict]:
    """Execute one subcommand; returns (result dict, csv text or None, config echo)."""
    cmd = args.command
    config: dict = {"command": cmd}
    csv_text = None

    if cmd == "decompose":
        dist = parse_distribution(args.dist)
        config["dist"] = core.distribution_to_json_dict(dist)
        deco = mixture.decompose(dist)
        result = deco.to_json_dict()

    elif cmd == "sample":
        dist = parse_distribution(args.dist)
        config.update(dist=core.distribution_to_json_dict(dist), count=args.count, seed=args.seed)
        if args.count < 1:
            raise UsageError("--count must be at least 1")
        import random

        sampler = mixture.to_sampler(mixture.decompose(dist))
        rng = random.Random(args.seed)
        draws = sampler.sample_many(rng, args.count)
        freq: dict[int, int] = {}
        for v in draws:
            freq[v] = freq.get(v, 0) + 1
        result = {
            "rows": [
                {"t": _frac(t), "I": i, "delta": delta} for t, i, delta in sampler.rows
            ],
            "draws": draws,
            "frequencies": {str(v): c for v, c in sorted(freq.items())},
        }

    elif cmd == "pmax":
        dist = parse_distribution(args.dist)
        ns = parse_n_values(args)
        budget = args.budget if args.budget is not None else _default_budget(ac.DEFAULT_PMF_BUDGET)
        config.update(dist=core.distribution_to_json_dict(dist), ns=ns, a=args.a, budget=budget)
        profile = ac.epsilon_profile(dist, ns, a=args.a, budget=budget)
        result = {
            "a": profile.a,
            "rows": [
                {"n": r.n, "p_max": _frac(r.p_max), "argmax": r.argmax, "eps_n": r.eps}
                for r in profile.rows
            ],
            "nonpositive_eps_rows": list(profile.nonpositive_eps_rows),
        }
        csv_text = profile.to_csv()

    elif cmd == "lambda":
        dist = parse_distribution(args.dist)
        ns = parse_n_values(args)
        budget = args.budget if args.budget is not None else _default_budget(ac.DEFAULT_PMF_BUDGET)
        config.update(dist=core.distribution_to_json_dict(dist), ns=ns, a=args.a, budget=budget)
        table = ac.estimate_lambda(dist, ns, a=args.a, budget=budget)
        result = {
            "a": table.a,
            "rows": [
                {
                    "n": r.n,
                    "num_coeffs": r.num_coeffs,
                    "p_max": _frac(r.p_max),
                    "lambda_hat": r.lambda_hat,
                }
                for r in table.rows
            ],
            "submultiplicative_ok": table.submultiplicative_ok,
            "checked_triples": [list(t) for t in table.checked_triples],
        }
        csv_text = table.to_csv()

    elif cmd == "coins":
        b = parse_int_list(args.b)
        d = parse_int_list(args.d)
        config.update(b=b, d=d)
        check = ac.coins_bound_check(b, d)
        result = {
            "max_mass": _frac(check.max_mass),
            "max_value": check.max_value,
            "bound": _frac(check.bound),
            "passed": check.passed,
        }

    elif cmd == "wstat":
        w_dist = parse_distribution(args.w_dist)
        budget = args.budget if args.budget is not None else _default_budget(ac.DEFAULT_W_BUDGET)
        config.update(w_dist=core.distribution_to_json_dict(w_dist), n=args.n, budget=budget)
        model = ac.WModel(w_law=w_dist, n=args.n)
        pmf = ac.w_exact_pmf(model, budget=budget)
        expectation = sum((Fraction(v) * p for v, p in pmf.entries.items()), Fraction(0))
        lower = ac.expected_w_lower_bound(model)
        bounds = []
        for s in sorted(pmf.entries):
            if 0 < s < model.n:
                wb = ac.w_binomial_bound(model.n, Fraction(s, model.n))
                bounds.append(
                    {
                        "s": s,
                        "p": _frac(pmf.entries[s]),
                        "binomial_term": _frac(wb.binomial_term),
                        "ratio_term": float(wb.ratio_term),
                        "holds": pmf.entries[s] <= wb.binomial_term,
                    }
                )
        result = {
            "pmf": core.pmf_to_json_dict(pmf),
            "mean": _frac(expectation),
            "lower_bound": _frac(lower.bound),
            "eta": _frac(lower.eta),
            "binomial_bounds": bounds,
        }

    elif cmd == "fn":
        config.update(n=args.n, grid=args.grid, alpha_min=args.alpha_min, alpha_max=args.alpha_max)
        analysis = ac.f_n_analysis(
            args.n, grid_size=args.grid, alpha_lo=args.alpha_min, alpha_hi=args.alpha_max
        )
        result = {
            "n": analysis.n,
            "c0": analysis.c0,
            "grid": [{"alpha": a, "f_n": v} for a, v in analysis.grid],
        }
        csv_text = analysis.to_csv()

    elif cmd == "doubleroot-exact":
        dist = parse_distribution(args.dist)
        budget = args.budget if args.budget is not None else _default_budget(
            experiments.DEFAULT_ENUM_BUDGET
        )
        config.update(
            dist=core.distribution_to_json_dict(dist), n=args.n, budget=budget,
            workers=args.workers,
        )
        report = experiments.exact_double_root(dist, args.n, budget=budget, workers=args.workers)
        result = report.to_json_dict(include_timings=args.timings)

    elif cmd == "doubleroot-mc":
        dist = parse_distribution(args.dist)
        config.update(
            dist=core.distribution_to_json_dict(dist), n=args.n, trials=args.trials,
            seed=args.seed, workers=args.workers,
        )
        report = experiments.mc_double_root(
            dist, args.n, trials=args.trials, seed=args.seed, workers=args.workers
        )
        result = report.to_json_dict(include_timings=args.timings)

    elif cmd == "scaling":
        dist = parse_distribution(args.dist)
        if args.ns:
            ns = parse_int_list(args.ns)
        elif dist == core.IntegerDistribution.rademacher():
            ns = [3, 7, 11]
        else:
            raise UsageError("--ns is required for non-rademacher distributions")
        budget = args.budget if args.budget is not None else _default_budget(
            experiments.DEFAULT_ENUM_BUDGET
        )
        config.update(
            dist=core.distribution_to_json_dict(dist), ns=ns, budget=budget,
            mc_trials=args.mc_trials, seed=args.seed, workers=args.workers,
        )
        table = experiments.scaling_table(
            dist, ns, budget=budget, mc_trials=args.mc_trials, seed=args.seed,
            workers=args.workers,
        )
        result = table.to_json_dict()
        csv_text = table.to_csv()

    elif cmd == "divisibility":
        dist = parse_distribution(args.dist)
        ks = parse_int_list(args.ks)
        config.update(
            dist=core.distribution_to_json_dict(dist), n=args.n, a=args.a, ks=ks,
            trials=args.trials, seed=args.seed,
        )
        report = experiments.divisibility_experiment(
            dist, args.n, args.a, ks, trials=args.trials, seed=args.seed
        )
        result = report.to_json_dict()
        csv_text = report.to_csv()

    elif cmd == "tail2":
        dist = parse_distribution(args.dist)
        config.update(
            dist=core.distribution_to_json_dict(dist), n=args.n, a=args.a, c=args.c,
            trials=args.trials, seed=args.seed,
        )
        check = experiments.tail_near_two_check(
            dist, args.n, trials=args.trials, seed=args.seed, c_exponent=args.c, a=args.a
        )
        result = check.to_json_dict()

    elif cmd == "house":
        poly = parse_poly(args.poly)
        config.update(poly=core.polynomial_to_json_dict(poly), tol=args.tol)
        if poly.degree < 1:
            raise UsageError("--poly must have degree at least 1")
        value = polyalg.house(poly, tol=args.tol)
        result = {"house": value}

    elif cmd == "census":
        b = core.parse_fraction(args.b)
        budget = args.budget if args.budget is not None else _default_budget(
            experiments.DEFAULT_CENSUS_BUDGET
        )
        config.update(d=args.d, a=args.a, b=_frac(b), tol=args.tol, budget=budget)
        report = experiments.small_house_census(
            args.d, args.a, b=b, tol=args.tol, budget=budget
        )
        result = report.to_json_dict()

    elif cmd == "power-sums":
        poly = parse_poly(args.poly)
        config.update(poly=core.polynomial_to_json_dict(poly), upto=args.upto)
        sums = polyalg.power_sums(poly, args.upto)
        result = {"sums": [_frac(s) for s in sums.sums]}

    else:  # pragma: no cover - argparse enforces the choices
        raise UsageError(f"unknown command {cmd!r}")

    return result, csv_text, config


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = time.perf_counter()
    try:
        result, csv_text, config = run_command(args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"error: budget-exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NonConverged as exc:
        print(f"error: non-converged: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (MaxAtomTooLarge, DomainError, ZeroInput, ValueError) as exc:
        print(f"error: invalid-input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    elapsed = time.perf_counter() - started

    if args.format == "csv":
        if csv_text is None:
            print("error: usage: this command has no CSV form", file=sys.stderr)
            return EXIT_USAGE
        text = csv_text
    else:
        report = experiments.ExperimentReport(
            kind=args.command, config=config, result=result, elapsed_seconds=elapsed
        )
        text = core.to_canonical_json(report.to_json_dict(include_timings=args.timings)) + "\n"

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
