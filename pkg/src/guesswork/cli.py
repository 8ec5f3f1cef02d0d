"""Command-line interface.

Exit codes: 0 success, 1 bad input, 2 a checked inequality or identity failed,
3 a scan found a verified instance where the zigzag question is not optimal.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .core import (
    RATIONAL,
    FLOAT,
    Partition,
    brute_force_opt_question,
    check_noise,
    default_brute_limit,
    entropy_measures,
    example1_distribution,
    format_scalar,
    guess_time_after_question,
    guessing_time,
)
from .cutoff import POLICIES, ideal_guessing_curve, simulate_feedback_scheme
from .graph import (
    brute_force_maxcut,
    c_partition_audit,
    connectivity_report,
    cut_weight,
    noiseless_opt,
    weight_matrix,
    zigzag_partition,
)
from .io import (
    c_partition_audit_to_json,
    distribution_to_json,
    load_distribution,
    partition_to_json,
    save_distribution,
    scalar_json,
)
from .search import DEFAULT_P_GRID, ScanConfig, conjecture_scan
from .spectral import maxcut_upper_bound, psd_certificate
from .verify import SUITES, run_suite

EXIT_OK, EXIT_INPUT, EXIT_CHECK, EXIT_FOUND = 0, 1, 2, 3

log = logging.getLogger("guesswork")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_INPUT)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _noise(text: str) -> Fraction:
    value = _fraction(text)
    if not 0 <= value <= Fraction(1, 2):
        raise argparse.ArgumentTypeError(f"noise level must lie in [0, 1/2], got {text}")
    return value


def _p_grid(text: str) -> tuple:
    parts = [t for t in text.split(",") if t.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("empty p grid")
    return tuple(_noise(t) for t in parts)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# analyze


def cmd_analyze(args) -> int:
    try:
        D = load_distribution(args.dist)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read distribution: {exc}") from None
    limit = args.brute_limit or default_brute_limit()
    p = check_noise(args.p, D.mode)
    W = weight_matrix(D, p)
    zz = zigzag_partition(D.n)
    g = guessing_time(D)
    g_zz = guess_time_after_question(D, zz, p)
    g_cut = g - cut_weight(W, zz)
    bound = (1 - 2 * p) / 4
    exact = D.mode == RATIONAL
    failures = []
    if (g_zz != g_cut) if exact else abs(g_zz - g_cut) > 1e-10:
        failures.append("cut_identity")

    report = {
        "n": D.n,
        "p": scalar_json(p),
        "mode": D.mode,
        "G": scalar_json(g),
        "G_zz": scalar_json(g_zz),
        "G_zz_via_cut": scalar_json(g_cut),
        "zigzag": partition_to_json(zz),
        "gap_bound": scalar_json(bound),
        "maxcut_upper_bound": scalar_json(maxcut_upper_bound(W)),
    }
    if D.n <= limit:
        A, g_opt = brute_force_opt_question(D, p, limit)
        cut_A, maxcut = brute_force_maxcut(W, limit)
        gap = g_zz - g_opt
        report["optimum"] = {"partition": partition_to_json(A), "G_opt": scalar_json(g_opt)}
        report["maxcut"] = {"partition": partition_to_json(cut_A), "weight": scalar_json(maxcut)}
        report["gap"] = scalar_json(gap)
        tol = 0 if exact else 1e-10
        if gap < -tol or gap > bound + tol:
            failures.append("gap_bound")
    else:
        report["optimum"] = None
        log.warning("N=%d exceeds the brute-force limit %d; optimum skipped", D.n, limit)
    conn = connectivity_report(D, p)
    report["connectivity"] = {
        "fully_connected": conn.fully_connected,
        "empty": conn.empty,
        "edges": sorted(list(e) for e in conn.edges),
    }
    cert = psd_certificate(W)
    report["psd"] = {
        "ok": cert.ok,
        "exact_dominant": cert.exact_dominant,
        "min_eigenvalue": cert.min_eigenvalue,
    }
    if not cert.ok:
        failures.append("psd")
    if (D.n + 1) // 2 <= limit:
        audit = c_partition_audit(D, p, limit)
        report["c_partitions"] = c_partition_audit_to_json(audit)
        if not audit.ok:
            failures.append("c_partitions")
    if p == 0:
        opt = noiseless_opt(D)
        report["noiseless"] = {k: scalar_json(v) for k, v in vars(opt).items()}
    ent = entropy_measures(D)
    report["entropy"] = vars(ent)
    report["failures"] = failures

    if args.format == "json":
        text = json.dumps(report, indent=1) + "\n"
    else:
        lines = ["quantity,value"]
        for key, value in report.items():
            if isinstance(value, (str, int, float, bool)):
                lines.append(f"{key},{value}")
        if report["optimum"] is not None:
            lines.append(f"G_opt,{report['optimum']['G_opt']}")
            lines.append("A_opt," + " ".join(map(str, report["optimum"]["partition"]["members"])))
        lines.append(f"psd_ok,{cert.ok}")
        lines.append("failures," + " ".join(failures))
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    if failures:
        log.error("checks failed: %s", ", ".join(failures))
        return EXIT_CHECK
    return EXIT_OK


# search


def cmd_search(args) -> int:
    config = ScanConfig(
        n_min=args.n_min,
        n_max=args.n_max,
        p_grid=args.p_grid,
        instances=args.instances,
        seed=args.seed,
        mode=args.mode,
        brute_limit=args.brute_limit or default_brute_limit(),
    )
    try:
        config.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = conjecture_scan(config, jobs=args.jobs)
    summary = report.summary()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "scan.jsonl").write_text(report.jsonl())
        (out / "summary.json").write_text(json.dumps(summary, indent=1) + "\n")
        for kind, items in (("counterexample", report.candidates), ("violation", report.violations)):
            for item in items:
                rec = item["record"]
                name = f"{kind}_{rec['index']:05d}_p{rec['p'].replace('/', '-')}.json"
                (out / name).write_text(json.dumps(item, indent=1) + "\n")
    summary_text = {k: v for k, v in summary.items() if k not in ("violations", "candidates")}
    summary_text["violations"] = len(report.violations)
    summary_text["candidates"] = len(report.candidates)
    print(json.dumps(summary_text))
    if report.violations:
        return EXIT_CHECK
    if report.candidates:
        return EXIT_FOUND
    return EXIT_OK


# cutoff


def cmd_cutoff(args) -> int:
    if args.rate is None and args.mc_m is None:
        raise UsageError("give --rate, --mc-m or both")
    if args.mc_m is not None and args.mc_m < 2:
        raise UsageError("--mc-m must be at least 2")
    rate = args.rate if args.rate is not None else 0.0
    if args.rate is not None and args.rate <= 0:
        raise UsageError("--rate must be positive")
    curve = ideal_guessing_curve(rate, args.p, args.n_max, M=args.mc_m)
    table = curve.table
    preamble = f"cutoff={curve.cutoff!r} p={format_scalar(args.p)}"
    if args.rate is not None:
        preamble += f" rate={args.rate!r} below_cutoff={str(curve.below_cutoff).lower()}"
        preamble += f" fitted_exponent={curve.fitted_exponent!r}"
    if args.mc_m is not None:
        trace = simulate_feedback_scheme(
            args.mc_m, args.p, args.n_max, args.mc_trials, seed=args.seed, policy=args.policy
        )
        means = [None] + [float(v) for v in trace.step_means]
        ses = [None] + [float(v) for v in trace.step_se]
        table.columns["mc_mean"] = means
        table.columns["mc_se"] = ses
        preamble += f" M={args.mc_m} trials={args.mc_trials} seed={args.seed} policy={args.policy}"
    _emit(table.to_csv(preamble), args.out)
    return EXIT_OK


# verify


def cmd_verify(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    status = EXIT_OK
    for name in names:
        res = run_suite(name, args.instances, args.seed, args.p_grid)
        if res.ok:
            print(f"{name}: ok ({res.checked} checked)")
        else:
            print(f"{name}: FAILED after {res.checked} checked")
            print(json.dumps(res.failure, indent=1))
            status = EXIT_CHECK
    return status


# example1


def cmd_example1(args) -> int:
    try:
        D = example1_distribution(args.n, args.k, args.p, args.alpha, args.beta, RATIONAL)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    p = args.p
    g = guessing_time(D)
    conn = connectivity_report(D, p)
    singles = {
        j: guess_time_after_question(D, Partition(D.n, frozenset({j})), p) for j in range(1, D.n + 1)
    }
    best = min(singles.values())
    checks = {
        "single_edge": conn.edges == frozenset({(args.k, args.k + 1)}),
        "k_improves": singles[args.k] < g,
        "k_is_best_singleton": singles[args.k] == best,
        "others_do_not_improve": all(
            v == g for j, v in singles.items() if j not in (args.k, args.k + 1)
        ),
    }
    report = {
        "distribution": distribution_to_json(D),
        "p": format_scalar(p),
        "G": format_scalar(g),
        "edges": sorted(list(e) for e in conn.edges),
        "singleton_times": {str(j): format_scalar(v) for j, v in singles.items()},
        "checks": checks,
    }
    if args.out:
        save_distribution(D, args.out)
    print(json.dumps(report, indent=1))
    return EXIT_OK if all(checks.values()) else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="guesswork", description="Guessing with a single noisy yes/no question.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="analyze one distribution file")
    a.add_argument("dist", help="distribution JSON file")
    a.add_argument("--p", type=_noise, required=True, help="crossover probability in [0, 1/2]")
    a.add_argument("--brute-limit", type=_positive, help="largest N for exhaustive search")
    a.add_argument("--format", choices=("json", "csv"), default="json")
    a.add_argument("--out", help="write the report here instead of stdout")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("search", help="random scan for zigzag counterexamples")
    s.add_argument("--n-min", type=int, default=3)
    s.add_argument("--n-max", type=int, default=10)
    s.add_argument("--p-grid", type=_p_grid, default=DEFAULT_P_GRID, help="comma-separated noise levels")
    s.add_argument("--instances", type=_positive, default=1000)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    s.add_argument("--mode", choices=(FLOAT, RATIONAL), default=FLOAT)
    s.add_argument("--brute-limit", type=_positive, help="largest N for exhaustive search")
    s.add_argument("--out", help="directory for scan.jsonl, summary.json and findings")
    s.set_defaults(func=cmd_search)

    c = sub.add_parser("cutoff", help="ideal guessing curve and Monte Carlo over a BSC")
    c.add_argument("--p", type=_noise, required=True, help="crossover probability in [0, 1/2]")
    c.add_argument("--rate", type=float, help="rate R for the ideal curve 2^(nR-1)(1-B_n)")
    c.add_argument("--n-max", type=_positive, default=32)
    c.add_argument("--mc-m", type=int, help="message count M; enables the Monte Carlo columns")
    c.add_argument("--mc-trials", type=_positive, default=2000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--policy", choices=POLICIES, default="mass", help="final ordering of unresolved candidates")
    c.add_argument("--out", help="write the CSV here instead of stdout")
    c.set_defaults(func=cmd_cutoff)

    v = sub.add_parser("verify", help="run property suites")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--instances", type=_positive, help="random instances per suite")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--p-grid", type=_p_grid, help="comma-separated noise levels")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("example1", help="distribution whose best singleton question is {k}")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--p", type=_noise, required=True)
    e.add_argument("--alpha", type=_fraction, required=True, help="sets the ratio a/(1-a) between neighbours, below p")
    e.add_argument("--beta", type=_fraction, required=True, help="sets the ratio b/(1-b) between k and k+1, above p")
    e.add_argument("--out", help="also save the distribution JSON here")
    e.set_defaults(func=cmd_example1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"guesswork: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"guesswork: check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
