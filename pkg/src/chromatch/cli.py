"""Command-line front end: ``chromatch generate | solve | experiment``.

Exit codes: 0 success, 2 budget exhausted, 3 hull hypothesis unverified,
4 input error.
"""

import argparse
import json
import shlex
import sys
from fractions import Fraction

import numpy as np

from .graph import color_vector
from .instances import (
    HullCertificateError,
    InstanceFormatError,
    figure1_instance,
    format_instance,
    random_balanced,
    read_instance,
    unbalanced_hull_instance,
)
from .oracle import MAX_ENUM_ORDER, min_f
from .rounding import caratheodory_reduce, certify_origin, theorem3_pipeline
from .sampler import DEFAULT_BUDGET, rpm_bound, rpm_sample, sample_until_bound
from .search import DEFAULT_PLATEAU, search_from_rpm

EXIT_OK = 0
EXIT_BUDGET = 2
EXIT_HULL = 3
EXIT_INPUT = 4


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INPUT)


def int_list(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def fraction_list(text):
    try:
        return [Fraction(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated fractions, got {text!r}")


def build_parser():
    parser = Parser(prog="chromatch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    gen = sub.add_parser("generate", help="write an instance file")
    gen.add_argument("--k", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", help="output path (default: stdout)")
    gen.add_argument("--figure1", action="store_true", help="the 3-colored K6 counterexample")
    gen.add_argument("--hull-unbalanced", action="store_true",
                     help="unbalanced coloring with a certified hull condition (k >= 4)")

    solve = sub.add_parser("solve", help="find a nearly balanced perfect matching")
    solve.add_argument("instance")
    solve.add_argument("--method", choices=("rpm", "swap", "round", "oracle"), required=True)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--restarts", type=int, default=5)
    solve.add_argument("--plateau", type=int, default=DEFAULT_PLATEAU)
    solve.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="rpm: attempt cap; round: extra samples for the certificate")
    solve.add_argument("--samples", type=int, default=200,
                       help="round: RPM samples offered to the hull certificate")
    solve.add_argument("--json", action="store_true", help="print a JSON report")

    exp = sub.add_parser("experiment", help="run a seeded experiment suite to CSV")
    exp.add_argument("--suite", required=True)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--k", type=int_list)
    exp.add_argument("--n", type=int_list, help="values of n (orders N for the uniformity suite)")
    exp.add_argument("--runs", type=int)
    exp.add_argument("--instances", type=int)
    exp.add_argument("--samples", type=int)
    exp.add_argument("--restarts", type=int)
    exp.add_argument("--plateau", type=int)
    exp.add_argument("--budget", type=int)
    exp.add_argument("--p", type=fraction_list)
    exp.add_argument("--out", help="CSV path (default: stdout)")
    return parser


def _emit(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)


def cmd_generate(args):
    info = sys.stderr if args.out in (None, "-") else sys.stdout
    if args.figure1:
        if args.hull_unbalanced or args.k is not None or args.n is not None:
            raise UsageError("--figure1 takes no --k/--n/--hull-unbalanced")
        g = figure1_instance()
    else:
        if args.k is None or args.n is None:
            raise UsageError("--k and --n are required unless --figure1 is given")
        if args.k < 1 or args.n < 1:
            raise UsageError("--k and --n must be positive")
        if args.hull_unbalanced:
            if args.k < 4:
                raise UsageError("--hull-unbalanced needs --k >= 4")
            try:
                g, cert = unbalanced_hull_instance(args.k, args.n, args.seed)
                print(f"hull certificate support = {cert.support}", file=info)
            except HullCertificateError as exc:
                print(f"chromatch: {exc}; falling back to a balanced instance", file=sys.stderr)
                g = random_balanced(args.k, args.n, args.seed)
        else:
            g = random_balanced(args.k, args.n, args.seed)
    _emit(format_instance(g), args.out)
    counts = " ".join(str(int(c)) for c in g.color_counts)
    print(f"N = {g.order}, k = {g.num_colors}", file=info)
    print(f"color counts: {counts}", file=info)
    print(f"balanced: {'yes' if g.is_balanced() else 'no'}", file=info)
    return EXIT_OK


def _derive_n(g):
    k = g.num_colors
    if g.order % (2 * k):
        raise UsageError(f"order N={g.order} is not a multiple of 2k={2 * k}")
    return g.order // (2 * k)


def _report(g, n, m, extra):
    cv = color_vector(g, m, n)
    return {"N": g.order, "k": g.num_colors, "n": n,
            "matching": [list(p) for p in m.pairs],
            "color_vector": list(cv.deviations), "f": cv.norm1, **extra}


def cmd_solve(args):
    g = read_instance(args.instance)
    n = _derive_n(g)
    rng = np.random.default_rng(args.seed)
    code = EXIT_OK
    lines = []
    if args.method == "oracle":
        if g.order > MAX_ENUM_ORDER:
            raise UsageError(f"oracle is limited to N <= {MAX_ENUM_ORDER}, got N={g.order}")
        res = min_f(g, n)
        report = _report(g, n, res.witness, {"method": "oracle", "min_f": res.value,
                                             "minimizers": res.count, "matchings": res.total})
        lines.append(f"min f = {res.value} ({res.count} of {res.total} matchings)")
    elif args.method == "rpm":
        res = sample_until_bound(g, n, args.budget, rng)
        bound = rpm_bound(g.num_colors, n)
        report = _report(g, n, res.matching, {"method": "rpm", "bound": bound,
                                              "attempts": res.attempts,
                                              "budget_exhausted": res.exhausted})
        lines.append(f"f = {res.f} (bound {bound:.4f}) after {res.attempts} attempt(s)")
        if res.exhausted:
            code = EXIT_BUDGET
    elif args.method == "swap":
        best, stats = search_from_rpm(g, n, args.restarts, args.plateau, rng)
        report = _report(g, n, best.matching, {
            "method": "swap",
            "restarts": [vars(s) for s in stats],
        })
        lines.append(f"final f = {best.f}")
    else:
        pool = [rpm_sample(g.order, rng) for _ in range(args.samples)]
        try:
            cc = certify_origin(g, n, pool, sample_budget=args.budget, rng=rng)
        except HullCertificateError as exc:
            print(f"hull hypothesis unverified: {exc}", file=sys.stderr)
            return EXIT_HULL
        cc = caratheodory_reduce(cc, g.num_colors)
        m, trace = theorem3_pipeline(g, n, cc, rng)
        report = _report(g, n, m, {
            "method": "round",
            "certificate": {"weights": [str(w) for w in cc.weights],
                            "vectors": [list(v) for v in cc.vectors]},
            "trace": trace.to_dict(),
        })
        lines.append(f"final f = {report['f']} (bound {trace.final_bound:.4f}, "
                     f"{len(trace.stages)} stage(s))")
        if trace.exhausted:
            code = EXIT_BUDGET
    report["seed"] = args.seed
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(f"matching: {' '.join(f'{u}-{v}' for u, v in report['matching'])}")
        print(f"color vector: {tuple(report['color_vector'])}")
        for line in lines:
            print(line)
    return code


def cmd_experiment(args, argv):
    from .experiments import SUITES, run_suite, write_csv

    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    params = {"ks": args.k, "ns": args.n, "runs": args.runs, "instances": args.instances,
              "samples": args.samples, "restarts": args.restarts, "plateau": args.plateau,
              "budget": args.budget, "ps": args.p}
    result = run_suite(args.suite, args.seed, **params)
    if args.out in (None, "-"):
        write_csv(result.rows, sys.stdout)
    else:
        with open(args.out, "w", encoding="ascii", newline="") as fh:
            write_csv(result.rows, fh)
        meta = {"command": "chromatch " + shlex.join(argv), "suite": args.suite,
                "seed": args.seed, "flags": {k: v for k, v in vars(args).items()
                                             if k != "p"} | {"p": [str(x) for x in args.p or []]},
                "passed": result.passed, "summary": result.summary}
        with open(args.out + ".meta.json", "w", encoding="ascii") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
    status = "PASS" if result.passed else "FAIL"
    print(f"# {args.suite}: {result.summary} -> {status}", file=sys.stderr)
    print(f"# reproduce: chromatch {shlex.join(argv)}", file=sys.stderr)
    return EXIT_OK if result.passed else 1


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "solve":
            return cmd_solve(args)
        return cmd_experiment(args, argv)
    except (UsageError, InstanceFormatError, OSError, ValueError) as exc:
        print(f"chromatch: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except HullCertificateError as exc:
        print(f"chromatch: hull hypothesis unverified: {exc}", file=sys.stderr)
        return EXIT_HULL


if __name__ == "__main__":
    sys.exit(main())
