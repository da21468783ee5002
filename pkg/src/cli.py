"""
Command line for cipwave studies. Each subcommand runs one study and writes
one table (CSV or JSON) to standard output or --out; logging goes to stderr.

    python src/cli.py gamma0 --p 1..4
    python src/cli.py gamma-opt --p 1..4
    python src/cli.py expand --p 1 --gamma gamma0
    python src/cli.py dispersion --p 1..3 --k 1000 --h "0.0002*2^-3..0"
    python src/cli.py solve --example ex1 --p 2 --k "100*2^0..4" --kh 0.5 --gamma gamma0
    python src/cli.py critical-h --example ex2 --p 1 --k 20,40,80 --eps 0.5
    python src/cli.py verify

Exit codes: 0 success, 2 usage or input error, 3 numerical failure.
"""

import argparse
import csv
import json
import os
import sys

from constants import EXAMPLES, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE
from dispersion import (
    direction_grid,
    gamma0,
    gamma_opt,
    gamma_opt_closed_form,
    phase_expansion,
    phase_sweep_h,
    phase_sweep_k,
    resolve_gamma,
)
from errors import INPUT_ERRORS, CipwaveError, DegenerateInput, UnsupportedOrder
from exact import rational, to_float
from fem import critical_mesh_size, interpolation_error, run_example
from logger import get_logger, set_level
from settings import get_setting, load_config, override
from utils import (
    format_float,
    format_rational,
    is_valid_epsilon,
    is_valid_gamma_rule,
    is_valid_order,
    parse_float_list,
    parse_int_range,
)
from verify import SUITES, run_suites
from version import get_version_display

logger = get_logger()


# argument helpers


def _orders(text):
    orders = parse_int_range(text)
    p_max = get_setting("P_MAX")
    for p in orders:
        if not is_valid_order(p, p_max):
            raise UnsupportedOrder("polynomial order out of range", {"p": p, "p_max": p_max})
    return orders


def _gamma_rule(text):
    if not is_valid_gamma_rule(text):
        raise DegenerateInput("gamma must be fem, gamma0, gamma-opt or a number", {"gamma": text})
    return text


def _positive(values, name):
    if not values or any(not v > 0 for v in values):
        raise DegenerateInput(f"{name} values must be positive", {name: values})
    return values


def _mesh_sizes(args):
    """h ladder from --h, or 1/n from --n."""
    if args.h:
        return _positive(parse_float_list(args.h), "h")
    if args.n:
        return [1.0 / n for n in _positive(parse_float_list(args.n), "n")]
    raise DegenerateInput("one of --h or --n is required")


def _cosines(text):
    """Rational direction cosines such as "3/5,4/5"."""
    if not text:
        return None
    cosines = []
    for part in text.split(","):
        num, _, den = part.strip().partition("/")
        try:
            cosines.append(rational(int(num), int(den or 1)))
        except ValueError:
            raise DegenerateInput("cosines must be rationals num/den", {"cosines": text})
    return tuple(cosines)


def _format_gaussian(value):
    if not value.y:
        return format_rational(value.x)
    sign = "+" if value.y > 0 else "-"
    return f"{format_rational(value.x)}{sign}{format_rational(abs(value.y))}i"


def _format_coefficient(poly):
    """Coefficient free of t: a Gaussian rational, or a polynomial in the formal gamma."""
    terms = sorted(((monom[1], c) for monom, c in poly.items()), key=lambda term: term[0])
    if not terms:
        return "0"
    parts = []
    for power, c in terms:
        text = _format_gaussian(c)
        if power == 0:
            parts.append(text)
        elif power == 1:
            parts.append(f"({text})*gamma")
        else:
            parts.append(f"({text})*gamma^{power}")
    return " + ".join(parts)


# studies


def cmd_gamma0(args):
    rows = []
    for p in _orders(args.p):
        value = gamma0(p)
        rows.append({"p": p, "gamma0": format_rational(value), "gamma0_float": to_float(value)})
    return rows


def cmd_gamma_opt(args):
    rows = []
    ts = _positive(parse_float_list(args.kh), "kh") if args.kh else None
    for p in _orders(args.p):
        for t in ts or [float(p)]:
            closed = gamma_opt_closed_form(p, t) if p <= 4 else None
            rows.append({"p": p, "t": t, "gamma_opt": gamma_opt(p, t),
                         "gamma0": to_float(gamma0(p)), "closed_form": closed})
    return rows


def cmd_expand(args):
    rows = []
    cosines = _cosines(args.cosines)
    if cosines is not None and len(cosines) != args.dim:
        raise DegenerateInput("one cosine per dimension", {"d": args.dim, "cosines": args.cosines})
    for p in _orders(args.p):
        expansion = phase_expansion(p, args.gamma, args.order, d=args.dim, cosines=cosines)
        for power in sorted(expansion.coefficients):
            rows.append({"p": p, "gamma": expansion.gamma_mode, "power": power,
                         "coeff": _format_coefficient(expansion.lag_coefficient(power))})
    return rows


def cmd_dispersion(args):
    rule = _gamma_rule(args.gamma)
    directions = [None] if args.dim == 1 or args.max_direction else direction_grid(args.dim)
    rows = []
    for p in _orders(args.p):
        ks = _positive(parse_float_list(args.k), "k")
        if args.sweep == "h":
            hs = _mesh_sizes(args)
            for k in ks:
                for direction in directions:
                    records = phase_sweep_h(p, k, hs, rule, args.dim, direction)
                    rows.extend(record.as_row() for record in records)
        else:
            if not args.kh:
                raise DegenerateInput("--sweep k needs --kh")
            for t in _positive(parse_float_list(args.kh), "kh"):
                for direction in directions:
                    records = phase_sweep_k(p, ks, t, rule, args.dim, direction)
                    rows.extend(record.as_row() for record in records)
    return rows


def _solve_meshes(args, k):
    if args.kh:
        return [max(1, round(k / t)) for t in _positive(parse_float_list(args.kh), "kh")]
    if args.n:
        return [int(n) for n in _positive(parse_float_list(args.n), "n")]
    raise DegenerateInput("one of --n or --kh is required")


def cmd_solve(args):
    rule = _gamma_rule(args.gamma)
    rows = []
    for p in _orders(args.p):
        for k in _positive(parse_float_list(args.k), "k"):
            for n in _solve_meshes(args, k):
                record = run_example(args.example, p, k, n, resolve_gamma(rule, p, k / n))
                row = record.as_row()
                row["interp_h1_error"] = interpolation_error(args.example, p, k, n)
                rows.append(row)
    return rows


def cmd_critical_h(args):
    rule = _gamma_rule(args.gamma)
    if not is_valid_epsilon(args.eps):
        raise DegenerateInput("--eps must lie in (0, 1)", {"eps": args.eps})
    eps = float(args.eps)
    n_start = int(args.n) if args.n else None
    rows = []
    for p in _orders(args.p):
        for k in _positive(parse_float_list(args.k), "k"):
            result = critical_mesh_size(args.example, p, k, eps, rule, n_start=n_start)
            rows.append({"p": p, "k": k, "eps": eps, "gamma": rule, "n": result.n, "h": result.h,
                         "n_fail": result.bracket[0], "error": result.error})
    return rows


def cmd_verify(args):
    names = [name.strip() for name in args.suite.split(",")] if args.suite else None
    results = run_suites(names)
    args.failed = [r.name for r in results if not r.passed]
    return [r.as_row() for r in results]


# output


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_table(rows, stream, fmt="csv"):
    """Header row plus one line per row; column order is the first row's key order."""
    if fmt == "json":
        json.dump(rows, stream, indent=2)
        stream.write("\n")
        return
    if not rows:
        return
    columns = list(rows[0].keys())
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(column)) for column in columns])


def _emit(rows, args):
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as f:
            write_table(rows, f, args.format)
        logger.info(f"Wrote {len(rows)} rows to {args.out}")
    else:
        write_table(rows, sys.stdout, args.format)


# parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the table here instead of stdout")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--verbose", action="store_true", help="debug logging")
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--workers", type=int, help="threads for direction and mesh sweeps")

    parser = argparse.ArgumentParser(prog="cipwave", description="Dispersion analysis of CIP-FEM for Helmholtz.")
    parser.add_argument("--version", action="version", version=get_version_display())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gamma0", parents=[common], help="closed-form penalty gamma_0")
    p.add_argument("--p", default="1..7")
    p.set_defaults(handler=cmd_gamma0)

    p = sub.add_parser("gamma-opt", parents=[common], help="pollution-free penalty in 1D")
    p.add_argument("--p", default="1..4")
    p.add_argument("--kh", help="values of t = kh (default t = p)")
    p.set_defaults(handler=cmd_gamma_opt)

    p = sub.add_parser("expand", parents=[common], help="exact series of (k - k_h) h")
    p.add_argument("--p", default="1")
    p.add_argument("--gamma", default="formal", help="formal, gamma0, fem or num/den")
    p.add_argument("--order", type=int, help="last power of t (default 2p+3)")
    p.add_argument("--dim", type=int, choices=[1, 2, 3], default=1)
    p.add_argument("--cosines", help="rational direction cosines, e.g. 3/5,4/5")
    p.set_defaults(handler=cmd_expand)

    p = sub.add_parser("dispersion", aliases=["phase"], parents=[common], help="discrete wave numbers")
    p.add_argument("--p", default="1")
    p.add_argument("--k", default="1000")
    p.add_argument("--h")
    p.add_argument("--n")
    p.add_argument("--kh", help="fixed t = kh for --sweep k")
    p.add_argument("--sweep", choices=["h", "k"], default="h")
    p.add_argument("--gamma", default="fem")
    p.add_argument("--dim", type=int, choices=[1, 2, 3], default=1)
    p.add_argument("--theta-steps", type=int, help="directions per angle in [0, pi/2]")
    p.add_argument("--max-direction", action="store_true", help="one row per case: the worst direction")
    p.set_defaults(handler=cmd_dispersion)

    p = sub.add_parser("solve", parents=[common], help="solve a model problem, relative H1 error")
    p.add_argument("--example", choices=list(EXAMPLES), default="ex1")
    p.add_argument("--p", default="1")
    p.add_argument("--k", default="100")
    p.add_argument("--n")
    p.add_argument("--kh", help="fixed t = kh; n = round(k / t)")
    p.add_argument("--gamma", default="fem")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("critical-h", parents=[common], help="largest h with error below eps")
    p.add_argument("--example", choices=list(EXAMPLES), default="ex2")
    p.add_argument("--p", default="1")
    p.add_argument("--k", default="20,40,80")
    p.add_argument("--eps", default="0.5")
    p.add_argument("--n", help="starting number of elements per side")
    p.add_argument("--gamma", default="fem")
    p.set_defaults(handler=cmd_critical_h)

    p = sub.add_parser("verify", parents=[common], help="identity suites")
    p.add_argument("--suite", help=f"comma list from {', '.join(SUITES)}")
    p.set_defaults(handler=cmd_verify)
    return parser


def _configure(args):
    if args.config and not os.path.exists(args.config):
        raise DegenerateInput("config file not found", {"config": args.config})
    config = load_config(args.config, use_template=False)
    if args.workers:
        config["WORKERS"] = args.workers
    if getattr(args, "theta_steps", None):
        if args.theta_steps < 2:
            raise DegenerateInput("--theta-steps must be at least 2", {"theta_steps": args.theta_steps})
        config["THETA_STEPS_2D"] = config["THETA_STEPS_3D"] = args.theta_steps
    override(config)
    set_level("DEBUG" if args.verbose else config.get("LOG_LEVEL", "INFO"))


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        _configure(args)
        rows = args.handler(args)
    except INPUT_ERRORS as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except CipwaveError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_NUMERIC

    _emit(rows, args)
    if getattr(args, "failed", None):
        logger.error(f"verify: failing suites {', '.join(args.failed)}")
        return EXIT_NUMERIC
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
