"""Command-line entry point: `python -m src.frozen_er <subcommand> ...`.

Exit status is 0 on success, 1 when a check or experiment verdict fails and 2 on
any toolkit error.
"""

import argparse
import logging
import re
import sys

from src.frozen_er import harness, limit_sim, lyapunov
from src.frozen_er.constants import RESULT_FLOAT_FORMAT
from src.frozen_er.enums import ExperimentName, KernelFunction
from src.frozen_er.errors import FrozenERError
from src.frozen_er.special_fn import find_xmax, kernel_integrals, log_p1, p1, p1_ratio_log
from src.frozen_er.stable_oracle import oracle_p1
from src.frozen_er.utils.grids import parse_float_list, parse_grid

logger = logging.getLogger(__name__)

NEGATIVE_VALUE = re.compile(r"^-[0-9.]")


def _evaluate(fn: KernelFunction, x: float, y: float, tol: float) -> float:
    if fn == KernelFunction.P1:
        return p1(x)
    if fn == KernelFunction.LOG_P1:
        return log_p1(x).log_p1
    if fn == KernelFunction.RATIO:
        return p1_ratio_log(x, y)
    if fn == KernelFunction.XMAX:
        return find_xmax().x_max
    if fn == KernelFunction.ORACLE:
        return oracle_p1(x)
    integrals = kernel_integrals(x, tol)
    return {
        KernelFunction.I1: integrals.i1,
        KernelFunction.I2: integrals.i2,
        KernelFunction.I3: integrals.i3,
        KernelFunction.I1_TRUNC: integrals.i1_trunc,
    }[fn]


def cmd_eval(args: argparse.Namespace) -> int:
    fn = KernelFunction(args.fn)
    value = _evaluate(fn, args.x, args.y, args.tol)
    fmt = RESULT_FLOAT_FORMAT.format
    print(f"{fn.value},{fmt(args.x)},{fmt(args.y)},{fmt(value)}")
    return 0


def cmd_sim_graph(args: argparse.Namespace) -> int:
    times = parse_grid(args.t_grid) if args.t_grid else [args.t]
    rows = harness.graph_table(args.n, args.p, times, args.reps, args.seed, args.workers)
    harness.write_table(args.out, harness.GRAPH_COLUMNS, rows)
    return 0


def cmd_sim_limit(args: argparse.Namespace) -> int:
    config = limit_sim.make_config(
        p=args.p,
        t0=args.t0,
        x0=args.x0,
        t_end=args.t_end,
        delta=args.delta,
        compensate_small=False if args.no_compensate else None,
        seed=args.seed,
    )
    times = parse_grid(args.t_grid) if args.t_grid else [args.t_end]
    rows = harness.limit_table(config, times, args.reps, args.workers)
    harness.write_table(args.out, harness.LIMIT_COLUMNS, rows)
    return 0


def cmd_check_lyapunov(args: argparse.Namespace) -> int:
    report = lyapunov.lyapunov_check(args.alpha, args.beta, args.a, args.B, parse_grid(args.grid), args.workers)
    harness.write_table(args.out, harness.LYAPUNOV_COLUMNS, harness.lyapunov_table(report))
    if not report.holds:
        print(f"drift condition violated at x = {report.violations}", file=sys.stderr)
        return 1
    return 0


def cmd_sim_coalescent(args: argparse.Namespace) -> int:
    rows = harness.coalescent_table(parse_float_list(args.masses), parse_float_list(args.frozen), args.p, args.t_end, args.reps, args.seed)
    harness.write_table(args.out, harness.COALESCENT_COLUMNS, rows)
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    config = harness.load_config(args.config) if args.config else {}
    result = harness.run_experiment(args.name, config)
    harness.write_results(result, args.out)
    for verdict in result.verdicts:
        if not verdict.passed:
            print(f"FAIL {verdict.name}: value={verdict.value} threshold={verdict.threshold} {verdict.detail}".rstrip(), file=sys.stderr)
    return 0 if result.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frozen-er", description="Frozen Erdos-Renyi graphs, their limit process and coalescent")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate p1 and its kernel integrals")
    ev.add_argument("--fn", required=True, choices=[fn.value for fn in KernelFunction])
    ev.add_argument("--x", type=float, default=0.0)
    ev.add_argument("--y", type=float, default=0.0)
    ev.add_argument("--tol", type=float, default=1e-12)
    ev.set_defaults(handler=cmd_eval)

    graph = sub.add_parser("sim-graph", help="simulate the frozen graph F_p(n, m)")
    graph.add_argument("--n", type=int, required=True)
    graph.add_argument("--p", type=float, required=True)
    graph.add_argument("--t", type=float, default=0.0)
    graph.add_argument("--t-grid", help="a:b:step, overrides --t")
    graph.add_argument("--reps", type=int, default=1)
    graph.add_argument("--seed", type=int, default=0)
    graph.add_argument("--workers", type=int, default=1)
    graph.add_argument("--out", required=True)
    graph.set_defaults(handler=cmd_sim_graph)

    limit = sub.add_parser("sim-limit", help="simulate the limit process X_p")
    limit.add_argument("--p", type=float, required=True)
    limit.add_argument("--t-end", type=float, required=True)
    limit.add_argument("--t0", type=float, default=0.0)
    limit.add_argument("--x0", type=float, default=0.0, help="starting value X(t0)")
    limit.add_argument("--delta", type=float, default=None)
    limit.add_argument("--no-compensate", action="store_true", help="drop jumps below delta without drift")
    limit.add_argument("--t-grid", help="a:b:step diagnostic times, defaults to t-end")
    limit.add_argument("--reps", type=int, default=1)
    limit.add_argument("--seed", type=int, default=0)
    limit.add_argument("--workers", type=int, default=1)
    limit.add_argument("--out", required=True)
    limit.set_defaults(handler=cmd_sim_limit)

    lyap = sub.add_parser("check-lyapunov", help="check the Foster-Lyapunov drift condition on a grid")
    lyap.add_argument("--alpha", type=float, required=True)
    lyap.add_argument("--beta", type=float, required=True)
    lyap.add_argument("--a", type=float, required=True)
    lyap.add_argument("--B", type=float, required=True)
    lyap.add_argument("--grid", required=True, help="a:b:step")
    lyap.add_argument("--workers", type=int, default=1)
    lyap.add_argument("--out", required=True)
    lyap.set_defaults(handler=cmd_check_lyapunov)

    coal = sub.add_parser("sim-coalescent", help="simulate the finite frozen multiplicative coalescent")
    coal.add_argument("--masses", required=True, help="comma-separated standard masses")
    coal.add_argument("--frozen", default="", help="comma-separated frozen masses")
    coal.add_argument("--p", type=float, required=True)
    coal.add_argument("--t-end", type=float, required=True)
    coal.add_argument("--reps", type=int, default=1)
    coal.add_argument("--seed", type=int, default=0)
    coal.add_argument("--out", required=True)
    coal.set_defaults(handler=cmd_sim_coalescent)

    exp = sub.add_parser("experiment", help="run a named experiment and write its results")
    exp.add_argument("--name", required=True, choices=[name.value for name in ExperimentName])
    exp.add_argument("--config", help="JSON config; defaults apply when omitted")
    exp.add_argument("--out", required=True)
    exp.set_defaults(handler=cmd_experiment)
    return parser


def attach_negative_values(argv: list[str]) -> list[str]:
    """Rewrite `--flag -40:40:1` as `--flag=-40:40:1`.

    argparse only accepts a leading minus for plain negative numbers, so grids
    and exponent forms such as -1e-3 would otherwise be read as options.
    """
    joined: list[str] = []
    index = 0
    while index < len(argv):
        token = argv[index]
        following = argv[index + 1] if index + 1 < len(argv) else None
        if token.startswith("--") and "=" not in token and following is not None and NEGATIVE_VALUE.match(following):
            joined.append(f"{token}={following}")
            index += 2
            continue
        joined.append(token)
        index += 1
    return joined


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(attach_negative_values(argv))
    logging.basicConfig(level=args.log_level, stream=sys.stderr, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except FrozenERError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
