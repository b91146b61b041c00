"""Command-line entry point: ``rkocp VERB [options]``."""

from __future__ import annotations

import argparse
import csv
import sys

from . import acceptance, harness
from .conditions import check_simplifying, classify
from .ocp import heat_problem, solve
from .spatial import build_fem, build_modal, m_norm
from .tableau import SCHEME_NAMES, UnknownScheme, adjoint_tableau, registry, registry_get
from .theorems import verify_all


def _float_table(t) -> str:
    rows = [" ".join(f"{x: .17g}" for x in row) for row in t.A_float]
    rows.append(" ".join(f"{x: .17g}" for x in t.b_float))
    rows.append(" ".join(f"{x: .17g}" for x in t.c_float))
    return "\n".join(rows)


def _names(arg: str) -> list[str]:
    if arg == "all":
        return list(SCHEME_NAMES)
    registry_get(arg)
    return [arg]


def cmd_schemes_list(args) -> int:
    print(f"{'name':<16} {'stages':>6} {'order':>5}  field")
    for name, t in registry().items():
        d = t.radicand
        print(f"{name:<16} {t.s:>6} {t.nominal_order:>5}  {'Q' if d == 0 else f'Q(sqrt{d})'}")
    return 0


def cmd_schemes_show(args) -> int:
    t = registry_get(args.name)
    print(f"# {t.name} (order {t.nominal_order}), exact: s d / A / b / c")
    print(str(t), end="")
    print("# float64")
    print(_float_table(t))
    return 0


def cmd_schemes_adjoint(args) -> int:
    t = registry_get(args.name)
    adj = adjoint_tableau(t)
    match = [n for n, u in registry().items() if u == adj]
    label = f" = {match[0]}" if match else ""
    print(f"# adjoint({t.name}){label}")
    print(str(adj), end="")
    return 0


def cmd_conditions_check(args) -> int:
    mode = "float" if args.float else "exact"
    ok = True
    for name in _names(args.name):
        t = registry_get(name)
        report = classify(t, mode=mode, tol=args.tol)
        print(report)
        expected = t.nominal_order
        ok &= report.state_order >= expected
    return 0 if ok else 1


def cmd_assumptions(args) -> int:
    mode = "float" if args.float else "exact"
    for name in _names(args.name):
        p, eta, zeta = check_simplifying(registry_get(name), mode=mode, tol=args.tol)
        print(f"{name}: ({p}, {eta}, {zeta})")
    return 0


def cmd_theorems_verify(args) -> int:
    cases = verify_all()
    print(f"{'scheme':<16} {'order':>5}  {'hypothesis':<7} {'hypothesis_holds':<16} conditions_hold")
    for c in cases:
        print(c.row())
    return 0 if all(c.consistent for c in cases) else 1


def _backend(args, N: int):
    if args.backend == "modal":
        if args.modes < 2:
            raise ValueError("--modes must be at least 2 so that the data mode k=1 is present")
        return build_modal(args.modes)
    return build_fem(args.fem_degree, args.fem_cells or N)


def cmd_solve(args) -> int:
    t = registry_get(args.scheme)
    problem = heat_problem(_backend(args, args.steps), args.nu)
    sol = solve(problem, t, args.steps)
    err_y, err_p = harness.error_norms(sol, problem)
    y1, p1 = problem.exact.field(problem.backend, 1.0)
    b = problem.backend
    print(f"scheme={t.name} backend={b.describe()} nu={args.nu:g} N={args.steps} residual={sol.residual:.2e}")
    print(f"terminal |y_N - y(1)|_M = {m_norm(b, sol.y_nodes[-1] - y1):.6e}")
    print(f"terminal |p_N - p(1)|_M = {m_norm(b, sol.p_nodes[-1] - p1):.6e}")
    print(f"max_i |y_i - y(t_i)|_M  = {err_y:.6e}")
    print(f"max_i |p_i - p(t_i)|_M  = {err_p:.6e}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "component", "y", "p"])
            for i, ti in enumerate(sol.times):
                for j in range(b.dim):
                    w.writerow([f"{ti:.17g}", j, f"{sol.y_nodes[i, j]:.17g}", f"{sol.p_nodes[i, j]:.17g}"])
    return 0


def _n_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad N list {text!r}")


def cmd_converge(args) -> int:
    names = _names(args.scheme)
    spec = harness.BackendSpec("fem", degree=args.fem_degree) if args.backend == "fem" else harness.BackendSpec()
    rows, est = harness.run_many(names, spec, args.nu, args.n_list)
    print(f"{'scheme':<16} {'N':>5} {'err_y':>12} {'err_p':>12}")
    for r in rows:
        print(f"{r.scheme:<16} {r.N:>5} {r.err_y:12.4e} {r.err_p:12.4e}")
    for name, e in est.items():
        print(f"{name:<16} median rate y={e.median_y:.3f} p={e.median_p:.3f}")
    if args.out:
        harness.emit_csv(rows, est, args.out)
    return 0


def cmd_verify_all(args) -> int:
    ok = True
    for n, _, _ in acceptance.CHECKS:
        r = acceptance.run_check(n)
        print(r.line(), flush=True)
        ok &= r.passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rkocp", description="Runge-Kutta schemes for parabolic optimal control")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    sub.add_parser("schemes-list", help="list registry schemes").set_defaults(fn=cmd_schemes_list)
    p = sub.add_parser("schemes-show", help="print exact and float tableau")
    p.add_argument("name")
    p.set_defaults(fn=cmd_schemes_show)
    p = sub.add_parser("schemes-adjoint", help="print the adjoint tableau")
    p.add_argument("name")
    p.set_defaults(fn=cmd_schemes_adjoint)

    for verb, fn, text in (("conditions-check", cmd_conditions_check, "classify state and control order"),
                           ("assumptions", cmd_assumptions, "print (p, eta, zeta) of B, C, D")):
        p = sub.add_parser(verb, help=text)
        p.add_argument("name", help="scheme name or 'all'")
        g = p.add_mutually_exclusive_group()
        g.add_argument("--exact", action="store_true", default=True, help="exact arithmetic (default)")
        g.add_argument("--float", action="store_true", help="float64 with tolerance")
        p.add_argument("--tol", type=float, default=1e-10)
        p.set_defaults(fn=fn)

    sub.add_parser("theorems-verify", help="check sufficiency results on the registry").set_defaults(
        fn=cmd_theorems_verify)

    p = sub.add_parser("solve", help="solve the heat-equation control problem once")
    p.add_argument("--scheme", required=True)
    p.add_argument("--backend", choices=("modal", "fem"), default="modal")
    p.add_argument("--nu", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--modes", type=int, default=2)
    p.add_argument("--fem-degree", type=int, default=1)
    p.add_argument("--fem-cells", type=int, default=None, help="defaults to --steps")
    p.add_argument("--csv", help="dump trajectories (t, component, y, p)")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("converge", help="convergence study against the exact solution")
    p.add_argument("--scheme", required=True, help="scheme name or 'all'")
    p.add_argument("--nu", type=float, default=1e-3)
    p.add_argument("--n-list", type=_n_list, default=None,
                   help="comma-separated step counts (default depends on the order)")
    p.add_argument("--backend", choices=("modal", "fem"), default="modal")
    p.add_argument("--fem-degree", type=int, default=1)
    p.add_argument("--out", help="CSV output path; rates go next to it with suffix .rates")
    p.set_defaults(fn=cmd_converge)

    sub.add_parser("verify-all", help="run the acceptance suite").set_defaults(fn=cmd_verify_all)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UnknownScheme as exc:
        print(f"rkocp: {exc.args[0]}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"rkocp: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
