"""Command-line front end.

Subcommands: calibrate, run, convergence, stability, equivalence, sweep,
profile.  Every command accepts --output (default stdout), --format where
both csv and json make sense, and --config pointing at a JSON file whose
keys are flag names with dashes replaced by underscores; explicit flags
override config values, which override built-in defaults.  Randomness
(equivalence start fields) comes from numpy's seedable PCG64 generator, so
identical invocations produce byte-identical output.

Exit codes: 0 success, 1 usage or validation error, 2 calibration
infeasible, 3 a checked numerical property failed to hold.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import calibration, lbm, stability, verification
from .errors import DomainError, NoRealRoot
from .scheme import BoundarySpec, Grid1D, run, snapshot_csv_lines

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_PROPERTY = 3

_EQUIV_TOL = 1e-12
_ORDER_WORDS = {2: "second", 4: "fourth", 6: "sixth"}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for infeasible
    # calibrations here, so remap to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    items = [part for part in str(text).split(",") if part.strip() != ""]
    return [float(part) for part in items]


def _write_lines(lines: list[str], output: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", newline="\n") as handle:
            handle.write(text)


def _write_json(payload: dict, output: str | None) -> None:
    _write_lines([json.dumps(payload, indent=2)], output)


def _fail(message: str, code: int) -> int:
    print(f"lbmfd: error: {message}", file=sys.stderr)
    return code


def _build_parser() -> tuple[_Parser, dict[str, _Parser]]:
    parser = _Parser(prog="lbmfd", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)
    commands: dict[str, _Parser] = {}

    def cmd(name: str, help_text: str) -> _Parser:
        p = sub.add_parser(name, help=help_text)
        commands[name] = p
        p.add_argument("--output", default=None,
                       help="write to this path instead of stdout")
        p.add_argument("--format", default=None, choices=("csv", "json"),
                       help="output format where both make sense")
        p.add_argument("--config", default=None,
                       help="JSON file of defaults; flags override")
        return p

    p = cmd("calibrate", "solve the accuracy conditions")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--order", type=int, choices=(4, 6), required=True)
    p.add_argument("--s1", type=float, default=1.0,
                   help="pinned first-moment rate for order 4")

    p = cmd("run", "march one benchmark case to t_end")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--order", type=int, choices=(2, 4, 6), default=6)
    p.add_argument("--dx", type=float, default=0.025)
    p.add_argument("--t-end", type=float, default=12.0)

    p = cmd("convergence", "refinement study per epsilon")
    p.add_argument("--order", type=int, choices=(2, 4, 6), required=True)
    p.add_argument("--eps-list", type=_float_list, default=None)
    p.add_argument("--dx-list", type=_float_list, default=None)

    p = cmd("stability", "spectral radius scan of one triple")
    p.add_argument("--omega0", type=float, required=True)
    p.add_argument("--s1", type=float, required=True)
    p.add_argument("--s2", type=float, required=True)
    p.add_argument("--n-theta", type=int, default=720)

    p = cmd("equivalence", "mesoscopic versus four-level trajectory gap")
    p.add_argument("--n-nodes", type=int, default=64)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--omega0", type=float, required=True)
    p.add_argument("--s1", type=float, required=True)
    p.add_argument("--s2", type=float, required=True)
    p.add_argument("--seed", type=int, default=42,
                   help="PCG64 seed for the random start field")

    p = cmd("sweep", "sixth-order calibration over a grid")
    p.add_argument("--eps-min", type=float, required=True)
    p.add_argument("--eps-max", type=float, required=True)
    p.add_argument("--n-points", type=int, required=True)

    p = cmd("profile", "field versus exact solution at t_end")
    p.add_argument("--eps-list", type=_float_list, default=None)

    return parser, commands


def _apply_config(parser: _Parser, commands: dict[str, _Parser],
                  argv: list[str]) -> argparse.Namespace:
    probe, _ = parser.parse_known_args(argv)
    config_path = getattr(probe, "config", None)
    if config_path:
        try:
            with open(config_path) as handle:
                config = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config {config_path}: {exc}")
        if not isinstance(config, dict):
            parser.error(f"config {config_path} must hold a JSON object")
        sub_parser = commands.get(probe.command)
        if sub_parser is not None:
            sub_parser.set_defaults(**config)
    return parser.parse_args(argv)


def _fmt(value: float) -> str:
    return "{:.17g}".format(value)


def _cmd_calibrate(ns) -> int:
    if ns.format == "csv":
        return _fail("calibrate emits json only", EXIT_USAGE)
    if ns.epsilon <= 0.0:
        return _fail("--epsilon must be positive", EXIT_USAGE)
    if not 0.0 < ns.s1 < 2.0:
        return _fail("--s1 must lie in (0, 2)", EXIT_USAGE)
    try:
        if ns.order == 6:
            result = calibration.calibrate_sixth(ns.epsilon)
        else:
            result = calibration.calibrate_fourth(ns.epsilon, ns.s1)
    except NoRealRoot as exc:
        return _fail(str(exc), EXIT_INFEASIBLE)
    except DomainError as exc:
        return _fail(f"calibration infeasible: {exc}", EXIT_INFEASIBLE)
    _write_json(result.to_json_dict(), ns.output)
    return EXIT_OK


def _cmd_run(ns) -> int:
    if ns.epsilon <= 0.0:
        return _fail("--epsilon must be positive", EXIT_USAGE)
    if ns.dx <= 0.0:
        return _fail("--dx must be positive", EXIT_USAGE)
    try:
        case = verification.BenchmarkCase(epsilon=ns.epsilon, dx=ns.dx,
                                          order=_ORDER_WORDS[ns.order])
    except NoRealRoot as exc:
        return _fail(str(exc), EXIT_INFEASIBLE)
    except DomainError as exc:
        return _fail(str(exc), EXIT_USAGE)
    res = case.params
    params = calibration.ModelParams.from_rates(res.omega0, res.s1, res.s2,
                                                dx=case.dx, dt=case.dt)
    grid = Grid1D(round(1.0 / case.dx))
    try:
        final = run(params, grid,
                    lambda x, t: verification.analytic_phi(x, t, case.kappa),
                    BoundarySpec.dirichlet(0.0, 0.0), ns.t_end)
    except DomainError as exc:
        return _fail(str(exc), EXIT_USAGE)
    xs = grid.nodes()
    if ns.format == "json":
        _write_json({"x": [float(v) for v in xs],
                     "phi": [float(v) for v in final]}, ns.output)
    else:
        _write_lines(snapshot_csv_lines(xs, final), ns.output)
    return EXIT_OK


def _cmd_convergence(ns) -> int:
    eps_list = ns.eps_list
    dx_list = ns.dx_list
    if eps_list is not None and len(eps_list) == 0:
        return _fail("--eps-list must not be empty", EXIT_USAGE)
    if dx_list is not None and len(dx_list) == 0:
        return _fail("--dx-list must not be empty", EXIT_USAGE)
    try:
        reports = verification.reproduce_table(_ORDER_WORDS[ns.order],
                                               eps_list, dx_list)
    except NoRealRoot as exc:
        return _fail(str(exc), EXIT_INFEASIBLE)
    except DomainError as exc:
        return _fail(str(exc), EXIT_USAGE)
    if ns.format == "json":
        payload = {"reports": [
            {"epsilon": rep.epsilon, "order": rep.order,
             "rows": [{"dx": dx, "dt": 30.0 * dx ** 2, "rmse": err}
                      for dx, err in rep.rows],
             "rates": list(rep.rates)} for rep in reports]}
        _write_json(payload, ns.output)
    else:
        _write_lines(verification.convergence_csv_lines(reports), ns.output)
    return EXIT_OK


def _cmd_stability(ns) -> int:
    if ns.format == "csv":
        return _fail("stability emits json only", EXIT_USAGE)
    try:
        report = stability.spectral_radius_scan(ns.omega0, ns.s1, ns.s2,
                                                ns.n_theta)
    except DomainError as exc:
        return _fail(str(exc), EXIT_USAGE)
    _write_json(report.to_json_dict(), ns.output)
    return EXIT_OK if report.stable else EXIT_PROPERTY


def _cmd_equivalence(ns) -> int:
    if ns.format == "csv":
        return _fail("equivalence emits json only", EXIT_USAGE)
    if ns.n_nodes < 8:
        return _fail("--n-nodes must be at least 8", EXIT_USAGE)
    if ns.steps < 3:
        return _fail("--steps must be at least 3", EXIT_USAGE)
    try:
        max_dev, max_phi = lbm.fd_equivalence_deviation(
            ns.n_nodes, ns.steps, ns.omega0, ns.s1, ns.s2, ns.seed)
    except DomainError as exc:
        return _fail(str(exc), EXIT_USAGE)
    threshold = _EQUIV_TOL * max_phi
    passed = max_dev <= threshold
    _write_json({
        "max_abs_deviation": float(max_dev),
        "threshold": float(threshold),
        "passed": bool(passed),
        "n_nodes": int(ns.n_nodes),
        "steps": int(ns.steps),
        "seed": int(ns.seed),
    }, ns.output)
    return EXIT_OK if passed else EXIT_PROPERTY


def _cmd_sweep(ns) -> int:
    if ns.n_points < 1:
        return _fail("--n-points must be at least 1", EXIT_USAGE)
    if ns.eps_min <= 0.0 or ns.eps_max < ns.eps_min:
        return _fail("need 0 < --eps-min <= --eps-max", EXIT_USAGE)
    if ns.n_points == 1:
        grid = [ns.eps_min]
    else:
        span = ns.eps_max - ns.eps_min
        if span <= 0.0:
            return _fail("--n-points > 1 needs eps-min < eps-max",
                         EXIT_USAGE)
        grid = [ns.eps_min + span * i / (ns.n_points - 1)
                for i in range(ns.n_points)]
    try:
        rows = calibration.calibration_sweep(grid)
    except DomainError as exc:
        return _fail(str(exc), EXIT_USAGE)
    if ns.format == "json":
        payload = {"rows": [
            {"epsilon": r.epsilon, "omega0": r.omega0, "s1": r.s1,
             "s2": r.s2, "status": r.status} for r in rows]}
        _write_json(payload, ns.output)
    else:
        lines = ["epsilon,omega0,s1,s2,status"]
        for r in rows:
            if r.status == "ok":
                lines.append(",".join([
                    _fmt(r.epsilon), _fmt(r.omega0), _fmt(r.s1),
                    _fmt(r.s2), r.status]))
            else:
                lines.append(f"{_fmt(r.epsilon)},,,,{r.status}")
        _write_lines(lines, ns.output)
    return EXIT_OK


def _cmd_profile(ns) -> int:
    eps_list = ns.eps_list
    if eps_list is not None and len(eps_list) == 0:
        return _fail("--eps-list must not be empty", EXIT_USAGE)
    try:
        profiles = verification.profile_solution(eps_list)
    except NoRealRoot as exc:
        return _fail(str(exc), EXIT_INFEASIBLE)
    except DomainError as exc:
        return _fail(str(exc), EXIT_USAGE)
    if ns.format == "json":
        payload = {"profiles": [
            {"epsilon": prof.epsilon,
             "max_abs_deviation": prof.max_abs_deviation,
             "x": [float(v) for v in prof.x],
             "phi_numeric": [float(v) for v in prof.phi_numeric],
             "phi_analytic": [float(v) for v in prof.phi_analytic]}
            for prof in profiles]}
        _write_json(payload, ns.output)
    else:
        _write_lines(verification.profile_csv_lines(profiles), ns.output)
    return EXIT_OK


_DISPATCH = {
    "calibrate": _cmd_calibrate,
    "run": _cmd_run,
    "convergence": _cmd_convergence,
    "stability": _cmd_stability,
    "equivalence": _cmd_equivalence,
    "sweep": _cmd_sweep,
    "profile": _cmd_profile,
}


def main(argv=None) -> int:
    parser, commands = _build_parser()
    try:
        ns = _apply_config(parser, commands,
                           list(sys.argv[1:] if argv is None else argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _DISPATCH[ns.command](ns)
    except BrokenPipeError:
        return EXIT_OK


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
