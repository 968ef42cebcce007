"""Convergence benchmarks on the decaying-sine diffusion problem.

The manufactured problem is d(phi)/dt = kappa * d2(phi)/dx2 on 0 <= x <= 1
with phi(x, 0) = sin(pi*x) and homogeneous Dirichlet ends, whose solution is
sin(pi*x) * exp(-kappa*pi**2*t).  Benchmark cases tie the time step to the
mesh through dt = 30*dx**2 and kappa = epsilon/30, which keeps the mesh
Fourier number equal to epsilon on every refinement level, so the measured
error decay isolates the spatial order.  Errors are root-mean-square over
the interior nodes at t_end = 12, and observed orders come from the log2
ratio of errors on successive 2x refinements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import calibration
from .calibration import CalibrationResult, ModelParams
from .errors import DomainError, LengthMismatch
from .scheme import BoundarySpec, Grid1D, run

_FMT = "{:.17g}"

DEFAULT_EPSILONS = (0.1, 0.15, 0.175, 0.2, 0.24)
DEFAULT_SPACINGS = (0.1, 0.05, 0.025)
_DT_OVER_DX2 = 30.0
_T_END = 12.0


def analytic_phi(x, t, kappa: float):
    """Exact solution of the decaying-sine problem; broadcasts over x."""
    return np.sin(np.pi * x) * np.exp(-kappa * np.pi ** 2 * t)


def rmse(numerical: np.ndarray, analytic: np.ndarray) -> float:
    """Root-mean-square deviation between two equally long samplings."""
    a = np.asarray(numerical, dtype=float)
    b = np.asarray(analytic, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch("fields must share a length")
    return float(np.sqrt(np.mean((a - b) ** 2)))


def convergence_rate(err_coarse: float, err_fine: float) -> float:
    """Observed order from one 2x refinement: log2(coarse/fine)."""
    if err_coarse <= 0.0 or err_fine <= 0.0:
        raise DomainError("errors must be positive to take a rate")
    return math.log(err_coarse / err_fine) / math.log(2.0)


def _params_for(order: str, epsilon: float) -> CalibrationResult:
    if order == "sixth":
        return calibration.calibrate_sixth(epsilon)
    if order == "fourth":
        return calibration.calibrate_fourth(epsilon, 1.0)
    if order == "second":
        return calibration.second_order_reference(epsilon)
    raise DomainError(f"order must be one of {calibration.ORDERS}")


@dataclass(frozen=True)
class BenchmarkCase:
    """One benchmark configuration with its calibrated parameter set."""

    epsilon: float
    dx: float
    order: str
    dt: float = field(init=False)
    kappa: float = field(init=False)
    t_end: float = field(init=False)
    params: CalibrationResult = field(init=False)

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise DomainError("epsilon must be positive")
        if self.dx <= 0.0:
            raise DomainError("dx must be positive")
        n = round(1.0 / self.dx)
        if abs(n * self.dx - 1.0) > 1e-9:
            raise DomainError(f"dx = {self.dx} does not divide the unit "
                              "interval")
        object.__setattr__(self, "dt", _DT_OVER_DX2 * self.dx ** 2)
        object.__setattr__(self, "kappa", self.epsilon / _DT_OVER_DX2)
        object.__setattr__(self, "t_end", _T_END)
        n_steps = round(self.t_end / self.dt)
        if abs(n_steps * self.dt - self.t_end) > 1e-9 * self.t_end:
            raise DomainError("t_end is not an integer multiple of dt at "
                              f"dx = {self.dx}")
        object.__setattr__(self, "params", _params_for(self.order,
                                                       self.epsilon))


def run_benchmark(case: BenchmarkCase) -> float:
    """March the scheme to t_end and return the interior-node RMSE."""
    res = case.params
    params = ModelParams.from_rates(res.omega0, res.s1, res.s2,
                                    dx=case.dx, dt=case.dt)
    grid = Grid1D(round(1.0 / case.dx))
    boundary = BoundarySpec.dirichlet(0.0, 0.0)
    final = run(params, grid,
                lambda x, t: analytic_phi(x, t, case.kappa),
                boundary, case.t_end)
    xs = grid.nodes()
    exact = analytic_phi(xs, case.t_end, case.kappa)
    return rmse(final[1:-1], exact[1:-1])


@dataclass(frozen=True)
class ConvergenceReport:
    """Errors and observed orders for one epsilon across refinements."""

    epsilon: float
    order: str
    rows: tuple
    rates: tuple

    def dts(self) -> tuple:
        return tuple(_DT_OVER_DX2 * dx ** 2 for dx, _ in self.rows)


def reproduce_table(order: str, eps_list=None,
                    dx_list=None) -> list[ConvergenceReport]:
    """Run the refinement study for each epsilon at one accuracy order.

    dx_list must be strictly decreasing; rates pair successive levels.
    """
    eps_values = tuple(DEFAULT_EPSILONS if eps_list is None else eps_list)
    dx_values = tuple(DEFAULT_SPACINGS if dx_list is None else dx_list)
    if not eps_values or not dx_values:
        raise DomainError("epsilon and dx lists must not be empty")
    if any(b >= a for a, b in zip(dx_values, dx_values[1:])):
        raise DomainError("dx list must be strictly decreasing")
    reports = []
    for eps in eps_values:
        rows = []
        for dx in dx_values:
            case = BenchmarkCase(epsilon=eps, dx=dx, order=order)
            rows.append((dx, run_benchmark(case)))
        rates = tuple(convergence_rate(rows[i][1], rows[i + 1][1])
                      for i in range(len(rows) - 1))
        reports.append(ConvergenceReport(epsilon=eps, order=order,
                                         rows=tuple(rows), rates=rates))
    return reports


def convergence_csv_lines(reports: list[ConvergenceReport]) -> list[str]:
    """Serialize refinement reports; the coarsest row has an empty rate."""
    lines = ["epsilon,order,dx,dt,rmse,rate"]
    for rep in reports:
        for i, (dx, err) in enumerate(rep.rows):
            rate = "" if i == 0 else _FMT.format(rep.rates[i - 1])
            lines.append(",".join([
                _FMT.format(rep.epsilon),
                rep.order,
                _FMT.format(dx),
                _FMT.format(_DT_OVER_DX2 * dx ** 2),
                _FMT.format(err),
                rate,
            ]))
    return lines


@dataclass(frozen=True)
class SolutionProfile:
    """Numeric versus exact field at t_end for one epsilon."""

    epsilon: float
    x: np.ndarray
    phi_numeric: np.ndarray
    phi_analytic: np.ndarray
    max_abs_deviation: float


def profile_solution(epsilon_list=None, dx: float = 0.025,
                     order: str = "sixth") -> list[SolutionProfile]:
    """Full-field comparison against the exact solution at t_end."""
    eps_values = tuple(DEFAULT_EPSILONS if epsilon_list is None
                       else epsilon_list)
    profiles = []
    for eps in eps_values:
        case = BenchmarkCase(epsilon=eps, dx=dx, order=order)
        res = case.params
        params = ModelParams.from_rates(res.omega0, res.s1, res.s2,
                                        dx=case.dx, dt=case.dt)
        grid = Grid1D(round(1.0 / case.dx))
        final = run(params, grid,
                    lambda x, t: analytic_phi(x, t, case.kappa),
                    BoundarySpec.dirichlet(0.0, 0.0), case.t_end)
        xs = grid.nodes()
        exact = analytic_phi(xs, case.t_end, case.kappa)
        profiles.append(SolutionProfile(
            epsilon=eps, x=xs, phi_numeric=final, phi_analytic=exact,
            max_abs_deviation=float(np.max(np.abs(final - exact)))))
    return profiles


def profile_csv_lines(profiles: list[SolutionProfile]) -> list[str]:
    lines = ["epsilon,x,phi_numeric,phi_analytic"]
    for prof in profiles:
        for x, num, exa in zip(prof.x, prof.phi_numeric, prof.phi_analytic):
            lines.append(",".join([
                _FMT.format(prof.epsilon),
                _FMT.format(float(x)),
                _FMT.format(float(num)),
                _FMT.format(float(exa)),
            ]))
    return lines
