"""Parameters and accuracy calibration for the D1Q3 MRT diffusion model.

The mesoscopic model solves d(phi)/dt = kappa * d2(phi)/dx2 + R with three
velocities (-c, 0, c), rest-population weight omega0 (moving weights
omega1 = (1 - omega0) / 2 each) and relaxation rates (s0, s1, s2) for the
conserved, first and second moments.  Two dimensionless groups control the
truncation error of the equivalent four-level finite-difference update:

    epsilon = kappa * dt / dx**2 = (1 - omega0) * (1/s1 - 1/2)

and the rates themselves.  The scheme is second-order accurate in space for
any admissible parameters.  Zeroing the dx**2 truncation term raises it to
fourth order; zeroing the dx**4 term as well raises it to sixth order.  Both
conditions are polynomial in (omega0, s1, s2, epsilon):

    dx**2 term:  s1*s2/12 - (omega0*s2/2 + s1/2 - 1)
                 + (s1*s2/2 - s2 - s1)*epsilon = 0

    dx**4 term:  s1*s2/360 - (omega0*s2/2 + s1/2 - 1)/12
                 - (s1*s2/6 - omega0*s2/2 - s1/2 + 1)*epsilon/2
                 + (-2*s1*s2/3 + s2 + s1 - 1)*epsilon**2 = 0

`calibrate_fourth` solves the first condition in closed form (it is linear in
s2 once s1 is pinned and omega0 is forced by epsilon).  For
`calibrate_sixth` both conditions must hold at once: eliminating omega0
through the epsilon identity and s2 through the dx**2 condition (each is
linear in s2) reduces the pair to a single cubic in s1.  That cubic has
exactly one real root for 0 < epsilon <= epsilon_max() (about 0.2624, where
its discriminant changes sign); the root fixes the whole triple, and a short
Newton polish drives both residuals below 1e-12.  Larger epsilon is treated
as out of calibration range, keeping omega0 in [0.8, 1), s1 in (0, 0.92]
and s2 in [1.12, 2) over the accepted domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NoRealRoot

ORDERS = ("second", "fourth", "sixth")

_RESIDUAL_TOL = 1e-12
_MAX_NEWTON_ITER = 100
_MAX_DAMPINGS = 60


class _SixthSolveFailed(Exception):
    """Internal marker: no admissible sixth-order solution at this epsilon."""


@dataclass(frozen=True)
class Weights:
    """Equilibrium weights of the three-velocity lattice.

    The moving weights are equal and fixed by the rest weight:
    omega1 = (1 - omega0) / 2.  Only 0 < omega0 < 1 is admissible.
    """

    omega0: float
    omega1: float

    def __post_init__(self):
        if not 0.0 < self.omega0 < 1.0:
            raise DomainError(f"omega0 must lie in (0, 1), got {self.omega0}")
        if self.omega1 != (1.0 - self.omega0) / 2.0:
            raise DomainError("omega1 must equal (1 - omega0)/2 exactly")


@dataclass(frozen=True)
class Relaxations:
    """Relaxation rates for the conserved, first and second moments.

    s0 acts on the conserved moment and drops out of the update entirely;
    s1 and s2 must lie in (0, 2) for the collision to be admissible.
    """

    s0: float
    s1: float
    s2: float

    def __post_init__(self):
        if not math.isfinite(self.s0):
            raise DomainError(f"s0 must be finite, got {self.s0}")
        if not 0.0 < self.s1 < 2.0:
            raise DomainError(f"s1 must lie in (0, 2), got {self.s1}")
        if not 0.0 < self.s2 < 2.0:
            raise DomainError(f"s2 must lie in (0, 2), got {self.s2}")


def weights_from_omega0(omega0: float) -> Weights:
    """Build the weight triple from the rest-population weight."""
    if not 0.0 < omega0 < 1.0:
        raise DomainError(f"omega0 must lie in (0, 1), got {omega0}")
    return Weights(omega0, (1.0 - omega0) / 2.0)


def from_srt(omega: float) -> Relaxations:
    """Single-relaxation-time collision: every rate equals omega."""
    return Relaxations(omega, omega, omega)


def from_trt(s_plus: float, s_minus: float) -> Relaxations:
    """Two-relaxation-time collision: even rates s_plus, odd rate s_minus."""
    return Relaxations(s_plus, s_minus, s_plus)


def from_regularized(omega: float) -> Relaxations:
    """Regularized collision: non-conserved even modes projected out (rate 1)."""
    return Relaxations(1.0, omega, 1.0)


def from_modified_lattice_kinetic(omega: float, eta: float) -> Relaxations:
    """Modified lattice-kinetic collision with tuning parameter eta.

    The first-moment rate becomes omega / (1 - omega*eta); the result must
    still land in (0, 2).
    """
    den = 1.0 - omega * eta
    if den == 0.0:
        raise DomainError("omega*eta = 1 makes the first-moment rate singular")
    return Relaxations(omega, omega / den, omega)


@dataclass(frozen=True)
class ModelParams:
    """Complete parameter set for one model run.

    kappa, epsilon, the weights and the rates are mutually constrained:
    kappa = 2*omega1*(1/s1 - 1/2)*dx**2/dt and epsilon = kappa*dt/dx**2.
    Construction checks both identities to 1e-12 relative.
    """

    dx: float
    dt: float
    kappa: float
    source_R: float
    weights: Weights
    relax: Relaxations
    epsilon: float

    def __post_init__(self):
        if self.dx <= 0.0 or self.dt <= 0.0:
            raise DomainError("dx and dt must be positive")
        if self.kappa <= 0.0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")
        kappa_id = (2.0 * self.weights.omega1 * (1.0 / self.relax.s1 - 0.5)
                    * self.dx ** 2 / self.dt)
        if abs(self.kappa - kappa_id) > 1e-12 * abs(kappa_id):
            raise DomainError("kappa does not match the weights and rates")
        eps_id = self.kappa * self.dt / self.dx ** 2
        if abs(self.epsilon - eps_id) > 1e-12 * abs(eps_id):
            raise DomainError("epsilon does not match kappa*dt/dx**2")

    @classmethod
    def from_rates(cls, omega0: float, s1: float, s2: float, dx: float,
                   dt: float, source_R: float = 0.0,
                   s0: float = 1.0) -> "ModelParams":
        """Derive kappa and epsilon from (omega0, s1, s2) on a given mesh."""
        weights = weights_from_omega0(omega0)
        relax = Relaxations(s0, s1, s2)
        kappa = 2.0 * weights.omega1 * (1.0 / s1 - 0.5) * dx ** 2 / dt
        epsilon = kappa * dt / dx ** 2
        return cls(dx, dt, kappa, source_R, weights, relax, epsilon)


def mesh_fourier(omega0: float, s1: float) -> float:
    """Mesh Fourier number epsilon = (1 - omega0)*(1/s1 - 1/2)."""
    if not 0.0 < omega0 < 1.0:
        raise DomainError(f"omega0 must lie in (0, 1), got {omega0}")
    if not 0.0 < s1 < 2.0:
        raise DomainError(f"s1 must lie in (0, 2), got {s1}")
    return (1.0 - omega0) * (1.0 / s1 - 0.5)


def diffusivity(params: ModelParams) -> float:
    """Diffusion coefficient implied by the weights, rates and mesh."""
    return (2.0 * params.weights.omega1 * (1.0 / params.relax.s1 - 0.5)
            * params.dx ** 2 / params.dt)


def residual_second(omega0: float, s1: float, s2: float,
                    epsilon: float) -> float:
    """Residual of the dx**2 truncation term; zero means fourth order."""
    return (s1 * s2 / 12.0 - (omega0 * s2 / 2.0 + s1 / 2.0 - 1.0)
            + (s1 * s2 / 2.0 - s2 - s1) * epsilon)


def residual_fourth(omega0: float, s1: float, s2: float,
                    epsilon: float) -> float:
    """Residual of the dx**4 truncation term; zero (with the dx**2 term
    already zero) means sixth order."""
    return (s1 * s2 / 360.0
            - (omega0 * s2 / 2.0 + s1 / 2.0 - 1.0) / 12.0
            - (s1 * s2 / 6.0 - omega0 * s2 / 2.0 - s1 / 2.0 + 1.0)
            * epsilon / 2.0
            + (-2.0 * s1 * s2 / 3.0 + s2 + s1 - 1.0) * epsilon ** 2)


@dataclass(frozen=True)
class CalibrationResult:
    """A calibrated (omega0, s1, s2) triple with its accuracy residuals."""

    epsilon: float
    omega0: float
    s1: float
    s2: float
    residual_second: float
    residual_fourth: float
    order: str

    def __post_init__(self):
        if self.order not in ORDERS:
            raise DomainError(f"order must be one of {ORDERS}")
        if not 0.0 < self.omega0 < 1.0:
            raise DomainError("omega0 out of (0, 1)")
        if not 0.0 < self.s1 < 2.0 or not 0.0 < self.s2 < 2.0:
            raise DomainError("relaxation rates out of (0, 2)")
        if self.order in ("fourth", "sixth") \
                and abs(self.residual_second) > _RESIDUAL_TOL:
            raise DomainError("fourth/sixth order requires a vanishing "
                              "dx**2 residual")
        if self.order == "sixth" and abs(self.residual_fourth) > _RESIDUAL_TOL:
            raise DomainError("sixth order requires a vanishing dx**4 "
                              "residual")

    def weights(self) -> Weights:
        return weights_from_omega0(self.omega0)

    def relaxations(self, s0: float = 1.0) -> Relaxations:
        return Relaxations(s0, self.s1, self.s2)

    def to_json_dict(self) -> dict:
        return {
            "epsilon": float(self.epsilon),
            "omega0": float(self.omega0),
            "s1": float(self.s1),
            "s2": float(self.s2),
            "residual_second": float(self.residual_second),
            "residual_fourth": float(self.residual_fourth),
            "order": self.order,
        }


def _omega0_of_s1(s1: float, epsilon: float) -> float:
    # epsilon identity solved for omega0 at fixed s1.
    return 1.0 - 2.0 * epsilon * s1 / (2.0 - s1)


def _sixth_system(s1: float, s2: float, eps: float) -> tuple[float, float]:
    w = _omega0_of_s1(s1, eps)
    return (residual_second(w, s1, s2, eps), residual_fourth(w, s1, s2, eps))


def _sixth_jacobian(s1: float, s2: float, eps: float):
    w = _omega0_of_s1(s1, eps)
    dw = -4.0 * eps / (2.0 - s1) ** 2
    j11 = s2 / 12.0 - (dw * s2 / 2.0 + 0.5) + (s2 / 2.0 - 1.0) * eps
    j12 = s1 / 12.0 - w / 2.0 + (s1 / 2.0 - 1.0) * eps
    j21 = (s2 / 360.0 - (dw * s2 / 2.0 + 0.5) / 12.0
           - (s2 / 6.0 - dw * s2 / 2.0 - 0.5) * eps / 2.0
           + (-2.0 * s2 / 3.0 + 1.0) * eps ** 2)
    j22 = (s1 / 360.0 - w / 24.0 - (s1 / 6.0 - w / 2.0) * eps / 2.0
           + (-2.0 * s1 / 3.0 + 1.0) * eps ** 2)
    return j11, j12, j21, j22


def _inside_box(s1: float, s2: float, eps: float) -> bool:
    # Validity box: rates in (0, 2) and omega0(s1) in (0, 1).
    if not 0.0 < s1 < 2.0 or not 0.0 < s2 < 2.0:
        return False
    return 0.0 < _omega0_of_s1(s1, eps) < 1.0


def _newton_sixth(eps: float, s1: float, s2: float):
    """Damped Newton iteration; returns (s1, s2) or None."""
    for _ in range(_MAX_NEWTON_ITER):
        f1, f2 = _sixth_system(s1, s2, eps)
        if max(abs(f1), abs(f2)) <= _RESIDUAL_TOL:
            return s1, s2
        j11, j12, j21, j22 = _sixth_jacobian(s1, s2, eps)
        det = j11 * j22 - j12 * j21
        if det == 0.0 or not math.isfinite(det):
            return None
        d1 = (f1 * j22 - f2 * j12) / det
        d2 = (f2 * j11 - f1 * j21) / det
        scale = 1.0
        for _ in range(_MAX_DAMPINGS):
            if _inside_box(s1 - scale * d1, s2 - scale * d2, eps):
                break
            scale *= 0.5
        else:
            return None
        s1 -= scale * d1
        s2 -= scale * d2
    f1, f2 = _sixth_system(s1, s2, eps)
    if max(abs(f1), abs(f2)) <= _RESIDUAL_TOL:
        return s1, s2
    return None


def _reduced_cubic(eps: float) -> tuple[float, float, float, float]:
    """Coefficients (a3, a2, a1, a0) of the cubic in s1 left after
    eliminating omega0 (epsilon identity) and s2 (dx**2 condition, linear in
    s2) from the pair of accuracy conditions."""
    e = eps
    a3 = 240.0 * e ** 3 + 300.0 * e ** 2 + 56.0 * e + 3.0
    a2 = 960.0 * e ** 3 - 960.0 * e ** 2 - 232.0 * e - 12.0
    a1 = -4320.0 * e ** 3 + 960.0 * e ** 2 + 360.0 * e + 12.0
    a0 = 2880.0 * e ** 3 - 240.0 * e
    return a3, a2, a1, a0


def _cubic_discriminant(a3: float, a2: float, a1: float, a0: float) -> float:
    # Negative exactly when the cubic has one real root and a complex pair.
    return (18.0 * a3 * a2 * a1 * a0 - 4.0 * a2 ** 3 * a0
            + a2 ** 2 * a1 ** 2 - 4.0 * a3 * a1 ** 3
            - 27.0 * a3 ** 2 * a0 ** 2)


def _solve_sixth(eps: float):
    """Solve both accuracy conditions from the reduced cubic.

    Returns (omega0, s1, s2).  Raises _SixthSolveFailed when the cubic does
    not have a single real root (epsilon past epsilon_max) or when the root
    leaves the admissible parameter box.
    """
    a3, a2, a1, a0 = _reduced_cubic(eps)
    if not _cubic_discriminant(a3, a2, a1, a0) < 0.0:
        raise _SixthSolveFailed(eps)
    roots = np.roots([a3, a2, a1, a0])
    s1 = float(roots[np.argmin(np.abs(roots.imag))].real)
    if not 0.0 < s1 < 2.0:
        raise _SixthSolveFailed(eps)
    omega0 = _omega0_of_s1(s1, eps)
    den = s1 / 12.0 - omega0 / 2.0 + (s1 / 2.0 - 1.0) * eps
    if den == 0.0:
        raise _SixthSolveFailed(eps)
    s2 = (s1 / 2.0 - 1.0 + s1 * eps) / den
    if not _inside_box(s1, s2, eps):
        raise _SixthSolveFailed(eps)
    sol = _newton_sixth(eps, s1, s2)
    if sol is None:
        raise _SixthSolveFailed(eps)
    s1, s2 = sol
    return _omega0_of_s1(s1, eps), s1, s2


def calibrate_sixth(epsilon: float) -> CalibrationResult:
    """Calibrate (omega0, s1, s2) for sixth-order spatial accuracy.

    Raises NoRealRoot when epsilon leaves the range where the reduced cubic
    has a single real root (see epsilon_max); raises DomainError for a
    non-positive epsilon.
    """
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    try:
        omega0, s1, s2 = _solve_sixth(epsilon)
    except _SixthSolveFailed:
        raise NoRealRoot(
            f"no real sixth-order solution at epsilon = {epsilon}; "
            f"the solvable range is 0 < epsilon <= {epsilon_max():.6f}"
        ) from None
    return CalibrationResult(
        epsilon=epsilon, omega0=omega0, s1=s1, s2=s2,
        residual_second=residual_second(omega0, s1, s2, epsilon),
        residual_fourth=residual_fourth(omega0, s1, s2, epsilon),
        order="sixth")


def calibrate_fourth(epsilon: float, s1: float = 1.0) -> CalibrationResult:
    """Calibrate for fourth-order accuracy at a pinned s1.

    omega0 is forced by the epsilon identity and s2 solves the dx**2
    condition, which is linear in s2.  Raises DomainError when the forced
    omega0 or s2 leaves its open interval.
    """
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not 0.0 < s1 < 2.0:
        raise DomainError(f"s1 must lie in (0, 2), got {s1}")
    omega0 = 1.0 - epsilon / (1.0 / s1 - 0.5)
    if not 0.0 < omega0 < 1.0:
        raise DomainError(
            f"epsilon = {epsilon} with s1 = {s1} forces omega0 = {omega0} "
            "outside (0, 1)")
    den = s1 / 12.0 - omega0 / 2.0 + (s1 / 2.0 - 1.0) * epsilon
    if den == 0.0:
        raise DomainError("the dx**2 condition degenerates at these "
                          "parameters")
    s2 = (s1 / 2.0 - 1.0 + s1 * epsilon) / den
    if not 0.0 < s2 < 2.0:
        raise DomainError(
            f"the dx**2 condition forces s2 = {s2} outside (0, 2)")
    return CalibrationResult(
        epsilon=epsilon, omega0=omega0, s1=s1, s2=s2,
        residual_second=residual_second(omega0, s1, s2, epsilon),
        residual_fourth=residual_fourth(omega0, s1, s2, epsilon),
        order="fourth")


def second_order_reference(epsilon: float) -> CalibrationResult:
    """Baseline second-order parameter set: s1 = s2 = 1, omega0 = 1 - 2*epsilon.

    With unit rates the four-level update degenerates to the classical
    two-level central scheme with mesh Fourier number epsilon.
    """
    if not 0.0 < epsilon < 0.5:
        raise DomainError(
            f"the second-order reference needs 0 < epsilon < 0.5, "
            f"got {epsilon}")
    omega0 = 1.0 - 2.0 * epsilon
    return CalibrationResult(
        epsilon=epsilon, omega0=omega0, s1=1.0, s2=1.0,
        residual_second=residual_second(omega0, 1.0, 1.0, epsilon),
        residual_fourth=residual_fourth(omega0, 1.0, 1.0, epsilon),
        order="second")


@lru_cache(maxsize=1)
def epsilon_max() -> float:
    """Largest epsilon with a sixth-order calibration (cached).

    Located by bisection on the solvability of the sixth-order system over
    (0.24, 0.30) to a width of 1e-6; the returned value is on the certified
    solvable side of the boundary where the reduced cubic's discriminant
    changes sign and its single real root gains two real companions.
    """
    lo, hi = 0.24, 0.30
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        try:
            _solve_sixth(mid)
        except _SixthSolveFailed:
            hi = mid
        else:
            lo = mid
    return lo


@dataclass(frozen=True)
class SweepRow:
    """One epsilon of a calibration sweep; rates are None when infeasible."""

    epsilon: float
    omega0: float | None
    s1: float | None
    s2: float | None
    status: str


def calibration_sweep(eps_grid) -> list[SweepRow]:
    """Sixth-order calibration over an increasing grid of epsilon values.

    Grid points past epsilon_max produce status "no_real_root" rows with the
    rate fields left empty.
    """
    grid = [float(e) for e in eps_grid]
    if not grid:
        raise DomainError("the epsilon grid must not be empty")
    if grid[0] <= 0.0 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("the epsilon grid must be positive and strictly "
                          "increasing")
    rows: list[SweepRow] = []
    for eps in grid:
        try:
            omega0, s1, s2 = _solve_sixth(eps)
        except _SixthSolveFailed:
            rows.append(SweepRow(eps, None, None, None, "no_real_root"))
        else:
            rows.append(SweepRow(eps, omega0, s1, s2, "ok"))
    return rows
