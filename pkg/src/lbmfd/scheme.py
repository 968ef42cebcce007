"""Explicit four-level finite-difference form of the D1Q3 MRT diffusion model.

Eliminating the distribution functions from the mesoscopic update yields a
single explicit recurrence for the macroscopic field on four time levels:

    phi[j, n+1] = side_n    * (phi[j-1, n]   + phi[j+1, n])
                + center_n  *  phi[j, n]
                + side_nm1  * (phi[j-1, n-1] + phi[j+1, n-1])
                + center_nm1 * phi[j, n-1]
                + center_nm2 * phi[j, n-2]
                + source * dt * R

with stencil weights that are polynomials in (omega0, s1, s2).  The weights
sum to one, so constants are preserved exactly.  With s1 = s2 = 1 the three
history levels drop out and the classical two-level central scheme with mesh
Fourier number epsilon = (1 - omega0)/2 remains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calibration import ModelParams
from .errors import DomainError, LengthMismatch, StateError

_FMT = "{:.17g}"


@dataclass(frozen=True)
class FdCoefficients:
    """Stencil weights of the four-level update, named by position:
    (side, center) at the current level n, (side, center) at level n-1,
    center at level n-2, and the source weight."""

    side_n: float
    center_n: float
    side_nm1: float
    center_nm1: float
    center_nm2: float
    source: float

    def weight_sum(self) -> float:
        """Sum of all field weights; equals 1 for any admissible rates."""
        return (2.0 * self.side_n + self.center_n + 2.0 * self.side_nm1
                + self.center_nm1 + self.center_nm2)


def coefficients(omega0: float, s1: float, s2: float) -> FdCoefficients:
    """Stencil weights implied by (omega0, s1, s2)."""
    if not 0.0 < omega0 < 1.0:
        raise DomainError(f"omega0 must lie in (0, 1), got {omega0}")
    if not 0.0 < s1 < 2.0:
        raise DomainError(f"s1 must lie in (0, 2), got {s1}")
    if not 0.0 < s2 < 2.0:
        raise DomainError(f"s2 must lie in (0, 2), got {s2}")
    return FdCoefficients(
        side_n=1.0 - s1 / 2.0 - omega0 * s2 / 2.0,
        center_n=(omega0 - 1.0) * s2 + 1.0,
        side_nm1=(omega0 * s1 * s2 / 2.0 - s1 * s2 / 2.0 - omega0 * s2 / 2.0
                  + s1 / 2.0 + s2 - 1.0),
        center_nm1=-omega0 * s1 * s2 + omega0 * s2 + s1 - 1.0,
        center_nm2=(s1 - 1.0) * (s2 - 1.0),
        source=s1 * s2)


def srt_coefficients(omega: float, omega1: float) -> FdCoefficients:
    """Stencil weights for the single-relaxation-time case, written in the
    compact form with complement = 1 - omega."""
    if not 0.0 < omega < 2.0:
        raise DomainError(f"omega must lie in (0, 2), got {omega}")
    if not 0.0 < omega1 < 0.5:
        raise DomainError(f"omega1 must lie in (0, 1/2), got {omega1}")
    comp = 1.0 - omega
    return FdCoefficients(
        side_n=comp + omega1 * omega,
        center_n=comp + (1.0 - 2.0 * omega1) * omega,
        side_nm1=-(comp + (1.0 - omega1) * omega) * comp,
        center_nm1=-(comp + 2.0 * omega1 * omega) * comp,
        center_nm2=comp * comp,
        source=omega * omega)


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with nodes x0 + j*dx for j = 0..n_intervals."""

    n_intervals: int
    length: float = 1.0
    x0: float = 0.0
    dx: float = field(init=False)

    def __post_init__(self):
        if self.n_intervals < 2:
            raise DomainError("need at least 2 intervals")
        if self.length <= 0.0:
            raise DomainError("length must be positive")
        object.__setattr__(self, "dx", self.length / self.n_intervals)

    def nodes(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n_intervals + 1)


@dataclass(frozen=True)
class BoundarySpec:
    """Boundary treatment: periodic wrap or fixed end values."""

    kind: str
    left_value: float = 0.0
    right_value: float = 0.0

    def __post_init__(self):
        if self.kind not in ("periodic", "dirichlet"):
            raise DomainError(f"unknown boundary kind {self.kind!r}")

    @classmethod
    def periodic(cls) -> "BoundarySpec":
        return cls("periodic")

    @classmethod
    def dirichlet(cls, left: float, right: float) -> "BoundarySpec":
        return cls("dirichlet", left, right)


class PhiHistory:
    """Ring buffer of the three most recent field levels.

    Levels rotate by index on push; arrays are never copied.  step_index is
    the time index of the newest level, so a freshly seeded history (levels
    at t = 0, dt, 2*dt) has step_index = 2.
    """

    def __init__(self, levels: list[np.ndarray], dt: float, step_index: int):
        if len(levels) != 3:
            raise StateError("a history holds exactly three levels")
        n = levels[0].shape[0]
        if any(lv.shape != (n,) for lv in levels):
            raise LengthMismatch("history levels must share one length")
        if dt <= 0.0:
            raise DomainError("dt must be positive")
        self._levels = list(levels)
        self.dt = dt
        self.step_index = step_index

    @classmethod
    def from_levels(cls, phi_nm2, phi_nm1, phi_n, dt: float) -> "PhiHistory":
        levels = [np.asarray(phi_nm2), np.asarray(phi_nm1), np.asarray(phi_n)]
        return cls(levels, dt, 2)

    @property
    def oldest(self) -> np.ndarray:
        return self._levels[0]

    @property
    def previous(self) -> np.ndarray:
        return self._levels[1]

    @property
    def current(self) -> np.ndarray:
        return self._levels[2]

    def push(self, new_level: np.ndarray) -> np.ndarray:
        self._levels[0], self._levels[1], self._levels[2] = (
            self._levels[1], self._levels[2], new_level)
        self.step_index += 1
        return new_level


def step(history: PhiHistory, coeffs: FdCoefficients, dt: float, R: float,
         boundary: BoundarySpec) -> np.ndarray:
    """Advance the four-level recurrence by one time level.

    The new level is pushed into the history and returned.  Dirichlet end
    nodes are pinned to their boundary values; periodic indexing wraps.
    """
    if history.step_index < 2:
        raise StateError("the four-level update needs three seeded levels")
    cur, prev, old = history.current, history.previous, history.oldest
    src = coeffs.source * dt * R
    if boundary.kind == "periodic":
        new = (coeffs.side_n * (np.roll(cur, 1) + np.roll(cur, -1))
               + coeffs.center_n * cur
               + coeffs.side_nm1 * (np.roll(prev, 1) + np.roll(prev, -1))
               + coeffs.center_nm1 * prev
               + coeffs.center_nm2 * old
               + src)
    else:
        new = np.empty_like(cur)
        new[1:-1] = (coeffs.side_n * (cur[:-2] + cur[2:])
                     + coeffs.center_n * cur[1:-1]
                     + coeffs.side_nm1 * (prev[:-2] + prev[2:])
                     + coeffs.center_nm1 * prev[1:-1]
                     + coeffs.center_nm2 * old[1:-1]
                     + src)
        new[0] = boundary.left_value
        new[-1] = boundary.right_value
    return history.push(new)


def _two_level_step(cur: np.ndarray, eps_sub: float, dt_sub: float, R: float,
                    boundary: BoundarySpec) -> np.ndarray:
    # Classical central two-level update used only for bootstrapping.
    if boundary.kind == "periodic":
        lap = np.roll(cur, 1) - 2.0 * cur + np.roll(cur, -1)
        return cur + eps_sub * lap + dt_sub * R
    new = np.empty_like(cur)
    new[1:-1] = (cur[1:-1] + eps_sub * (cur[:-2] - 2.0 * cur[1:-1] + cur[2:])
                 + dt_sub * R)
    new[0] = boundary.left_value
    new[-1] = boundary.right_value
    return new


def bootstrap_history(phi0: np.ndarray, epsilon: float, dx: float, dt: float,
                      R: float, boundary: BoundarySpec,
                      substeps: int = 4) -> PhiHistory:
    """Seed the two missing start levels with the degenerate two-level scheme.

    Each of the two coarse levels is produced by `substeps` sub-steps of the
    classical scheme at epsilon/substeps, which keeps the seeding stable and
    second-order consistent when no closed-form start data exists.
    """
    if substeps < 1:
        raise DomainError("substeps must be at least 1")
    eps_sub = epsilon / substeps
    if not 0.0 < eps_sub < 0.5:
        raise DomainError("epsilon/substeps must lie in (0, 1/2) for a "
                          "stable bootstrap")
    dt_sub = dt / substeps
    level0 = np.asarray(phi0, dtype=float)
    cur = level0
    levels = [level0]
    for _ in range(2):
        for _ in range(substeps):
            cur = _two_level_step(cur, eps_sub, dt_sub, R, boundary)
        levels.append(cur)
    return PhiHistory.from_levels(levels[0], levels[1], levels[2], dt)


def run(params: ModelParams, grid: Grid1D, initializer,
        boundary: BoundarySpec, t_end: float) -> np.ndarray:
    """March the four-level scheme from seeded start data to t_end.

    The first three levels are filled from `initializer(x, t)` at
    t = 0, dt, 2*dt; t_end must be an integer multiple of dt (relative slack
    1e-9) and at least 2*dt.  For t_end = 2*dt the third seeded level is
    returned with zero four-level updates applied, so the result is always
    the field at exactly t_end.  Periodic runs use the n_intervals distinct
    nodes x0 + j*dx, j = 0..n_intervals-1.
    """
    dt = params.dt
    if t_end < 2.0 * dt:
        raise DomainError("t_end must be at least 2*dt")
    n_steps = round(t_end / dt)
    if abs(n_steps * dt - t_end) > 1e-9 * abs(t_end):
        raise DomainError(
            f"t_end = {t_end} is not an integer multiple of dt = {dt}")
    if abs(grid.dx - params.dx) > 1e-12 * params.dx:
        raise DomainError("grid spacing does not match params.dx")
    xs = grid.nodes()
    if boundary.kind == "periodic":
        xs = xs[:-1]
    seeds = [np.asarray([float(initializer(x, k * dt)) for x in xs])
             for k in range(3)]
    history = PhiHistory.from_levels(seeds[0], seeds[1], seeds[2], dt)
    coeffs = coefficients(params.weights.omega0, params.relax.s1,
                          params.relax.s2)
    for _ in range(n_steps - 2):
        step(history, coeffs, dt, params.source_R, boundary)
    return history.current.copy()


def snapshot_csv_lines(xs: np.ndarray, phi: np.ndarray) -> list[str]:
    """Serialize one field snapshot as CSV lines with header x,phi."""
    if xs.shape != phi.shape:
        raise LengthMismatch("x and phi must share a length")
    lines = ["x,phi"]
    for x, v in zip(xs, phi):
        lines.append(f"{_FMT.format(float(x))},{_FMT.format(float(v))}")
    return lines
