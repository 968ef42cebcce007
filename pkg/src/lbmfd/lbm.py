"""Mesoscopic D1Q3 MRT update for the 1D diffusion equation.

Populations stream with velocities (-c, 0, c), c = dx/dt, and collide in
moment space.  The moment transform and its exact inverse are

    M = [[1,    1,     1  ],          M_inv = [[1/3, -1/(2c), 1/(6c^2)],
         [-c,   0,     c  ],                   [1/3,  0,     -1/(3c^2)],
         [c^2, -2c^2,  c^2]]                   [1/3,  1/(2c), 1/(6c^2)]]

with the population order (f_minus, f_zero, f_plus).  The macroscopic field
carries the trapezoidal half-step source correction,
phi = f_minus + f_zero + f_plus + dt*R/2, and equilibria are weight shares
of phi.  `evolve` applies the collision in its fully substituted population
form (cheap, no matrix products); `evolve_matrix_form` applies the raw
moment-space definition with explicit M, S, M_inv products.  Both walk the
same trajectory to rounding error, and the conserved-moment rate s0 drops
out exactly because the conserved moment already equals its equilibrium.

Only periodic streaming is supported at this level; bounded domains are the
business of the equivalent finite-difference form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calibration import ModelParams, Weights
from .errors import DomainError, LengthMismatch, UnsupportedBoundary
from .scheme import BoundarySpec, PhiHistory, coefficients, step


@dataclass(frozen=True)
class DistributionField:
    """Populations on the grid, one array per lattice velocity."""

    f_minus: np.ndarray
    f_zero: np.ndarray
    f_plus: np.ndarray

    def __post_init__(self):
        n = self.f_minus.shape[0]
        if self.f_zero.shape != (n,) or self.f_plus.shape != (n,):
            raise LengthMismatch("population arrays must share one length")

    @property
    def node_count(self) -> int:
        return self.f_minus.shape[0]


@dataclass(frozen=True)
class LatticeMatrices:
    """Moment transform M, relaxation diagonal S and exact inverse M_inv."""

    M: np.ndarray
    S: np.ndarray
    M_inv: np.ndarray


def lattice_matrices(c: float, relax) -> LatticeMatrices:
    """Build the moment-space matrices for lattice speed c = dx/dt."""
    if c <= 0.0:
        raise DomainError(f"lattice speed must be positive, got {c}")
    M = np.array([
        [1.0, 1.0, 1.0],
        [-c, 0.0, c],
        [c * c, -2.0 * c * c, c * c],
    ])
    M_inv = np.array([
        [1.0 / 3.0, -1.0 / (2.0 * c), 1.0 / (6.0 * c * c)],
        [1.0 / 3.0, 0.0, -1.0 / (3.0 * c * c)],
        [1.0 / 3.0, 1.0 / (2.0 * c), 1.0 / (6.0 * c * c)],
    ])
    S = np.diag([relax.s0, relax.s1, relax.s2])
    return LatticeMatrices(M=M, S=S, M_inv=M_inv)


def equilibrium(phi, weights: Weights):
    """Equilibrium populations (weight shares of phi); broadcasts over phi."""
    return (weights.omega1 * phi, weights.omega0 * phi, weights.omega1 * phi)


def macro_phi(f: DistributionField, dt: float, R: float) -> np.ndarray:
    """Macroscopic field with the half-step source correction."""
    return f.f_minus + f.f_zero + f.f_plus + 0.5 * dt * R


def initialize(phi0: np.ndarray, weights: Weights, dt: float,
               R: float) -> DistributionField:
    """Equilibrium populations whose macroscopic field equals phi0."""
    base = np.asarray(phi0, dtype=float) - 0.5 * dt * R
    fm, f0, fp = equilibrium(base, weights)
    return DistributionField(fm, f0, fp)


def evolve(f: DistributionField, params: ModelParams,
           boundary: BoundarySpec) -> DistributionField:
    """One collision-streaming update in substituted population form.

    Only periodic streaming is supported; any other boundary raises
    UnsupportedBoundary.
    """
    if boundary.kind != "periodic":
        raise UnsupportedBoundary(
            "the mesoscopic update only streams periodically; use the "
            "finite-difference form for bounded domains")
    omega0 = params.weights.omega0
    omega1 = params.weights.omega1
    s1 = params.relax.s1
    s2 = params.relax.s2
    dt_R = params.dt * params.source_R
    phi = macro_phi(f, params.dt, params.source_R)
    asym = 0.5 * s1 * (f.f_minus - f.f_plus)
    pull = 0.5 * s2 * f.f_zero - 0.5 * omega0 * s2 * phi
    g_minus = f.f_minus - asym + pull + (omega1 + omega0 * s2 / 4.0) * dt_R
    g_zero = ((1.0 - s2) * f.f_zero + omega0 * s2 * phi
              + omega0 * (1.0 - s2 / 2.0) * dt_R)
    g_plus = f.f_plus + asym + pull + (omega1 + omega0 * s2 / 4.0) * dt_R
    return DistributionField(
        f_minus=np.roll(g_minus, -1),
        f_zero=g_zero,
        f_plus=np.roll(g_plus, 1))


def evolve_matrix_form(f: DistributionField,
                       params: ModelParams) -> DistributionField:
    """One periodic update straight from the moment-space definition.

    Collision: f* = f - M_inv S M (f - f_eq) + dt * M_inv (I - S/2) M r,
    with r the weight-shared source vector; then streaming.
    """
    mats = lattice_matrices(params.dx / params.dt, params.relax)
    collide = mats.M_inv @ mats.S @ mats.M
    source_op = mats.M_inv @ (np.eye(3) - 0.5 * mats.S) @ mats.M
    phi = macro_phi(f, params.dt, params.source_R)
    stack = np.vstack([f.f_minus, f.f_zero, f.f_plus])
    eq_stack = np.vstack(equilibrium(phi, params.weights))
    r_vec = params.source_R * np.array([
        params.weights.omega1, params.weights.omega0,
        params.weights.omega1])
    src = params.dt * (source_op @ r_vec)
    post = stack - collide @ (stack - eq_stack) + src[:, None]
    return DistributionField(
        f_minus=np.roll(post[0], -1),
        f_zero=post[1].copy(),
        f_plus=np.roll(post[2], 1))


def fd_equivalence_deviation(n_nodes: int, steps: int, omega0: float,
                             s1: float, s2: float, seed: int,
                             source_R: float = 0.0) -> tuple[float, float]:
    """Largest gap between the mesoscopic trajectory and its four-level
    finite-difference prediction.

    Starts from a seeded uniform random field (numpy PCG64 generator),
    evolves the mesoscopic model `steps` times on a periodic lattice with
    dx = dt = 1, and predicts each level n+1 (n >= 2) from the three
    preceding macroscopic levels with the four-level stencil.  Returns
    (max absolute deviation, max absolute field value).
    """
    if n_nodes < 8:
        raise DomainError("need at least 8 nodes")
    if steps < 3:
        raise DomainError("need at least 3 steps")
    rng = np.random.default_rng(seed)
    phi0 = rng.random(n_nodes)
    params = ModelParams.from_rates(omega0, s1, s2, dx=1.0, dt=1.0,
                                    source_R=source_R)
    boundary = BoundarySpec.periodic()
    field = initialize(phi0, params.weights, params.dt, params.source_R)
    trace = [macro_phi(field, params.dt, params.source_R)]
    for _ in range(steps):
        field = evolve(field, params, boundary)
        trace.append(macro_phi(field, params.dt, params.source_R))
    coeffs = coefficients(omega0, s1, s2)
    max_dev = 0.0
    for n in range(2, steps):
        history = PhiHistory.from_levels(trace[n - 2], trace[n - 1],
                                         trace[n], params.dt)
        predicted = step(history, coeffs, params.dt, params.source_R,
                         boundary)
        dev = float(np.max(np.abs(predicted - trace[n + 1])))
        max_dev = max(max_dev, dev)
    max_phi = float(max(np.max(np.abs(lv)) for lv in trace))
    return max_dev, max_phi
