"""Von Neumann and Routh-Hurwitz stability machinery.

A Fourier mode exp(i*theta*j) turns the mesoscopic update into a 3x3
population amplification matrix and the four-level scheme into a 3x3
companion matrix.  Both share one characteristic cubic,

    lambda**3 + p2*lambda**2 + p1*lambda + p0,

whose coefficients are polynomials in (omega0, s1, s2, cos(theta)).  The
scheme is von Neumann stable iff all roots stay inside the closed unit disk
for every theta.  The transformation lambda = (1 + z)/(1 - z) maps that
condition onto five sign conditions on the coefficients (Routh-Hurwitz);
`routh_hurwitz_values` returns them in fixed order and `spectral_radius_scan`
checks the root moduli directly on a theta grid.  The fourth condition
vanishes identically at theta = 0: that root is the conserved mode, which
always has modulus exactly one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .scheme import FdCoefficients

_RADIUS_SLACK = 1e-10
_COS_ONE = 1.0 - 1e-12


@dataclass(frozen=True)
class CharPoly:
    """Coefficients of the monic characteristic cubic at one wavenumber."""

    p0: float
    p1: float
    p2: float
    theta: float


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of a spectral radius scan over the wavenumber interval."""

    max_spectral_radius: float
    worst_theta: float
    rh_min_margin: float
    stable: bool
    theta_samples: int

    def to_json_dict(self) -> dict:
        return {
            "max_spectral_radius": float(self.max_spectral_radius),
            "worst_theta": float(self.worst_theta),
            "rh_min_margin": float(self.rh_min_margin),
            "stable": bool(self.stable),
            "theta_samples": int(self.theta_samples),
        }


def _check_rates(omega0: float, s1: float, s2: float) -> None:
    if not 0.0 < omega0 < 1.0:
        raise DomainError(f"omega0 must lie in (0, 1), got {omega0}")
    if not 0.0 < s1 < 2.0:
        raise DomainError(f"s1 must lie in (0, 2), got {s1}")
    if not 0.0 < s2 < 2.0:
        raise DomainError(f"s2 must lie in (0, 2), got {s2}")


def _check_theta(theta: float) -> None:
    if not -np.pi <= theta <= np.pi:
        raise DomainError(f"theta must lie in [-pi, pi], got {theta}")


def char_poly(omega0: float, s1: float, s2: float, theta: float) -> CharPoly:
    """Characteristic cubic of the amplification problem at wavenumber theta."""
    _check_rates(omega0, s1, s2)
    _check_theta(theta)
    c = np.cos(theta)
    p0 = (s1 - 1.0) * (1.0 - s2)
    p1 = ((s1 - 1.0) * (s2 * omega0 - 1.0)
          + ((s1 - 2.0) * (s2 - 1.0) + s2 * omega0 * (1.0 - s1)) * c)
    p2 = s2 - s2 * omega0 - 1.0 + (s2 * omega0 + s1 - 2.0) * c
    return CharPoly(p0=float(p0), p1=float(p1), p2=float(p2),
                    theta=float(theta))


def population_amplification(omega0: float, s1: float, s2: float,
                             theta: float) -> np.ndarray:
    """Amplification matrix of the mesoscopic update for one Fourier mode.

    Population order (f_minus, f_zero, f_plus).  Columns sum to one at
    theta = 0 (conservation), so (1, 1, 1) is a left eigenvector with
    eigenvalue one there.
    """
    _check_rates(omega0, s1, s2)
    _check_theta(theta)
    a = 1.0 - s1 / 2.0 - omega0 * s2 / 2.0
    b = s2 / 2.0 - omega0 * s2 / 2.0
    d = s1 / 2.0 - omega0 * s2 / 2.0
    up = np.exp(1j * theta)
    dn = np.exp(-1j * theta)
    return np.array([
        [a * up, b * up, d * up],
        [omega0 * s2, omega0 * s2 - s2 + 1.0, omega0 * s2],
        [d * dn, b * dn, a * dn],
    ])


def companion_amplification(coeffs: FdCoefficients,
                            theta: float) -> np.ndarray:
    """Companion amplification matrix of the four-level scheme."""
    _check_theta(theta)
    c = np.cos(theta)
    return np.array([
        [2.0 * coeffs.side_n * c + coeffs.center_n,
         2.0 * coeffs.side_nm1 * c + coeffs.center_nm1,
         coeffs.center_nm2],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
    ])


def _companion_stack(p0, p1, p2) -> np.ndarray:
    # Stacked top-row companion matrices for a batch of monic cubics.
    n = p1.shape[0]
    comp = np.zeros((n, 3, 3))
    comp[:, 0, 0] = -p2
    comp[:, 0, 1] = -p1
    comp[:, 0, 2] = -p0
    comp[:, 1, 0] = 1.0
    comp[:, 2, 1] = 1.0
    return comp


def cubic_roots(p: CharPoly) -> np.ndarray:
    """Roots of the characteristic cubic via companion-matrix eigenvalues."""
    comp = _companion_stack(np.array([p.p0]), np.array([p.p1]),
                            np.array([p.p2]))
    return np.linalg.eigvals(comp[0])


def routh_hurwitz_values(p: CharPoly) -> tuple[float, float, float, float, float]:
    """The five sign conditions for all roots inside the closed unit disk.

    Order: (1 - p0 + p1 - p2, 1 - p0, 1 + p0, 1 + p0 + p1 + p2,
    1 - p1 + p0*p2 - p0**2).  All strictly positive away from theta = 0
    means strict stability; the fourth value is identically zero at
    theta = 0 (conserved mode).
    """
    return (
        1.0 - p.p0 + p.p1 - p.p2,
        1.0 - p.p0,
        1.0 + p.p0,
        1.0 + p.p0 + p.p1 + p.p2,
        1.0 - p.p1 + p.p0 * p.p2 - p.p0 ** 2,
    )


def margin_decomposition(omega0: float, s1: float,
                         s2: float) -> tuple[float, float]:
    """Affine split of the fifth Routh-Hurwitz value in (1 - cos(theta)).

    Returns (slope, constant) with
    1 - p1 + p0*p2 - p0**2 = slope*(1 - cos(theta)) + constant;
    the constant s1*s2*(s1 + s2 - s1*s2) is positive for admissible rates.
    """
    _check_rates(omega0, s1, s2)
    slope = (s1 * (1.0 - s2) * (2.0 - s1)
             + omega0 * s2 * (1.0 - s1) * (2.0 - s2))
    constant = s1 * s2 * (s1 + s2 - s1 * s2)
    return slope, constant


def _char_coeff_grid(omega0: float, s1: float, s2: float, cos_t: np.ndarray):
    p0 = np.full_like(cos_t, (s1 - 1.0) * (1.0 - s2))
    p1 = ((s1 - 1.0) * (s2 * omega0 - 1.0)
          + ((s1 - 2.0) * (s2 - 1.0) + s2 * omega0 * (1.0 - s1)) * cos_t)
    p2 = s2 - s2 * omega0 - 1.0 + (s2 * omega0 + s1 - 2.0) * cos_t
    return p0, p1, p2


def _rh_value_grid(p0, p1, p2):
    return (
        1.0 - p0 + p1 - p2,
        1.0 - p0,
        1.0 + p0,
        1.0 + p0 + p1 + p2,
        1.0 - p1 + p0 * p2 - p0 ** 2,
    )


def spectral_radius_scan(omega0: float, s1: float, s2: float,
                         n_theta: int = 720) -> StabilityReport:
    """Scan the characteristic root moduli over theta in [-pi, pi].

    Uses n_theta + 1 equispaced samples including both endpoints.  The
    reported Routh-Hurwitz margin is the minimum of the five condition
    values over the grid, excluding the fourth condition where
    cos(theta) = 1 (it vanishes there identically).
    """
    _check_rates(omega0, s1, s2)
    if n_theta < 64:
        raise DomainError(f"n_theta must be at least 64, got {n_theta}")
    thetas = -np.pi + 2.0 * np.pi * np.arange(n_theta + 1) / n_theta
    cos_t = np.cos(thetas)
    p0, p1, p2 = _char_coeff_grid(omega0, s1, s2, cos_t)
    radii = np.abs(np.linalg.eigvals(_companion_stack(p0, p1, p2))).max(axis=1)
    worst = int(np.argmax(radii))
    rh = _rh_value_grid(p0, p1, p2)
    margin = np.inf
    at_one = cos_t > _COS_ONE
    for idx, values in enumerate(rh):
        if idx == 3:
            masked = values[~at_one]
            if masked.size:
                margin = min(margin, float(masked.min()))
        else:
            margin = min(margin, float(values.min()))
    max_radius = float(radii[worst])
    return StabilityReport(
        max_spectral_radius=max_radius,
        worst_theta=float(thetas[worst]),
        rh_min_margin=float(margin),
        stable=bool(max_radius <= 1.0 + _RADIUS_SLACK),
        theta_samples=int(n_theta + 1),
    )
