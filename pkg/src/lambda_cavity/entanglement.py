"""Reduced atomic density matrix, its spectrum, and the von Neumann entropy."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .model import ModelConfig, coherent_weights, scaled_time
from .solvers import solve_all

log = logging.getLogger(__name__)

EIGENVALUE_SLACK = 1e-6
CLAMP_REPORT = 1e-9
MIXED_RADIUS = 1e-12


class InvalidDensityError(ValueError):
    pass


@dataclass(frozen=True)
class JointState:
    """Atom-field state at one time: sector amplitudes psi[n, j] and weights q[n]."""

    t: float
    psi: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        if self.psi.shape != (self.q.shape[0], 3):
            raise ValueError(f"psi shape {self.psi.shape} does not match {self.q.shape[0]} sectors")

    def norm(self) -> float:
        w = np.abs(self.q) ** 2
        return float(np.sum(w * np.sum(np.abs(self.psi) ** 2, axis=-1)) / np.sum(w))


@dataclass(frozen=True)
class TimeSeries:
    t: np.ndarray
    scaled_time: np.ndarray
    entropy: np.ndarray
    rho11: np.ndarray
    rho22: np.ndarray
    rho33: np.ndarray
    solver_path: str


def reduced_density_series(psi: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Partial trace over the field for amplitudes of shape (n_sectors, ..., 3).

    Level 1 of sector n carries |n> photons and levels 2, 3 carry |n+1>, so
    rho_23 pairs amplitudes within a sector while rho_12 and rho_13 pair
    level 1 of sector n+1 with levels 2, 3 of sector n.  The result is
    divided by its trace to absorb the truncated tail.
    """
    psi = np.asarray(psi)
    q = np.asarray(q)
    qb = q.reshape(q.shape + (1,) * (psi.ndim - 2))
    amp = qb[..., None] * psi  # q_n psi_j(n)
    lead = amp[1:, ..., 0]
    rho = np.empty(psi.shape[1:-1] + (3, 3), dtype=complex)
    for j in range(3):
        for k in range(j, 3):
            rho[..., j, k] = np.sum(amp[..., j] * np.conj(amp[..., k]), axis=0)
    rho[..., 0, 1] = np.sum(lead * np.conj(amp[:-1, ..., 1]), axis=0)
    rho[..., 0, 2] = np.sum(lead * np.conj(amp[:-1, ..., 2]), axis=0)
    for j in range(3):
        rho[..., j, j] = rho[..., j, j].real
        for k in range(j + 1, 3):
            rho[..., k, j] = np.conj(rho[..., j, k])
    trace = np.trace(rho, axis1=-2, axis2=-1).real
    return rho / trace[..., None, None]


def reduced_density(state: JointState) -> np.ndarray:
    """3x3 atomic density matrix of a single joint state."""
    return reduced_density_series(state.psi, state.q)


def cubic_coefficients(rho: np.ndarray):
    """(A, B, C) of det(xi - rho) = xi^3 + A xi^2 + B xi + C, from matrix elements."""
    r = rho
    A = -(r[..., 0, 0] + r[..., 1, 1] + r[..., 2, 2])
    B = (r[..., 0, 0] * r[..., 1, 1] + r[..., 0, 0] * r[..., 2, 2] + r[..., 1, 1] * r[..., 2, 2]
         - r[..., 0, 2] * r[..., 2, 0] - r[..., 1, 2] * r[..., 2, 1] - r[..., 0, 1] * r[..., 1, 0])
    C = (r[..., 0, 2] * r[..., 2, 0] * r[..., 1, 1] + r[..., 2, 1] * r[..., 1, 2] * r[..., 0, 0]
         + r[..., 0, 1] * r[..., 1, 0] * r[..., 2, 2] - r[..., 0, 0] * r[..., 1, 1] * r[..., 2, 2]
         - r[..., 0, 1] * r[..., 1, 2] * r[..., 2, 0] - r[..., 2, 1] * r[..., 1, 0] * r[..., 0, 2])
    return A.real, B.real, C.real


_ROW_TRIPLES = np.array(list(itertools.combinations(range(9), 3)))


def _discriminant(D: np.ndarray) -> np.ndarray:
    """prod_{i<j} (xi_i - xi_j)^2 as a sum of squares.

    Cauchy-Binet on the 9x3 matrix [vec 1, vec D, vec D^2], whose Gram
    matrix is the power-sum Hankel matrix: every term is non-negative, so a
    nearly repeated eigenvalue does not cost half the significant digits.
    """
    batch = D.shape[:-2]
    eye = np.broadcast_to(np.eye(3), D.shape).reshape(batch + (9,))
    K = np.stack([eye, D.reshape(batch + (9,)), (D @ D).reshape(batch + (9,))], axis=-1)
    minors = np.linalg.det(K[..., _ROW_TRIPLES, :])
    return np.sum(np.abs(minors) ** 2, axis=-1)


def entropy_eigenvalues(rho: np.ndarray) -> np.ndarray:
    """Eigenvalues (xi1 <= xi2 <= xi3) of unit-trace 3x3 density matrices.

    Trigonometric solution of xi^3 - xi^2 + B xi + C = 0:

        xi1 = 1/3 - 2R cos(eta/3)
        xi2 = 1/3 + 2R cos(eta/3 + pi/3)
        xi3 = 1/3 + 2R cos(eta/3 - pi/3),   cos(eta) = q / R^3,

    with R = sqrt(1/9 - B/3) and q = -1/27 + B/6 + C/2.  Both are evaluated
    on the traceless part D = rho - 1/3, where R^2 = tr(D^2)/6 and
    q = -det(D)/2, and eta is taken from atan2 with
    R^3 sin(eta) = sqrt(disc / 108).  Plain arccos loses ~8 digits next to
    a pure state, where two eigenvalues meet at zero.

    Accepts any leading batch shape.
    """
    rho = np.asarray(rho)
    D = rho - np.eye(3) * (np.trace(rho, axis1=-2, axis2=-1).real / 3.0)[..., None, None]
    R = np.sqrt(np.sum(np.abs(D) ** 2, axis=(-2, -1)) / 6.0)
    q = -0.5 * np.linalg.det(D).real
    eta = np.arctan2(np.sqrt(_discriminant(D) / 108.0), q)
    third = eta / 3.0
    xi = np.stack([
        1.0 / 3.0 - 2.0 * R * np.cos(third),
        1.0 / 3.0 + 2.0 * R * np.cos(third + np.pi / 3.0),
        1.0 / 3.0 + 2.0 * R * np.cos(third - np.pi / 3.0),
    ], axis=-1)
    xi = np.where((R < MIXED_RADIUS)[..., None], 1.0 / 3.0, xi)
    lo, hi = xi.min(), xi.max()
    if lo < -EIGENVALUE_SLACK or hi > 1.0 + EIGENVALUE_SLACK or not np.all(np.isfinite(xi)):
        raise InvalidDensityError(
            f"density-matrix eigenvalue outside [0, 1]: min {lo:.3e}, max {hi:.6f}")
    return xi


def von_neumann_entropy(xi: np.ndarray) -> np.ndarray:
    """S = -sum xi ln xi over the last axis, with 0 ln 0 = 0."""
    xi = np.asarray(xi, dtype=float)
    clamped = np.clip(xi, 0.0, 1.0)
    excess = np.max(np.abs(clamped - xi)) if xi.size else 0.0
    if excess > CLAMP_REPORT:
        log.warning("clamped eigenvalues by up to %.3e before taking the entropy", excess)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(clamped > 0, -clamped * np.log(clamped), 0.0)
    return terms.sum(axis=-1)[()]


def populations(rho: np.ndarray):
    """Real diagonal (rho11, rho22, rho33)."""
    d = np.real(np.diagonal(rho, axis1=-2, axis2=-1))
    return d[..., 0], d[..., 1], d[..., 2]


def path_label(paths) -> str:
    names = sorted({p.value for p in paths})
    return "+".join(names)


def entropy_series(cfg: ModelConfig, t_grid) -> TimeSeries:
    """Entropy and populations sampled on ``t_grid`` for the given model."""
    t_grid = np.asarray(t_grid, dtype=float)
    psi, paths = solve_all(cfg, t_grid)
    q = coherent_weights(cfg.nbar, cfg.alpha_phase, cfg.n_max)
    rho = reduced_density_series(psi, q)
    S = von_neumann_entropy(entropy_eigenvalues(rho))
    r11, r22, r33 = populations(rho)
    return TimeSeries(
        t=t_grid,
        scaled_time=np.asarray(scaled_time(t_grid, cfg), dtype=float),
        entropy=np.asarray(S, dtype=float),
        rho11=r11,
        rho22=r22,
        rho33=r33,
        solver_path=path_label(paths),
    )
