"""Sector amplitudes psi_j(n, t) for the Lambda atom, analytic and numeric.

Each photon sector n spans {|1, n>, |2, n+1>, |3, n+1>} and evolves under

    i d/dt psi = [[0, F1, F2], [F1*, 0, 0], [F2*, 0, 0]] psi,
    F_s = f_s(n, t) exp(-i Delta_s t),

from psi(0) = (1, 0, 0).  Three closed forms cover a stationary atom (and a
moving one on resonance); everything else goes through the adaptive
integrator, which also serves as the reference the closed forms are tested
against.
"""
from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

from . import _dop853
from .model import ModelConfig, coupling, motion_phase

RTOL = 1e-10
ATOL = 1e-12
DEGENERACY_THRESHOLD = 1e-8


class SolverChoice(str, enum.Enum):
    RESONANT = "Resonant"
    EQUAL_DETUNING = "EqualDetuning"
    GENERAL_ANALYTIC = "GeneralAnalytic"
    NUMERIC_ODE = "NumericODE"


class IntegrationError(RuntimeError):
    pass


class CubicError(ValueError):
    pass


class CubicRealRoots(NamedTuple):
    mu1: float
    mu2: float
    mu3: float
    discriminant: float

    @property
    def roots(self) -> np.ndarray:
        return np.array([self.mu1, self.mu2, self.mu3])


def _static_couplings(n, cfg: ModelConfig):
    """f_1, f_2 for the given sector(s) with the mode-shape factor set to 1."""
    root = np.sqrt(np.asarray(n, dtype=float) + 1.0)
    return cfg.lambda1 * root, cfg.lambda2 * root


def ode_rhs(t: float, psi, n: int, cfg: ModelConfig) -> np.ndarray:
    """Time derivative -i M(t) psi of one sector's amplitudes."""
    psi = np.asarray(psi, dtype=complex)
    F1 = coupling(n, 1, t, cfg) * np.exp(-1j * cfg.delta1 * t)
    F2 = coupling(n, 2, t, cfg) * np.exp(-1j * cfg.delta2 * t)
    return -1j * np.array([
        F1 * psi[1] + F2 * psi[2],
        np.conj(F1) * psi[0],
        np.conj(F2) * psi[0],
    ])


def _check_grid(t_grid) -> np.ndarray:
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a non-empty 1-d array")
    if t_grid[0] < 0 or np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be ascending and start at t >= 0")
    return t_grid


def integrate_sector(n: int, cfg: ModelConfig, t_grid, rtol: float = RTOL, atol: float = ATOL) -> np.ndarray:
    """Numerically integrate sector ``n`` and sample it on ``t_grid``.

    Adaptive Dormand-Prince 8(5,3) with dense output.  The norm is not
    renormalized, so its drift measures the integration error.

    Returns an array of shape (len(t_grid), 3).
    """
    t_grid = _check_grid(t_grid)
    f1, f2 = _static_couplings(n, cfg)
    out, status, steps = _dop853.integrate(
        f1, f2, cfg.delta1, cfg.delta2, cfg.motion_rate, t_grid, rtol=rtol, atol=atol)
    if status != _dop853.OK:
        raise IntegrationError(
            f"step size underflow in sector n={n} after {steps} steps "
            f"(delta1={cfg.delta1}, delta2={cfg.delta2}, p={cfg.p})")
    return out


def _stack(psi1, psi2, psi3) -> np.ndarray:
    return np.stack(np.broadcast_arrays(psi1, psi2, psi3), axis=-1).astype(complex)


def solve_resonant(n, cfg: ModelConfig, t) -> np.ndarray:
    """Closed form for Delta_1 = Delta_2 = 0.

    With delta = sqrt(f1^2 + f2^2):

        psi1 = cos(delta T),  psi_{2,3} = -i f_{1,2} sin(delta T) / delta,

    where T = t at rest and T = (1 - cos(p lambda t)) / (p lambda) in motion.
    ``n`` and ``t`` broadcast; the result has a trailing axis of length 3.
    """
    if cfg.delta1 != 0 or cfg.delta2 != 0:
        raise ValueError("solve_resonant requires delta1 == delta2 == 0")
    f1, f2 = _static_couplings(n, cfg)
    delta = np.hypot(f1, f2)
    theta = delta * motion_phase(t, cfg)
    s = np.sin(theta) / delta
    return _stack(np.cos(theta), -1j * f1 * s, -1j * f2 * s)


def solve_equal_detuning(n, cfg: ModelConfig, t) -> np.ndarray:
    """Closed form for Delta_1 = Delta_2 = Delta at rest.

    Substituting phi_{2,3} = exp(-i Delta t) psi_{2,3} gives the constant
    generator [[0, f1, f2], [f1, Delta, 0], [f2, 0, Delta]].  The combination
    (f1 phi2 + f2 phi3) / delta is the only one coupled to level 1, which
    leaves a two-level problem with splitting eta = sqrt(Delta^2/4 + delta^2):

        psi1 = exp(-i Delta t / 2) [cos(eta t) + i Delta / (2 eta) sin(eta t)]
        psi_{2,3} = -i f_{1,2} / eta * exp(+i Delta t / 2) sin(eta t)
    """
    if cfg.delta1 != cfg.delta2:
        raise ValueError("solve_equal_detuning requires delta1 == delta2")
    if cfg.moving:
        raise ValueError("solve_equal_detuning requires a stationary atom")
    t = np.asarray(t, dtype=float)
    f1, f2 = _static_couplings(n, cfg)
    Delta = cfg.delta1
    eta = np.sqrt(0.25 * Delta ** 2 + f1 ** 2 + f2 ** 2)
    sin_t = np.sin(eta * t)
    half = np.exp(0.5j * Delta * t)
    psi1 = np.conj(half) * (np.cos(eta * t) + 0.5j * Delta / eta * sin_t)
    side = -1j * half * sin_t / eta
    return _stack(psi1, f1 * side, f2 * side)


def cubic_roots_trig(x1: float, x2: float, x3: float) -> CubicRealRoots:
    """Real roots of mu^3 + x1 mu^2 + x2 mu + x3 by the trigonometric method.

    mu_j = -x1/3 + (2/3) sqrt(x1^2 - 3 x2) cos(xi + 2 pi (j - 1) / 3) with
    xi = arccos((9 x1 x2 - 2 x1^3 - 27 x3) / (2 (x1^2 - 3 x2)^(3/2))) / 3.

    Roots come back in descending order.  A cosine argument slightly outside
    [-1, 1] (rounding) is clamped; a clearly complex pair raises CubicError.
    """
    disc = 18 * x1 * x2 * x3 - 4 * x1 ** 3 * x3 + x1 ** 2 * x2 ** 2 - 4 * x2 ** 3 - 27 * x3 ** 2
    spread = x1 * x1 - 3.0 * x2
    scale = max(1.0, abs(x1), abs(x2), abs(x3))
    if spread < 0:
        if spread < -1e-12 * scale ** 2:
            raise CubicError(f"cubic has complex roots (x1^2 - 3 x2 = {spread:.3e}, discriminant {disc:.3e})")
        spread = 0.0
    if spread == 0.0:
        mu = np.full(3, -x1 / 3.0)
    else:
        arg = (9 * x1 * x2 - 2 * x1 ** 3 - 27 * x3) / (2.0 * spread ** 1.5)
        if abs(arg) > 1.0 + 1e-9:
            raise CubicError(
                f"cubic has complex roots (cosine argument {arg:.12g}, discriminant {disc:.3e})")
        xi = math.acos(min(1.0, max(-1.0, arg))) / 3.0
        amp = 2.0 / 3.0 * math.sqrt(spread)
        mu = -x1 / 3.0 + amp * np.cos(xi + 2.0 * np.pi * np.arange(3) / 3.0)
        mu = np.array([_polish(m, x1, x2, x3) for m in mu])
    mu = np.sort(mu)[::-1]
    return CubicRealRoots(float(mu[0]), float(mu[1]), float(mu[2]), float(disc))


def _polish(mu: float, x1: float, x2: float, x3: float, iterations: int = 3) -> float:
    # Newton steps, kept only while the residual shrinks; the arccos loses
    # digits when two roots are close.
    res = ((mu + x1) * mu + x2) * mu + x3
    for _ in range(iterations):
        slope = (3.0 * mu + 2.0 * x1) * mu + x2
        if slope == 0.0 or res == 0.0:
            break
        cand = mu - res / slope
        cand_res = ((cand + x1) * cand + x2) * cand + x3
        if abs(cand_res) >= abs(res):
            break
        mu, res = cand, cand_res
    return mu


def general_cubic_coefficients(f1: float, f2: float, delta1: float, delta2: float):
    """Coefficients (x1, x2, x3) of the frequency cubic for unequal detunings."""
    x1 = delta1 - 2.0 * delta2
    x2 = delta2 * (delta2 - delta1) - f1 ** 2 - f2 ** 2
    x3 = f2 ** 2 * (delta2 - delta1)
    return x1, x2, x3


def general_weights(mu: np.ndarray, f2: float, delta2: float) -> np.ndarray:
    """C_j = f2 (mu_k + mu_l - Delta_2) / ((mu_j - mu_k)(mu_j - mu_l)).

    The Lagrange solution of sum C = 0, sum C mu = -f2,
    sum C mu^2 = -Delta_2 f2, i.e. psi(0) = (1, 0, 0).
    """
    C = np.empty(3)
    for j in range(3):
        k, l = (j + 1) % 3, (j + 2) % 3
        C[j] = f2 * (mu[k] + mu[l] - delta2) / ((mu[j] - mu[k]) * (mu[j] - mu[l]))
    return C


def solve_general(n: int, cfg: ModelConfig, t) -> np.ndarray:
    """Closed form for arbitrary detunings, stationary atom.

    With psi3 = sum_j C_j exp(i mu_j t), the third and first equations give

        psi1 = -(1/f2) sum_j C_j mu_j exp(i (mu_j - Delta_2) t)
        psi2 = (1/(f1 f2)) sum_j C_j (mu_j (mu_j - Delta_2) - f2^2)
                                  exp(i (mu_j - Delta_2 + Delta_1) t)

    and the second equation forces each mu_j to be a root of
    mu^3 + x1 mu^2 + x2 mu + x3 with x1 = Delta_1 - 2 Delta_2,
    x2 = Delta_2 (Delta_2 - Delta_1) - f1^2 - f2^2, x3 = f2^2 (Delta_2 - Delta_1).

    Nearly coincident roots fall back to ``integrate_sector``.
    """
    if cfg.moving:
        raise ValueError("solve_general requires a stationary atom")
    t = np.asarray(t, dtype=float)
    f1, f2 = _static_couplings(n, cfg)
    d1, d2 = cfg.delta1, cfg.delta2
    roots = cubic_roots_trig(*general_cubic_coefficients(f1, f2, d1, d2))
    mu = roots.roots
    if _degenerate(mu):
        return integrate_sector(n, cfg, np.atleast_1d(t)).reshape(t.shape + (3,))
    C = general_weights(mu, f2, d2)
    tt = t[..., None]
    e3 = np.exp(1j * mu * tt)
    psi3 = e3 @ C
    psi1 = -(np.exp(1j * (mu - d2) * tt) @ (C * mu)) / f2
    psi2 = (np.exp(1j * (mu - d2 + d1) * tt) @ (C * (mu * (mu - d2) - f2 ** 2))) / (f1 * f2)
    return _stack(psi1, psi2, psi3)


def _degenerate(mu: np.ndarray) -> bool:
    gap = min(abs(mu[0] - mu[1]), abs(mu[1] - mu[2]), abs(mu[0] - mu[2]))
    return gap < DEGENERACY_THRESHOLD * max(np.abs(mu).max(), np.finfo(float).tiny)


def choose_solver(cfg: ModelConfig) -> SolverChoice:
    resonant = cfg.delta1 == 0 and cfg.delta2 == 0
    if resonant:
        return SolverChoice.RESONANT
    if cfg.moving:
        return SolverChoice.NUMERIC_ODE
    if cfg.delta1 == cfg.delta2:
        return SolverChoice.EQUAL_DETUNING
    return SolverChoice.GENERAL_ANALYTIC


def solve_sector(n: int, cfg: ModelConfig, t_grid) -> tuple[np.ndarray, SolverChoice]:
    """Amplitudes of sector ``n`` on ``t_grid`` and the path that produced them.

    The path is NUMERIC_ODE when the general closed form hit a degenerate
    root and fell back to the integrator.
    """
    t_grid = _check_grid(t_grid)
    choice = choose_solver(cfg)
    if choice is SolverChoice.RESONANT:
        return solve_resonant(n, cfg, t_grid), choice
    if choice is SolverChoice.EQUAL_DETUNING:
        return solve_equal_detuning(n, cfg, t_grid), choice
    if choice is SolverChoice.GENERAL_ANALYTIC:
        f1, f2 = _static_couplings(n, cfg)
        mu = cubic_roots_trig(*general_cubic_coefficients(f1, f2, cfg.delta1, cfg.delta2)).roots
        if _degenerate(mu):
            return integrate_sector(n, cfg, t_grid), SolverChoice.NUMERIC_ODE
        return solve_general(n, cfg, t_grid), choice
    return integrate_sector(n, cfg, t_grid), choice


def solve_all(cfg: ModelConfig, t_grid) -> tuple[np.ndarray, list[SolverChoice]]:
    """All sectors n = 0..n_max; amplitudes have shape (n_max + 1, len(t_grid), 3)."""
    t_grid = _check_grid(t_grid)
    choice = choose_solver(cfg)
    n = np.arange(cfg.n_max + 1)
    if choice is SolverChoice.RESONANT:
        return solve_resonant(n[:, None], cfg, t_grid[None, :]), [choice] * n.size
    if choice is SolverChoice.EQUAL_DETUNING:
        return solve_equal_detuning(n[:, None], cfg, t_grid[None, :]), [choice] * n.size
    psi = np.empty((n.size, t_grid.size, 3), dtype=complex)
    paths = []
    for k in n:
        psi[k], path = solve_sector(int(k), cfg, t_grid)
        paths.append(path)
    return psi, paths
