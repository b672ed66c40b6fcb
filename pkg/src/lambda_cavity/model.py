"""Physical parameters of a Lambda-type atom in a single-mode cavity.

Level |1> is the upper state; it couples to |2> and |3> through the cavity
mode with strengths ``lambda1`` and ``lambda2`` and detunings ``delta1`` and
``delta2``.  An optional classical motion of the atom through the standing
wave multiplies both couplings by ``sin(p * lambda * t)``.

Everything here is a pure function of its arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammainc, gammaln

TAIL_TOLERANCE = 1e-12


class TruncationError(ValueError):
    """The Fock cutoff leaves more than ``TAIL_TOLERANCE`` of photon-number mass."""


def poisson_tail(nbar: float, n_max: int) -> float:
    """Probability that a Poisson(nbar) photon number exceeds ``n_max``."""
    if nbar == 0:
        return 0.0
    # P(N <= k) = Q(k + 1, nbar), so the tail is the regularized lower gamma.
    return float(gammainc(n_max + 1, nbar))


def default_n_max(nbar: float) -> int:
    """Smallest cutoff >= ceil(nbar + 10 sqrt(nbar + 1)) meeting the tail bound."""
    n_max = max(1, math.ceil(nbar + 10.0 * math.sqrt(nbar + 1.0)))
    while poisson_tail(nbar, n_max) > TAIL_TOLERANCE:
        n_max += 1
    return n_max


def required_n_max(nbar: float) -> int:
    n_max = 1
    while poisson_tail(nbar, n_max) > TAIL_TOLERANCE:
        n_max += 1
    return n_max


@dataclass(frozen=True)
class ModelConfig:
    """All physical parameters of one run.

    ``p`` is the number of half wavelengths of the mode inside the cavity; it
    is ``None`` for an atom at rest.  ``n_max`` defaults to a cutoff that keeps
    the discarded coherent-state mass below ``TAIL_TOLERANCE``.
    """

    lambda1: float = 1.0
    lambda2: float = 1.0
    delta1: float = 0.0
    delta2: float = 0.0
    p: int | None = None
    nbar: float = 25.0
    alpha_phase: float = 0.0
    n_max: int | None = field(default=None)

    def __post_init__(self):
        if not (self.lambda1 > 0 and self.lambda2 > 0):
            raise ValueError("coupling constants must be positive")
        if not self.nbar >= 0:
            raise ValueError(f"nbar must be >= 0, got {self.nbar}")
        if self.p is not None:
            if int(self.p) != self.p or self.p < 1:
                raise ValueError(f"motion index p must be a positive integer, got {self.p}")
            # One velocity serves both transitions, so the couplings must agree.
            if self.lambda1 != self.lambda2:
                raise ValueError("atomic motion requires lambda1 == lambda2")
        if self.n_max is None:
            object.__setattr__(self, "n_max", default_n_max(self.nbar))
        elif self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        check_truncation(self.nbar, self.n_max)

    @property
    def moving(self) -> bool:
        return self.p is not None

    @property
    def motion_rate(self) -> float:
        """Angular frequency ``p * lambda`` of the mode-shape factor."""
        return self.p * self.lambda1 if self.p is not None else 0.0


def check_truncation(nbar: float, n_max: int) -> None:
    tail = poisson_tail(nbar, n_max)
    if tail > TAIL_TOLERANCE:
        raise TruncationError(
            f"n_max={n_max} discards photon-number mass {tail:.3e} > {TAIL_TOLERANCE:g} "
            f"for nbar={nbar}; use n_max >= {required_n_max(nbar)}"
        )


def coherent_weights(nbar: float, alpha_phase: float = 0.0, n_max: int | None = None) -> np.ndarray:
    """Coherent-state amplitudes q_n = exp(-nbar/2) alpha^n / sqrt(n!), n = 0..n_max.

    Evaluated in log space so large ``n`` does not overflow.  The result is
    real for ``alpha_phase == 0`` and complex otherwise.

    Raises TruncationError if ``n_max`` drops more than 1e-12 of the mass.
    """
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    if n_max is None:
        n_max = default_n_max(nbar)
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    check_truncation(nbar, n_max)

    n = np.arange(n_max + 1)
    if nbar == 0:
        mag = (n == 0).astype(float)
    else:
        log_mag = -0.5 * nbar + 0.5 * n * math.log(nbar) - 0.5 * gammaln(n + 1)
        mag = np.exp(log_mag)
    if alpha_phase == 0:
        return mag
    return mag * np.exp(1j * alpha_phase * n)


def mode_shape(t, cfg: ModelConfig):
    """Mode-shape factor g: 1 at rest, sin(p * lambda * t) for a moving atom."""
    t = np.asarray(t, dtype=float)
    if not cfg.moving:
        return np.ones_like(t)[()]
    return np.sin(cfg.motion_rate * t)[()]


def coupling(n, s: int, t, cfg: ModelConfig):
    """Sector coupling f_s(n, t) = lambda_s * g(t) * sqrt(n + 1)."""
    if s == 1:
        lam = cfg.lambda1
    elif s == 2:
        lam = cfg.lambda2
    else:
        raise ValueError(f"transition index must be 1 or 2, got {s}")
    return lam * mode_shape(t, cfg) * np.sqrt(np.asarray(n, dtype=float) + 1.0)


def scaled_time(t, cfg: ModelConfig):
    """Plot abscissa: lambda * t at rest, (1 - cos(p lambda t)) / p in motion."""
    t = np.asarray(t, dtype=float)
    if not cfg.moving:
        return (cfg.lambda1 * t)[()]
    return (2.0 * np.sin(0.5 * cfg.motion_rate * t) ** 2 / cfg.p)[()]


def motion_phase(t, cfg: ModelConfig):
    """Integral of the mode-shape factor from 0 to t.

    Equal to t at rest and (1 - cos(p lambda t)) / (p lambda) in motion.  On
    resonance the sector Hamiltonian is g(t) times a constant matrix, so the
    stationary solution evaluated at this time is exact.
    """
    t = np.asarray(t, dtype=float)
    if not cfg.moving:
        return t[()]
    w = cfg.motion_rate
    return (2.0 * np.sin(0.5 * w * t) ** 2 / w)[()]
