import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambda_cavity.model import (
    ModelConfig,
    TruncationError,
    coherent_weights,
    coupling,
    default_n_max,
    mode_shape,
    motion_phase,
    scaled_time,
)

# e^{-12.5} 25^{12.5} / sqrt(25!) evaluated with mpmath at 40 digits
Q25_NBAR25 = 0.2819981408946971161737290251855632778433


def test_vacuum_weights():
    q = coherent_weights(0.0, 0.0, 5)
    assert q[0] == 1.0
    assert np.all(q[1:] == 0.0)


def test_weight_against_arbitrary_precision():
    q = coherent_weights(25.0, 0.0, 80)
    assert q[25] == pytest.approx(Q25_NBAR25, rel=1e-13)


def test_weights_complete_nbar1():
    q = coherent_weights(1.0, 0.0, 40)
    assert abs(np.sum(np.abs(q) ** 2) - 1.0) < 1e-12


def test_phase_rotates_weights():
    q0 = coherent_weights(4.0, 0.0, 40)
    q = coherent_weights(4.0, 0.7, 40)
    np.testing.assert_allclose(np.abs(q), q0, rtol=1e-14)
    np.testing.assert_allclose(q[3], q0[3] * np.exp(2.1j), rtol=1e-14)


def test_truncation_rejected_with_required_cutoff():
    with pytest.raises(TruncationError, match=r"n_max >= \d+"):
        coherent_weights(25.0, 0.0, 40)


def test_default_cutoff():
    n_max = default_n_max(25.0)
    assert n_max >= math.ceil(25 + 10 * math.sqrt(26))
    q = coherent_weights(25.0, 0.0, n_max)
    assert 1 - 1e-12 <= np.sum(q ** 2) <= 1 + 1e-15


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 200.0))
def test_weight_mass_invariant(nbar):
    q = coherent_weights(nbar)
    mass = np.sum(np.abs(q) ** 2)
    assert 1 - 1e-12 <= mass <= 1 + 1e-12


def test_config_validation():
    with pytest.raises(ValueError):
        ModelConfig(lambda1=0.0)
    with pytest.raises(ValueError):
        ModelConfig(nbar=-1.0)
    with pytest.raises(ValueError):
        ModelConfig(p=0)
    with pytest.raises(ValueError):
        ModelConfig(p=1, lambda1=1.0, lambda2=2.0)
    with pytest.raises(TruncationError):
        ModelConfig(nbar=25.0, n_max=30)
    assert ModelConfig(lambda1=1.0, lambda2=2.0).n_max >= 1


def test_mode_shape_examples():
    assert mode_shape(7.3, ModelConfig()) == 1.0
    assert mode_shape(np.pi / 2, ModelConfig(p=1)) == pytest.approx(1.0)
    assert mode_shape(np.pi / 3, ModelConfig(p=3)) == pytest.approx(0.0, abs=1e-15)


def test_coupling_examples():
    assert coupling(0, 1, 0.4, ModelConfig()) == 1.0
    assert coupling(24, 1, 0.4, ModelConfig()) == 5.0
    cfg = ModelConfig(p=1, lambda1=1.3, lambda2=1.3)
    assert coupling(0, 2, np.pi / 2 / 1.3, cfg) == pytest.approx(1.3)
    with pytest.raises(ValueError):
        coupling(0, 3, 0.0, cfg)


@pytest.mark.parametrize("cfg", [ModelConfig(), ModelConfig(p=2), ModelConfig(lambda1=0.5, lambda2=2.0)])
def test_coupling_sqrt_scaling(cfg):
    t = 0.37
    for s in (1, 2):
        base = coupling(0, s, t, cfg)
        for n in (1, 7, 60):
            assert coupling(n, s, t, cfg) / base == pytest.approx(math.sqrt(n + 1), rel=1e-14)


def test_scaled_time_examples():
    assert scaled_time(3.0, ModelConfig()) == 3.0
    assert scaled_time(0.0, ModelConfig(p=1)) == 0.0
    assert scaled_time(np.pi / 2, ModelConfig(p=2)) == pytest.approx(1.0)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_motion_periodicity_and_bounds(p):
    cfg = ModelConfig(p=p)
    t = np.linspace(0, 20, 1001)
    period = 2 * np.pi / p
    np.testing.assert_allclose(mode_shape(t + period, cfg), mode_shape(t, cfg), atol=1e-12)
    s = scaled_time(t, cfg)
    assert s.min() >= 0 and s.max() <= 2.0 / p + 1e-15
    # motion_phase is the integral of the mode shape
    dt = 1e-6
    deriv = (motion_phase(t + dt, cfg) - motion_phase(t - dt, cfg)) / (2 * dt)
    np.testing.assert_allclose(deriv, mode_shape(t, cfg), atol=1e-8)


def test_scaled_time_monotone_at_rest():
    t = np.linspace(0, 50, 500)
    assert np.all(np.diff(scaled_time(t, ModelConfig())) >= 0)
