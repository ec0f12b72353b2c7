import numpy as np
import pytest

from bsar.core import (
    ChirpModel,
    dft,
    instantaneous_frequency,
    sample_chirp,
    synth_chirp,
    unwrap_phase,
    wrap_half_open,
)
from bsar.errors import ParameterError
from oracles import naive_dft


# --- synth_chirp --------------------------------------------------------------

def test_zero_rate_chirp_is_constant():
    model = ChirpModel(rate=0.0, center=0.0, support=(0, 8), linear=0.0)
    out = synth_chirp(model, 8)
    np.testing.assert_allclose(out, np.ones(8, dtype=np.complex128), atol=1e-15)


def test_chirp_analytic_sample():
    # K=0.5 cycles/sample^2, n0=0: sample n=1 is exp(j*2*pi*0.5) = -1
    model = ChirpModel(rate=0.5, center=0.0, support=(0, 4))
    out = synth_chirp(model, 4)
    np.testing.assert_allclose(out[1], -1.0 + 0.0j, atol=1e-14)


def test_chirp_matches_simulator_pulse(default_scene):
    config, _ = default_scene
    model = config.range_chirp_model()
    ours = synth_chirp(model, 128)
    pulse = config.transmitted_pulse()
    corr = abs(np.vdot(pulse, ours)) / (np.linalg.norm(pulse) * np.linalg.norm(ours))
    assert corr >= 0.999


def test_chirp_zero_outside_support():
    model = ChirpModel(rate=0.01, center=10.0, support=(4, 16))
    out = synth_chirp(model, 24)
    assert np.all(out[:4] == 0) and np.all(out[16:] == 0)
    assert np.all(np.abs(out[4:16]) > 0)


def test_chirp_symmetry_about_vertex():
    # with b=0, s[n0+m] = s[n0-m] for integer offsets inside the support
    model = ChirpModel(rate=3e-3, center=32.0, support=(0, 65), constant=0.2)
    out = synth_chirp(model, 65)
    for m in range(1, 30):
        np.testing.assert_allclose(out[32 + m], out[32 - m], atol=1e-13)


def test_chirp_length_shorter_than_support_rejected():
    model = ChirpModel(rate=0.01, center=5.0, support=(0, 16))
    with pytest.raises(ParameterError):
        synth_chirp(model, 8)


def test_chirp_model_validation():
    with pytest.raises(ParameterError):
        ChirpModel(rate=0.1, center=0.0, support=(5, 5))
    with pytest.raises(ParameterError):
        ChirpModel(rate=0.1, center=0.0, support=(-1, 5))
    with pytest.raises(ParameterError):
        ChirpModel(rate=0.1, center=0.0, support=(0, 8), taper_fraction=0.6)
    with pytest.raises(ParameterError):
        ChirpModel(rate=float("nan"), center=0.0, support=(0, 8))


def test_taper_zero_gives_rectangular_magnitude():
    model = ChirpModel(rate=2e-3, center=16.0, support=(0, 32), taper_fraction=0.0)
    out = synth_chirp(model, 32)
    np.testing.assert_allclose(np.abs(out), 1.0, atol=1e-14)


def test_taper_ramps_to_zero_at_edges():
    model = ChirpModel(rate=2e-3, center=16.0, support=(0, 32), taper_fraction=0.25)
    out = synth_chirp(model, 32)
    mag = np.abs(out)
    assert mag[0] < 1e-12                      # cosine ramp starts at zero
    assert mag[15] == pytest.approx(1.0)       # flat top in the middle
    assert np.all(np.diff(mag[:8]) > 0)        # monotone rise over the ramp


# --- unwrap_phase --------------------------------------------------------------

def test_unwrap_no_jumps_passthrough():
    seq = np.array([0.0, 1.0, 2.0])
    np.testing.assert_allclose(unwrap_phase(seq), seq, atol=1e-15)


def test_unwrap_restores_2pi_jump():
    # wrapped value of 6.0 rad is 6.0 - 2*pi = -0.2832
    wrapped = np.array([0.0, 3.0, 6.0 - 2.0 * np.pi])
    np.testing.assert_allclose(unwrap_phase(wrapped), [0.0, 3.0, 6.0], atol=1e-12)


def test_unwrap_roundtrip_on_quadratic_phase():
    n = np.arange(200, dtype=np.float64)
    phi = 2.0 * np.pi * (1e-3 * (n - 100) ** 2)  # below Nyquist everywhere
    wrapped = np.angle(np.exp(1j * phi))
    recovered = unwrap_phase(wrapped)
    offset = recovered - phi
    np.testing.assert_allclose(offset, offset[0], atol=1e-10)
    assert abs(offset[0] / (2.0 * np.pi) - round(offset[0] / (2.0 * np.pi))) < 1e-10


def test_unwrap_idempotent():
    n = np.arange(100, dtype=np.float64)
    phi = 0.02 * n**2
    once = unwrap_phase(np.angle(np.exp(1j * phi)))
    np.testing.assert_allclose(unwrap_phase(once), once, atol=1e-12)


def test_unwrap_preserves_first_sample_and_modulo():
    rng = np.random.default_rng(3)
    phi = np.cumsum(rng.uniform(-0.5, 0.5, 64)) + 1.3
    wrapped = np.angle(np.exp(1j * phi))
    out = unwrap_phase(wrapped)
    assert out[0] == wrapped[0]
    np.testing.assert_allclose(np.angle(np.exp(1j * (out - wrapped))), 0.0, atol=1e-12)


def test_unwrap_rejects_empty():
    with pytest.raises(ParameterError):
        unwrap_phase(np.array([]))


# --- dft -----------------------------------------------------------------------

def test_dft_impulse():
    np.testing.assert_allclose(dft([1, 0, 0, 0]), np.ones(4), atol=1e-15)


def test_dft_roundtrip_non_power_of_two():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
    back = dft(dft(x), inverse=True)
    assert np.max(np.abs(back - x)) < 1e-12 * np.linalg.norm(x)


def test_dft_matches_naive_oracle():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    np.testing.assert_allclose(dft(x), naive_dft(x), atol=1e-12)
    np.testing.assert_allclose(dft(x, inverse=True), naive_dft(x, inverse=True),
                               atol=1e-12)


def test_dft_linearity():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    y = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    a, b = 1.7 - 0.3j, -2.2 + 0.9j
    lhs = dft(a * x + b * y)
    rhs = a * dft(x) + b * dft(y)
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * np.max(np.abs(lhs))


def test_dft_parseval():
    rng = np.random.default_rng(4)
    x = rng.standard_normal(321) + 1j * rng.standard_normal(321)
    energy_time = np.sum(np.abs(x) ** 2)
    energy_freq = np.sum(np.abs(dft(x)) ** 2) / x.size
    assert abs(energy_time - energy_freq) < 1e-12 * energy_time


# --- instantaneous_frequency ----------------------------------------------------

def test_if_linear_phase():
    n = np.arange(50, dtype=np.float64)
    f = instantaneous_frequency(2.0 * np.pi * 0.1 * n)
    np.testing.assert_allclose(f, 0.1, atol=1e-12)


def test_if_quadratic_phase():
    n = np.arange(100, dtype=np.float64)
    k = 1e-3
    f = instantaneous_frequency(2.0 * np.pi * k * n**2)
    np.testing.assert_allclose(f[1:-1], 2.0 * k * n[1:-1], atol=1e-12)


def test_if_zero_crossing_at_chirp_vertex():
    # frequency of a synthesized chirp crosses zero within half a sample of n0
    model = ChirpModel(rate=2e-3, center=47.3, support=(0, 96))
    sig = synth_chirp(model, 96)
    f = instantaneous_frequency(unwrap_phase(np.angle(sig)))
    sign_change = np.nonzero(np.diff(np.sign(f)) != 0)[0]
    assert sign_change.size >= 1
    assert abs(float(sign_change[0]) + 0.5 - model.center) <= 0.5


def test_if_recovers_chirp_slope():
    model = ChirpModel(rate=1.5e-3, center=60.0, support=(0, 120))
    sig = synth_chirp(model, 120)
    f = instantaneous_frequency(unwrap_phase(np.angle(sig)))
    n = np.arange(120, dtype=np.float64)
    expected = 2.0 * model.rate * (n - model.center)
    assert np.max(np.abs(f[1:-1] - expected[1:-1])) < 1e-9


def test_if_rejects_short_input():
    with pytest.raises(ParameterError):
        instantaneous_frequency([0.0, 1.0])


# --- wrap_half_open -------------------------------------------------------------

def test_wrap_half_open_interval():
    vals = np.array([-0.5, 0.5, 0.75, -0.75, 1.5, 0.0])
    wrapped = wrap_half_open(vals)
    assert np.all((wrapped > -0.5) & (wrapped <= 0.5))
    np.testing.assert_allclose(np.mod(wrapped - vals, 1.0), 0.0, atol=1e-12)


def test_sample_chirp_fractional_positions():
    model = ChirpModel(rate=1e-3, center=10.0, support=(0, 21))
    pos = np.array([10.0, 10.5, 9.5])
    out = sample_chirp(model, pos)
    expected = np.exp(2j * np.pi * model.phase_cycles(pos))
    np.testing.assert_allclose(out, expected, atol=1e-14)
