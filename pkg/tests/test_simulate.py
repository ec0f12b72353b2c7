import numpy as np
import pytest
from dataclasses import replace

from bsar.core import unwrap_phase
from bsar.errors import ConfigurationError, ParameterError
from bsar.simulate import (
    SPEED_OF_LIGHT,
    Scatterer,
    raw_statistics,
    simulate_raw,
    with_seed,
)


def quiet(config, **changes):
    return replace(config, noise_sigma=0.0, **changes)


def test_empty_scene_no_noise_is_zero(default_scene):
    config, _ = default_scene
    raw, truth = simulate_raw(quiet(config), [])
    assert np.all(raw == 0)
    assert truth.positions == []


def test_energy_peaks_at_boresight_pulse(default_scene):
    config, scene = default_scene
    assert config.squint_offset == 0.0
    raw, _ = simulate_raw(quiet(config), scene)
    energy = np.sum(np.abs(raw) ** 2, axis=1)
    best = int(np.argmax(energy))
    nearest = int(round(scene[0].azimuth_time * config.prf))
    assert abs(best - nearest) <= 1


def test_energy_monotone_within_main_lobe(default_scene):
    config, scene = default_scene
    raw, truth = simulate_raw(quiet(config), scene)
    energy = np.sum(np.abs(raw) ** 2, axis=1)
    lo, hi = truth.azimuth_support
    peak = int(np.argmax(energy))
    assert np.all(np.diff(energy[lo + 1:peak]) >= 0)
    assert np.all(np.diff(energy[peak:hi - 1]) <= 0)


def test_rcm_curve_is_analytic_sqrt_law(default_sim, default_scene):
    config, scene = default_scene
    _, truth = default_sim
    sc = scene[0]
    eta = np.arange(config.num_pulses) / config.prf
    r0s = config.closest_range + sc.range_offset
    r = np.sqrt(r0s**2 + (config.platform_speed * (eta - sc.azimuth_time)) ** 2)
    expected = (r - r0s) * 2.0 * config.range_sampling / SPEED_OF_LIGHT
    np.testing.assert_allclose(truth.rcm_curve, expected, atol=1e-12)
    # the default config is chosen to exhibit real migration
    lo, hi = truth.azimuth_support
    assert np.max(truth.rcm_curve[lo:hi]) - np.min(truth.rcm_curve[lo:hi]) > 2.0


def test_determinism(default_scene):
    config, scene = default_scene
    a, _ = simulate_raw(config, scene)
    b, _ = simulate_raw(config, scene)
    assert np.array_equal(a, b)


def test_seed_changes_noise_only(default_scene):
    config, scene = default_scene
    a, _ = simulate_raw(config, scene)
    b, _ = simulate_raw(with_seed(config, config.rng_seed + 1), scene)
    assert not np.array_equal(a, b)
    clean, _ = simulate_raw(quiet(config), scene)
    # noise realizations differ but the deterministic echo part is shared
    np.testing.assert_allclose(np.mean(a - clean), np.mean(a) - np.mean(clean),
                               atol=1e-12)


def test_superposition_is_exact(default_scene):
    config, scene = default_scene
    cfg = quiet(config)
    sc1 = scene[0]
    sc2 = Scatterer(azimuth_time=sc1.azimuth_time + 0.2,
                    range_offset=sc1.range_offset - 300.0,
                    reflectivity=0.5 - 0.25j)
    both, _ = simulate_raw(cfg, [sc1, sc2])
    only1, _ = simulate_raw(cfg, [sc1])
    only2, _ = simulate_raw(cfg, [sc2])
    # superposition is exact up to float rounding in the shared inverse FFT
    scale = np.max(np.abs(both))
    np.testing.assert_allclose(both, only1 + only2, atol=1e-13 * scale)


def test_azimuth_column_phase_is_quadratic_dominated(default_scene):
    config, scene = default_scene
    raw, truth = simulate_raw(quiet(config), scene)
    # follow the migration trajectory so the echo stays in view
    lo, hi = truth.azimuth_support
    rows = np.arange(lo + 2, hi - 2)
    col0 = int(round(truth.positions[0][1]))
    samples = raw[rows, col0 + np.round(truth.rcm_curve[rows]).astype(int)]
    phase = unwrap_phase(np.angle(samples)) / (2.0 * np.pi)
    d = rows - truth.beam_center_row
    design = np.column_stack([d**2, d, np.ones_like(d, dtype=float)])
    coeffs, _, _, _ = np.linalg.lstsq(design, phase, rcond=None)
    resid = phase - design @ coeffs
    quad_span = abs(coeffs[0]) * np.max(d**2)
    assert np.sqrt(np.mean(resid**2)) < 0.05 * quad_span
    assert coeffs[0] == pytest.approx(truth.azimuth_chirp_rate, rel=0.02)


def test_scatterer_off_grid_names_index(default_scene):
    config, scene = default_scene
    bad = Scatterer(azimuth_time=0.01, range_offset=scene[0].range_offset)
    with pytest.raises(ConfigurationError, match="scatterer 1"):
        simulate_raw(quiet(config), [scene[0], bad])


def test_scatterer_range_overflow_rejected(default_scene):
    config, scene = default_scene
    bad = Scatterer(azimuth_time=scene[0].azimuth_time, range_offset=5000.0)
    with pytest.raises(ConfigurationError, match="swath"):
        simulate_raw(quiet(config), [bad])


def test_config_invariants(default_scene):
    config, _ = default_scene
    with pytest.raises(ParameterError):
        replace(config, wavelength=-1.0)
    with pytest.raises(ParameterError):
        replace(config, noise_sigma=-0.1)
    with pytest.raises(ParameterError):
        replace(config, chirp_rate=config.range_sampling / config.chirp_duration * 2)
    with pytest.raises(ParameterError):
        replace(config, beam_azimuth_extent=(config.num_pulses + 1) / config.prf)


def test_ground_truth_position_convention(default_scene):
    config, scene = default_scene
    _, truth = simulate_raw(quiet(config), scene)
    sc = scene[0]
    row, col = truth.positions[0]
    assert row == pytest.approx(sc.azimuth_time * config.prf)
    expected_col = (2.0 * sc.range_offset / SPEED_OF_LIGHT * config.range_sampling
                    + (config.chirp_samples - 1) / 2.0)
    assert col == pytest.approx(expected_col)


def test_ground_truth_rates(default_scene):
    config, scene = default_scene
    _, truth = simulate_raw(quiet(config), scene)
    assert truth.range_chirp_rate == pytest.approx(
        config.chirp_rate / (2.0 * config.range_sampling**2)
    )
    r0s = config.closest_range + scene[0].range_offset
    expected_az = -(config.platform_speed**2) / (config.wavelength * r0s) / config.prf**2
    assert truth.azimuth_chirp_rate == pytest.approx(expected_az)
    assert truth.doppler_centroid == 0.0


def test_squint_doppler_centroid(squint_sim, squint_scene):
    config, _ = squint_scene
    _, truth = squint_sim
    assert config.squint_offset != 0.0
    assert abs(truth.doppler_centroid) == pytest.approx(0.15, abs=0.001)


# --- raw_statistics -------------------------------------------------------------

def test_statistics_zero_matrix():
    stats = raw_statistics(np.zeros((8, 8), dtype=np.complex128))
    for part in ("real", "imag"):
        assert stats[part]["mean"] == 0.0
        assert stats[part]["variance"] == 0.0
        assert stats[part]["skewness"] == 0.0
        assert stats[part]["excess_kurtosis"] == 0.0


def test_statistics_pure_noise_variance(default_scene):
    config, _ = default_scene
    cfg = replace(config, noise_sigma=1.0)
    raw, _ = simulate_raw(cfg, [])
    assert raw.size >= 2**18
    stats = raw_statistics(raw)
    assert stats["real"]["variance"] == pytest.approx(1.0, rel=0.05)
    assert stats["imag"]["variance"] == pytest.approx(1.0, rel=0.05)


def test_statistics_histogram_shape():
    rng = np.random.default_rng(0)
    raw = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
    stats = raw_statistics(raw, bins=16)
    hist = stats["real"]["histogram"]
    assert len(hist["counts"]) == 16
    assert len(hist["edges"]) == 17
    assert sum(hist["counts"]) == raw.size


def test_statistics_rejects_empty():
    with pytest.raises(ParameterError):
        raw_statistics(np.zeros((0,)))
