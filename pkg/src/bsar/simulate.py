"""Stripmap SAR raw-data simulator with analytic ground truth.

The simulator is the oracle for every blind estimate: it knows the exact
geometry, so it can report the true chirp rates, Doppler centroid, migration
trajectory and the expected focused position of every scatterer.

Modeling choices: stop-and-go approximation, rectilinear uniform motion,
two-way azimuth beam pattern modeled as a squared cardinal sine with first
nulls at +-beam_azimuth_extent/2 around the (possibly squinted) boresight.
Sub-sample echo delays are realized exactly by frequency-domain phase ramps.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.fft import next_fast_len
from scipy.stats import kurtosis, skew

from .core import ChirpModel, synth_chirp, wrap_half_open
from .errors import ConfigurationError, ParameterError

SPEED_OF_LIGHT = 299792458.0


@dataclass(frozen=True)
class AcquisitionConfig:
    """Geometry and radar parameters of a simulated stripmap acquisition.

    These are exactly the ancillary quantities the blind pipeline must never
    read; only the simulator and the oracle-focusing path may use them.
    """

    wavelength: float          # m
    platform_speed: float      # m/s
    closest_range: float       # m, range of the first sample (swath start)
    prf: float                 # Hz, azimuth sampling
    range_sampling: float      # Hz
    chirp_rate: float          # Hz/s
    chirp_duration: float      # s
    beam_azimuth_extent: float  # s of illumination (dwell, null-to-null)
    squint_offset: float       # s, shifts the beam center along track
    num_pulses: int
    samples_per_pulse: int
    noise_sigma: float         # linear amplitude (std of each I/Q component)
    rng_seed: int

    def __post_init__(self):
        positive = (
            "wavelength", "platform_speed", "closest_range", "prf",
            "range_sampling", "chirp_rate", "chirp_duration",
            "beam_azimuth_extent",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be > 0")
        if self.num_pulses < 1 or self.samples_per_pulse < 1:
            raise ParameterError("matrix dimensions must be >= 1")
        if self.noise_sigma < 0:
            raise ParameterError("noise_sigma must be >= 0")
        if self.chirp_rate * self.chirp_duration > self.range_sampling:
            raise ParameterError("transmitted bandwidth exceeds the sampling band")
        if self.beam_azimuth_extent * self.prf > self.num_pulses:
            raise ParameterError("azimuth dwell does not fit inside the pulse grid")

    @property
    def chirp_samples(self):
        return int(round(self.chirp_duration * self.range_sampling))

    @property
    def bandwidth_fraction(self):
        """Transmitted chirp bandwidth as a fraction of the range sampling rate."""
        return self.chirp_rate * self.chirp_duration / self.range_sampling

    def range_chirp_model(self, taper_fraction=0.0):
        """Transmitted pulse as a ChirpModel in cycles/sample^2 units."""
        n = self.chirp_samples
        rate = self.chirp_rate / (2.0 * self.range_sampling**2)
        return ChirpModel(
            rate=rate, center=(n - 1) / 2.0, support=(0, n),
            taper_fraction=taper_fraction,
        )

    def transmitted_pulse(self):
        return synth_chirp(self.range_chirp_model(), self.chirp_samples)


@dataclass(frozen=True)
class Scatterer:
    azimuth_time: float        # s, zero-Doppler crossing
    range_offset: float        # m added to closest_range
    reflectivity: complex = 1.0 + 0.0j


@dataclass
class GroundTruth:
    """Oracle values derived deterministically from config + scene.

    Rates are in the blind pipeline's units (cycles/sample^2, cycles/pulse^2,
    cycles/pulse); focused positions follow the package's peak convention:
    the phase-vertex sample in range and the zero-Doppler row in azimuth.
    Scalar fields describe the first scatterer.
    """

    positions: list            # (row, col) fractional samples per scatterer
    range_chirp_rate: float
    azimuth_chirp_rate: float
    doppler_centroid: float
    rcm_curve: np.ndarray      # range migration (samples) per pulse
    chirp_samples: int
    bandwidth_fraction: float
    beam_center_row: float
    beam_rows: float           # null-to-null main-lobe extent in pulses
    range_support: tuple       # columns covered by the zero-Doppler echo
    azimuth_support: tuple     # main-lobe rows, clipped to the grid
    config: AcquisitionConfig = field(repr=False, default=None)


def _echo_geometry(config, scatterer):
    """Per-pulse slant range, leading-edge column and beam weight."""
    eta = np.arange(config.num_pulses) / config.prf
    d_eta = eta - scatterer.azimuth_time
    r0s = config.closest_range + scatterer.range_offset
    r = np.sqrt(r0s**2 + (config.platform_speed * d_eta) ** 2)
    lead = 2.0 * (r - config.closest_range) / SPEED_OF_LIGHT * config.range_sampling
    boresight = d_eta - config.squint_offset
    beam = np.sinc(2.0 * boresight / config.beam_azimuth_extent) ** 2
    return eta, r, lead, beam


def _validate_scatterer(config, scatterer, index, lead, beam):
    eta = np.arange(config.num_pulses) / config.prf
    boresight = eta - scatterer.azimuth_time - config.squint_offset
    main_lobe = np.abs(boresight) < config.beam_azimuth_extent / 2.0
    center = scatterer.azimuth_time + config.squint_offset
    half = config.beam_azimuth_extent / 2.0
    t_max = (config.num_pulses - 1) / config.prf
    if center - half < 0.0 or center + half > t_max:
        raise ConfigurationError(
            f"scatterer {index}: azimuth main lobe [{center - half:.3f}, "
            f"{center + half:.3f}] s leaves the pulse grid [0, {t_max:.3f}] s"
        )
    lobe_lead = lead[main_lobe] if np.any(main_lobe) else lead
    if np.min(lobe_lead) < 0.0 or np.max(lobe_lead) + config.chirp_samples > config.samples_per_pulse:
        raise ConfigurationError(
            f"scatterer {index}: range echo leaves the {config.samples_per_pulse}-sample swath"
        )


def simulate_raw(config, scene):
    """Synthesize the raw echo matrix and its ground truth.

    Returns (raw, truth) where raw is an M x N complex128 matrix.  Echoes are
    exact fractional-delay replicas of the transmitted pulse, weighted by the
    two-way beam pattern and the two-way propagation phase, plus seeded
    circular complex Gaussian noise (std = noise_sigma per I/Q component,
    independent per-row substreams).
    """
    M, N = config.num_pulses, config.samples_per_pulse
    pulse = config.transmitted_pulse()
    n_chirp = pulse.size
    nfft = next_fast_len(N + n_chirp)
    pulse_spectrum = np.fft.fft(pulse, nfft)
    freqs = np.fft.fftfreq(nfft)

    spectrum = np.zeros((M, nfft), dtype=np.complex128)
    positions = []
    first = None
    for index, sc in enumerate(scene):
        eta, r, lead, beam = _echo_geometry(config, sc)
        _validate_scatterer(config, sc, index, lead, beam)
        amp = sc.reflectivity * beam * np.exp(-4j * np.pi * r / config.wavelength)
        spectrum += (amp[:, None] * pulse_spectrum[None, :]) * np.exp(
            -2j * np.pi * freqs[None, :] * lead[:, None]
        )
        row = sc.azimuth_time * config.prf
        col = (2.0 * sc.range_offset / SPEED_OF_LIGHT * config.range_sampling
               + (n_chirp - 1) / 2.0)
        positions.append((row, col))
        if first is None:
            first = (sc, r, lead)

    raw = np.fft.ifft(spectrum, axis=1)[:, :N]

    if config.noise_sigma > 0:
        for m in range(M):
            rng = np.random.default_rng([config.rng_seed, m])
            raw[m] += config.noise_sigma * (
                rng.standard_normal(N) + 1j * rng.standard_normal(N)
            )

    truth = _ground_truth(config, scene, positions, first)
    return raw, truth


def _ground_truth(config, scene, positions, first):
    if first is None:
        rcm = np.zeros(config.num_pulses)
        return GroundTruth(
            positions=[], range_chirp_rate=config.range_chirp_model().rate,
            azimuth_chirp_rate=0.0, doppler_centroid=0.0, rcm_curve=rcm,
            chirp_samples=config.chirp_samples,
            bandwidth_fraction=config.bandwidth_fraction,
            beam_center_row=float("nan"), beam_rows=config.beam_azimuth_extent * config.prf,
            range_support=(0, 0), azimuth_support=(0, 0), config=config,
        )

    sc, r, lead = first
    r0s = config.closest_range + sc.range_offset
    v = config.platform_speed
    lam = config.wavelength
    az_rate = -(v**2) / (lam * r0s) / config.prf**2
    r_boresight = float(np.sqrt(r0s**2 + (v * config.squint_offset) ** 2))
    dc = float(
        wrap_half_open(-2.0 * v**2 * config.squint_offset / (lam * r_boresight) / config.prf)
    )
    rcm = (r - r0s) * 2.0 * config.range_sampling / SPEED_OF_LIGHT

    lead0 = 2.0 * sc.range_offset / SPEED_OF_LIGHT * config.range_sampling
    beam_center = (sc.azimuth_time + config.squint_offset) * config.prf
    beam_rows = config.beam_azimuth_extent * config.prf
    az_lo = max(int(np.floor(beam_center - beam_rows / 2.0)), 0)
    az_hi = min(int(np.ceil(beam_center + beam_rows / 2.0)) + 1, config.num_pulses)
    return GroundTruth(
        positions=positions,
        range_chirp_rate=config.range_chirp_model().rate,
        azimuth_chirp_rate=az_rate,
        doppler_centroid=dc,
        rcm_curve=rcm,
        chirp_samples=config.chirp_samples,
        bandwidth_fraction=config.bandwidth_fraction,
        beam_center_row=float(beam_center),
        beam_rows=float(beam_rows),
        range_support=(int(np.floor(lead0)), int(np.ceil(lead0)) + config.chirp_samples),
        azimuth_support=(az_lo, az_hi),
        config=config,
    )


def raw_statistics(raw, bins=64):
    """Moment summary and fixed-bin histogram of the real and imaginary parts."""
    x = np.asarray(raw)
    if x.size == 0:
        raise ParameterError("empty matrix")
    out = {}
    for name, part in (("real", x.real.ravel()), ("imag", x.imag.ravel())):
        if np.all(part == 0.0):
            moments = {"mean": 0.0, "variance": 0.0, "skewness": 0.0, "excess_kurtosis": 0.0}
        else:
            moments = {
                "mean": float(np.mean(part)),
                "variance": float(np.var(part)),
                "skewness": float(skew(part)),
                "excess_kurtosis": float(kurtosis(part)),
            }
        span = float(np.max(np.abs(part)))
        edges = np.linspace(-span, span, bins + 1) if span > 0 else np.linspace(-1, 1, bins + 1)
        counts, edges = np.histogram(part, bins=edges)
        moments["histogram"] = {"counts": counts.tolist(), "edges": edges.tolist()}
        out[name] = moments
    return out


def with_seed(config, seed):
    """Copy of the config with a different noise seed (for Monte-Carlo runs)."""
    return replace(config, rng_seed=int(seed))


def oracle_estimate(truth):
    """Build focusing parameters from ground truth instead of blind estimation.

    Returns (estimate, rcm_model): a BlindEstimate-shaped bundle holding the
    true chirp models and an analytic RcmModel fit to the true migration
    curve, both usable by focus_pipeline for oracle-mode focusing.
    """
    from .estimate import BlindEstimate
    from .focus import RcmModel

    if not truth.positions:
        raise ParameterError("ground truth contains no scatterer")
    config = truth.config
    row0, col0 = truth.positions[0]

    base = config.range_chirp_model()
    start, stop = truth.range_support
    range_model = ChirpModel(
        rate=base.rate, center=col0, support=(start, stop), fit_rms=0.0,
    )
    azimuth_model = ChirpModel(
        rate=truth.azimuth_chirp_rate, center=row0,
        support=truth.azimuth_support, fit_rms=0.0,
    )

    rows = np.arange(config.num_pulses, dtype=np.float64)
    envelope = np.sinc(2.0 * (rows - truth.beam_center_row) / truth.beam_rows) ** 2

    lo, hi = truth.azimuth_support
    offsets = rows[lo:hi] - truth.beam_center_row
    design = np.column_stack([np.ones_like(offsets), offsets, offsets**2])
    coeffs, _, _, _ = np.linalg.lstsq(design, truth.rcm_curve[lo:hi], rcond=None)
    resid = truth.rcm_curve[lo:hi] - design @ coeffs
    rcm = RcmModel(
        reference_range_bin=float(col0 + coeffs[0]),
        linear=float(coeffs[1]),
        quadratic=float(coeffs[2]),
        fit_rms=float(np.sqrt(np.mean(resid**2))),
        source="analytic-oracle",
    )
    estimate = BlindEstimate(
        range_chirp=range_model,
        azimuth_chirp=azimuth_model,
        doppler_centroid=truth.doppler_centroid,
        beam_envelope=envelope,
        beam_peak_index=truth.beam_center_row,
        dominance_ratio=float("inf"),
        fit_residuals={"range": 0.0, "azimuth": 0.0},
    )
    return estimate, rcm
