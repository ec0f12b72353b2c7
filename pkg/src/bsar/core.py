"""Complex signal primitives: chirp synthesis, phase unwrapping, DFT helpers.

Conventions used throughout the package:

* phases inside :class:`ChirpModel` are stored in **cycles** (the quadratic
  fits are numerically cleaner that way); signal-level functions work in
  radians,
* frequencies are in cycles/sample (range) or cycles/pulse (azimuth),
* complex data is float64 in memory; only the on-disk format is float32.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ParameterError

TWO_PI = 2.0 * math.pi


def as_complex_matrix(data):
    """Validate and return a 2-D complex128 array (rows = pulses, cols = range)."""
    x = np.asarray(data, dtype=np.complex128)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ParameterError("expected a non-empty 2-D complex matrix")
    return x


def as_complex_vector(data):
    x = np.asarray(data, dtype=np.complex128)
    if x.ndim != 1 or x.size < 1:
        raise ParameterError("expected a non-empty 1-D complex vector")
    return x


@dataclass(frozen=True)
class ChirpModel:
    """Quadratic phase law in cycles.

    phase(n) = rate*(n - center)**2 + linear*(n - center) + constant

    `support` is a half-open sample interval [start, stop); samples outside it
    are zero.  `taper_fraction` is the fraction of the support length covered
    by a raised-cosine amplitude ramp at each end.  `fit_rms` records the RMS
    residual (cycles) of the least-squares fit that produced the model, NaN
    for models written down directly.
    """

    rate: float
    center: float
    support: tuple
    taper_fraction: float = 0.0
    linear: float = 0.0
    constant: float = 0.0
    fit_rms: float = float("nan")

    def __post_init__(self):
        start, stop = self.support
        if not (0 <= start < stop):
            raise ParameterError(f"invalid chirp support [{start}, {stop})")
        if not (0.0 <= self.taper_fraction <= 0.5):
            raise ParameterError("taper_fraction must be in [0, 0.5]")
        for name in ("rate", "center", "linear", "constant"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"non-finite chirp parameter {name!r}")

    @property
    def support_length(self):
        return self.support[1] - self.support[0]

    def phase_cycles(self, n):
        d = np.asarray(n, dtype=np.float64) - self.center
        return self.rate * d * d + self.linear * d + self.constant

    def instantaneous_frequency(self, n):
        """Phase derivative in cycles/sample at position(s) n."""
        d = np.asarray(n, dtype=np.float64) - self.center
        return 2.0 * self.rate * d + self.linear


def taper_window(positions, start, stop, taper_fraction):
    """Raised-cosine window over [start, stop) evaluated at (fractional) positions.

    Amplitude ramps from 0 to 1 over taper_fraction of the support length at
    each end; zero outside the support.
    """
    x = np.asarray(positions, dtype=np.float64)
    length = float(stop - start)
    w = np.zeros_like(x)
    inside = (x >= start) & (x < stop)
    if taper_fraction <= 0.0:
        w[inside] = 1.0
        return w
    ramp = taper_fraction * length
    u = x[inside] - start
    v = np.ones(u.shape)
    lo = u < ramp
    v[lo] = 0.5 * (1.0 - np.cos(np.pi * u[lo] / ramp))
    hi = u > length - ramp
    v[hi] = 0.5 * (1.0 - np.cos(np.pi * (length - u[hi]) / ramp))
    w[inside] = v
    return w


def sample_chirp(model, positions):
    """Evaluate a ChirpModel at arbitrary (fractional) sample positions."""
    start, stop = model.support
    w = taper_window(positions, start, stop, model.taper_fraction)
    out = np.zeros(np.shape(positions), dtype=np.complex128)
    nz = w > 0.0
    pos = np.asarray(positions, dtype=np.float64)
    out[nz] = w[nz] * np.exp(1j * TWO_PI * model.phase_cycles(pos[nz]))
    return out


def synth_chirp(model, length):
    """Synthesize the chirp on the integer sample grid 0..length-1.

    The support must fit inside the requested length; samples outside the
    support are exactly zero.
    """
    length = int(length)
    if length < model.support[1]:
        raise ParameterError(
            f"length {length} shorter than chirp support stop {model.support[1]}"
        )
    return sample_chirp(model, np.arange(length))


def unwrap_phase(wrapped):
    """Unwrap radians so successive differences lie in (-pi, pi].

    Output equals the input modulo 2*pi elementwise and keeps the first sample.
    """
    phi = np.asarray(wrapped, dtype=np.float64)
    if phi.ndim != 1 or phi.size < 1:
        raise ParameterError("unwrap_phase expects a non-empty 1-D sequence")
    d = np.diff(phi)
    # map each difference into (-pi, pi]
    d_adj = d - TWO_PI * np.ceil((d - np.pi) / TWO_PI)
    out = np.empty_like(phi)
    out[0] = phi[0]
    out[1:] = phi[0] + np.cumsum(d_adj)
    return out


def dft(x, inverse=False):
    """Exact-length forward/inverse DFT (forward unnormalized, inverse 1/N)."""
    v = as_complex_vector(x)
    return np.fft.ifft(v) if inverse else np.fft.fft(v)


def instantaneous_frequency(phase_unwrapped):
    """Discrete phase derivative in cycles/sample.

    Central differences (phi[n+1]-phi[n-1])/(4*pi) at interior samples,
    one-sided at the two ends; length is preserved.
    """
    phi = np.asarray(phase_unwrapped, dtype=np.float64)
    if phi.ndim != 1 or phi.size < 3:
        raise ParameterError("instantaneous_frequency needs at least 3 samples")
    f = np.empty_like(phi)
    f[1:-1] = (phi[2:] - phi[:-2]) / (2.0 * TWO_PI)
    f[0] = (phi[1] - phi[0]) / TWO_PI
    f[-1] = (phi[-1] - phi[-2]) / TWO_PI
    return f


def wrap_half_open(f):
    """Wrap frequency (cycles/sample) into the interval (-0.5, 0.5]."""
    return f - np.ceil(np.asarray(f, dtype=np.float64) - 0.5)
