"""Point-target impulse-response metrics and image comparison.

The focused response is windowed, oversampled by zero-padded DFT
interpolation, and measured along the two axis cuts through the peak:
-3 dB width (IRW), peak sidelobe ratio (PSLR) and integrated sidelobe ratio
(ISLR, mainlobe bounded by the first nulls, integration out to 10x the -3 dB
width).
"""

from dataclasses import dataclass

import numpy as np

from .core import as_complex_matrix
from .errors import NoTargetError, ParameterError

MINUS_3DB = 10.0 ** (-3.0 / 20.0)
ISLR_EXTENT = 10.0  # multiples of the -3 dB width integrated on each side


@dataclass
class PointTargetReport:
    peak_position: tuple       # (row, col) fractional samples in the image
    peak_magnitude: float
    irw_range: float           # samples at -3 dB
    irw_azimuth: float
    pslr_range: float          # dB, <= 0
    pslr_azimuth: float
    islr_range: float          # dB
    islr_azimuth: float
    oversample_factor: int


def oversample_window(window, factor):
    """Band-limited interpolation of a complex window by zero-padded DFT."""
    w = np.asarray(window, dtype=np.complex128)
    m, n = w.shape
    spectrum = np.fft.fftshift(np.fft.fft2(w))
    padded = np.zeros((m * factor, n * factor), dtype=np.complex128)
    r0 = (m * factor - m) // 2
    c0 = (n * factor - n) // 2
    padded[r0:r0 + m, c0:c0 + n] = spectrum
    return np.fft.ifft2(np.fft.ifftshift(padded)) * factor * factor


def _crossing(mag, i_lo, i_hi, level):
    """Linear interpolation of the index where mag crosses level between
    adjacent samples i_lo (above) and i_hi (below or equal)."""
    a, b = mag[i_lo], mag[i_hi]
    if a == b:
        return float(i_hi)
    return i_lo + (a - level) / (a - b) * (i_hi - i_lo)


def _width_at_level(mag, peak_idx, level):
    left = peak_idx
    while left > 0 and mag[left - 1] >= level:
        left -= 1
    right = peak_idx
    while right < mag.size - 1 and mag[right + 1] >= level:
        right += 1
    lo = _crossing(mag, left, left - 1, level) if left > 0 else float(left)
    hi = _crossing(mag, right, right + 1, level) if right < mag.size - 1 else float(right)
    return hi - lo


def _first_nulls(mag, peak_idx):
    """Indices of the first local minima on each side of the peak."""
    left = peak_idx
    while left > 0 and mag[left - 1] < mag[left]:
        left -= 1
    right = peak_idx
    while right < mag.size - 1 and mag[right + 1] < mag[right]:
        right += 1
    return left, right


def cut_metrics(cut, peak_idx, factor):
    """(irw_samples, pslr_db, islr_db) for one oversampled cut through a peak."""
    mag = np.abs(cut)
    peak = mag[peak_idx]
    irw = _width_at_level(mag, peak_idx, peak * MINUS_3DB) / factor
    left, right = _first_nulls(mag, peak_idx)

    outside = np.concatenate([mag[:left], mag[right + 1:]])
    pslr = -np.inf
    if outside.size:
        pslr = 20.0 * np.log10(np.max(outside) / peak)

    extent = int(round(ISLR_EXTENT * irw * factor))
    lo = max(peak_idx - extent, 0)
    hi = min(peak_idx + extent + 1, mag.size)
    power = mag**2
    main = float(np.sum(power[left:right + 1]))
    side = float(np.sum(power[lo:left]) + np.sum(power[right + 1:hi]))
    islr = 10.0 * np.log10(side / main) if side > 0 else -np.inf
    return irw, float(pslr), float(islr)


def analyze_point_target(img, approx_position, window=64, oversample_factor=16):
    """Oversampled impulse-response metrics around an approximate position."""
    image = img.image if hasattr(img, "image") else img
    x = as_complex_matrix(image)
    if window < 32:
        raise ParameterError("analysis window must be at least 32 samples")
    if oversample_factor < 8:
        raise ParameterError("oversample factor must be at least 8")
    r = int(round(approx_position[0]))
    c = int(round(approx_position[1]))
    half = window // 2
    if r - half < 0 or c - half < 0 or r + half > x.shape[0] or c + half > x.shape[1]:
        raise ParameterError("analysis window extends outside the image")
    win = x[r - half:r + half, c - half:c + half]

    mag = np.abs(win)
    peak_idx = np.unravel_index(np.argmax(mag), mag.shape)
    background = float(np.median(mag))
    if mag[peak_idx] == 0.0 or mag[peak_idx] < background * 10.0:
        raise NoTargetError(
            "no local peak 20 dB above the surrounding median in the window"
        )

    fine = oversample_window(win, oversample_factor)
    fmag = np.abs(fine)
    pr, pc = np.unravel_index(np.argmax(fmag), fmag.shape)
    peak_row = r - half + pr / oversample_factor
    peak_col = c - half + pc / oversample_factor

    irw_az, pslr_az, islr_az = cut_metrics(fine[:, pc], pr, oversample_factor)
    irw_rg, pslr_rg, islr_rg = cut_metrics(fine[pr, :], pc, oversample_factor)
    return PointTargetReport(
        peak_position=(peak_row, peak_col),
        peak_magnitude=float(fmag[pr, pc]),
        irw_range=irw_rg,
        irw_azimuth=irw_az,
        pslr_range=pslr_rg,
        pslr_azimuth=pslr_az,
        islr_range=islr_rg,
        islr_azimuth=islr_az,
        oversample_factor=oversample_factor,
    )


def compare_images(a, b, window=None, db_floor=-120.0):
    """Normalized magnitude correlation, peak offset and dB RMS difference.

    `window`, when given, is (row_start, row_stop, col_start, col_stop).
    """
    ia = a.image if hasattr(a, "image") else np.asarray(a)
    ib = b.image if hasattr(b, "image") else np.asarray(b)
    if ia.shape != ib.shape:
        raise ParameterError(f"image dimensions differ: {ia.shape} vs {ib.shape}")
    if window is not None:
        r0, r1, c0, c1 = window
        ia = ia[r0:r1, c0:c1]
        ib = ib[r0:r1, c0:c1]

    ma, mb = np.abs(ia), np.abs(ib)
    denom = np.linalg.norm(ma) * np.linalg.norm(mb)
    correlation = float(np.sum(ma * mb) / denom) if denom > 0 else 0.0

    pa = np.unravel_index(np.argmax(ma), ma.shape)
    pb = np.unravel_index(np.argmax(mb), mb.shape)
    offset = (int(pb[0] - pa[0]), int(pb[1] - pa[1]))

    floor = max(np.max(ma), np.max(mb)) * 10.0 ** (db_floor / 20.0)
    if floor <= 0:
        rms_db = 0.0
    else:
        da = 20.0 * np.log10(np.maximum(ma, floor))
        db_ = 20.0 * np.log10(np.maximum(mb, floor))
        rms_db = float(np.sqrt(np.mean((da - db_) ** 2)))
    return {
        "correlation": correlation,
        "peak_offset": offset,
        "rms_db_difference": rms_db,
    }
