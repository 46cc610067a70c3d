"""Fourier collocation utilities on uniform periodic grids.

All grids are N uniformly spaced points on [0, Xi), so that the value at Xi
coincides with the value at 0 by periodicity.  Differentiation, antiderivatives
and quadrature are all spectral; for smooth fields they are accurate to the
size of the Fourier tail.
"""

import numpy as np


def grid(n, period):
    """Uniform collocation grid: n points on [0, period)."""
    return period * np.arange(n) / n


def wavenumbers(n, period):
    """FFT-ordered wavenumbers 2*pi*m/period."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=period / n)


def _deriv_multiplier(n, period, order):
    k = wavenumbers(n, period)
    mult = (1j * k) ** order
    # odd derivatives of the unmatched Nyquist mode are set to zero
    if order % 2 == 1 and n % 2 == 0:
        mult[n // 2] = 0.0
    return mult


def diff(f, period, order=1):
    """Spectral derivative of a real periodic grid function."""
    n = len(f)
    fh = np.fft.fft(f)
    out = np.fft.ifft(_deriv_multiplier(n, period, order) * fh)
    return out.real if np.isrealobj(f) else out


def diffmat(n, period, order=1):
    """Dense differentiation matrix consistent with diff()."""
    mult = _deriv_multiplier(n, period, order)
    # columns are derivatives of the cardinal functions
    eye_hat = np.fft.fft(np.eye(n), axis=0)
    return np.fft.ifft(mult[:, None] * eye_hat, axis=0).real


def mean(f):
    """Period average; exact for trigonometric polynomials on their grid."""
    return float(np.mean(f))


def antiderivative(f, period):
    """Periodic antiderivative A of a zero-mean field, pinned so A(0) = 0.

    The input mean is subtracted before inversion so the result is always
    periodic; callers who care should check mean(f) themselves.
    """
    n = len(f)
    fh = np.fft.fft(f - np.mean(f))
    k = wavenumbers(n, period)
    ah = np.zeros_like(fh)
    nonzero = k != 0.0
    ah[nonzero] = fh[nonzero] / (1j * k[nonzero])
    if n % 2 == 0:
        ah[n // 2] = 0.0
    a = np.fft.ifft(ah).real
    return a - a[0]


def resample(f, n_new, period=None):
    """Trigonometric interpolation of f onto a grid with n_new points."""
    n = len(f)
    fh = np.fft.fft(f) / n
    fh_full = np.zeros(n_new, dtype=complex)
    m = min(n, n_new)
    half = (m - 1) // 2
    fh_full[: half + 1] = fh[: half + 1]
    fh_full[-half:] = fh[-half:] if half > 0 else fh_full[-half:]
    # split a shared Nyquist mode symmetrically when the source n is even
    if n % 2 == 0 and n_new > n:
        fh_full[n // 2] = 0.5 * fh[n // 2]
        fh_full[-(n // 2)] = 0.5 * fh[n // 2]
    elif n % 2 == 0 and n_new == n:
        fh_full[n // 2] = fh[n // 2]
    out = np.fft.ifft(fh_full) * n_new
    return out.real if np.isrealobj(f) else out


def fourier_coefficients(f, n_modes):
    """Coefficients c_m, m = -n_modes..n_modes, of the trigonometric interpolant."""
    n = len(f)
    fh = np.fft.fft(f) / n
    idx = np.arange(-n_modes, n_modes + 1)
    if 2 * n_modes + 1 > n:
        raise ValueError("requested more coefficients than the grid resolves")
    return fh[idx % n]


def interp_at(f, period, x_eval):
    """Evaluate the trigonometric interpolant of f at arbitrary points."""
    n = len(f)
    fh = np.fft.fft(f) / n
    k = wavenumbers(n, period)
    # direct summation; fine at collocation sizes used here
    phase = np.exp(1j * np.outer(np.asarray(x_eval, dtype=float), k))
    vals = phase @ fh
    return vals.real if np.isrealobj(f) else vals


def dealiased_apply(func, fields, pad=1.5):
    """Evaluate func pointwise on zero-padded grids and truncate back.

    fields is a tuple of equal-length arrays; func maps arrays to one array.
    Classic 3/2-rule padding; removes aliasing from quadratic products and
    suppresses it for smooth nonpolynomial maps.
    """
    n = len(fields[0])
    n_pad = int(np.ceil(pad * n / 2) * 2)
    fine = [resample(f, n_pad) for f in fields]
    out = func(*fine)
    return resample(out, n)


def norm_l2(f, period):
    """L2 norm over one period, sqrt(int |f|^2)."""
    return float(np.sqrt(period * np.mean(np.abs(f) ** 2)))


def norm_hs(fields, period, s):
    """H^s norm of a tuple of periodic fields (sum over components)."""
    total = 0.0
    for f in fields:
        for order in range(s + 1):
            g = f if order == 0 else diff(f, period, order)
            total += period * np.mean(np.abs(g) ** 2)
    return float(np.sqrt(total))
