"""Probing kernels: the smoothed power law, its Radon profile and spectra.

The probe centred at the origin is the radial function

    eta(r) = r**-alpha            for r >= h
           = psi(r)               for r <  h

where ``psi`` is a quintic cap that is flat (value ``h**-alpha``) on
``[0, b)`` with ``b = h - h**2/n`` and C2-joined to that plateau at ``b``.
The companion ``zeta_tilde`` replaces the cap by the constant ``h**-alpha``.

Fourier convention: ``F f(w) = int f(x) exp(-2 pi i x.w) dx``, so the
fractional Laplacian has the multiplier ``(2 pi |w|)**(2 gamma)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from . import specfun

_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)


@dataclass(frozen=True)
class ProbeParams:
    dim: int
    h: float
    alpha: float | None = None

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if not 0 < self.h < 1:
            raise ValueError(f"h must lie in (0, 1), got {self.h}")
        alpha = float(self.dim + 1 if self.alpha is None else self.alpha)
        if alpha <= self.dim:
            raise ValueError(f"alpha must exceed dim={self.dim} for an integrable probe")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "h", float(self.h))

    @property
    def b(self) -> float:
        return self.h - self.h ** 2 / self.dim


def _cap_coefficients(p: ProbeParams):
    h, k = p.h, p.alpha
    c3 = (k * k + k) / (2 * h ** 4) + 4 * k / h ** 5
    c4 = -((k * k + k) / h ** 4 + 7 * k / h ** 5) / h ** 2
    c5 = ((k * k + k) / (2 * h ** 4) + 3 * k / h ** 5) / h ** 4
    return c3, c4, c5


def _psi_unchecked(p: ProbeParams, t):
    c3, c4, c5 = _cap_coefficients(p)
    s = np.maximum(np.asarray(t, dtype=float) - p.b, 0.0)
    return (1.0 + s ** 3 * (c3 + s * (c4 + s * c5))) / p.h ** p.alpha


def psi(params: ProbeParams, t):
    """Cap polynomial on ``[0, h]``; constant ``h**-alpha`` below ``b``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > params.h):
        raise ValueError("psi is defined on [0, h] only")
    out = _psi_unchecked(params, t)
    return out if out.ndim else float(out)


def zeta(params: ProbeParams, r):
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        tail = np.where(r > 0, r, 1.0) ** -params.alpha
    out = np.where(r >= params.h, tail, _psi_unchecked(params, np.minimum(r, params.h)))
    return out if out.ndim else float(out)


def zeta_tilde(params: ProbeParams, r):
    r = np.asarray(r, dtype=float)
    out = np.maximum(r, params.h) ** -params.alpha
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RadialProfile:
    """Samples on the uniform axis ``start + step * arange(len(values))``."""

    start: float
    step: float
    values: np.ndarray
    tag: str = "radon_of_eta"

    @property
    def axis(self) -> np.ndarray:
        return self.start + self.step * np.arange(len(self.values))


def symmetric_axis(step: float, half_count: int) -> np.ndarray:
    return step * np.arange(-half_count, half_count + 1)


# -- Radon profile of the probe ----------------------------------------------

def _gl(f, a, b):
    """Vectorised Gauss-Legendre over per-element intervals [a, b]."""
    a = np.asarray(a, dtype=float)[:, None]
    b = np.asarray(b, dtype=float)[:, None]
    half = (b - a) / 2
    nodes = a + half * (_GL_X + 1)
    return (half * _GL_W * f(nodes)).sum(axis=1)


def _sin_power_integral(p, u0):
    """int_0^u0 sin(u)**p du for 0 <= u0 <= pi/2, via the incomplete beta."""
    a = (p + 1) / 2
    return 0.5 * _sp.beta(a, 0.5) * _sp.betainc(a, 0.5, np.sin(u0) ** 2)


def _line_profile(p: ProbeParams, tau):
    # R eta(tau) = 2 int_0^inf eta(sqrt(tau^2 + s^2)) ds
    h, b, a = p.h, p.b, p.alpha
    at = np.abs(tau)
    out = np.zeros_like(at)

    s_b = np.sqrt(np.maximum(b * b - at * at, 0.0))
    s_h = np.sqrt(np.maximum(h * h - at * at, 0.0))

    out += h ** -a * s_b  # flat plateau, r < b

    cap = at < h
    if cap.any():
        t2 = at[cap] ** 2
        out[cap] += _gl(
            lambda s: _psi_unchecked(p, np.sqrt(t2[:, None] + s * s)),
            s_b[cap],
            s_h[cap],
        )

    # tail r >= h: int_{s_h}^inf (tau^2+s^2)^(-a/2) ds
    tail = np.empty_like(at)
    zero = at == 0
    tail[zero] = h ** (1 - a) / (a - 1)
    nz = ~zero
    u0 = np.arctan2(at[nz], s_h[nz])
    tail[nz] = at[nz] ** (1 - a) * _sin_power_integral(a - 2, u0)
    out += tail
    return 2 * out


def _plane_profile(p: ProbeParams, tau):
    # R eta(tau) = 2 pi int_{|tau|}^inf eta(r) r dr
    h, b, a = p.h, p.b, p.alpha
    at = np.abs(tau)
    out = 0.5 * h ** -a * np.maximum(b * b - at * at, 0.0)
    cap = at < h
    if cap.any():
        lo = np.maximum(at[cap], b)
        out[cap] += _gl(lambda r: _psi_unchecked(p, r) * r, lo, np.full_like(lo, h))
    m = np.maximum(at, h)
    out += m ** (2 - a) / (a - 2)
    return 2 * np.pi * out


def radon_probe_values(params: ProbeParams, tau) -> np.ndarray:
    """Radon transform of the origin-centred probe at arbitrary offsets."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if params.dim == 2:
        return _line_profile(params, tau)
    return _plane_profile(params, tau)


def radon_probe_profile(params: ProbeParams, tau) -> RadialProfile:
    """Radon transform of the origin-centred probe along a uniform tau axis.

    Line integrals for ``dim == 2``, plane integrals for ``dim == 3``. The
    axis must be uniform; the profile is even in tau.
    """
    tau = np.asarray(tau, dtype=float)
    if tau.ndim != 1 or tau.size < 2:
        raise ValueError("tau must be a 1D axis with at least two samples")
    step = tau[1] - tau[0]
    if not np.allclose(np.diff(tau), step, rtol=1e-9, atol=1e-12 * abs(step)):
        raise ValueError("tau axis must be uniform")
    vals = radon_probe_values(params, tau)
    return RadialProfile(float(tau[0]), float(step), vals, "radon_of_eta")


# -- spectral fractional Laplacian -------------------------------------------

def frac_laplacian_1d(profile: RadialProfile, gamma: float, pad: int = 4) -> RadialProfile:
    """Apply ``(-d^2/dt^2)**gamma`` with the multiplier ``(2 pi |xi|)**(2 gamma)``.

    The samples are zero-padded to ``pad * n`` before the DFT; ``pad=1``
    treats the input as periodic.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be non-negative, got {gamma}")
    if pad < 1:
        raise ValueError("pad factor must be >= 1")
    vals = np.asarray(profile.values, dtype=float)
    if gamma == 0:
        return RadialProfile(profile.start, profile.step, vals.copy(), "fraclap_of_radon")
    n = vals.size
    m = pad * n
    xi = np.fft.rfftfreq(m, d=profile.step)
    mult = (2 * np.pi * xi) ** (2 * gamma)
    out = np.fft.irfft(np.fft.rfft(vals, n=m) * mult, n=m)[:n]
    return RadialProfile(profile.start, profile.step, out, "fraclap_of_radon")


# -- closed-form spectra of zeta_tilde ---------------------------------------

def probe_freq_2d(h: float, omega):
    """Hankel-form spectrum of ``zeta_tilde`` in 2D (alpha = 3).

    Reproduces ``int_0^h J0(2 pi w r) r/h^3 dr + int_h^inf J0(2 pi w r)/r^2 dr``,
    which is the 2D Fourier transform divided by ``2 pi``.
    """
    omega = np.asarray(omega, dtype=float)
    lam = 2 * np.pi * omega * h
    safe = np.where(lam > 0, lam, 1.0)
    j0, j1 = specfun.bessel_j0(safe), specfun.bessel_j1(safe)
    h0, h1 = specfun.struve_h0(safe), specfun.struve_h1(safe)
    core = j1 / safe
    tail = (
        (safe * safe + 1) * j0
        - safe * (1 - np.pi * safe / 2 * h0) * j1
        - np.pi * safe * safe / 2 * h1 * j0
        - safe
    )
    out = np.where(lam > 0, (core + tail) / h, 1.5 / h)
    return out if out.ndim else float(out)


def probe_freq_3d(h: float, omega):
    """Fourier transform of ``zeta_tilde`` in 3D (alpha = 4)."""
    omega = np.asarray(omega, dtype=float)
    lam = 2 * np.pi * omega * h
    safe = np.where(lam > 0, lam, 1.0)
    small = lam < 2e-2
    l2 = safe * safe
    # (sin l - l cos l)/l^3, Taylor series below the switch
    ratio = np.where(
        small,
        1 / 3 - l2 / 30 + l2 * l2 / 840 - l2 ** 3 / 45360,
        (np.sin(safe) - safe * np.cos(safe)) / (safe ** 3),
    )
    rest = (
        safe * (-np.pi + 2 * specfun.sine_integral(safe)) / 4
        + np.sin(safe) / (2 * safe)
        + np.cos(safe) / 2
    )
    out = np.where(lam > 0, 4 * np.pi / h * (ratio + rest), 16 * np.pi / (3 * h))
    return out if out.ndim else float(out)
