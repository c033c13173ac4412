"""Transfer and decay rate kernels, vibronic spectra, and total overlap rates.

The electronic kernels separate the environment from the molecular spectra:

    transfer kernel  w(omega)  = (2 pi/hbar^2) (omega^2/(eps0 c^2))^2
                                 |d_B* . G(r_B, r_A, omega) . d_A|^2
    decay kernel     Gamma(omega) = (2 omega^2/(hbar eps0 c^2))
                                 d_A* . Im G(r_A, r_A, omega) . d_A

Total rates fold these against vibronic line spectra (Lorentzian-broadened
Franck-Condon manifolds): the transfer rate is the frequency overlap of the
kernel with the donor emission and acceptor absorption densities, the decay
rate with the emission density alone.

With the default hbar = eps0 = 1 and reduced c the kernels carry an
arbitrary overall scale; ratios (the quantities all the figure scenarios
produce) are unaffected.  Pass SI constants for absolute SI rates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import C_REDUCED
from .errors import PassivityError
from .quadrature import QuadratureSpec, integrate_product_spectrum


@dataclass(frozen=True)
class LineSet:
    """Vibronic lines (center, weight) with a common Lorentzian HWHM.

    Weights are Franck-Condon factors p |v|^2 over a complete manifold and
    must sum to 1 within 1e-9; pass allow_unnormalized=True for truncated
    manifolds.
    """

    lines: tuple
    width: float
    allow_unnormalized: bool = False

    def __post_init__(self):
        lines = tuple((float(c), float(w)) for c, w in self.lines)
        object.__setattr__(self, "lines", lines)
        if not lines:
            raise ValueError("a line set needs at least one line")
        if self.width <= 0:
            raise ValueError("broadening width must be > 0")
        if any(c <= 0 for c, _ in lines):
            raise ValueError("line centers must be > 0")
        if any(w < 0 for _, w in lines):
            raise ValueError("line weights must be >= 0")
        total = sum(w for _, w in lines)
        if not self.allow_unnormalized and abs(total - 1.0) > 1e-9:
            raise ValueError(
                f"weights sum to {total!r}, not 1 (allow_unnormalized to override)"
            )

    @property
    def centers(self) -> np.ndarray:
        return np.array([c for c, _ in self.lines])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.lines])

    def density(self, omega):
        """Spectral density: sum of unit-area Lorentzians times the weights."""
        omega = np.asarray(omega, dtype=float)
        eta = self.width
        out = np.zeros_like(omega)
        for c, w in self.lines:
            out = out + w * (eta / np.pi) / ((omega - c) ** 2 + eta**2)
        return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class KernelCurve:
    """Kernel samples on a strictly increasing frequency grid (linear interp)."""

    omegas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        omegas = np.asarray(self.omegas, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if omegas.ndim != 1 or omegas.shape != values.shape:
            raise ValueError("omegas and values must be matching 1-d arrays")
        if not np.all(np.diff(omegas) > 0):
            raise ValueError("omega grid must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("kernel values must be finite")
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "values", values)

    def __call__(self, omega):
        return np.interp(omega, self.omegas, self.values)


def transfer_kernel(
    g_projected: complex,
    mag_a: float,
    mag_b: float,
    omega: float,
    *,
    hbar: float = 1.0,
    eps0: float = 1.0,
    c: float = C_REDUCED,
) -> float:
    """Electronic transfer-rate kernel from the projected two-point coupling."""
    if omega <= 0:
        raise ValueError("omega must be > 0")
    pref = (2.0 * np.pi / hbar**2) * (omega**2 / (eps0 * c**2)) ** 2
    return float(pref * (mag_a * mag_b) ** 2 * abs(g_projected) ** 2)


def decay_kernel(
    im_g_projected: float,
    mag_a: float,
    omega: float,
    *,
    hbar: float = 1.0,
    eps0: float = 1.0,
    c: float = C_REDUCED,
    passivity_tol: float = 1e-12,
) -> float:
    """Electronic decay-rate kernel from Im G at coincidence.

    Rejects inputs more negative than a small tolerance relative to the
    free-space scale omega/(6 pi c): total local densities of states are
    nonnegative for passive environments.
    """
    if omega <= 0:
        raise ValueError("omega must be > 0")
    scale = max(abs(im_g_projected), omega / (6.0 * np.pi * c))
    if im_g_projected < -passivity_tol * scale:
        raise PassivityError(
            f"negative coincidence Im G ({im_g_projected!r}) violates passivity"
        )
    return float(
        (2.0 * omega**2 / (hbar * eps0 * c**2)) * mag_a**2 * im_g_projected
    )


def total_transfer_rate(
    kernel_curve: KernelCurve,
    emission: LineSet,
    absorption: LineSet,
    spec: QuadratureSpec | None = None,
) -> float:
    """Total transfer rate: overlap of the kernel with both spectra."""
    return integrate_product_spectrum(kernel_curve, emission, absorption, spec)


def total_decay_rate(
    kernel_curve: KernelCurve,
    emission: LineSet,
    spec: QuadratureSpec | None = None,
) -> float:
    """Total decay rate: overlap of the kernel with the emission spectrum."""
    return integrate_product_spectrum(kernel_curve, emission, None, spec)


def orientation_average_transfer(
    g_tensor,
    mag_a: float,
    mag_b: float,
    omega: float,
    *,
    hbar: float = 1.0,
    eps0: float = 1.0,
    c: float = C_REDUCED,
) -> float:
    """Transfer kernel averaged over independent isotropic dipole orientations.

    <|d_B* . G . d_A|^2> = (|d_A|^2 |d_B|^2 / 9) sum_ij |G_ij|^2.
    """
    g_tensor = np.asarray(g_tensor, dtype=complex)
    pref = (2.0 * np.pi / hbar**2) * (omega**2 / (eps0 * c**2)) ** 2
    mean_sq = (mag_a * mag_b) ** 2 / 9.0 * float(np.sum(np.abs(g_tensor) ** 2))
    return float(pref * mean_sq)


def orientation_average_decay(
    g_tensor,
    mag_a: float,
    omega: float,
    *,
    hbar: float = 1.0,
    eps0: float = 1.0,
    c: float = C_REDUCED,
) -> float:
    """Decay kernel averaged over orientations: uses (|d_A|^2/3) Tr Im G."""
    g_tensor = np.asarray(g_tensor, dtype=complex)
    im_avg = float(np.trace(g_tensor).imag) / 3.0
    return decay_kernel(im_avg, mag_a, omega, hbar=hbar, eps0=eps0, c=c)


def emission_spectrum(
    omega_s,
    molecule: LineSet,
    r_obs,
    r_a,
    dipole,
    geometry,
    *,
    eps0: float = 1.0,
    c: float = C_REDUCED,
) -> np.ndarray:
    """Steady single-molecule emission spectrum at the observation point.

    Each vibronic line radiates independently with the field amplitude
    F = (omega^2/(eps0 c^2)) G(r_obs, r_A, omega_line) . d; the long-time
    spectrum is 2 pi sum_i w_i |F_i|^2 broadened by the line set's
    Lorentzian.  ``dipole`` is the full moment vector (orientation times
    magnitude).
    """
    from .engine import full_tensor  # local import; engine pulls in geometries

    omega_s = np.atleast_1d(np.asarray(omega_s, dtype=float))
    r_obs = np.asarray(r_obs, dtype=float)
    r_a = np.asarray(r_a, dtype=float)
    if np.allclose(r_obs, r_a):
        raise ValueError("observation point must differ from the molecule position")
    dipole = np.asarray(dipole, dtype=complex)
    eta = molecule.width

    out = np.zeros_like(omega_s)
    for center, weight in molecule.lines:
        if weight == 0.0:
            continue
        g, _ = full_tensor(geometry, r_obs, r_a, center, c=c)
        famp = (center**2 / (eps0 * c**2)) * (g @ dipole)
        strength = 2.0 * np.pi * weight * float(np.sum(np.abs(famp) ** 2))
        out += strength * (eta / np.pi) / ((omega_s - center) ** 2 + eta**2)
    return out
