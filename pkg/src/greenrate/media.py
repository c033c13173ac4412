"""Material dispersion models and derived wavenumbers.

Permittivities are relative (dimensionless) and passive: Im eps(omega) >= 0
for omega > 0.  All wavenumber branches are fixed so that waves decay, not
grow, away from their sources: Im k >= 0 and Im beta >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .constants import C_REDUCED
from .errors import TableRangeError


@dataclass(frozen=True)
class Constant:
    """Frequency-independent relative permittivity."""

    eps: complex

    def __post_init__(self):
        if np.imag(self.eps) < 0:
            raise ValueError(f"passivity requires Im eps >= 0, got {self.eps}")


@dataclass(frozen=True)
class DrudeLorentz:
    """Single-resonance model eps = 1 + omega_p**2/(omega_t**2 - omega**2 - i*omega*gamma).

    omega_t = 0 gives the metallic (Drude) case.  gamma must be strictly
    positive: it keeps the guided-mode poles off the real axis, which the
    Sommerfeld integration relies on.
    """

    omega_p: float
    omega_t: float
    gamma: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.omega_p < 0 or self.omega_t < 0:
            raise ValueError("omega_p and omega_t must be >= 0")


@dataclass(frozen=True)
class Tabulated:
    """Tabulated permittivity, linearly interpolated on Re and Im separately.

    Entries must be strictly increasing in omega; evaluation outside the
    table raises (no extrapolation).
    """

    omegas: np.ndarray
    eps: np.ndarray

    def __init__(self, points):
        omegas = np.asarray([p[0] for p in points], dtype=float)
        eps = np.asarray([p[1] for p in points], dtype=complex)
        if omegas.size < 2:
            raise ValueError("tabulated model needs at least two points")
        if not np.all(np.diff(omegas) > 0):
            raise ValueError("tabulated omegas must be strictly increasing")
        if np.any(eps.imag < 0):
            raise ValueError("passivity requires Im eps >= 0 at every table point")
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "eps", eps)


PermittivityModel = Union[Constant, DrudeLorentz, Tabulated]


def evaluate(model: PermittivityModel, omega):
    """Complex relative permittivity eps(omega) for omega > 0.

    Accepts a scalar or an array of frequencies.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega must be > 0")
    if isinstance(model, Constant):
        out = np.broadcast_to(np.asarray(model.eps, dtype=complex), omega.shape).copy()
    elif isinstance(model, DrudeLorentz):
        out = 1.0 + model.omega_p**2 / (
            model.omega_t**2 - omega**2 - 1j * omega * model.gamma
        )
    elif isinstance(model, Tabulated):
        lo, hi = model.omegas[0], model.omegas[-1]
        if np.any(omega < lo) or np.any(omega > hi):
            raise TableRangeError(
                f"omega outside table range [{lo:g}, {hi:g}]"
            )
        out = np.interp(omega, model.omegas, model.eps.real) + 1j * np.interp(
            omega, model.omegas, model.eps.imag
        )
    else:
        raise TypeError(f"not a permittivity model: {model!r}")
    return out[()] if out.ndim == 0 else out


def wavenumber(model: PermittivityModel, omega, c: float = C_REDUCED):
    """Medium wavenumber k = sqrt(eps(omega)) * omega / c with Im k >= 0."""
    eps = evaluate(model, omega)
    return _sqrt_upper(np.asarray(eps, dtype=complex)) * np.asarray(omega) / c


def axial_wavenumber(k, k_par):
    """Axial wavenumber beta = sqrt(k**2 - k_par**2) on the Im beta >= 0 branch.

    For real k and k_par < k this is real positive; for k_par > k it is
    purely imaginary, i*|beta| (evanescent).  Vectorized over k_par.
    """
    k_par = np.asarray(k_par, dtype=float)
    if np.any(k_par < 0):
        raise ValueError("k_par must be >= 0")
    return _sqrt_upper(np.asarray(k, dtype=complex) ** 2 - k_par.astype(complex) ** 2)


def _sqrt_upper(z):
    """Complex sqrt on the branch with nonnegative imaginary part."""
    w = np.sqrt(np.asarray(z, dtype=complex))
    w = np.where(w.imag < 0, -w, w)
    return w[()] if w.ndim == 0 else w
