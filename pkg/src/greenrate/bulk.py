"""Homogeneous-medium (bulk) Green tensor and dipole-projected coupling.

Closed form for two points separated by R in a medium of permittivity eps,
with q = sqrt(eps) * omega / c on the Im q >= 0 branch:

    G(R) = (q e^{iqR} / 4pi) [ -(I - 3 RR) (1/(qR)^3 - i/(qR)^2)
                               + (I - RR) / (qR) ]

(RR the unit dyad along R).  The real part diverges at coincidence and is
left unregularized; decay rates consume only the imaginary part, whose
coincidence limit is finite.  Local-field corrections are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import C_REDUCED
from .media import _sqrt_upper

_ORIENT_TOL = 1e-12


def _unit(v, name):
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    n = np.linalg.norm(v)
    if abs(n - 1.0) > _ORIENT_TOL:
        raise ValueError(f"{name} must be unit-norm within {_ORIENT_TOL:g}, |v| = {n!r}")
    return v


@dataclass(frozen=True)
class DipolePair:
    """Two point dipoles: positions, unit orientations, moment magnitudes."""

    r_a: np.ndarray
    r_b: np.ndarray
    d_a: np.ndarray
    d_b: np.ndarray
    mag_a: float = 1.0
    mag_b: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "r_a", np.asarray(self.r_a, dtype=float))
        object.__setattr__(self, "r_b", np.asarray(self.r_b, dtype=float))
        object.__setattr__(self, "d_a", _unit(self.d_a, "d_a"))
        object.__setattr__(self, "d_b", _unit(self.d_b, "d_b"))


@dataclass(frozen=True)
class GreenResult:
    """3x3 complex Green tensor plus its projection conj(d_b) . G . d_a.

    ``error`` is the propagated quadrature error bound for integrated
    tensors and 0 for closed forms.
    """

    tensor: np.ndarray
    d_a: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    d_b: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    error: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "tensor", np.asarray(self.tensor, dtype=complex))
        object.__setattr__(self, "d_a", _unit(self.d_a, "d_a"))
        object.__setattr__(self, "d_b", _unit(self.d_b, "d_b"))

    @property
    def projected(self) -> complex:
        return complex(np.conj(self.d_b) @ self.tensor @ self.d_a)


def bulk_tensor(r_b, r_a, eps, omega, c: float = C_REDUCED) -> np.ndarray:
    """Bulk Green tensor G(r_b, r_a, omega), units 1/length."""
    r_b = np.asarray(r_b, dtype=float)
    r_a = np.asarray(r_a, dtype=float)
    rvec = r_b - r_a
    dist = np.linalg.norm(rvec)
    if dist == 0.0:
        raise ValueError("coincident points: bulk tensor diverges at R = 0")
    rhat = rvec / dist
    q = _sqrt_upper(complex(eps)) * omega / c
    x = q * dist
    eye = np.eye(3)
    dyad = np.outer(rhat, rhat)
    near = 1.0 / x**3 - 1j / x**2
    return (q * np.exp(1j * x) / (4.0 * np.pi)) * (
        -(eye - 3.0 * dyad) * near + (eye - dyad) / x
    )


def bulk_coupling(pair: DipolePair, eps, omega, c: float = C_REDUCED) -> GreenResult:
    """Projected bulk coupling for a dipole pair; R = r_b - r_a must be > 0."""
    g = bulk_tensor(pair.r_b, pair.r_a, eps, omega, c)
    return GreenResult(tensor=g, d_a=pair.d_a, d_b=pair.d_b)


def bulk_coincidence_im(eps, omega, c: float = C_REDUCED) -> float:
    """Coincidence limit of Im[d . G . d]: q/(6 pi) for any unit d.

    Only defined for (effectively) lossless media; with absorption the
    coincidence limit of Im G diverges and a decay rate would need the
    local-field machinery that is out of scope here.
    """
    eps = complex(eps)
    if abs(eps.imag) > 1e-12 * abs(eps):
        raise ValueError("coincidence Im G requires a real permittivity")
    if eps.real <= 0:
        raise ValueError("coincidence Im G requires Re eps > 0")
    q = np.sqrt(eps.real) * omega / c
    return float(q / (6.0 * np.pi))
