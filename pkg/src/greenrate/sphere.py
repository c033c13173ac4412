"""Scattering Green tensor components for two dipoles outside a microsphere.

Partial-wave (Mie-type) series for the two component families the rate
calculations need: parallel tangential dipoles (the phi-phi component, both
points in the phi = 0 meridian with A on the polar axis) and radial dipoles
(the r-r component).  With z = k1 r, x = cos(theta_B) and scattering
coefficients B^M_l, B^N_l,

  G_phiphi = (i k1/4pi) Sum_l (2l+1)/(l(l+1)) {
                 B^M_l h_l(z_A) h_l(z_B) [l(l+1) P_l(x) - x P_l'(x)]
               + B^N_l ([z h_l]'(z_A)/z_A) ([z h_l]'(z_B)/z_B) P_l'(x) }

  G_rr     = (i k1/4pi) Sum_l l(l+1)(2l+1)
                 B^N_l (h_l(z_A)/z_A) (h_l(z_B)/z_B) P_l(x)

The radial series carries P_l, the factor an electrostatic multipole
expansion of the exterior problem fixes unambiguously (the tangential
bracket pair are the standard angular functions tau_l and pi_l).  The
coefficients are evaluated through the interior logarithmic derivative,
which stays bounded for the strongly absorbing interiors where the Riccati
functions themselves overflow:

  B^M_l = -[m D_l psi_l(a1) - psi_l'(a1)] / [m D_l xi_l(a1) - xi_l'(a1)]
  B^N_l = -[(D_l/m) psi_l(a1) - psi_l'(a1)] / [(D_l/m) xi_l(a1) - xi_l'(a1)]

with a1 = k1 a, m = k2/k1, D_l the log-derivative of psi_l at k2 a.  In a
(scattered/incident)-ratio convention these are minus the textbook Mie
coefficients, B^M = -b_l and B^N = -a_l.

For evaluation points close to the surface the series tail decays only
geometrically with ratio a^2/(r_A r_B), so hundreds to thousands of orders
can be needed; all families are therefore combined in scaled
mantissa/exponent arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_REDUCED
from .errors import SeriesTruncationError
from .media import PermittivityModel, wavenumber
from .specfun import (
    L_MAX,
    _legendre_family_unchecked,
    _log_derivative_family,
    _sc_add,
    _sc_collapse,
    _sc_div,
    _sc_mul,
    _sc_scale,
    _scaled_h1_family,
    _scaled_j_family,
)

SERIES_L_CAP = 2500  # near-surface geometric tails need far more than L_MAX orders


@dataclass(frozen=True)
class SphereGeometry:
    """Microsphere of radius a with permittivity models outside and inside."""

    radius: float
    outside: PermittivityModel
    inside: PermittivityModel

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be > 0")


@dataclass(frozen=True)
class SpherePositions:
    """Radial distances of A and B (> radius) and the polar angle of B.

    A sits on the polar axis (theta_A = 0); both azimuths are 0.
    """

    r_a: float
    r_b: float
    theta_b: float

    def __post_init__(self):
        if not 0.0 <= self.theta_b <= math.pi:
            raise ValueError("theta_b must lie in [0, pi]")

    def validate_outside(self, geometry: SphereGeometry):
        if self.r_a <= geometry.radius or self.r_b <= geometry.radius:
            raise ValueError("both dipoles must lie outside the sphere (r > a)")


def _sc_slice(fam, sl):
    return fam[0][sl], fam[1][sl]


def _riccati_at(fam, z, ls):
    """(psi_l or xi_l, its derivative) for l in ls, from a scaled family."""
    f_l = _sc_slice(fam, slice(1, None))
    f_lm1 = _sc_slice(fam, slice(0, -1))
    ricc = _sc_scale(f_l, z)
    dricc = _sc_add(_sc_scale(f_lm1, z), _sc_scale(f_l, -ls.astype(complex)))
    return ricc, dricc


def _mie_arrays(l_top: int, omega: float, geometry: SphereGeometry, c: float):
    """B^M_l and B^N_l for l = 1..l_top in scaled (mantissa, exponent) form.

    Kept scaled: beyond l ~ |k1 a| the coefficients fall off factorially and
    would underflow plain doubles long before the series products
    B * h_l(z_A) h_l(z_B) (which decay only geometrically) become
    negligible.
    """
    k1 = complex(wavenumber(geometry.outside, omega, c))
    k2 = complex(wavenumber(geometry.inside, omega, c))
    a1 = k1 * geometry.radius
    m = k2 / k1
    ls = np.arange(1, l_top + 1)

    jfam = _scaled_j_family(l_top, a1)
    hfam = _scaled_h1_family(l_top, a1)
    psi, dpsi = _riccati_at(jfam, a1, ls)
    xi, dxi = _riccati_at(hfam, a1, ls)
    d2 = _log_derivative_family(l_top, m * a1)[1:]

    def coeff(weight):
        num = _sc_add(_sc_scale(psi, weight), _sc_scale(dpsi, -1.0))
        den = _sc_add(_sc_scale(xi, weight), _sc_scale(dxi, -1.0))
        mant, ex = _sc_div(num, den)
        return -mant, ex

    return k1, coeff(m * d2), coeff(d2 / m)


def mie_coefficients(l: int, omega: float, geometry: SphereGeometry,
                     c: float = C_REDUCED):
    """Scattering coefficients (B_M, B_N) of order l >= 1."""
    if l < 1:
        raise ValueError("l must be >= 1")
    if l > L_MAX:
        raise SeriesTruncationError(
            f"order {l} exceeds the supported ceiling {L_MAX}", l_max=L_MAX
        )
    _, b_m, b_n = _mie_arrays(l, omega, geometry, c)
    return (
        complex(_sc_collapse(b_m)[l - 1]),
        complex(_sc_collapse(b_n)[l - 1]),
    )


def _auto_l_start(k1: complex, positions: SpherePositions) -> int:
    x = abs(k1.real) * max(positions.r_a, positions.r_b)
    return int(math.ceil(x + 4.0 * x ** (1.0 / 3.0) + 10.0))


def _series_terms(kind, l_top, omega, geometry, positions, c):
    """Per-order series terms (without the ik1/4pi prefactor), l = 1..l_top."""
    k1, b_m, b_n = _mie_arrays(l_top, omega, geometry, c)
    z_a = k1 * positions.r_a
    z_b = k1 * positions.r_b
    ls = np.arange(1, l_top + 1)
    lsf = ls.astype(float)
    x = math.cos(positions.theta_b)
    p, dp = _legendre_family_unchecked(l_top, x)

    ha = _scaled_h1_family(l_top, z_a)
    hb = _scaled_h1_family(l_top, z_b)
    if kind == "radial":
        prod = _sc_mul(
            _sc_scale(_sc_slice(ha, slice(1, None)), 1.0 / z_a),
            _sc_scale(_sc_slice(hb, slice(1, None)), 1.0 / z_b),
        )
        weights = lsf * (lsf + 1.0) * (2.0 * lsf + 1.0) * p[1:]
        return k1, _sc_collapse(_sc_scale(_sc_mul(b_n, prod), weights))

    # tangential (phi-phi)
    _, dxa = _riccati_at(ha, z_a, ls)
    _, dxb = _riccati_at(hb, z_b, ls)
    prod_m = _sc_mul(_sc_slice(ha, slice(1, None)), _sc_slice(hb, slice(1, None)))
    prod_n = _sc_mul(_sc_scale(dxa, 1.0 / z_a), _sc_scale(dxb, 1.0 / z_b))
    ang_m = lsf * (lsf + 1.0) * p[1:] - x * dp[1:]
    ang_n = dp[1:]
    pref = (2.0 * lsf + 1.0) / (lsf * (lsf + 1.0))
    term_m = _sc_collapse(_sc_scale(_sc_mul(b_m, prod_m), pref * ang_m))
    term_n = _sc_collapse(_sc_scale(_sc_mul(b_n, prod_n), pref * ang_n))
    return k1, term_m + term_n


def _sum_series(kind, omega, geometry, positions, c, tail_tol):
    positions.validate_outside(geometry)
    k1 = complex(wavenumber(geometry.outside, omega, c))
    l_start = _auto_l_start(k1, positions)
    rho = geometry.radius**2 / (positions.r_a * positions.r_b)
    # geometric tail: one extension sized from the known ratio, then the cap
    est = l_start + 25
    if rho < 1.0 and tail_tol > 0:
        est = max(
            est,
            l_start + int(math.log(tail_tol * (1.0 - rho) / 20.0) / math.log(rho)) + 10,
        )
    plans = sorted({min(est, SERIES_L_CAP), SERIES_L_CAP})

    for l_top in plans:
        k1, terms = _series_terms(kind, l_top, omega, geometry, positions, c)
        csum = np.cumsum(terms)
        mags = np.abs(terms)
        partial = np.abs(csum)
        for l in range(max(l_start, 3), l_top + 1):
            i = l - 1
            if mags[max(0, i - 2) : i + 1].max() <= tail_tol * partial[i]:
                pref = 1j * k1 / (4.0 * np.pi)
                return complex(pref * csum[i]), l
    pref = 1j * k1 / (4.0 * np.pi)
    raise SeriesTruncationError(
        f"series tail above {tail_tol:g} at order cap {SERIES_L_CAP}",
        partial_sum=complex(pref * csum[-1]),
        l_max=SERIES_L_CAP,
    )


def sphere_refl_tangential(
    omega: float,
    geometry: SphereGeometry,
    positions: SpherePositions,
    c: float = C_REDUCED,
    tail_tol: float = 1e-10,
) -> complex:
    """Reflection component G^refl_phiphi for parallel tangential dipoles."""
    value, _ = _sum_series("tangential", omega, geometry, positions, c, tail_tol)
    return value


def sphere_refl_radial(
    omega: float,
    geometry: SphereGeometry,
    positions: SpherePositions,
    c: float = C_REDUCED,
    tail_tol: float = 1e-10,
) -> complex:
    """Reflection component G^refl_rr for radially oriented dipoles."""
    value, _ = _sum_series("radial", omega, geometry, positions, c, tail_tol)
    return value
