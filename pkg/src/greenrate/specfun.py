"""Complex-argument special functions for the layered and spherical tensors.

Stability directions are fixed per family: spherical j_l uses downward
(Miller) recurrence normalized against the closed-form j_0/j_1, because
upward recurrence is unstable below the turning point; spherical h_l^(1)
uses upward recurrence, where it is the dominant solution.  Legendre
polynomials use the Bonnet recurrence, stable on [-1, 1].
"""

from __future__ import annotations

import numpy as np
from scipy import special as _sps

L_MAX = 200  # order ceiling for the public single-order interface


def bessel_J(n: int, x):
    """Cylindrical Bessel function J_n for n in {0, 1, 2}, real x >= 0."""
    if n not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {n}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be >= 0")
    if n == 0:
        out = _sps.j0(x)
    elif n == 1:
        out = _sps.j1(x)
    else:
        out = _sps.jn(2, x)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Spherical Bessel / Hankel families
# ---------------------------------------------------------------------------

def _check_order(l: int):
    if l < 0:
        raise ValueError(f"order must be >= 0, got {l}")
    if l > L_MAX:
        raise ValueError(f"order {l} exceeds ceiling {L_MAX}")


def spherical_bessel_j_family(l_max: int, z) -> np.ndarray:
    """j_0(z) .. j_{l_max}(z) by downward (Miller) recurrence, complex z."""
    _check_order(l_max)
    z = complex(z)
    if z == 0:
        out = np.zeros(l_max + 1, dtype=complex)
        out[0] = 1.0
        return out
    return _sc_collapse(_scaled_j_family(l_max, z))


def spherical_hankel_h1_family(l_max: int, z) -> np.ndarray:
    """h_0^(1)(z) .. h_{l_max}^(1)(z) by upward recurrence; z != 0."""
    _check_order(l_max)
    return _sc_collapse(_scaled_h1_family(l_max, z))


def spherical_bessel_j(l: int, z) -> complex:
    """Spherical Bessel function of the first kind, complex argument."""
    return complex(spherical_bessel_j_family(l, z)[l])


def spherical_hankel_h1(l: int, z) -> complex:
    """Spherical Hankel function of the first kind, complex argument != 0."""
    return complex(spherical_hankel_h1_family(l, z)[l])


def _order_minus_one(kind: str, z: complex) -> complex:
    # j_{-1}(z) = cos z / z;  h^(1)_{-1}(z) = e^{iz} / z
    if kind == "j":
        return np.cos(z) / z
    return np.exp(1j * z) / z


def riccati_derivative(kind: str, l: int, z) -> complex:
    """Derivative of the Riccati function, [z f_l(z)]' = z f_{l-1}(z) - l f_l(z).

    kind is 'j' or 'h1'.  Needed for the spherical-wave impedance matching.
    """
    if kind not in ("j", "h1"):
        raise ValueError(f"kind must be 'j' or 'h1', got {kind!r}")
    _check_order(l)
    z = complex(z)
    if z == 0:
        raise ValueError("z = 0 not supported")
    if l == 0:
        f_prev = _order_minus_one(kind, z)
        return complex(z * f_prev)
    fam = (
        spherical_bessel_j_family(l, z)
        if kind == "j"
        else spherical_hankel_h1_family(l, z)
    )
    return complex(z * fam[l - 1] - l * fam[l])


# ---------------------------------------------------------------------------
# Legendre polynomials
# ---------------------------------------------------------------------------

def legendre_P_family(l_max: int, x: float):
    """(P_l(x), P_l'(x)) for l = 0..l_max, real x in [-1, 1].

    P' is the derivative with respect to the argument; at the endpoints it
    is taken from the analytic limit P_l'(+-1) = (+-1)**(l+1) * l(l+1)/2.
    """
    _check_order(l_max)
    x = float(x)
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [-1, 1], got {x}")
    p = np.zeros(l_max + 1)
    p[0] = 1.0
    if l_max >= 1:
        p[1] = x
    for l in range(1, l_max):
        p[l + 1] = ((2 * l + 1) * x * p[l] - l * p[l - 1]) / (l + 1)

    dp = np.zeros(l_max + 1)
    one_m_x2 = 1.0 - x * x
    ls = np.arange(l_max + 1)
    if one_m_x2 < 1e-12:
        sign = 1.0 if x > 0 else -1.0
        dp = (sign ** (ls + 1)) * ls * (ls + 1) / 2.0
    else:
        for l in range(1, l_max + 1):
            dp[l] = l * (p[l - 1] - x * p[l]) / one_m_x2
    return p, dp


def legendre_P(l: int, x: float) -> float:
    """Legendre polynomial P_l(x) on [-1, 1]."""
    return float(legendre_P_family(l, x)[0][l])


def legendre_P_deriv(l: int, x: float) -> float:
    """Derivative dP_l/dx on [-1, 1], endpoint limits handled analytically."""
    return float(legendre_P_family(l, x)[1][l])


# ---------------------------------------------------------------------------
# Scaled families: value = mant * 2**ex, elementwise
#
# The partial-wave series for near-surface sphere points converges only
# geometrically in l and needs orders far beyond where h_l overflows a
# double.  These private variants carry a base-2 exponent alongside the
# mantissa so products and ratios of astronomically large/small family
# members can be combined exactly; only the final, physically small terms
# are collapsed back to complex numbers.
# ---------------------------------------------------------------------------

_INTERNAL_L_CAP = 4000
_RENORM = 2.0**500


def _sc_normalize(m, e):
    m = np.asarray(m, dtype=complex)
    e = np.asarray(e, dtype=np.int64).copy()
    a = np.abs(m)
    nz = (a > 0) & np.isfinite(a)
    shift = np.zeros_like(e)
    shift[nz] = np.floor(np.log2(a[nz])).astype(np.int64)
    s32 = (-shift).astype(np.int32)  # ldexp handles huge shifts; exp2 would overflow
    scaled = np.ldexp(m.real, s32) + 1j * np.ldexp(m.imag, s32)
    zero = (a == 0.0)
    out = np.where(nz, scaled, np.where(zero, 0.0, m))
    return out, e + shift


def _sc_mul(a, b):
    return _sc_normalize(a[0] * b[0], a[1] + b[1])


def _sc_div(a, b):
    return _sc_normalize(a[0] / b[0], a[1] - b[1])


def _sc_add(a, b):
    e = np.maximum(a[1], b[1])
    m = a[0] * np.exp2((a[1] - e).astype(float)) + b[0] * np.exp2(
        (b[1] - e).astype(float)
    )
    return _sc_normalize(m, e)


def _sc_scale(a, c):
    return _sc_normalize(a[0] * np.asarray(c, dtype=complex), a[1])


def _sc_collapse(a):
    """Back to plain complex; exponents beyond the double range give inf/0."""
    m, e = a
    e32 = np.clip(e, -(2**30), 2**30).astype(np.int32)
    with np.errstate(over="ignore", under="ignore"):
        return np.ldexp(m.real, e32) + 1j * np.ldexp(m.imag, e32)


def _scaled_j_family(l_max: int, z):
    """(mant, ex) for j_0..j_{l_max}(z), downward recurrence, no overflow."""
    if l_max > _INTERNAL_L_CAP:
        raise ValueError(f"order {l_max} exceeds internal cap {_INTERNAL_L_CAP}")
    z = complex(z)
    top = max(l_max, int(abs(z)) + 1)
    start = top + max(35, int(np.sqrt(40.0 * top)))
    w = np.zeros(start + 2, dtype=complex)
    s = np.zeros(start + 2, dtype=np.int64)  # raw_n = w[n] * 2**s[n]
    w[start + 1] = 0.0
    w[start] = 1e-30
    for n in range(start, 0, -1):
        # bring f_{n+1} to the scale of f_n (exponent difference <= 0)
        nxt = (2 * n + 1) / z * w[n] - w[n + 1] * 2.0 ** float(s[n + 1] - s[n])
        if abs(nxt) > _RENORM:
            nxt /= _RENORM
            s[n - 1] = s[n] + 500
        else:
            s[n - 1] = s[n]
        w[n - 1] = nxt
    fam = _sc_normalize(w, s)
    # anchor against whichever closed form is farther from a zero
    j0 = np.sin(z) / z
    j1 = np.sin(z) / z**2 - np.cos(z) / z
    anchor, idx = (j0, 0) if abs(j0) >= abs(j1) else (j1, 1)
    ratio = _sc_div(
        _sc_normalize(np.array([anchor]), np.array([0])),
        (fam[0][idx : idx + 1], fam[1][idx : idx + 1]),
    )
    out = _sc_normalize(fam[0] * ratio[0][0], fam[1] + ratio[1][0])
    return out[0][: l_max + 1], out[1][: l_max + 1]


def _scaled_h1_family(l_max: int, z):
    """(mant, ex) for h^(1)_0..h^(1)_{l_max}(z), upward recurrence, no overflow."""
    if l_max > _INTERNAL_L_CAP:
        raise ValueError(f"order {l_max} exceeds internal cap {_INTERNAL_L_CAP}")
    z = complex(z)
    if z == 0:
        raise ValueError("h_l^(1) is singular at z = 0")
    mant = np.zeros(l_max + 1, dtype=complex)
    ex = np.zeros(l_max + 1, dtype=np.int64)
    eiz = np.exp(1j * z)
    prev, curr = -1j * eiz / z, -eiz * (z + 1j) / z**2
    offset = 0
    mant[0], ex[0] = prev, offset
    if l_max >= 1:
        mant[1], ex[1] = curr, offset
    for n in range(1, l_max):
        prev, curr = curr, (2 * n + 1) / z * curr - prev
        if abs(curr) > _RENORM:
            prev /= _RENORM
            curr /= _RENORM
            offset += 500
        mant[n + 1], ex[n + 1] = curr, offset
    return _sc_normalize(mant, ex)


def _log_derivative_family(l_max: int, z):
    """D_l(z) = psi_l'(z)/psi_l(z) for l = 1..l_max by downward recurrence.

    Bounded continued-fraction quantity; safe for the huge interior
    arguments of strongly absorbing spheres.  Returns an array indexed by l
    (entry 0 unused).
    """
    z = complex(z)
    n_start = max(l_max, int(abs(z))) + 40
    d = 0.0 + 0.0j
    out = np.zeros(l_max + 1, dtype=complex)
    for n in range(n_start, 0, -1):
        d = n / z - 1.0 / (d + n / z)
        if n - 1 <= l_max and n - 1 >= 1:
            out[n - 1] = d
    # out[l] currently holds D_l computed when stepping from l+1 to l
    return out


def _legendre_family_unchecked(l_max: int, x: float):
    """Legendre P and dP/dx to arbitrary order (internal, no L_MAX guard)."""
    p = np.zeros(l_max + 1)
    p[0] = 1.0
    if l_max >= 1:
        p[1] = x
    for l in range(1, l_max):
        p[l + 1] = ((2 * l + 1) * x * p[l] - l * p[l - 1]) / (l + 1)
    dp = np.zeros(l_max + 1)
    ls = np.arange(l_max + 1)
    one_m_x2 = 1.0 - x * x
    if one_m_x2 < 1e-12:
        sign = 1.0 if x > 0 else -1.0
        dp = (sign ** (ls + 1)) * ls * (ls + 1) / 2.0
    else:
        dp[1:] = ls[1:] * (p[:-1] - x * p[1:]) / one_m_x2
    return p, dp
