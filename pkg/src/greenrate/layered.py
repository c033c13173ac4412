"""Reflection Green tensor for planar multi-slab structures.

Geometry and coordinates
------------------------
Layers are listed top to bottom; the first and last are semi-infinite.
Both points sit in the source layer j.  Within an interior slab of
thickness d, z is measured upward from the slab's lower interface,
0 < z < d.  For the top half-space z > 0 is the height above the stack;
for the bottom half-space z < 0 is the (negative) depth below it.  The
lateral frame is chosen with the separation along x: R_x >= 0, R_y = 0,
R_z = z_b - z_a.  Tensor components xy, yx, yz, zy vanish in this frame.

The reflection tensor is the half-line wavevector integral

    G_refl = (i / 4pi) * Int_0^inf dk k/(2 beta_j) e^{i beta_j d_j} Gt(k)

with beta_j = sqrt(k_j^2 - k^2), Im beta_j >= 0.  Gt couples upward- and
downward-looking stack reflection coefficients r_+/r_- through standing-wave
amplitudes and the cavity denominator D_q = 1 - r_+ r_- e^{2 i beta_j d_j}.
Internally every exponential is folded with the prefactor phase so each
factor has a nonpositive growth exponent; thick slabs therefore never
overflow.  For a bounding half-space as source layer, r on the open side
is 0 and d_j = 0.

Sign conventions are pinned by the single-interface limits: a z-dipole
approaching a perfect mirror doubles its decay rate, an in-plane dipole's
rate vanishes, and stack coefficients reduce to the Fresnel forms
r_s = (beta_a - beta_b)/(beta_a + beta_b),
r_p = (eps_b beta_a - eps_a beta_b)/(eps_b beta_a + eps_a beta_b).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .bulk import GreenResult
from .constants import C_REDUCED
from .errors import AsymptoticDomainError, PolePinchError
from .media import PermittivityModel, axial_wavenumber, evaluate, wavenumber
from .quadrature import IntegralResult, QuadratureSpec, integrate_segmented
from .specfun import bessel_J

_EZ = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class Layer:
    material: PermittivityModel
    thickness: float  # math.inf for the two bounding media


@dataclass(frozen=True)
class LayeredStack:
    """Ordered slabs, top to bottom, with semi-infinite bounding media."""

    layers: tuple
    source_layer: int

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        if len(layers) < 2:
            raise ValueError("a stack needs at least two layers")
        if not (math.isinf(layers[0].thickness) and math.isinf(layers[-1].thickness)):
            raise ValueError("first and last layers must be semi-infinite")
        for lay in layers[1:-1]:
            if not (0 < lay.thickness < math.inf):
                raise ValueError("interior layers need finite positive thickness")
        if not 0 <= self.source_layer < len(layers):
            raise ValueError("source_layer out of range")

    @property
    def source_thickness(self) -> float:
        d = self.layers[self.source_layer].thickness
        return 0.0 if math.isinf(d) else d

    def validate_positions(self, pos: "InLayerPositions"):
        j, n = self.source_layer, len(self.layers)
        if 0 < j < n - 1:
            d = self.layers[j].thickness
            for z, name in ((pos.z_a, "z_a"), (pos.z_b, "z_b")):
                if not 0 < z < d:
                    raise ValueError(f"{name} = {z!r} outside slab (0, {d!r})")
        elif j == 0:
            if pos.z_a <= 0 or pos.z_b <= 0:
                raise ValueError("top half-space positions need z > 0")
        else:
            if pos.z_a >= 0 or pos.z_b >= 0:
                raise ValueError("bottom half-space positions need z < 0")


@dataclass(frozen=True)
class InLayerPositions:
    """Coordinates of the two points inside the source layer."""

    z_a: float
    z_b: float
    rx: float = 0.0

    def __post_init__(self):
        if self.rx < 0:
            raise ValueError("rx must be >= 0 (frame chosen with R_y = 0)")

    @property
    def rz(self) -> float:
        return self.z_b - self.z_a


@dataclass(frozen=True)
class StackReflection:
    """The four total reflection coefficients at fixed (omega, k_par)."""

    r_p_plus: complex
    r_p_minus: complex
    r_s_plus: complex
    r_s_minus: complex


def fresnel(pol: str, eps_a, eps_b, beta_a, beta_b):
    """Single-interface reflection for a wave in medium a against medium b."""
    if pol == "s":
        return (beta_a - beta_b) / (beta_a + beta_b)
    if pol == "p":
        return (eps_b * beta_a - eps_a * beta_b) / (eps_b * beta_a + eps_a * beta_b)
    raise ValueError(f"polarization must be 'p' or 's', got {pol!r}")


def _betas(stack: LayeredStack, omega: float, k_par, c: float):
    eps = [complex(evaluate(l.material, omega)) for l in stack.layers]
    ks = [complex(wavenumber(l.material, omega, c)) for l in stack.layers]
    k_par = np.asarray(k_par, dtype=float)
    betas = [axial_wavenumber(k, k_par) for k in ks]
    return eps, ks, betas


def _recurse(pol, eps, betas, thicknesses, order):
    """Total reflection seen from the first layer in ``order`` toward the rest.

    ``order`` lists layer indices starting at the source layer's neighbor and
    marching outward to the bounding medium.
    """
    r = np.zeros_like(betas[0])
    # march from the far bounding medium back toward the source layer
    for pos in range(len(order) - 1, 0, -1):
        m_near, m_far = order[pos - 1], order[pos]
        rho = fresnel(pol, eps[m_near], eps[m_far], betas[m_near], betas[m_far])
        d_far = thicknesses[m_far]
        if math.isinf(d_far):
            r = rho  # nothing beyond a bounding medium
        else:
            phase = np.exp(2j * betas[m_far] * d_far)
            r = (rho + r * phase) / (1.0 + rho * r * phase)
    return r


def _stack_r(stack, side, pol, eps, betas):
    j, n = stack.source_layer, len(stack.layers)
    thick = [l.thickness for l in stack.layers]
    if side == "+":
        if j == 0:
            return np.zeros_like(betas[0])
        order = list(range(j, -1, -1))  # j, j-1, ..., 0
    elif side == "-":
        if j == n - 1:
            return np.zeros_like(betas[0])
        order = list(range(j, n))  # j, j+1, ..., n-1
    else:
        raise ValueError(f"side must be '+' or '-', got {side!r}")
    return _recurse(pol, eps, betas, thick, order)


def stack_reflection(
    stack: LayeredStack, side: str, omega: float, k_par, pol: str = "p",
    c: float = C_REDUCED,
):
    """Total reflection coefficient r^q_side of the source layer's waves."""
    if pol not in ("p", "s"):
        raise ValueError(f"polarization must be 'p' or 's', got {pol!r}")
    eps, _, betas = _betas(stack, omega, k_par, c)
    out = _stack_r(stack, side, pol, eps, betas)
    return complex(out) if out.ndim == 0 else out


def reflections(stack: LayeredStack, omega: float, k_par, c: float = C_REDUCED):
    """All four coefficients at once (scalar k_par)."""
    eps, _, betas = _betas(stack, omega, k_par, c)
    return StackReflection(
        r_p_plus=complex(_stack_r(stack, "+", "p", eps, betas)),
        r_p_minus=complex(_stack_r(stack, "-", "p", eps, betas)),
        r_s_plus=complex(_stack_r(stack, "+", "s", eps, betas)),
        r_s_minus=complex(_stack_r(stack, "-", "s", eps, betas)),
    )


def _amplitudes(stack, pos, omega, k_par, c, phased):
    """Standing-wave amplitudes C^q_+-, S^q_+- for both polarizations.

    With ``phased`` the global factor e^{i beta_j d_j} is folded in, which
    leaves every exponential with a nonpositive growth exponent (stable for
    thick slabs and large k_par).  Without it the amplitudes are the bare
    ones that pair with the explicit phase in the Sommerfeld integral.
    Terms whose reflection coefficient is identically zero (bounding-layer
    source) are skipped rather than multiplied out, so their growing
    exponentials are never formed.
    """
    eps, ks, betas = _betas(stack, omega, k_par, c)
    j, n = stack.source_layer, len(stack.layers)
    kj, bj = ks[j], betas[j]
    d = stack.source_thickness
    zsum = pos.z_a + pos.z_b
    has_up = j > 0
    has_dn = j < n - 1

    amp = {}
    zero = np.zeros_like(bj)
    for pol in ("p", "s"):
        r_up = _stack_r(stack, "+", pol, eps, betas) if has_up else zero
        r_dn = _stack_r(stack, "-", pol, eps, betas) if has_dn else zero
        if phased:
            t_dn = r_dn * np.exp(1j * bj * zsum) if has_dn else zero
            t_up = r_up * np.exp(1j * bj * (2 * d - zsum)) if has_up else zero
            if has_up and has_dn:
                cr_p = r_up * r_dn * np.exp(1j * bj * (2 * d + pos.rz))
                cr_m = r_up * r_dn * np.exp(1j * bj * (2 * d - pos.rz))
            else:
                cr_p = cr_m = zero
        else:
            t_dn = r_dn * np.exp(1j * bj * (zsum - d)) if has_dn else zero
            t_up = r_up * np.exp(-1j * bj * (zsum - d)) if has_up else zero
            if has_up and has_dn:
                rr = r_up * r_dn * np.exp(1j * bj * d)
                cr_p = rr * np.exp(1j * bj * pos.rz)
                cr_m = rr * np.exp(-1j * bj * pos.rz)
            else:
                cr_p = cr_m = zero
        if has_up and has_dn:
            dq = 1.0 - r_up * r_dn * np.exp(2j * bj * d)
            if np.any(np.abs(dq) < 1e-300):
                raise PolePinchError(
                    "guided-mode denominator vanished on the real axis; "
                    "material loss is required (gamma > 0)"
                )
        else:
            dq = 1.0
        amp[pol] = (
            (t_dn + t_up + cr_p + cr_m) / dq,  # C_+
            (t_dn + t_up - cr_p - cr_m) / dq,  # C_-
            (t_dn - t_up + cr_p - cr_m) / dq,  # S_+
            (t_dn - t_up - cr_p + cr_m) / dq,  # S_-
        )
    return kj, bj, amp


def _component_rows(kj, bj, amp, k_par, rx):
    x = k_par * rx
    j0, j1, j2 = bessel_J(0, x), bessel_J(1, x), bessel_J(2, x)
    cpp, cpm, spp, spm = amp["p"]
    csp = amp["s"][0]
    gxx = -(bj**2 / kj**2) * cpm * (j0 - j2) + csp * (j0 + j2)
    gyy = -(bj**2 / kj**2) * cpm * (j0 + j2) + csp * (j0 - j2)
    gzz = 2.0 * (k_par**2 / kj**2) * cpp * j0
    gxz = -2j * (bj * k_par / kj**2) * spp * j1
    gzx = +2j * (bj * k_par / kj**2) * spm * j1
    return np.stack([gxx, gyy, gzz, gxz, gzx], axis=-1)


def _phased_rows(stack, pos, omega, k_par, c):
    """(i/4pi) k/(2 beta) e^{i beta d} Gt rows; overflow-safe in k_par."""
    k_par = np.asarray(k_par, dtype=float)
    kj, bj, amp = _amplitudes(stack, pos, omega, k_par, c, phased=True)
    rows = _component_rows(kj, bj, amp, k_par, pos.rx)
    measure = (1j / (4.0 * np.pi)) * k_par / (2.0 * bj)
    return measure[..., None] * rows


def refl_integrand(stack, pos, omega, k_par, c: float = C_REDUCED) -> np.ndarray:
    """Bare plane-wave tensor Gt(k_par) as a 3x3 array.

    The Sommerfeld integral applies the measure k/(2 beta_j), the factor
    i/4pi and the phase e^{i beta_j d_j} on top of this.  The bare standing
    -wave amplitudes contain exponentials that grow with beta_j d_j, so for
    deep-evanescent k_par in thick slabs prefer the phase-folded internal
    form used by refl_green.
    """
    stack.validate_positions(pos)
    scalar = np.ndim(k_par) == 0
    k_arr = np.atleast_1d(np.asarray(k_par, dtype=float))
    kj, bj, amp = _amplitudes(stack, pos, omega, k_arr, c, phased=False)
    bare = _component_rows(kj, bj, amp, k_arr, pos.rx)
    out = np.zeros(k_arr.shape + (3, 3), dtype=complex)
    out[..., 0, 0] = bare[..., 0]
    out[..., 1, 1] = bare[..., 1]
    out[..., 2, 2] = bare[..., 2]
    out[..., 0, 2] = bare[..., 3]
    out[..., 2, 0] = bare[..., 4]
    return out[0] if scalar else out


def sommerfeld_breakpoints(stack: LayeredStack, omega: float, c: float = C_REDUCED):
    """Branch points and surface-pole estimates along the k_par axis."""
    eps = [complex(evaluate(l.material, omega)) for l in stack.layers]
    ks = [complex(wavenumber(l.material, omega, c)) for l in stack.layers]
    pts = {k.real for k in ks if k.real > 0}
    j = stack.source_layer
    for nb in (j - 1, j + 1):
        if 0 <= nb < len(stack.layers):
            ratio = eps[nb] / (eps[j] + eps[nb])
            est = (ks[j] * np.sqrt(complex(ratio))).real
            if np.isfinite(est) and est > 0:
                pts.add(float(est))
    return sorted(pts)


def _tail_decay(stack: LayeredStack, pos: InLayerPositions) -> float:
    j, n = stack.source_layer, len(stack.layers)
    zsum = pos.z_a + pos.z_b
    if j == 0:
        return zsum
    if j == n - 1:
        return -zsum
    d = stack.layers[j].thickness
    return min(zsum, 2 * d - zsum, 2 * d - abs(pos.rz))


def refl_green(
    stack: LayeredStack,
    pos: InLayerPositions,
    omega: float,
    d_a=_EZ,
    d_b=_EZ,
    part: str = "full",
    spec: QuadratureSpec | None = None,
    c: float = C_REDUCED,
) -> GreenResult:
    """Reflection Green tensor by Sommerfeld integration over k_par.

    part selects the z-propagating window [0, Re k_j] ('propagating'), the
    purely z-evanescent remainder [Re k_j, inf) ('evanescent'), or the whole
    half-line ('full').  Quadrature failures propagate as ConvergenceError.
    """
    stack.validate_positions(pos)
    spec = spec or QuadratureSpec()
    k_split = complex(wavenumber(stack.layers[stack.source_layer].material, omega, c)).real
    if k_split <= 0:
        raise ValueError("source layer must have Re k > 0")

    if part == "full":
        a, b = 0.0, math.inf
    elif part == "propagating":
        a, b = 0.0, k_split
    elif part == "evanescent":
        a, b = k_split, math.inf
    else:
        raise ValueError(f"part must be full|propagating|evanescent, got {part!r}")

    bps = set(sommerfeld_breakpoints(stack, omega, c))
    bps.add(k_split)
    qspec = QuadratureSpec(
        rel_tol=spec.rel_tol,
        abs_tol=spec.abs_tol,
        max_subdivisions=spec.max_subdivisions,
        breakpoints=sorted(bps),
    )
    # branch points of every layer's beta produce sqrt behavior on the axis
    branch_pts = [
        complex(wavenumber(lay.material, omega, c)).real for lay in stack.layers
    ]

    def rows(k_par):
        return _phased_rows(stack, pos, omega, k_par, c)

    res: IntegralResult = integrate_segmented(
        rows,
        a,
        b,
        qspec,
        tail_decay=_tail_decay(stack, pos),
        sqrt_singularities=[p for p in branch_pts if p > 0],
    )
    g = np.zeros((3, 3), dtype=complex)
    g[0, 0], g[1, 1], g[2, 2] = res.value[0], res.value[1], res.value[2]
    g[0, 2], g[2, 0] = res.value[3], res.value[4]
    return GreenResult(tensor=g, d_a=d_a, d_b=d_b, error=res.error)


def interface_asymptotic(
    eps1: float,
    eps2,
    z_a: float,
    z_b: float,
    rx: float,
    omega: float,
    d_a=_EZ,
    d_b=_EZ,
    c: float = C_REDUCED,
) -> GreenResult:
    """Near-interface closed form for two molecules in half-space medium 1.

    Quasi-static image expansion controlled by the factor
    (eps2 - eps1)/(eps2 + eps1), valid for k_1 (z_a + z_b) and k_1 R_x both
    small; enforced below 0.5 with a warning above 0.2.

    The yy entry follows the static limit of the exact Sommerfeld integral,
    (Z^2 + R_x^2) in the numerator, which the image construction confirms.
    """
    eps1 = float(eps1)
    if eps1 <= 0:
        raise ValueError("medium 1 must have real positive permittivity")
    if z_a <= 0 or z_b <= 0:
        raise ValueError("both molecules must sit inside medium 1 (z > 0)")
    k1 = math.sqrt(eps1) * omega / c
    zsum = z_a + z_b
    for label, val in (("k1*(z_a+z_b)", k1 * zsum), ("k1*R_x", k1 * rx)):
        if val >= 0.5:
            raise AsymptoticDomainError(
                f"{label} = {val:.3g} outside the near-interface regime (< 0.5)"
            )
        if val > 0.2:
            warnings.warn(
                f"{label} = {val:.3g} > 0.2; asymptotic accuracy degrades",
                stacklevel=2,
            )

    kappa = (complex(eps2) - eps1) / (complex(eps2) + eps1)
    s2 = zsum**2 + rx**2
    s = math.sqrt(s2)
    pref = kappa / (4.0 * np.pi * k1**2)

    g = np.zeros((3, 3), dtype=complex)
    g[0, 0] = pref * (zsum**2 - 2.0 * rx**2) / s**5
    g[1, 1] = pref * (zsum**2 + rx**2) / s**5
    g[0, 2] = pref * 3.0 * zsum * rx / s**5
    g[2, 0] = -pref * 3.0 * zsum * rx / s**5
    g[2, 2] = (kappa / (4.0 * np.pi)) * (1.0 / s) * (
        (2.0 * zsum**2 - rx**2) / (k1**2 * s2**2) + 1.0
    )
    return GreenResult(tensor=g, d_a=d_a, d_b=d_b)
