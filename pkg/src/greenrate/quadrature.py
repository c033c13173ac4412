"""Adaptive integration for oscillatory, near-singular kernel integrands.

The engine is a globally adaptive bisection scheme built on a nested pair of
open Fejer (second kind) rules with 15 and 31 interior nodes.  Open rules
matter here: breakpoints are allowed to sit on integrable endpoint
singularities (inverse square roots at Sommerfeld branch points), so the
integrand is never evaluated at a segment end.  The 15-node estimate reuses
every other node of the 31-node rule, so each panel costs one batched
evaluation, and integrands are vectorized over abscissa arrays.

Semi-infinite upper limits are mapped onto (0, 1] with the exponential
substitution x = x0 - ln(t)/decay, which requires a declared positive decay
constant for the tail.

Panel sums are reduced in fixed (position-sorted) order, so results are
deterministic and independent of refinement scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, CoverageError

_N_FINE = 32  # Fejer-2 parameter; 31 interior nodes, nested over the 15-node rule


def _fejer2(n: int):
    j = np.arange(1, n)
    theta = j * np.pi / n
    m = np.arange(1, n // 2 + 1)
    w = (4.0 / n) * np.sin(theta) * (
        np.sin(np.outer(theta, 2 * m - 1)) / (2 * m - 1)
    ).sum(axis=1)
    return np.cos(theta), w


_X_FINE, _W_FINE = _fejer2(_N_FINE)
_X_COARSE, _W_COARSE = _fejer2(_N_FINE // 2)
# Node set of the half rule is every second fine node (cos(2j*pi/32) = cos(j*pi/16)).
assert np.allclose(_X_FINE[1::2], _X_COARSE)


@dataclass
class QuadratureSpec:
    """Tolerances and refinement budget for adaptive integration."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    breakpoints: Sequence[float] = field(default_factory=tuple)

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be > 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        bp = tuple(float(b) for b in self.breakpoints)
        if any(not np.isfinite(b) for b in bp):
            raise ValueError("breakpoints must be finite")
        self.breakpoints = tuple(sorted(bp))


@dataclass
class IntegralResult:
    """Value, reported error bound, and evaluation count of one integral."""

    value: object           # complex scalar, or complex ndarray for vector integrands
    error: float
    neval: int


def _as_batch(f, vectorized):
    if vectorized:
        return f
    def batched(x):
        return np.asarray([f(float(v)) for v in x])
    return batched


def _eval_panels(fbatch, lo, hi):
    """Fine and coarse rule values plus error for a batch of panels.

    lo, hi: (m,) panel bounds.  Returns (fine (m,K), err (m,)).
    """
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * _X_FINE[None, :]
    y = np.asarray(fbatch(x.ravel()))
    if y.ndim == 1:
        y = y[:, None]
    K = y.shape[-1]
    y = y.reshape(len(lo), _N_FINE - 1, K)
    if not np.all(np.isfinite(y)):
        raise ValueError("integrand returned a non-finite value")
    fine = half[:, None] * np.tensordot(y, _W_FINE, axes=(1, 0))
    coarse = half[:, None] * np.tensordot(y[:, 1::2, :], _W_COARSE, axes=(1, 0))
    err = np.abs(fine - coarse).max(axis=1)
    return fine, err


def _sqrt_mapped(fbatch, anchor, sign):
    """Integrand under x = anchor + sign*u**2, absorbing the Jacobian 2u.

    Unfolds inverse-square-root endpoint singularities (and softens
    square-root kinks) into smooth integrands over u.
    """

    def mapped(u):
        u = np.asarray(u)
        y = np.asarray(fbatch(anchor + sign * u * u))
        w = 2.0 * u
        return y * (w[:, None] if y.ndim > 1 else w)

    return mapped


def integrate_segmented(
    f: Callable,
    a: float,
    b: float,
    spec: QuadratureSpec | None = None,
    *,
    tail_decay: float | None = None,
    sqrt_singularities: Sequence[float] = (),
    vectorized: bool = True,
) -> IntegralResult:
    """Adaptively integrate f over (a, b), b possibly +inf.

    Breakpoints from the spec split the interval into independently refined
    segments; they should flag branch points, near-poles and integrable
    endpoint singularities.  Points listed in ``sqrt_singularities`` (which
    must also be endpoints or breakpoints) mark square-root branch points:
    the adjacent segments are integrated under x = x0 +- u**2, which turns
    inverse-square-root blowups into smooth integrands.  For b = inf a
    positive ``tail_decay`` (a lower bound on the exponential decay rate of
    f) must be supplied; the tail beyond the last breakpoint is folded to a
    finite interval by x = x0 - ln(t)/tail_decay.

    Returns an IntegralResult whose value is a complex scalar when f returns
    scalars, or a complex vector when f returns one row per component.
    Raises ConvergenceError (carrying the partial result) if the panel
    budget is exhausted first.
    """
    spec = spec or QuadratureSpec()
    if not np.isfinite(a):
        raise ValueError("lower limit must be finite")
    fbatch = _as_batch(f, vectorized)
    sqrt_pts = sorted(float(s) for s in sqrt_singularities)

    def is_sqrt(x):
        return any(abs(x - s) <= 1e-12 * max(1.0, abs(s)) for s in sqrt_pts)

    def add_finite(pieces, lo, hi):
        if hi <= lo:
            return
        lo_s, hi_s = is_sqrt(lo), is_sqrt(hi)
        if lo_s and hi_s:
            mid = 0.5 * (lo + hi)
            pieces.append((_sqrt_mapped(fbatch, lo, +1.0), 0.0, math.sqrt(mid - lo)))
            pieces.append((_sqrt_mapped(fbatch, hi, -1.0), 0.0, math.sqrt(hi - mid)))
        elif lo_s:
            pieces.append((_sqrt_mapped(fbatch, lo, +1.0), 0.0, math.sqrt(hi - lo)))
        elif hi_s:
            pieces.append((_sqrt_mapped(fbatch, hi, -1.0), 0.0, math.sqrt(hi - lo)))
        else:
            pieces.append((fbatch, lo, hi))

    inner = [bp for bp in spec.breakpoints if a < bp < b]
    pieces = []  # (mapped integrand, lo, hi) in integration order
    if np.isinf(b):
        if tail_decay is None or tail_decay <= 0:
            raise ValueError("infinite upper limit needs a positive tail_decay")
        lam = float(tail_decay)
        x0 = inner[-1] if inner else float(a)
        finite_edges = [float(a)] + inner
        if is_sqrt(x0):
            # keep the singular point out of the exponential tail map
            finite_edges.append(x0 + 1.0 / lam)
            x0 = finite_edges[-1]

        def tail(t):
            t = np.asarray(t)
            y = np.asarray(fbatch(x0 - np.log(t) / lam))
            w = 1.0 / (lam * t)
            return y * (w[:, None] if y.ndim > 1 else w)

        for lo, hi in zip(finite_edges[:-1], finite_edges[1:]):
            add_finite(pieces, lo, hi)
        pieces.append((tail, 0.0, 1.0))
    else:
        edges = [float(a)] + inner + [float(b)]
        for lo, hi in zip(edges[:-1], edges[1:]):
            add_finite(pieces, lo, hi)

    # One seed panel per piece; each panel remembers its piece so refined
    # tail panels keep using the substituted integrand.
    panels = []  # [piece_index, lo, hi, value (K,), err]
    neval = 0
    for idx, (fn, lo, hi) in enumerate(pieces):
        if hi <= lo:
            continue
        fine, err = _eval_panels(fn, np.array([lo]), np.array([hi]))
        neval += _N_FINE - 1
        panels.append([idx, lo, hi, fine[0], err[0]])

    total_len = sum(p[2] - p[1] for p in panels)

    def totals():
        order = sorted(range(len(panels)), key=lambda i: (panels[i][0], panels[i][1]))
        val = np.sum([panels[i][3] for i in order], axis=0)
        err = float(np.sum([panels[i][4] for i in order]))
        return val, err

    while True:
        value, err_total = totals()
        target = max(spec.abs_tol, spec.rel_tol * float(np.max(np.abs(value))))
        if err_total <= target:
            break
        # Refine every panel holding more than its length-proportional error
        # share; always include the worst one so progress is guaranteed.
        worst = max(range(len(panels)), key=lambda i: panels[i][4])
        to_split = [
            i for i, p in enumerate(panels)
            if p[4] > target * (p[2] - p[1]) / total_len
        ]
        if worst not in to_split:
            to_split.append(worst)
        if len(panels) + len(to_split) > spec.max_subdivisions:
            raise ConvergenceError(
                f"no convergence within {spec.max_subdivisions} subdivisions "
                f"(error {err_total:.3e}, target {target:.3e})",
                value=_squeeze(value),
                estimate=err_total,
            )
        halves: dict[int, list] = {}
        for i in to_split:
            idx, lo, hi, _, _ = panels[i]
            mid = 0.5 * (lo + hi)
            halves.setdefault(idx, []).extend([(lo, mid), (mid, hi)])
        for i in sorted(to_split, reverse=True):
            panels.pop(i)
        for piece_idx in sorted(halves):
            bounds = halves[piece_idx]
            los = np.array([bd[0] for bd in bounds])
            his = np.array([bd[1] for bd in bounds])
            fine, err = _eval_panels(pieces[piece_idx][0], los, his)
            neval += len(bounds) * (_N_FINE - 1)
            for k in range(len(bounds)):
                panels.append([piece_idx, los[k], his[k], fine[k], err[k]])

    value, err_total = totals()
    return IntegralResult(_squeeze(value), err_total, neval)


def _squeeze(v):
    v = np.asarray(v)
    return complex(v[0]) if v.shape == (1,) else v


def integrate_product_spectrum(
    kernel_curve,
    emission,
    absorption=None,
    spec: QuadratureSpec | None = None,
) -> float:
    """Overlap integral of a sampled kernel with broadened line spectra.

    kernel_curve is a KernelCurve (sampled, linearly interpolated); emission
    and absorption are LineSets.  Computes the frequency integral of
    kernel * emission_density [* absorption_density], adaptively refined
    around each line center.  With absorption=None the single-spectrum
    overlap (the decay-rate case) is computed.

    The curve must cover every line center by at least ten half-widths;
    Lorentzian tails are truncated at the curve boundary or at 500
    half-widths, whichever is tighter.
    """
    spec = spec or QuadratureSpec(rel_tol=1e-8, abs_tol=1e-300)
    line_sets = [emission] if absorption is None else [emission, absorption]
    centers = np.concatenate([ls.centers for ls in line_sets])
    width = max(ls.width for ls in line_sets)

    need_lo = centers.min() - 10 * width
    need_hi = centers.max() + 10 * width
    lo_curve, hi_curve = kernel_curve.omegas[0], kernel_curve.omegas[-1]
    if need_lo < lo_curve or need_hi > hi_curve:
        raise CoverageError(
            f"kernel curve [{lo_curve:g}, {hi_curve:g}] does not cover the "
            f"spectral support [{need_lo:g}, {need_hi:g}]"
        )

    lo = max(lo_curve, centers.min() - 500 * width)
    hi = min(hi_curve, centers.max() + 500 * width)
    bps = set()
    for c in centers:
        for off in (0.0, -width, width, -6 * width, 6 * width, -40 * width, 40 * width):
            bps.add(c + off)
    # Kinks of the piecewise-linear kernel matter only inside the window.
    bps.update(w for w in kernel_curve.omegas if lo < w < hi)
    qspec = QuadratureSpec(
        rel_tol=spec.rel_tol,
        abs_tol=spec.abs_tol,
        max_subdivisions=spec.max_subdivisions,
        breakpoints=sorted(b for b in bps if lo < b < hi),
    )

    def integrand(w):
        out = kernel_curve(w) * emission.density(w)
        if absorption is not None:
            out = out * absorption.density(w)
        return out

    res = integrate_segmented(integrand, lo, hi, qspec)
    return float(np.real(res.value))
