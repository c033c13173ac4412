"""Geometry dispatch: full 3x3 Green tensors between two lab-frame points.

For layered stacks the lab frame has z along the stack normal in the source
layer's coordinates and arbitrary in-plane axes; the Sommerfeld frame (with
the lateral separation along x) is rotated back to the lab.  The sphere
backend only provides the two paper component families, not a full tensor,
so it is not dispatched here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bulk import bulk_tensor
from .constants import C_REDUCED
from .layered import InLayerPositions, LayeredStack, refl_green
from .media import PermittivityModel, evaluate
from .quadrature import QuadratureSpec


@dataclass(frozen=True)
class Bulk:
    """Unbounded homogeneous medium."""

    material: PermittivityModel


def full_tensor(
    geometry,
    r_obs,
    r_src,
    omega: float,
    c: float = C_REDUCED,
    spec: QuadratureSpec | None = None,
):
    """(G(r_obs, r_src, omega), quadrature error bound).

    Supports Bulk and LayeredStack geometries; for stacks both points must
    lie in the source layer and the z components are the in-layer
    coordinates.
    """
    r_obs = np.asarray(r_obs, dtype=float)
    r_src = np.asarray(r_src, dtype=float)
    if isinstance(geometry, Bulk):
        eps = complex(evaluate(geometry.material, omega))
        return bulk_tensor(r_obs, r_src, eps, omega, c), 0.0
    if isinstance(geometry, LayeredStack):
        eps = complex(evaluate(geometry.layers[geometry.source_layer].material, omega))
        delta = r_obs - r_src
        rho = float(np.hypot(delta[0], delta[1]))
        pos = InLayerPositions(z_a=float(r_src[2]), z_b=float(r_obs[2]), rx=rho)
        refl = refl_green(geometry, pos, omega, spec=spec, c=c)
        g_refl = refl.tensor
        if rho > 0.0:
            cosp, sinp = delta[0] / rho, delta[1] / rho
            rot = np.array([[cosp, -sinp, 0.0], [sinp, cosp, 0.0], [0.0, 0.0, 1.0]])
            g_refl = rot @ g_refl @ rot.T
        g = g_refl.astype(complex)
        if not np.allclose(r_obs, r_src):
            g = g + bulk_tensor(r_obs, r_src, eps, omega, c)
        return g, refl.error
    raise TypeError(
        f"full tensors are only available for Bulk and LayeredStack, got "
        f"{type(geometry).__name__}"
    )
