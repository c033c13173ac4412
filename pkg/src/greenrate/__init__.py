"""Medium-assisted Green tensors and molecular energy-transfer rate kernels.

Library layout:

- ``media``      dispersion models, wavenumbers, branch conventions
- ``specfun``    Bessel/Hankel/Legendre families for complex arguments
- ``quadrature`` adaptive segmented integration, spectral overlaps
- ``bulk``       homogeneous-medium Green tensor
- ``layered``    planar multilayer reflection tensor (Sommerfeld integral)
- ``sphere``     microsphere scattering components (Mie series)
- ``rates``      transfer/decay kernels, line spectra, total rates, emission
- ``engine``     full-tensor dispatch over geometries
- ``scenarios``  batch scenario model, validation, sweep runner, presets
- ``cli``        command-line front end
"""

from .bulk import DipolePair, GreenResult, bulk_coupling, bulk_tensor
from .constants import C_REDUCED, C_SI, EPS0_SI, HBAR_SI
from .engine import Bulk, full_tensor
from .layered import (
    InLayerPositions,
    Layer,
    LayeredStack,
    StackReflection,
    fresnel,
    interface_asymptotic,
    refl_green,
    refl_integrand,
    stack_reflection,
)
from .media import Constant, DrudeLorentz, Tabulated, axial_wavenumber, evaluate, wavenumber
from .quadrature import IntegralResult, QuadratureSpec, integrate_product_spectrum, integrate_segmented
from .rates import (
    KernelCurve,
    LineSet,
    decay_kernel,
    emission_spectrum,
    orientation_average_decay,
    orientation_average_transfer,
    total_decay_rate,
    total_transfer_rate,
    transfer_kernel,
)
from .sphere import SphereGeometry, SpherePositions, mie_coefficients, sphere_refl_radial, sphere_refl_tangential

__version__ = "0.1.0"

__all__ = [
    "Bulk",
    "C_REDUCED",
    "C_SI",
    "Constant",
    "DipolePair",
    "DrudeLorentz",
    "EPS0_SI",
    "GreenResult",
    "HBAR_SI",
    "InLayerPositions",
    "IntegralResult",
    "KernelCurve",
    "Layer",
    "LayeredStack",
    "LineSet",
    "QuadratureSpec",
    "SphereGeometry",
    "SpherePositions",
    "StackReflection",
    "Tabulated",
    "axial_wavenumber",
    "bulk_coupling",
    "bulk_tensor",
    "decay_kernel",
    "emission_spectrum",
    "evaluate",
    "fresnel",
    "full_tensor",
    "integrate_product_spectrum",
    "integrate_segmented",
    "interface_asymptotic",
    "mie_coefficients",
    "orientation_average_decay",
    "orientation_average_transfer",
    "refl_green",
    "refl_integrand",
    "sphere_refl_radial",
    "sphere_refl_tangential",
    "stack_reflection",
    "total_decay_rate",
    "total_transfer_rate",
    "transfer_kernel",
    "wavenumber",
]
