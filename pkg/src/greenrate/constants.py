"""Physical constants and the reduced unit system used by default.

Default unit system ("reduced units"): frequencies are measured in a
reference frequency omega_ref and lengths in the reference wavelength
lambda_ref = 2*pi*c / omega_ref.  With the time unit 1/omega_ref, the
speed of light in these units is

    c_reduced = c / (lambda_ref * omega_ref) = 1 / (2*pi),

so a medium wavenumber is k = sqrt(eps) * omega / c_reduced
= 2*pi*sqrt(eps)*omega, i.e. a vacuum wave at omega = 1 has wavelength 1.
All geometry functions take an explicit ``c`` keyword defaulting to
``C_REDUCED``; pass ``C_SI`` (with SI inputs) for SI results.
"""

import math

C_REDUCED = 1.0 / (2.0 * math.pi)

# SI values (CODATA).
C_SI = 299_792_458.0                 # m/s
HBAR_SI = 1.054_571_817e-34          # J*s
EPS0_SI = 8.854_187_8128e-12         # F/m
