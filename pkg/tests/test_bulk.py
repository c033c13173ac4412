"""Bulk Green tensor: closed-form structure, limits, reciprocity, scaling."""

import numpy as np
import pytest

from greenrate import DipolePair, GreenResult, bulk_coupling, bulk_tensor
from greenrate.bulk import bulk_coincidence_im
from greenrate.constants import C_REDUCED

EX = np.array([1.0, 0.0, 0.0])
EY = np.array([0.0, 1.0, 0.0])
EZ = np.array([0.0, 0.0, 1.0])

OMEGA = 1.0
Q = OMEGA / C_REDUCED  # vacuum wavenumber in reduced units


def pair(r, d_a, d_b, direction=EZ):
    return DipolePair(r_a=np.zeros(3), r_b=r * direction, d_a=d_a, d_b=d_b)


class TestProjectedCoupling:
    def test_far_field_transverse(self):
        # qR >> 1: only the 1/qR transverse term survives (within 1%)
        r = 1e3 / Q * 2 * np.pi  # qR = 2 pi * 1e3
        got = bulk_coupling(pair(r, EX, EX), 1.0, OMEGA).projected
        expected = (Q / (4 * np.pi)) * np.exp(1j * Q * r) / (Q * r)
        assert abs(got - expected) / abs(expected) < 0.01

    def test_longitudinal_exact(self):
        # parallel dipoles along R: transverse bracket vanishes identically
        r = 0.37
        got = bulk_coupling(pair(r, EZ, EZ), 1.0, OMEGA).projected
        x = Q * r
        expected = 2.0 * (Q / (4 * np.pi)) * np.exp(1j * x) * (1 / x**3 - 1j / x**2)
        assert got == pytest.approx(expected, rel=1e-13)

    def test_crossed_orientations_vanish(self):
        # d_a, d_b, R mutually perpendicular: both dyadic brackets vanish
        got = bulk_coupling(pair(0.1 / Q, EX, EY, direction=EZ), 2.25, OMEGA).projected
        assert got == 0.0

    def test_projected_matches_tensor_contraction(self):
        res = bulk_coupling(pair(0.8, EX, EZ), 2.0 + 0.1j, OMEGA)
        manual = np.conj(res.d_b) @ res.tensor @ res.d_a
        assert res.projected == pytest.approx(complex(manual), rel=1e-12)


class TestTensor:
    def test_off_diagonals_vanish_on_axis(self):
        g = bulk_tensor(0.5 * EZ, np.zeros(3), 1.0, OMEGA)
        off = g - np.diag(np.diag(g))
        assert np.max(np.abs(off)) == 0.0

    def test_trace_identity(self):
        # summing the projected coupling over an orthonormal triad kills the
        # near-field bracket: Tr G = e^{iqR} / (2 pi R)  [symbolic oracle]
        import sympy as sp

        q, R = sp.symbols("q R", positive=True)
        c2 = sp.Symbol("c2", real=True)  # (d . Rhat)^2 for one basis vector
        near = 1 / (q * R) ** 3 - sp.I / (q * R) ** 2
        scalar = (q / (4 * sp.pi)) * sp.exp(sp.I * q * R) * (
            -(1 - 3 * c2) * near + (1 - c2) / (q * R)
        )
        trace = sum(scalar.subs(c2, v) for v in (1, 0, 0))  # triad: one along R
        expected = sp.simplify(trace)
        closed = sp.exp(sp.I * q * R) / (2 * sp.pi * R)
        assert sp.simplify(expected - closed) == 0

        r = 0.61
        g = bulk_tensor(r * EX, np.zeros(3), 1.0, OMEGA)
        assert np.trace(g) == pytest.approx(
            np.exp(1j * Q * r) / (2 * np.pi * r), rel=1e-12
        )

    def test_absorption_damping_factor(self):
        # |e^{iqR}|^2 = e^{-2 omega n_I R / c} for silver at R = lambda
        eps = -16.0 + 0.6j
        r = 1.0  # one reduced wavelength
        n = np.sqrt(complex(eps))
        n = n if n.imag >= 0 else -n
        g = bulk_tensor(r * EZ, np.zeros(3), eps, OMEGA)
        q = n * Q
        phase_sq = abs(np.exp(1j * q * r)) ** 2
        assert phase_sq == pytest.approx(np.exp(-2 * OMEGA * n.imag * r / C_REDUCED), rel=1e-12)
        # the tensor indeed carries that damping against the lossless case
        g0 = bulk_tensor(r * EZ, np.zeros(3), abs(eps), OMEGA)
        assert np.max(np.abs(g)) < np.max(np.abs(g0))

    def test_reciprocity_transpose(self):
        r_a = np.array([0.1, -0.2, 0.3])
        r_b = np.array([-0.4, 0.5, 0.15])
        g_ab = bulk_tensor(r_b, r_a, 2.0 + 0.3j, OMEGA)
        g_ba = bulk_tensor(r_a, r_b, 2.0 + 0.3j, OMEGA)
        assert np.allclose(g_ab, g_ba.T, rtol=1e-12)

    def test_coincidence_raises(self):
        with pytest.raises(ValueError):
            bulk_tensor(np.zeros(3), np.zeros(3), 1.0, OMEGA)


class TestLimitsAndScaling:
    def test_imaginary_part_coincidence_limit(self):
        # lim_{R->0} Im[d G d] = q/(6 pi) for any d, approach direction
        r = 1e-4 / Q
        for d, e in [(EZ, EZ), (EX, EZ), (EX, EX), (EY, EX)]:
            g = bulk_tensor(r * e, np.zeros(3), 1.0, OMEGA)
            val = (d @ g @ d).imag
            assert val == pytest.approx(Q / (6 * np.pi), rel=1e-6)

    def test_coincidence_helper_matches_limit(self):
        assert bulk_coincidence_im(1.0, OMEGA) == pytest.approx(Q / (6 * np.pi), rel=1e-14)
        assert bulk_coincidence_im(2.25, OMEGA) == pytest.approx(
            1.5 * Q / (6 * np.pi), rel=1e-14
        )
        with pytest.raises(ValueError):
            bulk_coincidence_im(1.0 + 0.5j, OMEGA)

    def test_scaling_in_qR(self):
        # projected coupling depends on (qR, orientations) up to a factor q
        r1, om1 = 0.3, 1.0
        s = 2.7
        p1 = bulk_coupling(pair(r1, EX, EX), 1.0, om1).projected
        p2 = bulk_coupling(pair(r1 * s, EX, EX), 1.0, om1 / s).projected
        assert p2 == pytest.approx(p1 / s, rel=1e-12)


class TestValidation:
    def test_orientation_norm_enforced(self):
        with pytest.raises(ValueError):
            DipolePair(r_a=np.zeros(3), r_b=EZ, d_a=2 * EX, d_b=EX)

    def test_green_result_orientation_norm(self):
        with pytest.raises(ValueError):
            GreenResult(tensor=np.eye(3), d_a=1.5 * EZ)
