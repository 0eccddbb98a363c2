"""Tests for the Jacobi polynomial core: recurrence, normalization, spectrum.

Reference values were frozen from a 40-digit mpmath session (hypergeometric
evaluation of the polynomials, gamma-function normalizers, numerical
differentiation for the derivative rule), independent of the recurrence
implemented here.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from symjacobi.core import (
    JacobiParams,
    eigenvalue,
    eval_jacobi,
    eval_trig_poly,
    eval_trig_poly_deriv,
    jacobi_operator_apply,
    jacobi_table,
    norm_const,
    spectrum,
    total_mass,
    trig_poly_table,
)

PARAM_PAIRS = [(-0.5, -0.5), (0.0, 0.0), (0.5, 2.0), (3.0, -0.5)]


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError, match="exceed -1"):
            JacobiParams(-1.0, 0.0)
        with pytest.raises(ValueError, match="exceed -1"):
            JacobiParams(0.0, -1.5)

    def test_critical_flag(self):
        assert JacobiParams(-0.5, -0.5).critical
        assert JacobiParams(-0.25, -0.75).critical
        assert not JacobiParams(0.0, 0.0).critical

    def test_lam0(self):
        assert JacobiParams(-0.5, -0.5).lam0 == 0.0
        assert JacobiParams(0.0, 0.0).lam0 == 0.25
        assert_allclose(JacobiParams(0.5, 2.0).lam0, (3.5 / 2.0) ** 2, rtol=1e-15)

    def test_kernel_valid(self):
        assert JacobiParams(-0.5, 2.0).kernel_valid
        assert not JacobiParams(-0.75, 0.0).kernel_valid


class TestEvalJacobi:
    # (n, alpha, beta, x, value) frozen from mpmath.jacobi at 40 digits
    FROZEN = [
        (0, 0.5, -0.5, 0.3, 1.0),
        (1, 0.5, -0.5, 0.3, 0.7999999999999999889),
        (5, 0.5, -0.5, 0.7, -0.59952375000000002763),
        (8, 0.0, 0.0, -0.2, -0.039564800000000026424),
        (12, 3.0, -0.5, 0.9, 5.4497472538500176331),
        (3, 1.5, 2.0, -0.75, -2.9180908203125),
    ]

    def test_frozen_values(self):
        for n, a, b, x, ref in self.FROZEN:
            assert_allclose(eval_jacobi(n, a, b, x), ref, rtol=1e-13)

    def test_value_at_one(self):
        """P_n(1) = binom(n + alpha, n)."""
        from scipy.special import binom

        for a, b in PARAM_PAIRS:
            for n in [0, 1, 2, 7, 20]:
                assert_allclose(eval_jacobi(n, a, b, 1.0), binom(n + a, n), rtol=1e-12)

    def test_symmetry(self):
        """P_n^{(a,b)}(-x) = (-1)^n P_n^{(b,a)}(x)."""
        x = np.linspace(-1, 1, 31)
        for n in [0, 1, 4, 9]:
            assert_allclose(
                eval_jacobi(n, 0.5, 2.0, -x),
                (-1.0) ** n * eval_jacobi(n, 2.0, 0.5, x),
                rtol=1e-12,
                atol=1e-14,
            )

    def test_table_matches_single(self):
        x = np.linspace(-1, 1, 17)
        tab = jacobi_table(10, 0.5, 2.0, x)
        for n in range(11):
            assert_allclose(tab[n], eval_jacobi(n, 0.5, 2.0, x), rtol=1e-13)

    def test_against_scipy(self):
        from scipy.special import eval_jacobi as scipy_jacobi

        x = np.linspace(-0.99, 0.99, 41)
        for a, b in PARAM_PAIRS:
            for n in [0, 1, 3, 10, 25]:
                assert_allclose(
                    eval_jacobi(n, a, b, x), scipy_jacobi(n, a, b, x), rtol=1e-10, atol=1e-12
                )

    def test_bad_degree(self):
        with pytest.raises(ValueError, match="nonnegative"):
            eval_jacobi(-1, 0.0, 0.0, 0.5)


class TestNormConst:
    # (n, alpha, beta, value) frozen from mpmath at 40 digits
    FROZEN = [
        (0, -0.5, -0.5, 0.56418958354775628695),
        (1, -0.5, -0.5, 1.5957691216057307118),
        (4, -0.5, -0.5, 2.9179778223647647301),
        (0, 0.0, 0.0, 1.0),
        (3, 0.5, 2.0, 3.4287388351987382009),
        (7, 3.0, -0.5, 3.8366720062227541597),
        (0, 1.5, 2.0, 4.4370598373247120319),
    ]

    def test_frozen_values(self):
        for n, a, b, ref in self.FROZEN:
            assert_allclose(norm_const(JacobiParams(a, b), n), ref, rtol=1e-13)

    def test_critical_n0(self):
        """At alpha + beta = -1 the n = 0 constant is 1/sqrt(Gamma(a+1)Gamma(b+1))."""
        from scipy.special import gamma

        p = JacobiParams(-0.25, -0.75)
        assert_allclose(
            norm_const(p, 0), 1.0 / np.sqrt(gamma(0.75) * gamma(0.25)), rtol=1e-13
        )

    def test_n0_is_inverse_sqrt_mass(self):
        """c_0 = total_mass^{-1/2} for every parameter pair."""
        for a, b in PARAM_PAIRS + [(1.5, 2.0)]:
            p = JacobiParams(a, b)
            assert_allclose(norm_const(p, 0), total_mass(p) ** -0.5, rtol=1e-13)

    def test_vectorized(self):
        p = JacobiParams(0.5, 2.0)
        ns = np.arange(6)
        vec = norm_const(p, ns)
        assert vec.shape == (6,)
        for n in ns:
            assert_allclose(vec[n], norm_const(p, int(n)), rtol=1e-14)


class TestTrigPoly:
    FROZEN = [
        (5, -0.5, -0.5, 0.8, -0.52153215335435749673),
        (4, 0.5, 2.0, 1.1, -0.13413398019126420837),
        (9, 3.0, -0.5, 2.4, 0.039743112639800630765),
    ]

    def test_frozen_values(self):
        for n, a, b, th, ref in self.FROZEN:
            assert_allclose(eval_trig_poly(JacobiParams(a, b), n, th), ref, rtol=1e-12)

    def test_chebyshev_cosines(self):
        """At (-1/2,-1/2): 1/sqrt(pi) for n=0 and sqrt(2/pi) cos(n theta) for n>=1."""
        p = JacobiParams(-0.5, -0.5)
        th = np.linspace(0.05, np.pi - 0.05, 40)
        assert_allclose(eval_trig_poly(p, 0, th), np.full_like(th, np.pi**-0.5), rtol=1e-13)
        for n in [1, 2, 5, 12]:
            assert_allclose(
                eval_trig_poly(p, n, th), np.sqrt(2 / np.pi) * np.cos(n * th), rtol=1e-11, atol=1e-13
            )

    def test_even_in_theta(self):
        p = JacobiParams(0.5, 2.0)
        th = np.linspace(0.1, 3.0, 11)
        for n in [0, 3, 6]:
            assert_allclose(eval_trig_poly(p, n, -th), eval_trig_poly(p, n, th), rtol=1e-14)

    def test_table(self):
        p = JacobiParams(3.0, -0.5)
        th = np.linspace(0.2, 2.8, 9)
        tab = trig_poly_table(p, 8, th)
        assert tab.shape == (9,)[:0] + (9, 9) or tab.shape == (9, 9)
        for n in range(9):
            assert_allclose(tab[n], eval_trig_poly(p, n, th), rtol=1e-12)


class TestTrigPolyDeriv:
    def test_against_central_difference(self):
        """Analytic rule matches a small-step central difference to 1e-8."""
        h = 1e-6
        for a, b in PARAM_PAIRS:
            p = JacobiParams(a, b)
            for n in [1, 2, 5, 9]:
                th = np.linspace(0.3, np.pi - 0.3, 15)
                fd = (eval_trig_poly(p, n, th + h) - eval_trig_poly(p, n, th - h)) / (2 * h)
                assert_allclose(eval_trig_poly_deriv(p, n, th), fd, rtol=1e-8, atol=1e-8)

    def test_zero_for_constant(self):
        p = JacobiParams(0.5, 2.0)
        assert_allclose(eval_trig_poly_deriv(p, 0, np.array([0.3, 1.0])), 0.0, atol=0.0)


class TestSpectrum:
    def test_values(self):
        p = JacobiParams(0.5, 2.0)
        ent = spectrum(p, 5)
        assert len(ent) == 6
        for k, e in enumerate(ent):
            assert e.n == k
            assert_allclose(e.lam, (k + 1.75) ** 2, rtol=1e-15)
            assert_allclose(e.sqrt_lam, k + 1.75, rtol=1e-15)

    def test_critical_bottom(self):
        ent = spectrum(JacobiParams(-0.5, -0.5), 3)
        assert ent[0].lam == 0.0
        assert_allclose([e.lam for e in ent], [0.0, 1.0, 4.0, 9.0], rtol=1e-15)

    def test_gap_identity(self):
        """lam_k - lam_0 = k (k + alpha + beta + 1)."""
        for a, b in PARAM_PAIRS:
            p = JacobiParams(a, b)
            k = np.arange(1, 12)
            assert_allclose(
                eigenvalue(p, k) - p.lam0, k * (k + a + b + 1.0), rtol=1e-13
            )


class TestTotalMass:
    FROZEN = [
        (-0.5, -0.5, 3.1415926535897932385),
        (0.0, 0.0, 1.0),
        (0.5, 2.0, 0.15238095238095238095),
        (3.0, -0.5, 0.91428571428571428571),
        (1.5, 2.0, 0.050793650793650793651),
    ]

    def test_frozen_values(self):
        for a, b, ref in self.FROZEN:
            assert_allclose(total_mass(JacobiParams(a, b)), ref, rtol=1e-13)


class TestOperatorApply:
    def test_eigenfunction_residual(self):
        """J Ptrig_n = lam_n Ptrig_n with O(h^2) finite-difference error."""
        p = JacobiParams(0.5, 2.0)
        n = 4
        lam = float(eigenvalue(p, n))
        errs = []
        for m in [800, 1600]:
            th = np.linspace(0.4, np.pi - 0.4, m)
            f = eval_trig_poly(p, n, th)
            res = jacobi_operator_apply(p, f, th)[1:-1] - lam * f[1:-1]
            errs.append(np.max(np.abs(res)))
        order = np.log2(errs[0] / errs[1])
        assert errs[1] < 0.02
        assert order > 1.9

    def test_nonuniform_grid_rejected(self):
        p = JacobiParams(0.0, 0.0)
        th = np.array([0.1, 0.2, 0.45])
        with pytest.raises(ValueError, match="uniform"):
            jacobi_operator_apply(p, np.sin(th), th)
