"""Unit tests for the reference Legendre values and brute-force synthesis"""
import math

import numpy as np
import pytest

from src.models.alm_set import AlmSet
from src.oracle.reference import (
    closed_form_plm,
    direct_plm,
    direct_plm_column,
    direct_synthesis,
)
from src.processors.grid import make_ecp_grid
from src.processors.legendre import compute_mu
from src.utils.errors import TooLargeError, UnsupportedDegreeError


class TestDirectPlm:
    """Test the scalar reference recurrence"""

    def test_p00(self):
        """Should give 1 / sqrt(4 pi) at any colatitude"""
        assert float(direct_plm(0, 0, 0.7)) == pytest.approx(0.282094791773878, abs=1e-15)

    def test_p11_at_equator(self):
        """Should give mu_1 at theta = pi / 2"""
        assert float(direct_plm(1, 1, math.pi / 2)) == pytest.approx(compute_mu(1).mu[1], rel=1e-15)

    def test_p20_at_half(self):
        """Should give -0.0788479 at cos theta = 0.5"""
        assert float(direct_plm(2, 0, math.acos(0.5))) == pytest.approx(-0.0788479, abs=1e-7)

    @pytest.mark.parametrize("l,m", [(l, m) for l in range(5) for m in range(l + 1)])
    def test_matches_closed_forms(self, l, m):
        """Should agree with the analytic forms for l <= 4"""
        theta = 1.234

        assert float(direct_plm(l, m, theta)) == pytest.approx(closed_form_plm(l, m, theta), rel=1e-13, abs=1e-15)

    def test_far_below_double_range(self):
        """Should keep a finite log2 for values far below 2**-1074"""
        value = direct_plm(2000, 2000, 0.001)

        assert float(value) == 0.0
        assert value.log2_abs() < -10000

    def test_rejects_bad_indices(self):
        """Should require 0 <= m <= l and 0 < theta < pi"""
        with pytest.raises(ValueError):
            direct_plm(1, 2, 1.0)
        with pytest.raises(ValueError):
            direct_plm(1, 0, 0.0)


class TestDirectPlmColumn:
    """Test the vectorized reference column"""

    def test_matches_scalar_reference(self):
        """Should agree with direct_plm entry by entry"""
        thetas = np.array([0.3, 1.2, 2.5])

        column = direct_plm_column(3, 12, thetas)

        assert column.shape == (10, 3)
        for l in range(3, 13):
            for i, theta in enumerate(thetas):
                assert column[l - 3, i] == pytest.approx(float(direct_plm(l, 3, theta)), rel=1e-13, abs=1e-300)

    def test_scalar_theta(self):
        """Should accept a single colatitude"""
        assert direct_plm_column(0, 2, 1.0).shape == (3,)

    def test_rejects_poles(self):
        """Should refuse theta on a pole"""
        with pytest.raises(ValueError):
            direct_plm_column(0, 2, np.array([0.0, 1.0]))


class TestClosedFormPlm:
    """Test the analytic table"""

    def test_p00(self):
        """Should give 0.2820947918"""
        assert closed_form_plm(0, 0, 0.5) == pytest.approx(0.2820947918, abs=1e-10)

    def test_p22(self):
        """Should give sqrt(15 / 32 pi) sin^2 theta"""
        theta = 0.9

        assert closed_form_plm(2, 2, theta) == pytest.approx(math.sqrt(15 / (32 * math.pi)) * math.sin(theta) ** 2)

    def test_degree_above_table_raises(self):
        """Should raise UnsupportedDegreeError for l > 4"""
        with pytest.raises(UnsupportedDegreeError):
            closed_form_plm(5, 0, 1.0)


class TestDirectSynthesis:
    """Test the brute-force map"""

    def test_constant_field(self, constant_alm_8, ecp_grid_8):
        """Should give 1 everywhere for a_00 = sqrt(4 pi)"""
        sky = direct_synthesis(constant_alm_8, ecp_grid_8)

        assert np.allclose(sky.flat(), 1.0, rtol=0, atol=1e-14)

    def test_zero_coefficients(self, ecp_grid_8):
        """Should give an all-zero map"""
        sky = direct_synthesis(AlmSet.zeros(4), ecp_grid_8)

        assert np.all(sky.flat() == 0.0)

    def test_sectoral_mode_at_equator(self, equator_grid):
        """Should give 2 mu_1 at (pi/2, 0) for a_11 = 1"""
        alm = AlmSet.from_dict(1, 1, {(1, 1): 1.0})

        sky = direct_synthesis(alm, equator_grid)

        assert sky.values[0][0] == pytest.approx(0.6909883, abs=1e-7)
        assert sky.values[0][1] == pytest.approx(0.0, abs=1e-15)

    def test_band_limit_guard(self):
        """Should refuse lmax > 64"""
        with pytest.raises(TooLargeError):
            direct_synthesis(AlmSet.zeros(65), make_ecp_grid(1))
