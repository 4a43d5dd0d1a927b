"""Unit tests for the rescaled Legendre recurrence"""
import math
import warnings

import numpy as np
import pytest

from src.models.ring_grid import RingDescriptor
from src.oracle.reference import closed_form_plm, direct_plm_column
from src.processors import legendre
from src.processors.grid import make_ecp_grid
from src.utils.errors import DegenerateIndexError, ScaleOverflowError


@pytest.fixture(scope="module")
def table():
    return legendre.build_rescale_table()


class TestRescaleTable:
    """Test build_rescale_table"""

    def test_has_21_entries(self, table):
        """Should hold one slot per k = -10..10"""
        assert table.entries.shape == (21,)
        assert table.clamped.shape == (21,)

    def test_identity_slot(self, table):
        """Should map k = 0 to 1.0"""
        assert table.entry(0) == 1.0
        assert not table.is_clamped(0)

    def test_first_upper_slot(self, table):
        """Should map k = 1 to 2^126"""
        assert table.entry(1) == 2.0 ** 126
        assert table.entry(1) == pytest.approx(8.507059e37, rel=1e-6)

    def test_underflowing_slots_are_zero(self, table):
        """Should hold exact zeros flagged as clamped for k <= -9"""
        for k in (-10, -9):
            assert table.entry(k) == 0.0
            assert table.is_clamped(k)
        assert table.entry(-8) == 2.0 ** -1008

    def test_overflowing_slots_saturate(self, table):
        """Should clamp k >= 9 to the largest finite double"""
        for k in (9, 10):
            assert table.entry(k) == np.finfo(np.float64).max
            assert table.is_clamped(k)
        assert table.entry(8) == 2.0 ** 1008

    def test_entries_are_read_only(self, table):
        """Should not allow the shared table to be modified"""
        with pytest.raises(ValueError):
            table.entries[10] = 2.0


class TestComputeMu:
    """Test the starting-value factors"""

    def test_first_values(self):
        """Should match sqrt(1/4pi), sqrt(3/8pi) and mu_1 sqrt(5/4)"""
        mu = legendre.compute_mu(2).mu

        assert mu[0] == pytest.approx(0.282094791773878, abs=1e-15)
        assert mu[1] == pytest.approx(0.345494149471335, abs=1e-15)
        assert mu[2] == pytest.approx(0.386274202023190, abs=1e-15)

    def test_ratio_recurrence(self):
        """Should satisfy mu[m] / mu[m-1] = sqrt((2m+1)/2m)"""
        mu = legendre.compute_mu(500).mu
        m = np.arange(1, 501)

        assert np.allclose(mu[1:] / mu[:-1], np.sqrt((2 * m + 1) / (2 * m)), rtol=1e-14, atol=0)

    def test_large_mmax_stays_finite(self):
        """Should not overflow for large orders"""
        table = legendre.compute_mu(100_000)

        assert table.mmax == 100_000
        assert np.all(np.isfinite(table.mu))
        assert np.all(np.isfinite(table.log2_mu))

    def test_negative_mmax_raises(self):
        """Should reject mmax < 0"""
        with pytest.raises(ValueError):
            legendre.compute_mu(-1)


class TestBeta:
    """Test beta coefficients and segments"""

    def test_scalar_values(self):
        """Should evaluate sqrt((4l^2 - 1) / (l^2 - m^2))"""
        assert legendre.beta(1, 0) == pytest.approx(math.sqrt(3.0), rel=1e-15)
        assert legendre.beta(2, 1) == pytest.approx(math.sqrt(5.0), rel=1e-15)

    def test_degenerate_index_raises(self):
        """Should reject l <= m"""
        with pytest.raises(DegenerateIndexError):
            legendre.beta(2, 2)
        with pytest.raises(DegenerateIndexError):
            legendre.beta(1, 3)

    def test_segment_values(self):
        """Should fill beta(l_start + i, m) per element"""
        segment = legendre.fill_beta_segment(0, 1, 2)

        assert segment.values.tolist() == pytest.approx([1.7320508, 1.9364917], abs=1e-7)
        assert legendre.fill_beta_segment(0, 1, 1).values.tolist() == pytest.approx([1.7320508], abs=1e-7)

    def test_segment_matches_scalar_bitwise(self):
        """Should produce the same bits as the scalar beta"""
        segment = legendre.fill_beta_segment(5, 6, 40)

        assert segment.values.tolist() == [legendre.beta(l, 5) for l in range(6, 46)]
        assert segment.reciprocals.tolist() == [1.0 / legendre.beta(l, 5) for l in range(6, 46)]

    def test_segment_values_exceed_one(self):
        """Should keep every beta above 1"""
        segment = legendre.fill_beta_segment(100, 101, 500)

        assert np.all(segment.values > 1.0)

    def test_segment_start_at_or_below_m_raises(self):
        """Should reject l_start <= m"""
        with pytest.raises(DegenerateIndexError):
            legendre.fill_beta_segment(3, 2, 4)

    def test_segment_needs_positive_length(self):
        """Should reject an empty segment"""
        with pytest.raises(ValueError):
            legendre.fill_beta_segment(0, 1, 0)

    def test_block_zero_below_diagonal(self):
        """Should leave l <= m entries at zero in both arrays"""
        values, inverse = legendre.fill_beta_block(np.array([0, 3]), 1, 4)

        assert values.shape == (4, 2)
        assert values[:3, 1].tolist() == [0.0, 0.0, 0.0]
        assert inverse[:3, 1].tolist() == [0.0, 0.0, 0.0]
        assert values[3, 1] == legendre.beta(4, 3)
        assert inverse[0, 0] == 1.0 / legendre.beta(1, 0)

    def test_window_from_degree_zero_is_silent(self):
        """Should leave the l <= m rows at zero without a RuntimeWarning"""
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            values, inverse = legendre.fill_beta_block(np.array([0, 2]), 0, 4)

        assert values[0].tolist() == [0.0, 0.0]
        assert inverse[:3, 1].tolist() == [0.0, 0.0, 0.0]
        assert np.all(np.isfinite(values))


class TestInitState:
    """Test starting values"""

    def test_m_zero_any_theta(self):
        """Should start P_00 at mu_0 with scale 0"""
        mu = legendre.compute_mu(0)
        for theta in (0.1, 1.0, 2.5):
            state = legendre.init_state(0, RingDescriptor.from_theta(theta, 4), mu)
            assert state.p_prev == pytest.approx(0.282094791773878, abs=1e-15)
            assert state.scale_k == 0
            assert state.l_current == 1

    def test_m_one_at_equator(self):
        """Should start P_11(pi/2) at mu_1"""
        state = legendre.init_state(1, RingDescriptor.from_theta(math.pi / 2, 4), legendre.compute_mu(1))

        assert state.p_prev == pytest.approx(0.345494149471335, abs=1e-15)
        assert state.scale_k == 0

    def test_first_step_value(self):
        """Should set P_10 = beta(1,0) x P_00"""
        ring = RingDescriptor(theta=math.pi / 3, cos_theta=0.5, sin_theta=math.sqrt(0.75), n_phi=4)
        state = legendre.init_state(0, ring, legendre.compute_mu(0))

        assert state.p_cur == pytest.approx(0.2443013, abs=1e-7)

    def test_l_current_stays_at_m_for_band_limit(self):
        """Should not advance past l = m when lmax = m"""
        state = legendre.init_state(3, RingDescriptor.from_theta(1.0, 8), legendre.compute_mu(3), lmax=3)

        assert state.l_current == 3
        with pytest.raises(ValueError):
            legendre.step(state, legendre.beta(4, 3), 1.0)

    def test_ring_list_vectorizes(self, ecp_grid_8):
        """Should carry one value per ring for a ring list"""
        state = legendre.init_state(2, ecp_grid_8.rings, legendre.compute_mu(2))

        assert state.p_cur.shape == (ecp_grid_8.n_rings,)
        assert np.array_equal(state.x, ecp_grid_8.cos_theta)

    def test_deep_starting_value_uses_negative_scale(self):
        """Should store m = 300, theta = 0.08 with scale -8 and an in-range mantissa"""
        p_mm, _, k = legendre.seed_values(300, np.array([math.cos(0.08)]), np.array([math.sin(0.08)]),
                                          legendre.compute_mu(300))

        assert k[0] == -8
        assert 2.0 ** -126 < p_mm[0] < 2.0 ** 126

    def test_deep_starting_value_keeps_exponent_deficit(self):
        """Should keep m = 2000, theta = 0.001 as an in-range mantissa with scale far below -10"""
        p_mm, p_m1, k = legendre.seed_values(2000, np.array([math.cos(0.001)]), np.array([math.sin(0.001)]),
                                             legendre.compute_mu(2000))

        assert k[0] < -150
        assert 2.0 ** -126 < p_mm[0] < 2.0 ** 126
        assert p_m1[0] != 0.0

    def test_order_outside_mu_table_raises(self):
        """Should reject m beyond the mu table"""
        with pytest.raises(ValueError):
            legendre.init_state(5, RingDescriptor.from_theta(1.0, 4), legendre.compute_mu(3))


class TestStep:
    """Test the recurrence step and rescaling"""

    def test_p20_matches_closed_form(self):
        """Should reproduce P_20(x=0.5) = sqrt(5/4pi) (3x^2 - 1) / 2 = -0.0788479"""
        ring = RingDescriptor(theta=math.pi / 3, cos_theta=0.5, sin_theta=math.sqrt(0.75), n_phi=4)
        state = legendre.init_state(0, ring, legendre.compute_mu(0))

        state = legendre.step(state, legendre.beta(2, 0), legendre.beta(1, 0))

        assert state.l_current == 2
        assert state.p_cur == pytest.approx(-0.0788479, abs=1e-7)
        assert state.p_cur == pytest.approx(math.sqrt(5 / (4 * math.pi)) * (3 * 0.25 - 1) / 2, rel=1e-14)

    def test_zero_state_stays_zero(self):
        """Should keep a zero state at zero with unchanged scale"""
        state = legendre.PlmState(m=0, x=np.array(0.3), s=np.array(0.95), l_current=5,
                                  p_cur=np.array(0.0), p_prev=np.array(0.0), scale_k=np.array(-3))

        state = legendre.step(state, legendre.beta(6, 0), legendre.beta(5, 0))

        assert state.p_cur == 0.0
        assert state.p_prev == 0.0
        assert state.scale_k == -3

    def test_rescales_down_above_upper_threshold(self):
        """Should divide by 2^126 and raise scale_k when a value exceeds 2^126"""
        p_next, p_prev, k = legendre.advance(
            np.array([2.0 ** 126]), np.array([0.0]), np.array([0]), np.array([1.0]),
            np.array([2.0]), np.array([1.0]),
        )

        assert p_next[0] == 2.0
        assert p_prev[0] == 1.0
        assert k[0] == 1

    def test_no_rescale_exactly_at_threshold(self):
        """Should leave |P| = 2^126 untouched"""
        p_next, _, k = legendre.advance(
            np.array([2.0 ** 125]), np.array([0.0]), np.array([0]), np.array([1.0]),
            np.array([2.0]), np.array([1.0]),
        )

        assert p_next[0] == 2.0 ** 126
        assert k[0] == 0

    def test_rescales_up_below_lower_threshold(self):
        """Should multiply by 2^126 and lower scale_k when both values are tiny"""
        p_next, p_prev, k = legendre.advance(
            np.array([2.0 ** -130]), np.array([0.0]), np.array([0]), np.array([0.5]),
            np.array([1.0]), np.array([1.0]),
        )

        assert p_next[0] == 2.0 ** -5
        assert p_prev[0] == 2.0 ** -4
        assert k[0] == -1

    def test_scale_overflow_raises(self):
        """Should raise ScaleOverflowError above scale 10"""
        with pytest.raises(ScaleOverflowError):
            legendre.advance(
                np.array([2.0 ** 126]), np.array([0.0]), np.array([10]), np.array([1.0]),
                np.array([2.0]), np.array([1.0]),
            )

    def test_sinking_below_scale_minus_10_keeps_deficit(self):
        """Should keep rescaling below slot -10 instead of dropping the values"""
        p_next, p_prev, k = legendre.advance(
            np.array([2.0 ** -130]), np.array([0.0]), np.array([-10]), np.array([0.5]),
            np.array([1.0]), np.array([1.0]),
        )

        assert p_next[0] == 2.0 ** -5
        assert p_prev[0] == 2.0 ** -4
        assert k[0] == -11

    def test_state_invariant_after_steps(self):
        """Should keep the mantissa pair inside [2^-126, 2^126] or both zero"""
        mu = legendre.compute_mu(300)
        state = legendre.init_state_arrays(300, np.array([math.cos(0.08)]), np.array([math.sin(0.08)]), mu)
        previous_k = state.scale_k.copy()
        for l in range(302, 1500):
            state = legendre.step(state, legendre.beta(l, 300), legendre.beta(l - 1, 300))
            biggest = max(abs(state.p_cur[0]), abs(state.p_prev[0]))
            assert biggest == 0.0 or 2.0 ** -126 <= biggest <= 2.0 ** 126
            assert abs(int(state.scale_k[0]) - int(previous_k[0])) <= 1
            previous_k = state.scale_k.copy()


class TestUnscale:
    """Test unscale"""

    def test_identity_scale(self, table):
        """Should return the stored value for k = 0"""
        assert legendre.unscale(0.5, 0, table) == 0.5

    def test_underflow_slot_returns_zero(self, table):
        """Should return exact zero for the clamped k = -9 slot"""
        assert legendre.unscale(0.5, -9, table) == 0.0

    def test_upper_slot(self, table):
        """Should multiply by 2^126 for k = 1"""
        assert legendre.unscale(1.0, 1, table) == 2.0 ** 126

    def test_out_of_range_scale_raises(self, table):
        """Should reject scale_k above 10"""
        with pytest.raises(ValueError):
            legendre.unscale(1.0, 11, table)

    def test_exponent_deficit_returns_zero(self, table):
        """Should read any scale_k below -10 as exact zero"""
        assert legendre.unscale(1.0, -40, table) == 0.0
        assert legendre.unscale_array(np.array([1.0, 1.0]), np.array([-200, 0]), table).tolist() == [0.0, 1.0]

    def test_overflow_raises(self, table):
        """Should raise ScaleOverflowError for products beyond double range"""
        with pytest.raises(ScaleOverflowError):
            legendre.unscale(1.0, 9, table)
        with pytest.raises(ScaleOverflowError):
            legendre.unscale(2.0 ** 100, 8, table)

    def test_zero_at_clamped_upper_slot_is_zero(self, table):
        """Should return zero for a zero mantissa in any slot"""
        assert legendre.unscale(0.0, 10, table) == 0.0


class TestPlmColumn:
    """Test column evaluation against closed forms and the wide-exponent oracle"""

    def test_matches_closed_forms(self):
        """Should agree with the analytic functions for l <= 4 within 1e-13"""
        thetas = np.array([0.2, 0.7, 1.3, 2.1, 3.0])
        for m in range(5):
            column = legendre.plm_column(m, 4, np.cos(thetas), np.sin(thetas))
            for l in range(m, 5):
                expected = [closed_form_plm(l, m, t) for t in thetas]
                assert column[l - m] == pytest.approx(expected, abs=1e-13)

    def test_band_limit_equal_to_m(self):
        """Should return only P_mm when lmax = m"""
        column = legendre.plm_column(3, 3, np.array([0.5]), np.array([math.sqrt(0.75)]))

        assert column.shape == (1, 1)

    def test_lmax_below_m_raises(self):
        """Should reject lmax < m"""
        with pytest.raises(ValueError):
            legendre.plm_column(4, 3, np.array([0.5]), np.array([0.8]))

    def test_parity_across_equator(self):
        """Should satisfy P_lm(-x) = (-1)^(l+m) P_lm(x) on mirror rings"""
        grid = make_ecp_grid(40)
        north = np.array(grid.northern_rings())
        south = np.array([grid.rings[r].pair_index for r in north])
        for m in (0, 3, 17):
            column = legendre.plm_column(m, 40, grid.cos_theta, grid.sin_theta)
            sign = np.array([(-1) ** (l + m) for l in range(m, 41)])[:, None]
            scale = np.max(np.abs(column))
            assert np.max(np.abs(column[:, south] - sign * column[:, north])) <= 1e-12 * scale

    def test_transient_underflow_recovers(self):
        """Should recover O(1) values for m = 300, theta = 0.08 past the turning point"""
        theta = np.array([0.08])
        column = legendre.plm_column(300, 4096, np.cos(theta), np.sin(theta))
        reference = direct_plm_column(300, 4096, theta)

        assert np.all(np.isfinite(column))
        assert abs(column[10, 0]) < 1e-280
        assert np.max(np.abs(column[3800 - 300:, 0])) > 1e-2

        shown = np.abs(reference[:, 0]) > 1e-280
        envelope = np.array([np.max(np.abs(reference[max(i - 8, 0):i + 9, 0])) for i in range(reference.shape[0])])
        error = np.abs(column[:, 0] - reference[:, 0]) / np.where(shown, envelope, 1.0)
        assert np.max(error[shown]) < 1e-10

    def test_deficit_column_stays_zero(self):
        """Should return zeros for m = 2000, theta = 0.001 while the exponent deficit lasts"""
        theta = np.array([0.001])
        column = legendre.plm_column(2000, 3000, np.cos(theta), np.sin(theta))
        reference = direct_plm_column(2000, 3000, theta)

        assert np.all(column == 0.0)
        assert np.all(np.abs(reference) < 1e-280)

    def test_column_recovers_from_exponent_deficit(self):
        """Should track m = 1000, theta = 0.385 from a seed below 2^-1386 up to O(1) values"""
        theta = np.array([0.385])
        mu = legendre.compute_mu(1000)
        _, _, seed_k = legendre.seed_values(1000, np.cos(theta), np.sin(theta), mu)

        column = legendre.plm_column(1000, 4096, np.cos(theta), np.sin(theta), mu)
        reference = direct_plm_column(1000, 4096, theta)

        assert seed_k[0] < -10
        assert np.max(np.abs(column)) > 1.0
        shown = np.abs(reference[:, 0]) > 1e-280
        envelope = np.array([np.max(np.abs(reference[max(i - 8, 0):i + 9, 0])) for i in range(reference.shape[0])])
        error = np.abs(column[:, 0] - reference[:, 0]) / np.where(shown, envelope, 1.0)
        assert np.max(error[shown]) < 1e-10
        assert np.all(np.abs(column[~shown, 0]) < 1e-270)

    def test_orthonormal_on_ecp_grid(self):
        """Should integrate P_lm P_l'm to delta_ll' within 2e-3 by midpoint quadrature"""
        grid = make_ecp_grid(32)
        weights = grid.sin_theta * (math.pi / grid.n_rings) * 2.0 * math.pi
        for m in range(0, 17):
            column = legendre.plm_column(m, 16, grid.cos_theta, grid.sin_theta)
            gram = (column * weights) @ column.T
            assert np.max(np.abs(gram - np.eye(gram.shape[0]))) < 2e-3
