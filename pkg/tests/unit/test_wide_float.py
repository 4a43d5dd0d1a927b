"""Unit tests for extended-exponent arithmetic"""
import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from src.oracle.wide_float import WideArray, WideFloat

# Magnitudes whose sums, products and quotients stay normal doubles
IN_RANGE = st.floats(1e-150, 1e150) | st.floats(-1e150, -1e-150)


class TestWideFloat:
    """Test scalar WideFloat arithmetic"""

    def test_normalizes_mantissa(self):
        """Should keep |mantissa| in [0.5, 1)"""
        value = WideFloat(3.0)

        assert value.mantissa == 0.75
        assert value.exponent == 2
        assert float(value) == 3.0

    def test_zero_has_zero_exponent(self):
        """Should store zero as (0.0, 0)"""
        zero = WideFloat(0.0, 500)

        assert zero.is_zero()
        assert zero.exponent == 0

    @given(a=IN_RANGE, b=IN_RANGE)
    @settings(max_examples=300)
    def test_agrees_with_float_in_range(self, a, b):
        """Should give plain double results while values stay in range"""
        wa, wb = WideFloat.of(a), WideFloat.of(b)

        assert float(wa + wb) == a + b
        assert float(wa - wb) == a - b
        assert float(wa * wb) == a * b
        assert float(wa / wb) == a / b
        assert float(abs(wa).sqrt()) == math.sqrt(abs(a))

    @given(a=IN_RANGE, shift=st.integers(2200, 20000))
    @settings(max_examples=100)
    def test_exponent_excursion_is_lossless(self, a, shift):
        """Should return to the same double after a trip far outside the double range"""
        far = WideFloat.of(a) * WideFloat(1.0, -shift)

        assert float(far) == 0.0
        assert float(far * WideFloat(1.0, shift)) == a

    def test_survives_far_below_double_range(self):
        """Should track values like 2**-5000 without flushing"""
        tiny = WideFloat.of(0.5)
        for _ in range(5000):
            tiny = tiny * 0.5

        assert tiny.log2_abs() == pytest.approx(-5001)
        assert float(tiny) == 0.0
        assert float(tiny * WideFloat(1.0, 5001)) == 1.0

    def test_overflow_converts_to_inf(self):
        """Should return inf above the largest double"""
        assert float(WideFloat(1.0, 5000)) == math.inf
        assert float(WideFloat(-1.0, 5000)) == -math.inf

    def test_mixed_operands(self):
        """Should accept ints and floats on either side"""
        value = WideFloat.of(4.0)

        assert float(2 * value) == 8.0
        assert float(1 + value) == 5.0
        assert float(10 - value) == 6.0
        assert float(1 / value) == 0.25

    def test_division_by_zero_raises(self):
        """Should raise ZeroDivisionError"""
        with pytest.raises(ZeroDivisionError):
            WideFloat.of(1.0) / 0.0

    def test_sqrt_of_negative_raises(self):
        """Should reject negative arguments"""
        with pytest.raises(ValueError):
            WideFloat.of(-4.0).sqrt()

    def test_sqrt_any_exponent(self):
        """Should take square roots for odd and even stored exponents"""
        assert float(WideFloat(1.0, 100).sqrt()) == 2.0 ** 50
        assert float(WideFloat(1.0, 101).sqrt()) == pytest.approx(math.sqrt(2.0) * 2.0 ** 50)


class TestWideArray:
    """Test vectorized WideFloat arithmetic"""

    def test_round_trip(self):
        """Should reproduce in-range values exactly"""
        values = np.array([0.0, 1.5, -3.25, 1e-300])

        assert WideArray(values).to_float().tolist() == values.tolist()

    @given(pairs=st.lists(st.tuples(IN_RANGE, IN_RANGE), min_size=1, max_size=50))
    @settings(max_examples=200)
    def test_matches_numpy_in_range(self, pairs):
        """Should agree with float64 arithmetic elementwise"""
        a = np.array([p[0] for p in pairs])
        b = np.array([p[1] for p in pairs])
        wa, wb = WideArray(a), WideArray(b)

        assert (wa + wb).to_float().tolist() == (a + b).tolist()
        assert (wa - wb).to_float().tolist() == (a - b).tolist()
        assert (wa * wb).to_float().tolist() == (a * b).tolist()
        assert (wa / wb).to_float().tolist() == (a / b).tolist()

    def test_adds_zero(self):
        """Should return the other operand when one side is zero"""
        total = WideArray(np.array([0.0, 2.0])) + WideArray(np.array([5.0, 0.0]))

        assert total.to_float().tolist() == [5.0, 2.0]

    def test_deep_underflow_converts_to_zero(self):
        """Should carry tiny exponents and flush only on conversion"""
        tiny = WideArray(np.array([0.5]))
        for _ in range(40):
            tiny = tiny * 2.0 ** -100

        assert tiny.exponent[0] == -4000
        assert tiny.to_float().tolist() == [0.0]
