# /tests/test_galois.py

import numpy as np
import pytest

from pg_fold.errors import FieldConstructionError, FieldDomainError
from pg_fold.geometry.galois import (
    FieldSpec,
    build_field,
    default_primitive_poly,
    field_from,
    is_primitive,
    prime_power,
    subgroup_stride,
)

# --- Test Fixtures ---

@pytest.fixture(scope="module")
def gf8():
    """GF(2^3) built from x^3 + x + 1."""
    return build_field(FieldSpec(2, 3, (1, 0, 1, 1)))


@pytest.fixture(scope="module")
def gf64():
    """GF(2^6) with the default primitive polynomial."""
    return field_from(2, 6)


# --- Test Cases ---

class TestPrimitivePolynomials:
    """Tests for primitivity checks and default polynomial selection."""

    def test_default_polys(self):
        assert default_primitive_poly(2, 1) == (1, 1)
        assert default_primitive_poly(2, 3) == (1, 0, 1, 1)
        assert default_primitive_poly(2, 6) == (1, 0, 0, 0, 0, 1, 1)
        assert default_primitive_poly(3, 2) == (1, 1, 2)
        assert default_primitive_poly(2, 4) == (1, 0, 0, 1, 1)

    def test_default_poly_needs_prime(self):
        with pytest.raises(FieldConstructionError, match="素数ではありません"):
            default_primitive_poly(6, 2)

    def test_is_primitive(self):
        assert is_primitive(2, (1, 0, 1, 1))
        assert not is_primitive(2, (1, 0, 0, 1))  # x^3 + 1 is reducible
        assert not is_primitive(2, (1, 0))

    def test_prime_power(self):
        assert prime_power(8) == (2, 3)
        assert prime_power(9) == (3, 2)
        assert prime_power(6) is None

    def test_subgroup_stride(self):
        assert subgroup_stride(63, 7) == 9
        with pytest.raises(FieldDomainError):
            subgroup_stride(63, 5)


class TestFieldConstruction:
    """Tests for exp/log table construction and its error reporting."""

    def test_gf8_exp_table(self, gf8):
        assert list(gf8.exp_table) == [1, 2, 4, 3, 6, 7, 5]
        assert gf8.order == 8 and gf8.n == 7

    def test_log_table_inverts_exp_table(self, gf64):
        for i, code in enumerate(gf64.exp_table):
            assert gf64.log_table[code] == i
        assert gf64.log_table[0] == -1
        assert sorted(gf64.exp_table) == list(range(1, 64))

    def test_non_primitive_poly_reports_order(self):
        with pytest.raises(FieldConstructionError, match="原始的ではありません") as excinfo:
            build_field(FieldSpec(2, 3, (1, 0, 0, 1)))
        assert excinfo.value.details['order_found'] == 3
        assert excinfo.value.details['order_required'] == 7

    def test_non_prime_characteristic(self):
        with pytest.raises(FieldConstructionError, match="素数ではありません"):
            build_field(FieldSpec(4, 2, (1, 1, 1)))

    def test_wrong_poly_length(self):
        with pytest.raises(FieldConstructionError):
            build_field(FieldSpec(2, 3, (1, 1, 1)))

    def test_coefficients_are_high_first(self, gf8):
        # α^3 = α + 1
        assert gf8.coefficients(int(gf8.exp_table[3])) == (0, 1, 1)


class TestFieldArithmetic:
    """Tests for element arithmetic in discrete-log form."""

    def test_addition(self, gf8):
        a = gf8.alpha
        assert a + a ** 2 == gf8.element(4)
        assert a + a == gf8.zero
        assert gf8.zero + a == a

    def test_multiplication_adds_exponents(self, gf64):
        for k in range(63):
            assert gf64.element(k) * gf64.element(21) == gf64.element(k + 21)
        assert gf64.zero * gf64.alpha == gf64.zero

    def test_inverse(self, gf64):
        for k in range(63):
            x = gf64.element(k)
            assert x * gf64.inv(x) == gf64.one
        with pytest.raises(FieldDomainError):
            gf64.inv(gf64.zero)

    def test_subtraction_in_odd_characteristic(self):
        gf9 = field_from(3, 2)
        for k in range(8):
            x = gf9.element(k)
            assert x - x == gf9.zero
            assert x + (-x) == gf9.zero
            assert x + x + x == gf9.zero

    def test_repr(self, gf8):
        assert repr(gf8.element(3)) == "α^3"
        assert repr(gf8.zero) == "0"


class TestSubfieldsAndTrace:
    """Tests for subfield exponents and the relative trace."""

    def test_subfield_exponents(self, gf64):
        assert list(gf64.subfield_exponents(3)) == [0, 9, 18, 27, 36, 45, 54]
        assert list(gf64.subfield_exponents(2)) == [0, 21, 42]

    def test_absolute_trace_of_gf8(self, gf8):
        assert gf8.relative_trace(gf8.one, 1) == gf8.one
        assert gf8.relative_trace(gf8.alpha, 1) == gf8.zero
        assert gf8.relative_trace(gf8.element(3), 1) == gf8.one

    def test_relative_trace_lands_in_subfield(self, gf64):
        sub = set(int(x) for x in gf64.subfield_exponents(3))
        for k in range(63):
            tr = gf64.relative_trace(gf64.element(k), 3)
            assert tr.is_zero or tr.exponent in sub

    def test_trace_vectors_match_scalar_trace(self, gf64):
        codes = gf64.trace_vectors(np.arange(63), 2)
        for k in range(63):
            assert int(codes[k]) == gf64.relative_trace(gf64.element(k), 2).vector

    def test_non_divisor_sub_degree(self, gf64):
        with pytest.raises(FieldDomainError):
            gf64.relative_trace(gf64.one, 4)

    def test_absolute_trace_is_balanced(self, gf64):
        ones = [k for k in range(63) if gf64.relative_trace(gf64.element(k), 1) == gf64.one]
        assert len(ones) == 32
        assert gf64.relative_trace(gf64.zero, 1) == gf64.zero

    @pytest.mark.parametrize("sub_degree", [1, 2, 3])
    def test_trace_is_additive(self, gf64, sub_degree):
        elements = [gf64.zero] + [gf64.element(k) for k in range(63)]
        traces = {x: gf64.relative_trace(x, sub_degree) for x in elements}
        for a in elements:
            for b in elements:
                assert gf64.relative_trace(a + b, sub_degree) == traces[a] + traces[b]

    @pytest.mark.parametrize("sub_degree", [2, 3])
    def test_trace_is_subfield_linear(self, gf64, sub_degree):
        scalars = [gf64.element(int(k)) for k in gf64.subfield_exponents(sub_degree)]
        for c in scalars:
            for k in range(63):
                x = gf64.element(k)
                assert gf64.relative_trace(c * x, sub_degree) == c * gf64.relative_trace(x, sub_degree)

    @pytest.mark.parametrize("sub_degree", [2, 3])
    def test_subfield_is_closed(self, gf64, sub_degree):
        sub = {gf64.zero} | {gf64.element(int(k)) for k in gf64.subfield_exponents(sub_degree)}
        assert len(sub) == 2 ** sub_degree
        for a in sub:
            for b in sub:
                assert a + b in sub
                assert a * b in sub


class TestMultiplicativeGroup:
    """Every non-zero element has order dividing p^e - 1."""

    @pytest.mark.parametrize("p, e", [(2, 3), (2, 6), (3, 2), (3, 4)])
    def test_fermat(self, p, e):
        gf = field_from(p, e)
        n = p ** e - 1
        for k in range(n):
            assert gf.element(k) ** n == gf.one
        for code in range(1, p ** e):
            x = gf.from_vector(code)
            assert x ** n == gf.one

    def test_alpha_generates_the_group(self, gf64):
        powers = {gf64.alpha ** k for k in range(63)}
        assert len(powers) == 63
        assert gf64.zero not in powers
