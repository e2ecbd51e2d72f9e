from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from descentlab.quadfields import (
    IdealDesc,
    ImagQuadField,
    class_two_torsion_size,
    cl2_basis,
    cornacchia,
    genus_character,
    in_class_group_squared,
    is_principal_norm,
    ramified_prime_ideal,
    represents,
    unit_square_basis,
    valuations_above,
)
from oracles import ambiguous_form_count, class_number, in_principal_genus, ramified_form

SQUAREFREE = [m for m in range(1, 501) if sympy.ntheory.factor_.core(m) == m]
FIELDS_500 = [ImagQuadField(m) for m in SQUAREFREE if abs(ImagQuadField(m).D) <= 500]


def test_two_torsion_matches_reduced_forms():
    assert len(FIELDS_500) > 100
    for K in FIELDS_500:
        assert class_two_torsion_size(K) == ambiguous_form_count(K.D), K


def test_class_numbers_sanity():
    assert class_number(-4) == 1 and class_number(-23) == 3 and class_number(-84) == 4


def test_cl_squared_membership_matches_genus_of_forms():
    for K in FIELDS_500:
        for q in K.ramified_primes:
            assert in_class_group_squared(q, K) == in_principal_genus(ramified_form(q, K.D), K.D), (K, q)


@pytest.mark.parametrize("p", [3, 19, 43, 59])
def test_prime_above_2_not_in_cl_squared(p):
    K = ImagQuadField(2 * p)
    assert not in_class_group_squared(2, K)
    assert any(g % 2 == 0 for g in cl2_basis(K))


def test_cl2_basis_size_and_shape():
    for K in FIELDS_500:
        basis = cl2_basis(K)
        assert 2 ** len(basis) == class_two_torsion_size(K)
        for g in basis:
            assert all(q in K.ramified_primes for q in sympy.factorint(g))
            assert not is_principal_norm(g, K)


def test_genus_characters_have_even_product():
    for K in FIELDS_500[:60]:
        for q in K.ramified_primes:
            assert sum(genus_character(q, K)) % 2 == 0


def test_units():
    assert unit_square_basis(None) == [(-1, 0)]
    assert unit_square_basis(ImagQuadField(1)) == [(0, 1)]
    assert unit_square_basis(ImagQuadField(3)) == [(Fraction(1, 2), Fraction(1, 2))]
    assert unit_square_basis(ImagQuadField(38)) == [(-1, 0)]


def test_field_validation():
    with pytest.raises(ValueError):
        ImagQuadField(12)
    with pytest.raises(ValueError):
        ImagQuadField(0)
    K = ImagQuadField(6)
    assert ramified_prime_ideal(K, 3).norm == 3
    with pytest.raises(ValueError):
        ramified_prime_ideal(K, 5)
    with pytest.raises(ValueError):
        IdealDesc(K, 5, 5, (Fraction(1), Fraction(1)))


primes = st.sampled_from(list(sympy.primerange(3, 3000)))


@given(primes, st.sampled_from([1, 2, 3, 5, 7]))
def test_cornacchia_against_brute_force(p, d):
    res = cornacchia(d, p)
    brute = [(a, b) for b in range(1, 60) for a in range(1, 60) if a * a + d * b * b == p]
    if res is None:
        assert not brute
    else:
        a, b = res
        assert a * a + d * b * b == p and a >= 1 and b >= 1
        assert res == min(brute)


@pytest.mark.parametrize("p", [3, 11, 19, 43, 59, 67, 83])
def test_cornacchia_p_eq_a2_plus_2b2(p):
    a, b = cornacchia(2, p)
    assert a * a + 2 * b * b == p


@pytest.mark.parametrize("p", [5, 13, 29, 37, 53])
def test_cornacchia_p_eq_c2_plus_d2(p):
    c, d = cornacchia(1, p)
    assert c * c + d * d == p


def test_cornacchia_errors():
    assert cornacchia(2, 7) is None
    with pytest.raises(ValueError):
        cornacchia(0, 5)


def test_represents():
    assert represents(2, 11) == (3, 1)
    assert represents(5, 3) is None


@given(st.integers(-30, 30), st.integers(-30, 30).filter(lambda n: n != 0))
def test_valuations_above_sum_to_norm_valuation(x, y):
    K = ImagQuadField(2)
    q = 3  # splits in Q(sqrt(-2))
    a = (Fraction(x), Fraction(y))
    vals = valuations_above(K, a, q)
    N = K.norm(a)
    assert sum(vals) == sympy.multiplicity(q, int(N))
