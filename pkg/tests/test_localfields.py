import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from descentlab.etale import detect_case
from descentlab.localfields import (
    DomainError,
    LocalElement,
    LocalFieldDesc,
    PAdic,
    PrecisionError,
    hilbert_symbol,
    is_square,
    local_roots_of_f,
    local_valuation,
    padic_is_square,
    padic_sqrt,
    sqrt_lift,
    square_class_basis,
    vp,
)
from oracles import is_square_qp_brute, sqrt_mod_oracle, square_table

PRIMES = [3, 5, 11, 19]
FIELDS = [
    LocalFieldDesc.base(2),
    LocalFieldDesc.base(3),
    LocalFieldDesc.quadratic(2, 0, -2),   # tau^2 - 2
    LocalFieldDesc.quadratic(2, 2, 2),    # tau^2 + 2 tau + 2
    LocalFieldDesc.quadratic(2, 0, 19),   # T^2 + 19
    LocalFieldDesc.quadratic(2, 0, 38),   # T^2 + 38
    LocalFieldDesc.quadratic(2, 0, 1),    # T^2 + 1
    LocalFieldDesc.quadratic(3, 0, 3),
    LocalFieldDesc.quadratic(5, 0, 2),    # unramified
]

nonzero = st.fractions(max_denominator=50).filter(lambda x: x != 0 and abs(x) < 10 ** 6)


def test_vp_and_padic_basics():
    assert vp(96, 2) == 5
    x = PAdic.from_rational(Fraction(18, 5), 3, 10)
    assert x.valuation() == 2
    assert (x * x.inverse()).equals_rational(1)


@pytest.mark.parametrize("p", PRIMES)
def test_padic_is_square_vs_brute_force_mod_p6(p):
    table = square_table(p, 6)
    n = p ** 6
    for u in list(range(1, 400)) + [n - k for k in range(1, 200)]:
        if u % p == 0:
            continue
        assert padic_is_square(PAdic.from_rational(u, p, 12)) == bool(table[u])


def test_q2_unit_square_iff_1_mod_8():
    table = square_table(2, 8)
    for u in range(1, 256, 2):
        got = padic_is_square(PAdic.from_rational(u, 2, 12))
        assert got == (u % 8 == 1) == bool(table[u])


@given(nonzero, st.sampled_from([2, 3, 5, 11, 19]))
def test_padic_is_square_vs_brute_rational(x, p):
    k = 8 if p == 2 else 6
    assert padic_is_square(PAdic.from_rational(x, p, 16)) == is_square_qp_brute(x, p, k)


@pytest.mark.parametrize("p", PRIMES)
def test_padic_sqrt_against_sympy_sqrt_mod(p):
    for a in range(1, 60):
        x = PAdic.from_rational(a, p, 10)
        if not padic_is_square(x):
            continue
        r = padic_sqrt(x)
        assert ((r * r) - x).is_zero_approx() or (r * r - x).valuation() >= 9
        if a % p:
            assert r.unit % p in sqrt_mod_oracle(a, p, all_roots=True)
            assert r.unit % p <= (p - 1) // 2


def test_hilbert_symbol_examples():
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(2, 5, 5) == -1
    assert hilbert_symbol(3, 5, 3) == -1
    for a in (2, 3, -1, 6, -5):
        for b in (5, -7, 10, 3):
            prod = 1
            for q in (2, 3, 5, 7):
                prod *= hilbert_symbol(a, b, q)
            assert prod * (-1 if a < 0 and b < 0 else 1) == 1


def _rand_elt(field, rng, prec=20):
    a = Fraction(rng.randint(-40, 40), rng.choice([1, 1, 3, 7]))
    b = Fraction(rng.randint(-40, 40)) if field.degree == 2 else 0
    if a == 0 and b == 0:
        a = Fraction(1)
    return LocalElement.from_rationals(field, a, b, prec)


@pytest.mark.parametrize("field", FIELDS, ids=lambda f: f.name)
def test_is_square_of_squares_and_twists(field):
    rng = random.Random(7)
    for _ in range(100):
        x, u = _rand_elt(field, rng), _rand_elt(field, rng)
        try:
            assert is_square(x * x)
            assert is_square(u * x * x) == is_square(u)
        except PrecisionError:
            continue


@pytest.mark.parametrize("field", FIELDS, ids=lambda f: f.name)
def test_valuation_additive(field):
    rng = random.Random(11)
    for _ in range(100):
        x, y = _rand_elt(field, rng), _rand_elt(field, rng)
        assert local_valuation(x * y) == local_valuation(x) + local_valuation(y)


@pytest.mark.parametrize("field", FIELDS, ids=lambda f: f.name)
def test_sqrt_lift_roundtrip(field):
    rng = random.Random(3)
    for _ in range(40):
        x = _rand_elt(field, rng)
        y = sqrt_lift(x * x)
        d = y * y - x * x
        assert d.a.is_zero_approx() or d.a.valuation() >= 8
    with pytest.raises(DomainError):
        sqrt_lift(LocalElement.from_rationals(LocalFieldDesc.base(3), 2, 0, 10))


@pytest.mark.parametrize("field", FIELDS, ids=lambda f: f.name)
def test_square_class_dimension(field):
    basis = square_class_basis(field, 12)
    assert basis.dim == field.square_class_dim() == (2 + field.degree if field.p == 2 else 2)


@pytest.mark.parametrize("field", FIELDS, ids=lambda f: f.name)
def test_square_class_coords_homomorphism(field):
    rng = random.Random(5)
    basis = square_class_basis(field, 12)
    for _ in range(200):
        x, y = _rand_elt(field, rng), _rand_elt(field, rng)
        cx, cy, cxy = basis.coords(x), basis.coords(y), basis.coords(x * y)
        assert cxy == [(a + b) % 2 for a, b in zip(cx, cy)]


def test_irreducibility_check():
    with pytest.raises(DomainError):
        LocalFieldDesc.quadratic(2, 0, -17)  # 17 is a square in Q_2
    with pytest.raises(DomainError):
        LocalFieldDesc.quadratic(5, 0, 1)    # -1 is a square in Q_5


def test_local_roots_certify_published_witnesses():
    # x = -1 for p = 3 mod 32 and x = 5 for p = 19 mod 32
    Q2 = LocalFieldDesc.base(2)
    for p, x in [(3, -1), (67, -1), (19, 5), (83, 5)]:
        ys = local_roots_of_f(detect_case(p, 0, 1), Q2, Fraction(x))
        assert len(ys) == 2
    for p in (3, 5, 11, 13):
        local_roots_of_f(detect_case(p, 0, 2), Q2, Fraction(1, 4))
    with pytest.raises(PrecisionError):
        local_roots_of_f(detect_case(19, 0, 1), Q2, Fraction(-1))


def test_published_congruences():
    # f(-1) = 4 mod 32, f(5) = 4 mod 32, 2^10 f(1/4) = 1 mod 8
    assert detect_case(3, 0, 1).f(-1) % 32 == 4
    assert detect_case(19, 0, 1).f(5) % 32 == 4
    assert (2 ** 10 * detect_case(3, 0, 2).f(Fraction(1, 4))) % 8 == 1
