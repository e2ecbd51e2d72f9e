import random
import time

import pytest
import sympy

from descentlab.appendixff import (
    CONTROL_EQUATION,
    FERMAT_EQUATIONS,
    TRIVIAL_FF_POINTS,
    PolyTriple,
    abc_degree_chain_possible,
    distinct_root_count,
    ff_rhs,
    ff_search_general,
    fermat_quartic_search,
    function_field_point_search,
    mason_stothers_holds,
    substitute_s4,
)
from descentlab.arith import Poly, poly_gcd

x = Poly.x()


def _sympy_radical_degree(g: Poly) -> int:
    s = sympy.Symbol("s")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * s ** k for k, c in enumerate(g.coeffs))
    return sympy.degree(sympy.sqf_part(sympy.Poly(expr, s)), s)


def _rand_poly(rng, max_deg=6, h=5) -> Poly:
    d = rng.randint(0, max_deg)
    return Poly([rng.randint(-h, h) for _ in range(d + 1)])


def test_distinct_root_count_examples():
    assert distinct_root_count(x * x * (x + 1)) == 2
    assert distinct_root_count(x ** 4 + x * x * 4) == 3
    assert distinct_root_count(Poly([7])) == 0
    with pytest.raises(ValueError):
        distinct_root_count(Poly())


def test_distinct_root_count_against_sympy():
    rng = random.Random(1)
    for _ in range(200):
        g = _rand_poly(rng) * _rand_poly(rng, 3) * _rand_poly(rng, 2)
        if g.is_zero():
            continue
        assert distinct_root_count(g) == _sympy_radical_degree(g)


def test_radical_subadditive():
    rng = random.Random(2)
    for _ in range(300):
        g, h = _rand_poly(rng, 4), _rand_poly(rng, 4)
        if g.is_zero() or h.is_zero():
            continue
        n = distinct_root_count(g * h)
        assert n <= distinct_root_count(g) + distinct_root_count(h)
        if poly_gcd(g, h).degree == 0:
            assert n == distinct_root_count(g) + distinct_root_count(h)


def test_mason_stothers_on_random_triples():
    rng = random.Random(3)
    count = 0
    while count < 1000:
        a, b = _rand_poly(rng), _rand_poly(rng)
        c = a + b
        if a.is_zero() or b.is_zero() or c.is_zero():
            continue
        if max(a.degree, b.degree, c.degree) < 1 or poly_gcd(a, b).degree != 0:
            continue
        assert mason_stothers_holds(PolyTriple(a, b, c))
        count += 1


def test_mason_stothers_extremal_family():
    # x^n + 1 = x^n + 1: n0 = n + 1, one more than the degree
    for n in range(1, 9):
        assert mason_stothers_holds(PolyTriple(x ** n, Poly([1]), x ** n + 1))
    assert mason_stothers_holds(PolyTriple(x, Poly([1]), x + 1))


def test_poly_triple_validation():
    with pytest.raises(ValueError):
        PolyTriple(x, x, x * 3)  # not coprime
    with pytest.raises(ValueError):
        PolyTriple(x, Poly([1]), x + 2)  # a + b != c
    with pytest.raises(ValueError):
        PolyTriple(Poly([1]), Poly([2]), Poly([3]))  # all constant


def test_degree_chain_has_no_nonconstant_solution():
    for d1 in range(0, 9):
        for d5 in range(0, 9):
            assert not abc_degree_chain_possible(d1, d5)


def test_fermat_quartics_have_no_solutions():
    start = time.perf_counter()
    assert fermat_quartic_search(500) == []
    assert time.perf_counter() - start < 10
    assert set(FERMAT_EQUATIONS) == {"X^4+Y^4=Z^2", "X^4+4Y^4=Z^2"}


def test_search_loop_finds_planted_solutions():
    sols = fermat_quartic_search(20, CONTROL_EQUATION)
    assert ("X^4+3Y^4=Z^2", 1, 1, 2) in sols
    assert all(X ** 4 + 3 * Y ** 4 == Z * Z for _, X, Y, Z in sols)
    with pytest.raises(ValueError):
        fermat_quartic_search(0)


@pytest.mark.parametrize("i,j", [(0, 1), (1, 1)])
def test_function_field_search_trivial_only(i, j):
    start = time.perf_counter()
    assert function_field_point_search(i, j, 2, 2) == sorted(TRIVIAL_FF_POINTS)
    assert time.perf_counter() - start < 10


def test_function_field_search_control_curve():
    # Y^2 = X Z (X^2 + 3 Z^2)(X^2 + 8 Z^2) has [1:6:1]
    assert "[1:6:1]" in ff_search_general(3, 8, 0, 1, 2)
    with pytest.raises(ValueError):
        function_field_point_search(0, 1, 5, 2)


@pytest.mark.parametrize("i,j", [(0, 1), (1, 1), (2, 3), (3, 2)])
def test_s4_substitution_identity(i, j):
    rng = random.Random(10 * i + j)
    s = Poly.x()
    for _ in range(20):
        X, Y, Z = _rand_poly(rng, 3, 3), _rand_poly(rng, 3, 3), _rand_poly(rng, 3, 3)
        Xs, U, V = substitute_s4(j, X, Y, Z)
        lhs_t = Y * Y - ff_rhs(i, j, X, Z)
        lhs_s = U * U - ff_rhs(i, 0, Xs, V)
        # U^2 - XV(...) equals s^(2j) times the original equation at t = s^4
        composed = Poly()
        for c in reversed(lhs_t.coeffs):
            composed = composed * s ** 4 + c
        assert lhs_s == s ** (2 * j) * composed


@pytest.mark.parametrize("i", range(8))
def test_square_substitution_system(i):
    rng = random.Random(i)
    for _ in range(20):
        U1, U2 = _rand_poly(rng, 3, 4), _rand_poly(rng, 3, 4)
        X, V = U1 * U1, U2 * U2
        if i % 4 in (0, 2):
            target = X * X + V * V * 2 ** i
            e = (i - (i % 4)) // 4
        else:
            target = X * X + V * V * 2 ** (i + 1)
            e = (i + 1 - ((i + 1) % 4)) // 4
        U5 = U2 * 2 ** e
        coef = 1 if (i % 4 in (0, 3)) else 4
        assert U1 ** 4 + U5 ** 4 * coef == target
