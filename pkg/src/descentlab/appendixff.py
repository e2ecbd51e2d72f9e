"""Polynomial abc (Mason-Stothers), the quartic Fermat searches and a bounded
search for points of the family over Q(t)."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import Poly, poly_gcd

FERMAT_EQUATIONS = {"X^4+Y^4=Z^2": 1, "X^4+4Y^4=Z^2": 4}
CONTROL_EQUATION = {"X^4+3Y^4=Z^2": 3}  # has (1, 1, 2)


def distinct_root_count(g: Poly) -> int:
    """Degree of the radical of g, i.e. deg(g / gcd(g, g'))."""
    if g.is_zero():
        raise ValueError("zero polynomial has no finite root count")
    if g.degree == 0:
        return 0
    g = g.primitive()
    return (g // poly_gcd(g, g.derivative())).degree


@dataclass(frozen=True)
class PolyTriple:
    a: Poly
    b: Poly
    c: Poly

    def __post_init__(self):
        if self.a + self.b != self.c:
            raise ValueError("a + b != c")
        for u, v in ((self.a, self.b), (self.a, self.c), (self.b, self.c)):
            if u.is_zero() or v.is_zero() or poly_gcd(u, v).degree != 0:
                raise ValueError("polynomials are not pairwise coprime")
        if max(self.a.degree, self.b.degree, self.c.degree) < 1:
            raise ValueError("all three polynomials are constant")


def mason_stothers_holds(t: PolyTriple) -> bool:
    """max(deg a, deg b, deg c) < n0(abc)."""
    n0 = distinct_root_count(t.a * t.b * t.c)
    return max(t.a.degree, t.b.degree, t.c.degree) < n0


def abc_degree_chain_possible(d1: int, d5: int) -> bool:
    """Whether coprime nonconstant U1, U5, U3 with U1^4 + c U5^4 = U3^2 (c > 0) could
    satisfy the abc bound: deg U3 = 2 max(d1, d5) and 2 deg U3 < d1 + deg U3 + d5."""
    if d1 == 0 and d5 == 0:
        return False
    d3 = 2 * max(d1, d5)
    return 2 * d3 < d1 + d3 + d5


def fermat_quartic_search(bound: int, equations: dict[str, int] | None = None
                          ) -> list[tuple[str, int, int, int]]:
    """All 0 < X, Y <= bound with X^4 + c Y^4 a square, per equation."""
    if bound < 1:
        raise ValueError("bound must be positive")
    eqs = FERMAT_EQUATIONS if equations is None else equations
    fourth = [k ** 4 for k in range(bound + 1)]
    out = []
    for name, c in eqs.items():
        for X in range(1, bound + 1):
            x4 = fourth[X]
            for Y in range(1, bound + 1):
                n = x4 + c * fourth[Y]
                z = math.isqrt(n)
                if z * z == n:
                    out.append((name, X, Y, z))
    return out


def _poly_sqrt(g: Poly) -> Poly | None:
    """A square root of g in Q[t], or None."""
    if g.is_zero():
        return Poly()
    n = g.degree
    if n % 2:
        return None
    lc = g.lc()
    if lc < 0:
        return None
    rn, rd = math.isqrt(lc.numerator), math.isqrt(lc.denominator)
    if rn * rn != lc.numerator or rd * rd != lc.denominator:
        return None
    m = n // 2
    # solve from the top: r_m, r_{m-1}, ...
    r = [Fraction(0)] * (m + 1)
    r[m] = Fraction(rn, rd)
    cs = g.coeffs
    for k in range(m - 1, -1, -1):
        acc = cs[m + k] - sum(r[a] * r[m + k - a] for a in range(k + 1, m))
        r[k] = acc / (2 * r[m])
    root = Poly(r)
    return root if root * root == g else None


def ff_rhs(i: int, j: int, X: Poly, Z: Poly) -> Poly:
    """X Z (X^2 + 2^i t^j Z^2)(X^2 + 2^(i+1) t^j Z^2)."""
    return _rhs_general(2 ** i, 2 ** (i + 1), j, X, Z)


def _rhs_general(A: int, B: int, j: int, X: Poly, Z: Poly) -> Poly:
    tj = Poly.x() ** j
    return X * Z * (X * X + tj * Z * Z * A) * (X * X + tj * Z * Z * B)


def substitute_s4(j: int, X: Poly, Y: Poly, Z: Poly) -> tuple[Poly, Poly, Poly]:
    """t = s^4, U = s^j Y, V = s^(2j) Z, as polynomials in s."""
    s4 = Poly.x() ** 4
    s = Poly.x()
    return _compose(X, s4), (s ** j) * _compose(Y, s4), (s ** (2 * j)) * _compose(Z, s4)


def _compose(g: Poly, h: Poly) -> Poly:
    out = Poly()
    for c in reversed(g.coeffs):
        out = out * h + c
    return out


@dataclass(frozen=True)
class FFPoint:
    X: Poly
    Y: Poly
    Z: Poly

    @property
    def trivial(self) -> bool:
        return self.X.is_zero() or self.Z.is_zero()

    def __str__(self) -> str:
        return f"[{self.X}:{self.Y}:{self.Z}]"


TRIVIAL_FF_POINTS = ("[0:0:1]", "[1:0:0]")


def _is_int_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def _polys(deg_bound: int, coeff_bound: int):
    rng = range(-coeff_bound, coeff_bound + 1)
    for cs in itertools.product(rng, repeat=deg_bound + 1):
        yield Poly(cs)


def function_field_point_search(i: int, j: int, deg_bound: int, coeff_bound: int) -> list[str]:
    """Points [X:Y:Z] of Y^2 = X Z (X^2 + 2^i t^j Z^2)(X^2 + 2^(i+1) t^j Z^2) over Q(t)
    with X, Z coprime in Z[t] of bounded degree and height (bounded check)."""
    return ff_search_general(2 ** i, 2 ** (i + 1), j, deg_bound, coeff_bound)


def ff_search_general(A: int, B: int, j: int, deg_bound: int, coeff_bound: int) -> list[str]:
    """Same search for Y^2 = X Z (X^2 + A t^j Z^2)(X^2 + B t^j Z^2)."""
    if deg_bound > 4 or coeff_bound > 3:
        raise ValueError("search bounds are limited to deg <= 4, coefficients <= 3")
    found: set[str] = set()
    polys = list(_polys(deg_bound, coeff_bound))
    samples = range(-3, 4)
    values = {P.coeffs: [int(P(t)) for t in samples] for P in polys}
    coef = [(A * t ** j, B * t ** j) for t in samples]
    for X in polys:
        xs = values[X.coeffs]
        for Z in polys:
            if X.is_zero() and Z.is_zero():
                continue
            if X.is_zero():
                found.add(TRIVIAL_FF_POINTS[0])
                continue
            if Z.is_zero():
                found.add(TRIVIAL_FF_POINTS[1])
                continue
            # a square in Z[t] takes square values at integers
            zs = values[Z.coeffs]
            if not all(_is_int_square(x * z * (x * x + a * z * z) * (x * x + b * z * z))
                       for x, z, (a, b) in zip(xs, zs, coef)):
                continue
            if poly_gcd(X, Z).degree != 0 or math.gcd(*(int(c) for c in X.coeffs + Z.coeffs)) != 1:
                continue
            Y = _poly_sqrt(_rhs_general(A, B, j, X, Z))
            if Y is not None:
                found.add(str(FFPoint(X, Y, Z)))
    return sorted(found)


__all__ = [
    "FERMAT_EQUATIONS", "CONTROL_EQUATION", "distinct_root_count", "PolyTriple",
    "mason_stothers_holds", "abc_degree_chain_possible", "fermat_quartic_search", "ff_rhs",
    "substitute_s4", "FFPoint", "TRIVIAL_FF_POINTS", "function_field_point_search",
    "ff_search_general",
]
