"""Imaginary quadratic fields Q(sqrt(-m)): units mod squares, 2-torsion of the
class group by genus theory, the Cl^2 membership test and Cornacchia.

Elements are pairs (x, y) meaning x + y*sqrt(-m) with rational x, y.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import sympy

from .arith import F2Subspace, F2Vector
from .localfields import PAdic, _residue_sqrt, hilbert_symbol, legendre, padic_sqrt, vp

Elt = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class ImagQuadField:
    m: int  # squarefree, positive

    def __post_init__(self):
        if self.m < 1 or not sympy.ntheory.factor_.core(self.m) == self.m:
            raise ValueError(f"{self.m} is not a positive squarefree integer")

    @property
    def D(self) -> int:
        return -self.m if self.m % 4 == 3 else -4 * self.m

    @property
    def ramified_primes(self) -> list[int]:
        return sorted(sympy.factorint(-self.D))

    @property
    def r(self) -> int:
        return sum(1 for q in self.ramified_primes if q != 2)

    def norm(self, a: Elt) -> Fraction:
        return a[0] * a[0] + self.m * a[1] * a[1]

    def mul(self, a: Elt, b: Elt) -> Elt:
        return (a[0] * b[0] - self.m * a[1] * b[1], a[0] * b[1] + a[1] * b[0])

    def __str__(self) -> str:
        return f"Q(sqrt(-{self.m}))"


@dataclass(frozen=True)
class IdealDesc:
    """Ideal (n, a + b*sqrt(-m)) of norm ``norm``."""

    field: ImagQuadField
    norm: int
    n: int
    gen: Elt

    def __post_init__(self):
        N = self.field.norm(self.gen)
        if N.denominator != 1 or int(N) % self.norm:
            raise ValueError("generator norm is not divisible by the ideal norm")


def ramified_prime_ideal(K: ImagQuadField, q: int) -> IdealDesc:
    if q not in K.ramified_primes:
        raise ValueError(f"{q} does not ramify in {K}")
    if q == 2 and K.m % 2 == 1:
        return IdealDesc(K, 2, 2, (Fraction(1), Fraction(1)))
    return IdealDesc(K, q, q, (Fraction(0), Fraction(1)))


def unit_square_basis(K: ImagQuadField | None) -> list[Elt]:
    """Basis of O^x / O^x2 (K = None stands for Q)."""
    if K is None or K.m not in (1, 3):
        return [(Fraction(-1), Fraction(0))]
    if K.m == 1:
        return [(Fraction(0), Fraction(1))]
    return [(Fraction(1, 2), Fraction(1, 2))]


def class_two_torsion_size(K: ImagQuadField) -> int:
    return 2 ** (K.r - 1) if K.D % 4 == 1 else 2 ** K.r


def in_class_group_squared(a_norm: int, K: ImagQuadField) -> bool:
    """Genus test: N(a) x^2 + D y^2 = z^2 solvable at every l | D."""
    if a_norm <= 0:
        raise ValueError("ideal norms are positive")
    return all(hilbert_symbol(a_norm, K.D, q) == 1 for q in K.ramified_primes)


def genus_character(a_norm: int, K: ImagQuadField) -> list[int]:
    """Bits (0 = +1) of the Hilbert symbols (N(a), D)_l for l | D."""
    return [0 if hilbert_symbol(a_norm, K.D, q) == 1 else 1 for q in K.ramified_primes]


def represents(m: int, n: int) -> tuple[int, int] | None:
    """Some (x, y) >= 0 with x^2 + m y^2 = n, or None."""
    for y in range(isqrt(n // m) + 1 if m else 1):
        x2 = n - m * y * y
        x = isqrt(x2)
        if x * x == x2:
            return x, y
    return None


def is_principal_norm(n: int, K: ImagQuadField) -> bool:
    """Whether some integral element has norm n."""
    if K.m % 4 == 3:
        return represents(K.m, 4 * n) is not None
    return represents(K.m, n) is not None


def cornacchia(d: int, n: int) -> tuple[int, int] | None:
    """(a, b) with a^2 + d b^2 = n, a, b >= 1 and a minimal; None if impossible."""
    if d < 1 or n < 1:
        raise ValueError("d and n must be positive")
    sols: list[tuple[int, int]] = []
    if sympy.isprime(n) and n % d and n != 2:
        if legendre(-d, n) != 1:
            return None
        r = _residue_sqrt(-d % n, n)
        if 2 * r < n:
            r = n - r
        a, b = n, r
        limit = isqrt(n)
        while b > limit:
            a, b = b, a % b
        rest = n - b * b
        if rest % d == 0:
            s = isqrt(rest // d)
            if s * s * d == rest and b > 0 and s > 0:
                sols.append((b, s))
                if d == 1:
                    sols.append((s, b))
    else:
        for b in range(1, isqrt(n // d) + 1):
            rest = n - d * b * b
            a = isqrt(rest)
            if a >= 1 and a * a == rest:
                sols.append((a, b))
    if not sols:
        return None
    return min(sols)


def cl2_basis(K: ImagQuadField) -> list[int]:
    """Rational integers g = prod of ramified primes lifting a basis of Cl(K)[2].

    (g) is the square of a product of ramified primes; the lifted class is
    nontrivial exactly when that product is not principal.
    """
    ram = K.ramified_primes
    n = len(ram)
    space = F2Subspace(n)
    for mask in range(1, 1 << n):
        if is_principal_norm(_prod(ram, mask), K):
            space.add(F2Vector(mask, n))
    chosen: list[int] = []
    for mask in range(1, 1 << n):
        if space.add(F2Vector(mask, n)):
            chosen.append(mask)
    out = [_prod(ram, mask) for mask in chosen]
    if 2 ** len(out) != class_two_torsion_size(K):
        raise ArithmeticError(f"genus theory mismatch for {K}: {len(out)} lifts")
    return out


def _prod(ram: list[int], mask: int) -> int:
    out = 1
    for k, q in enumerate(ram):
        if mask >> k & 1:
            out *= q
    return out


def valuations_above(K: ImagQuadField, a: Elt, q: int) -> list[int]:
    """Valuations of a at the primes of K above an odd prime q not dividing m."""
    if q == 2 or K.m % q == 0:
        raise ValueError("only for odd primes unramified in K")
    N = K.norm(a)
    vN = vp(N.numerator, q) - vp(N.denominator, q)
    if legendre(-K.m, q) == -1:
        return [vN // 2]
    prec = vN + 8 + _den_val(a, q)
    rho = padic_sqrt(PAdic.from_rational(-K.m, q, prec))
    x, y = a
    if y == 0:
        v = vp(x.numerator, q) - vp(x.denominator, q)
        return [v, v]
    if x == 0:
        v = vp(y.numerator, q) - vp(y.denominator, q)
        return [v, v]
    val1 = (PAdic.from_rational(x, q, prec) + PAdic.from_rational(y, q, prec) * rho).valuation()
    return [val1, vN - val1]


def _den_val(a: Elt, q: int) -> int:
    return sum(vp(c.denominator, q) for c in a if c != 0)


__all__ = [
    "ImagQuadField", "IdealDesc", "ramified_prime_ideal", "unit_square_basis",
    "class_two_torsion_size", "in_class_group_squared", "genus_character", "represents",
    "is_principal_norm", "cornacchia", "cl2_basis", "valuations_above",
]
