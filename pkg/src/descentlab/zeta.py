"""Point counts over F_q and F_{q^2}, the genus-2 zeta numerator and the
irreducibility test that rules out elliptic factors of the Jacobian over Q."""

from __future__ import annotations

from dataclasses import dataclass

import sympy

from .arith import Poly, quartic_irreducible_over_Q
from .etale import CurveParams
from .localfields import legendre


class BadReduction(ValueError):
    pass


@dataclass(frozen=True)
class ZetaNumerator:
    q: int
    coeffs: tuple[int, int, int, int, int]

    def __post_init__(self):
        c0, c1, _, c3, c4 = self.coeffs
        if c0 != 1 or c3 != self.q * c1 or c4 != self.q ** 2:
            raise ArithmeticError(f"numerator {self.coeffs} violates the functional equation")

    @property
    def poly(self) -> Poly:
        return Poly(self.coeffs)

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("T" if k == 1 else f"T^{k}")
            if k == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"{c}{mono}")
        return "+".join(terms).replace("+-", "-")


def _nonresidue(q: int) -> int:
    return next(n for n in range(2, q) if legendre(n, q) == -1)


def _check_q(q: int) -> None:
    if q < 3 or not sympy.isprime(q):
        raise ValueError(f"q = {q}: only odd primes are supported")


def count_points_poly(f: Poly, q: int, m: int = 1) -> int:
    """#C(F_{q^m}) for the smooth model of y^2 = f(x), deg f in {5, 6}."""
    _check_q(q)
    if m not in (1, 2):
        raise ValueError("m must be 1 or 2")
    cs = [int(c.numerator) * pow(c.denominator, -1, q) % q for c in f.coeffs]
    deg = len(cs) - 1
    if deg not in (5, 6):
        raise ValueError("expected a quintic or sextic")
    if m == 1:
        affine = 0
        for x in range(q):
            v = 0
            for c in reversed(cs):
                v = (v * x + c) % q
            affine += 1 + legendre(v, q)
        lead = legendre(cs[-1], q)
    else:
        n = _nonresidue(q)
        affine = 0
        for a in range(q):
            for b in range(q):
                # Horner in F_q(sqrt n): (va + vb r)(a + b r) + c
                va, vb = 0, 0
                for c in reversed(cs):
                    va, vb = (va * a + vb * b * n + c) % q, (va * b + vb * a) % q
                norm = (va * va - n * vb * vb) % q
                affine += 1 + legendre(norm, q)
        lead = 1  # every element of F_q is a square in F_{q^2}
    infinity = 1 if deg == 5 else 1 + lead
    return affine + infinity


def count_points(params: CurveParams, q: int, m: int = 1) -> int:
    if q in (2, params.p):
        raise BadReduction(f"bad reduction at q = {q}")
    return count_points_poly(params.f, q, m)


def numerator_from_counts(q: int, n1: int, n2: int) -> ZetaNumerator:
    c1 = n1 - (q + 1)
    twice_c2 = n2 - (q * q + 1) + c1 * c1
    if twice_c2 % 2:
        raise ArithmeticError("non-integral second coefficient")
    return ZetaNumerator(q, (1, c1, twice_c2 // 2, q * c1, q * q))


def zeta_numerator_poly(f: Poly, q: int) -> ZetaNumerator:
    return numerator_from_counts(q, count_points_poly(f, q, 1), count_points_poly(f, q, 2))


def zeta_numerator(params: CurveParams, q: int) -> ZetaNumerator:
    return numerator_from_counts(q, count_points(params, q, 1), count_points(params, q, 2))


def covers_elliptic_obstruction(params: CurveParams, q: int) -> bool:
    """True when the numerator over F_q is irreducible over Q."""
    return quartic_irreducible_over_Q(zeta_numerator(params, q).poly)


__all__ = [
    "BadReduction", "ZetaNumerator", "count_points_poly", "count_points", "numerator_from_counts",
    "zeta_numerator_poly", "zeta_numerator", "covers_elliptic_obstruction",
]
