"""Rational points: the integral torsion candidate search and the proof status."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .arith import poly_discriminant
from .etale import CurveParams

PROVED = "proved"
CONDITIONAL = "conditional"


@dataclass(frozen=True, order=True)
class CurvePoint:
    x: Fraction = Fraction(0)
    y: Fraction = Fraction(0)
    at_infinity: bool = False

    @classmethod
    def infinity(cls) -> "CurvePoint":
        return cls(Fraction(0), Fraction(0), True)

    def __str__(self) -> str:
        return "inf" if self.at_infinity else f"({self.x},{self.y})"


def is_on_curve(params: CurveParams, x, y) -> bool:
    x, y = Fraction(x), Fraction(y)
    return y * y == params.f(x)


def _square_divisors(fac: dict[int, int]) -> list[dict[int, int]]:
    """Factorizations of the positive b with b^2 | n, given the factorization of n."""
    out: list[dict[int, int]] = [{}]
    for q, e in fac.items():
        out = [{**b, q: k} for b in out for k in range(e // 2 + 1)]
    return out


def _value(fac: dict[int, int]) -> int:
    return math.prod(q ** e for q, e in fac.items())


def _divisors_upto(fac: dict[int, int], limit: int) -> list[int]:
    out = [1]
    for q, e in fac.items():
        nxt = []
        for d in out:
            for _ in range(e + 1):
                if d > limit:
                    break
                nxt.append(d)
                d *= q
        out = nxt
    return sorted(out)


def _integer_roots(params: CurveParams, b_fac: dict[int, int]) -> list[int]:
    """Integers a with f(a) = b^2 (b > 0 given by its factorization).

    a divides the constant term b^2 of f(x) - b^2; f(a) < 0 for a < 0 and
    f(a) > a^5 for a > 0, so only divisors a <= (b^2)^(1/5) can be roots.
    """
    f = params.f
    b2 = _value(b_fac) ** 2
    limit = sympy.integer_nthroot(b2, 5)[0]
    return [a for a in _divisors_upto({q: 2 * e for q, e in b_fac.items()}, limit) if f(a) == b2]


def torsion_candidates(params: CurveParams) -> list[CurvePoint]:
    """Integral (a, b) with b = 0 or b^2 | disc(f), and f(a) = b^2."""
    disc = int(poly_discriminant(params.f))
    # b = 0: x = 0 is the only rational root (-c2, -c3 are not rational squares)
    out = {CurvePoint(Fraction(0), Fraction(0))}
    for b_fac in _square_divisors(sympy.factorint(abs(disc))):
        b = _value(b_fac)
        for a in _integer_roots(params, b_fac):
            out.add(CurvePoint(Fraction(a), Fraction(b)))
            out.add(CurvePoint(Fraction(a), Fraction(-b)))
    return sorted(out)


def aj_excluded(params: CurveParams) -> bool:
    """p = 3 with (i, j) = (2, 2) or (3, 2) mod 4, where the torsion argument does not apply."""
    return params.p == 3 and (params.i % 4, params.j % 4) in ((2, 2), (3, 2))


def small_integral_points(params: CurveParams, bound: int) -> list[CurvePoint]:
    """Integral points with 0 <= x <= bound (f(x) < 0 for x < 0)."""
    f = params.f
    out = []
    for a in range(bound + 1):
        v = int(f(a))
        r = math.isqrt(v)
        if r * r == v:
            out.append(CurvePoint(Fraction(a), Fraction(r)))
            if r:
                out.append(CurvePoint(Fraction(a), Fraction(-r)))
    return out


@dataclass
class PointsReport:
    params: CurveParams
    points: list[CurvePoint]
    status: str
    rank_bound: int | None
    reason: str
    extra_points: list[CurvePoint] = field(default_factory=list)

    def point_strings(self) -> list[str]:
        return [str(P) for P in self.points]

    def to_json(self) -> dict:
        return {
            "points": self.point_strings(),
            "status": self.status,
            "rank_bound": self.rank_bound,
            "reason": self.reason,
            "extra_points": [str(P) for P in self.extra_points],
        }


def rational_points(params: CurveParams, prec: int | None = None,
                    extra_bound: int = 1000) -> PointsReport:
    """C(Q) when the rank bound is 0; otherwise the torsion candidates, marked conditional."""
    from .descent import DescentError, selmer_and_rank

    cands = torsion_candidates(params) + [CurvePoint.infinity()]
    rank_bound = None
    reason = ""
    if params.in_family_case:
        rank_bound = selmer_and_rank(params, prec).rank_bound
    else:
        try:
            rank_bound = selmer_and_rank(params, prec).rank_bound
        except DescentError as exc:
            reason = f"descent failed: {exc}"
    if rank_bound == 0 and params.in_family_case and not aj_excluded(params):
        return PointsReport(params, cands, PROVED, 0, "rank bound 0; all points are torsion")
    if not reason:
        reason = ("torsion argument excluded for these parameters" if aj_excluded(params)
                  else f"rank bound {rank_bound}")
    known = set(cands)
    extra = [P for P in small_integral_points(params, extra_bound) if P not in known]
    return PointsReport(params, cands, CONDITIONAL, rank_bound, reason, extra)


__all__ = [
    "PROVED", "CONDITIONAL", "CurvePoint", "is_on_curve", "torsion_candidates", "aj_excluded",
    "small_integral_points", "PointsReport", "rational_points",
]
