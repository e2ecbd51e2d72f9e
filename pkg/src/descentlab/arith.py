"""Exact arithmetic substrate: rational polynomials, F2 linear algebra and
small multiquadratic constant rings."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

NEG_INF = float("-inf")


class DimensionMismatch(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# Polynomials over Q
# ---------------------------------------------------------------------------


class Poly:
    """Univariate polynomial with exact rational coefficients, ascending order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def from_roots(cls, roots: Iterable) -> "Poly":
        out = cls([1])
        for r in roots:
            out = out * cls([-_frac(r), 1])
        return out

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __repr__(self) -> str:
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else ""
            else:
                coef = str(c)
                if mono:
                    coef += "*"
            terms.append(coef + mono)
        return " + ".join(terms).replace("+ -", "- ")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            other = Poly([other])
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _coerce(self, other) -> "Poly":
        return other if isinstance(other, Poly) else Poly([other])

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        other = self._coerce(other)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.degree != 0:
                raise TypeError("Poly division only by nonzero constants; use divmod")
            other = other.coeffs[0]
        other = _frac(other)
        if other == 0:
            raise ZeroDivisionError("division by zero")
        return Poly(c / other for c in self.coeffs)

    def __pow__(self, n: int) -> "Poly":
        out = Poly([1])
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(), Poly(rem)
        quot = [Fraction(0)] * (dq + 1)
        lead = other.coeffs[-1]
        for k in range(dq, -1, -1):
            q = rem[k + len(other.coeffs) - 1] / lead
            quot[k] = q
            if q:
                for m, c in enumerate(other.coeffs):
                    rem[k + m] -= q * c
        return Poly(quot), Poly(rem[: len(other.coeffs) - 1])

    def __floordiv__(self, other) -> "Poly":
        return self.divmod(self._coerce(other))[0]

    def __mod__(self, other) -> "Poly":
        return self.divmod(self._coerce(other))[1]

    def derivative(self) -> "Poly":
        return Poly(k * c for k, c in enumerate(self.coeffs) if k)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self * (1 / self.lc())

    def content(self) -> Fraction:
        """Positive rational c such that self / c has coprime integer coefficients."""
        if self.is_zero():
            return Fraction(0)
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, int(c * den))
        return Fraction(g, den)

    def primitive(self) -> "Poly":
        if self.is_zero():
            return self
        out = self * (1 / self.content())
        return -out if out.lc() < 0 else out

    def integer_coeffs(self) -> list[int]:
        if any(c.denominator != 1 for c in self.coeffs):
            raise ValueError("polynomial has non-integral coefficients")
        return [int(c) for c in self.coeffs]


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def resultant(f: Poly, g: Poly) -> Fraction:
    """Resultant over Q by the Euclidean remainder sequence."""
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    res = Fraction(1)
    while True:
        m, n = f.degree, g.degree
        if n == 0:
            return res * g.lc() ** m
        r = f % g
        if r.is_zero():
            return Fraction(0)
        if (m * n) % 2:
            res = -res
        res *= g.lc() ** (m - r.degree)
        f, g = g, r


def poly_discriminant(f: Poly) -> int | Fraction:
    """disc(f) = (-1)^(n(n-1)/2) Res(f, f') / lc(f)."""
    n = f.degree
    if f.is_zero() or n < 2:
        raise ValueError("discriminant needs degree >= 2")
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    d = sign * resultant(f, f.derivative()) / f.lc()
    return int(d) if d.denominator == 1 else d


def prime_support(n: int) -> set[int]:
    from sympy import factorint

    return set(factorint(abs(int(n))).keys())


def divisors(n: int) -> list[int]:
    from sympy import divisors as _divisors

    return list(_divisors(abs(int(n))))


def _integer_root_candidates(coeffs: Sequence[int]) -> list[Fraction]:
    """Rational roots of an integer polynomial (ascending coefficients)."""
    cs = list(coeffs)
    roots: list[Fraction] = []
    shift = 0
    while cs and cs[0] == 0:
        cs.pop(0)
        shift += 1
    if shift:
        roots.append(Fraction(0))
    if len(cs) < 2:
        return roots
    poly = Poly(cs)
    for num in divisors(cs[0]):
        for den in divisors(cs[-1]):
            for s in (1, -1):
                r = Fraction(s * num, den)
                if poly(r) == 0 and r not in roots:
                    roots.append(r)
    return roots


def quartic_irreducible_over_Q(P: Poly) -> bool:
    """Irreducibility of an integer quartic by exhaustive bounded factor search."""
    if P.degree != 4:
        raise ValueError("expected a degree-4 polynomial")
    c = P.integer_coeffs()
    if _integer_root_candidates(c):
        return False
    c0, c1, c2, c3, c4 = c
    # Factor coefficients are bounded by a Mignotte-style bound.
    bound = 6 * math.isqrt(sum(x * x for x in c) + 1) + 6
    for a2 in divisors(c4):
        b2 = c4 // a2
        for a0 in divisors(c0):
            for s in (1, -1):
                a0s = s * a0
                b0 = c0 // a0s
                det = a2 * b0 - a0s * b2
                if det:
                    # c3 = a2*b1 + a1*b2, c1 = a1*b0 + a0*b1 (linear in a1, b1)
                    num_a1 = c1 * a2 - c3 * a0s
                    num_b1 = c3 * b0 - c1 * b2
                    if num_a1 % det or num_b1 % det:
                        continue
                    cands = [(num_a1 // det, num_b1 // det)]
                else:
                    cands = []
                    for a1 in range(-bound, bound + 1):
                        if b2 == 0:
                            continue
                        rem = c3 - a1 * b2
                        if rem % a2:
                            continue
                        cands.append((a1, rem // a2))
                for a1, b1 in cands:
                    if (a2 * b1 + a1 * b2 == c3 and a1 * b0 + a0s * b1 == c1
                            and a2 * b0 + a1 * b1 + a0s * b2 == c2):
                        return False
    return True


# ---------------------------------------------------------------------------
# F2 linear algebra on int bitsets (bit k = coordinate k)
# ---------------------------------------------------------------------------


class F2Vector:
    __slots__ = ("bits", "width")

    def __init__(self, bits: int | Sequence[int], width: int | None = None):
        if not isinstance(bits, int):
            seq = list(bits)
            if width is None:
                width = len(seq)
            bits = sum(1 << k for k, b in enumerate(seq) if b % 2)
        if width is None:
            raise ValueError("width required for integer bit patterns")
        if bits >> width:
            raise ValueError("bits exceed declared width")
        self.bits = bits
        self.width = width

    @classmethod
    def from_string(cls, s: str) -> "F2Vector":
        return cls([int(ch) for ch in s])

    def __iter__(self):
        return (self.bits >> k & 1 for k in range(self.width))

    def to_list(self) -> list[int]:
        return list(self)

    def __str__(self) -> str:
        return "".join(str(b) for b in self)

    def __repr__(self) -> str:
        return f"F2Vector('{self}')"

    def __eq__(self, other) -> bool:
        return isinstance(other, F2Vector) and (self.bits, self.width) == (other.bits, other.width)

    def __hash__(self) -> int:
        return hash((self.bits, self.width))

    def __xor__(self, other: "F2Vector") -> "F2Vector":
        if self.width != other.width:
            raise DimensionMismatch(f"widths {self.width} and {other.width}")
        return F2Vector(self.bits ^ other.bits, self.width)

    __add__ = __xor__

    def is_zero(self) -> bool:
        return self.bits == 0

    def concat(self, other: "F2Vector") -> "F2Vector":
        return F2Vector(self.bits | (other.bits << self.width), self.width + other.width)


def _low_bit(x: int) -> int:
    return (x & -x).bit_length() - 1


class F2Subspace:
    """Row-reduced basis; pivots are the lowest set bits, strictly increasing."""

    __slots__ = ("rows", "ambient")

    def __init__(self, ambient: int, rows: Iterable[int] = ()):
        self.ambient = ambient
        self.rows: list[int] = []
        for r in rows:
            self._insert(r)

    def _reduce(self, x: int) -> int:
        for r in self.rows:
            if x >> _low_bit(r) & 1:
                x ^= r
        return x

    def _insert(self, x: int) -> bool:
        x = self._reduce(x)
        if not x:
            return False
        piv = _low_bit(x)
        self.rows = [r ^ x if r >> piv & 1 else r for r in self.rows]
        self.rows.append(x)
        self.rows.sort(key=_low_bit)
        return True

    def add(self, v: F2Vector) -> bool:
        """Add a vector; True when it enlarged the space."""
        if v.width != self.ambient:
            raise DimensionMismatch(f"vector width {v.width} vs ambient {self.ambient}")
        return self._insert(v.bits)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def pivots(self) -> list[int]:
        return [_low_bit(r) for r in self.rows]

    def basis(self) -> list[F2Vector]:
        return [F2Vector(r, self.ambient) for r in self.rows]

    def __contains__(self, v: F2Vector) -> bool:
        if v.width != self.ambient:
            raise DimensionMismatch(f"vector width {v.width} vs ambient {self.ambient}")
        return self._reduce(v.bits) == 0

    def copy(self) -> "F2Subspace":
        out = F2Subspace(self.ambient)
        out.rows = list(self.rows)
        return out

    def __repr__(self) -> str:
        return f"F2Subspace(dim={self.dim}, ambient={self.ambient})"


def f2_span(vectors: Sequence[F2Vector], width: int | None = None) -> F2Subspace:
    widths = {v.width for v in vectors}
    if len(widths) > 1:
        raise DimensionMismatch(f"mixed widths {sorted(widths)}")
    if width is None:
        width = widths.pop() if widths else 0
    elif widths and widths != {width}:
        raise DimensionMismatch(f"vectors of width {widths} in ambient {width}")
    sp = F2Subspace(width)
    for v in vectors:
        sp.add(v)
    return sp


def f2_dim_sum(A: F2Subspace, B: F2Subspace) -> int:
    if A.ambient != B.ambient:
        raise DimensionMismatch(f"ambient {A.ambient} vs {B.ambient}")
    out = A.copy()
    for r in B.rows:
        out._insert(r)
    return out.dim


def f2_kernel(images: Sequence[F2Vector]) -> list[list[int]]:
    """Basis of {c : sum_k c_k images[k] = 0}, each relation as a list of indices."""
    width = images[0].width if images else 0
    if any(v.width != width for v in images):
        raise DimensionMismatch("mixed widths")
    mask = (1 << width) - 1
    piv_rows: dict[int, int] = {}
    kernel: list[list[int]] = []
    for k, v in enumerate(images):
        x = v.bits | (1 << (width + k))
        while x & mask:
            piv = _low_bit(x)
            if piv in piv_rows:
                x ^= piv_rows[piv]
            else:
                piv_rows[piv] = x
                break
        else:
            tag = x >> width
            kernel.append(bits_of(tag))
    return kernel


def f2_intersection(A: F2Subspace, B: F2Subspace) -> F2Subspace:
    """Zassenhaus: row-reduce [a | a] and [b | 0]; rows with zero left half give A ∩ B."""
    if A.ambient != B.ambient:
        raise DimensionMismatch(f"ambient {A.ambient} vs {B.ambient}")
    w = A.ambient
    rows = [a | (a << w) for a in A.rows] + list(B.rows)
    piv_rows: dict[int, int] = {}
    for x in rows:
        while x:
            piv = _low_bit(x)
            if piv in piv_rows:
                x ^= piv_rows[piv]
            else:
                piv_rows[piv] = x
                break
    out = F2Subspace(w)
    for piv, r in piv_rows.items():
        if piv >= w:
            out._insert(r >> w)
    return out


# ---------------------------------------------------------------------------
# Multiquadratic constants: Q[g_1, ..., g_n] / (g_k^2 - s_k)
# ---------------------------------------------------------------------------


class Multiquad:
    """Element of Q[g_1..g_n]/(g_k^2 = squares[k]); terms keyed by generator bitmask."""

    __slots__ = ("squares", "names", "terms")

    def __init__(self, squares: tuple[int, ...], terms: dict[int, Fraction] | None = None,
                 names: tuple[str, ...] | None = None):
        self.squares = squares
        self.names = names if names is not None else tuple(f"g{k}" for k in range(len(squares)))
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def scalar(cls, x, squares=(), names=None) -> "Multiquad":
        return cls(squares, {0: _frac(x)}, names)

    @classmethod
    def gen(cls, k: int, squares, names=None) -> "Multiquad":
        return cls(squares, {1 << k: Fraction(1)}, names)

    def _lift(self, other) -> "Multiquad":
        if isinstance(other, Multiquad):
            if other.squares != self.squares:
                if not other.terms.keys() - {0}:
                    return Multiquad(self.squares, dict(other.terms), self.names)
                if not self.terms.keys() - {0}:
                    return other
                raise ValueError("mixing incompatible multiquadratic rings")
            return other
        return Multiquad(self.squares, {0: _frac(other)}, self.names)

    def _ctx(self, other: "Multiquad"):
        return (other.squares, other.names) if len(other.squares) > len(self.squares) else (self.squares, self.names)

    def __add__(self, other) -> "Multiquad":
        other = self._lift(other)
        sq, nm = self._ctx(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Multiquad(sq, out, nm)

    __radd__ = __add__

    def __neg__(self) -> "Multiquad":
        return Multiquad(self.squares, {m: -c for m, c in self.terms.items()}, self.names)

    def __sub__(self, other) -> "Multiquad":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Multiquad":
        return self._lift(other) - self

    def __mul__(self, other) -> "Multiquad":
        other = self._lift(other)
        sq, nm = self._ctx(other)
        out: dict[int, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                c = c1 * c2
                common = m1 & m2
                k = 0
                while common:
                    if common & 1:
                        c *= sq[k]
                    common >>= 1
                    k += 1
                m = m1 ^ m2
                out[m] = out.get(m, Fraction(0)) + c
        return Multiquad(sq, out, nm)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Multiquad":
        if isinstance(other, Multiquad):
            if other.terms.keys() - {0}:
                raise ValueError("division only by rational scalars")
            other = other.terms.get(0, Fraction(0))
        other = _frac(other)
        return Multiquad(self.squares, {m: c / other for m, c in self.terms.items()}, self.names)

    def __pow__(self, n: int) -> "Multiquad":
        out = Multiquad.scalar(1, self.squares, self.names)
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return not (self.terms.keys() - {0})

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational constant")
        return self.terms.get(0, Fraction(0))

    def __eq__(self, other) -> bool:
        try:
            d = self - other
        except ValueError:
            return False
        return d.is_zero()

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self) -> str:
        return f"Multiquad({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            mono = "".join(self.names[k] for k in range(len(self.squares)) if m >> k & 1)
            if mono:
                if c == 1:
                    s = mono
                elif c == -1:
                    s = "-" + mono
                else:
                    s = f"{c}*{mono}" if mono[0].isdigit() or c.denominator != 1 else f"{c}{mono}"
            else:
                s = str(c)
            parts.append(s)
        out = parts[0]
        for s in parts[1:]:
            out += s if s.startswith("-") else "+" + s
        return out


def all_subsets(n: int):
    """Bitmasks of {0..n-1} in increasing order."""
    return range(1 << n)


def bits_of(mask: int) -> list[int]:
    return [k for k in range(mask.bit_length()) if mask >> k & 1]


__all__ = [
    "NEG_INF", "DimensionMismatch", "Poly", "poly_gcd", "resultant", "poly_discriminant",
    "prime_support", "divisors", "quartic_irreducible_over_Q", "F2Vector", "F2Subspace",
    "f2_span", "f2_dim_sum", "f2_kernel", "f2_intersection", "Multiquad", "all_subsets",
    "bits_of",
]
