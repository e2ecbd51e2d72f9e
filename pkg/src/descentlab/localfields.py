"""Truncated p-adic arithmetic in Q_p and its quadratic extensions.

A ``PAdic`` is p^val * unit with the unit known modulo p^prec (relative
precision).  Every decision (valuation, squareness) either comes out certified
at the stored precision or raises ``PrecisionError``; nothing is guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .arith import Poly


class PrecisionError(ArithmeticError):
    """Raised when stored digits do not determine the answer."""


class DomainError(ValueError):
    pass


def vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


class PAdic:
    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p: int, val: int, unit: int, prec: int):
        self.p = p
        if prec <= 0:
            self.val, self.unit, self.prec = val, 0, 0
            return
        mod = p ** prec
        unit %= mod
        if unit == 0:
            # all stored digits vanished: O(p^(val+prec))
            self.val, self.unit, self.prec = val + prec, 0, 0
            return
        while unit % p == 0:
            unit //= p
            val += 1
            prec -= 1
        self.val, self.unit, self.prec = val, unit % p ** prec, prec

    @classmethod
    def from_rational(cls, x, p: int, prec: int) -> "PAdic":
        x = Fraction(x)
        if x == 0:
            raise DomainError("exact zero has no p-adic unit part")
        num, den = x.numerator, x.denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        mod = p ** prec
        return cls(p, v, num * pow(den, -1, mod), prec)

    @classmethod
    def zero(cls, p: int, absprec: int) -> "PAdic":
        return cls(p, absprec, 0, 0)

    @property
    def absprec(self) -> int:
        return self.val + self.prec

    def is_zero_approx(self) -> bool:
        return self.prec == 0

    def valuation(self) -> int:
        if self.prec == 0:
            raise PrecisionError(f"element indistinguishable from 0 mod {self.p}^{self.val}")
        return self.val

    def __repr__(self) -> str:
        if self.prec == 0:
            return f"O({self.p}^{self.val})"
        return f"{self.p}^{self.val}*{self.unit} + O({self.p}^{self.absprec})"

    def _coerce(self, other) -> "PAdic":
        if isinstance(other, PAdic):
            if other.p != self.p:
                raise DomainError("mixing different primes")
            return other
        other = Fraction(other)
        if other == 0:
            return PAdic.zero(self.p, 10 ** 9)
        return PAdic.from_rational(other, self.p, max(self.prec, 1) + 64)

    def __add__(self, other) -> "PAdic":
        o = self._coerce(other)
        ab = min(self.absprec, o.absprec)
        v = min(self.val, o.val)
        if ab <= v:
            return PAdic.zero(self.p, ab)
        p = self.p
        x = self.unit * p ** (self.val - v) if self.prec else 0
        y = o.unit * p ** (o.val - v) if o.prec else 0
        return PAdic(p, v, x + y, ab - v)

    __radd__ = __add__

    def __neg__(self) -> "PAdic":
        return PAdic(self.p, self.val, -self.unit, self.prec)

    def __sub__(self, other) -> "PAdic":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PAdic":
        return self._coerce(other) - self

    def __mul__(self, other) -> "PAdic":
        o = self._coerce(other)
        if self.prec == 0 or o.prec == 0:
            return PAdic.zero(self.p, self.val + o.val)
        return PAdic(self.p, self.val + o.val, self.unit * o.unit, min(self.prec, o.prec))

    __rmul__ = __mul__

    def inverse(self) -> "PAdic":
        if self.prec == 0:
            raise PrecisionError("cannot invert an element indistinguishable from 0")
        mod = self.p ** self.prec
        return PAdic(self.p, -self.val, pow(self.unit, -1, mod), self.prec)

    def __truediv__(self, other) -> "PAdic":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "PAdic":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "PAdic":
        if n < 0:
            return self.inverse() ** (-n)
        out = PAdic(self.p, 0, 1, max(self.prec, 1))
        for _ in range(n):
            out = out * self
        return out

    def residue_unit(self) -> int:
        """Unit part modulo p (requires at least one stored digit)."""
        if self.prec == 0:
            raise PrecisionError("no digits stored")
        return self.unit % self.p

    def equals_rational(self, x) -> bool:
        d = self - x
        return d.prec == 0

    def to_rational_approx(self) -> Fraction:
        return Fraction(self.unit) * Fraction(self.p) ** self.val


def padic_is_square(x: PAdic) -> bool:
    """Square test in Q_p: even valuation and a square unit (mod p, or mod 8 for p = 2)."""
    v = x.valuation()
    if v % 2:
        return False
    if x.p == 2:
        if x.prec < 3:
            raise PrecisionError("need the unit mod 8 to decide squareness in Q_2")
        return x.unit % 8 == 1
    return legendre(x.unit, x.p) == 1


def _residue_sqrt(a: int, p: int) -> int:
    """Square root mod an odd prime p (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        raise DomainError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def unit_sqrt_mod(u: int, p: int, n: int) -> tuple[int, int]:
    """Hensel-lift a square root of the unit u.

    Returns (root, digits) with root^2 = u mod p^digits; digits = n for odd p
    and n - 1 for p = 2 (the 2-adic root is only determined mod 2^(n-1)).
    """
    if p != 2:
        r = _residue_sqrt(u, p)
        mod = p
        for _ in range(n.bit_length() + 1):
            mod = min(mod * mod, p ** n)
            r = (r - (r * r - u) * pow(2 * r, -1, mod)) % mod
            if mod == p ** n:
                break
        assert (r * r - u) % p ** n == 0
        return r, n
    if n < 3 or u % 8 != 1:
        raise DomainError(f"{u} is not a square unit mod 8")
    r = 1
    for k in range(3, n):
        if (r * r - u) % (1 << (k + 1)):
            r += 1 << (k - 1)
    return r % (1 << (n - 1)), n - 1


def _normalize_sign(r: int, p: int, digits: int) -> int:
    mod = p ** digits
    if p == 2:
        return r if r % 4 == 1 else (-r) % mod
    return r if r % p <= (p - 1) // 2 else (-r) % mod


def padic_sqrt(x: PAdic) -> PAdic:
    """Square root in Q_p, sign-normalized (smaller first unit digit; 1 mod 4 for p = 2)."""
    if not padic_is_square(x):
        raise DomainError("not a square in Q_p")
    r, digits = unit_sqrt_mod(x.unit, x.p, x.prec)
    r = _normalize_sign(r, x.p, digits)
    return PAdic(x.p, x.val // 2, r, digits)


def hilbert_symbol(a, b, p: int) -> int:
    """(a, b)_p for nonzero rationals a, b."""
    a, b = Fraction(a), Fraction(b)
    a = a.numerator * a.denominator
    b = b.numerator * b.denominator
    if a == 0 or b == 0:
        raise DomainError("Hilbert symbol of zero")
    alpha, beta = vp(a, p), vp(b, p)
    u, w = a // p ** alpha, b // p ** beta
    if p != 2:
        eps = (p - 1) // 2
        s = (-1) ** (alpha * beta * eps)
        return s * legendre(u, p) ** beta * legendre(w, p) ** alpha
    e = lambda t: ((t - 1) // 2) % 2
    om = lambda t: ((t * t - 1) // 8) % 2
    expo = e(u) * e(w) + alpha * om(w) + beta * om(u)
    return -1 if expo % 2 else 1


# ---------------------------------------------------------------------------
# Local fields of degree <= 2
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalFieldDesc:
    """Q_p (degree 1) or Q_p[tau]/(tau^2 + A tau + B)."""

    p: int
    A: Fraction = Fraction(0)
    B: Fraction = Fraction(0)
    degree: int = 1
    name: str = ""

    @classmethod
    def base(cls, p: int) -> "LocalFieldDesc":
        return cls(p, Fraction(0), Fraction(0), 1, f"Q_{p}")

    @classmethod
    def quadratic(cls, p: int, A, B, name: str = "") -> "LocalFieldDesc":
        A, B = Fraction(A), Fraction(B)
        desc = cls(p, A, B, 2, name or f"Q_{p}[t]/({Poly([B, A, 1])})")
        # irreducible iff the discriminant is not a square in Q_p
        c = desc.c
        if c == 0 or padic_is_square(PAdic.from_rational(-c, p, 16)):
            raise DomainError(f"{Poly([B, A, 1])} is not irreducible over Q_{p}")
        return desc

    @property
    def c(self) -> Fraction:
        """Completing the square: t = tau + A/2 has t^2 = -c."""
        return self.B - self.A * self.A / 4

    @property
    def defining_poly(self) -> Poly:
        return Poly([0, 1]) if self.degree == 1 else Poly([self.B, self.A, 1])

    @cached_property
    def ramification(self) -> tuple[int, int]:
        """(e, f_res)."""
        if self.degree == 1:
            return 1, 1
        m = -self.c
        v = vp(m.numerator, self.p) - vp(m.denominator, self.p)
        if v % 2:
            return 2, 1
        u = m.numerator * m.denominator // self.p ** (vp(m.numerator * m.denominator, self.p))
        if self.p == 2 and u % 4 == 3:
            return 2, 1
        return 1, 2

    @property
    def e(self) -> int:
        return self.ramification[0]

    @property
    def f_res(self) -> int:
        return self.ramification[1]

    @property
    def kind(self) -> str:
        if self.degree == 1:
            return "base"
        return "ramified-quadratic" if self.e == 2 else "unramified-quadratic"

    def square_class_dim(self) -> int:
        return 2 + (self.degree if self.p == 2 else 0)

    def default_precision(self) -> int:
        return 2 * self.e * (1 if self.p == 2 else 0) + 8


class LocalElement:
    """a + b*tau with a, b in Q_p (b ignored for degree 1)."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: LocalFieldDesc, a: PAdic, b: PAdic | None = None):
        self.field = field
        self.a = a
        if field.degree == 1:
            b = None
        elif b is None:
            b = PAdic.zero(field.p, 10 ** 9)
        self.b = b

    @classmethod
    def from_rationals(cls, field: LocalFieldDesc, a, b=0, prec: int = 20) -> "LocalElement":
        p = field.p
        pa = PAdic.from_rational(a, p, prec) if Fraction(a) != 0 else PAdic.zero(p, 10 ** 9)
        if field.degree == 1:
            return cls(field, pa)
        pb = PAdic.from_rational(b, p, prec) if Fraction(b) != 0 else PAdic.zero(p, 10 ** 9)
        return cls(field, pa, pb)

    def _coerce(self, other) -> "LocalElement":
        if isinstance(other, LocalElement):
            return other
        if isinstance(other, PAdic):
            return LocalElement(self.field, other)
        return LocalElement(self.field, self.a._coerce(other))

    def __add__(self, other) -> "LocalElement":
        o = self._coerce(other)
        if self.field.degree == 1:
            return LocalElement(self.field, self.a + o.a)
        return LocalElement(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> "LocalElement":
        return LocalElement(self.field, -self.a, -self.b if self.b is not None else None)

    def __sub__(self, other) -> "LocalElement":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LocalElement":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LocalElement":
        o = self._coerce(other)
        if self.field.degree == 1:
            return LocalElement(self.field, self.a * o.a)
        A, B = self.field.A, self.field.B
        bd = self.b * o.b
        a = self.a * o.a - bd * B if B else self.a * o.a
        b = self.a * o.b + self.b * o.a
        if A:
            b = b - bd * A
        return LocalElement(self.field, a, b)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LocalElement":
        if n < 0:
            return self.inverse() ** (-n)
        out = self.one()
        for _ in range(n):
            out = out * self
        return out

    def one(self) -> "LocalElement":
        prec = max(self.a.prec, self.b.prec if self.b is not None else 0, 1)
        return LocalElement(self.field, PAdic(self.field.p, 0, 1, prec + 8))

    def norm(self) -> PAdic:
        if self.field.degree == 1:
            return self.a
        A, B = self.field.A, self.field.B
        # N(a + b tau) = a^2 - A a b + B b^2
        out = self.a * self.a
        if A:
            out = out - self.a * self.b * A
        if B:
            out = out + self.b * self.b * B
        return out

    def trace(self) -> PAdic:
        if self.field.degree == 1:
            return self.a
        return self.a * 2 - self.b * self.field.A if self.field.A else self.a * 2

    def conjugate(self) -> "LocalElement":
        if self.field.degree == 1:
            return self
        # tau -> -A - tau
        return LocalElement(self.field, self.a - self.b * self.field.A, -self.b)

    def inverse(self) -> "LocalElement":
        n = self.norm()
        if n.is_zero_approx():
            raise PrecisionError("norm indistinguishable from 0")
        ninv = n.inverse()
        conj = self.conjugate()
        if self.field.degree == 1:
            return LocalElement(self.field, ninv)
        return LocalElement(self.field, conj.a * ninv, conj.b * ninv)

    def __truediv__(self, other) -> "LocalElement":
        return self * self._coerce(other).inverse()

    def centered(self) -> tuple[PAdic, PAdic, Fraction]:
        """(a', b, c) with self = a' + b t, t^2 = -c."""
        A = self.field.A
        a = self.a - self.b * (A / 2) if A else self.a
        return a, self.b, self.field.c

    def __repr__(self) -> str:
        if self.field.degree == 1:
            return f"<{self.a} in {self.field.name}>"
        return f"<{self.a} + ({self.b})*t in {self.field.name}>"


def local_valuation(x: LocalElement) -> int:
    """Normalized valuation (uniformizer units)."""
    if x.field.degree == 1:
        return x.a.valuation()
    n = x.norm()
    if n.is_zero_approx():
        raise PrecisionError("element indistinguishable from 0 at this precision")
    v = n.valuation()
    f = x.field.f_res
    assert v % f == 0
    return v // f


def is_square(x: LocalElement) -> bool:
    """Square test in a local field of degree <= 2.

    For x = a + b t (t^2 = -c, b != 0): x is a square iff N(x) = n^2 in Q_p and
    w = (a + n)/2 or -c*w is a square in Q_p.  For b = 0 the test is whether a
    or -c*a is a square in Q_p.
    """
    if x.field.degree == 1:
        return padic_is_square(x.a)
    a, b, c = x.centered()
    if b.is_zero_approx():
        _check_negligible(a, b, c, x.field.p)
        return padic_is_square(a) or padic_is_square(a * (-c))
    N = x.norm()
    if N.is_zero_approx():
        raise PrecisionError("norm indistinguishable from 0")
    if not padic_is_square(N):
        return False
    n = padic_sqrt(N)
    w_plus, w_minus = (a + n), (a - n)
    w = w_plus if w_plus.prec >= w_minus.prec else w_minus
    w = w / 2
    if w.is_zero_approx():
        raise PrecisionError("cancellation in the square test")
    return padic_is_square(w) or padic_is_square(w * (-c))


def _check_negligible(a: PAdic, b: PAdic, c: Fraction, p: int) -> None:
    """b*t must be too small to change the square class of a."""
    if b.absprec >= 10 ** 8:
        return
    vc = vp(c.numerator, p) - vp(c.denominator, p)
    guard = 2 * (2 * (1 if p == 2 else 0) + 1)
    if 2 * b.absprec + vc <= 2 * a.valuation() + guard:
        raise PrecisionError("cannot separate a + b*t from a at this precision")


def sqrt_lift(x: LocalElement) -> LocalElement:
    """Constructive square root; raises DomainError for non-squares."""
    field = x.field
    if field.degree == 1:
        return LocalElement(field, padic_sqrt(x.a))
    if not is_square(x):
        raise DomainError("not a square")
    a, b, c = x.centered()
    A = field.A
    if b.is_zero_approx():
        if padic_is_square(a):
            r, s = padic_sqrt(a), None
        else:
            r, s = None, padic_sqrt(a / (-c))
    else:
        n = padic_sqrt(x.norm())
        w_plus, w_minus = (a + n), (a - n)
        w = (w_plus if w_plus.prec >= w_minus.prec else w_minus) / 2
        if padic_is_square(w):
            r = padic_sqrt(w)
            s = b / (r * 2)
        else:
            # y = r + s t with -c s^2 = w  (then r = b / (2 s))
            s = padic_sqrt(w / (-c))
            r = b / (s * 2)
    p = field.p
    zero = PAdic.zero(p, 10 ** 9)
    r = r if r is not None else zero
    s = s if s is not None else zero
    # back to the tau basis: r + s t = (r + s A/2) + s tau
    out = LocalElement(field, r + s * (A / 2) if A else r, s)
    return out


def uniformizer(field: LocalFieldDesc, prec: int) -> LocalElement:
    p = field.p
    if field.degree == 1 or field.e == 1:
        return LocalElement.from_rationals(field, p, 0, prec)
    c = field.c
    # search small a + b t (t = tau + A/2) with odd valuation, then strip p-powers
    tvec = LocalElement.from_rationals(field, field.A / 2, 1, prec)
    for bnum in range(1, 4):
        for anum in range(0, 2 * p + 1):
            cand = tvec * bnum + anum
            cand_v = local_valuation(cand)
            if cand_v % 2:
                k = (cand_v - 1) // 2
                return cand * LocalElement.from_rationals(field, Fraction(1, p ** k) if k >= 0 else p ** (-k), 0, prec)
    raise RuntimeError(f"no uniformizer found for {field}")  # pragma: no cover


def integral_generator(field: LocalFieldDesc, prec: int) -> LocalElement:
    """theta with O_K = Z_p[theta] (uniformizer if ramified, residue generator if not)."""
    if field.degree == 1:
        return LocalElement.from_rationals(field, 1, 0, prec)
    if field.e == 2:
        return uniformizer(field, prec)
    p = field.p
    m = -field.c
    k = (vp(m.numerator, p) - vp(m.denominator, p)) // 2
    t = LocalElement.from_rationals(field, field.A / 2, 1, prec)
    unit_t = t * LocalElement.from_rationals(field, Fraction(1, p ** k) if k >= 0 else p ** (-k), 0, prec)
    if p != 2:
        return unit_t
    return (unit_t + 1) * LocalElement.from_rationals(field, Fraction(1, 2), 0, prec)


@dataclass
class SquareClassBasis:
    """Fixed F2 basis of K^x / K^x2: basis[0] is a uniformizer, the rest units."""

    field: LocalFieldDesc
    prec: int
    basis: list[LocalElement] = field(default_factory=list)
    unit_products: list[LocalElement] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, x: LocalElement) -> list[int]:
        pi = self.basis[0]
        v = local_valuation(x)
        u = x * pi ** (-v)
        for mask, prod in enumerate(self.unit_products):
            if is_square(u * prod):
                return [v % 2] + [mask >> k & 1 for k in range(self.dim - 1)]
        raise PrecisionError("square class not resolved; basis incomplete or precision too low")


_BASIS_CACHE: dict[tuple, SquareClassBasis] = {}


def square_class_basis(field: LocalFieldDesc, prec: int) -> SquareClassBasis:
    key = (field, prec)
    hit = _BASIS_CACHE.get(key)
    if hit is not None:
        return hit
    p = field.p
    target = field.square_class_dim()
    pi = uniformizer(field, prec)
    theta = integral_generator(field, prec)
    one = LocalElement.from_rationals(field, 1, 0, prec)
    units: list[LocalElement] = []
    products = [one]

    def try_add(g: LocalElement) -> bool:
        if local_valuation(g) != 0:
            return False
        if any(is_square(g * q) for q in products):
            return False
        units.append(g)
        products.extend([g * q for q in products])
        return True

    try_add(LocalElement.from_rationals(field, -1, 0, prec))
    span = p ** 3 if p == 2 else p
    cands = []
    for a in range(span):
        for b in range(span if field.degree == 2 else 1):
            cands.append((max(a, b), a, b))
    for _, a, b in sorted(cands):
        if len(units) == target - 1:
            break
        g = one * a + theta * b if b else one * a
        if a == 0 and b == 0:
            continue
        try_add(g)
    if len(units) != target - 1:
        raise RuntimeError(f"square class basis for {field.name} stuck at {len(units) + 1}/{target}")
    out = SquareClassBasis(field, prec, [pi] + units, products)
    _BASIS_CACHE[key] = out
    return out


def local_roots_of_f(params, field: LocalFieldDesc, x0, prec: int = 20) -> list[LocalElement]:
    """The two y in the field with y^2 = f(x0).

    x0 is a rational or a LocalElement of ``field`` (e.g. the generator for a
    conjugate pair).  Raises PrecisionError when f(x0) is not a certified square.
    """
    if isinstance(x0, LocalElement):
        x = x0
    else:
        x = LocalElement.from_rationals(field, x0, 0, prec)
    fx = x * (x * x + params.c2) * (x * x + params.c3)
    try:
        ok = is_square(fx)
    except PrecisionError:
        ok = False
    if not ok:
        raise PrecisionError("witness not certifiable at this precision")
    y = sqrt_lift(fx)
    return [y, -y]


__all__ = [
    "PrecisionError", "DomainError", "vp", "legendre", "PAdic", "padic_is_square",
    "unit_sqrt_mod", "padic_sqrt", "hilbert_symbol", "LocalFieldDesc", "LocalElement",
    "local_valuation", "is_square", "sqrt_lift", "uniformizer", "integral_generator",
    "SquareClassBasis", "square_class_basis", "local_roots_of_f",
]
