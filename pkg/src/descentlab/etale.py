"""The etale algebra L = Q[T]/(f) of the family, its completions, square-class
coordinates, valuation maps and tuple notation.

Components of an element of L are written as a tuple over the global factors
T, T^2 + c2, T^2 + c3 (labels T1, T2, T3).  Locally a quadratic factor may
split; its two components are then separated by a comma, e.g. ``(2;T2;-r,r)``.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import sympy

from .arith import F2Vector, Multiquad, Poly
from .localfields import (
    DomainError,
    LocalElement,
    LocalFieldDesc,
    PAdic,
    PrecisionError,
    local_valuation,
    padic_is_square,
    padic_sqrt,
    square_class_basis,
)


class Case(str, Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    OTHER = "Other"


class ParamError(ValueError):
    pass


@dataclass(frozen=True)
class CurveParams:
    p: int
    i: int
    j: int
    case: Case
    sub_case: int | None = None  # p mod 32 for C1

    @property
    def c2(self) -> int:
        return 2 ** self.i * self.p ** self.j

    @property
    def c3(self) -> int:
        return 2 ** (self.i + 1) * self.p ** self.j

    @property
    def f(self) -> Poly:
        return Poly([0, 1]) * Poly([self.c2, 0, 1]) * Poly([self.c3, 0, 1])

    @property
    def global_factors(self) -> list[Poly]:
        return [Poly([0, 1]), Poly([self.c2, 0, 1]), Poly([self.c3, 0, 1])]

    @property
    def in_family_case(self) -> bool:
        return self.case is not Case.OTHER

    def __str__(self) -> str:
        return f"(p={self.p}, i={self.i}, j={self.j}, {self.case.value})"


def detect_case(p: int, i: int, j: int) -> CurveParams:
    if not isinstance(p, int) or p < 2 or not sympy.isprime(p):
        raise ParamError(f"{p} is not prime")
    if p == 2:
        raise ParamError("p = 2 is excluded")
    if i < 0 or j < 0:
        raise ParamError("i and j must be nonnegative")
    if (i, j) == (0, 1) and p % 16 == 3:
        return CurveParams(p, i, j, Case.C1, p % 32)
    if (i, j) == (1, 1) and p % 16 == 11:
        return CurveParams(p, i, j, Case.C2)
    if (i, j) == (0, 2) and p % 8 == 3:
        return CurveParams(p, i, j, Case.C3)
    if (i, j) == (0, 2) and p % 8 == 5:
        return CurveParams(p, i, j, Case.C4)
    return CurveParams(p, i, j, Case.OTHER)


def squarefree_decomposition(n: int) -> tuple[int, int]:
    """n = m * s^2 with m squarefree (n > 0)."""
    m, s = 1, 1
    for q, e in sympy.factorint(n).items():
        s *= q ** (e // 2)
        if e % 2:
            m *= q
    return m, s


# ---------------------------------------------------------------------------
# Local factorization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitRoot:
    """A root r of T^2 + c in Q_v, r = s*sqrt(-m) with the fixed sqrt(-m)."""

    index: int  # global factor index whose quadratic splits
    c: int
    m: int
    s: int
    value: PAdic

    @property
    def name(self) -> str:
        return f"{self.s}√-{self.m}" if self.s != 1 else f"√-{self.m}"


@dataclass(frozen=True)
class LocalFactor:
    label: str          # "T1", "T2", "T3"
    index: int          # global factor index
    field: LocalFieldDesc
    c: int | None       # quadratic factor T^2 + c (None if linear)
    root: int | None    # linear factor: None for T itself, else +-1 selects +-r
    split: int | None   # position of the split root in the place's root list

    @property
    def degree(self) -> int:
        return self.field.degree

    @property
    def is_linear(self) -> bool:
        return self.c is None


class EtaleFactorization:
    """The factors of f over Q_v with fixed coordinate dictionaries."""

    def __init__(self, params: CurveParams, v: int, prec: int):
        self.params = params
        self.v = v
        self.prec = prec
        self.roots: list[SplitRoot] = []
        self.factors: list[LocalFactor] = []
        self.factors.append(LocalFactor("T1", 0, LocalFieldDesc.base(v), None, None, None))
        for k, c in ((1, params.c2), (2, params.c3)):
            for fac in _factor_quadratic(c, v, prec, f"T{k + 1}", k, self.roots):
                self.factors.append(fac)
        self._bases = [square_class_basis(fac.field, prec) for fac in self.factors]
        self.block_widths = [b.dim for b in self._bases]
        self.offsets = [sum(self.block_widths[:n]) for n in range(len(self.factors))]
        self.width = sum(self.block_widths)

    # symbolic rings -----------------------------------------------------

    def ring(self, n: int) -> tuple[tuple[Fraction, ...], tuple[str, ...]]:
        squares = [Fraction(-r.c) for r in self.roots]
        names = [r.name for r in self.roots]
        fac = self.factors[n]
        if not fac.is_linear:
            squares.append(Fraction(-fac.c))
            names.append(fac.label)
        return tuple(squares), tuple(names)

    def symbolic_T(self, n: int) -> Multiquad:
        fac = self.factors[n]
        sq, nm = self.ring(n)
        if not fac.is_linear:
            return Multiquad.gen(len(self.roots), sq, nm)
        if fac.split is None:
            return Multiquad.scalar(0, sq, nm)
        return Multiquad.gen(fac.split, sq, nm) * fac.root

    def sqrt_symbol(self, n: int, m: int) -> Multiquad:
        """The fixed sqrt(-m) in Q_v inside the ring of factor n."""
        sq, nm = self.ring(n)
        for k, r in enumerate(self.roots):
            if r.m == m:
                return Multiquad.gen(k, sq, nm) / r.s
        raise DomainError(f"sqrt(-{m}) is not fixed at v = {self.v} for {self.params}")

    def local_poly_value(self, h: int, tau: Multiquad) -> Multiquad:
        """Value at tau of the monic local factor number h of f."""
        fac = self.factors[h]
        if not fac.is_linear:
            return tau * tau + fac.c
        if fac.split is None:
            return tau
        sq, nm = tau.squares, tau.names
        r = Multiquad.gen(fac.split, sq, nm) * fac.root
        return tau - r

    def realize(self, mq: Multiquad, n: int) -> LocalElement:
        fac = self.factors[n]
        K = fac.field
        gens: list[LocalElement] = []
        for r in self.roots:
            gens.append(LocalElement(K, r.value) if K.degree == 1 else
                        LocalElement(K, r.value, PAdic.zero(self.v, 10 ** 9)))
        if not fac.is_linear:
            gens.append(LocalElement.from_rationals(K, 0, 1, self.prec))
        out = LocalElement(K, PAdic.zero(self.v, 10 ** 9))
        for mask, c in mq.terms.items():
            term = LocalElement.from_rationals(K, c, 0, self.prec + 8)
            for k, g in enumerate(gens):
                if mask >> k & 1:
                    term = term * g
            out = out + term
        return out

    # coordinates ---------------------------------------------------------

    def coords(self, comps: list[LocalElement]) -> F2Vector:
        if len(comps) != len(self.factors):
            raise ValueError("component count does not match the factorization")
        bits: list[int] = []
        for basis, x in zip(self._bases, comps):
            if x.a.is_zero_approx() and (x.b is None or x.b.is_zero_approx()):
                raise DomainError("zero component has no square class")
            bits.extend(basis.coords(x))
        return F2Vector(bits)

    def square_class(self, mqs: list[Multiquad], label: str = "") -> "SquareClass":
        comps = [self.realize(mq, n) for n, mq in enumerate(mqs)]
        return SquareClass(self, comps, self.coords(comps), label or format_local_tuple(self, mqs))

    def identity(self) -> "SquareClass":
        mqs = [Multiquad.scalar(1, *self.ring(n)) for n in range(len(self.factors))]
        return self.square_class(mqs, "1")

    def val_positions(self) -> list[int]:
        return [off for off in self.offsets]

    def ideal_labels(self) -> list[str]:
        out = []
        for fac in self.factors:
            if fac.degree == 2 and fac.field.e == 2:
                out.append(f"({self.v},{fac.label})")
            else:
                out.append(f"({self.v})")
        return out

    def groups(self) -> list[list[int]]:
        """Local factor numbers grouped by global factor."""
        out: list[list[int]] = [[], [], []]
        for n, fac in enumerate(self.factors):
            out[fac.index].append(n)
        return out

    def describe(self) -> list[str]:
        out = []
        for fac in self.factors:
            if fac.is_linear:
                if fac.split is None:
                    out.append(f"Q_{self.v}[{fac.label}]/({fac.label})")
                else:
                    r = self.roots[fac.split]
                    sign = "-" if fac.root < 0 else ""
                    out.append(f"Q_{self.v} ({fac.label} -> {sign}{r.name})")
            else:
                out.append(f"Q_{self.v}[{fac.label}]/({fac.label}^2+{fac.c}) [{fac.field.kind}]")
        return out


def _factor_quadratic(c: int, v: int, prec: int, label: str, index: int,
                      roots: list[SplitRoot]) -> list[LocalFactor]:
    mc = PAdic.from_rational(-c, v, prec + 8)
    if padic_is_square(mc):
        m, s = squarefree_decomposition(c)
        if m == 1:
            unit = padic_sqrt(PAdic.from_rational(-1, v, prec + 8))
        else:
            unit = padic_sqrt(PAdic.from_rational(-m, v, prec + 8))
        r = SplitRoot(index, c, m, s, unit * s)
        roots.append(r)
        pos = len(roots) - 1
        base = LocalFieldDesc.base(v)
        return [LocalFactor(label, index, base, None, +1, pos),
                LocalFactor(label, index, base, None, -1, pos)]
    K = LocalFieldDesc.quadratic(v, 0, c, name=f"Q_{v}[{label}]/({label}^2+{c})")
    return [LocalFactor(label, index, K, c, None, None)]


_FACTORIZATION_CACHE: dict[tuple[CurveParams, int, int], EtaleFactorization] = {}


def factor_f_local(params: CurveParams, v: int, prec: int = 12) -> EtaleFactorization:
    key = (params, v, prec)
    hit = _FACTORIZATION_CACHE.get(key)
    if hit is None:
        hit = EtaleFactorization(params, v, prec)
        _FACTORIZATION_CACHE[key] = hit
    return hit


# ---------------------------------------------------------------------------
# Square classes and ideal vectors
# ---------------------------------------------------------------------------


@dataclass
class SquareClass:
    fac: EtaleFactorization
    components: list[LocalElement]
    coords: F2Vector
    label: str = ""

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        if other.fac is not self.fac:
            raise ValueError("square classes from different places")
        comps = [a * b for a, b in zip(self.components, other.components)]
        return SquareClass(self.fac, comps, self.coords ^ other.coords,
                           f"{self.label}*{other.label}")

    def is_trivial(self) -> bool:
        return self.coords.is_zero()

    def __str__(self) -> str:
        return f"{self.label}_{self.fac.v}"


@dataclass(frozen=True)
class IdealClassVector:
    v: int
    bits: F2Vector
    labels: tuple[str, ...]
    groups: tuple[tuple[int, ...], ...]

    def __str__(self) -> str:
        if self.bits.is_zero():
            return f"1_{self.v}"
        bits = self.bits.to_list()
        parts = []
        for g in self.groups:
            parts.append(",".join(self.labels[n] if bits[n] else "(1)" for n in g))
        return "(" + ";".join(parts) + f")_{self.v}"


def val_map(x: SquareClass) -> IdealClassVector:
    fac = x.fac
    bits = x.coords.to_list()
    out = [bits[off] for off in fac.offsets]
    return IdealClassVector(fac.v, F2Vector(out), tuple(fac.ideal_labels()),
                            tuple(tuple(g) for g in fac.groups()))


def parse_ideal_vector(s: str, fac: EtaleFactorization) -> F2Vector:
    """Bits of a written ideal vector such as ``((2);(1);(2,T3))_2``."""
    s = _normalize(s)
    s = re.sub(r"_(\d+|p)$", "", s)
    n = len(fac.factors)
    if s in ("1", "(1)"):
        return F2Vector([0] * n)
    body = _strip_parens(s)
    parts = _split_top(body, ";")
    if len(parts) != 3:
        raise ValueError(f"expected three global components in {s!r}")
    bits: list[int] = []
    for g, part in zip(fac.groups(), parts):
        items = _split_top(part, ",") if len(g) > 1 else [part]
        if len(items) != len(g):
            raise ValueError(f"component {part!r} does not match local splitting")
        bits.extend(0 if it.replace(" ", "") == "(1)" else 1 for it in items)
    return F2Vector(bits)


# ---------------------------------------------------------------------------
# Global elements
# ---------------------------------------------------------------------------


class GlobalElement:
    """An element of L as a tuple of polynomials reduced modulo T, T^2+c2, T^2+c3."""

    __slots__ = ("params", "components", "label")

    def __init__(self, params: CurveParams, components, label: str = ""):
        self.params = params
        comps = []
        for g, h in zip(components, params.global_factors):
            g = g if isinstance(g, Poly) else Poly([g])
            comps.append(g % h)
        self.components: tuple[Poly, ...] = tuple(comps)
        self.label = label or format_global_tuple(self)

    @classmethod
    def from_poly(cls, params: CurveParams, g: Poly) -> "GlobalElement":
        return cls(params, [g, g, g], "")

    @classmethod
    def one(cls, params: CurveParams) -> "GlobalElement":
        return cls(params, [1, 1, 1], "1")

    def is_unit(self) -> bool:
        return all(not c.is_zero() for c in self.components)

    def __mul__(self, other: "GlobalElement") -> "GlobalElement":
        return GlobalElement(self.params, [a * b for a, b in zip(self.components, other.components)])

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"GlobalElement{self.label}"


def res_global(x: GlobalElement | Poly, fac: EtaleFactorization) -> SquareClass:
    if isinstance(x, Poly):
        x = GlobalElement.from_poly(fac.params, x)
    if not x.is_unit():
        raise DomainError(f"{x} is not invertible in L")
    mqs = []
    for n, lf in enumerate(fac.factors):
        tau = fac.symbolic_T(n)
        mqs.append(x.components[lf.index](tau) + Multiquad.scalar(0, *fac.ring(n)))
    return fac.square_class(mqs, x.label)


# ---------------------------------------------------------------------------
# Tuple notation
# ---------------------------------------------------------------------------


def _fmt_poly(g: Poly, name: str) -> str:
    if g.is_zero():
        return "0"
    parts = []
    for k, c in enumerate(g.coeffs):
        if c == 0:
            continue
        mono = "" if k == 0 else (name if k == 1 else f"{name}^{k}")
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{c}*{mono}" if c.denominator != 1 else f"{c}{mono}")
    out = parts[0]
    for s in parts[1:]:
        out += s if s.startswith("-") else "+" + s
    return out


def format_global_tuple(x: GlobalElement) -> str:
    return "(" + ";".join(_fmt_poly(g, f"T{k + 1}") for k, g in enumerate(x.components)) + ")"


def format_local_tuple(fac: EtaleFactorization, mqs: list[Multiquad]) -> str:
    parts = []
    for g in fac.groups():
        parts.append(",".join(str(mqs[n]) for n in g))
    return "(" + ";".join(parts) + ")"


_TOKEN = re.compile(r"\s*(?:(\d+)|(T[123]|R[12]|[pabcd])|(\*\*|[-+*/^()]))")


def _normalize(s: str) -> str:
    s = s.replace("−", "-").replace("·", "*").replace("\\cdot", "*").replace("\\sqrt", "√")
    s = s.replace("√{-1}", "√-1").replace("√{-2}", "√-2")
    return s.strip()


def _strip_parens(s: str) -> str:
    s = s.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ValueError(f"tuple must be parenthesized: {s!r}")
    return s[1:-1]


def _split_top(s: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [x.strip() for x in out]


def _to_python_expr(s: str) -> str:
    s = _normalize(s).replace("√-1", "R1").replace("√-2", "R2").replace("_", "")
    toks: list[str] = []
    pos = 0
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {s!r} at {pos}")
        tok = m.group(0).strip()
        pos = m.end()
        if toks:
            prev = toks[-1]
            if (prev[0].isalnum() or prev == ")") and (tok[0].isalnum() or tok == "("):
                toks.append("*")
        toks.append("**" if tok == "^" else tok)
    return "".join(toks)


class _Lazy:
    """Symbol whose value is only computed when it occurs in the expression."""

    def __init__(self, fn):
        self.force = fn


_ALLOWED_BIN = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b,
                ast.Mult: lambda a, b: a * b, ast.Div: lambda a, b: a / b}


def _eval(node, env):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return Fraction(node.value)
    if isinstance(node, ast.Name):
        if node.id not in env:
            raise ValueError(f"unknown or unavailable symbol {node.id}")
        val = env[node.id]
        return val.force() if isinstance(val, _Lazy) else val
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        x = _eval(node.operand, env)
        return -x if isinstance(node.op, ast.USub) else x
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            e = _eval(node.right, env)
            if not (isinstance(e, Fraction) and e.denominator == 1 and e >= 0):
                raise ValueError("exponents must be nonnegative integers")
            return _eval(node.left, env) ** int(e)
        op = _ALLOWED_BIN.get(type(node.op))
        if op is None:
            raise ValueError("operator not allowed")
        return op(_eval(node.left, env), _eval(node.right, env))
    raise ValueError(f"unsupported expression element {ast.dump(node)}")


def eval_expression(expr: str, env: dict):
    tree = ast.parse(_to_python_expr(expr), mode="eval")
    return _eval(tree, env)


def _split_tuple(s: str) -> tuple[list[str], str | None]:
    s = _normalize(s)
    m = re.match(r"^(.*\))_(\d+|p)$", s)
    suffix = None
    if m:
        s, suffix = m.group(1), m.group(2)
    parts = _split_top(_strip_parens(s), ";")
    if len(parts) != 3:
        raise ValueError(f"expected three components separated by ';' in {s!r}")
    return parts, suffix


def parse_global_tuple(s: str, params: CurveParams, consts: dict | None = None) -> GlobalElement:
    parts, _ = _split_tuple(s)
    env = {"p": Fraction(params.p)}
    for k, v in (consts or {}).items():
        env[k] = Fraction(v)
    comps = []
    for k, part in enumerate(parts):
        local_env = dict(env)
        local_env[f"T{k + 1}"] = Poly.x()
        val = eval_expression(part, local_env)
        comps.append(val if isinstance(val, Poly) else Poly([val]))
    return GlobalElement(params, comps, _normalize(s))


def parse_local_tuple(s: str, fac: EtaleFactorization, consts: dict | None = None) -> SquareClass:
    s_norm = _normalize(s)
    if re.fullmatch(r"1(_(\d+|p))?", s_norm):
        return fac.identity()
    parts, _ = _split_tuple(s)
    mqs: list[Multiquad | None] = [None] * len(fac.factors)
    for g, part in zip(fac.groups(), parts):
        items = _split_top(part, ",")
        if len(items) == 1:
            items = items * len(g)
        if len(items) != len(g):
            raise ValueError(f"component {part!r} does not match the local splitting at {fac.v}")
        for n, item in zip(g, items):
            lf = fac.factors[n]
            zero = Multiquad.scalar(0, *fac.ring(n))
            env = {"p": Fraction(fac.params.p), lf.label: fac.symbolic_T(n)}
            for k, v in (consts or {}).items():
                env[k] = Fraction(v)
            for name, m in (("R1", 1), ("R2", 2)):
                env[name] = _Lazy(lambda m=m, n=n: fac.sqrt_symbol(n, m))
            val = eval_expression(item, env)
            mqs[n] = val + zero if isinstance(val, Multiquad) else zero + val
    return fac.square_class(mqs, _normalize(s))  # type: ignore[arg-type]


__all__ = [
    "Case", "ParamError", "CurveParams", "detect_case", "squarefree_decomposition", "SplitRoot",
    "LocalFactor", "EtaleFactorization", "factor_f_local", "SquareClass", "IdealClassVector",
    "val_map", "parse_ideal_vector", "GlobalElement", "res_global", "format_global_tuple",
    "format_local_tuple", "eval_expression", "parse_global_tuple", "parse_local_tuple",
    "PrecisionError", "factor_val_bits",
]


def factor_val_bits(fac: EtaleFactorization, k: int, g: Poly) -> list[int]:
    """Valuation parities of the component g of global factor k at the local factors above v."""
    out = []
    for n, lf in enumerate(fac.factors):
        if lf.index != k:
            continue
        tau = fac.symbolic_T(n)
        x = fac.realize(g(tau) + Multiquad.scalar(0, *fac.ring(n)), n)
        out.append(local_valuation(x) % 2)
    return out
