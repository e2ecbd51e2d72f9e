"""2-descent on the Jacobian: local images of delta, G, W, Ker(val),
val^-1(G), the sum space and the resulting Selmer dimension and rank bound."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import sympy

from .arith import F2Subspace, F2Vector, Poly, f2_kernel, f2_span
from .etale import (
    Case,
    CurveParams,
    EtaleFactorization,
    GlobalElement,
    SquareClass,
    factor_f_local,
    factor_val_bits,
    res_global,
    squarefree_decomposition,
    val_map,
)
from .localfields import (
    DomainError,
    LocalElement,
    LocalFieldDesc,
    PAdic,
    PrecisionError,
    local_roots_of_f,
    padic_is_square,
)
from .quadfields import (
    ImagQuadField,
    cl2_basis,
    genus_character,
    unit_square_basis,
    valuations_above,
)

SCHEMA_VERSION = 1
DEFAULT_PRECISION = 12
INF = "inf"


class DescentError(RuntimeError):
    def __init__(self, stage: str, msg: str):
        super().__init__(f"[{stage}] {msg}")
        self.stage = stage


# ---------------------------------------------------------------------------
# 2-torsion and expected image sizes
# ---------------------------------------------------------------------------


def two_torsion_dim(params: CurveParams, v, prec: int = DEFAULT_PRECISION) -> int:
    """(number of irreducible factors of f over the field) - 1."""
    if v == INF or v == math.inf:
        # x, x^2 + c2, x^2 + c3 with c2, c3 > 0: nothing splits over R
        return 2
    if v in ("Q", 0):
        # -c2, -c3 < 0 are never rational squares
        return len(params.global_factors) - 1
    return len(factor_f_local(params, v, prec).factors) - 1


def expected_delta_dim(params: CurveParams, v, prec: int = DEFAULT_PRECISION) -> int:
    return two_torsion_dim(params, v, prec) + (2 if v == 2 else 0)


@dataclass(frozen=True)
class TorsionDivisorClass:
    kind: str   # "zero-point" | "quadratic-factor-sum" | "split-root"
    factor: int  # local factor number


def torsion_divisors(fac: EtaleFactorization) -> list[TorsionDivisorClass]:
    out = []
    for n, lf in enumerate(fac.factors):
        if lf.is_linear and lf.split is None:
            out.append(TorsionDivisorClass("zero-point", n))
        elif lf.is_linear:
            out.append(TorsionDivisorClass("split-root", n))
        else:
            out.append(TorsionDivisorClass("quadratic-factor-sum", n))
    return out


def _square_free_content(mq):
    """Rescale by a rational square so the coefficients are coprime integers up to a squarefree factor."""
    coeffs = [c for c in mq.terms.values() if c != 0]
    if not coeffs:
        return mq
    den = math.lcm(*(c.denominator for c in coeffs))
    g = math.gcd(*(int(c * den * den) for c in coeffs))
    sq = 1
    for q, e in sympy.factorint(g).items():
        sq *= q ** (e // 2)
    return mq * Fraction(den * den, sq * sq)


def delta_of_torsion_factor(params: CurveParams, v: int, h: int,
                            prec: int = DEFAULT_PRECISION) -> SquareClass:
    """Class of (-1)^deg h (h(T) - f(T)/h(T)) for the local factor number h."""
    fac = factor_f_local(params, v, prec)
    deg = fac.factors[h].degree
    mqs = []
    for n in range(len(fac.factors)):
        tau = fac.symbolic_T(n)
        hv = fac.local_poly_value(h, tau)
        rest = None
        for l in range(len(fac.factors)):
            if l == h:
                continue
            val = fac.local_poly_value(l, tau)
            rest = val if rest is None else rest * val
        mqs.append(_square_free_content((hv - rest) * (-1) ** deg))
    return fac.square_class(mqs)


# ---------------------------------------------------------------------------
# Witness points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """x-coordinate of a point, or a conjugate pair with x^2 - s x + t = 0."""

    x: Fraction | None = None
    s: int | None = None
    t: int | None = None

    @property
    def is_pair(self) -> bool:
        return self.x is None

    def __str__(self) -> str:
        if self.is_pair:
            return f"pair(s={self.s},t={self.t})"
        return f"x={self.x}"


def witness_field(w: Witness, v: int) -> LocalFieldDesc | None:
    if not w.is_pair:
        return None
    disc = Fraction(w.s * w.s - 4 * w.t)
    if disc == 0 or padic_is_square(PAdic.from_rational(disc, v, 24)):
        return None
    return LocalFieldDesc.quadratic(v, -w.s, w.t)


def certify_witness(params: CurveParams, w: Witness, v: int = 2,
                    prec: int = DEFAULT_PRECISION) -> bool:
    """Whether the witness comes from a point of C(Q_v) (or a pair over a quadratic extension)."""
    if not w.is_pair:
        if params.f(w.x) == 0:
            return False
        K, x0 = LocalFieldDesc.base(v), w.x
    else:
        if w.s == 0 and w.t in (params.c2, params.c3):
            return False
        K = witness_field(w, v)
        if K is None:
            return False
        x0 = LocalElement.from_rationals(K, 0, 1, prec + 8)
    try:
        local_roots_of_f(params, K, x0, prec + 8)
    except PrecisionError:
        return False
    return True


def delta_of_witness(params: CurveParams, v: int, w: Witness,
                     prec: int = DEFAULT_PRECISION) -> SquareClass:
    if not certify_witness(params, w, v, prec):
        raise DescentError("witness", f"{w} is not certified over Q_{v}")
    fac = factor_f_local(params, v, prec)
    mqs = []
    for n in range(len(fac.factors)):
        tau = fac.symbolic_T(n)
        if w.is_pair:
            mqs.append(_square_free_content(tau * tau - tau * w.s + w.t))
        else:
            mqs.append(_square_free_content(tau * (-1) + w.x))
    return fac.square_class(mqs)


def paper_witnesses(params: CurveParams) -> list[Witness]:
    if params.case is Case.C1:
        first = Witness(Fraction(-1)) if params.p % 32 == 3 else Witness(Fraction(5))
        return [first, Witness(s=6, t=7)]
    if params.case is Case.C2:
        return [Witness(Fraction(3)), Witness(s=-8, t=20)]
    if params.case in (Case.C3, Case.C4):
        return [Witness(Fraction(-2)), Witness(Fraction(1, 4))]
    return []


def fallback_witnesses(bound: int = 20):
    xs = [Fraction(x) for x in range(-bound, bound + 1)]
    xs += [Fraction(1, 4), Fraction(-1, 4), Fraction(1, 2), Fraction(-1, 2)]
    for x in xs:
        yield Witness(x)
    for s in range(-bound, bound + 1):
        for t in range(-bound, bound + 1):
            yield Witness(s=s, t=t)


@dataclass
class DeltaImage:
    v: int
    fac: EtaleFactorization
    space: F2Subspace
    generators: list[SquareClass]
    sources: list[str]
    expected: int

    @property
    def dim(self) -> int:
        return self.space.dim

    def contains(self, x: SquareClass) -> bool:
        return x.coords in self.space


def image_delta_basis(params: CurveParams, v: int, prec: int = DEFAULT_PRECISION,
                      witness_bound: int = 20) -> DeltaImage:
    fac = factor_f_local(params, v, prec)
    expected = expected_delta_dim(params, v, prec)
    space = F2Subspace(fac.width)
    gens: list[SquareClass] = []
    sources: list[str] = []
    for tdc in torsion_divisors(fac):
        d = delta_of_torsion_factor(params, v, tdc.factor, prec)
        if space.add(d.coords):
            gens.append(d)
            sources.append(f"torsion:{fac.factors[tdc.factor].label}:{tdc.kind}")
    if space.dim < expected:
        candidates = list(paper_witnesses(params)) if v == 2 else []
        candidates += list(fallback_witnesses(witness_bound))
        for w in candidates:
            if space.dim >= expected:
                break
            if not certify_witness(params, w, v, prec):
                continue
            d = delta_of_witness(params, v, w, prec)
            if space.add(d.coords):
                gens.append(d)
                sources.append(f"witness:{w}")
    if space.dim != expected:
        raise DescentError("image_delta",
                           f"witness set insufficient at v={v}: dim {space.dim}, expected {expected}")
    return DeltaImage(v, fac, space, gens, sources, expected)


# ---------------------------------------------------------------------------
# Ker(val), G, W
# ---------------------------------------------------------------------------


def component_field(params: CurveParams, k: int) -> tuple[ImagQuadField, int]:
    """L^(k) = Q(sqrt(-m)) with sqrt(-m) = T_k / s."""
    c = params.c2 if k == 1 else params.c3
    m, s = squarefree_decomposition(c)
    return ImagQuadField(m), s


def _component_poly(x: Fraction, y: Fraction, s: int) -> Poly:
    return Poly([x, y / s])


def _embed(params: CurveParams, k: int, g: Poly, label: str = "") -> GlobalElement:
    comps: list[Any] = [1, 1, 1]
    comps[k] = g
    return GlobalElement(params, comps, label)


def kernel_val_basis(params: CurveParams) -> list[GlobalElement]:
    out = [_embed(params, 0, Poly([-1]))]
    for k in (1, 2):
        K, s = component_field(params, k)
        for x, y in unit_square_basis(K):
            out.append(_embed(params, k, _component_poly(x, y, s)))
    for k in (1, 2):
        K, _ = component_field(params, k)
        for g in cl2_basis(K):
            out.append(_embed(params, k, Poly([g])))
    return out


@dataclass
class GroupGW:
    n2: int
    np: int
    G: F2Subspace
    G_basis: list[F2Vector]
    W: F2Subspace
    W_basis: list[F2Vector]
    W_lifts: list[GlobalElement]


def _ideal_norms(params: CurveParams, fac2: EtaleFactorization, facp: EtaleFactorization,
                 vec: F2Vector) -> dict[int, int]:
    bits = vec.to_list()
    norms = {1: 1, 2: 1}
    for off, fac in ((0, fac2), (len(fac2.factors), facp)):
        for n, lf in enumerate(fac.factors):
            if lf.index == 0 or not bits[off + n]:
                continue
            norms[lf.index] *= fac.v ** lf.field.f_res
    return norms


def class_image(params: CurveParams, fac2, facp, vec: F2Vector) -> F2Vector:
    """Image of an ideal vector in Cl(L)/Cl(L)^2 through the genus characters."""
    norms = _ideal_norms(params, fac2, facp, vec)
    bits: list[int] = []
    for k in (1, 2):
        K, _ = component_field(params, k)
        bits.extend(genus_character(norms[k], K))
    return F2Vector(bits)


def group_G_and_W(params: CurveParams, d2: DeltaImage, dp: DeltaImage,
                  prec: int = DEFAULT_PRECISION, lift_bound: int = 100) -> GroupGW:
    fac2, facp = d2.fac, dp.fac
    n2, np_ = len(fac2.factors), len(facp.factors)
    width = n2 + np_
    G = F2Subspace(width)
    zero2, zerop = F2Vector([0] * n2), F2Vector([0] * np_)
    for d in d2.generators:
        G.add(val_map(d).bits.concat(zerop))
    for d in dp.generators:
        G.add(zero2.concat(val_map(d).bits))
    G_basis = G.basis()
    images = [class_image(params, fac2, facp, g) for g in G_basis]
    W = F2Subspace(width)
    for combo in f2_kernel(images):
        vec = F2Vector(0, width)
        for idx in combo:
            vec = vec ^ G_basis[idx]
        W.add(vec)
    W_basis = W.basis()
    lifts = [lift_ideal_vector(params, fac2, facp, w, lift_bound) for w in W_basis]
    return GroupGW(n2, np_, G, G_basis, W, W_basis, lifts)


def lift_ideal_vector(params: CurveParams, fac2: EtaleFactorization, facp: EtaleFactorization,
                      vec: F2Vector, bound: int = 100) -> GlobalElement:
    """A global element whose valuation vector is vec at 2 and p and even elsewhere."""
    bits = vec.to_list()
    n2 = len(fac2.factors)
    want: dict[int, tuple[list[int], list[int]]] = {}
    for k in range(3):
        b2 = [bits[n] for n, lf in enumerate(fac2.factors) if lf.index == k]
        bp = [bits[n2 + n] for n, lf in enumerate(facp.factors) if lf.index == k]
        want[k] = (b2, bp)
    p = params.p
    comps: list[Poly] = [Poly([2 ** want[0][0][0] * p ** want[0][1][0]])]
    for k in (1, 2):
        comps.append(_lift_component(params, k, fac2, facp, want[k], bound))
    return GlobalElement(params, comps)


def _lift_component(params, k, fac2, facp, want, bound) -> Poly:
    b2, bp = want
    if not any(b2) and not any(bp):
        return Poly([1])
    K, s = component_field(params, k)
    p, m = params.p, K.m
    e = 2 if m % 4 == 3 else 1
    norms = sorted({2 ** a * p ** b * t * t for t in range(1, bound + 1)
                    for a in range(4) for b in range(4)})
    for N in norms:
        target = e * e * N
        w = 0
        while m * w * w <= target:
            rest = target - m * w * w
            u = math.isqrt(rest)
            if u * u == rest and (e == 1 or (u - w) % 2 == 0):
                for su in ((u, -u) if u else (0,)):
                    x, y = Fraction(su, e), Fraction(w, e)
                    g = _component_poly(x, y, s)
                    if (factor_val_bits(fac2, k, g) == b2 and factor_val_bits(facp, k, g) == bp
                            and _even_elsewhere(K, (x, y), N, p)):
                        return g
            w += 1
    raise DescentError("lift", f"no lift found for factor T{k + 1} within bound {bound}")


def _even_elsewhere(K: ImagQuadField, a, N: int, p: int) -> bool:
    n = N
    for q in (2, p):
        while n % q == 0:
            n //= q
    q = 3
    while n > 1:
        if q * q > n:
            q = n
        if n % q == 0:
            if q not in (2, p) and any(v % 2 for v in valuations_above(K, a, q)):
                return False
            while n % q == 0:
                n //= q
        q += 2
    return True


# ---------------------------------------------------------------------------
# Selmer dimension
# ---------------------------------------------------------------------------


@dataclass
class DescentReport:
    params: CurveParams
    precision: int
    j_local: dict[str, int]
    im_delta: dict[str, int]
    g_dims: dict[str, int]
    dim_ker_val: int
    dim_W: int
    dim_val_inv_G: int
    dim_product: int
    dim_sum: int
    selmer_dim: int
    dim_JQ2: int
    rank_bound: int
    bases: dict[str, list[str]] = field(default_factory=dict)
    witnesses: list[str] = field(default_factory=list)
    res_rank: int = 0

    def to_json(self) -> dict[str, Any]:
        P = self.params
        return {
            "schema": SCHEMA_VERSION,
            "params": {"p": P.p, "i": P.i, "j": P.j, "case": P.case.value,
                       "sub_case": P.sub_case},
            "precision": self.precision,
            "dim_J_v_2": self.j_local,
            "dim_im_delta": self.im_delta,
            "dim_G": self.g_dims,
            "dim_ker_val": self.dim_ker_val,
            "dim_W": self.dim_W,
            "dim_val_inv_G": self.dim_val_inv_G,
            "dim_product": self.dim_product,
            "dim_sum": self.dim_sum,
            "selmer_dim": self.selmer_dim,
            "dim_J_Q_2": self.dim_JQ2,
            "rank_bound": self.rank_bound,
            "bases": self.bases,
            "witnesses": self.witnesses,
        }


@dataclass
class DescentData:
    """Everything computed on the way to the report (for tests and relations)."""

    params: CurveParams
    prec: int
    d2: DeltaImage
    dp: DeltaImage
    ker_val: list[GlobalElement]
    gw: GroupGW
    report: DescentReport

    def res_S(self, g: GlobalElement) -> F2Vector:
        return res_global(g, self.d2.fac).coords.concat(res_global(g, self.dp.fac).coords)

    def embed_2(self, x: SquareClass) -> F2Vector:
        return x.coords.concat(F2Vector([0] * self.dp.fac.width))

    def embed_p(self, x: SquareClass) -> F2Vector:
        return F2Vector([0] * self.d2.fac.width).concat(x.coords)


def _run(params: CurveParams, prec: int, witness_bound: int, lift_bound: int) -> DescentData:
    p = params.p
    d2 = image_delta_basis(params, 2, prec, witness_bound)
    dp = image_delta_basis(params, p, prec, witness_bound)
    ker = kernel_val_basis(params)
    for g in ker:
        if val_map(res_global(g, d2.fac)).bits.bits or val_map(res_global(g, dp.fac)).bits.bits:
            raise DescentError("ker_val", f"{g} has nontrivial valuation")
    gw = group_G_and_W(params, d2, dp, prec, lift_bound)
    vinv = ker + gw.W_lifts
    width = d2.fac.width + dp.fac.width
    zero2 = F2Vector([0] * d2.fac.width)
    zerop = F2Vector([0] * dp.fac.width)
    d_vecs = [x.coords.concat(zerop) for x in d2.generators]
    d_vecs += [zero2.concat(x.coords) for x in dp.generators]
    h_vecs = [res_global(g, d2.fac).coords.concat(res_global(g, dp.fac).coords) for g in vinv]
    dim_product = d2.dim + dp.dim
    dim_sum = f2_span(d_vecs + h_vecs, width).dim
    dim_vinv = len(ker) + gw.W.dim
    selmer = dim_vinv + dim_product - dim_sum
    jq = two_torsion_dim(params, "Q")
    rank_bound = selmer - jq
    G2 = f2_span([val_map(x).bits for x in d2.generators], len(d2.fac.factors)).dim
    Gp = f2_span([val_map(x).bits for x in dp.generators], len(dp.fac.factors)).dim
    report = DescentReport(
        params=params,
        precision=prec,
        j_local={"2": two_torsion_dim(params, 2, prec), "p": two_torsion_dim(params, p, prec),
                 "inf": two_torsion_dim(params, INF)},
        im_delta={"2": d2.dim, "p": dp.dim, "inf": 0},
        g_dims={"2": G2, "p": Gp},
        dim_ker_val=len(ker),
        dim_W=gw.W.dim,
        dim_val_inv_G=dim_vinv,
        dim_product=dim_product,
        dim_sum=dim_sum,
        selmer_dim=selmer,
        dim_JQ2=jq,
        rank_bound=rank_bound,
        bases={
            "im_delta_2": [x.label for x in d2.generators],
            "im_delta_p": [x.label for x in dp.generators],
            "ker_val": [g.label for g in ker],
            "W": [_ideal_string(gw, d2.fac, dp.fac, w) for w in gw.W_basis],
            "val_inv_G": [g.label for g in vinv],
        },
        witnesses=[s for s in d2.sources + dp.sources if s.startswith("witness")],
        res_rank=f2_span(h_vecs, width).dim,
    )
    if params.in_family_case and rank_bound != 0:
        raise DescentError("selmer", f"rank bound {rank_bound} != 0 for {params}")
    return DescentData(params, prec, d2, dp, ker, gw, report)


def _ideal_string(gw: GroupGW, fac2, facp, w: F2Vector) -> str:
    bits = w.to_list()
    from .etale import IdealClassVector

    parts = []
    for off, fac in ((0, fac2), (gw.n2, facp)):
        sub = F2Vector(bits[off:off + len(fac.factors)])
        parts.append(str(IdealClassVector(fac.v, sub, tuple(fac.ideal_labels()),
                                          tuple(tuple(g) for g in fac.groups()))))
    return " x ".join(parts)


def descent_data(params: CurveParams, prec: int | None = None, witness_bound: int = 20,
                 lift_bound: int = 100) -> DescentData:
    """Run the descent; on a precision failure retry once at doubled precision."""
    prec = prec or DEFAULT_PRECISION
    try:
        return _run(params, prec, witness_bound, lift_bound)
    except PrecisionError:
        return _run(params, 2 * prec, witness_bound, lift_bound)


def selmer_and_rank(params: CurveParams, prec: int | None = None) -> DescentReport:
    return descent_data(params, prec).report


__all__ = [
    "SCHEMA_VERSION", "DEFAULT_PRECISION", "INF", "DescentError", "two_torsion_dim",
    "expected_delta_dim", "TorsionDivisorClass", "torsion_divisors", "delta_of_torsion_factor",
    "Witness", "witness_field", "certify_witness", "delta_of_witness", "paper_witnesses",
    "fallback_witnesses", "DeltaImage", "image_delta_basis", "component_field",
    "kernel_val_basis", "GroupGW", "class_image", "group_G_and_W", "lift_ideal_vector",
    "DescentReport", "DescentData", "descent_data", "selmer_and_rank", "DomainError",
]
