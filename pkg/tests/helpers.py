"""Shared computations for the descent and acceptance tests."""

import functools

from descentlab.arith import f2_span
from descentlab.descent import descent_data
from descentlab.etale import (
    detect_case,
    parse_global_tuple,
    parse_ideal_vector,
    parse_local_tuple,
    val_map,
)

from reference_data import (
    CASE_IJ,
    G_BASES,
    GLOBAL_ELEMENTS,
    IMAGE_TUPLES,
    LOCAL_ELEMENTS,
    VAL2_IMAGES,
)


@functools.lru_cache(maxsize=None)
def cached_descent(case: str, p: int):
    return descent_data(detect_case(p, *CASE_IJ[case]))


def image_tuples(case: str, p: int):
    """(place, tuple) pairs displayed for this prime."""
    out = []
    for key, tuples in IMAGE_TUPLES[case].items():
        if key.startswith("2_") and p % 32 != int(key[2:]):
            continue
        place = "p" if key == "p" else "2"
        out.extend((place, t) for t in tuples)
    return out


def in_image(case: str, p: int, place: str, t: str) -> bool:
    d = cached_descent(case, p)
    img = d.d2 if place == "2" else d.dp
    return img.contains(parse_local_tuple(t, img.fac))


def val2_matches(case: str, p: int) -> list[bool]:
    d = cached_descent(case, p)
    fac = d.d2.fac
    return [val_map(parse_local_tuple(t, fac)).bits == parse_ideal_vector(want, fac)
            for t, want in VAL2_IMAGES.get(case, [])]


def g_matches(case: str, p: int) -> dict[str, bool]:
    """Whether the val images of the local images span exactly the displayed G bases."""
    d = cached_descent(case, p)
    out = {}
    for place, img in (("2", d.d2), ("p", d.dp)):
        n = len(img.fac.factors)
        got = f2_span([val_map(x).bits for x in img.generators], n)
        want = f2_span([parse_ideal_vector(s, img.fac) for s in G_BASES[case][place]], n)
        out[place] = (got.dim == want.dim and all(v in got for v in want.basis()))
    return out


def element_vectors(case: str, p: int) -> dict:
    d = cached_descent(case, p)
    params = d.params
    vecs = {}
    for name, (place, t) in LOCAL_ELEMENTS[case].items():
        if place == "2":
            vecs[name] = d.embed_2(parse_local_tuple(t, d.d2.fac))
        else:
            vecs[name] = d.embed_p(parse_local_tuple(t, d.dp.fac))
    for name, t in GLOBAL_ELEMENTS[case].items():
        vecs[name] = d.res_S(parse_global_tuple(t, params))
    return vecs


def relation_holds(case: str, p: int, names: list[str]) -> bool:
    vecs = element_vectors(case, p)
    acc = vecs[names[0]]
    for n in names[1:]:
        acc = acc ^ vecs[n]
    return acc.is_zero()
