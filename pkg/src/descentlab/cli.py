"""Command-line interface: descent, verify-range, points, zeta, appendix."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import sympy

from . import __version__
from .appendixff import (
    FERMAT_EQUATIONS,
    TRIVIAL_FF_POINTS,
    fermat_quartic_search,
    function_field_point_search,
)
from .descent import DEFAULT_PRECISION, SCHEMA_VERSION, DescentError, selmer_and_rank
from .etale import CurveParams, ParamError, detect_case
from .localfields import DomainError, PrecisionError
from .points import PROVED, rational_points
from .zeta import BadReduction, covers_elliptic_obstruction, zeta_numerator

log = logging.getLogger("descentlab")

EXIT_OK, EXIT_ERROR, EXIT_DIAGNOSTIC = 0, 1, 2
PRECISION_ENV = "DESCENTLAB_PRECISION"
CASE_PARAMS = {"C1": (0, 1), "C2": (1, 1), "C3": (0, 2), "C4": (0, 2)}


@dataclass
class RunConfig:
    command: str
    p: int | None = None
    p_min: int | None = None
    p_max: int | None = None
    case: str | None = None
    i: int = 0
    j: int = 1
    precision: int = DEFAULT_PRECISION
    witness_bound: int = 20
    out: str | None = None
    format: str = "json"
    q: int = 11
    fermat_bound: int = 200
    ff_deg: int = 2
    ff_coeff: int = 2
    workers: int = 4

    def __post_init__(self):
        if self.precision < 12:
            raise ValueError("precision must be at least 12")
        if self.p_min is not None and self.p_max is not None and self.p_min > self.p_max:
            raise ValueError("empty prime range: p-min > p-max")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _params_json(P: CurveParams) -> dict:
    return {"p": P.p, "i": P.i, "j": P.j, "case": P.case.value, "sub_case": P.sub_case}


def _error(command: str, stage: str, msg: str) -> tuple[int, dict]:
    return EXIT_ERROR, {"schema": SCHEMA_VERSION, "command": command,
                        "error": {"stage": stage, "message": msg}}


def cmd_descent(cfg: RunConfig) -> tuple[int, dict]:
    try:
        P = detect_case(cfg.p, cfg.i, cfg.j)
    except ParamError as exc:
        return _error("descent", "params", str(exc))
    try:
        report = selmer_and_rank(P, cfg.precision)
    except (DescentError, PrecisionError, DomainError) as exc:
        stage = getattr(exc, "stage", "descent")
        code, body = _error("descent", stage, str(exc))
        body["params"] = _params_json(P)
        return (EXIT_DIAGNOSTIC if not P.in_family_case else code), body
    body = {"command": "descent", **report.to_json()}
    if not P.in_family_case:
        body["diagnostic"] = True
        return EXIT_DIAGNOSTIC, body
    return (EXIT_OK if report.rank_bound == 0 else EXIT_ERROR), body


def _points_row(P: CurveParams, precision: int) -> dict:
    rp = rational_points(P, precision)
    return {"params": _params_json(P), **rp.to_json()}


def cmd_points(cfg: RunConfig) -> tuple[int, dict]:
    try:
        P = detect_case(cfg.p, cfg.i, cfg.j)
        row = _points_row(P, cfg.precision)
    except ParamError as exc:
        return _error("points", "params", str(exc))
    except (DescentError, PrecisionError, DomainError) as exc:
        return _error("points", getattr(exc, "stage", "descent"), str(exc))
    body = {"schema": SCHEMA_VERSION, "command": "points", **row}
    if not P.in_family_case:
        return EXIT_DIAGNOSTIC, body
    return (EXIT_OK if row["status"] == PROVED else EXIT_ERROR), body


def _range_params(cfg: RunConfig) -> list[CurveParams]:
    lo = max(3, cfg.p_min or 3)
    hi = cfg.p_max if cfg.p_max is not None else lo
    cases = [cfg.case] if cfg.case else list(CASE_PARAMS)
    out = []
    for p in sympy.primerange(lo, hi + 1):
        for c in cases:
            i, j = CASE_PARAMS[c]
            P = detect_case(int(p), i, j)
            if P.case.value == c:
                out.append(P)
    return out


def _verify_one(P: CurveParams, precision: int) -> dict:
    row = {"params": _params_json(P)}
    try:
        rep = selmer_and_rank(P, precision)
        pts = rational_points(P, precision)
        row.update(selmer_dim=rep.selmer_dim, rank_bound=rep.rank_bound,
                   points=pts.point_strings(), status=pts.status)
        row["pass"] = (rep.rank_bound == 0 and pts.status == PROVED
                       and sorted(row["points"]) == ["(0,0)", "inf"])
    except (DescentError, PrecisionError, DomainError) as exc:
        row.update(error={"stage": getattr(exc, "stage", "descent"), "message": str(exc)})
        row["pass"] = False
    return row


def cmd_verify_range(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.case and cfg.case not in CASE_PARAMS:
        return _error("verify-range", "params", f"unknown case {cfg.case!r}")
    params = _range_params(cfg)
    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        rows = list(pool.map(lambda P: _verify_one(P, cfg.precision), params))
    rows.sort(key=lambda r: (r["params"]["case"], r["params"]["p"]))
    ok = all(r["pass"] for r in rows)
    body = {"schema": SCHEMA_VERSION, "command": "verify-range", "rows": rows,
            "count": len(rows), "all_pass": ok}
    return (EXIT_OK if ok else EXIT_ERROR), body


def cmd_zeta(cfg: RunConfig) -> tuple[int, dict]:
    try:
        P = detect_case(cfg.p, cfg.i, cfg.j)
        Z = zeta_numerator(P, cfg.q)
        irreducible = covers_elliptic_obstruction(P, cfg.q)
    except (ParamError, BadReduction, ValueError) as exc:
        return _error("zeta", "params", str(exc))
    body = {"schema": SCHEMA_VERSION, "command": "zeta", "params": _params_json(P), "q": cfg.q,
            "numerator": str(Z), "coefficients": list(Z.coeffs), "irreducible": irreducible}
    return EXIT_OK, body


def cmd_appendix(cfg: RunConfig) -> tuple[int, dict]:
    try:
        sols = fermat_quartic_search(cfg.fermat_bound)
        ff = {f"{i},{j}": function_field_point_search(i, j, cfg.ff_deg, cfg.ff_coeff)
              for i, j in ((0, 1), (1, 1))}
    except ValueError as exc:
        return _error("appendix", "params", str(exc))
    ff_ok = all(sorted(v) == sorted(TRIVIAL_FF_POINTS) for v in ff.values())
    body = {
        "schema": SCHEMA_VERSION, "command": "appendix",
        "fermat": {"bound": cfg.fermat_bound, "equations": list(FERMAT_EQUATIONS),
                   "solutions": [list(s) for s in sols]},
        "function_field": {"deg_bound": cfg.ff_deg, "coeff_bound": cfg.ff_coeff,
                           "points": ff, "label": "bounded check"},
    }
    return (EXIT_OK if not sols and ff_ok else EXIT_ERROR), body


COMMANDS = {
    "descent": cmd_descent,
    "verify-range": cmd_verify_range,
    "points": cmd_points,
    "zeta": cmd_zeta,
    "appendix": cmd_appendix,
}


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def render_json(body: dict) -> str:
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def render_table(body: dict) -> str:
    if "error" in body:
        e = body["error"]
        return f"error [{e['stage']}]: {e['message']}\n"
    cmd = body.get("command")
    lines = []
    if cmd == "verify-range":
        lines.append(f"{'case':<6}{'p':>6}{'selmer':>8}{'rank':>6}  {'points':<16}{'status':<12}pass")
        for r in body["rows"]:
            P = r["params"]
            if "error" in r:
                lines.append(f"{P['case']:<6}{P['p']:>6}  error [{r['error']['stage']}]")
                continue
            lines.append(f"{P['case']:<6}{P['p']:>6}{r['selmer_dim']:>8}{r['rank_bound']:>6}  "
                         f"{'{' + ', '.join(r['points']) + '}':<16}{r['status']:<12}"
                         f"{'yes' if r['pass'] else 'NO'}")
        lines.append(f"{body['count']} rows, all pass: {body['all_pass']}")
    elif cmd == "descent":
        for key in ("params", "dim_J_v_2", "dim_im_delta", "dim_G", "dim_ker_val", "dim_W",
                    "dim_val_inv_G", "dim_product", "dim_sum", "selmer_dim", "rank_bound"):
            lines.append(f"{key:<14} {body[key]}")
        for name, items in body["bases"].items():
            lines.append(f"{name}:")
            lines.extend(f"  {x}" for x in items)
    elif cmd == "points":
        lines.append("{" + ", ".join(body["points"]) + "} " + body["status"])
        if body["extra_points"]:
            lines.append("other integral points: " + ", ".join(body["extra_points"]))
    elif cmd == "zeta":
        verdict = "irreducible" if body["irreducible"] else "reducible"
        lines.append(f"{body['numerator']}, {verdict}")
    elif cmd == "appendix":
        sols = body["fermat"]["solutions"]
        lines.append("fermat: " + ("no solutions" if not sols else f"{len(sols)} solutions"))
        for k, v in body["function_field"]["points"].items():
            lines.append(f"function field (i,j)=({k}): {', '.join(v)} (bounded check)")
    else:
        lines.append(render_json(body).rstrip())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="descentlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"descentlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, need_p=True):
        if need_p:
            sp.add_argument("--p", type=int, required=True)
            sp.add_argument("--i", type=int, default=0)
            sp.add_argument("--j", type=int, default=1)
        sp.add_argument("--precision", type=int, default=None)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("json", "table"), default="json")
        sp.add_argument("-v", "--verbose", action="store_true")

    common(sub.add_parser("descent", help="2-descent and rank bound"))
    vr = sub.add_parser("verify-range", help="verify every qualifying prime in a range")
    common(vr, need_p=False)
    vr.add_argument("--p-min", type=int, default=3)
    vr.add_argument("--p-max", type=int, required=True)
    vr.add_argument("--case", choices=sorted(CASE_PARAMS))
    vr.add_argument("--workers", type=int, default=4)
    common(sub.add_parser("points", help="rational points"))
    z = sub.add_parser("zeta", help="zeta numerator over F_q")
    common(z)
    z.add_argument("--q", type=int, default=11)
    a = sub.add_parser("appendix", help="Fermat quartics and the function-field search")
    common(a, need_p=False)
    a.add_argument("--fermat-bound", type=int, default=200)
    a.add_argument("--ff-deg", type=int, default=2)
    a.add_argument("--ff-coeff", type=int, default=2)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    precision = ns.precision if ns.precision is not None else DEFAULT_PRECISION
    env = os.environ.get(PRECISION_ENV)
    if env:
        precision = int(env)
    kwargs = {k: v for k, v in vars(ns).items()
              if k in RunConfig.__dataclass_fields__ and v is not None and k != "precision"}
    return RunConfig(precision=precision, **kwargs)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        code, body = _error(ns.command, "config", str(exc))
    else:
        code, body = COMMANDS[cfg.command](cfg)
    text = render_json(body) if ns.format == "json" else render_table(body)
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_ERROR and "error" in body:
        print(f"error [{body['error']['stage']}]: {body['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
