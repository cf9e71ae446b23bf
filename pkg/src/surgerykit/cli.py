"""Command-line front end.

Every command reads JSON documents (file paths, or standard input when the
path is ``-`` or missing) and prints one JSON report with sorted keys.
Integers are written as decimal strings so that large values stay exact.

Exit codes: 0 computed, 1 negative verdict, 2 unknown or budget exhausted,
3 invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from . import forms, formations, linking, lmonoid
from .exact_linear import Matrix, Ring, smith_normal_form

FORMAT_VERSION = "1"
EXIT_OK, EXIT_NEGATIVE, EXIT_UNKNOWN, EXIT_INVALID = 0, 1, 2, 3


class InputError(ValueError):
    """Invalid document; ``path`` is a JSON pointer to the offending value."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.path = path


def canonical(obj: Any) -> Any:
    """Integers become decimal strings; containers are converted recursively."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(canonical(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


# parsing ------------------------------------------------------------------------------

def _int(x: Any, path: str) -> int:
    if isinstance(x, bool):
        raise InputError("expected an integer", path)
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x.strip())
        except ValueError:
            pass
    raise InputError(f"expected an integer, got {x!r}", path)


def _field(doc: dict, key: str, path: str) -> Any:
    if not isinstance(doc, dict):
        raise InputError("expected an object", path)
    if key not in doc:
        raise InputError(f"missing field {key!r}", f"{path}/{key}")
    return doc[key]


def parse_ring(doc: Any, path: str) -> Ring:
    if doc is None:
        return Ring("Z")
    try:
        if isinstance(doc, str):
            if doc == "Z":
                return Ring("Z")
            if doc.startswith("F"):
                return Ring("Fp", int(doc[1:]))
            if doc.startswith("Z/"):
                return Ring("Zmod", int(doc[2:]))
            raise ValueError(f"unknown ring {doc!r}")
        return Ring.from_json(doc)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(str(exc), path) from None


def parse_matrix(rows: Any, ring: Ring, path: str, ncols: int | None = None) -> Matrix:
    if not isinstance(rows, list):
        raise InputError("expected a list of rows", path)
    out = []
    for i, r in enumerate(rows):
        if not isinstance(r, list):
            raise InputError("expected a row (list)", f"{path}/{i}")
        out.append([_int(x, f"{path}/{i}/{j}") for j, x in enumerate(r)])
    width = len(out[0]) if out else (ncols or 0)
    for i, r in enumerate(out):
        if len(r) != width:
            raise InputError(f"row has length {len(r)}, expected {width}", f"{path}/{i}")
    if ncols is not None and out and width != ncols:
        raise InputError(f"expected {ncols} columns, got {width}", path)
    return Matrix(out, ring, ncols=width)


def parse_eps(x: Any, path: str) -> int:
    e = _int(x, path)
    if e not in (1, -1):
        raise InputError("epsilon must be 1 or -1", path)
    return e


def parse_form(doc: Any, path: str = "") -> forms.QuadraticForm:
    if isinstance(doc, dict) and "named" in doc:
        name = doc["named"]
        try:
            return forms.named_lattice(str(name))
        except ValueError as exc:
            raise InputError(str(exc), f"{path}/named") from None
    ring = parse_ring(doc.get("ring") if isinstance(doc, dict) else None, f"{path}/ring")
    eps = parse_eps(_field(doc, "epsilon", path), f"{path}/epsilon")
    theta = parse_matrix(_field(doc, "theta", path), ring, f"{path}/theta")
    if not theta.is_square():
        raise InputError("theta must be square", f"{path}/theta")
    return forms.QuadraticForm(theta, eps)


def parse_quasi_formation(doc: Any, path: str = "") -> formations.QuasiFormation:
    m = parse_form(_field(doc, "form", path), f"{path}/form")
    if m.rank % 2:
        raise InputError("ambient form has odd rank", f"{path}/form/theta")
    k = m.rank // 2
    L = parse_matrix(_field(doc, "L", path), m.ring, f"{path}/L", ncols=k)
    V = parse_matrix(_field(doc, "V", path), m.ring, f"{path}/V", ncols=k)
    try:
        x = formations.QuasiFormation(m, L, V)
    except ValueError as exc:
        raise InputError(str(exc), path) from None
    stab = _int(doc.get("stab", 0), f"{path}/stab")
    if stab < 0:
        raise InputError("stab must be nonnegative", f"{path}/stab")
    return formations.direct_sum_qf(x, formations.trivial_quasi_formation(stab, x.eps, x.ring)) if stab else x


def parse_boundary_iso(doc: Any, path: str = "") -> formations.BoundaryIso:
    v = parse_form(_field(doc, "source", path), f"{path}/source")
    w = parse_form(_field(doc, "target", path), f"{path}/target")
    ring = v.ring
    alpha = parse_matrix(_field(doc, "alpha", path), ring, f"{path}/alpha")
    beta = parse_matrix(_field(doc, "beta", path), ring, f"{path}/beta")
    nu = parse_matrix(_field(doc, "nu", path), ring, f"{path}/nu")
    f = formations.BoundaryIso(v, w, formations.FormationIso(alpha, beta, nu))
    try:
        defects = f.defects()
    except ValueError as exc:
        defects = [str(exc)]
    if defects:
        raise InputError("; ".join(defects), path)
    return f


def load_document(src: str) -> dict:
    try:
        text = sys.stdin.read() if src == "-" else open(src, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read {src}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError("document must be a JSON object")
    version = doc.get("format_version", FORMAT_VERSION)
    if str(version) != FORMAT_VERSION:
        raise InputError(f"unsupported format_version {version!r}", "/format_version")
    return doc


def _payload(doc: dict, kind: str) -> dict:
    """Accept ``{"kind": ..., "payload": {...}}`` or the payload fields inline."""
    declared = doc.get("kind", kind)
    if declared != kind:
        raise InputError(f"expected a {kind} document, got {declared!r}", "/kind")
    if "payload" in doc:
        if not isinstance(doc["payload"], dict):
            raise InputError("payload must be an object", "/payload")
        return doc["payload"]
    return doc


def _ppath(doc: dict) -> str:
    return "/payload" if "payload" in doc else ""


# commands -----------------------------------------------------------------------------

def _form_json(v: forms.QuadraticForm) -> dict:
    return v.to_json()


def _matrix_json(m: Matrix) -> list:
    return [list(r) for r in m.rows]


def cmd_snf(doc, args):
    p = _payload(doc, "matrix")
    ring = parse_ring(p.get("ring"), f"{_ppath(doc)}/ring")
    if not ring.is_integers:
        raise InputError("Smith normal form is computed over Z", f"{_ppath(doc)}/ring")
    A = parse_matrix(_field(p, "matrix", _ppath(doc)), ring, f"{_ppath(doc)}/matrix")
    snf = smith_normal_form(A)
    return {"diagonal": list(snf.diagonal), "rank": snf.rank,
            "U": _matrix_json(snf.U), "W": _matrix_json(snf.W)}, EXIT_OK


def cmd_boundary(doc, args):
    v = parse_form(_payload(doc, "form"), _ppath(doc))
    if not v.ring.is_integers or not v.is_nondegenerate:
        raise InputError("S-boundary needs a nondegenerate form over Z", _ppath(doc))
    g = linking.s_boundary(v)
    return {"linking_form": g.to_json(), "order": g.order}, EXIT_OK


def cmd_glue(doc, args):
    f = parse_boundary_iso(_payload(doc, "formation_iso"), _ppath(doc))
    glued = formations.union(f.source, -f.target, f)
    return {"union": _form_json(glued), "unimodular": glued.is_simple}, EXIT_OK


def cmd_kappa(doc, args):
    f = parse_boundary_iso(_payload(doc, "formation_iso"), _ppath(doc))
    if not f.source.ring.is_integers:
        raise InputError("kappa is computed over Z", _ppath(doc))
    return lmonoid.kappa(f).to_json(), EXIT_OK


def _embedding(doc):
    p = doc.get("payload", doc)
    kind = doc.get("kind", "quasiformation")
    if kind == "embedding":
        m = parse_form(_field(p, "form", _ppath(doc)), f"{_ppath(doc)}/form")
        j = parse_matrix(_field(p, "j", _ppath(doc)), m.ring, f"{_ppath(doc)}/j")
        if j.nrows != m.rank:
            raise InputError("j has the wrong number of rows", f"{_ppath(doc)}/j")
        return m, j
    x = parse_quasi_formation(_payload(doc, "quasiformation"), _ppath(doc))
    return x.form, x.V


def cmd_split(doc, args):
    m, j = _embedding(doc)
    try:
        se = formations.split_embedding(m, j)
    except ValueError as exc:
        raise InputError(str(exc), _ppath(doc)) from None
    return {
        "v": _form_json(se.v),
        "vperp": _form_json(se.vperp),
        "f_j": dict(se.f_j.iso.to_json(), source=_form_json(se.f_j.source), target=_form_json(se.f_j.target)),
        "r_j": _matrix_json(se.r_j),
    }, EXIT_OK


def cmd_b(doc, args):
    x = parse_quasi_formation(_payload(doc, "quasiformation"), _ppath(doc))
    bp = formations.b_invariant(x)
    return {"v": _form_json(bp.v), "vperp": _form_json(bp.vperp)}, EXIT_OK


def cmd_delta(doc, args):
    x = parse_quasi_formation(_payload(doc, "quasiformation"), _ppath(doc))
    if not x.ring.is_integers or x.eps != 1:
        raise InputError("delta is computed for epsilon = 1 over Z", _ppath(doc))
    if not formations.b_invariant(x).v.is_nondegenerate:
        raise InputError("boundary is degenerate", _ppath(doc))
    d = lmonoid.delta_invariant(x, order_cap=args.order_cap)
    code = EXIT_UNKNOWN if d.orbit_status == lmonoid.UNKNOWN else EXIT_OK
    return d.to_json(), code


def cmd_elementary(doc, args):
    x = parse_quasi_formation(_payload(doc, "quasiformation"), _ppath(doc))
    direct = formations.is_elementary_representative(x)
    if direct:
        return {"elementary": True, "method": "representative",
                "rho": _matrix_json(direct.certificate.rho)}, EXIT_OK
    if x.ring.is_field:
        r = lmonoid.field_elementary_certificate(x, budget=args.budget)
        if r.status == "Yes":
            return {"elementary": True, "method": "lagrangian_complement",
                    "lagrangian": _matrix_json(r.lagrangian), "rho": _matrix_json(r.certificate.rho)}, EXIT_OK
        return {"elementary": None, "method": "search", "searched": r.searched}, EXIT_UNKNOWN
    if not x.ring.is_integers:
        raise InputError("elementarity is decided over Z and prime fields", _ppath(doc))
    if x.eps == -1:
        c = lmonoid.skew_elementary_certificate(x)
        return {"elementary": True, "method": "lagrangian_complement", "lagrangian": _matrix_json(c.K),
                "rho": _matrix_json(c.certificate.rho)}, EXIT_OK
    bp = formations.b_invariant(x)
    if not bp.v.is_nondegenerate:
        return {"elementary": None, "method": "none", "note": "degenerate boundary"}, EXIT_UNKNOWN
    d = lmonoid.delta_invariant(x, order_cap=args.order_cap)
    if d.orbit_status == lmonoid.IDENTITY_ORBIT:
        return {"elementary": True, "method": "delta", "delta": d.to_json()}, EXIT_OK
    if d.orbit_status == lmonoid.NONTRIVIAL_ORBIT:
        return {"elementary": False, "method": "delta", "delta": d.to_json()}, EXIT_NEGATIVE
    verdict = lmonoid.strict_cancellation_check(bp.v, order_cap=args.order_cap)
    if verdict.holds:
        return {"elementary": True, "method": "cancellation", "cancellation": verdict.to_json()}, EXIT_OK
    return {"elementary": None, "method": "none", "delta": d.to_json()}, EXIT_UNKNOWN


def cmd_sbaut(doc, args):
    v = parse_form(_payload(doc, "form"), _ppath(doc))
    if not v.ring.is_integers or v.eps != 1 or not v.is_nondegenerate:
        raise InputError("sbaut needs a nondegenerate form over Z with epsilon = 1", _ppath(doc))
    try:
        res = linking.biso_orbits(v, v, order_cap=args.order_cap, aut_cap=args.budget)
    except linking.BudgetExceeded as exc:
        return {"orbits": None, "status": "Unknown", "note": str(exc)}, EXIT_UNKNOWN
    out = {"orbits": res.count, "status": res.status,
           "sizes": [len(o) for o in res.orbits]}
    if res.identity_orbit is not None:
        out["identity_orbit"] = res.identity_orbit
    return out, (EXIT_OK if res.status == "Complete" else EXIT_UNKNOWN)


def cmd_cancel_check(doc, args):
    v = parse_form(_payload(doc, "form"), _ppath(doc))
    if not v.ring.is_integers or v.eps != 1 or not v.is_nondegenerate:
        raise InputError("cancel-check needs a nondegenerate form over Z with epsilon = 1", _ppath(doc))
    verdict = lmonoid.strict_cancellation_check(v, order_cap=args.order_cap)
    return verdict.to_json(), (EXIT_OK if verdict.holds else EXIT_UNKNOWN)


def cmd_stabilize(doc, args):
    x = parse_quasi_formation(_payload(doc, "quasiformation"), _ppath(doc))
    if not x.ring.is_integers:
        raise InputError("stabilisation is computed over Z", _ppath(doc))
    r = lmonoid.stabilize_until_elementary(x, k_max=args.stab_cap)
    if r.status == "Yes":
        return {"status": "Yes", "k": r.k, "certificate": r.certificate.to_json()}, EXIT_OK
    return {"status": "Unknown", "note": r.note}, EXIT_UNKNOWN


COMMANDS = {
    "snf": (cmd_snf, "Smith normal form of an integer matrix"),
    "boundary": (cmd_boundary, "linking form on the cokernel of a nondegenerate form"),
    "glue": (cmd_glue, "union of two forms along a boundary isomorphism"),
    "split": (cmd_split, "split a simple form along a summand"),
    "b": (cmd_b, "the two boundary forms of a quasi-formation"),
    "delta": (cmd_delta, "boundary-isomorphism class of a quasi-formation"),
    "kappa": (cmd_kappa, "Witt class of the glued form of a boundary isomorphism"),
    "elementary": (cmd_elementary, "decide elementarity of a quasi-formation"),
    "sbaut": (cmd_sbaut, "orbits of boundary automorphisms of a form"),
    "cancel-check": (cmd_cancel_check, "sufficient criteria for strict cancellation"),
    "stabilize": (cmd_stabilize, "stabilise by hyperbolic boundaries until elementary"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="surgerykit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("inputs", nargs="*", default=["-"], help="document paths ('-' for stdin)")
        sp.add_argument("--budget", type=int, default=100_000, help="search budget")
        sp.add_argument("--stab-cap", type=int, default=3, help="largest stabilisation tried")
        sp.add_argument("--order-cap", type=int, default=linking.DEFAULT_ORDER_CAP,
                        help="largest linking group enumerated")
        sp.add_argument("--format", choices=["json"], default="json")
    return parser


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    func = COMMANDS[args.command][0]
    reports = []
    code = EXIT_OK
    for src in args.inputs or ["-"]:
        try:
            doc = load_document(src)
            report, c = func(doc, args)
        except InputError as exc:
            report, c = {"error": str(exc), "path": exc.path, "input": src}, EXIT_INVALID
        except forms.BudgetExceeded as exc:
            report, c = {"error": str(exc), "status": "Unknown", "input": src}, EXIT_UNKNOWN
        report = dict(report, format_version=FORMAT_VERSION)
        reports.append(report)
        code = max(code, c)
    print(dumps(reports[0] if len(reports) == 1 else reports), file=out)
    return code


def main() -> None:
    sys.exit(run())
