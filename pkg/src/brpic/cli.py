"""Command-line entry point: ``brpic <command> ...``.

Exit codes: 0 success, 1 check failed / bad input, 2 size or memory guard,
3 hypothesis of the order formula not met, 64 command-line usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from math import comb

import numpy as np

from .brpic import brpic_report, center_profile
from .errors import BrPicError, DocumentError, SizeGuardExceeded, UnidentifiedCase
from .extraspecial import ExtraSpecialSpec, expected_result, kappa_class, omega_class, stab_d_generators
from .forms import SymForm, WedgeForm, interior_derivation
from .gfp import FpVector, PrimeField, PrimeFieldMatrix, all_vectors, check_gl_guard, rank
from .h3 import (H3Class, beta_map, connecting_delta, explicit_representative, h3_basis, h3_dim,
                 two_cocycle_class)
from .io import dumps, form_to_dict, load_form, load_lie
from .lie import autm_stab_report, check_invariant, killing_form, omega_from_metric
from .stab import brute_force_stabilizer, closure, default_workers

EXIT_USAGE = 64


# ---------------------------------------------------------------------------
# ASCII rendering
# ---------------------------------------------------------------------------

def _coef(c, mono):
    return mono if c == 1 else f"{c}*{mono}"


def render_wedge(w: WedgeForm, names=None):
    names = names or [str(i) for i in range(w.n)]
    terms = [_coef(c, "^".join(f"x{names[i]}" for i in key)) for key, c in w.coeffs.items()]
    return " + ".join(terms) or "0"


def render_sym(s: SymForm, names=None, letter="z"):
    names = names or [str(i) for i in range(s.n)]
    terms = []
    for key, c in s.coeffs.items():
        powers = {}
        for i in key:
            powers[i] = powers.get(i, 0) + 1
        mono = "*".join(f"{letter}{names[i]}" + ("" if e == 1 else f"^{e}") for i, e in powers.items())
        terms.append(_coef(c, mono))
    return " + ".join(terms) or "0"


def render_class(omega: H3Class, names=None):
    if omega.p == 2:
        return "[" + render_sym(omega.coset.representative, names, letter="x") + "]"
    return f"({render_wedge(omega.alt, names)}, {render_sym(omega.sym, names)})"


def render_kappa(kappa):
    names = [str(i + 1) for i in range(kappa.n)]
    terms = [_coef(c, f"x{names[i]}x{names[j]}") for (i, j), c in kappa.wedge.coeffs.items()]
    for i, c in enumerate(kappa.carry):
        if c:
            terms.append(_coef(c, f"x{names[i]}^2" if kappa.field.p == 2 else f"y{names[i]}"))
    return " + ".join(terms) or "0"


def table(rows):
    """Two-column ASCII table."""
    rows = [(str(k), str(v)) for k, v in rows]
    wk = max(len(k) for k, _ in rows)
    wv = max(len(v) for _, v in rows)
    line = "+" + "-" * (wk + 2) + "+" + "-" * (wv + 2) + "+"
    body = [f"| {k.ljust(wk)} | {v.ljust(wv)} |" for k, v in rows]
    return "\n".join([line] + body + [line])


def emit(args, doc, rows):
    if args.json:
        sys.stdout.write(dumps(doc))
    else:
        print(table(rows))


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _workers(args):
    return args.workers if args.workers is not None else default_workers()


def _stab_rows(rep):
    rows = [("order", f"{rep.order:,}"), ("method", rep.method)]
    if rep.named_match:
        name, d, order = rep.named_match
        rows.append(("order-consistent with", f"{name}_{d} (order {order:,})"))
    elif rep.candidates:
        rows.append(("order-consistent with", ", ".join(f"{n}_{d}" for n, d, _ in rep.candidates)))
    rows += [("backend", rep.backend), ("workers", rep.workers), ("order id", rep.order_id)]
    return rows


def _load_gens(path, field, n):
    try:
        doc = json.loads(open(path, encoding="utf-8").read())
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    mats = doc.get("matrices") if isinstance(doc, dict) else doc
    if not isinstance(mats, list) or not mats:
        raise DocumentError(f"{path}: expected a non-empty list of matrices under 'matrices'")
    out = []
    for t, m in enumerate(mats):
        a = np.asarray(m)
        if a.shape != (n, n):
            raise DocumentError(f"{path}: $.matrices[{t}]: expected a {n}x{n} matrix")
        out.append(PrimeFieldMatrix(field, a))
    return out


def _parse_expect(text):
    if text is None:
        return None
    name, _, d = text.partition(":")
    return name, int(d)


def _run_stab(args, omega, gens=None):
    backend = getattr(args, "backend", None)
    if args.method == "closure":
        if gens is None:
            raise DocumentError("--method closure needs --gens")
        return closure(gens, omega, max_bytes=args.max_bytes, backend=backend,
                       expected_name=_parse_expect(args.expect))
    return brute_force_stabilizer(omega, workers=_workers(args), max_order=args.max_order, backend=backend,
                                  expected_name=_parse_expect(args.expect))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_h3(args):
    F = PrimeField(args.p)
    n = args.n
    basis = h3_basis(F, n)
    doc = {"p": F.p, "n": n, "dim": h3_dim(F, n), "basis": [render_class(b) for b in basis]}
    rows = [("p", F.p), ("n", n), ("dim H^3(V_n, k^x)", doc["dim"])]
    if F.p == 2:
        doc.update(sym3=comb(n + 2, 3), relations=comb(n, 2))
        rows += [("dim Sym^3", doc["sym3"]), ("dim R", doc["relations"])]
    else:
        images = [connecting_delta(WedgeForm.basis(F, n, k)).mixed_array().ravel().tolist()
                  for k in WedgeForm.basis_keys(n, 2)]
        doc.update(alt=comb(n, 3), sym=comb(n + 1, 2), delta_rank=rank(images, F.p) if images else 0)
        rows += [("alt (wedge^3)", doc["alt"]), ("sym (Sym^2)", doc["sym"]), ("rank of delta", doc["delta_rank"])]
    rows.append(("basis", ", ".join(doc["basis"])))
    emit(args, doc, rows)
    return 0


def cmd_stab(args):
    omega = load_form(args.form)
    gens = _load_gens(args.gens, omega.field, omega.n) if args.gens else None
    try:
        rep = _run_stab(args, omega, gens)
    except SizeGuardExceeded as exc:
        print(f"error: {exc}\nhint: use --method closure with --gens, or raise --max-order", file=sys.stderr)
        return exc.exit_code
    doc = dict(rep.to_dict(), omega=render_class(omega))
    emit(args, doc, [("omega", doc["omega"])] + _stab_rows(rep))
    return 0


def cmd_brpic(args):
    omega = load_form(args.form)
    prof = center_profile(omega)
    if prof.rad_dim:
        if args.json:
            sys.stdout.write(dumps({"error": "NondegenerateRequired", "profile": prof.to_dict()}))
        print(f"refused: omega_alt has a {prof.rad_dim}-dimensional radical, so the Brauer-Picard order "
              f"formula does not apply (|Inv(Z)| = {prof.inv_center_order:,}).", file=sys.stderr)
        return 3
    gens = _load_gens(args.gens, omega.field, omega.n) if args.gens else None
    rep = brpic_report(omega, stab=_run_stab(args, omega, gens))
    doc = dict(rep.to_dict(), omega=render_class(omega))
    rows = [("omega", doc["omega"]), ("rad_dim", prof.rad_dim), ("|Inv(Z)|", f"{prof.inv_center_order:,}"),
            ("center pointed", prof.is_center_pointed), ("Pt Lagrangian", prof.pt_is_lagrangian),
            ("|Stab|", f"{rep.stab.order:,}"), ("kernel exponent", rep.kernel_exponent),
            ("|image of induction|", f"{rep.induction_image_order:,}"), ("|BrPic|", f"{rep.brpic_order:,}"),
            ("order id", rep.stab.order_id)]
    emit(args, doc, rows)
    return 0


def cmd_extraspecial(args):
    spec = ExtraSpecialSpec(args.p, args.n, args.type)
    kappa = kappa_class(spec)
    omega = omega_class(spec)
    doc = {"p": spec.p, "n": spec.n, "type": spec.kind, "kappa": render_kappa(kappa),
           "omega": render_class(omega), "form": form_to_dict(omega)}
    rows = [("group", f"{spec.kind}, order {spec.p}^{2 * spec.n + 1}"), ("kappa", doc["kappa"]),
            ("omega", doc["omega"])]
    try:
        exp = expected_result(spec)
        doc["expected"] = exp.to_dict()
        rows.append(("expected Stab", f"{exp.label}, order {exp.order:,}"))
    except UnidentifiedCase as exc:
        exp = None
        doc["expected"] = None
        rows.append(("expected Stab", f"none named ({exc})"))
    code = 0
    if args.verify:
        t0 = time.perf_counter()
        prefer = (exp.name, exp.dim) if exp else None
        try:
            check_gl_guard(omega.field, omega.n, args.max_order)
            rep = brute_force_stabilizer(omega, workers=_workers(args), max_order=args.max_order,
                                         backend=args.backend, expected_name=prefer)
        except SizeGuardExceeded as exc:
            if spec.p == 2 or spec.kind != "D":
                print(f"error: {exc}", file=sys.stderr)
                return exc.exit_code
            rep = closure(stab_d_generators(spec), omega, max_bytes=args.max_bytes, expected=exp.order,
                          backend=args.backend, expected_name=prefer)
        elapsed = time.perf_counter() - t0
        doc["stab"] = rep.to_dict()
        doc["seconds"] = round(elapsed, 3)
        rows += _stab_rows(rep)
        if exp is not None:
            ok = rep.order == exp.order
            doc["verdict"] = "PASS" if ok else "FAIL"
            rows.append(("verdict", f"{doc['verdict']} ({rep.order:,} {'=' if ok else '!='} {exp.order:,})"))
            code = 0 if ok else 1
        else:
            doc["verdict"] = "COMPUTED"
            rows.append(("verdict", "computed, no named target to compare"))
    if args.save_form:
        with open(args.save_form, "w", encoding="utf-8") as fh:
            fh.write(dumps(form_to_dict(omega)))
    emit(args, doc, rows)
    return code


def cmd_lie(args):
    ldoc = load_lie(args.file, p=args.p)
    g = ldoc.algebra
    names = list(g.names)
    B = ldoc.form
    if B is not None:
        check_invariant(g, B)
    else:
        B = killing_form(g)
    omega = omega_from_metric(g, B)
    doc = {"p": g.field.p, "dim": g.dim, "basis": names, "form": [list(r) for r in B.matrix],
           "form_nondegenerate": B.is_nondegenerate(), "omega": render_class(omega, names)}
    rows = [("p", g.field.p), ("basis", ", ".join(names)),
            ("form" if ldoc.form is not None else "Killing form", str([list(r) for r in B.matrix])),
            ("nondegenerate", doc["form_nondegenerate"]), ("omega^g", doc["omega"])]
    if args.verify:
        rep = autm_stab_report(g, B, workers=_workers(args), max_order=args.max_order, backend=args.backend)
        doc["stab"] = rep.stab.to_dict()
        doc["brpic_order"] = rep.brpic_order
        rows += _stab_rows(rep.stab) + [("|BrPic|", f"{rep.brpic_order:,}")]
    emit(args, doc, rows)
    return 0


def _random_class(F, n, rng):
    if F.p == 2:
        return H3Class.from_cubic(SymForm(F, n, 3, {k: rng.randrange(2) for k in SymForm.basis_keys(n, 3)}))
    alt = WedgeForm(F, n, 3, {k: rng.randrange(F.p) for k in WedgeForm.basis_keys(n, 3)})
    sym = SymForm(F, n, 2, {k: rng.randrange(F.p) for k in SymForm.basis_keys(n, 2)})
    return H3Class(F, n, alt, sym)


def beta_sweep(p, n, samples=None, seed=0):
    """(checked, mismatches) for the beta-class identity.

    Without ``samples``: every basis class against every vector.  With it:
    that many random (class, vector) pairs.
    """
    F = PrimeField(p)
    mismatches = []
    if samples is None:
        pairs = [(b, v) for b in h3_basis(F, n) for v in all_vectors(F, n)]
    else:
        rng = random.Random(seed)
        pairs = []
        for _ in range(samples):
            pairs.append((_random_class(F, n, rng), FpVector(F, [rng.randrange(p) for _ in range(n)])))
    cache = {}
    for omega, v in pairs:
        rep = cache.get(omega) or cache.setdefault(omega, explicit_representative(omega))
        got = two_cocycle_class(beta_map(v, rep))
        if got != interior_derivation(v, omega.omega_alt):
            mismatches.append((omega, v, got))
    return len(pairs), mismatches


def cmd_beta_check(args):
    checked, bad = beta_sweep(args.p, args.n, args.samples, args.seed)
    doc = {"p": args.p, "n": args.n, "checked": checked, "mismatches": len(bad),
           "verdict": "PASS" if not bad else "FAIL",
           "failures": [{"omega": render_class(o), "v": list(v), "class": render_wedge(c)} for o, v, c in bad[:20]]}
    rows = [("p", args.p), ("n", args.n), ("pairs checked", checked), ("mismatches", len(bad)),
            ("verdict", doc["verdict"])]
    rows += [(f"mismatch {i}", f"omega={f['omega']} v={f['v']}") for i, f in enumerate(doc["failures"])]
    emit(args, doc, rows)
    return 0 if not bad else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _search_flags(sp, closure_ok=True):
    sp.add_argument("--workers", type=int, default=None,
                    help="parallel sweep partitions (default: $BRPIC_WORKERS, else CPU count)")
    sp.add_argument("--backend", choices=["numba", "numpy"], default=None,
                    help="kernel implementation (default: numba unless BRPIC_DISABLE_NUMBA is set)")
    sp.add_argument("--max-order", type=int, default=None, help="raise the GL sweep size guard")
    if closure_ok:
        sp.add_argument("--max-bytes", type=float, default=2e8, help="closure memory guard in bytes")


def build_parser():
    ap = _Parser(prog="brpic", description="Stabilizers and Brauer-Picard orders for C(V_n, omega).")
    ap.add_argument("--json", action="store_true", help="print one JSON document instead of a table")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    json_flag = _Parser(add_help=False)
    json_flag.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                           help="print one JSON document instead of a table")

    sp = sub.add_parser("h3", parents=[json_flag], help="dimensions and basis of H^3(V_n, k^x)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_h3)

    for name, func, helptext in (("stab", cmd_stab, "stabilizer of a class"),
                                 ("brpic", cmd_brpic, "center profile and Brauer-Picard order")):
        sp = sub.add_parser(name, parents=[json_flag], help=helptext)
        sp.add_argument("form", help="*.form.json document")
        sp.add_argument("--method", choices=["brute", "closure"], default="brute")
        sp.add_argument("--gens", help="JSON file with {'matrices': [...]} for --method closure")
        sp.add_argument("--expect", help="zoo entry NAME:DIM to report the order match against")
        _search_flags(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("extraspecial", parents=[json_flag], help="classes of an extra-special p-group")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--type", choices=["D", "Q"], required=True)
    sp.add_argument("--verify", action="store_true", help="compute the stabilizer and compare orders")
    sp.add_argument("--save-form", help="write omega as a form document")
    _search_flags(sp)
    sp.set_defaults(func=cmd_extraspecial)

    sp = sub.add_parser("lie", parents=[json_flag], help="omega^g of a metric Lie algebra")
    sp.add_argument("file", help="*.lie.json document")
    sp.add_argument("--p", type=int, default=None, help="override the document's prime")
    sp.add_argument("--verify", action="store_true", help="compute the stabilizer by exhaustive search")
    _search_flags(sp, closure_ok=False)
    sp.set_defaults(func=cmd_lie)

    sp = sub.add_parser("beta-check", parents=[json_flag], help="compare beta-classes with interior derivations")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=None, help="random pairs instead of the exhaustive sweep")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_beta_check)
    return ap


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    json_flag = args.json
    try:
        return args.func(args)
    except BrPicError as exc:
        if json_flag:
            sys.stdout.write(dumps({"error": type(exc).__name__, "message": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
