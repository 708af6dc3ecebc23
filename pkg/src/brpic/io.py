"""JSON documents for classes (*.form.json) and Lie algebras (*.lie.json).

Form document::

    {"schema": 1, "kind": "form", "p": 3, "n": 3,
     "alt": [{"idx": [0, 1, 2], "c": 1}],
     "sym": [{"idx": [0, 1], "c": 1}]}

with "cubic": [{"idx": [a, b, c], "c": 1}] in place of alt/sym when p = 2.

Lie document::

    {"schema": 1, "kind": "lie", "p": 5, "dim": 3, "basis": ["e", "f", "h"],
     "brackets": [{"i": 0, "j": 1, "terms": [{"k": 2, "c": 1}]}],
     "form": [[...], ...]}          # optional invariant form

Load errors name the JSON path of the offending entry (and line/column for
syntax errors).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BrPicError, DocumentError
from .forms import SymForm, WedgeForm
from .gfp import PrimeField
from .h3 import H3Class

SCHEMA = 1


def _parse(text, source):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def _require(doc, key, path, source, kind=None):
    if key not in doc:
        raise DocumentError(f"{source}: {path}: missing field {key!r}")
    val = doc[key]
    if kind is not None and not isinstance(val, kind) or isinstance(val, bool):
        raise DocumentError(f"{source}: {path}.{key}: expected {getattr(kind, '__name__', kind)}")
    return val


def _header(doc, kind, source):
    if not isinstance(doc, dict):
        raise DocumentError(f"{source}: top level must be an object")
    if doc.get("schema") != SCHEMA:
        raise DocumentError(f"{source}: $.schema: expected {SCHEMA}, got {doc.get('schema')!r}")
    if doc.get("kind", kind) != kind:
        raise DocumentError(f"{source}: $.kind: expected {kind!r}, got {doc.get('kind')!r}")


def _field(doc, source):
    p = _require(doc, "p", "$", source, int)
    try:
        return PrimeField(p)
    except BrPicError as exc:
        raise DocumentError(f"{source}: $.p: {exc}") from None


def _terms(doc, key, length, n, source, strict, allow_equal):
    out = {}
    entries = doc.get(key, [])
    if not isinstance(entries, list):
        raise DocumentError(f"{source}: $.{key}: expected a list")
    for t, entry in enumerate(entries):
        path = f"$.{key}[{t}]"
        if not isinstance(entry, dict):
            raise DocumentError(f"{source}: {path}: expected an object")
        idx = _require(entry, "idx", path, source, list)
        c = _require(entry, "c", path, source, int)
        if len(idx) != length or not all(isinstance(i, int) and 0 <= i < n for i in idx):
            raise DocumentError(f"{source}: {path}.idx: need {length} indices in 0..{n - 1}")
        ordered = all(a < b for a, b in zip(idx, idx[1:])) if not allow_equal else \
            all(a <= b for a, b in zip(idx, idx[1:]))
        if strict and not ordered:
            rel = "<=" if allow_equal else "<"
            raise DocumentError(f"{source}: {path}.idx: indices must satisfy {rel}")
        out[tuple(idx)] = out.get(tuple(idx), 0) + c
    return out


# ---------------------------------------------------------------------------
# forms
# ---------------------------------------------------------------------------

def form_to_dict(omega: H3Class) -> dict:
    doc = {"schema": SCHEMA, "kind": "form", "p": omega.p, "n": omega.n}
    if omega.p == 2:
        doc["cubic"] = [{"idx": list(k), "c": c} for k, c in omega.coset.representative.coeffs.items()]
    else:
        doc["alt"] = [{"idx": list(k), "c": c} for k, c in omega.alt.coeffs.items()]
        doc["sym"] = [{"idx": list(k), "c": c} for k, c in omega.sym.coeffs.items()]
    return doc


def form_from_dict(doc, source="<form>") -> H3Class:
    _header(doc, "form", source)
    F = _field(doc, source)
    n = _require(doc, "n", "$", source, int)
    if n < 1:
        raise DocumentError(f"{source}: $.n: must be positive")
    if F.p == 2:
        if "alt" in doc or "sym" in doc:
            raise DocumentError(f"{source}: p = 2 documents use 'cubic', not alt/sym")
        cubic = _terms(doc, "cubic", 3, n, source, strict=True, allow_equal=True)
        return H3Class.from_cubic(SymForm(F, n, 3, cubic))
    if "cubic" in doc:
        raise DocumentError(f"{source}: odd-p documents use alt/sym, not 'cubic'")
    alt = _terms(doc, "alt", 3, n, source, strict=True, allow_equal=False)
    sym = _terms(doc, "sym", 2, n, source, strict=True, allow_equal=True)
    return H3Class(F, n, WedgeForm(F, n, 3, alt), SymForm(F, n, 2, sym))


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def save_form(omega: H3Class, path):
    Path(path).write_text(dumps(form_to_dict(omega)), encoding="utf-8")


def load_form(path) -> H3Class:
    text = Path(path).read_text(encoding="utf-8")
    return form_from_dict(_parse(text, str(path)), str(path))


# ---------------------------------------------------------------------------
# Lie algebras
# ---------------------------------------------------------------------------

@dataclass
class LieDocument:
    algebra: object          # LieAlgebraFp
    form: object | None      # MetricForm or None

    def to_dict(self):
        g = self.algebra
        brackets = []
        for i in range(g.dim):
            for j in range(i + 1, g.dim):
                terms = [{"k": k, "c": int(c)} for k, c in enumerate(g.structure[i, j]) if c]
                if terms:
                    brackets.append({"i": i, "j": j, "terms": terms})
        doc = {"schema": SCHEMA, "kind": "lie", "p": g.field.p, "dim": g.dim, "basis": list(g.names),
               "brackets": brackets}
        if self.form is not None:
            doc["form"] = [list(r) for r in self.form.matrix]
        return doc

    def __eq__(self, other):
        return (isinstance(other, LieDocument) and self.algebra.field == other.algebra.field
                and np.array_equal(self.algebra.structure, other.algebra.structure)
                and self.algebra.names == other.algebra.names
                and (self.form.matrix if self.form else None) == (other.form.matrix if other.form else None))


def lie_from_dict(doc, source="<lie>", p=None) -> LieDocument:
    """Build and validate a Lie algebra; ``p`` overrides the document's prime."""
    from .lie import LieAlgebraFp, MetricForm

    _header(doc, "lie", source)
    if p is not None:
        doc = dict(doc, p=p)
    F = _field(doc, source)
    dim = _require(doc, "dim", "$", source, int)
    names = doc.get("basis", [])
    if names and (not isinstance(names, list) or len(names) != dim):
        raise DocumentError(f"{source}: $.basis: need {dim} names")
    brackets = {}
    entries = _require(doc, "brackets", "$", source, list)
    for t, entry in enumerate(entries):
        path = f"$.brackets[{t}]"
        i = _require(entry, "i", path, source, int)
        j = _require(entry, "j", path, source, int)
        if not (0 <= i < j < dim):
            raise DocumentError(f"{source}: {path}: need 0 <= i < j < {dim}, got i={i}, j={j}")
        if (i, j) in brackets:
            raise DocumentError(f"{source}: {path}: bracket [{i}, {j}] given twice")
        terms = {}
        for s, term in enumerate(_require(entry, "terms", path, source, list)):
            k = _require(term, "k", f"{path}.terms[{s}]", source, int)
            c = _require(term, "c", f"{path}.terms[{s}]", source, int)
            if not 0 <= k < dim:
                raise DocumentError(f"{source}: {path}.terms[{s}].k: out of range")
            terms[k] = terms.get(k, 0) + c
        brackets[(i, j)] = terms
    try:
        g = LieAlgebraFp.from_brackets(F, dim, brackets, names=tuple(names))
        form = None
        if doc.get("form") is not None:
            form = MetricForm(F, doc["form"])
    except BrPicError as exc:
        raise DocumentError(f"{source}: {exc}") from exc
    return LieDocument(g, form)


def load_lie(path, p=None) -> LieDocument:
    text = Path(path).read_text(encoding="utf-8")
    return lie_from_dict(_parse(text, str(path)), str(path), p=p)


def save_lie(doc: LieDocument, path):
    Path(path).write_text(dumps(doc.to_dict()), encoding="utf-8")


def bundled(name) -> Path:
    """Path of a data file shipped with the package (e.g. "sl2.lie.json")."""
    return Path(__file__).with_name("data") / name
