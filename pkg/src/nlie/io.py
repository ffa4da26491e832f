"""Read and write the JSON documents the command line speaks.

Algebra documents carry a format tag "nlie/1", matrix documents
"nlie-matrix/1".  Files use 1-based basis indices and rational strings
("5", "-2/3"); in-memory objects use 0-based indices and Fractions.
The conversion happens here and nowhere else.

Parsing is strict by default: rational strings must be reduced with a
positive denominator, index tuples ascending.  Lenient mode instead
normalizes unreduced rationals and sorts permuted index tuples with the
antisymmetry sign.  Duplicate index tuples and repeated indices are
rejected in both modes.
"""

import json
from fractions import Fraction
from typing import List, Union

from .algebra import Algebra, sort_with_sign
from .errors import InvalidAlgebra, ParseError, SchemaError
from .exactlin import Matrix

ALGEBRA_FORMAT = "nlie/1"
MATRIX_FORMAT = "nlie-matrix/1"

Text = Union[str, bytes]


def _format_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _parse_rational(raw, field: str, lenient: bool) -> Fraction:
    if not isinstance(raw, str):
        raise SchemaError(field, "rational must be a string")
    try:
        value = Fraction(raw)
    except (ValueError, ZeroDivisionError):
        value = None
        if lenient and raw.count("/") == 1:
            num, _, den = raw.partition("/")
            try:
                value = Fraction(int(num.strip()), int(den.strip()))
            except (ValueError, ZeroDivisionError):
                value = None
        if value is None:
            raise SchemaError(field, f"not a rational: {raw!r}") from None
    if not lenient and raw != _format_rational(value):
        raise SchemaError(field, f"rational not reduced: {raw!r}")
    return value


def _reject_duplicate_keys(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise SchemaError(key, "duplicate key in object")
        out[key] = value
    return out


def _load_json(data: Text, what: str):
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"{what} is not valid UTF-8") from exc
    try:
        return json.loads(data, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None


def _expect_format(doc, want: str) -> None:
    got = doc.get("format")
    if got != want:
        raise SchemaError("format", f"expected {want!r}, got {got!r}")


def _positive_int(doc, field: str) -> int:
    value = doc.get(field)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise SchemaError(field, "must be a positive integer")
    return value


def parse_algebra(data: Text, *, lenient: bool = False) -> Algebra:
    """Parse an algebra document; raises ParseError or SchemaError."""
    doc = _load_json(data, "algebra document")
    if not isinstance(doc, dict):
        raise SchemaError("document", "top level must be an object")
    _expect_format(doc, ALGEBRA_FORMAT)
    arity = _positive_int(doc, "arity")
    dim = _positive_int(doc, "dim")
    if doc.get("field") != "Q":
        raise SchemaError("field", 'only rational coefficients ("Q") are supported')
    brackets = doc.get("brackets")
    if not isinstance(brackets, list):
        raise SchemaError("brackets", "must be a list")
    table = {}
    seen = set()
    for pos, entry in enumerate(brackets):
        where = f"brackets[{pos}]"
        if not isinstance(entry, dict):
            raise SchemaError(where, "must be an object")
        idx = entry.get("indices")
        if not isinstance(idx, list) or not all(
                isinstance(i, int) and not isinstance(i, bool) for i in idx):
            raise SchemaError(f"{where}.indices", "must be a list of integers")
        if len(idx) != arity:
            raise SchemaError(f"{where}.indices",
                              f"need {arity} indices, got {len(idx)}")
        if any(i < 1 or i > dim for i in idx):
            raise SchemaError(f"{where}.indices",
                              f"index out of range 1..{dim}")
        if list(idx) == sorted(set(idx)):
            key, sign = tuple(i - 1 for i in idx), 1
        elif not lenient:
            raise SchemaError(f"{where}.indices", "indices not ascending")
        else:
            key, sign = sort_with_sign([i - 1 for i in idx])
            if key is None:
                raise SchemaError(f"{where}.indices", "repeated index")
        if key in seen:
            raise SchemaError(f"{where}.indices", "duplicate index tuple")
        seen.add(key)
        coeffs = entry.get("coeffs", {})
        if not isinstance(coeffs, dict):
            raise SchemaError(f"{where}.coeffs", "must be an object")
        vec = [Fraction(0)] * dim
        for rawkey, rawval in coeffs.items():
            cfield = f"{where}.coeffs[{rawkey!r}]"
            try:
                basis = int(rawkey)
            except ValueError:
                raise SchemaError(cfield, "key must be a basis index") from None
            if not lenient and rawkey != str(basis):
                raise SchemaError(cfield, "key must be a plain integer string")
            if basis < 1 or basis > dim:
                raise SchemaError(cfield, f"basis index out of range 1..{dim}")
            vec[basis - 1] = sign * _parse_rational(rawval, cfield, lenient)
        if any(vec):
            table[key] = tuple(vec)
    try:
        return Algebra(arity, dim, table)
    except InvalidAlgebra as exc:
        raise SchemaError("document", str(exc)) from exc


def serialize_algebra(a: Algebra) -> str:
    """Canonical JSON for an algebra; parse_algebra inverts it exactly."""
    brackets = []
    for key, value in a.items():
        coeffs = {str(i + 1): _format_rational(x)
                  for i, x in enumerate(value) if x}
        brackets.append({"indices": [i + 1 for i in key], "coeffs": coeffs})
    doc = {"format": ALGEBRA_FORMAT, "arity": a.arity, "dim": a.dim,
           "field": "Q", "brackets": brackets}
    return json.dumps(doc, indent=2) + "\n"


def parse_matrix(data: Text, *, lenient: bool = False) -> Matrix:
    """Parse a matrix document; raises ParseError or SchemaError."""
    doc = _load_json(data, "matrix document")
    if not isinstance(doc, dict):
        raise SchemaError("document", "top level must be an object")
    _expect_format(doc, MATRIX_FORMAT)
    rows = _positive_int(doc, "rows")
    cols = _positive_int(doc, "cols")
    entries = doc.get("entries")
    if not isinstance(entries, list) or len(entries) != rows:
        raise SchemaError("entries", f"need {rows} rows")
    data_rows: List[List[Fraction]] = []
    for rpos, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != cols:
            raise SchemaError(f"entries[{rpos}]", f"need {cols} columns")
        data_rows.append([_parse_rational(x, f"entries[{rpos}][{cpos}]", lenient)
                          for cpos, x in enumerate(row)])
    return Matrix(data_rows)


def serialize_matrix(m: Matrix) -> str:
    """Canonical JSON for a matrix; parse_matrix inverts it exactly."""
    doc = {"format": MATRIX_FORMAT, "rows": m.rows, "cols": m.cols,
           "entries": [[_format_rational(x) for x in row] for row in m.entries]}
    return json.dumps(doc, indent=2) + "\n"
