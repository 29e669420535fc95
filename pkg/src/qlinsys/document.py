"""JSON interchange format for system records.

A document looks like::

    {
      "formatVersion": 1,
      "representation": "annihilation",
      "dimensions": {"n": 1, "m": 1},
      "matrices": {
        "F": [
          [[-0.5, 0.0]]
        ],
        ...
      },
      "metadata": {}
    }

Complex entries are ``[re, im]`` pairs; quadrature matrices hold plain
reals. :func:`emit_document` writes a canonical layout (one matrix row per
line, shortest round-trip float repr) so ``emit(parse(text)) == text`` for
canonical input.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError
from .model import AnnihilationQsde, GeneralQsde, PhysicalParameters, QuadratureQsde
from .synthesis import Completion, HinfController, HinfPlant

FORMAT_VERSION = 1


def _shapes_general(d):
    n, m = d["n"], d["m"]
    return {"F": (2 * n, 2 * n), "G": (2 * n, 2 * m), "H": (2 * m, 2 * n), "K": (2 * m, 2 * m)}


def _shapes_annihilation(d):
    n, m = d["n"], d["m"]
    return {"F": (n, n), "G": (n, m), "H": (m, n), "K": (m, m)}


def _shapes_quadrature(d):
    n, m = d["n"], d["m"]
    return {"A": (2 * n, 2 * n), "B": (2 * n, 2 * m), "C": (2 * m, 2 * n),
            "D": (2 * m, 2 * m), "ThetaTilde": (2 * n, 2 * n)}


def _shapes_plant(d):
    n, m0, m1, m2, p1, p2 = (d[k] for k in ("n", "m0", "m1", "m2", "p1", "p2"))
    return {"F": (n, n), "G0": (n, m0), "G1": (n, m1), "G2": (n, m2), "H1": (p1, n),
            "H2": (p2, n), "K12": (p1, m2), "K20": (p2, m0), "K21": (p2, m1)}


def _shapes_controller(d):
    nc, p2, m2 = d["nc"], d["p2"], d["m2"]
    shapes = {"Fc": (nc, nc), "Gc": (nc, p2), "Hc": (m2, nc)}
    if "w0" in d:
        w0, w1, q0 = d["w0"], d["w1"], d["q0"]
        shapes.update({"Gc0": (nc, w0), "Gc1": (nc, w1), "Hc0": (q0, nc),
                       "Hc1": (p2, nc), "Kc": (m2, w0), "Kc0": (q0, w1), "Kc1": (p2, p2),
                       "Theta1": (nc, nc)})
    return shapes


def _shapes_parameters(d):
    n, m = d["n"], d["m"]
    return {"S": (m, m), "M": (2 * n, 2 * n), "N": (2 * m, 2 * n), "T": (2 * n, 2 * n),
            "M1": (n, n), "N1": (m, n), "Theta1": (n, n)}


SCHEMAS = {
    # representation: (dimension keys, shape function, required, optional groups)
    "general": (("n", "m"), _shapes_general, ("F", "G", "H", "K")),
    "annihilation": (("n", "m"), _shapes_annihilation, ("F", "G", "H", "K")),
    "quadrature": (("n", "m"), _shapes_quadrature, ("A", "B", "C", "D")),
    "plant": (("n", "m0", "m1", "m2", "p1", "p2"), _shapes_plant, HinfPlant.NAMES),
    "controller": (("nc", "p2", "m2"), _shapes_controller, ("Fc", "Gc", "Hc")),
    "parameters": (("n", "m"), _shapes_parameters, ("S",)),
}

COMPLETION_DIMS = ("w0", "w1", "q0")
GENERAL_PARAMS = ("M", "N")
ANNIHILATION_PARAMS = ("M1", "N1", "Theta1")


@dataclass(eq=False)
class SystemDocument:
    representation: str
    dimensions: dict
    matrices: dict
    metadata: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, SystemDocument):
            return NotImplemented
        if (self.representation, self.dimensions, self.metadata) != \
                (other.representation, other.dimensions, other.metadata):
            return False
        if list(self.matrices) != list(other.matrices):
            return False
        return all(self.matrices[k].shape == other.matrices[k].shape
                   and np.array_equal(self.matrices[k], other.matrices[k])
                   for k in self.matrices)

    @property
    def is_real(self) -> bool:
        return self.representation == "quadrature"


# -- parsing -----------------------------------------------------------------------

def _line_of(text, key):
    needle = json.dumps(key) + ":"
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return None


def _reject_constant(name):
    raise ValueError(f"non-finite number {name}")


def _parse_matrix(name, raw, shape, real, text):
    rows, cols = shape
    line = _line_of(text, name)

    def fail(msg):
        raise SchemaError(msg, field=f"matrices.{name}", line=line)

    if not isinstance(raw, list):
        fail("matrix must be a list of rows")
    if len(raw) == 0 and rows == 0:
        return np.zeros((0, cols), dtype=float if real else complex)
    if len(raw) != rows:
        fail(f"expected {rows} rows, got {len(raw)}")
    out = np.zeros((rows, cols), dtype=float if real else complex)
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != cols:
            fail(f"row {i} must have {cols} entries")
        for j, entry in enumerate(row):
            if real:
                if isinstance(entry, bool) or not isinstance(entry, (int, float)):
                    fail(f"entry ({i},{j}) must be a real number")
                val = float(entry)
                if not math.isfinite(val):
                    fail(f"entry ({i},{j}) is not finite")
                out[i, j] = val
            else:
                if (not isinstance(entry, list) or len(entry) != 2
                        or any(isinstance(x, bool) or not isinstance(x, (int, float))
                               for x in entry)):
                    fail(f"entry ({i},{j}) must be a [re, im] pair")
                re, im = float(entry[0]), float(entry[1])
                if not (math.isfinite(re) and math.isfinite(im)):
                    fail(f"entry ({i},{j}) is not finite")
                out[i, j] = complex(re, im)
    return out


def parse_document(text: str) -> SystemDocument:
    """Parse and validate a system document.

    Raises :class:`SchemaError` naming the offending field (and line, where
    it can be located).
    """
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    if not isinstance(data, dict):
        raise SchemaError("document must be a JSON object")
    if data.get("formatVersion") != FORMAT_VERSION:
        raise SchemaError(f"formatVersion must be {FORMAT_VERSION}", field="formatVersion",
                          line=_line_of(text, "formatVersion"))
    rep = data.get("representation")
    if rep not in SCHEMAS:
        raise SchemaError(f"unknown representation {rep!r}", field="representation",
                          line=_line_of(text, "representation"))
    dim_keys, shape_fn, required = SCHEMAS[rep]

    dims = data.get("dimensions")
    if not isinstance(dims, dict):
        raise SchemaError("dimensions must be an object", field="dimensions")
    allowed = set(dim_keys) | (set(COMPLETION_DIMS) if rep == "controller" else set())
    for key, val in dims.items():
        if key not in allowed:
            raise SchemaError(f"unexpected dimension {key!r}", field=f"dimensions.{key}",
                              line=_line_of(text, "dimensions"))
        if isinstance(val, bool) or not isinstance(val, int) or val < 0:
            raise SchemaError("dimension must be a non-negative integer",
                              field=f"dimensions.{key}", line=_line_of(text, "dimensions"))
    for key in dim_keys:
        if key not in dims:
            raise SchemaError("missing dimension", field=f"dimensions.{key}",
                              line=_line_of(text, "dimensions"))
    if rep == "controller" and any(k in dims for k in COMPLETION_DIMS) \
            and not all(k in dims for k in COMPLETION_DIMS):
        raise SchemaError("completion dimensions w0, w1, q0 go together", field="dimensions")

    raw_mats = data.get("matrices")
    if not isinstance(raw_mats, dict):
        raise SchemaError("matrices must be an object", field="matrices")
    shapes = shape_fn(dims)
    needed = list(required)
    if rep == "controller" and "w0" in dims:
        needed += list(Completion.NAMES)
    if rep == "parameters":
        if all(k in raw_mats for k in ANNIHILATION_PARAMS):
            needed += list(ANNIHILATION_PARAMS)
        else:
            needed += list(GENERAL_PARAMS)
    for name in needed:
        if name not in raw_mats:
            raise SchemaError("missing required matrix", field=f"matrices.{name}",
                              line=_line_of(text, "matrices"))
    matrices = {}
    for name, raw in raw_mats.items():
        if name not in shapes:
            raise SchemaError("unexpected matrix", field=f"matrices.{name}",
                              line=_line_of(text, name))
        matrices[name] = _parse_matrix(name, raw, shapes[name], rep == "quadrature", text)

    meta = data.get("metadata", {})
    if not isinstance(meta, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in meta.items()):
        raise SchemaError("metadata must map strings to strings", field="metadata",
                          line=_line_of(text, "metadata"))
    extra = set(data) - {"formatVersion", "representation", "dimensions", "matrices",
                         "metadata"}
    if extra:
        key = sorted(extra)[0]
        raise SchemaError("unexpected top-level field", field=key, line=_line_of(text, key))
    return SystemDocument(rep, dict(dims), matrices, dict(meta))


# -- emitting ----------------------------------------------------------------------

def _num(x: float) -> str:
    return json.dumps(float(x))


def _emit_row(row, real):
    if real:
        return "[" + ", ".join(_num(x) for x in row) + "]"
    return "[" + ", ".join(f"[{_num(z.real)}, {_num(z.imag)}]" for z in row) + "]"


def _emit_matrix(mat, real, indent):
    if mat.shape[0] == 0:
        return "[]"
    pad = " " * (indent + 2)
    rows = (pad + _emit_row(r, real) for r in mat)
    return "[\n" + ",\n".join(rows) + "\n" + " " * indent + "]"


def emit_document(doc: SystemDocument) -> str:
    real = doc.is_real
    lines = [
        "{",
        f'  "formatVersion": {FORMAT_VERSION},',
        f'  "representation": {json.dumps(doc.representation)},',
        f'  "dimensions": {json.dumps(doc.dimensions)},',
    ]
    if doc.matrices:
        lines.append('  "matrices": {')
        items = list(doc.matrices.items())
        for i, (name, mat) in enumerate(items):
            sep = "," if i < len(items) - 1 else ""
            lines.append(f"    {json.dumps(name)}: {_emit_matrix(mat, real, 4)}{sep}")
        lines.append("  },")
    else:
        lines.append('  "matrices": {},')
    lines.append(f'  "metadata": {json.dumps(doc.metadata)}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def read_document(path) -> SystemDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read())


def write_document(doc: SystemDocument, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_document(doc))


# -- library objects <-> documents ------------------------------------------------------

def to_object(doc: SystemDocument):
    """Convert a document into the corresponding library record.

    ``general`` documents are loaded without enforcing the doubled
    structure so that checks can report it as a failed condition.
    """
    mats = doc.matrices
    rep = doc.representation
    if rep == "general":
        return GeneralQsde(mats["F"], mats["G"], mats["H"], mats["K"], strict=False)
    if rep == "annihilation":
        return AnnihilationQsde(mats["F"], mats["G"], mats["H"], mats["K"])
    if rep == "quadrature":
        return QuadratureQsde(mats["A"], mats["B"], mats["C"], mats["D"])
    if rep == "plant":
        return HinfPlant(**{k: mats[k] for k in HinfPlant.NAMES})
    if rep == "controller":
        completion = None
        if "Gc0" in mats:
            completion = Completion(**{k: mats[k] for k in Completion.NAMES},
                                    theta1=mats.get("Theta1"))
        return HinfController(mats["Fc"], mats["Gc"], mats["Hc"], completion)
    if rep == "parameters":
        if "M1" in mats:
            return {k: mats[k] for k in ("S", "M1", "N1", "Theta1")}
        return PhysicalParameters(mats["S"], mats["M"], mats["N"], mats.get("T"))
    raise SchemaError(f"unknown representation {rep!r}")


def from_object(obj, metadata=None, theta_tilde=None) -> SystemDocument:
    """Build a document from a library record."""
    meta = dict(metadata or {})
    if isinstance(obj, GeneralQsde):
        return SystemDocument("general", {"n": obj.n, "m": obj.m},
                              dict(zip("FGHK", obj.matrices())), meta)
    if isinstance(obj, AnnihilationQsde):
        return SystemDocument("annihilation", {"n": obj.n, "m": obj.m},
                              dict(zip("FGHK", obj.matrices())), meta)
    if isinstance(obj, QuadratureQsde):
        mats = dict(zip("ABCD", obj.matrices()))
        if theta_tilde is not None:
            mats["ThetaTilde"] = np.asarray(theta_tilde, dtype=float)
        return SystemDocument("quadrature", {"n": obj.n, "m": obj.m}, mats, meta)
    if isinstance(obj, HinfPlant):
        return SystemDocument("plant", obj.dims, {k: getattr(obj, k) for k in obj.NAMES},
                              meta)
    if isinstance(obj, HinfController):
        dims = {"nc": obj.Fc.shape[0], "p2": obj.Gc.shape[1], "m2": obj.Hc.shape[0]}
        mats = {"Fc": obj.Fc, "Gc": obj.Gc, "Hc": obj.Hc}
        c = obj.completion
        if c is not None:
            dims.update(w0=c.Gc0.shape[1], w1=c.Gc1.shape[1], q0=c.Hc0.shape[0])
            mats.update({k: getattr(c, k) for k in Completion.NAMES})
            if c.theta1 is not None:
                mats["Theta1"] = c.theta1
        return SystemDocument("controller", dims, mats, meta)
    if isinstance(obj, PhysicalParameters):
        return SystemDocument("parameters", {"n": obj.n, "m": obj.m},
                              {"S": obj.S, "M": obj.M, "N": obj.N, "T": obj.T}, meta)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
