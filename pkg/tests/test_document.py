import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qlinsys.document import (
    SystemDocument,
    emit_document,
    from_object,
    parse_document,
    read_document,
    to_object,
)
from qlinsys.errors import SchemaError
from qlinsys.model import AnnihilationQsde, GeneralQsde, PhysicalParameters, QuadratureQsde
from qlinsys.synthesis import HinfController, HinfPlant

CAVITY = """{
  "formatVersion": 1,
  "representation": "annihilation",
  "dimensions": {"n": 1, "m": 1},
  "matrices": {
    "F": [
      [[-0.5, 0.0]]
    ],
    "G": [
      [[-1.0, 0.0]]
    ],
    "H": [
      [[1.0, 0.0]]
    ],
    "K": [
      [[1.0, 0.0]]
    ]
  },
  "metadata": {"name": "cavity"}
}
"""


def base_doc(**overrides):
    data = json.loads(CAVITY)
    data.update(overrides)
    return data


def test_cavity_round_trip_bytes():
    doc = parse_document(CAVITY)
    assert doc.representation == "annihilation"
    assert doc.matrices["F"][0, 0] == -0.5
    assert emit_document(doc) == CAVITY


def test_fixture_corpus_round_trip(fixtures_dir):
    paths = sorted(fixtures_dir.glob("*.json"))
    assert len(paths) >= 10
    reps = set()
    for path in paths:
        text = path.read_text()
        doc = parse_document(text)
        reps.add(doc.representation)
        assert emit_document(doc) == text, path.name
        assert parse_document(emit_document(doc)) == doc
    assert reps == {"general", "annihilation", "quadrature", "plant", "controller", "parameters"}


def test_shape_mismatch_names_matrix():
    data = {
        "formatVersion": 1, "representation": "annihilation", "dimensions": {"n": 2, "m": 1},
        "matrices": {"F": [[[0, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [0, 0]]],
                     "G": [[[0, 0]], [[0, 0]]], "H": [[[0, 0], [0, 0]]], "K": [[[1, 0]]]},
    }
    with pytest.raises(SchemaError) as exc:
        parse_document(json.dumps(data, indent=2))
    assert exc.value.field == "matrices.F"
    assert "F" in str(exc.value)


def test_static_system_is_valid():
    text = json.dumps({
        "formatVersion": 1, "representation": "annihilation", "dimensions": {"n": 0, "m": 1},
        "matrices": {"F": [], "G": [], "H": [[]], "K": [[[1.0, 0.0]]]}, "metadata": {},
    })
    sys = to_object(parse_document(text))
    assert isinstance(sys, AnnihilationQsde) and sys.n == 0
    assert sys.G.shape == (0, 1) and sys.H.shape == (1, 0)


@pytest.mark.parametrize("mutate, field", [
    (lambda d: d.pop("formatVersion"), "formatVersion"),
    (lambda d: d.update(formatVersion=2), "formatVersion"),
    (lambda d: d.update(representation="bogus"), "representation"),
    (lambda d: d["dimensions"].pop("m"), "dimensions.m"),
    (lambda d: d["dimensions"].update(n=-1), "dimensions.n"),
    (lambda d: d["matrices"].pop("K"), "matrices.K"),
    (lambda d: d["matrices"].update(Z=[[[0, 0]]]), "matrices.Z"),
    (lambda d: d["matrices"].update(F=[[[-0.5]]]), "matrices.F"),
    (lambda d: d["matrices"].update(F=[[["a", 0]]]), "matrices.F"),
    (lambda d: d.update(metadata={"k": 1}), "metadata"),
    (lambda d: d.update(extra=1), "extra"),
])
def test_schema_errors(mutate, field):
    data = base_doc()
    mutate(data)
    with pytest.raises(SchemaError) as exc:
        parse_document(json.dumps(data, indent=2))
    assert exc.value.field == field


def test_non_finite_rejected():
    text = CAVITY.replace("-0.5, 0.0", "NaN, 0.0")
    with pytest.raises(SchemaError):
        parse_document(text)
    with pytest.raises(SchemaError):
        parse_document(CAVITY.replace("-0.5, 0.0", "1e999, 0.0"))


def test_invalid_json_reports_line():
    with pytest.raises(SchemaError) as exc:
        parse_document('{\n  "formatVersion": 1,\n  oops\n}')
    assert exc.value.line == 3


def test_error_line_locates_field():
    text = CAVITY.replace('[[1.0, 0.0]]\n    ]\n  },', '[[1.0]]\n    ]\n  },')
    with pytest.raises(SchemaError) as exc:
        parse_document(text)
    assert exc.value.field == "matrices.K"
    assert exc.value.line == text.splitlines().index('    "K": [') + 1


def test_quadrature_is_real():
    q = QuadratureQsde(-0.5 * np.eye(2), -np.eye(2), np.eye(2), np.eye(2))
    text = emit_document(from_object(q))
    data = json.loads(text)
    assert data["matrices"]["A"] == [[-0.5, -0.0], [0.0, -0.5]]
    data["matrices"]["A"][0][0] = [-0.5, 0.0]
    with pytest.raises(SchemaError) as exc:
        parse_document(json.dumps(data))
    assert exc.value.field == "matrices.A"


def test_object_round_trips(rng):
    from qlinsys.corpus import random_physical_parameters, random_plant
    from qlinsys.model import build_general
    from qlinsys.synthesis import synthesize_realizable

    params = random_physical_parameters(rng, 2, 1)
    gen, _ = build_general(params)
    plant = random_plant(rng, n=1)
    ctrl = HinfController(-np.eye(1), np.ones((1, plant.H2.shape[0])),
                          np.ones((plant.G2.shape[1], 1)))
    scalar = HinfPlant(*(np.ones((1, 1)) * v for v in (-1, 1, 1, 1, 1, 1, 1, 1, 1)))
    completed = synthesize_realizable(scalar).controller
    for obj in (params, gen, plant, ctrl, completed):
        back = to_object(parse_document(emit_document(from_object(obj))))
        assert type(back) is type(obj)
        if isinstance(obj, GeneralQsde):
            pairs = zip(back.matrices(), obj.matrices())
        elif isinstance(obj, PhysicalParameters):
            pairs = ((back.S, obj.S), (back.M, obj.M), (back.N, obj.N), (back.T, obj.T))
        elif isinstance(obj, HinfPlant):
            pairs = ((getattr(back, k), getattr(obj, k)) for k in HinfPlant.NAMES)
        else:
            pairs = [(back.Fc, obj.Fc), (back.Gc, obj.Gc), (back.Hc, obj.Hc)]
            if obj.completion is not None:
                pairs += [(back.as_qsde().G, obj.as_qsde().G),
                          (back.completion.theta1, obj.completion.theta1)]
        for a, b in pairs:
            np.testing.assert_array_equal(a, b)


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(0, 3), m=st.integers(1, 3), data=st.data())
def test_emit_parse_identity(n, m, data):
    def mat(r, c):
        vals = data.draw(st.lists(finite, min_size=2 * r * c, max_size=2 * r * c))
        arr = np.array(vals, dtype=float).reshape(r, c, 2) if r * c else np.zeros((r, c, 2))
        return arr[..., 0] + 1j * arr[..., 1]

    doc = SystemDocument("general", {"n": n, "m": m},
                         {"F": mat(2 * n, 2 * n), "G": mat(2 * n, 2 * m),
                          "H": mat(2 * m, 2 * n), "K": mat(2 * m, 2 * m)},
                         {"note": data.draw(st.text(max_size=10))})
    text = emit_document(doc)
    again = parse_document(text)
    assert again == doc
    assert emit_document(again) == text


def test_read_document(fixtures_dir):
    doc = read_document(fixtures_dir / "annihilation_cavity.json")
    assert doc.metadata == {"name": "cavity"}
