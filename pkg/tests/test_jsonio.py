"""Wire formats: matrix/complex codecs, atomic writes, impact model JSON."""

import json

import numpy as np
import pytest

from hybrid_orbit.impacts import ImpactModel, impact_model_from_obj, impact_model_to_obj
from hybrid_orbit.jsonio import (
    FormatError,
    complex_to_obj,
    dump_json,
    load_json,
    matrix_from_obj,
    matrix_to_obj,
    spectrum_to_obj,
    vector_from_obj,
)


def test_matrix_round_trip_preserves_floats():
    rng = np.random.default_rng(1)
    m = rng.normal(size=(3, 5))
    obj = json.loads(json.dumps(matrix_to_obj(m)))
    assert np.array_equal(matrix_from_obj(obj), m)


def test_matrix_from_obj_diagnostics():
    with pytest.raises(FormatError, match="rows"):
        matrix_from_obj({"cols": 2, "data": [1, 2]})
    with pytest.raises(FormatError, match="rows\\*cols"):
        matrix_from_obj({"rows": 2, "cols": 2, "data": [1.0, 2.0]})
    with pytest.raises(FormatError, match="non-numeric"):
        matrix_from_obj({"rows": 1, "cols": 2, "data": [1.0, "x"]})
    with pytest.raises(FormatError, match="non-finite"):
        matrix_from_obj({"rows": 1, "cols": 1, "data": [float("nan")]})
    with pytest.raises(FormatError, match="jacs.A"):
        matrix_from_obj(["not", "a", "dict"], path="jacs.A")


def test_vector_from_obj_diagnostics():
    assert np.array_equal(vector_from_obj([1, 2.5]), [1.0, 2.5])
    with pytest.raises(FormatError):
        vector_from_obj({"x": 1})
    with pytest.raises(FormatError):
        vector_from_obj([1.0, float("inf")])


def test_complex_and_spectrum_objects():
    assert complex_to_obj(1.5 - 2.0j) == {"re": 1.5, "im": -2.0}
    spectrum = spectrum_to_obj(np.array([1.0 + 0.0j, -2.0 + 3.0j]))
    assert spectrum == [{"re": 1.0, "im": 0.0}, {"re": -2.0, "im": 3.0}]


def test_dump_json_is_deterministic_and_atomic(tmp_path):
    path = tmp_path / "out.json"
    doc = {"b": [1.0, 2.0], "a": matrix_to_obj(np.eye(2))}
    dump_json(doc, path)
    first = path.read_bytes()
    dump_json(doc, path)
    assert path.read_bytes() == first
    assert not list(tmp_path.glob("*.tmp"))


def test_load_json_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"a": 1,\n  broken }')
    with pytest.raises(FormatError, match="line 2"):
        load_json(path)


def test_impact_model_json_round_trip():
    model = ImpactModel(
        inertia=np.diag([2.0, 3.0, 4.0]),
        contact_jacobian=np.array([[0.0, 1.0, 0.0]]),
        relabel_map=(1, 3, -2),
    )
    rebuilt = impact_model_from_obj(json.loads(json.dumps(impact_model_to_obj(model))))
    assert np.array_equal(rebuilt.inertia, model.inertia)
    assert np.array_equal(rebuilt.contact_jacobian, model.contact_jacobian)
    assert rebuilt.relabel_map == (1, 3, -2)


def test_impact_model_json_unconstrained_and_errors():
    model = ImpactModel(inertia=np.eye(2), contact_jacobian=np.zeros((0, 2)))
    rebuilt = impact_model_from_obj(impact_model_to_obj(model))
    assert rebuilt.n_constraints == 0
    with pytest.raises(FormatError):
        impact_model_from_obj({"D_e": matrix_to_obj(np.eye(2))})
    with pytest.raises(FormatError, match="relabel"):
        impact_model_from_obj(
            {
                "D_e": matrix_to_obj(np.eye(2)),
                "E": matrix_to_obj(np.array([[1.0, 0.0]])),
                "relabel": ["a", "b"],
            }
        )
    with pytest.raises(FormatError, match="positive definite"):
        impact_model_from_obj(
            {"D_e": matrix_to_obj(-np.eye(2)), "E": matrix_to_obj(np.array([[1.0, 0.0]]))}
        )
