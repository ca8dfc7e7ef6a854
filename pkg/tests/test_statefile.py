import json

import numpy as np
import pytest

from qaeopt import (
    BipartiteDims,
    StateFileError,
    file_digest,
    generate_instance,
    load_statefile,
    save_statefile,
)

DIMS22 = BipartiteDims(2, 2)


def test_dense_round_trip(tmp_path):
    rho = generate_instance("random-dense", DIMS22, 5)
    path = tmp_path / "state.json"
    save_statefile(path, DIMS22, matrix=rho.matrix, label="fixture")
    sf = load_statefile(path)
    assert sf.is_dense
    assert sf.label == "fixture"
    assert np.allclose(sf.matrix, rho.matrix)
    assert np.allclose(sf.density_matrix().matrix, rho.matrix)


def test_spectrum_round_trip_sorts_descending(tmp_path):
    path = tmp_path / "spec.json"
    save_statefile(path, DIMS22, spectrum=[0.1, 0.5, 0.3, 0.1])
    sf = load_statefile(path)
    assert not sf.is_dense
    assert np.allclose(sf.probabilities(), [0.5, 0.3, 0.1, 0.1], atol=1e-12)
    assert np.all(np.diff(sf.probabilities()) <= 0)


def test_spectrum_renormalized_within_tolerance(tmp_path):
    path = tmp_path / "spec.json"
    save_statefile(path, DIMS22, spectrum=[0.4, 0.3, 0.2, 0.1 + 5e-9])
    probs = load_statefile(path).probabilities()
    assert abs(probs.sum() - 1.0) < 1e-15


def test_spectrum_rejected_beyond_tolerance(tmp_path):
    path = tmp_path / "spec.json"
    save_statefile(path, DIMS22, spectrum=[0.4, 0.3, 0.2, 0.2])
    with pytest.raises(StateFileError):
        load_statefile(path)


def test_negative_probability_rejected(tmp_path):
    path = tmp_path / "spec.json"
    save_statefile(path, DIMS22, spectrum=[0.6, 0.5, -0.1, 0.0])
    with pytest.raises(StateFileError):
        load_statefile(path)


def test_matrix_and_spectrum_both_present(tmp_path):
    path = tmp_path / "both.json"
    doc = {
        "format_version": 1,
        "d_a": 1,
        "d_b": 2,
        "matrix": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]],
        "spectrum": [0.5, 0.5],
    }
    path.write_text(json.dumps(doc))
    with pytest.raises(StateFileError):
        load_statefile(path)


def test_invalid_density_matrix_rejected(tmp_path):
    path = tmp_path / "bad.json"
    doc = {
        "format_version": 1,
        "d_a": 1,
        "d_b": 2,
        "matrix": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
    }
    path.write_text(json.dumps(doc))
    with pytest.raises(StateFileError):
        load_statefile(path)


def test_not_json(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("not json {")
    with pytest.raises(StateFileError):
        load_statefile(path)


def test_missing_file():
    with pytest.raises(StateFileError):
        load_statefile("/nonexistent/state.json")


def test_unsupported_version(tmp_path):
    path = tmp_path / "v2.json"
    path.write_text(json.dumps({"format_version": 2, "d_a": 1, "d_b": 1, "spectrum": [1.0]}))
    with pytest.raises(StateFileError):
        load_statefile(path)


def test_digest_depends_on_content(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    save_statefile(a, DIMS22, spectrum=[0.4, 0.3, 0.2, 0.1])
    save_statefile(b, DIMS22, spectrum=[0.4, 0.3, 0.2, 0.1])
    assert file_digest(a) == file_digest(b)
    save_statefile(b, DIMS22, spectrum=[0.7, 0.1, 0.1, 0.1])
    assert file_digest(a) != file_digest(b)
