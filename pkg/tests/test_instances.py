import json

import pytest

from ietskew.instances import (
    InstanceError,
    build_instance,
    load_instance,
    packaged_names,
)


def test_packaged_names():
    assert packaged_names() == ["genus2_rank1", "genus2_rank2", "golden_triple"]


def test_load_and_build_packaged():
    for name in packaged_names():
        built = build_instance(load_instance(name))
        assert built.phi is not None
        assert built.tower.d == len(built.spec.top)
        assert built.m == built.eigenrank or built.spec.phi is not None


def test_explicit_phi_is_used():
    built = build_instance(load_instance("genus2_rank1"))
    assert built.spec.phi == ((1,), (-1,), (0,), (0,))
    assert built.phi.values == built.spec.phi


def test_unknown_instance():
    with pytest.raises(InstanceError, match="packaged"):
        load_instance("nonexistent_instance")


def test_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"d": 3,\n  "top": [1, 2')
    with pytest.raises(InstanceError, match="line"):
        load_instance(path)


def test_missing_field(tmp_path):
    path = tmp_path / "incomplete.json"
    path.write_text(json.dumps({"d": 2, "top": [1, 2], "bottom": [2, 1]}))
    with pytest.raises(InstanceError, match="loop"):
        load_instance(path)


def test_bad_loop_letters(tmp_path):
    path = tmp_path / "letters.json"
    path.write_text(
        json.dumps({"d": 2, "top": [1, 2], "bottom": [2, 1], "loop": ["x"]})
    )
    with pytest.raises(InstanceError, match="letters"):
        load_instance(path)


def test_phi_shape_validation(tmp_path):
    path = tmp_path / "phi.json"
    path.write_text(
        json.dumps(
            {
                "d": 2,
                "top": [1, 2],
                "bottom": [2, 1],
                "loop": ["t", "b"],
                "phi": [[1]],
            }
        )
    )
    with pytest.raises(InstanceError, match="rows"):
        load_instance(path)


def test_unsuitable_loop_rejected(tmp_path):
    # a single top move loops on the d=2 vertex but its matrix is never positive
    path = tmp_path / "unsuitable.json"
    path.write_text(
        json.dumps({"d": 2, "top": [1, 2], "bottom": [2, 1], "loop": ["t"]})
    )
    with pytest.raises(InstanceError, match="not positive"):
        build_instance(load_instance(path))


def test_loop_without_unit_eigenvalue_gives_no_phi(tmp_path):
    path = tmp_path / "rotation.json"
    path.write_text(
        json.dumps({"d": 2, "top": [1, 2], "bottom": [2, 1], "loop": ["t", "b"]})
    )
    built = build_instance(load_instance(path))
    assert built.eigenrank == 0
    assert built.phi is None


def test_defaults():
    spec = load_instance("golden_triple")
    assert spec.depth == 3 and spec.seed == 0
    spec2 = load_instance("genus2_rank1")
    assert spec2.psi == ((0.25,), (-0.5,))
