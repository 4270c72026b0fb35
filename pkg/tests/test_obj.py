import numpy as np
import pytest

from moutardnet.errors import NetFormatError
from moutardnet.lie import grid_touching_congruence
from moutardnet.netio import euclidean_document, projective_document, sphere_document
from moutardnet.obj import ObjOptions, icosphere, mesh_of, write_obj


def parse(path):
    verts, faces, tags = [], [], []
    for line in open(path):
        head, *rest = line.split()
        if head == "v":
            verts.append([float(x) for x in rest])
        elif head == "f":
            faces.append([int(x) for x in rest])
        elif head in ("o", "g"):
            tags.append((head, rest[0]))
    return np.array(verts), faces, tags


def test_two_by_two_grid(tmp_path):
    doc = euclidean_document(np.array([[[0, 0, 0], [0, 1, 0]], [[1, 0, 0], [1, 1, 0.0]]]))
    write_obj(doc, tmp_path / "g.obj")
    v, f, _ = parse(tmp_path / "g.obj")
    assert v.shape == (4, 3) and f == [[1, 3, 4, 2]]


def test_icosphere_counts():
    for k, (nv, nf) in enumerate([(12, 20), (42, 80), (162, 320)]):
        v, t = icosphere(k)
        assert len(v) == nv and len(t) == nf
        assert np.allclose(np.linalg.norm(v, axis=1), 1.0)


def test_sphere_congruence_export(tmp_path):
    g = grid_touching_congruence(3, 3)
    write_obj(sphere_document(g), tmp_path / "s.obj", ObjOptions(subdivision=1))
    v, f, _ = parse(tmp_path / "s.obj")
    assert len(v) == 9 * 42 and len(f) == 9 * 80
    # the first icosphere sits on the first sphere
    assert np.allclose(np.linalg.norm(v[:42] - g.centers[0, 0], axis=1), abs(g.radii[0, 0]))


def test_pair_export_has_group_tags(tmp_path, iso8):
    f = iso8["f"]
    write_obj([("primal", euclidean_document(f)), ("dual", euclidean_document(f + 1))], tmp_path / "p.obj")
    v, faces, tags = parse(tmp_path / "p.obj")
    assert tags == [("o", "primal"), ("g", "primal"), ("o", "dual"), ("g", "dual")]
    assert len(v) == 2 * 8 * 9 and max(max(x) for x in faces) == len(v)


def test_trimesh_reads_export(tmp_path):
    trimesh = pytest.importorskip("trimesh")
    write_obj(sphere_document(grid_touching_congruence(2, 2)), tmp_path / "s.obj")
    scene = trimesh.load(tmp_path / "s.obj", force="mesh")
    assert len(scene.faces) == 4 * 80


def test_unsupported_kind():
    doc = projective_document(np.zeros((2, 2, 4)))
    with pytest.raises(NetFormatError):
        mesh_of(doc)
