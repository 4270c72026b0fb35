import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from moutardnet.errors import PreconditionError, SingularConfigurationError
from moutardnet.moutard_core import (
    TNet,
    certify_tnet,
    complete_hexahedron,
    moutard_transform,
    propagate_tnet,
    recover_coefficient,
    star_triangle,
)

coef = st.floats(-5, 5, allow_nan=False).filter(lambda x: abs(x) > 1e-3)


def parallel_diagonal_defect(y, y1, y12, y2):
    """Independent test of a T-face: y12 - y parallel to y2 - y1 (via the Gram determinant)."""
    u, v = y12 - y, y2 - y1
    gram = (u @ u) * (v @ v) - (u @ v) ** 2
    return abs(gram) / max((u @ u) * (v @ v), 1e-300)


def test_star_triangle_exact_rational():
    one = Fraction(1)
    assert star_triangle(one, one, one) == (Fraction(-1, 3),) * 3


@given(coef, coef, coef)
def test_star_triangle_involution(a, b, c):
    assume(abs(a * b + b * c + c * a) > 1e-3)
    t = star_triangle(a, b, c)
    assume(abs(t[0] * t[1] + t[1] * t[2] + t[2] * t[0]) > 1e-9)
    back = star_triangle(*t)
    assert np.allclose(back, (a, b, c), rtol=1e-9, atol=1e-12)


def test_star_triangle_singular():
    with pytest.raises(SingularConfigurationError):
        star_triangle(1.0, -0.5, 1.0)  # 1*(-0.5) + (-0.5)*1 + 1*1 = 0


def test_hexahedron_three_faces_agree(rng):
    for _ in range(50):
        y, y1, y2, y3 = rng.normal(size=(4, 5))
        a12, a23, a31 = rng.uniform(0.3, 2, 3) * rng.choice([-1, 1], 3)
        cube = complete_hexahedron(y, y1, y2, y3, a12, a23, a31)
        assert cube.disagreement < 1e-10
        # the three top faces are T-faces with the shifted coefficients
        t3a12, t1a23, t2a31 = cube.shifted
        # face (1,2) shifted in direction 3 carries tau_3 a12
        assert np.allclose(cube.y123 - y3, t3a12 * (cube.y23 - cube.y31), atol=1e-9)
        assert np.allclose(cube.y123 - y1, t1a23 * (cube.y31 - cube.y12), atol=1e-9)
        assert parallel_diagonal_defect(y3, cube.y31, cube.y123, cube.y23) < 1e-10
        assert parallel_diagonal_defect(y1, cube.y12, cube.y123, cube.y31) < 1e-10
        assert parallel_diagonal_defect(y2, cube.y23, cube.y123, cube.y12) < 1e-10


def test_propagate_2d_and_certify(rng):
    axes = [rng.normal(size=(5, 3)), rng.normal(size=(6, 3))]
    axes[1][0] = axes[0][0]
    a = rng.uniform(0.5, 2, (4, 5))
    net = propagate_tnet(axes, {(1, 2): a})
    assert certify_tnet(net).passed
    assert np.allclose(recover_coefficient(net.vertices[:-1, :-1], net.vertices[1:, :-1],
                                           net.vertices[1:, 1:], net.vertices[:-1, 1:]), a)
    for u in itertools.product(range(4), range(5)):
        v = net.vertices
        assert parallel_diagonal_defect(v[u], v[u[0] + 1, u[1]], v[u[0] + 1, u[1] + 1], v[u[0], u[1] + 1]) < 1e-12


def test_reversed_coefficient_keys_flip_sign():
    net = TNet(np.zeros((2, 2, 1)), {(2, 1): np.array([[2.0]])})
    assert net.coefficient(1, 2)[0, 0] == -2.0
    assert net.coefficient(2, 1)[0, 0] == 2.0


def test_propagate_4d_consistency(rng):
    m = 4
    axes = [rng.normal(size=(3, 6)) for _ in range(m)]
    for a in axes[1:]:
        a[0] = axes[0][0]
    coeffs = {(i, j): rng.uniform(0.5, 1.5) for i, j in itertools.combinations(range(1, m + 1), 2)}
    net = propagate_tnet(axes, coeffs)
    assert net.vertices.shape == (3, 3, 3, 3, 6)
    assert certify_tnet(net, 1e-9).passed


def test_axes_must_share_origin(rng):
    with pytest.raises(PreconditionError):
        propagate_tnet([rng.normal(size=(3, 2)), rng.normal(size=(3, 2))], {(1, 2): 1.0})


def test_moutard_transform_is_a_tnet_pair(rng):
    axes = [rng.normal(size=(5, 4)), rng.normal(size=(5, 4))]
    axes[1][0] = axes[0][0]
    net = propagate_tnet(axes, {(1, 2): rng.uniform(0.5, 2, (4, 4))})
    plus, data = moutard_transform(net, rng.normal(size=4), [0.7, 1.3])
    assert certify_tnet(plus, 1e-9).passed
    y, yp = net.vertices, plus.vertices
    # every (i, 3) face of the stacked pair satisfies the Moutard equation with coefficient b_i
    for u in itertools.product(range(4), range(5)):
        d = (yp[u[0] + 1, u[1]] - y[u]) - data.b[0][u] * (yp[u] - y[u[0] + 1, u[1]])
        assert np.linalg.norm(d) < 1e-9 * (1 + np.linalg.norm(yp[u]))


def test_certifier_detects_mutation(rng):
    axes = [rng.normal(size=(6, 3)), rng.normal(size=(6, 3))]
    axes[1][0] = axes[0][0]
    net = propagate_tnet(axes, {(1, 2): 1.2})
    v = net.vertices.copy()
    v[3, 2] += 1e-4
    rep = certify_tnet(v)
    assert not rep.passed
    assert set(rep.witnesses) <= {(2, 1), (2, 2), (3, 1), (3, 2)}
