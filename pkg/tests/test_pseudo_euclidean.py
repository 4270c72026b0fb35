import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from moutardnet.errors import DimensionError
from moutardnet.moebius import moebius_lift
from moutardnet.pseudo_euclidean import Space, numerical_rank, orthogonal_complement

finite = st.floats(-10, 10, allow_nan=False)
points3 = arrays(np.float64, (3,), elements=finite)


def test_moebius_basis_products():
    sp = Space.moebius(3)
    assert sp.inner(sp.e0, sp.einf) == -0.5
    assert sp.norm2(sp.e0) == 0 and sp.norm2(sp.einf) == 0
    assert sp.signature.positive == 4 and sp.signature.negative == 1


def test_lie_basis_has_timelike_e6():
    sp = Space.lie(3)
    assert sp.norm2(sp.e6) == -1.0
    assert sp.inner(sp.e6, sp.e0) == 0.0
    assert (sp.signature.positive, sp.signature.negative) == (4, 2)


@given(points3, points3)
def test_light_cone_lift_distance(f, g):
    sp = Space.moebius(3)
    lf, lg = moebius_lift(f), moebius_lift(g)
    expected = -0.5 * np.sum((f - g) ** 2)
    assert abs(sp.inner(lf, lg) - expected) <= 1e-9 * (1 + abs(expected) + np.sum(f * f) + np.sum(g * g))
    assert abs(sp.norm2(lf)) <= 1e-9 * (1 + np.sum(f * f)) ** 2


def test_dimension_mismatch_raises():
    with pytest.raises(DimensionError):
        Space.moebius(3).inner(np.zeros(4), np.zeros(5))


def test_numerical_rank_of_constructed_matrices(rng):
    a = rng.normal(size=(6, 3)) @ rng.normal(size=(3, 8))
    assert numerical_rank(a) == 3
    assert numerical_rank(np.eye(5)) == 5


def test_orthogonal_complement_is_orthogonal(rng):
    sp = Space.moebius(3)
    vs = rng.normal(size=(3, 5))
    comp = orthogonal_complement(vs, sp)
    assert comp.shape[0] == 2
    assert np.max(np.abs(sp.inner(vs[:, None, :], comp[None, :, :]))) < 1e-12
