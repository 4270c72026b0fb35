import itertools

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from moutardnet.errors import DegenerateConfigurationError, GeometryError, PreconditionError
from moutardnet.menelaus import (
    AffinePointChain,
    close_chain,
    desargues_concurrency,
    desargues_lines,
    directed_ratio_product,
    eight_ratio_product,
    lines_concurrency,
    menelaus_predicate,
    menelaus_product_criterion,
)
from moutardnet.moebius import _STAR

TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def test_worked_instance():
    chain = AffinePointChain(TRIANGLE, [0.5, 0.75, -0.5])
    assert np.allclose(chain.division_points(), [[0.5, 0.0], [0.25, 0.75], [0.0, 1.5]])
    assert directed_ratio_product(chain) == pytest.approx(-1.0, abs=1e-15)
    assert menelaus_predicate(chain) and menelaus_product_criterion(chain)


def test_degenerate_parameters_rejected():
    with pytest.raises(DegenerateConfigurationError):
        AffinePointChain(TRIANGLE, [0.0, 0.5, 0.5])
    with pytest.raises(PreconditionError):
        AffinePointChain(np.array([[0, 0], [1, 1], [2, 2.0]]), [0.3, 0.5, 0.5])


def random_simplex(rng, n):
    while True:
        p = rng.normal(size=(n + 1, n))
        if np.linalg.svd(p[1:] - p[0], compute_uv=False)[-1] > 0.2:
            return p


@pytest.mark.parametrize("n", [2, 3, 4])
def test_product_and_rank_agree(n, rng):
    for k in range(400):
        p = random_simplex(rng, n)
        xi = rng.uniform(-2, 3, n + 1)
        xi[np.abs(xi) < 0.05] = 0.3
        xi[np.abs(xi - 1) < 0.05] = 0.6
        chain = close_chain(p, xi[:-1]) if k % 2 else AffinePointChain(p, xi)
        assert menelaus_predicate(chain) == menelaus_product_criterion(chain)
        if k % 2:
            assert menelaus_predicate(chain)


@given(st.lists(st.floats(-3, 3).filter(lambda x: abs(x) > 0.05 and abs(x - 1) > 0.05), min_size=2, max_size=2))
@settings(max_examples=100)
def test_closed_chains_are_collinear(head):
    chain = close_chain(TRIANGLE, head)
    assume(0.05 < abs(chain.xi[-1]) and abs(chain.xi[-1] - 1) > 0.05)
    pts = chain.division_points()
    d1, d2 = pts[1] - pts[0], pts[2] - pts[0]
    area = d1[0] * d2[1] - d1[1] * d2[0]
    assert abs(area) < 1e-9 * max(1.0, np.max(np.abs(pts)) ** 2)


def test_lines_concurrency_finite_and_infinite():
    c = lines_concurrency([[0, 0], [1, 1], [1, 0], [0, 1], [0.5, 0], [0.5, 1]])
    assert c.concurrent and not c.at_infinity and np.allclose(c.point, [0.5, 0.5])
    par = lines_concurrency([[0, 0], [1, 0], [0, 1], [1, 1], [0, 2], [1, 2]])
    assert par.concurrent and par.at_infinity
    gen = lines_concurrency([[0, 0], [1, 0], [0, 0], [0, 1], [1, 1], [2, 3]])
    assert not gen.concurrent


def test_symmetric_star_meets_at_infinity():
    star = np.array([[1, 1], [-1, 1], [1, -1], [-1, -1], [1, 0], [-1, 0], [0, 1], [0, -1]], dtype=float)
    c = desargues_lines(star)
    assert c.concurrent and c.at_infinity
    assert desargues_concurrency(star, second=True)


def test_generated_star_eight_ratio_product(iso8):
    f = iso8["f"]
    for u in itertools.product(range(1, 7), range(1, 8)):
        star = np.array([f[u[0] + a, u[1] + b] for a, b in _STAR])
        assert abs(eight_ratio_product(star) - 1.0) < 1e-9


def test_eight_ratio_product_detects_mutation(iso8):
    # move f_12 along its face circle's normal: the circle through f, f_1, f_2 no longer contains it
    f = iso8["f"].copy()
    u = (3, 4)
    f[u[0] + 1, u[1] + 1] += 1e-3 * np.array([0.2, 0.3, 0.1])
    star = np.array([f[u[0] + a, u[1] + b] for a, b in _STAR])
    with pytest.raises(GeometryError):
        eight_ratio_product(star, tol=1e-9)


def test_grid_star_eight_ratio_product_is_one():
    # planar conformal-square grid
    u1, u2 = np.meshgrid(np.arange(3.0), np.arange(3.0), indexing="ij")
    f = np.stack([u1, u2], axis=-1)
    star = np.array([f[1 + a, 1 + b] for a, b in _STAR])
    assert abs(eight_ratio_product(star) - 1.0) < 1e-12
