import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symkilling.young import (
    T2, T21, T22, Tableau, conjugate, exchange_defect, exchange_map, hook_length_dimension,
    hook_product, irrep_dimension, membership_residual, parity, permute, project,
    projector_matrix, young_symmetrize,
)


def test_hook_numbers():
    assert hook_product((2,)) == 2
    assert hook_product((2, 1)) == 3
    assert hook_product((2, 2)) == 12
    assert hook_product((3, 2, 1)) == 45


def test_conjugate_and_shape_errors():
    assert conjugate((2, 1)) == (2, 1)
    assert conjugate((3, 1)) == (2, 1, 1)
    with pytest.raises(ValueError):
        hook_product((1, 2))
    with pytest.raises(ValueError):
        hook_product(())
    with pytest.raises(ValueError):
        Tableau(((1, 1),))


def test_parity_and_permute():
    assert parity((0, 1, 2)) == 1
    assert parity((1, 0, 2)) == -1
    assert parity((1, 2, 0)) == 1
    t = np.arange(8.0).reshape(2, 2, 2)
    s = permute(t, (1, 0, 2))
    assert np.allclose(s, t.transpose(1, 0, 2))


tensor_seeds = st.integers(min_value=0, max_value=2**31 - 1)


@settings(max_examples=30, deadline=None)
@given(tensor_seeds, st.sampled_from([2, 3]))
def test_projectors_idempotent(seed, n):
    rng = np.random.default_rng(seed)
    for T in (T2, T21, T22):
        for adjoint in (False, True):
            p = project(T, rng.normal(size=(n,) * T.size), adjoint)
            assert np.max(np.abs(project(T, p, adjoint) - p)) < 1e-12 * max(1, np.max(np.abs(p)))


@settings(max_examples=30, deadline=None)
@given(tensor_seeds)
def test_symmetrizer_eigenvalues(seed):
    rng = np.random.default_rng(seed)
    for T, h in ((T21, 3), (T22, 12)):
        b = project(T, rng.normal(size=(3,) * T.size))
        assert np.allclose(young_symmetrize(T, b), h * b, atol=1e-12)


def test_projector_matrix_trace_is_rank():
    for shape, n in (((2, 1), 3), ((2, 2), 3), ((2, 2), 4)):
        P = projector_matrix(Tableau.normal(shape), n)
        assert np.allclose(P @ P, P)
        assert round(np.trace(P)) == hook_length_dimension(shape, n)


@pytest.mark.parametrize("n,d", [(2, 1), (3, 6), (4, 20)])
def test_dimension_22(n, d):
    assert irrep_dimension((2, 2), n) == d
    assert hook_length_dimension((2, 2), n) == d


def test_dimension_21_and_sym2():
    for n in (2, 3, 4):
        assert irrep_dimension((2, 1), n) == n * (n * n - 1) // 3
        assert irrep_dimension((2,), n) == n * (n + 1) // 2


def test_22_image_has_curvature_symmetries(rng):
    g = project(T22, rng.normal(size=(3,) * 4))
    # symmetric in each row pair, pair symmetric, cyclic sum over the first three slots vanishes
    assert np.allclose(g, g.transpose(1, 0, 2, 3))
    assert np.allclose(g, g.transpose(2, 3, 0, 1))
    cyc = g + g.transpose(1, 2, 0, 3) + g.transpose(2, 0, 1, 3)
    assert np.max(np.abs(cyc)) < 1e-12
    # classical curvature tensor R(x,y,z,w) = g(x,z,y,w) - g(y,z,x,w)
    R = g.transpose(0, 2, 1, 3) - g.transpose(2, 0, 1, 3)
    assert np.allclose(R, -R.transpose(1, 0, 2, 3))
    assert np.allclose(R, -R.transpose(0, 1, 3, 2))
    assert np.allclose(R, R.transpose(2, 3, 0, 1))
    assert np.max(np.abs(R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3))) < 1e-12


def test_membership_residual(rng):
    t = rng.normal(size=(3, 3, 3))
    assert membership_residual(T21, project(T21, t)) < 1e-12
    assert membership_residual(T21, t) > 1e-3


def test_exchange_rule_on_images(rng):
    for _ in range(20):
        g = project(T22, rng.normal(size=(3,) * 4))
        assert exchange_defect(g, (2, 2), 1, 2) < 1e-12
        b = project(Tableau(((1, 3), (2,))), rng.normal(size=(3,) * 3), adjoint=True)
        assert exchange_defect(b, (2, 1), 1, 2, adjoint=True) < 1e-12
    assert exchange_defect(rng.normal(size=(3,) * 4), (2, 2), 1, 2) > 1e-3


def test_exchange_map_errors(rng):
    with pytest.raises(ValueError):
        exchange_map(rng.normal(size=(2,) * 4), (2, 2), 2, 1)
    with pytest.raises(ValueError):
        exchange_map(rng.normal(size=(2,) * 3), (2, 2), 1, 2)


def test_shifted_tableau_acts_on_later_slots(rng):
    t = rng.normal(size=(2, 3, 3, 3))
    p = project(T21.shifted(1), t)
    for a in range(2):
        assert np.allclose(p[a], project(T21, t[a]))
