import jax
import jax.numpy as jnp
import numpy as np
import pytest

from symkilling import geometry as geo
from symkilling import killing as kil


def test_model_validation():
    with pytest.raises(ValueError):
        geo.ManifoldModel("torus", 2)
    with pytest.raises(ValueError):
        geo.RoundSphere(0)
    with pytest.raises(ValueError):
        geo.RoundSphere(2, -1.0)
    M = geo.RoundSphere(2)
    with pytest.raises(ValueError):
        M.check_point([0.1, 0.2, 0.3])
    with pytest.raises(ValueError):
        M.check_point([np.nan, 0.0])
    with pytest.raises(ValueError):
        M.check_point([100.0, 0.0])


def test_curvature_values():
    assert geo.RoundSphere(3, 2.0).curvature == pytest.approx(0.25)
    assert geo.ScaledSphere(2, 4.0).curvature == pytest.approx(4.0)
    assert geo.FlatSpace(3).curvature == 0.0


def test_embedding_round_trip(rng):
    M = geo.RoundSphere(3, 1.7)
    u = geo.sample_point(M, rng)
    P = np.asarray(M.embedding(jnp.asarray(u)))
    assert np.isclose(np.linalg.norm(P), 1.7)
    assert np.allclose(M.chart(P), u)


@pytest.mark.parametrize("M", [geo.RoundSphere(2), geo.RoundSphere(3, 2.0), geo.ScaledSphere(2, 4.0),
                               geo.FlatSpace(2)], ids=lambda M: M.label())
def test_constant_curvature(M, rng):
    for _ in range(3):
        u = geo.sample_point(M, rng)
        g = geo.geometry_at(M, u)
        assert np.allclose(g.Rend, geo.constant_curvature(g.G, M.curvature), atol=1e-10)
        x, y = geo.unit_vectors(g.G, rng, 2)
        assert geo.sectional_curvature(g.Rend, g.G, x, y) == pytest.approx(M.curvature, abs=1e-10)
        # constant curvature tensors are parallel
        assert np.max(np.abs(g.DRend)) < 1e-10


def test_christoffel_routes_agree(rng):
    M = geo.RoundSphere(3, 1.3)
    u = geo.sample_point(M, rng)
    ref = geo.christoffel_at(M, u)
    ad = np.asarray(geo.christoffel_from_metric(M.metric, jnp.asarray(u)))
    fd = geo.christoffel_from_metric(lambda v: np.asarray(M.metric(jnp.asarray(v))), u, mode="fd")
    assert np.allclose(ad, ref, atol=1e-12)
    assert np.allclose(fd, ref, atol=1e-8)


def test_riemann_routes_agree(rng):
    M = geo.RoundSphere(2)
    u = geo.sample_point(M, rng)
    ad = np.asarray(geo.riemann_from_christoffel(M.christoffel, jnp.asarray(u)))
    fd = geo.riemann_from_christoffel(lambda v: np.asarray(M.christoffel(jnp.asarray(v))), u,
                                      mode="fd")
    assert np.allclose(ad, fd, atol=1e-7)


def test_gauss_equation_oracle(rng):
    for M in (geo.RoundSphere(2), geo.RoundSphere(3, 0.7)):
        u = geo.sample_point(M, rng)
        assert np.allclose(geo.gauss_curvature_low(M, u), geo.geometry_at(M, u).Rlow, atol=1e-10)
    with pytest.raises(ValueError):
        geo.gauss_curvature_low(geo.FlatSpace(2), np.zeros(2))


def test_metric_is_pullback(rng):
    M = geo.RoundSphere(3)
    u = jnp.asarray(geo.sample_point(M, rng))
    J = np.asarray(jax.jacfwd(M.embedding)(u))
    assert np.allclose(J.T @ J, np.asarray(M.metric(u)))


def test_one_nullity(rng):
    u = geo.sample_point(geo.RoundSphere(3), rng)
    N = geo.one_nullity(geo.RoundSphere(3), u)
    G = geo.metric_at(geo.RoundSphere(3), u)
    assert N.shape == (3, 3)
    assert np.allclose(N.T @ G @ N, np.eye(3))
    assert geo.one_nullity(geo.ScaledSphere(3, 4.0), u).shape[1] == 0
    assert geo.one_nullity(geo.FlatSpace(3), u).shape[1] == 0


def test_covariant_derivative_modes(rng):
    M = geo.RoundSphere(2)
    kf = kil.ambient_killing_field(M, kil.random_curvature_tensor(3, rng))
    u = geo.sample_point(M, rng)
    a = geo.covariant_derivative(kf, M, u, 1)
    b = geo.covariant_derivative(kf, M, u, 1, mode="fd")
    assert np.allclose(a, b, atol=1e-8)
    with pytest.raises(ValueError):
        geo.covariant_derivative(kf, M, u, 1, mode="fd", h=1e-12)
    with pytest.raises(ValueError):
        geo.derivative_functions(kf.fn, M, 1, mode="spectral")


def test_metric_is_parallel(rng):
    M = geo.RoundSphere(3)
    u = geo.sample_point(M, rng)
    assert np.max(np.abs(geo.covariant_derivative(kil.metric_field(M), M, u))) < 1e-12


def test_orthonormal_frame_and_units(rng):
    A = rng.normal(size=(3, 3))
    G = A @ A.T + 3 * np.eye(3)
    E = geo.orthonormal_frame(G, rng)
    assert np.allclose(E.T @ G @ E, np.eye(3))
    xs = geo.unit_vectors(G, rng, 5)
    assert np.allclose(np.einsum("ni,ij,nj->n", xs, G, xs), 1.0)


def test_loops_are_closed(rng):
    loops = geo.sample_loops(geo.RoundSphere(3), rng, 4)
    for lp in loops:
        assert np.allclose(lp.position(0.0), lp.position(1.0))
        assert np.allclose(lp.position(0.0), loops[0].position(0.0))
        h = 1e-6
        fd = (lp.position(0.3 + h) - lp.position(0.3 - h)) / (2 * h)
        assert np.allclose(fd, lp.velocity(0.3), atol=1e-6)
