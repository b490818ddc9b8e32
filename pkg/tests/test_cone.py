import jax.numpy as jnp
import numpy as np
import pytest

from symkilling import cone, sasaki
from symkilling import geometry as geo
from symkilling import killing as kil
from symkilling.young import T2, T21, T22, project


def _triple(rng, n):
    return cone.ConeTriple(project(T2, rng.normal(size=(n, n))),
                           project(T21, rng.normal(size=(n,) * 3)),
                           project(T22, rng.normal(size=(n,) * 4)))


def _metric(rng, n):
    A = rng.normal(size=(n, n))
    return A @ A.T + n * np.eye(n)


@pytest.mark.parametrize("n", [2, 3])
def test_assemble_decompose_round_trip(n, rng):
    t = _triple(rng, n)
    S = cone.assemble(t)
    assert np.max(np.abs(project(T22, S) - S)) < 1e-12
    assert (cone.decompose(S) - t).maxabs() < 1e-12
    S2 = kil.random_curvature_tensor(n + 1, rng)
    assert np.max(np.abs(cone.assemble(cone.decompose(S2)) - S2)) < 1e-12
    assert np.allclose(cone.assemble(t, r=2.5), S)


def test_assemble_decompose_errors(rng):
    t = _triple(rng, 2)
    with pytest.raises(ValueError):
        cone.assemble(t, r=0.0)
    with pytest.raises(ValueError):
        cone.decompose(rng.normal(size=(3,) * 4))
    assert cone.decompose(rng.normal(size=(3,) * 4), check=False).alpha.shape == (2, 2)


def test_cone_christoffel_closed_form(rng):
    M = geo.RoundSphere(3)
    cm = cone.ConeModel(M)
    x = jnp.asarray(np.concatenate([geo.sample_point(M, rng), [1.4]]))
    ref = np.asarray(geo.christoffel_from_metric(cm.metric, x))
    assert np.allclose(np.asarray(cm.christoffel(x)), ref, atol=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_cone_over_unit_sphere_is_flat(n, rng):
    M = geo.RoundSphere(n)
    for _ in range(3):
        u = geo.sample_point(M, rng)
        assert np.max(np.abs(cone.cone_curvature(M, u))) < 1e-8


def test_cone_curvature_matches_fd_oracle(rng):
    M = geo.ScaledSphere(2, 4.0)
    u = geo.sample_point(M, rng)
    A = cone.cone_curvature(M, u)
    assert np.max(np.abs(A)) > 1e-1
    assert np.allclose(A, cone.cone_curvature_oracle(M, u), atol=1e-6)
    assert np.allclose(A, cone.cone_curvature_oracle(M, u, mode="ad"), atol=1e-10)


def test_cone_guard():
    with pytest.raises(ValueError):
        cone.cone_curvature(geo.FlatSpace(2), np.zeros(2))
    with pytest.raises(ValueError):
        cone.ConeModel(geo.FlatSpace(2))


def test_connection_rules(rng):
    n = 3
    G = _metric(rng, n)
    r = 1.7
    D = cone.nabla_hat_dr(G, r)
    assert np.allclose(D[:n, :n], r * G)
    assert np.allclose(D[n], 0.0)
    assert np.allclose(D[:n, n], 0.0)
    gam = rng.normal(size=(n,) * 3)
    out = cone.nabla_hat_pullback(gam, np.zeros((n,) * 4), G, r)
    assert np.allclose(out[n][:n, :n, :n], -(3 / r) * gam)


@pytest.mark.parametrize("r", [1.0, 2.0])
def test_horizontal_difference_matches_delta_action(r, rng):
    n = 3
    G = _metric(rng, n)
    t = _triple(rng, n)
    d = cone.horizontal_difference(t, G, r) - cone.delta_action_triple(t, G, r)
    assert d.maxabs() < 1e-12 * max(1.0, t.maxabs())


@pytest.mark.parametrize("n", [2, 3])
def test_S_kappa_parallel_iff_killing(n, rng):
    M = geo.RoundSphere(n)
    u = geo.sample_point(M, rng)
    kf = kil.ambient_killing_field(M, kil.random_curvature_tensor(n + 1, rng))
    assert cone.S_kappa_horizontal_defect(kf, M, u) < 1e-7
    assert cone.S_kappa_horizontal_defect(kil.metric_field(M), M, u) < 1e-7
    assert cone.S_kappa_horizontal_defect(kil.bump_field(M, rng), M, u) > 1e-3


def test_S_kappa_radial_scaling(rng):
    M = geo.RoundSphere(2)
    u = geo.sample_point(M, rng)
    kf = kil.ambient_killing_field(M, kil.random_curvature_tensor(3, rng))
    t1 = cone.build_S_kappa(kf, M, u)
    r = 1.9
    t2 = cone.build_S_kappa(kf, M, u, r)
    for p, q, e in zip(t1.parts, t2.parts, (2, 3, 4)):
        assert np.allclose(q, r**e * p)


def test_S_kappa_equals_pulled_back_ambient_tensor(rng):
    M = geo.RoundSphere(3)
    u = geo.sample_point(M, rng)
    S = kil.random_curvature_tensor(4, rng)
    kf = kil.ambient_killing_field(M, S)
    r = 1.3
    amb = cone.decompose(sasaki.pullback_to_cone(S, M, u, r))
    assert (cone.build_S_kappa(kf, M, u, r) - amb).maxabs() < 1e-10


def test_hessian_description(rng):
    M = geo.RoundSphere(2)
    u = geo.sample_point(M, rng)
    kf = kil.ambient_killing_field(M, kil.random_curvature_tensor(3, rng))
    assert cone.hessian_description_defect(kf, M, u) < 1e-8
    assert cone.hessian_description_defect(kf, M, u, scale=2.0) > 1e-3
