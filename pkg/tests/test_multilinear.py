import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symkilling.multilinear import (
    ProductKind, derive, derive_stack, flat, full_symmetrization, insert, kulkarni, metric_trace,
    owedge, owedge_dual_basis, sharp, sym_product, target_tableau, to_frame, wedge_endomorphism,
    wedge_stack,
)
from symkilling.young import T2, T21, T22, membership_residual, project


def _metric(rng, n):
    A = rng.normal(size=(n, n))
    return A @ A.T + n * np.eye(n)


def _args(kind, rng, n=3):
    sym = lambda: project(T2, rng.normal(size=(n, n)))  # noqa: E731
    skew = lambda: (lambda a: a - a.T)(rng.normal(size=(n, n)))  # noqa: E731
    one = lambda: rng.normal(size=n)  # noqa: E731
    return {
        ProductKind.SYM1X1: lambda: (one(), one()),
        ProductKind.ONEFORM_SYM2: lambda: (one(), sym()),
        ProductKind.TWOFORM_TWOFORM: lambda: (skew(), skew()),
        ProductKind.ONEFORM_S21: lambda: (one(), project(T21, rng.normal(size=(n,) * 3))),
        ProductKind.KULKARNI_NOMIZU: lambda: (sym(), sym()),
    }[kind]()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from(list(ProductKind)))
def test_products_land_in_target_image(seed, kind):
    rng = np.random.default_rng(seed)
    a, b = _args(kind, rng)
    assert membership_residual(target_tableau(kind), owedge(a, b, kind)) < 1e-12


def test_symmetric_product_formula(rng):
    l1, l2 = rng.normal(size=3), rng.normal(size=3)
    assert np.allclose(sym_product(l1, l2), np.outer(l1, l2) + np.outer(l2, l1))


def test_mixed_products_flip_sign(rng):
    for kind in (ProductKind.ONEFORM_SYM2, ProductKind.ONEFORM_S21):
        a, b = _args(kind, rng)
        assert np.allclose(owedge(a, b, kind), -owedge(b, a, kind))


def test_product_bilinear(rng):
    for kind in ProductKind:
        a, b = _args(kind, rng)
        a2, _ = _args(kind, rng)
        lhs = owedge(2.0 * a + a2, b, kind)
        assert np.allclose(lhs, 2.0 * owedge(a, b, kind) + owedge(a2, b, kind))


def test_kulkarni_symmetric_in_arguments(rng):
    a, b = _args(ProductKind.KULKARNI_NOMIZU, rng)
    assert np.allclose(kulkarni(a, b), kulkarni(b, a))


def test_valence_and_strict_errors(rng):
    with pytest.raises(ValueError):
        owedge(rng.normal(size=3), rng.normal(size=(3, 3)), ProductKind.SYM1X1)
    with pytest.raises(ValueError):
        owedge(rng.normal(size=3), rng.normal(size=(3, 3)), ProductKind.ONEFORM_SYM2, strict=True)
    with pytest.raises(ValueError):
        a = rng.normal(size=(3, 3))
        owedge(a + a.T, a + a.T, ProductKind.TWOFORM_TWOFORM, strict=True)
    with pytest.raises(ValueError):
        owedge(rng.normal(size=3), rng.normal(size=(3, 3, 3)), ProductKind.ONEFORM_S21, strict=True)


def test_derivation_is_leibniz(rng):
    A = rng.normal(size=(3, 3))
    for kind in ProductKind:
        a, b = _args(kind, rng)
        lhs = derive(A, owedge(a, b, kind))
        rhs = owedge(derive(A, a), b, kind) + owedge(a, derive(A, b), kind)
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_derivation_matches_infinitesimal_pullback(rng):
    # (A.t) = d/ds t(exp(-sA) ., exp(-sA) .) at s = 0
    A = rng.normal(size=(3, 3))
    t = rng.normal(size=(3, 3, 3))
    h = 1e-5

    def pulled(s):
        M = np.eye(3) - s * A
        return np.einsum("abc,ai,bj,ck->ijk", t, M, M, M)

    assert np.allclose((pulled(h) - pulled(-h)) / (2 * h), derive(A, t), atol=1e-7)


def test_derive_stack_matches_loop(rng):
    A = rng.normal(size=(2, 3, 3, 3))
    t = rng.normal(size=(3, 3))
    out = derive_stack(A, t)
    for i in range(2):
        for j in range(3):
            assert np.allclose(out[i, j], derive(A[i, j], t))


def test_metric_trace_and_insert(rng):
    G = _metric(rng, 3)
    assert np.isclose(metric_trace(G, G), 3.0)
    t = rng.normal(size=(3, 3, 3))
    assert np.allclose(metric_trace(t, None, (0, 2)), np.einsum("aba->b", t))
    x = rng.normal(size=3)
    assert np.allclose(insert(x, t), np.einsum("a,abc->bc", x, t))
    with pytest.raises(ValueError):
        metric_trace(t, G, (1, 1))
    with pytest.raises(ValueError):
        insert(x, np.float64(1.0))


def test_sharp_flat_round_trip(rng):
    G = _metric(rng, 4)
    x = rng.normal(size=4)
    assert np.allclose(sharp(flat(x, G), G), x)


def test_wedge_endomorphisms(rng):
    G = _metric(rng, 3)
    x, y, u = rng.normal(size=(3, 3))
    W = wedge_endomorphism(x, y, G)
    assert np.allclose(W @ u, (x @ G @ u) * y - (y @ G @ u) * x)
    S = wedge_stack(G)
    assert np.allclose(np.einsum("i,j,ijlk->lk", x, y, S), W)
    # skew-adjoint with respect to G
    assert np.allclose(G @ W, -(G @ W).T)


def test_dual_basis_stack(rng):
    G = _metric(rng, 3)
    k = project(T2, rng.normal(size=(3, 3)))
    st_ = owedge_dual_basis(k, ProductKind.ONEFORM_SYM2, G)
    for a in range(3):
        assert np.allclose(st_[a], owedge(k, G[a], ProductKind.ONEFORM_SYM2))


def test_to_frame_and_symmetrization(rng):
    G = _metric(rng, 3)
    E = np.linalg.inv(np.linalg.cholesky(G)).T
    assert np.allclose(to_frame(G, E), np.eye(3))
    t = rng.normal(size=(3, 3, 3))
    s = full_symmetrization(t)
    assert np.allclose(s, s.transpose(1, 0, 2))
    assert np.allclose(s, s.transpose(2, 1, 0))
    assert np.allclose(full_symmetrization(s), s)
