import numpy as np
import pytest

from symkilling import invariants as inv


@pytest.mark.parametrize("name,kind,N", [("u2", "u", 4), ("sp2", "sp", 8), ("so5", "so", 5),
                                         ("su3", "su", 6), ("g2", "g2", 7), ("spin7", "spin7", 8)])
def test_parse_algebra(name, kind, N):
    assert inv.parse_algebra(name) == (kind, N)
    assert inv.canonical_name(kind, N) == name


def test_parse_algebra_errors():
    with pytest.raises(ValueError):
        inv.parse_algebra("e8")
    with pytest.raises(ValueError):
        inv.parse_algebra("u2", 6)
    assert inv.parse_algebra("so", 6) == ("so", 6)
    with pytest.raises(ValueError):
        inv.parse_algebra("sp", 6)


@pytest.mark.parametrize("kind,N", [("so", 5), ("u", 6), ("su", 6), ("sp", 8), ("g2", 7),
                                    ("spin7", 8)])
def test_algebras_close_and_are_skew(kind, N):
    alg = inv.build_algebra(kind, N)
    assert alg.dim == inv.expected_dimension(kind, N)
    assert inv.closure_residual(alg) < 1e-10
    assert np.allclose(alg.generators, -alg.generators.transpose(0, 2, 1))


def test_g2_and_spin7_preserve_their_forms():
    phi = inv.associative_form()
    for X in inv.build_algebra("g2", 7).generators:
        assert np.max(np.abs(inv._derive_plain(X, phi))) < 1e-10
    psi = inv.cayley_form()
    for X in inv.build_algebra("spin7", 8).generators:
        assert np.max(np.abs(inv._derive_plain(X, psi))) < 1e-10


def test_curvature_space_dimension():
    for N in (3, 4, 5):
        assert inv.curvature_space_dimension(N) == N * N * (N * N - 1) // 12


@pytest.mark.parametrize("name,mult", [("so4", 1), ("so5", 1), ("u2", 2), ("u3", 2), ("su3", 2)])
def test_small_multiplicities(name, mult):
    alg = inv.build_algebra(*inv.parse_algebra(name))
    assert inv.curvature_trivial_multiplicity(alg) == mult
    rep = inv.explicit_span_report(alg)
    assert rep["spans"]
    assert rep["explicit_rank"] == mult


def test_multiplicity_basis_independent(rng):
    alg = inv.build_algebra("u", 4)
    Q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    assert inv.curvature_trivial_multiplicity(inv.conjugated(alg, Q)) == 2


def test_su2_in_dimension_four_is_larger():
    # informational value; the explicit products do not account for all of it
    alg = inv.build_algebra("su", 4)
    assert inv.curvature_trivial_multiplicity(alg) == 6
