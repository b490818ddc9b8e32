"""Hopf Sasakian and 3-Sasakian structures on odd-dimensional unit spheres.

The cone over the unit sphere S^n is R^{n+1} minus the origin, so a (hyper)Kähler
structure on the cone is a set of constant orthogonal complex structures I_k.
Kähler forms are omega_k(u, v) = <I_k u, v> and the characteristic forms are
eta_k(x) = omega_k(p, x) = <I_k p, x> at p on the sphere.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import jax
import jax.numpy as jnp

from . import geometry as geo
from . import cone
from .geometry import ManifoldModel, TensorField
from .killing import C_kappa_field, _norm, _ortho, killing_residual, pair_defect
from .multilinear import ProductKind, owedge, sym_product

# ----------------------------------------------------------------------------
# complex and quaternionic structures


def quaternion_structures(N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Left multiplication by i, j, k on H^m = R^N, a quaternion stored as (a, b, c, d)."""
    if N % 4:
        raise ValueError("quaternionic structures need N divisible by 4")
    # i(a+bi+cj+dk) = -b + ai - dj + ck, and so on
    qi = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
    qj = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)
    qk = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float)
    eye = np.eye(N // 4)
    return tuple(np.kron(eye, q) for q in (qi, qj, qk))


def complex_structure(N: int) -> np.ndarray:
    """Standard complex structure on C^m = R^N (coordinates (x1, y1, x2, y2, ...))."""
    if N % 2:
        raise ValueError("a complex structure needs N even")
    return np.kron(np.eye(N // 2), np.array([[0.0, -1.0], [1.0, 0.0]]))


def kaehler_form(I) -> np.ndarray:
    """omega(u, v) = <I u, v> as a matrix omega[a, b]."""
    return np.asarray(I).T.copy()


@dataclass(frozen=True, eq=False)
class SasakiStructure:
    structures: tuple
    model: ManifoldModel
    quaternion_sign: float | None = None

    @property
    def count(self) -> int:
        return len(self.structures)

    @property
    def N(self) -> int:
        return self.model.n + 1


def validate_structures(Is, tol: float = 1e-12) -> float | None:
    """Check I^2 = -1, I^T = -I and anticommutation; return the sign s in I1 I2 = s I3."""
    N = Is[0].shape[0]
    eye = np.eye(N)
    for I in Is:
        if np.max(np.abs(I @ I + eye)) > tol or np.max(np.abs(I + I.T)) > tol:
            raise ValueError("not an orthogonal complex structure")
    for a in range(len(Is)):
        for b in range(a + 1, len(Is)):
            if np.max(np.abs(Is[a] @ Is[b] + Is[b] @ Is[a])) > tol:
                raise ValueError("complex structures do not anticommute")
    if len(Is) == 3:
        P = Is[0] @ Is[1]
        for s in (1.0, -1.0):
            if np.max(np.abs(P - s * Is[2])) <= tol:
                return s
        raise ValueError("I1 I2 is not +-I3")
    return None


def make_structure(kind: str, dim: int, validate: bool = True, structures=None) -> SasakiStructure:
    """``kind`` is 'sasaki' (one structure) or '3sasaki' (three); the sphere is S^dim."""
    N = dim + 1
    if structures is None:
        if kind == "sasaki":
            structures = (complex_structure(N),)
        elif kind == "3sasaki":
            structures = quaternion_structures(N)
        else:
            raise ValueError(f"unknown structure kind {kind!r}")
    structures = tuple(np.asarray(I, dtype=float) for I in structures)
    if any(I.shape != (N, N) for I in structures) or not 1 <= len(structures) <= 3:
        raise ValueError("structures must be 1 to 3 matrices of size dim+1")
    sign = validate_structures(structures) if validate else None
    return SasakiStructure(structures, geo.RoundSphere(dim), sign)


# ----------------------------------------------------------------------------
# characteristic forms and their products


@lru_cache(maxsize=None)
def _eta_fn(model: ManifoldModel):
    def fn(u, I):
        P = model.embedding(u)
        J = jax.jacfwd(model.embedding)(u)
        return (I @ P) @ J

    return fn


@lru_cache(maxsize=None)
def _deta_fn(model: ManifoldModel):
    eta = _eta_fn(model)

    def fn(u, I):
        D = jax.jacfwd(eta)(u, I)  # D[b, a] = d_a eta_b
        return D.T - D

    return fn


@lru_cache(maxsize=None)
def _product_fn(model: ManifoldModel):
    eta = _eta_fn(model)

    def fn(u, p):
        Ii, Ij = p
        return sym_product(eta(u, Ii), eta(u, Ij))

    return fn


@lru_cache(maxsize=None)
def _pair_C_fn(model: ManifoldModel):
    deta = _deta_fn(model)

    def fn(u, p):
        (Ii, Ij), c = p
        return c * owedge(deta(u, Ii), deta(u, Ij), ProductKind.TWOFORM_TWOFORM)

    return fn


def _check_index(S: SasakiStructure, *idx):
    for k in idx:
        if not 1 <= k <= S.count:
            raise ValueError(f"structure index {k} out of range 1..{S.count}")


def characteristic_form(S: SasakiStructure, k: int) -> TensorField:
    _check_index(S, k)
    return TensorField(_eta_fn(S.model), jnp.asarray(S.structures[k - 1]), 1, f"eta{k}")


def characteristic_differential(S: SasakiStructure, k: int) -> TensorField:
    """d eta_k(x, y) = nabla_x eta(y) - nabla_y eta(x)."""
    _check_index(S, k)
    return TensorField(_deta_fn(S.model), jnp.asarray(S.structures[k - 1]), 2, f"deta{k}")


def sasaki_killing_tensor(S: SasakiStructure, i: int, j: int, scale: float = 1.0) -> TensorField:
    """eta_i . eta_j (symmetric product); ``scale`` multiplies eta_i."""
    _check_index(S, i, j)
    p = (scale * jnp.asarray(S.structures[i - 1]), jnp.asarray(S.structures[j - 1]))
    return TensorField(_product_fn(S.model), p, 2, f"eta{i}.eta{j}")


def pair_C_field(S: SasakiStructure, i: int, j: int, coefficient: float = 0.25,
                 scale: float = 1.0) -> TensorField:
    """coefficient * d eta_i (.) d eta_j with the 2-form product."""
    _check_index(S, i, j)
    p = ((scale * jnp.asarray(S.structures[i - 1]), jnp.asarray(S.structures[j - 1])),
         jnp.asarray(coefficient))
    return TensorField(_pair_C_fn(S.model), p, 4, "C-pair")


def reeb_vector(S: SasakiStructure, k: int, point) -> np.ndarray:
    """Chart components of xi = I_k p."""
    _check_index(S, k)
    u = jnp.asarray(S.model.check_point(point))
    P = np.asarray(S.model.embedding(u))
    J = np.asarray(jax.jacfwd(S.model.embedding)(u))
    v, *_ = np.linalg.lstsq(J, S.structures[k - 1] @ P, rcond=None)
    return v


def form_checks(S: SasakiStructure, k: int, point) -> dict:
    """Unit length, Killing property, eta(xi) = 1, nabla_xi eta = 0 and d eta = 2 omega."""
    eta = characteristic_form(S, k)
    e, De = geo.derivatives(eta, S.model, point, 1)
    G = geo.metric_at(S.model, point)
    E = _ortho(G)
    xi = reeb_vector(S, k, point)
    u = jnp.asarray(S.model.check_point(point))
    J = np.asarray(jax.jacfwd(S.model.embedding)(u))
    omega = J.T @ kaehler_form(S.structures[k - 1]) @ J
    dE = np.asarray(characteristic_differential(S, k)(point))
    return {
        "unit_length": abs(float(e @ np.linalg.solve(G, e)) - 1.0),
        "killing_one_form": _norm(De + De.T, E),
        "eta_of_reeb": abs(float(e @ xi) - 1.0),
        "reeb_derivative": _norm(np.einsum("a,ab->b", xi, De), E),
        "d_eta_vs_omega": _norm(dE - 2 * omega, E),
        "d_eta_vs_alternation": _norm(dE - (De - De.T), E),
    }


def trace_gradient(kfield: TensorField, model: ManifoldModel, point) -> float:
    """|d tr kappa| in a frame."""
    from .multilinear import metric_trace

    _, Dk = geo.derivatives(kfield, model, point, 1)
    G = geo.metric_at(model, point)
    return _norm(metric_trace(Dk, G, (1, 2)), _ortho(G))


# ----------------------------------------------------------------------------
# the cone correspondence


def ambient_product(S: SasakiStructure, i: int, j: int) -> np.ndarray:
    """omega_i (.) omega_j on R^{n+1}; constant, hence parallel on the cone."""
    _check_index(S, i, j)
    wi, wj = (kaehler_form(S.structures[k - 1]) for k in (i, j))
    return np.asarray(owedge(wi, wj, ProductKind.TWOFORM_TWOFORM))


def pullback_to_cone(T, model: ManifoldModel, point, r: float = 1.0) -> np.ndarray:
    """Components of a constant ambient tensor in the cone basis (d_1..d_n, d_r) at (p, r)."""
    u = jnp.asarray(model.check_point(point))
    P = np.asarray(model.embedding(u))
    J = np.asarray(jax.jacfwd(model.embedding)(u))
    Jc = np.hstack([r * J, P[:, None]])
    out = np.asarray(T)
    for a in range(out.ndim):
        out = np.moveaxis(np.tensordot(out, Jc, axes=([a], [0])), -1, a)
    return out


def cone_correspondence_defect(S: SasakiStructure, i: int, j: int, point,
                               coefficient: float = 0.25) -> dict:
    """Residuals of the correspondence kappa = eta_i . eta_j <-> omega_i (.) omega_j.

    triple:     decompose(omega_i (.) omega_j) at r = 1 vs (kappa, kappa^1, C^kappa)
    pair_C:     C^kappa vs coefficient * d eta_i (.) d eta_j
    pair:       both pair equations with C = coefficient * d eta_i (.) d eta_j
    horizontal: horizontal defect of (kappa, kappa^1, C^kappa)
    """
    model = S.model
    kf = sasaki_killing_tensor(S, i, j)
    G = geo.metric_at(model, point)
    E = _ortho(G)
    tri = cone.build_S_kappa(kf, model, point)
    amb = cone.decompose(pullback_to_cone(ambient_product(S, i, j), model, point))
    cf = pair_C_field(S, i, j, coefficient)
    C = np.asarray(cf(point))
    p1, p2 = pair_defect(kf, cf, model, point)
    return {
        "triple": max(_norm(a - b, E) for a, b in zip(amb.parts, tri.parts)),
        "pair_C": _norm(C - tri.gamma, E),
        "pair": max(p1, p2),
        "horizontal": cone.S_kappa_horizontal_defect(kf, model, point),
    }


def coefficient_normalizations(S: SasakiStructure, i: int, j: int, point) -> dict:
    """C^kappa against two normalizations of the 1/4 in front of d eta_i (.) d eta_j.

    'with_product_quarter': 1/4 times the 2-form product, which carries its own 1/4.
    'quarter_absorbed': the 1/4 is the one inside the product, i.e. coefficient 1.
    """
    model = S.model
    G = geo.metric_at(model, point)
    E = _ortho(G)
    Ck = np.asarray(C_kappa_field(sasaki_killing_tensor(S, i, j), model)(point))
    out = {}
    for name, c in (("with_product_quarter", 0.25), ("quarter_absorbed", 1.0)):
        out[name] = _norm(Ck - np.asarray(pair_C_field(S, i, j, c)(point)), E)
    return out


# ----------------------------------------------------------------------------
# span of the Killing tensors


def span_members(S: SasakiStructure) -> list[TensorField]:
    from .killing import metric_field

    out = [metric_field(S.model)]
    for i in range(1, S.count + 1):
        for j in range(i, S.count + 1):
            out.append(sasaki_killing_tensor(S, i, j))
    return out


def expected_span_dimension(S: SasakiStructure) -> int:
    m = S.count
    return 1 + m * (m + 1) // 2


def sasaki_span_dimension(S: SasakiStructure, samples: int = 4, seed: int = 0,
                          rtol: float = 1e-9) -> int:
    """Rank of {g} + {eta_i . eta_j : i <= j} as functions, from pointwise values at samples."""
    rng = np.random.default_rng(seed)
    pts = [geo.sample_point(S.model, rng) for _ in range(samples)]
    rows = []
    for f in span_members(S):
        rows.append(np.concatenate([np.ravel(np.asarray(f(u))) for u in pts]))
    s = np.linalg.svd(np.array(rows), compute_uv=False)
    return int(np.sum(s > rtol * s[0]))


def span_is_degenerate(S: SasakiStructure, **kw) -> bool:
    """Guard: True when the span is smaller than 1 + m(m+1)/2 (e.g. duplicated structures)."""
    return sasaki_span_dimension(S, **kw) < expected_span_dimension(S)
