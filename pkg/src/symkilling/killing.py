"""Symmetric Killing 2-tensors: prolongation, curvature terms, identities, holonomy.

All tensors are chart coordinate components; the metric Gram matrix ``G`` is
passed where needed. Residuals are reported as max-norms of components in a
G-orthonormal frame so tolerances do not depend on the conformal factor.

The algebraic routines (``F1``, ``F2``, ...) accept optional trailing batch
axes, which the transport code uses to push a whole fiber basis at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import jax
import jax.numpy as jnp
from scipy.integrate import solve_ivp

from . import geometry as geo
from .geometry import ManifoldModel, TensorField
from .multilinear import (
    ProductKind,
    derive_stack,
    full_symmetrization,
    kulkarni,
    metric_trace,
    owedge,
    owedge_dual_basis,
    to_frame,
    wedge_stack,
)
from .young import T2, T21, T22, membership_residual, project

# ----------------------------------------------------------------------------
# fields


def random_curvature_tensor(dim: int, rng) -> np.ndarray:
    """Random element of the (2,2) projector image in ``dim`` dimensions."""
    return project(T22, rng.normal(size=(dim,) * 4))


@lru_cache(maxsize=None)
def _ambient_kappa_fn(model: ManifoldModel):
    def fn(u, S):
        P = model.embedding(u)
        J = jax.jacfwd(model.embedding)(u)
        return 0.5 * jnp.einsum("abcd,a,b,ci,dj->ij", S, P, P, J, J)

    return fn


def ambient_killing_field(model: ManifoldModel, S) -> TensorField:
    """kappa(x, y) = 1/2 S(p, p, x, y) on a sphere, S a constant ambient curvature tensor."""
    if not model.is_sphere:
        raise ValueError("ambient construction needs an embedded sphere")
    S = np.asarray(S, dtype=float)
    if S.shape != (model.n + 1,) * 4:
        raise ValueError("ambient tensor has the wrong dimension")
    return TensorField(_ambient_kappa_fn(model), jnp.asarray(S), 2, "ambient-curvature")


@lru_cache(maxsize=None)
def _metric_fn(model: ManifoldModel):
    def fn(u, c):
        return c * model.metric(u)

    return fn


def metric_field(model: ManifoldModel, c: float = 1.0) -> TensorField:
    return TensorField(_metric_fn(model), jnp.asarray(float(c)), 2, "metric")


def _bump_fn(u, p):
    A, centers, widths = p
    w = jnp.exp(-jnp.sum((u[None, :] - centers) ** 2, axis=1) / widths**2)
    return jnp.einsum("m,mij->ij", w, A)


def bump_field(model: ManifoldModel, rng, count: int = 3) -> TensorField:
    """Random symmetric field built from smooth Gaussian bumps (negative control)."""
    n = model.n
    A = rng.normal(size=(count, n, n))
    A = A + A.transpose(0, 2, 1)
    centers = rng.normal(size=(count, n)) * 0.5
    widths = rng.uniform(0.6, 1.2, size=count)
    return TensorField(_bump_fn, tuple(jnp.asarray(a) for a in (A, centers, widths)), 2, "bump")


def jets(kfield: TensorField, model: ManifoldModel, point, order: int):
    return geo.derivatives(kfield, model, point, order)


def _ortho(G):
    return geo.orthonormal_frame(G)


def _norm(t, E) -> float:
    return float(np.max(np.abs(to_frame(np.asarray(t), E)))) if np.size(t) else 0.0


# ----------------------------------------------------------------------------
# Killing equation and prolongation variables


def killing_residual(kfield: TensorField, model: ManifoldModel, point, rng=None,
                     directions: int = 16) -> float:
    """max |nabla_x kappa(x,x)| over random unit x plus |Sym(nabla kappa)| (frame max-norm)."""
    rng = np.random.default_rng(0) if rng is None else rng
    _, Dk = jets(kfield, model, point, 1)
    G = geo.metric_at(model, point)
    xs = geo.unit_vectors(G, rng, directions)
    dirs = np.max(np.abs(np.einsum("ijk,ni,nj,nk->n", Dk, xs, xs, xs)))
    return float(dirs) + _norm(full_symmetrization(Dk), _ortho(G))


@dataclass
class ProlongationTriple:
    """(kappa, kappa^1, kappa^2) at a point, coordinate components."""

    kappa: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray

    def to_frame(self, E) -> "ProlongationTriple":
        return ProlongationTriple(*(to_frame(t, E) for t in self.parts))

    @property
    def parts(self):
        return (self.kappa, self.kappa1, self.kappa2)

    def membership_residuals(self):
        return (membership_residual(T2, self.kappa), membership_residual(T21, self.kappa1),
                membership_residual(T22, self.kappa2))


def fiber_dimension(n: int) -> int:
    return n * (n + 1) // 2 + n * (n * n - 1) // 3 + n * n * (n * n - 1) // 12


def killing_upper_bound(n: int) -> int:
    """1/3 C(n+2,2) C(n+1,2)."""
    from math import comb

    return comb(n + 2, 2) * comb(n + 1, 2) // 3


def prolong_variables(kfield: TensorField, model: ManifoldModel, point) -> ProlongationTriple:
    k, Dk, D2k = jets(kfield, model, point, 2)
    return ProlongationTriple(k, project(T21, Dk), project(T22, D2k))


# ----------------------------------------------------------------------------
# curvature terms


def curvature_action(Rend, t):
    """(R_{a,b} . t) for all basis pairs: shape (n, n) + t.shape."""
    return derive_stack(Rend, t)


def _Rk(Rend, k):
    # A[a,b,i,j,...] = -(R_ab)^m_i k[m,j,...] - (R_ab)^m_j k[i,m,...]
    return -np.einsum("abmi,mj...->abij...", Rend, k) - np.einsum("abmj,im...->abij...", Rend, k)


def F1(kappa, Rend):
    """First curvature term of the prolongation:

    F1(x1..x4) = 1/2 R_{x1,x2}k(x3,x4) + 1/4 S_34 S_12 R_{x3,x1}k(x2,x4),

    where S_ij sums over the swap of x_i and x_j. (The sign of the second term
    is the one for which nabla_{x1} k^1 = k^2 + F1 holds for Killing k,
    see tests.)
    """
    A = _Rk(Rend, kappa)
    s = (np.einsum("cabd...->abcd...", A) + np.einsum("cbad...->abcd...", A)
         + np.einsum("dabc...->abcd...", A) + np.einsum("dbac...->abcd...", A))
    return 0.5 * A + 0.25 * s


def F1_with_sign(kappa, Rend, sign: float):
    """F1 with an explicit sign in front of the 1/4 term (sign=-1 flips it)."""
    A = _Rk(Rend, kappa)
    s = (np.einsum("cabd...->abcd...", A) + np.einsum("cbad...->abcd...", A)
         + np.einsum("dabc...->abcd...", A) + np.einsum("dbac...->abcd...", A))
    return 0.5 * A + sign * 0.25 * s


def _F2_pieces(kappa, Dkappa, Rend, DRend):
    B = -np.einsum("cabmi,mj...->cabij...", DRend, kappa) - np.einsum(
        "cabmj,im...->cabij...", DRend, kappa)  # (nabla_c R)_ab . k
    C = -np.einsum("abmi,cmj...->abcij...", Rend, Dkappa) - np.einsum(
        "abmj,cim...->abcij...", Rend, Dkappa)  # R_ab acting on the k-slots of nabla_c k
    corr = np.einsum("abmc,mij...->abcij...", Rend, Dkappa)  # nabla_{R_ab e_c} k
    return B, C, corr


_P5 = T22.shifted(1)  # projector on slots 2..5


def F2(kappa, Dkappa, Rend, DRend):
    """Second curvature term (compact form).

    F2(x1..x5) = P_{23;45}[ nabla_{x4}(R_{x1,x5}.k(x2,x3) + 2 R_{x2,x5}.k(x1,x3))
                            + R_{x1,x5}.nabla_{x4}k(x2,x3) + R_{x2,x5}.nabla_{x4}k(x1,x3) ]

    In the first line the derivative is that of the tensor field R.k; in the
    second the endomorphism acts on all three slots of nabla k, including the
    derivative slot x4.
    """
    B, C, corr = _F2_pieces(kappa, Dkappa, Rend, DRend)
    nRk = B + np.einsum("abcij...->cabij...", C)  # nabla_c (R_ab . k)
    C3 = C - corr
    T = (np.einsum("daebc...->abcde...", nRk) + 2 * np.einsum("dbeac...->abcde...", nRk)
         + np.einsum("aedbc...->abcde...", C3) + np.einsum("bedac...->abcde...", C3))
    return project(_P5, T)


def F2_expanded(kappa, Dkappa, Rend, DRend, correction_sign: float = 1.0):
    """Product-rule expansion of :func:`F2`:

    P[ nabla_{x4}R_{x1,x5}.k(x2,x3) + 2 nabla_{x4}R_{x2,x5}.k(x1,x3)
       + 2 R_{x1,x5}.nabla_{x4}k(x2,x3) + 3 R_{x2,x5}.nabla_{x4}k(x1,x3)
       + c (nabla_{R_{x1,x5}x4}k(x2,x3) + 2 nabla_{R_{x2,x5}x4}k(x1,x3)) ]

    with R acting on all slots of nabla k. The compact form is reproduced for
    c = +1.
    """
    B, C, corr = _F2_pieces(kappa, Dkappa, Rend, DRend)
    C3 = C - corr
    T = (np.einsum("daebc...->abcde...", B) + 2 * np.einsum("dbeac...->abcde...", B)
         + 2 * np.einsum("aedbc...->abcde...", C3) + 3 * np.einsum("bedac...->abcde...", C3)
         + correction_sign * (np.einsum("aedbc...->abcde...", corr)
                              + 2 * np.einsum("bedac...->abcde...", corr)))
    return project(_P5, T)


def F1_unit_rhs(kappa, G):
    """x -| (g (.) k) - 2 k (.) x#, stacked over x = e_a."""
    return kulkarni(G, kappa) - 2 * owedge_dual_basis(kappa, ProductKind.ONEFORM_SYM2, G)


def F2_unit_rhs(kappa1, G):
    """-g (.) (x -| k^1) - k^1 (.) x#, stacked over x = e_a."""
    n = G.shape[0]
    return np.stack([-kulkarni(G, kappa1[a]) for a in range(n)]) - owedge_dual_basis(
        kappa1, ProductKind.ONEFORM_S21, G)


# ----------------------------------------------------------------------------
# prolongation, pair and nullity residuals


def prolongation_defect(kfield: TensorField, model: ManifoldModel, point):
    """Residuals of nabla k = k^1, nabla k^1 = k^2 + F1, nabla k^2 = F2."""
    k, Dk, D2k, D3k = jets(kfield, model, point, 3)
    g = geo.geometry_at(model, point)
    E = _ortho(g.G)
    k1, k2 = project(T21, Dk), project(T22, D2k)
    Dk1 = project(T21.shifted(1), D2k)
    Dk2 = project(_P5, D3k)
    r1 = _norm(Dk - k1, E)
    r2 = _norm(Dk1 - k2 - F1(k, g.Rend), E)
    r3 = _norm(Dk2 - F2(k, Dk, g.Rend, g.DRend), E)
    return r1, r2, r3


@lru_cache(maxsize=None)
def _C_kappa_fn(kfn, model: ManifoldModel):
    fns = geo.derivative_functions(kfn, model, 2)

    def fn(u, p):
        return project(T22, fns[2](u, p)) + kulkarni(fns[0](u, p), model.metric(u))

    return fn


def C_kappa_field(kfield: TensorField, model: ManifoldModel) -> TensorField:
    """C^k = k^2 + k (.) g as a field."""
    return TensorField(_C_kappa_fn(kfield.fn, model), kfield.params, 4, "C-kappa")


def pair_residual_tensors(k, Dk, D2k, C, DC, G):
    """Left-minus-right sides of the pair equations, stacked over the direction x.

    C(x,.,.,.) = nabla_x nabla k + 2 k (.) x#   and   nabla_x C = -nabla k (.) x#.
    """
    e1 = C - D2k - 2 * owedge_dual_basis(k, ProductKind.ONEFORM_SYM2, G)
    e2 = DC + owedge_dual_basis(Dk, ProductKind.ONEFORM_S21, G)
    return e1, e2


def pair_defect(kfield: TensorField, cfield: TensorField, model: ManifoldModel, point):
    k, Dk, D2k = jets(kfield, model, point, 2)
    C, DC = geo.derivatives(cfield, model, point, 1)
    G = geo.metric_at(model, point)
    e1, e2 = pair_residual_tensors(k, Dk, D2k, C, DC, G)
    E = _ortho(G)
    return _norm(e1, E), _norm(e2, E)


def nullity_defect(kfield: TensorField, model: ManifoldModel, point):
    """R_{x,y}.k + (x^y).k and the same for nabla k, over all basis pairs."""
    k, Dk = jets(kfield, model, point, 1)
    g = geo.geometry_at(model, point)
    W = np.asarray(wedge_stack(g.G))
    E = _ortho(g.G)
    r1 = derive_stack(g.Rend + W, k)
    r2 = derive_stack(g.Rend + W, Dk)
    # frame norm: directions x, y are slots too
    return _norm(r1, E), _norm(r2, E)


# ----------------------------------------------------------------------------
# traces, reconstruction of kappa from C, Weitzenboeck


@lru_cache(maxsize=None)
def _scal_C_fn(cfn, model: ManifoldModel):
    def fn(u, p):
        Ric = metric_trace(cfn(u, p), model.metric(u), (2, 3))
        return metric_trace(Ric, model.metric(u), (0, 1))

    return fn


def ricci_C(C, G):
    """Ric^C(x,y) = tr C(x, y, ., .)."""
    return metric_trace(C, G, (2, 3))


def kappa_from_C(cfield: TensorField, model: ManifoldModel, point) -> np.ndarray:
    """k^C = -1/2 (Ric^C + 1/4 nabla^2 s^C) + (s^C - 1/4 lap s^C) / (2(n-1)) g."""
    n = model.n
    if n < 2:
        raise ValueError("reconstruction from C needs n >= 2")
    G = geo.metric_at(model, point)
    C = np.asarray(cfield(point))
    sfield = TensorField(_scal_C_fn(cfield.fn, model), cfield.params, 0)
    s, ds, D2s = geo.derivatives(sfield, model, point, 2)
    lap = -metric_trace(D2s, G)
    Ric_t = ricci_C(C, G) + 0.25 * D2s
    s_t = s - 0.25 * lap
    return -0.5 * Ric_t + s_t / (2 * (n - 1)) * G


def q_R(kappa, Rend, G):
    """q(R)k(x3,x4) = -sum_i R_{x3,e_i}.k(x4,e_i) + R_{x4,e_i}.k(x3,e_i)."""
    A = _Rk(Rend, kappa)  # A[a, b, i, j]
    Ginv = np.linalg.inv(G)
    t = np.einsum("bj,cbdj->cd", Ginv, A)
    return -(t + t.T)


def rough_laplacian(D2t, G):
    """nabla^* nabla t = -tr_{12} nabla^2 t."""
    return -metric_trace(D2t, G, (0, 1))


def weitzenboeck_defect(kfield: TensorField, model: ManifoldModel, point) -> float:
    k, Dk, D2k = jets(kfield, model, point, 2)
    g = geo.geometry_at(model, point)
    lhs = rough_laplacian(D2k, g.G)
    hess_tr = metric_trace(D2k, g.G, (2, 3))
    return _norm(lhs - q_R(k, g.Rend, g.G) + hess_tr, _ortho(g.G))


def trace_identities(kfield: TensorField, model: ManifoldModel, point, cfield=None) -> dict:
    """Residuals of d tr k = 2 delta k, ds^C = -4 d tr k, and both forms of Ric^C."""
    n = model.n
    k, Dk, D2k = jets(kfield, model, point, 2)
    G = geo.metric_at(model, point)
    E = _ortho(G)
    cfield = C_kappa_field(kfield, model) if cfield is None else cfield
    C = np.asarray(cfield(point))
    sfield = TensorField(_scal_C_fn(cfield.fn, model), cfield.params, 0)
    _, ds = geo.derivatives(sfield, model, point, 1)
    dtr = metric_trace(Dk, G, (1, 2))
    delta = -metric_trace(Dk, G, (0, 1))
    tr = metric_trace(k, G)
    hess_tr = metric_trace(D2k, G, (2, 3))
    Ric = ricci_C(C, G)
    ric1 = hess_tr + 2 * (G * tr - k)
    ric2 = -rough_laplacian(D2k, G) + 2 * (n - 1) * k
    return {
        "dtr_vs_divergence": _norm(dtr - 2 * delta, E),
        "ds_vs_dtr": _norm(ds + 4 * dtr, E),
        "ricci_first_form": _norm(Ric - ric1, E),
        "ricci_second_form": _norm(Ric - ric2, E),
    }


# ----------------------------------------------------------------------------
# the Killing connection: transport and holonomy


@lru_cache(maxsize=None)
def fiber_basis(n: int) -> np.ndarray:
    """Orthonormal basis (columns) of Sym^2 + S_(2,1) + S_(2,2) in flattened coordinates."""
    from .young import projector_matrix

    blocks = []
    for T, d in ((T2, 2), (T21, 3), (T22, 4)):
        P = projector_matrix(T, n)
        U, s, _ = np.linalg.svd(P)
        blocks.append(U[:, s > 1e-9 * s[0]])
    sizes = [n**2, n**3, n**4]
    out = np.zeros((sum(sizes), sum(b.shape[1] for b in blocks)))
    r = c = 0
    for b, sz in zip(blocks, sizes):
        out[r:r + sz, c:c + b.shape[1]] = b
        r += sz
        c += b.shape[1]
    return out


def _split(state, n):
    a, b = n**2, n**3
    B = state.shape[1:]
    return (state[:a].reshape((n,) * 2 + B), state[a:a + b].reshape((n,) * 3 + B),
            state[a + b:].reshape((n,) * 4 + B))


def _corr(T, Gam, v):
    """v^c Gamma^m_{c i_a} T_{..m..} summed over slots, trailing batch axis kept."""
    d = T.ndim - 1
    out = np.zeros_like(T)
    Gv = np.einsum("c,mci->mi", v, Gam)
    for a in range(d):
        out = out + np.moveaxis(np.tensordot(Gv, T, axes=([0], [a])), 0, a)
    return out


def connection_rhs(u, v, state, model: ManifoldModel, connection: str = "killing"):
    """d/dt of the coordinate components of a parallel triple along a curve."""
    n = model.n
    g = geo.geometry_at(model, u)
    if connection == "killing":
        Rend, DRend = g.Rend, g.DRend
    elif connection == "unit":
        Rend, DRend = geo.unit_curvature(g.G), np.zeros_like(g.DRend)
    else:
        raise ValueError(f"unknown connection {connection!r}")
    k, k1, k2 = _split(state, n)
    f1 = np.einsum("c,c...->...", v, F1(k, Rend))
    f2 = np.einsum("c,c...->...", v, F2(k, k1, Rend, DRend))
    dk = _corr(k, g.Gam, v) + np.einsum("c,c...->...", v, k1)
    dk1 = _corr(k1, g.Gam, v) + np.einsum("c,c...->...", v, k2) + f1
    dk2 = _corr(k2, g.Gam, v) + f2
    B = state.shape[1:]
    return np.concatenate([dk.reshape((-1,) + B), dk1.reshape((-1,) + B), dk2.reshape((-1,) + B)])


def flatten_triple(t: ProlongationTriple) -> np.ndarray:
    return np.concatenate([np.ravel(p) for p in t.parts])


def transport_state(state0, loop, model: ManifoldModel, connection: str = "killing",
                    rtol: float = 1e-11, atol: float = 1e-13) -> np.ndarray:
    """Integrate the transport ODE along ``loop`` (t in [0,1]) for the columns of state0."""
    state0 = np.asarray(state0, dtype=float)
    vec = state0.ndim == 1
    S0 = state0[:, None] if vec else state0
    shape = S0.shape

    def rhs(t, y):
        out = connection_rhs(loop.position(t), loop.velocity(t), y.reshape(shape), model,
                             connection)
        return out.ravel()

    sol = solve_ivp(rhs, (0.0, 1.0), S0.ravel(), method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"transport failed: {sol.message}")
    out = sol.y[:, -1].reshape(shape)
    return out[:, 0] if vec else out


def transport(triple: ProlongationTriple, loop, model: ManifoldModel,
              connection: str = "killing") -> ProlongationTriple:
    n = model.n
    out = transport_state(flatten_triple(triple)[:, None], loop, model, connection)
    return ProlongationTriple(*(p[..., 0] for p in _split(out, n)))


def holonomy(loop, model: ManifoldModel, connection: str = "killing"):
    """Holonomy matrix on the fiber basis, and the leakage out of the fiber."""
    Bf = fiber_basis(model.n)
    X = transport_state(Bf, loop, model, connection)
    H = Bf.T @ X
    leak = float(np.max(np.abs(X - Bf @ H)))
    return H, leak


def fixed_space_dimension(holonomies, threshold: float = 1e-5) -> int:
    m = holonomies[0].shape[0]
    M = np.vstack([H - np.eye(m) for H in holonomies])
    s = np.linalg.svd(M, compute_uv=False)
    return int(m - np.sum(s > threshold))


def killing_dimension(model: ManifoldModel, n_loops: int = 20, seed: int = 0,
                      connection: str = "killing", threshold: float = 1e-5) -> int:
    """Dimension of the joint fixed space of loop holonomies of the Killing connection."""
    if n_loops < 10:
        raise ValueError("need at least 10 loops")
    rng = np.random.default_rng(seed)
    loops = geo.sample_loops(model, rng, n_loops)
    hols = [holonomy(lp, model, connection)[0] for lp in loops]
    return fixed_space_dimension(hols, threshold)


# ----------------------------------------------------------------------------
# the one-dimensional exception


def _line_fn(u, p):
    a, b = p
    return (a + b * u[0]) * jnp.ones((1, 1))


def affine_line_field(a: float, b: float) -> TensorField:
    """kappa = (a + b t) dt^2 on the real line (quadratic form with affine coefficients)."""
    return TensorField(_line_fn, (jnp.asarray(float(a)), jnp.asarray(float(b))), 2, "affine-line")


def _zero4_fn(u, p):
    return jnp.zeros((u.shape[0],) * 4) * p


def zero_curvature_field(scale: float = 1.0) -> TensorField:
    return TensorField(_zero4_fn, jnp.asarray(float(scale)), 4, "zero")
