"""The metric cone r^2 g + dr^2 over a chart model.

Cone tensors are stored in the basis (d_1, ..., d_n, d_r) at a point (u, r);
index ``n`` is the radial one. A symmetrized algebraic curvature tensor on the
cone splits into a triple (alpha, beta, gamma) of base tensors:
alpha = 1/2 S(d_r, d_r, ., .), beta = S(d_r, ., ., .) and gamma = S restricted
to horizontal slots, with inverse S = alpha (.) dr.dr + beta (.) dr + gamma.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import jax
import jax.numpy as jnp

from . import geometry as geo
from .geometry import ManifoldModel, TensorField
from .killing import C_kappa_field, _norm, _ortho, jets
from .multilinear import ProductKind, derive_stack, kulkarni, owedge, owedge_dual_basis, sym_product
from .young import T21, T22, membership_residual, project


@dataclass
class ConeTriple:
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    @property
    def parts(self):
        return (self.alpha, self.beta, self.gamma)

    def __sub__(self, other: "ConeTriple") -> "ConeTriple":
        return ConeTriple(*(a - b for a, b in zip(self.parts, other.parts)))

    def maxabs(self) -> float:
        return max(float(np.max(np.abs(p))) for p in self.parts)

    def membership_residuals(self):
        from .young import T2

        return (membership_residual(T2, self.alpha), membership_residual(T21, self.beta),
                membership_residual(T22, self.gamma))


def _extend(t, n: int):
    """Pull back a base tensor to the cone basis (zero radial components)."""
    xp = np if isinstance(t, np.ndarray) else jnp
    pad = [(0, 1)] * t.ndim
    return xp.pad(t, pad)


def _dr(n: int) -> np.ndarray:
    e = np.zeros(n + 1)
    e[n] = 1.0
    return e


def assemble(t: ConeTriple, r: float = 1.0) -> np.ndarray:
    """S = alpha (.) dr.dr + beta (.) dr + gamma on the (n+1)-dimensional cone basis at radius r.

    The components are taken as given at (p, r), so powers of r are already in
    them (see :func:`build_S_kappa`); in the coordinate basis the assembly itself
    does not depend on r.
    """
    if r <= 0:
        raise ValueError("cone radius must be positive")
    n = t.alpha.shape[0]
    dr = _dr(n)
    a, b, c = (_extend(np.asarray(p), n) for p in t.parts)
    return kulkarni(a, sym_product(dr, dr)) + owedge(b, dr, ProductKind.ONEFORM_S21) + c


def decompose(S, check: bool = True) -> ConeTriple:
    S = np.asarray(S)
    if check and membership_residual(T22, S) >= 1e-6:
        raise ValueError("tensor is not in the (2,2) projector image")
    n = S.shape[0] - 1
    h = slice(0, n)
    return ConeTriple(0.5 * S[n, n, h, h], S[n, h, h, h], S[h, h, h, h])


# ----------------------------------------------------------------------------
# connection of the cone


def delta_endomorphisms(G, r: float, xp=np):
    """Delta[c] as matrices on the cone basis: hat-nabla_c = nabla_c + Delta_c.

    Delta(x, y) = -r <x,y> d_r,  Delta(x, d_r) = Delta(d_r, x) = x / r,
    Delta(d_r, d_r) = 0.
    """
    n = G.shape[0]
    D = xp.zeros((n + 1, n + 1, n + 1))  # D[c, m, i] = (Delta_c)^m_i
    eye = xp.eye(n)
    if xp is jnp:
        D = D.at[:n, n, :n].set(-r * G)
        D = D.at[:n, :n, n].set(eye / r)
        D = D.at[n, :n, :n].set(eye / r)
    else:
        D[:n, n, :n] = -r * G
        D[:n, :n, n] = eye / r
        D[n, :n, :n] = eye / r
    return D


@dataclass(frozen=True)
class ConeModel:
    """Chart of the cone: coordinates (u, r); Christoffels from the closed-form rules."""

    base: ManifoldModel

    def __post_init__(self):
        if not self.base.is_sphere:
            raise ValueError("the cone is only used over sphere models")

    @property
    def n(self) -> int:
        return self.base.n + 1

    def metric(self, x):
        u, r = x[:-1], x[-1]
        G = self.base.metric(u)
        n = self.base.n
        out = jnp.zeros((n + 1, n + 1))
        return out.at[:n, :n].set(r * r * G).at[n, n].set(1.0)

    def christoffel(self, x):
        u, r = x[:-1], x[-1]
        n = self.base.n
        Gam = jnp.zeros((n + 1,) * 3).at[:n, :n, :n].set(self.base.christoffel(u))
        D = delta_endomorphisms(self.base.metric(u), r, jnp)  # D[c, m, i]
        return Gam + jnp.transpose(D, (1, 0, 2))  # Gamma^m_{c i}


def cone_guard(model: ManifoldModel):
    if not model.is_sphere:
        raise ValueError("cone over flat space is not supported; use the ambient space directly")


def nabla_hat_generic(T, DT_hor, dT_dr, G, r: float):
    """hat-nabla of a cone tensor: hat-nabla_c T = nabla_c T + Delta_c . T (derivation action).

    ``DT_hor[a]`` is the derivative along e_a with the base connection on each
    slot and ``dT_dr`` the plain radial derivative of the components.
    """
    D = delta_endomorphisms(np.asarray(G), r)
    out = np.concatenate([np.asarray(DT_hor), np.asarray(dT_dr)[None]], axis=0)
    return out + derive_stack(D, T)


def nabla_hat_pullback(gamma, Dgamma, G, r: float):
    """hat-nabla of r-independent tau^* gamma from nabla gamma on M, stacked over (e_1..e_n, d_r).

    Yields -(k/r) gamma in the radial direction and
    nabla_x gamma - (1/r) sum_i dr(v_i) gamma(.., x at slot i, ..) horizontally.
    """
    n = G.shape[0]
    T = _extend(np.asarray(gamma), n)
    DT = np.stack([_extend(np.asarray(Dgamma[a]), n) for a in range(n)])
    return nabla_hat_generic(T, DT, np.zeros_like(T), G, r)


def nabla_hat_dr(G, r: float):
    """hat-nabla dr stacked over (e_1..e_n, d_r)."""
    n = G.shape[0]
    dr = _dr(n)
    return nabla_hat_generic(dr, np.zeros((n, n + 1)), np.zeros(n + 1), G, r)


def horizontal_difference(t: ConeTriple, G, r: float = 1.0) -> ConeTriple:
    """hat-nabla_x S - nabla_x S as a triple, stacked over x = e_a:

    (-(1/r) x-|beta, -(1/r) x-|gamma + 2 r alpha (.) x#, r beta (.) x#).
    """
    a = -t.beta / r
    b = -t.gamma / r + 2 * r * owedge_dual_basis(t.alpha, ProductKind.ONEFORM_SYM2, G)
    c = r * owedge_dual_basis(t.beta, ProductKind.ONEFORM_S21, G)
    return ConeTriple(a, b, c)


def delta_action_triple(t: ConeTriple, G, r: float = 1.0) -> ConeTriple:
    """Same quantity computed as Delta_x . S on the assembled cone tensor (oracle)."""
    n = G.shape[0]
    S = assemble(t)
    D = delta_endomorphisms(np.asarray(G), r)
    parts = [decompose(derive_stack(D[a], S), check=False) for a in range(n)]
    return ConeTriple(*(np.stack([p.parts[i] for p in parts]) for i in range(3)))


def horizontal_defect_from_jets(alpha, Dalpha, beta, Dbeta, gamma, Dgamma, G) -> ConeTriple:
    """hat-nabla_x S at r = 1 as a triple, stacked over x = e_a."""
    d = horizontal_difference(ConeTriple(alpha, beta, gamma), G, 1.0)
    return ConeTriple(Dalpha + d.alpha, Dbeta + d.beta, Dgamma + d.gamma)


def horizontal_defect(alpha: TensorField, beta: TensorField, gamma: TensorField,
                      model: ManifoldModel, point) -> ConeTriple:
    a, Da = geo.derivatives(alpha, model, point, 1)
    b, Db = geo.derivatives(beta, model, point, 1)
    c, Dc = geo.derivatives(gamma, model, point, 1)
    return horizontal_defect_from_jets(a, Da, b, Db, c, Dc, geo.metric_at(model, point))


def frame_norm(t: ConeTriple, G) -> float:
    E = _ortho(G)
    return max(_norm(p, E) for p in t.parts)


# ----------------------------------------------------------------------------
# S^kappa


@lru_cache(maxsize=None)
def _kappa1_fn(kfn, model):
    fns = geo.derivative_functions(kfn, model, 1)

    def fn(u, p):
        return project(T21, fns[1](u, p))

    return fn


def kappa1_field(kfield: TensorField, model: ManifoldModel) -> TensorField:
    return TensorField(_kappa1_fn(kfield.fn, model), kfield.params, 3, "kappa1")


def S_kappa_fields(kfield: TensorField, model: ManifoldModel):
    """The triple of fields (kappa, kappa^1, C^kappa)."""
    return kfield, kappa1_field(kfield, model), C_kappa_field(kfield, model)


def build_S_kappa(kfield: TensorField, model: ManifoldModel, point, r: float = 1.0) -> ConeTriple:
    """(r^2 kappa, r^3 kappa^1, r^4 C^kappa) at (point, r)."""
    cone_guard(model)
    k, Dk, D2k = jets(kfield, model, point, 2)
    G = geo.metric_at(model, point)
    k1 = project(T21, Dk)
    C = project(T22, D2k) + kulkarni(k, G)
    return ConeTriple(r**2 * k, r**3 * k1, r**4 * C)


def S_kappa_horizontal_defect(kfield: TensorField, model: ManifoldModel, point) -> float:
    cone_guard(model)
    a, b, c = S_kappa_fields(kfield, model)
    d = horizontal_defect(a, b, c, model, point)
    return frame_norm(d, geo.metric_at(model, point))


# ----------------------------------------------------------------------------
# cone curvature


def cone_curvature(model: ManifoldModel, point) -> np.ndarray:
    """hat-R_{x,y} z = R_{x,y} z + (x^y)(z), as an endomorphism stack on the cone basis."""
    cone_guard(model)
    g = geo.geometry_at(model, point)
    n = model.n
    W = -geo.unit_curvature(g.G)  # W[a,b] = e_a ^ e_b
    out = np.zeros((n + 1,) * 4)
    out[:n, :n, :n, :n] = g.Rend + W
    return out


def cone_curvature_oracle(model: ManifoldModel, point, r: float = 1.0, mode: str = "fd",
                          h: float = 1e-3) -> np.ndarray:
    """Curvature of the cone metric computed from scratch in the (u, r) chart."""
    cone_guard(model)
    cm = ConeModel(model)
    x = np.concatenate([np.asarray(point, dtype=float), [r]])
    if mode == "fd":
        metric = lambda v: np.asarray(cm.metric(jnp.asarray(v)))  # noqa: E731
        gam = lambda v: geo.christoffel_from_metric(metric, v, mode="fd", h=h)  # noqa: E731
        return np.asarray(geo.riemann_from_christoffel(gam, x, mode="fd", h=h))
    gam = lambda v: geo.christoffel_from_metric(cm.metric, v, mode="ad")  # noqa: E731
    return np.asarray(geo.riemann_from_christoffel(gam, jnp.asarray(x), mode="ad"))


# ----------------------------------------------------------------------------
# alternative description of S^kappa through the cone Hessian


@lru_cache(maxsize=None)
def _lifted_fn(kfn, base: ManifoldModel, power: int):
    n = base.n

    def fn(x, p):
        u, r = x[:-1], x[-1]
        return r**power * jnp.pad(kfn(u, p), [(0, 1), (0, 1)])

    return fn


def lifted_field(kfield: TensorField, model: ManifoldModel, power: int = 4) -> TensorField:
    """r^power tau^* kappa on the cone chart."""
    return TensorField(_lifted_fn(kfield.fn, model, power), kfield.params, 2)


def cone_hessian_projection(kfield: TensorField, model: ManifoldModel, point, r: float = 1.0):
    """P_{(2,2)} of hat-nabla^2 (r^4 tau^* kappa) at (point, r)."""
    cone_guard(model)
    cm = ConeModel(model)
    x = np.concatenate([np.asarray(point, dtype=float), [r]])
    fns = geo.derivative_functions(lifted_field(kfield, model).fn, cm, 2)
    H = np.asarray(fns[2](jnp.asarray(x), kfield.params))
    return project(T22, H)


def hessian_description_defect(kfield: TensorField, model: ManifoldModel, point,
                                 scale: float = 1.0) -> float:
    """max |scale * P hat-nabla^2(r^4 kappa) - S^kappa| at r = 1."""
    S = assemble(build_S_kappa(kfield, model, point))
    H = cone_hessian_projection(kfield, model, point)
    return float(np.max(np.abs(scale * H - S)))
