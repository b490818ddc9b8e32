"""Model Riemannian manifolds in explicit charts and covariant derivatives of tensor fields.

Everything is expressed in chart coordinate components. A tensor field is a
function ``fn(u, params) -> array`` written with ``jax.numpy`` so that its
coordinate derivatives can be taken by forward-mode differentiation. Derivative
slots come first: ``nabla^2 T[x, y, ...] = (nabla_x nabla_y - nabla_{nabla_x y}) T``.

Curvature convention: R_{x,y} = [nabla_x, nabla_y] - nabla_[x,y], so the unit
sphere has R_{x,y}z = <y,z>x - <x,z>y and the Ricci identity reads
nabla^2_{x,y} T - nabla^2_{y,x} T = R_{x,y}.T with the derivation action.
The endomorphism form is stored as ``Rend[i, j, l, k] = (R_{e_i, e_j})^l_k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

import jax
import jax.numpy as jnp

jax.config.update("jax_enable_x64", True)

from .multilinear import derive_stack, wedge_stack  # noqa: E402

CHART_LIMIT = 10.0


# ----------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class ManifoldModel:
    """Round sphere of a given radius in stereographic coordinates, or flat space.

    The projection is from the north pole, so the chart origin is the south
    pole and the chart singularity sits at infinity.
    """

    kind: str  # "sphere" or "flat"
    n: int
    radius: float = 1.0

    def __post_init__(self):
        if self.kind not in ("sphere", "flat"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def is_sphere(self) -> bool:
        return self.kind == "sphere"

    @property
    def curvature(self) -> float:
        """Sectional curvature of the model."""
        return 1.0 / self.radius**2 if self.is_sphere else 0.0

    @property
    def ambient_dim(self) -> int:
        return self.n + 1 if self.is_sphere else self.n

    def label(self) -> str:
        if self.is_sphere:
            return f"S^{self.n}(r={self.radius:g})"
        return f"R^{self.n}"

    # -- closed forms (jax traceable) --------------------------------------

    def conformal_factor(self, u):
        """phi with G = phi^2 * identity."""
        if not self.is_sphere:
            return jnp.ones(())
        r2 = self.radius**2
        return 2.0 * r2 / (r2 + jnp.dot(u, u))

    def metric(self, u):
        phi = self.conformal_factor(u)
        return phi**2 * jnp.eye(self.n)

    def christoffel(self, u):
        """Gam[k, i, j] = Gamma^k_{ij}."""
        if not self.is_sphere:
            return jnp.zeros((self.n,) * 3)
        r2 = self.radius**2
        dw = -2.0 * u / (r2 + jnp.dot(u, u))  # gradient of log(phi)
        eye = jnp.eye(self.n)
        return (
            jnp.einsum("ki,j->kij", eye, dw)
            + jnp.einsum("kj,i->kij", eye, dw)
            - jnp.einsum("ij,k->kij", eye, dw)
        )

    def embedding(self, u):
        """Point of the sphere of radius ``radius`` in R^{n+1} (identity for flat space)."""
        if not self.is_sphere:
            return u
        r = self.radius
        s = jnp.dot(u, u)
        return jnp.concatenate([2.0 * r * r * u, jnp.array([r * (s - r * r)])]) / (s + r * r)

    def chart(self, p):
        """Inverse of :meth:`embedding` (numpy)."""
        p = np.asarray(p, dtype=float)
        if not self.is_sphere:
            return p
        r = self.radius
        return r * p[:-1] / (r - p[-1])

    def check_point(self, u):
        u = np.asarray(u, dtype=float)
        if u.shape != (self.n,):
            raise ValueError(f"point of shape {u.shape} for a {self.n}-dimensional chart")
        if not np.all(np.isfinite(u)) or (
            self.is_sphere and np.linalg.norm(u) > CHART_LIMIT * self.radius
        ):
            raise ValueError(f"point {u} outside the chart domain")
        return u


def RoundSphere(n: int, radius: float = 1.0) -> ManifoldModel:
    return ManifoldModel("sphere", n, float(radius))


def ScaledSphere(n: int, curvature: float) -> ManifoldModel:
    if not curvature > 0:
        raise ValueError("curvature must be positive")
    return ManifoldModel("sphere", n, float(1.0 / np.sqrt(curvature)))


def FlatSpace(n: int) -> ManifoldModel:
    return ManifoldModel("flat", n)


# ----------------------------------------------------------------------------
# tensor fields and covariant derivatives

FieldFn = Callable  # (u, params) -> jnp array


@dataclass(frozen=True)
class TensorField:
    """A chart tensor field ``fn(u, params)``; ``params`` is any pytree of arrays."""

    fn: FieldFn
    params: object = None
    valence: int | None = None
    tag: str = "custom"

    def __call__(self, u):
        return self.fn(jnp.asarray(u), self.params)

    def scaled(self, c: float) -> "TensorField":
        return TensorField(_scale_fn(self.fn), (c, self.params), self.valence, self.tag)


@lru_cache(maxsize=None)
def _scale_fn(fn):
    def g(u, p):
        c, inner = p
        return c * fn(u, inner)

    return g


def _connection_correction(T, Gam):
    """sum over slots of Gamma^m_{c i_a} T_{.. m ..}, derivative index first."""
    out = jnp.zeros((Gam.shape[0],) + T.shape)
    for a in range(T.ndim):
        out = out + jnp.moveaxis(jnp.tensordot(Gam, T, axes=([0], [a])), 1, a + 1)
    return out


def _nabla_ad(fn, model):
    def dfn(u, params):
        T = fn(u, params)
        dT = jnp.moveaxis(jax.jacfwd(fn, argnums=0)(u, params), -1, 0)
        return dT - _connection_correction(T, model.christoffel(u))

    return dfn


def richardson_jacobian(f, u, h: float = 1e-3, levels: int = 2):
    """Central-difference Jacobian with Richardson extrapolation, derivative axis first."""
    u = np.asarray(u, dtype=float)

    def central(step):
        cols = []
        for i in range(u.size):
            e = np.zeros_like(u)
            e[i] = step
            cols.append((np.asarray(f(u + e)) - np.asarray(f(u - e))) / (2 * step))
        return np.stack(cols)

    table = [central(h / 2**k) for k in range(levels)]
    for m in range(1, levels):
        table = [
            (4**m * table[k + 1] - table[k]) / (4**m - 1) for k in range(len(table) - 1)
        ]
    return table[0]


def _nabla_fd(fn, model, h):
    def dfn(u, params):
        u = np.asarray(u, dtype=float)
        T = np.asarray(fn(u, params))
        dT = richardson_jacobian(lambda v: fn(v, params), u, h)
        return dT - np.asarray(_connection_correction(jnp.asarray(T), model.christoffel(u)))

    return dfn


@lru_cache(maxsize=None)
def derivative_functions(fn, model: ManifoldModel, order: int, mode: str = "ad", h: float = 1e-3):
    """Functions [fn, nabla fn, ..., nabla^order fn]; jitted in ``ad`` mode."""
    if mode not in ("ad", "fd"):
        raise ValueError(f"unknown derivative mode {mode!r}")
    fns = [fn]
    for _ in range(order):
        fns.append(_nabla_ad(fns[-1], model) if mode == "ad" else _nabla_fd(fns[-1], model, h))
    if mode == "ad":
        return tuple(jax.jit(f) for f in fns)
    return tuple(fns)


def covariant_derivative(fld: TensorField, model: ManifoldModel, point, order: int = 1,
                         mode: str = "ad", h: float = 1e-3) -> np.ndarray:
    """Coordinate components of nabla^order of the field at ``point``."""
    if h <= 1e-8:
        raise ValueError("finite-difference step too small")
    u = model.check_point(point)
    fns = derivative_functions(fld.fn, model, order, mode, h)
    return np.asarray(fns[order](jnp.asarray(u), fld.params))


def derivatives(fld: TensorField, model: ManifoldModel, point, order: int, mode: str = "ad",
                h: float = 1e-3) -> list[np.ndarray]:
    """[T, nabla T, ..., nabla^order T] at ``point``."""
    u = model.check_point(point)
    fns = derivative_functions(fld.fn, model, order, mode, h)
    return [np.asarray(f(jnp.asarray(u), fld.params)) for f in fns]


# ----------------------------------------------------------------------------
# metric data at a point


def metric_at(model: ManifoldModel, point) -> np.ndarray:
    return np.asarray(model.metric(jnp.asarray(model.check_point(point))))


def christoffel_at(model: ManifoldModel, point) -> np.ndarray:
    return np.asarray(model.christoffel(jnp.asarray(model.check_point(point))))


def christoffel_from_metric(metric_fn, u, mode: str = "ad", h: float = 1e-4):
    """Levi-Civita symbols Gam[k,i,j] from an arbitrary metric function (oracle route)."""
    if mode == "ad":
        dG = jnp.moveaxis(jax.jacfwd(metric_fn)(u), -1, 0)  # dG[c, a, b] = d_c G_ab
        Ginv = jnp.linalg.inv(metric_fn(u))
    else:
        dG = richardson_jacobian(lambda v: np.asarray(metric_fn(v)), np.asarray(u), h)
        Ginv = np.linalg.inv(np.asarray(metric_fn(u)))
    xp = jnp if mode == "ad" else np
    # Gamma^k_ij = 1/2 G^kl (d_i G_lj + d_j G_li - d_l G_ij)
    t = dG.transpose(1, 0, 2) + dG.transpose(1, 2, 0) - dG  # t[l, i, j]
    return 0.5 * xp.einsum("kl,lij->kij", Ginv, t)


def riemann_from_christoffel(gam_fn, u, mode: str = "ad", h: float = 1e-4):
    """Rend[i,j,l,k] from a Christoffel function by differentiating it."""
    if mode == "ad":
        Gam = gam_fn(u)
        dGam = jnp.moveaxis(jax.jacfwd(gam_fn)(u), -1, 0)
        xp = jnp
    else:
        Gam = np.asarray(gam_fn(u))
        dGam = richardson_jacobian(lambda v: np.asarray(gam_fn(v)), np.asarray(u), h)
        xp = np
    # dGam[i, l, j, k] = d_i Gamma^l_{jk}
    return (
        xp.einsum("iljk->ijlk", dGam)
        - xp.einsum("jlik->ijlk", dGam)
        + xp.einsum("lim,mjk->ijlk", Gam, Gam)
        - xp.einsum("ljm,mik->ijlk", Gam, Gam)
    )


def _curvature_low(model: ManifoldModel):
    def fn(u, params=None):
        Rend = riemann_from_christoffel(model.christoffel, u)
        return jnp.einsum("wl,ijlk->ijkw", model.metric(u), Rend)

    return fn


@lru_cache(maxsize=None)
def _curvature_fn(model: ManifoldModel):
    low = _curvature_low(model)

    def fn(u):
        G = model.metric(u)
        Ginv = jnp.linalg.inv(G)
        Rlow = low(u)
        DRlow = _nabla_ad(low, model)(u, None)
        Rend = jnp.einsum("lw,ijkw->ijlk", Ginv, Rlow)
        DRend = jnp.einsum("lw,cijkw->cijlk", Ginv, DRlow)
        return G, model.christoffel(u), Rend, DRend

    return jax.jit(fn)


@dataclass
class PointGeometry:
    """Metric data at a point: G, Christoffels, R (endomorphism form) and nabla R."""

    point: np.ndarray
    G: np.ndarray
    Gam: np.ndarray
    Rend: np.ndarray
    DRend: np.ndarray

    @property
    def Ginv(self) -> np.ndarray:
        return np.linalg.inv(self.G)

    @property
    def Rlow(self) -> np.ndarray:
        """R(x,y,z,w) = <R_{x,y} z, w>."""
        return np.einsum("wl,ijlk->ijkw", self.G, self.Rend)


def geometry_at(model: ManifoldModel, point) -> PointGeometry:
    u = model.check_point(point)
    G, Gam, Rend, DRend = (np.asarray(a) for a in _curvature_fn(model)(jnp.asarray(u)))
    return PointGeometry(u, G, Gam, Rend, DRend)


def curvature_at(model: ManifoldModel, point):
    """(lowered valence-4 R, endomorphism form Rend) at the point."""
    geo = geometry_at(model, point)
    return geo.Rlow, geo.Rend


def unit_curvature(G) -> np.ndarray:
    """R_1 in endomorphism form: R_1(x,y)z = -<x,z> y + <y,z> x, i.e. R_1 = -x^y."""
    return -np.asarray(wedge_stack(np.asarray(G)))


def constant_curvature(G, c: float) -> np.ndarray:
    return c * unit_curvature(G)


def sectional_curvature(Rend, G, x, y) -> float:
    Rxy = np.einsum("i,j,ijlk->lk", x, y, Rend)
    num = float(x @ G @ (Rxy @ y))  # <R_{x,y} y, x>
    den = float((x @ G @ x) * (y @ G @ y) - (x @ G @ y) ** 2)
    return num / den


def gauss_curvature_low(model: ManifoldModel, point) -> np.ndarray:
    """Lowered curvature of a sphere from its embedding via the Gauss equation (oracle)."""
    if not model.is_sphere:
        raise ValueError("Gauss-equation oracle needs an embedded sphere")
    u = jnp.asarray(model.check_point(point))
    P = model.embedding(u)
    H = np.asarray(jax.hessian(model.embedding)(u))  # H[A, i, j] = d_i d_j Phi^A
    nu = np.asarray(P) / model.radius  # outer unit normal
    II = np.einsum("A,Aij->ij", nu, H)  # scalar second fundamental form (w.r.t. nu)
    # R(x,y,z,w) = II(y,z) II(x,w) - II(x,z) II(y,w)
    return np.einsum("jk,iw->ijkw", II, II) - np.einsum("ik,jw->ijkw", II, II)


def one_nullity(model: ManifoldModel, point, rtol: float = 1e-9) -> np.ndarray:
    """G-orthonormal basis (columns) of {x : R(x,y)z = R_1(x,y)z for all y, z}."""
    geo = geometry_at(model, point)
    D = geo.Rend - unit_curvature(geo.G)  # D[x, y, l, k]
    n = model.n
    M = D.reshape(n, -1).T
    _, s, vt = np.linalg.svd(M)
    scale = max(1.0, float(np.max(np.abs(geo.Rend))))
    null = vt[np.sum(s > rtol * scale):].T
    if null.shape[1] == 0:
        return np.zeros((n, 0))
    # orthonormalize w.r.t. G
    L = np.linalg.cholesky(null.T @ geo.G @ null)
    return null @ np.linalg.inv(L).T


# ----------------------------------------------------------------------------
# sampling


@dataclass
class PointFrame:
    point: np.ndarray
    frame: np.ndarray  # columns are G-orthonormal


def orthonormal_frame(G, rng=None) -> np.ndarray:
    """Columns G-orthonormal; randomly rotated when ``rng`` is given."""
    L = np.linalg.cholesky(np.asarray(G))
    E = np.linalg.inv(L).T
    if rng is not None:
        Q, R = np.linalg.qr(rng.normal(size=G.shape))
        E = E @ (Q * np.sign(np.diag(R)))
    return E


def sample_point(model: ManifoldModel, rng, scale: float = 1.5) -> np.ndarray:
    """Uniform point in a chart ball (radius ``scale * radius`` on spheres)."""
    n = model.n
    v = rng.normal(size=n)
    v /= np.linalg.norm(v)
    rad = (scale * model.radius if model.is_sphere else scale) * rng.uniform() ** (1.0 / n)
    return v * rad


def sample(model: ManifoldModel, rng) -> PointFrame:
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    u = sample_point(model, rng)
    return PointFrame(u, orthonormal_frame(metric_at(model, u), rng))


def unit_vectors(G, rng, count: int) -> np.ndarray:
    """Random G-unit vectors as rows."""
    E = orthonormal_frame(G)
    w = rng.normal(size=(count, G.shape[0]))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    return w @ E.T


@dataclass(frozen=True)
class Loop:
    """Coordinate circle c(t) = base + rho((cos 2pi t - 1) a + sin(2 pi t) b), t in [0, 1]."""

    base: tuple
    a: tuple
    b: tuple
    rho: float

    def position(self, t: float) -> np.ndarray:
        w = 2 * np.pi * t
        return (np.asarray(self.base) + self.rho * ((np.cos(w) - 1) * np.asarray(self.a)
                                                    + np.sin(w) * np.asarray(self.b)))

    def velocity(self, t: float) -> np.ndarray:
        w = 2 * np.pi * t
        return 2 * np.pi * self.rho * (-np.sin(w) * np.asarray(self.a)
                                       + np.cos(w) * np.asarray(self.b))


def sample_loops(model: ManifoldModel, rng, count: int, diameter: float = 0.3,
                 base=None) -> list[Loop]:
    """Coordinate circles of the given chart diameter through a common base point."""
    if base is None:
        base = sample_point(model, rng, scale=0.8)
    loops = []
    for _ in range(count):
        Q, _ = np.linalg.qr(rng.normal(size=(model.n, 2)))
        a, b = (Q[:, 0], Q[:, 1]) if model.n > 1 else (Q[:, 0], np.zeros(1))
        loops.append(Loop(tuple(base), tuple(a), tuple(b), diameter / 2))
    return loops
