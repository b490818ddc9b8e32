"""The third-order equation on functions

    nabla^3_{y1,y2,y3} f + 2 df(y1) <y2,y3> + <y1,y2> df(y3) + <y1,y3> df(y2) = 0,

the symmetric 2-tensor kappa^f = f g + 1/4 nabla^2 f attached to a function and
the pair (kappa^f, C) with C = f g (.) g + 1/2 nabla^2 f (.) g.

On the unit sphere the solutions are the restrictions of ambient quadratic
forms f = Q(p, p): F = r^2 f is then the quadratic form Q on the cone
R^{n+1}, whose Hessian q = 1/2 hat-nabla^2 F = Q is parallel. Restrictions of
linear functions are not solutions (their Hessian is -f g).
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import jax
import jax.numpy as jnp

from . import geometry as geo
from . import cone
from .geometry import ManifoldModel, TensorField
from .killing import _norm, _ortho, killing_residual, pair_defect, C_kappa_field
from .multilinear import kulkarni, metric_trace, to_frame

# ----------------------------------------------------------------------------
# scalar fields


@lru_cache(maxsize=None)
def _quadratic_fn(model: ManifoldModel):
    def fn(u, p):
        Q, a, c = p
        P = model.embedding(u)
        return P @ Q @ P + a @ P + c

    return fn


def ambient_polynomial(model: ManifoldModel, Q=None, a=None, c: float = 0.0) -> TensorField:
    """f(p) = Q(p, p) + <a, p> + c restricted to the embedded sphere."""
    if not model.is_sphere:
        raise ValueError("ambient polynomials need an embedded sphere")
    N = model.n + 1
    Q = np.zeros((N, N)) if Q is None else np.asarray(Q, dtype=float)
    Q = 0.5 * (Q + Q.T)
    a = np.zeros(N) if a is None else np.asarray(a, dtype=float)
    p = (jnp.asarray(Q), jnp.asarray(a), jnp.asarray(float(c)))
    return TensorField(_quadratic_fn(model), p, 0, "ambient-polynomial")


def first_harmonic(model: ManifoldModel, a) -> TensorField:
    return TensorField(_quadratic_fn(model), ambient_polynomial(model, a=a).params, 0,
                       "first-harmonic")


def quadratic_restriction(model: ManifoldModel, Q) -> TensorField:
    return TensorField(_quadratic_fn(model), ambient_polynomial(model, Q=Q).params, 0,
                       "quadratic")


def _chart_square(u, p):
    return p * jnp.sum(u * u)


def chart_square(c: float = 1.0) -> TensorField:
    """|u|^2 in the chart (negative control)."""
    return TensorField(_chart_square, jnp.asarray(float(c)), 0, "chart-square")


def _constant_fn(u, c):
    return c + 0.0 * u[0]


def constant_function(c: float) -> TensorField:
    return TensorField(_constant_fn, jnp.asarray(float(c)), 0, "constant")


def random_quadratic(model: ManifoldModel, rng) -> TensorField:
    N = model.n + 1
    Q = rng.normal(size=(N, N))
    return quadratic_restriction(model, Q + Q.T)


# ----------------------------------------------------------------------------
# the equation and the attached tensors


def e2_tensor(df, D3f, G):
    """Left side of the equation as a 3-tensor (derivative slots first)."""
    return (D3f + 2 * np.einsum("a,bc->abc", df, G) + np.einsum("ab,c->abc", G, df)
            + np.einsum("ac,b->abc", G, df))


def e2_residual(f: TensorField, model: ManifoldModel, point) -> float:
    """Max-norm of the left side in an orthonormal frame."""
    _, df, _, D3f = geo.derivatives(f, model, point, 3)
    G = geo.metric_at(model, point)
    return _norm(e2_tensor(df, D3f, G), _ortho(G))


@lru_cache(maxsize=None)
def _kappa_f_fn(ffn, model: ManifoldModel):
    fns = geo.derivative_functions(ffn, model, 2)

    def fn(u, p):
        return fns[0](u, p) * model.metric(u) + 0.25 * fns[2](u, p)

    return fn


def kappa_f_field(f: TensorField, model: ManifoldModel) -> TensorField:
    return TensorField(_kappa_f_fn(f.fn, model), f.params, 2, "kappa-f")


def kappa_f(f: TensorField, model: ManifoldModel, point) -> np.ndarray:
    """kappa^f(x, y) = f <x, y> + 1/4 nabla^2_{x,y} f."""
    return np.asarray(kappa_f_field(f, model)(model.check_point(point)))


@lru_cache(maxsize=None)
def _gallot_C_fn(ffn, model: ManifoldModel):
    fns = geo.derivative_functions(ffn, model, 2)

    def fn(u, p):
        G = model.metric(u)
        return fns[0](u, p) * kulkarni(G, G) + 0.5 * kulkarni(fns[2](u, p), G)

    return fn


def gallot_C_field(f: TensorField, model: ManifoldModel) -> TensorField:
    """C = f g (.) g + 1/2 nabla^2 f (.) g."""
    return TensorField(_gallot_C_fn(f.fn, model), f.params, 4, "gallot-C")


# ----------------------------------------------------------------------------
# identities


def trace_factor(n: int, which: str = "derived") -> float:
    """Factor c in d tr kappa^f = c df: 'added_laplacian' (3n+1)/2, the value if the
    Laplacian term entered with a plus sign, or 'derived' (n-1)/2."""
    if which == "added_laplacian":
        return (3 * n + 1) / 2
    if which == "derived":
        return (n - 1) / 2
    raise ValueError(f"unknown trace factor {which!r}")


def gallot_identities(f: TensorField, model: ManifoldModel, point) -> dict:
    """Residuals of nabla^* nabla df = (n+3) df and of d tr kappa^f = c df for both factors.

    ``dlap_vs_df`` checks d(nabla^* nabla f) = 2(n+1) df, which is the trace of
    the equation over its last two slots.
    """
    n = model.n
    _, df, D2f, D3f = geo.derivatives(f, model, point, 3)
    G = geo.metric_at(model, point)
    E = _ortho(G)
    rough = -metric_trace(D3f, G, (0, 1))  # nabla^* nabla df
    dlap = -metric_trace(D3f, G, (1, 2))  # d nabla^* nabla f (derivative slot first)
    kf = kappa_f_field(f, model)
    _, Dk = geo.derivatives(kf, model, point, 1)
    dtr = metric_trace(Dk, G, (1, 2))
    return {
        "rough_laplacian": _norm(rough - (n + 3) * df, E),
        "dlap_vs_df": _norm(dlap - 2 * (n + 1) * df, E),
        "dtr_added_laplacian": _norm(dtr - trace_factor(n, "added_laplacian") * df, E),
        "dtr_derived": _norm(dtr - trace_factor(n, "derived") * df, E),
    }


def observed_trace_factor(f: TensorField, model: ManifoldModel, point) -> float:
    """Least-squares c in d tr kappa^f = c df."""
    _, df = geo.derivatives(f, model, point, 1)
    G = geo.metric_at(model, point)
    kf = kappa_f_field(f, model)
    _, Dk = geo.derivatives(kf, model, point, 1)
    dtr = metric_trace(Dk, G, (1, 2))
    Ginv = np.linalg.inv(G)
    return float(dtr @ Ginv @ df / (df @ Ginv @ df))


def kappa_f_chain(f: TensorField, model: ManifoldModel, point) -> dict:
    """Killing residual of kappa^f, pair equations with the attached C, C = C^kappa, cone defect."""
    kf = kappa_f_field(f, model)
    cf = gallot_C_field(f, model)
    G = geo.metric_at(model, point)
    E = _ortho(G)
    p1, p2 = pair_defect(kf, cf, model, point)
    Ck = np.asarray(C_kappa_field(kf, model)(point))
    return {
        "killing": killing_residual(kf, model, point),
        "pair": max(p1, p2),
        "C_is_C_kappa": _norm(np.asarray(cf(point)) - Ck, E),
        "horizontal": cone.S_kappa_horizontal_defect(kf, model, point),
    }


# ----------------------------------------------------------------------------
# solution space and the cone picture


def e2_solution_dimension(model: ManifoldModel, basis: str = "quadratic", samples: int = 3,
                          seed: int = 0, rtol: float = 1e-8) -> int:
    """Dimension of the solution space inside span(basis) from pointwise equation values.

    basis 'linear' is {1, x_1, ..., x_{n+1}}; 'quadratic' adds all x_a x_b.
    """
    N = model.n + 1
    funcs = [constant_function(1.0)] + [first_harmonic(model, np.eye(N)[a]) for a in range(N)]
    if basis == "quadratic":
        for a in range(N):
            for b in range(a, N):
                Q = np.zeros((N, N))
                Q[a, b] = 1.0
                funcs.append(quadratic_restriction(model, Q))
    elif basis != "linear":
        raise ValueError(f"unknown basis {basis!r}")
    rng = np.random.default_rng(seed)
    pts = [geo.sample_point(model, rng) for _ in range(samples)]
    cols = []
    for f in funcs:
        col = []
        for u in pts:
            _, df, _, D3f = geo.derivatives(f, model, u, 3)
            G = geo.metric_at(model, u)
            col.append(np.ravel(to_frame(e2_tensor(df, D3f, G), _ortho(G))))
        cols.append(np.concatenate(col))
    A = np.array(cols).T
    # functions that agree on the sphere (sum x_a^2 = 1) count once
    fn_rank = _function_rank(model, funcs, rng)
    s = np.linalg.svd(A, compute_uv=False)
    op_rank = int(np.sum(s > rtol * max(s[0], 1.0)))
    return fn_rank - op_rank


def _function_rank(model: ManifoldModel, funcs, rng, count: int = 40) -> int:
    pts = [geo.sample_point(model, rng) for _ in range(count)]
    M = np.array([[float(np.asarray(f(u))) for u in pts] for f in funcs])
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > 1e-9 * s[0]))


@lru_cache(maxsize=None)
def _lift_fn(ffn, base: ManifoldModel):
    def fn(x, p):
        return x[-1] ** 2 * ffn(x[:-1], p)

    return fn


def cone_hessian_defect(f: TensorField, model: ManifoldModel, point, r: float = 1.0) -> dict:
    """q = 1/2 hat-nabla^2 (r^2 f) on the cone: |hat-nabla q| and q(d_r, d_r) - f at (p, r)."""
    cone.cone_guard(model)
    cm = cone.ConeModel(model)
    x = jnp.asarray(np.concatenate([np.asarray(model.check_point(point), dtype=float), [r]]))
    fns = geo.derivative_functions(_lift_fn(f.fn, model), cm, 3)
    q = 0.5 * np.asarray(fns[2](x, f.params))
    Dq = 0.5 * np.asarray(fns[3](x, f.params))
    Ghat = np.asarray(cm.metric(x))
    E = _ortho(Ghat)
    n = model.n
    fval = float(np.asarray(f.fn(jnp.asarray(point, dtype=float), f.params)))
    return {
        "parallel": _norm(Dq, E),
        "recovers_f": abs(q[n, n] - fval),
    }
