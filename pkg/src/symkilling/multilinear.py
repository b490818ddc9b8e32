"""Products of symmetric / Young-symmetrized tensors, insertion, derivation action, traces.

Components may be taken in any basis; whenever a metric enters it is passed
explicitly as its Gram matrix ``g`` (defaults to the identity). Slot arguments
(``slots=(0, 1)``) are 0-based axis numbers.
"""
from __future__ import annotations

import enum

import numpy as np

from ._array import xp_of
from .young import T2, T21, T22, membership_residual, young_symmetrize


class ProductKind(enum.Enum):
    SYM1X1 = "a"  # one-form . one-form -> Sym^2
    ONEFORM_SYM2 = "b"  # one-form x symmetric 2-tensor -> (2,1)
    TWOFORM_TWOFORM = "c"  # 2-form x 2-form -> (2,2)
    ONEFORM_S21 = "d"  # one-form x (2,1)-tensor -> (2,2)
    KULKARNI_NOMIZU = "e"  # Sym^2 x Sym^2 -> (2,2)


def _outer(xp, *parts):
    """Outer product with the index pattern given as einsum subscripts."""
    subs, arrays = zip(*parts)
    out = "".join(sorted(set("".join(subs))))
    return xp.einsum(",".join(subs) + "->" + out, *arrays)


def _strict_check(a, b, kind):
    a, b = np.asarray(a), np.asarray(b)

    def sym2(x):
        return np.max(np.abs(x - x.T)) <= 1e-9 * max(np.max(np.abs(x)), 1e-300)

    def skew2(x):
        return np.max(np.abs(x + x.T)) <= 1e-9 * max(np.max(np.abs(x)), 1e-300)

    if kind is ProductKind.ONEFORM_SYM2:
        alpha = a if a.ndim == 2 else b
        if not sym2(alpha):
            raise ValueError("ONEFORM_SYM2 needs a symmetric 2-tensor")
    elif kind is ProductKind.TWOFORM_TWOFORM:
        if not (skew2(a) and skew2(b)):
            raise ValueError("TWOFORM_TWOFORM needs two 2-forms")
    elif kind is ProductKind.KULKARNI_NOMIZU:
        if not (sym2(a) and sym2(b)):
            raise ValueError("KULKARNI_NOMIZU needs two symmetric 2-tensors")
    elif kind is ProductKind.ONEFORM_S21:
        beta = a if a.ndim == 3 else b
        if membership_residual(T21, beta) > 1e-9:
            raise ValueError("ONEFORM_S21 needs a tensor in the (2,1) image")


_VALENCES = {
    ProductKind.SYM1X1: {(1, 1)},
    ProductKind.ONEFORM_SYM2: {(1, 2), (2, 1)},
    ProductKind.TWOFORM_TWOFORM: {(2, 2)},
    ProductKind.ONEFORM_S21: {(1, 3), (3, 1)},
    ProductKind.KULKARNI_NOMIZU: {(2, 2)},
}


def owedge(a, b, kind: ProductKind, strict: bool = False):
    """The product ``a (.) b`` of the requested kind.

    (a) l1.l2 = l1(v1)l2(v2) + l1(v2)l2(v1)
    (b) l(.)al = -al(.)l = 1/2 S_{23;1}[l(v2) al(v1,v3)]
    (c) w1(.)w2 = 1/4 S_{12;34}[w1(v1,v3) w2(v2,v4)]
    (d) l(.)be = -be(.)l = -1/3 S_{12;34}[l(v1) be(v2,v3,v4)]
    (e) a1(.)a2 = 1/4 S_{12;34}[a1(v1,v2) a2(v3,v4)]
    For the mixed kinds the argument order decides the sign.
    """
    kind = ProductKind(kind)
    if (a.ndim, b.ndim) not in _VALENCES[kind]:
        raise ValueError(f"valences {(a.ndim, b.ndim)} do not fit product kind {kind.name}")
    if strict:
        _strict_check(a, b, kind)
    xp = xp_of(a, b)
    if kind is ProductKind.SYM1X1:
        ab = xp.einsum("i,j->ij", a, b)
        return ab + ab.T
    if kind is ProductKind.ONEFORM_SYM2:
        lam, alpha, sign = (a, b, 1.0) if a.ndim == 1 else (b, a, -1.0)
        t = _outer(xp, ("b", lam), ("ac", alpha))
        return sign * 0.5 * young_symmetrize(T21, t)
    if kind is ProductKind.TWOFORM_TWOFORM:
        t = _outer(xp, ("ac", a), ("bd", b))
        return 0.25 * young_symmetrize(T22, t)
    if kind is ProductKind.ONEFORM_S21:
        lam, beta, sign = (a, b, 1.0) if a.ndim == 1 else (b, a, -1.0)
        t = _outer(xp, ("a", lam), ("bcd", beta))
        return sign * (-1.0 / 3.0) * young_symmetrize(T22, t)
    t = _outer(xp, ("ab", a), ("cd", b))
    return 0.25 * young_symmetrize(T22, t)


def sym_product(l1, l2):
    return owedge(l1, l2, ProductKind.SYM1X1)


def kulkarni(a1, a2):
    return owedge(a1, a2, ProductKind.KULKARNI_NOMIZU)


def target_tableau(kind: ProductKind):
    kind = ProductKind(kind)
    if kind is ProductKind.SYM1X1:
        return T2
    if kind is ProductKind.ONEFORM_SYM2:
        return T21
    return T22


def insert(x, t):
    """x -| t: contract the first slot with the vector x."""
    if t.ndim < 1:
        raise ValueError("cannot insert into a scalar")
    xp = xp_of(x, t)
    return xp.tensordot(x, t, axes=([0], [0]))


def owedge_dual_basis(t, kind: ProductKind, g=None, left: bool = False):
    """Stack over basis vectors e_a of ``t (.) e_a#`` (or ``e_a# (.) t`` if ``left``).

    The result has the basis index as its first axis, which is how expressions
    such as ``x -> 2 kappa (.) x#`` enter tensor identities.
    """
    xp = xp_of(t) if g is None else xp_of(t, g)
    n = t.shape[0]
    G = xp.eye(n) if g is None else g
    parts = [owedge(G[a], t, kind) if left else owedge(t, G[a], kind) for a in range(n)]
    return xp.stack(parts)


def derive(A, t):
    """Derivation action (A.t)(x_1..x_k) = -sum_i t(.., A x_i, ..)."""
    xp = xp_of(A, t)
    if A.shape != (A.shape[0], A.shape[0]) or any(s != A.shape[0] for s in t.shape):
        raise ValueError(f"endomorphism of shape {A.shape} vs tensor of shape {t.shape}")
    out = xp.zeros_like(t) if t.ndim else 0.0 * t
    for a in range(t.ndim):
        out = out - xp.moveaxis(xp.tensordot(t, A, axes=([a], [0])), -1, a)
    return out


def derive_stack(A, t):
    """Derivation action for a stack of endomorphisms ``A[..., :, :]``.

    Returns an array of shape ``A.shape[:-2] + t.shape``.
    """
    xp = xp_of(A, t)
    lead = A.shape[:-2]
    out = 0.0
    letters = "pqrstuvw"[: len(lead)]
    idx = "abcdefghijk"[: t.ndim]
    for a in range(t.ndim):
        src = idx[:a] + "z" + idx[a + 1 :]
        out = out - xp.einsum(f"{letters}z{idx[a]},{src}->{letters}{idx}", A, t)
    return out


def inverse_metric(g):
    xp = xp_of(g)
    return xp.linalg.inv(g)


def metric_trace(t, g=None, slots=(0, 1)):
    """g-trace of t over two slots (0-based); the remaining slots keep their order."""
    i, j = slots
    if t.ndim < 2 or i == j or not (0 <= i < t.ndim and 0 <= j < t.ndim):
        raise ValueError(f"bad trace slots {slots} for valence {t.ndim}")
    xp = xp_of(t, g) if g is not None else xp_of(t)
    n = t.shape[0]
    ginv = xp.eye(n) if g is None else inverse_metric(g)
    idx = list("abcdefghijk"[: t.ndim])
    idx[i], idx[j] = "y", "z"
    rest = "".join(c for c in idx if c not in "yz")
    return xp.einsum(f"yz,{''.join(idx)}->{rest}", ginv, t)


def flat(x, g=None):
    """x -> x# = <x, .> (the covector dual to x)."""
    return x if g is None else g @ x


def sharp(lam, g=None):
    """Inverse of :func:`flat`."""
    if g is None:
        return lam
    xp = xp_of(lam, g)
    return xp.linalg.solve(g, lam)


sharp_flat = flat


def wedge_endomorphism(x, y, g=None):
    """Matrix of x^y acting by u -> <x,u> y - <y,u> x."""
    xp = xp_of(x, y)
    gx, gy = flat(x, g), flat(y, g)
    return xp.einsum("l,k->lk", y, gx) - xp.einsum("l,k->lk", x, gy)


def wedge_stack(g):
    """W[a, b] = e_a ^ e_b as endomorphisms, shape (n, n, n, n)."""
    xp = xp_of(g)
    n = g.shape[0]
    eye = xp.eye(n)
    # W[a,b,l,k] = g[a,k] delta[l,b] - g[b,k] delta[l,a]
    return xp.einsum("ak,lb->ablk", g, eye) - xp.einsum("bk,la->ablk", g, eye)


def to_frame(t, E):
    """Components of t in the frame whose vectors are the columns of E."""
    xp = xp_of(t, E)
    for a in range(t.ndim):
        t = xp.moveaxis(xp.tensordot(t, E, axes=([a], [0])), -1, a)
    return t


def full_symmetrization(t):
    """Sum over all slot permutations divided by d!."""
    import itertools
    import math

    d = t.ndim
    out = 0.0
    for sigma in itertools.permutations(range(d)):
        out = out + t.transpose(sigma)
    return out / math.factorial(d)
