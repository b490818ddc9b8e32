"""Holonomy algebras acting on symmetrized algebraic curvature tensors.

A parallel curvature tensor on a cone with holonomy algebra h is an element of
the (2,2) projector image fixed by h, so the number of independent ones is the
dimension of the joint kernel of the derivation action of h restricted to that
image. Algebras are given by generators, N x N skew matrices.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .multilinear import ProductKind, owedge
from .sasaki import complex_structure, kaehler_form, quaternion_structures
from .young import T22, parity, project

KINDS = ("so", "u", "su", "sp", "g2", "spin7")


@dataclass
class LieAlgebraSpec:
    kind: str
    N: int
    generators: np.ndarray  # (dim, N, N)
    structures: tuple = ()  # complex structures whose Kahler forms give explicit invariants

    @property
    def dim(self) -> int:
        return self.generators.shape[0]

    @property
    def label(self) -> str:
        return f"{self.kind}({self.N})"


def expected_dimension(kind: str, N: int) -> int:
    if kind == "so":
        return N * (N - 1) // 2
    if kind == "u":
        return (N // 2) ** 2
    if kind == "su":
        return (N // 2) ** 2 - 1
    if kind == "sp":
        m = N // 4
        return m * (2 * m + 1)
    if kind == "g2":
        return 14
    if kind == "spin7":
        return 21
    raise ValueError(f"unknown algebra kind {kind!r}")


def so_basis(N: int) -> np.ndarray:
    out = []
    for a, b in itertools.combinations(range(N), 2):
        X = np.zeros((N, N))
        X[a, b], X[b, a] = -1.0, 1.0
        out.append(X)
    return np.array(out)


def _subalgebra(constraints, N: int, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of {X in so(N) : L(X) = 0 for all constraint maps L}."""
    B = so_basis(N) / np.sqrt(2.0)
    rows = []
    for L in constraints:
        rows.append(np.array([np.ravel(L(X)) for X in B]).T)
    M = np.vstack(rows)
    _, s, Vt = np.linalg.svd(M)
    rank = int(np.sum(s > tol * max(s[0], 1.0)))
    coeffs = Vt[rank:]
    return np.einsum("kd,dab->kab", coeffs, B)


# standard associative 3-form, 1-based index triples with signs
PHI_TERMS = ((1, 2, 3, 1), (1, 4, 5, 1), (1, 6, 7, 1), (2, 4, 6, 1), (2, 5, 7, -1),
             (3, 4, 7, -1), (3, 5, 6, -1))


def alternating_tensor(terms, N: int) -> np.ndarray:
    """Sum of sign * e^{i1} ^ ... ^ e^{ik} as an antisymmetric array (0-based indices)."""
    k = len(terms[0]) - 1
    out = np.zeros((N,) * k)
    for term in terms:
        idx, sign = term[:-1], term[-1]
        for perm in itertools.permutations(range(k)):
            out[tuple(idx[p] for p in perm)] += sign * parity(perm)
    return out


def associative_form() -> np.ndarray:
    return alternating_tensor([tuple(i - 1 for i in t[:3]) + (t[3],) for t in PHI_TERMS], 7)


def hodge_star(form: np.ndarray) -> np.ndarray:
    """Euclidean Hodge star of an antisymmetric k-tensor on R^N (orientation e_1..e_N)."""
    N, k = form.shape[0], form.ndim
    out = np.zeros((N,) * (N - k))
    for I in itertools.combinations(range(N), k):
        c = form[I]
        if c == 0:
            continue
        J = tuple(j for j in range(N) if j not in I)
        sign = parity(I + J)
        for perm in itertools.permutations(range(N - k)):
            out[tuple(J[p] for p in perm)] += sign * c * parity(perm)
    return out


def cayley_form() -> np.ndarray:
    """e^0 ^ phi + *phi on R^8 = R + R^7."""
    phi = associative_form()
    star = hodge_star(phi)
    out = np.zeros((8,) * 4)
    e0 = np.zeros(8)
    e0[0] = 1.0
    phi8 = np.zeros((8,) * 3)
    phi8[1:, 1:, 1:] = phi
    # (e0 ^ phi)(a,b,c,d) = sum over the position of the e0 slot with alternating sign
    out += np.einsum("a,bcd->abcd", e0, phi8)
    out -= np.einsum("b,acd->abcd", e0, phi8)
    out += np.einsum("c,abd->abcd", e0, phi8)
    out -= np.einsum("d,abc->abcd", e0, phi8)
    out[1:, 1:, 1:, 1:] += star
    return out


def _derive_plain(X, t):
    out = np.zeros_like(t)
    for a in range(t.ndim):
        out -= np.moveaxis(np.tensordot(t, X, axes=([a], [0])), -1, a)
    return out


def build_algebra(kind: str, N: int) -> LieAlgebraSpec:
    kind = kind.lower()
    if kind not in KINDS:
        raise ValueError(f"unknown algebra kind {kind!r}")
    structures: tuple = ()
    if kind == "so":
        if N < 2:
            raise ValueError("so(N) needs N >= 2")
        gens = so_basis(N) / np.sqrt(2.0)
    elif kind in ("u", "su"):
        if N % 2 or N < 2:
            raise ValueError(f"{kind}(m) acts on N = 2m")
        J = complex_structure(N)
        cons = [lambda X: X @ J - J @ X]
        if kind == "su":
            cons.append(lambda X: np.trace(J @ X))
        gens = _subalgebra(cons, N)
        structures = (J,)
    elif kind == "sp":
        if N % 4 or N < 4:
            raise ValueError("sp(m) acts on N = 4m")
        Is = quaternion_structures(N)
        gens = _subalgebra([lambda X, I=I: X @ I - I @ X for I in Is], N)
        structures = Is
    elif kind == "g2":
        if N != 7:
            raise ValueError("g2 acts on N = 7")
        phi = associative_form()
        gens = _subalgebra([lambda X: _derive_plain(X, phi)], N)
    else:
        if N != 8:
            raise ValueError("spin7 acts on N = 8")
        Phi = cayley_form()
        gens = _subalgebra([lambda X: _derive_plain(X, Phi)], N)
    want = expected_dimension(kind, N)
    if gens.shape[0] != want:
        raise ValueError(f"{kind}({N}) came out {gens.shape[0]}-dimensional, expected {want}")
    return LieAlgebraSpec(kind, N, gens, structures)


def closure_residual(alg: LieAlgebraSpec) -> float:
    """Largest component of a commutator outside the generator span."""
    B = alg.generators.reshape(alg.dim, -1)
    Q, _ = np.linalg.qr(B.T)
    worst = 0.0
    for X, Y in itertools.combinations(alg.generators, 2):
        c = np.ravel(X @ Y - Y @ X)
        worst = max(worst, float(np.max(np.abs(c - Q @ (Q.T @ c)))))
    return worst


def conjugated(alg: LieAlgebraSpec, Q) -> LieAlgebraSpec:
    """The algebra after the orthogonal change of basis v -> Q v."""
    gens = np.einsum("ab,kbc,dc->kad", Q, alg.generators, Q)
    structures = tuple(Q @ I @ Q.T for I in alg.structures)
    return LieAlgebraSpec(alg.kind, alg.N, gens, structures)


# ----------------------------------------------------------------------------
# the curvature space and the invariant count


@lru_cache(maxsize=None)
def _curvature_basis(N: int) -> np.ndarray:
    """Orthonormal basis (columns, shape (N^4, d)) of the (2,2) projector image.

    The image is spanned by the projected basis tensors e_a e_b e_c e_d with
    a < c and b < d (the others are +- these or zero under column
    antisymmetrization); a pivoted QR picks an independent set.
    """
    reps = [(a, b, c, d) for a, c in itertools.combinations(range(N), 2)
            for b, d in itertools.combinations(range(N), 2)]
    E = np.zeros((N,) * 4 + (len(reps),))
    for k, idx in enumerate(reps):
        E[idx + (k,)] = 1.0
    cols = project(T22, E).reshape(N**4, len(reps))
    Qm, R, _ = scipy.linalg.qr(cols, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > 1e-10 * diag[0]))
    out = Qm[:, :rank]
    out.setflags(write=False)
    return out


def curvature_basis(N: int) -> np.ndarray:
    """Orthonormal basis (columns) of the (2,2) projector image in N dimensions."""
    return _curvature_basis(N)


def curvature_space_dimension(N: int) -> int:
    return N * N * (N * N - 1) // 12


def action_matrices(alg: LieAlgebraSpec, basis=None) -> np.ndarray:
    """Matrices of the derivation action of each generator on the curvature basis."""
    N = alg.N
    B = curvature_basis(N) if basis is None else basis
    d = B.shape[1]
    T = B.reshape((N,) * 4 + (d,))
    mats = []
    for X in alg.generators:
        out = np.zeros_like(T)
        for a in range(4):
            out -= np.moveaxis(np.tensordot(T, X, axes=([a], [0])), -1, a)
        mats.append(B.T @ out.reshape(N**4, d))
    return np.array(mats)


def invariant_kernel(alg: LieAlgebraSpec, threshold: float = 1e-8, basis=None):
    """Joint kernel (coefficients in the curvature basis) and the basis itself."""
    B = curvature_basis(alg.N) if basis is None else basis
    A = action_matrices(alg, B).reshape(-1, B.shape[1])
    _, s, Vt = np.linalg.svd(A, full_matrices=False)
    s = np.concatenate([s, np.zeros(B.shape[1] - s.size)])
    kernel = Vt[s <= threshold * max(s[0], 1.0)]
    return kernel, B


def curvature_trivial_multiplicity(alg: LieAlgebraSpec, threshold: float = 1e-8) -> int:
    kernel, _ = invariant_kernel(alg, threshold)
    return int(kernel.shape[0])


def explicit_invariant_basis(alg: LieAlgebraSpec) -> list[np.ndarray]:
    """g (.) g together with omega_i (.) omega_j (i <= j) for the fixed complex structures."""
    N = alg.N
    g = np.eye(N)
    out = [np.asarray(owedge(g, g, ProductKind.KULKARNI_NOMIZU))]
    ws = [kaehler_form(I) for I in alg.structures]
    for i in range(len(ws)):
        for j in range(i, len(ws)):
            out.append(np.asarray(owedge(ws[i], ws[j], ProductKind.TWOFORM_TWOFORM)))
    return out


def explicit_span_report(alg: LieAlgebraSpec, threshold: float = 1e-8) -> dict:
    """Whether the explicit tensors are invariant and span the computed kernel."""
    kernel, B = invariant_kernel(alg, threshold)
    tensors = explicit_invariant_basis(alg)
    V = np.array([np.ravel(t) for t in tensors]).T  # (N^4, m)
    coords = B.T @ V
    outside = float(np.max(np.abs(V - B @ coords)))
    K = kernel.T  # (d, k)
    off_kernel = float(np.max(np.abs(coords - K @ (K.T @ coords))))
    s = np.linalg.svd(coords, compute_uv=False)
    rank = int(np.sum(s > 1e-9 * s[0]))
    return {
        "kernel_dimension": int(kernel.shape[0]),
        "explicit_rank": rank,
        "outside_curvature_space": outside,
        "outside_kernel": off_kernel,
        "spans": rank == kernel.shape[0] and off_kernel < 1e-8,
    }


def parse_algebra(name: str, dim: int | None = None) -> tuple[str, int]:
    """'u2' -> ('u', 4), 'sp2' -> ('sp', 8), 'so5' -> ('so', 5), 'g2' -> ('g2', 7), ...

    The number after u/su/sp is the rank m; the number after 'so' is N. An
    explicit ``dim`` must agree.
    """
    s = name.lower().strip()
    per = {"su": 2, "sp": 4, "so": 1, "u": 2}
    if s in per:
        if dim is None or dim % per[s]:
            raise ValueError(f"algebra family {name!r} needs a compatible --dim")
        return s, dim
    if s == "g2":
        kind, N = "g2", 7
    elif s == "spin7":
        kind, N = "spin7", 8
    else:
        for k, mult in (("su", 2), ("sp", 4), ("so", 1), ("u", 2)):
            if s.startswith(k) and s[len(k):].isdigit():
                kind, N = k, mult * int(s[len(k):])
                break
        else:
            raise ValueError(f"cannot parse algebra name {name!r}")
    if dim is not None and dim != N:
        raise ValueError(f"algebra {name} acts on N = {N}, not {dim}")
    return kind, N


def canonical_name(kind: str, N: int) -> str:
    """Inverse of :func:`parse_algebra`: ('u', 4) -> 'u2', ('so', 5) -> 'so5'."""
    per = {"su": 2, "sp": 4, "so": 1, "u": 2}
    if kind in per:
        return f"{kind}{N // per[kind]}"
    return kind
