"""Young tableaux, symmetrizers and projectors acting on dense covariant tensors.

A covariant d-tensor over an n-dimensional space is a numpy (or jax) array of
shape ``(n,) * d``. Permutations act from the right,

    (t . sigma)(v_1, ..., v_d) = t(v_{sigma^-1(1)}, ..., v_{sigma^-1(d)}),

and slot ``i`` of a tensor corresponds to the box of the tableau holding the
number ``i``. Tableau entries are 1-based as in the usual notation, e.g. the
(2,1) tableau with rows ``[2, 3]`` and ``[1]`` is ``Tableau(((2, 3), (1,)))``.
Axes whose number does not occur in the tableau are left untouched, which
allows projecting a sub-block of slots or carrying trailing batch axes.

Permutations passed to :func:`permute` are 0-based image tuples:
``sigma[a]`` is the image of slot ``a``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._array import xp_of


def _check_shape(shape) -> tuple[int, ...]:
    shape = tuple(int(r) for r in shape)
    if not shape or any(r < 1 for r in shape):
        raise ValueError(f"shape must be a non-empty sequence of positive ints, got {shape}")
    if any(a < b for a, b in zip(shape, shape[1:])):
        raise ValueError(f"shape must be weakly decreasing, got {shape}")
    return shape


def conjugate(shape) -> tuple[int, ...]:
    """Column lengths of a Young frame."""
    shape = _check_shape(shape)
    return tuple(sum(1 for r in shape if r > c) for c in range(shape[0]))


@dataclass(frozen=True)
class Tableau:
    """Young frame plus a filling; ``rows`` holds the 1-based entries row by row."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(e) for e in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        _check_shape([len(r) for r in rows])
        entries = [e for r in rows for e in r]
        if len(set(entries)) != len(entries) or min(entries) < 1:
            raise ValueError(f"tableau entries must be distinct positive ints, got {rows}")

    @classmethod
    def normal(cls, shape, offset: int = 0) -> "Tableau":
        """Row-reading filling 1, 2, ... (shifted by ``offset``)."""
        shape = _check_shape(shape)
        it = itertools.count(1 + offset)
        return cls(tuple(tuple(next(it) for _ in range(r)) for r in shape))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.rows)

    @property
    def size(self) -> int:
        return sum(self.shape)

    @property
    def columns(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(r[c] for r in self.rows if len(r) > c) for c in range(len(self.rows[0]))
        )

    @property
    def max_entry(self) -> int:
        return max(e for r in self.rows for e in r)

    def shifted(self, offset: int) -> "Tableau":
        return Tableau(tuple(tuple(e + offset for e in r) for r in self.rows))


# Tableaux used throughout the package.
T2 = Tableau(((1, 2),))
T21 = Tableau(((2, 3), (1,)))  # filling used for kappa^1 and the (2,1) products
T22 = Tableau(((1, 2), (3, 4)))


def parity(sigma) -> int:
    """Sign of a permutation given as a 0-based image tuple."""
    sigma = list(sigma)
    seen = [False] * len(sigma)
    sign = 1
    for i in range(len(sigma)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = sigma[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def permute(t, sigma):
    """Right action ``t . sigma`` on the leading ``len(sigma)`` slots."""
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(len(sigma))):
        raise ValueError(f"not a permutation: {sigma}")
    if len(sigma) > t.ndim:
        raise ValueError(f"permutation of {len(sigma)} slots on a valence-{t.ndim} tensor")
    axes = sigma + tuple(range(len(sigma), t.ndim))
    return t.transpose(axes)


@lru_cache(maxsize=None)
def _group(blocks: tuple[tuple[int, ...], ...], d: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """All permutations of ``range(d)`` preserving each block (0-based) with their signs."""
    out = []
    for images in itertools.product(*[itertools.permutations(b) for b in blocks]):
        sigma = list(range(d))
        for b, im in zip(blocks, images):
            for src, dst in zip(b, im):
                sigma[src] = dst
        out.append((tuple(sigma), parity(sigma)))
    return tuple(out)


def _validate(T: Tableau, t):
    if t.ndim < T.max_entry:
        raise ValueError(
            f"tableau with entries up to {T.max_entry} applied to a valence-{t.ndim} tensor"
        )


def row_group(T: Tableau, d: int | None = None):
    d = T.max_entry if d is None else d
    return _group(tuple(tuple(e - 1 for e in r) for r in T.rows), d)


def column_group(T: Tableau, d: int | None = None):
    d = T.max_entry if d is None else d
    return _group(tuple(tuple(e - 1 for e in c) for c in T.columns), d)


def _signed_sum(t, group, signed: bool):
    out = None
    for sigma, sign in group:
        term = permute(t, sigma)
        if signed and sign < 0:
            term = -term
        out = term if out is None else out + term
    return out


def row_symmetrize(T: Tableau, t):
    """r_T(t): sum over the row group, no normalization."""
    _validate(T, t)
    return _signed_sum(t, row_group(T, t.ndim), signed=False)


def column_antisymmetrize(T: Tableau, t):
    """c_T(t): signed sum over the column group."""
    _validate(T, t)
    return _signed_sum(t, column_group(T, t.ndim), signed=True)


def young_symmetrize(T: Tableau, t, adjoint: bool = False):
    """S_T = r_T o c_T, or its adjoint S*_T = c_T o r_T."""
    if adjoint:
        return column_antisymmetrize(T, row_symmetrize(T, t))
    return row_symmetrize(T, column_antisymmetrize(T, t))


def hook_product(shape) -> int:
    shape = _check_shape(shape)
    cols = conjugate(shape)
    h = 1
    for i, r in enumerate(shape):
        for j in range(r):
            h *= (r - j - 1) + (cols[j] - i - 1) + 1
    return h


def project(T: Tableau, t, adjoint: bool = False):
    """P_T = S_T / h_lambda (or the adjoint projector)."""
    return young_symmetrize(T, t, adjoint=adjoint) / hook_product(T.shape)


def membership_residual(T: Tableau, t, adjoint: bool = False) -> float:
    """Relative max-norm distance of ``t`` from the image of P_T."""
    t = np.asarray(t)
    scale = max(float(np.max(np.abs(t))) if t.size else 0.0, 1e-300)
    return float(np.max(np.abs(project(T, t, adjoint) - t))) / scale if t.size else 0.0


def projector_matrix(T: Tableau, n: int, adjoint: bool = False) -> np.ndarray:
    """Matrix of P_T on the flattened ``n**d`` dimensional tensor space."""
    d = T.max_entry
    N = n**d
    eye = np.eye(N).reshape((n,) * d + (N,))
    return project(T, eye, adjoint).reshape(N, N)


def _as_tableau(shape_or_tableau) -> Tableau:
    if isinstance(shape_or_tableau, Tableau):
        return shape_or_tableau
    return Tableau.normal(shape_or_tableau)


def irrep_dimension(shape, n: int, adjoint: bool = False, rtol: float = 1e-9) -> int:
    """Rank of the projector matrix of P_T on the n**d dimensional tensor space."""
    if n < 1:
        raise ValueError("n must be >= 1")
    P = projector_matrix(_as_tableau(shape), n, adjoint)
    s = np.linalg.svd(P, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def hook_length_dimension(shape, n: int) -> int:
    """Closed-form GL(n) dimension from the hook content formula (independent oracle)."""
    shape = _check_shape(shape)
    num = 1
    for i, r in enumerate(shape):
        for j in range(r):
            num *= n + j - i
    return num // hook_product(shape)


def _exchange_terms(blocks, i, j, signed):
    """Index maps and signs for the exchange map between blocks i and j (0-based)."""
    bi, bj = blocks[i], blocks[j]
    group = list(bi) + [bj[0]]
    terms = []
    for a, slot in enumerate(group):
        rest = [s for s in group if s != slot]
        mapping = dict(zip(bi, rest))
        mapping[bj[0]] = slot
        sign = (-1) ** (a + 1 + len(bi) + 1) if signed else 1
        terms.append((mapping, sign))
    return terms


def exchange_map(t, shape, i: int, j: int, adjoint: bool = False):
    """The map l_ij (rows) or l*_ij (columns, alternating) applied to t.

    The slots of ``t`` are grouped consecutively: row by row for ``adjoint=False``
    and column by column for ``adjoint=True``. ``i < j`` are 1-based row (column)
    numbers. Slot blocks other than i and j are passed through unchanged.
    """
    shape = _check_shape(shape)
    lengths = conjugate(shape) if adjoint else shape
    if not (1 <= i < j <= len(lengths)):
        raise ValueError(f"need 1 <= i < j <= {len(lengths)}, got i={i}, j={j}")
    d = sum(lengths)
    if t.ndim != d:
        raise ValueError(f"valence {t.ndim} does not match |shape| = {d}")
    blocks, pos = [], 0
    for L in lengths:
        blocks.append(tuple(range(pos, pos + L)))
        pos += L
    xp = xp_of(t)
    letters = "abcdefghijklmnopqrstuvwxyz"[:d]
    out = None
    for mapping, sign in _exchange_terms(blocks, i - 1, j - 1, adjoint):
        src = "".join(letters[mapping.get(s, s)] for s in range(d))
        term = xp.einsum(f"{src}->{letters}", t)
        term = term if sign > 0 else -term
        out = term if out is None else out + term
    return out


def exchange_defect(t, shape, i: int, j: int, adjoint: bool = False) -> float:
    """Max-norm of the exchange map; zero iff t obeys the exchange rule for i, j."""
    return float(np.max(np.abs(exchange_map(np.asarray(t), shape, i, j, adjoint))))
