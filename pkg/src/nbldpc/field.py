"""Prime-field arithmetic and dense matrix linear algebra over F_q."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _gf2


class SingularMatrixError(ValueError):
    """Raised when an inverse is requested for a rank-deficient matrix."""


class ShapeError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or not is_prime(int(self.q)):
            raise ValueError(f"field size q={self.q!r} must be a prime")


class Matrix:
    """Immutable dense matrix over F_q.

    Entries are kept reduced into ``[0, q)`` as an int64 array that is marked
    read-only. Equality and hashing are by value.
    """

    __slots__ = ("q", "data", "__dict__")

    def __init__(self, data, q: int):
        arr = np.array(data, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
        if arr.ndim != 2:
            raise ShapeError(f"matrix data must be 2-D, got shape {arr.shape}")
        arr %= q
        arr.setflags(write=False)
        self.q = int(q)
        self.data = arr

    @classmethod
    def identity(cls, n: int, q: int) -> "Matrix":
        return cls(np.eye(n, dtype=np.int64), q)

    @classmethod
    def zeros(cls, rows: int, cols: int, q: int) -> "Matrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), q)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.q == other.q and self.data.shape == other.data.shape and bool(
            np.array_equal(self.data, other.data)
        )

    def __hash__(self):
        return hash((self.q, self.data.shape, self.data.tobytes()))

    def __repr__(self):
        return f"Matrix(q={self.q}, {self.data.tolist()})"

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            return mat_mul(self, other)
        return NotImplemented

    @cached_property
    def inverse(self) -> "Matrix":
        return mat_inverse(self)

    @cached_property
    def packed_columns(self) -> tuple[int, ...]:
        # q = 2 only; used by the packed subspace engine.
        return _gf2.columns(self.data)


def _rref_array(a: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    r = np.array(a, dtype=np.int64) % q
    n_rows, n_cols = r.shape
    pivots: list[int] = []
    i = 0
    for c in range(n_cols):
        if i == n_rows:
            break
        nz = np.flatnonzero(r[i:, c])
        if nz.size == 0:
            continue
        p = i + int(nz[0])
        if p != i:
            r[[i, p]] = r[[p, i]]
        lead = int(r[i, c])
        if lead != 1:
            r[i] = (r[i] * pow(lead, -1, q)) % q
        col = r[:, c].copy()
        col[i] = 0
        others = np.flatnonzero(col)
        if others.size:
            r[others] = (r[others] - np.outer(col[others], r[i])) % q
        pivots.append(c)
        i += 1
    return r, pivots


def _rref_gf2(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    n_rows, n_cols = a.shape
    basis = _gf2.rref(_gf2.pack_rows(a)) if n_rows else ()
    r = np.zeros((n_rows, n_cols), dtype=np.int64)
    if basis:
        r[: len(basis)] = _gf2.unpack_rows(basis, n_cols)
    return r, _gf2.pivots(basis, n_cols)


def mat_rref(a: Matrix) -> tuple[Matrix, int, list[int]]:
    """Reduced row echelon form.

    Returns ``(R, rank, pivots)`` where ``R`` has the same shape as ``a`` with
    the zero rows at the bottom.
    """
    if a.q == 2 and a.rows and a.cols:
        r, piv = _rref_gf2(a.data)
    else:
        r, piv = _rref_array(a.data, a.q)
    return Matrix(r, a.q), len(piv), piv


def rank(a: Matrix) -> int:
    return mat_rref(a)[1]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a.q != b.q:
        raise ShapeError(f"field mismatch: q={a.q} vs q={b.q}")
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    return Matrix(a.data @ b.data, a.q)


def mat_vec(a: Matrix, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    if x.shape != (a.cols,):
        raise ShapeError(f"vector of length {x.shape} does not match {a.shape}")
    return (a.data @ x) % a.q


def mat_inverse(a: Matrix) -> Matrix:
    n, n2 = a.shape
    if n != n2:
        raise ShapeError(f"only square matrices are invertible, got {a.shape}")
    aug = np.hstack([a.data, np.eye(n, dtype=np.int64)])
    r, piv = _rref_array(aug, a.q)
    if len(piv) < n or piv[n - 1] != n - 1:
        raise SingularMatrixError("matrix is singular")
    return Matrix(r[:, n:], a.q)


def _kernel_from_rref(r: np.ndarray, piv: list[int], n_cols: int, q: int) -> np.ndarray:
    free = [c for c in range(n_cols) if c not in set(piv)]
    k = np.zeros((len(free), n_cols), dtype=np.int64)
    for row, f in enumerate(free):
        k[row, f] = 1
        for i, p in enumerate(piv):
            k[row, p] = (-r[i, f]) % q
    return k


def kernel_basis(a: Matrix) -> Matrix:
    """Rows form a basis of ``{x : a @ x = 0}`` (one row per free column)."""
    r, _, piv = mat_rref(a)
    return Matrix(_kernel_from_rref(r.data, piv, a.cols, a.q).reshape(-1, a.cols), a.q)


def solve_affine(a: Matrix, b) -> tuple[np.ndarray, Matrix] | None:
    """Solve ``a @ x = b``; returns ``(particular, kernel)`` or ``None`` if inconsistent."""
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    if b.shape[0] != a.rows:
        raise ShapeError(f"right-hand side of length {b.shape[0]} for {a.rows} equations")
    n = a.cols
    aug = np.hstack([a.data, b.reshape(-1, 1) % a.q])
    r, piv = _rref_array(aug, a.q)
    if piv and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, p in enumerate(piv):
        x[p] = r[i, n]
    kernel = _kernel_from_rref(r[:, :n], piv, n, a.q).reshape(-1, n)
    return x, Matrix(kernel, a.q)


def _uniform_nonzero(n: int, q: int, rng: np.random.Generator) -> np.ndarray:
    # Position of the first nonzero coordinate has P(i) ∝ (q-1) q^(n-1-i);
    # everything before it is 0, everything after it is uniform.
    weights = np.array([float(q) ** -(i + 1) for i in range(n)])
    i = int(rng.choice(n, p=weights / weights.sum()))
    v = np.zeros(n, dtype=np.int64)
    v[i] = rng.integers(1, q)
    v[i + 1 :] = rng.integers(0, q, size=n - i - 1)
    return v


def random_gl(m: int, q: int, rng: np.random.Generator) -> Matrix:
    """Uniform element of GL(m, F_q).

    Rows are drawn one at a time, each uniformly from the complement of the span
    of the rows before it: a uniform span element plus a uniform nonzero
    combination of the unit vectors at the span's non-pivot columns.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rows = np.zeros((m, m), dtype=np.int64)
    echelon = np.zeros((0, m), dtype=np.int64)
    piv: list[int] = []
    for k in range(m):
        free = [c for c in range(m) if c not in piv]
        c = np.zeros(m, dtype=np.int64)
        c[free] = _uniform_nonzero(len(free), q, rng)
        s = rng.integers(0, q, size=k) @ echelon if k else np.zeros(m, dtype=np.int64)
        rows[k] = (s + c) % q
        echelon, piv = _rref_array(rows[: k + 1], q)
    return Matrix(rows, q)


def random_permutation_matrix(size: int, rng: np.random.Generator, q: int = 2) -> Matrix:
    if size < 1:
        raise ValueError("size must be >= 1")
    p = np.zeros((size, size), dtype=np.int64)
    p[np.arange(size), rng.permutation(size)] = 1
    return Matrix(p, q)
