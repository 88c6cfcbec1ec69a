"""Linear and affine subspaces of F_q^m in canonical form.

Two interchangeable backends hold the rows of a basis:

* ``PackedEngine`` (q = 2): each row is a Python int, XOR elimination.
* ``DenseEngine`` (any prime q): rows are tuples, elimination goes through
  :mod:`nbldpc.field`; intersections use the constraint (kernel) form.

Both produce the same canonical basis, which is the RREF of the span. The
engine is picked by ``q`` unless forced with ``packed=``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from . import _gf2
from .field import Matrix, ShapeError, SingularMatrixError, _rref_array, kernel_basis, solve_affine


class PackedEngine:
    packed = True

    def __init__(self, m: int):
        self.q = 2
        self.m = m
        self.zero = 0
        self.full = tuple(1 << (m - 1 - c) for c in range(m))

    def vec(self, x) -> int:
        x = np.asarray(x, dtype=np.int64).reshape(-1)
        if x.shape[0] != self.m:
            raise ShapeError(f"vector of length {x.shape[0]} in ambient dimension {self.m}")
        return _gf2.pack(x % 2)

    def vecs(self, xs) -> list[int]:
        a = np.asarray(xs, dtype=np.int64).reshape(-1, self.m)
        return _gf2.pack_rows(a % 2)

    def to_array(self, v) -> np.ndarray:
        return _gf2.unpack(v, self.m)

    def rows_to_array(self, rows) -> np.ndarray:
        return _gf2.unpack_rows(rows, self.m)

    def rref(self, vecs) -> tuple:
        return _gf2.rref(vecs)

    def insert(self, basis, v):
        return _gf2.insert(basis, v)

    def reduce(self, v, basis):
        return _gf2.reduce(v, basis)

    def add(self, u, v):
        return u ^ v

    def neg(self, v):
        return v

    def span_sum(self, b1, b2):
        if len(b1) < len(b2):
            b1, b2 = b2, b1
        if len(b1) == self.m or not b2:
            return b1
        if len(b2) == 1:
            return _gf2.insert(b1, b2[0])
        return _gf2.rref(b1 + b2)

    def intersect(self, b1, b2):
        if len(b1) == self.m:
            return b2
        if len(b2) == self.m:
            return b1
        return _gf2.intersect(b1, b2, self.m)

    def image(self, h: Matrix, v):
        return _gf2.matvec(h.packed_columns, v, self.m)

    def image_rows(self, h: Matrix, rows):
        cols = h.packed_columns
        return [_gf2.matvec(cols, v, self.m) for v in rows]

    def coset_meet(self, o1, b1, o2, b2):
        """A point of (o1 + span b1) ∩ (o2 + span b2), or None."""
        delta = _gf2.reduce(o1 ^ o2, b2)
        if not delta:
            return o1
        n1 = len(b1)
        ext = _gf2.rref([(_gf2.reduce(d, b2) << n1) | (1 << i) for i, d in enumerate(b1)])
        t = _gf2.reduce(delta << n1, ext)
        if t >> n1:
            return None
        x = o1
        for i, d in enumerate(b1):
            if t >> i & 1:
                x ^= d
        return x

    def combine(self, coeffs, rows):
        out = 0
        for c, r in zip(coeffs, rows):
            if c:
                out ^= r
        return out

    def key(self, rows) -> tuple[int, ...]:
        return tuple(rows)

    def vkey(self, v) -> int:
        return v


class DenseEngine:
    packed = False

    def __init__(self, q: int, m: int):
        self.q = q
        self.m = m
        self.zero = (0,) * m
        self.full = tuple(tuple(int(c == r) for c in range(m)) for r in range(m))
        self._weights = np.array([q ** (m - 1 - c) for c in range(m)], dtype=object)

    def vec(self, x) -> tuple:
        x = np.asarray(x, dtype=np.int64).reshape(-1)
        if x.shape[0] != self.m:
            raise ShapeError(f"vector of length {x.shape[0]} in ambient dimension {self.m}")
        return tuple(int(e) for e in x % self.q)

    def vecs(self, xs) -> list[tuple]:
        a = np.asarray(xs, dtype=np.int64).reshape(-1, self.m) % self.q
        return [tuple(r) for r in a.tolist()]

    def to_array(self, v) -> np.ndarray:
        return np.array(v, dtype=np.int64).reshape(self.m)

    def rows_to_array(self, rows) -> np.ndarray:
        return np.array(rows, dtype=np.int64).reshape(-1, self.m)

    def rref(self, vecs) -> tuple:
        a = self.rows_to_array(list(vecs))
        if a.shape[0] == 0:
            return ()
        r, piv = _rref_array(a, self.q)
        return tuple(tuple(row) for row in r[: len(piv)].tolist())

    def insert(self, basis, v):
        return self.rref(list(basis) + [v])

    def reduce(self, v, basis):
        x = np.array(v, dtype=np.int64)
        for row in basis:
            row = np.array(row, dtype=np.int64)
            p = int(np.flatnonzero(row)[0])
            if x[p]:
                x = (x - x[p] * row) % self.q
        return tuple(int(e) for e in x)

    def add(self, u, v):
        return tuple((a + b) % self.q for a, b in zip(u, v))

    def neg(self, v):
        return tuple((-a) % self.q for a in v)

    def span_sum(self, b1, b2):
        return self.rref(list(b1) + list(b2))

    def _constraints(self, rows) -> np.ndarray:
        # x in span(rows)  <=>  C x = 0, C = basis of {c : B c = 0}
        b = Matrix(self.rows_to_array(rows).reshape(-1, self.m), self.q)
        if b.rows == 0:
            return np.eye(self.m, dtype=np.int64)
        return kernel_basis(b).data.reshape(-1, self.m)

    def intersect(self, b1, b2):
        c = np.vstack([self._constraints(b1), self._constraints(b2)])
        if c.shape[0] == 0:
            return self.full
        k = kernel_basis(Matrix(c, self.q)).data.reshape(-1, self.m)
        return self.rref(k.tolist())

    def image(self, h: Matrix, v):
        return tuple(int(e) for e in (h.data @ np.array(v, dtype=np.int64)) % self.q)

    def image_rows(self, h: Matrix, rows):
        if not rows:
            return []
        a = (self.rows_to_array(rows) @ h.data.T) % self.q
        return [tuple(r) for r in a.tolist()]

    def coset_meet(self, o1, b1, o2, b2):
        c1, c2 = self._constraints(b1), self._constraints(b2)
        a = np.vstack([c1, c2])
        if a.shape[0] == 0:
            return o1
        rhs = np.concatenate([c1 @ np.array(o1), c2 @ np.array(o2)])
        sol = solve_affine(Matrix(a, self.q), rhs)
        if sol is None:
            return None
        return tuple(int(e) for e in sol[0])

    def combine(self, coeffs, rows):
        if not rows:
            return self.zero
        v = np.asarray(coeffs, dtype=np.int64) @ self.rows_to_array(rows)
        return tuple(int(e) for e in v % self.q)

    def key(self, rows) -> tuple[int, ...]:
        return tuple(self.vkey(r) for r in rows)

    def vkey(self, v) -> int:
        return int(np.dot(np.array(v, dtype=object), self._weights)) if self.m else 0


def engine(q: int, m: int, packed: bool | None = None):
    q = int(q)
    return _engine(q, int(m), q == 2 if packed is None else bool(packed))


@lru_cache(maxsize=None)
def _engine(q: int, m: int, packed: bool):
    if packed:
        if q != 2:
            raise ValueError("the packed engine only supports q = 2")
        return PackedEngine(m)
    return DenseEngine(q, m)


def _same_ambient(a, b):
    if a._eng is not b._eng:
        if (a.q, a.m) != (b.q, b.m):
            raise ShapeError(f"ambient mismatch: F_{a.q}^{a.m} vs F_{b.q}^{b.m}")
        raise ShapeError("operands use different engines")
    return a._eng


class Subspace:
    """Linear subspace of F_q^m held by its RREF basis."""

    __slots__ = ("_eng", "_rows")

    def __init__(self, eng, rows):
        self._eng = eng
        self._rows = rows

    @property
    def q(self) -> int:
        return self._eng.q

    @property
    def m(self) -> int:
        return self._eng.m

    @property
    def ambient_dim(self) -> int:
        return self._eng.m

    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def basis(self) -> Matrix:
        return Matrix(self._eng.rows_to_array(self._rows).reshape(-1, self.m), self.q)

    @property
    def pivots(self) -> list[int]:
        return [int(np.flatnonzero(r)[0]) for r in self._eng.rows_to_array(self._rows)]

    def is_zero(self) -> bool:
        return not self._rows

    def is_full(self) -> bool:
        return len(self._rows) == self.m

    def __contains__(self, x) -> bool:
        return contains(self, x)

    def __add__(self, other):
        return subspace_sum(self, other)

    def __and__(self, other):
        return intersect(self, other)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        if self._eng is other._eng:
            return self._rows == other._rows
        return (self.q, self.m) == (other.q, other.m) and self.key() == other.key()

    def __hash__(self):
        return hash((self.q, self.m, self.key()))

    def key(self) -> tuple[int, ...]:
        return self._eng.key(self._rows)

    def elements(self):
        """Iterate over all q**dim members as int arrays (small spaces only)."""
        basis = self._eng.rows_to_array(self._rows).reshape(-1, self.m)
        for coeffs in product(range(self.q), repeat=self.dim):
            yield (np.array(coeffs, dtype=np.int64) @ basis) % self.q

    def __repr__(self):
        return f"Subspace(q={self.q}, m={self.m}, basis={self.basis.tolist()})"


class AffineSubspace:
    """Coset ``offset + direction``; ``offset`` is reduced against the direction basis."""

    __slots__ = ("_eng", "_offset", "direction")

    def __init__(self, eng, offset, direction: Subspace, canonical: bool = False):
        self._eng = eng
        self.direction = direction
        self._offset = offset if canonical else eng.reduce(offset, direction._rows)

    @property
    def q(self) -> int:
        return self._eng.q

    @property
    def m(self) -> int:
        return self._eng.m

    @property
    def dim(self) -> int:
        return self.direction.dim

    @property
    def offset(self) -> np.ndarray:
        return self._eng.to_array(self._offset)

    def is_linear(self) -> bool:
        return self._offset == self._eng.zero

    def is_point(self) -> bool:
        return not self.direction._rows

    def __contains__(self, x) -> bool:
        return affine_contains(self, x)

    def __eq__(self, other):
        if not isinstance(other, AffineSubspace):
            return NotImplemented
        if self._eng is other._eng:
            return self._offset == other._offset and self.direction._rows == other.direction._rows
        return self.key() == other.key() and (self.q, self.m) == (other.q, other.m)

    def __hash__(self):
        return hash((self.q, self.m, self.key()))

    def key(self):
        return (self._eng.vkey(self._offset), self.direction.key())

    def elements(self):
        off = self.offset
        for v in self.direction.elements():
            yield (v + off) % self.q

    def __repr__(self):
        return f"AffineSubspace(offset={self.offset.tolist()}, direction={self.direction.basis.tolist()})"


def zero_space(m: int, q: int = 2, *, packed: bool | None = None) -> Subspace:
    return Subspace(engine(q, m, packed), ())


def full_space(m: int, q: int = 2, *, packed: bool | None = None) -> Subspace:
    eng = engine(q, m, packed)
    return Subspace(eng, eng.full)


def from_generators(vectors, m: int, q: int = 2, *, packed: bool | None = None) -> Subspace:
    """Span of ``vectors`` in canonical form; an empty list gives {0}."""
    eng = engine(q, m, packed)
    vectors = list(vectors)
    for v in vectors:
        if len(v) != m:
            raise ShapeError(f"generator of length {len(v)} in ambient dimension {m}")
    if not vectors:
        return Subspace(eng, ())
    return Subspace(eng, eng.rref(eng.vecs(vectors)))


def subspace_sum(v1: Subspace, v2: Subspace) -> Subspace:
    eng = _same_ambient(v1, v2)
    return Subspace(eng, eng.span_sum(v1._rows, v2._rows))


def intersect(v1: Subspace, v2: Subspace) -> Subspace:
    eng = _same_ambient(v1, v2)
    return Subspace(eng, eng.intersect(v1._rows, v2._rows))


def contains(v: Subspace, x) -> bool:
    eng = v._eng
    return eng.reduce(eng.vec(x), v._rows) == eng.zero


def uniform_random_subspace(m: int, d: int, q: int, rng: np.random.Generator,
                            *, packed: bool | None = None) -> Subspace:
    """Uniform draw from the Grassmannian of ``d``-dimensional subspaces of F_q^m.

    A uniform ``d x m`` matrix is redrawn until it has full rank; every subspace
    is the row space of the same number of such matrices.
    """
    if not 0 <= d <= m:
        raise ValueError(f"dimension d={d} outside [0, {m}]")
    eng = engine(q, m, packed)
    if d == 0:
        return Subspace(eng, ())
    while True:
        rows = eng.rref(eng.vecs(rng.integers(0, q, size=(d, m))))
        if len(rows) == d:
            return Subspace(eng, rows)


def random_element(v: Subspace, rng: np.random.Generator) -> np.ndarray:
    coeffs = rng.integers(0, v.q, size=v.dim)
    return v._eng.to_array(v._eng.combine(coeffs.tolist(), v._rows))


def _check_map(a: Matrix, eng):
    if a.shape != (eng.m, eng.m) or a.q != eng.q:
        raise ShapeError(f"map of shape {a.shape} over F_{a.q} on F_{eng.q}^{eng.m}")


def apply_map(a: Matrix, v: Subspace) -> Subspace:
    """Image ``{a v : v in V}`` of a subspace under an invertible map."""
    eng = v._eng
    _check_map(a, eng)
    out = eng.rref(eng.image_rows(a, v._rows))
    if len(out) != len(v._rows):
        raise SingularMatrixError("map is singular on the subspace")
    return Subspace(eng, out)


def affine(offset, direction: Subspace) -> AffineSubspace:
    eng = direction._eng
    return AffineSubspace(eng, eng.vec(offset), direction)


def point(x, q: int = 2, *, packed: bool | None = None) -> AffineSubspace:
    x = np.asarray(x, dtype=np.int64).reshape(-1)
    eng = engine(q, x.shape[0], packed)
    return AffineSubspace(eng, eng.vec(x), Subspace(eng, ()), canonical=True)


def linear(direction: Subspace) -> AffineSubspace:
    return AffineSubspace(direction._eng, direction._eng.zero, direction, canonical=True)


def affine_contains(a: AffineSubspace, x) -> bool:
    eng = a._eng
    v = eng.add(eng.vec(x), eng.neg(a._offset))
    return eng.reduce(v, a.direction._rows) == eng.zero


def affine_sum(a1: AffineSubspace, a2: AffineSubspace) -> AffineSubspace:
    eng = _same_ambient(a1, a2)
    d = Subspace(eng, eng.span_sum(a1.direction._rows, a2.direction._rows))
    if len(d._rows) == eng.m:
        return AffineSubspace(eng, eng.zero, d, canonical=True)
    return AffineSubspace(eng, eng.add(a1._offset, a2._offset), d)


def affine_neg(a: AffineSubspace) -> AffineSubspace:
    if a._offset == a._eng.zero:
        return a
    return AffineSubspace(a._eng, a._eng.neg(a._offset), a.direction)


def affine_intersect(a1: AffineSubspace, a2: AffineSubspace) -> AffineSubspace | None:
    """Intersection of two cosets, or ``None`` when they are disjoint."""
    eng = _same_ambient(a1, a2)
    d1, d2 = a1.direction._rows, a2.direction._rows
    x = eng.coset_meet(a1._offset, d1, a2._offset, d2)
    if x is None:
        return None
    return AffineSubspace(eng, x, Subspace(eng, eng.intersect(d1, d2)))


def affine_map(a: Matrix, x: AffineSubspace) -> AffineSubspace:
    eng = x._eng
    _check_map(a, eng)
    if len(x.direction._rows) == eng.m:
        return x
    direction = apply_map(a, x.direction)
    return AffineSubspace(eng, eng.image(a, x._offset), direction)
