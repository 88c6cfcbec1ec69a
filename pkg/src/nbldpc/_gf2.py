"""Packed GF(2) row operations.

A vector of length m is a Python int; column c lives at bit (m - 1 - c), so the
leftmost column is the most significant bit. Under this packing a matrix in
reduced row echelon form is a tuple of ints sorted in strictly decreasing order,
and the pivot column of a row r is ``m - r.bit_length()``.
"""

from __future__ import annotations

import numpy as np


def pack_rows(a: np.ndarray) -> list[int]:
    a = np.asarray(a, dtype=np.uint8) & 1
    if a.ndim == 1:
        a = a[None, :]
    m = a.shape[1]
    if m == 0:
        return [0] * a.shape[0]
    pad = (-m) % 8
    packed = np.packbits(a, axis=1)
    return [int.from_bytes(row.tobytes(), "big") >> pad for row in packed]


def pack(v) -> int:
    return pack_rows(np.asarray(v).reshape(1, -1))[0]


def unpack_rows(rows, m: int) -> np.ndarray:
    out = np.zeros((len(rows), m), dtype=np.int64)
    if m == 0 or not rows:
        return out
    pad = (-m) % 8
    nbytes = (m + pad) // 8
    buf = b"".join((r << pad).to_bytes(nbytes, "big") for r in rows)
    bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8).reshape(len(rows), nbytes), axis=1)
    out[:, :] = bits[:, :m]
    return out


def unpack(v: int, m: int) -> np.ndarray:
    return unpack_rows([v], m)[0]


def reduce(v: int, basis) -> int:
    """Reduce ``v`` against an RREF basis (decreasing ints)."""
    for b in basis:
        if v >> (b.bit_length() - 1) & 1:
            v ^= b
    return v


def rref(rows) -> tuple[int, ...]:
    """Reduced row echelon form of the span of ``rows``, zero rows dropped."""
    piv: dict[int, int] = {}
    for v in rows:
        while v:
            top = v.bit_length() - 1
            b = piv.get(top)
            if b is None:
                piv[top] = v
                break
            v ^= b
    tops = sorted(piv)
    done: list[tuple[int, int]] = []
    for top in tops:
        r = piv[top]
        for t, b in done:
            if r >> t & 1:
                r ^= b
        done.append((top, r))
    return tuple(r for _, r in reversed(done))


def insert(basis: tuple[int, ...], v: int) -> tuple[int, ...]:
    v = reduce(v, basis)
    if not v:
        return basis
    top = v.bit_length() - 1
    out = [b ^ v if b >> top & 1 else b for b in basis]
    out.append(v)
    out.sort(reverse=True)
    return tuple(out)


def intersect(b1, b2, m: int) -> tuple[int, ...]:
    """Zassenhaus intersection of two row spaces in GF(2)^m."""
    if not b1 or not b2:
        return ()
    rows = [(a << m) | a for a in b1] + [b << m for b in b2]
    full = rref(rows)
    mask = (1 << m) - 1
    return tuple(r for r in full if r <= mask)


def columns(a: np.ndarray) -> tuple[int, ...]:
    """Columns of a square matrix packed as vectors (for fast matrix-vector products)."""
    return tuple(pack_rows(np.asarray(a).T))


def matvec(cols, v: int, m: int) -> int:
    out = 0
    while v:
        top = v.bit_length() - 1
        out ^= cols[m - 1 - top]
        v ^= 1 << top
    return out


def pivots(basis, m: int) -> list[int]:
    return [m - b.bit_length() for b in basis]
