"""Regular and spatially-coupled parity-check codes with GL(m, F_q) coefficients."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .field import FieldSpec, Matrix, random_gl, rank


class ParameterError(ValueError):
    pass


class ConstructionError(RuntimeError):
    pass


def check_degrees(dl: int, dr: int) -> None:
    if dl < 1 or dr < 1:
        raise ParameterError(f"degrees must be positive, got dl={dl}, dr={dr}")
    if dr % dl or dr // dl < 2:
        raise ParameterError(f"dr/dl must be an integer >= 2, got dl={dl}, dr={dr}")


@dataclass(frozen=True)
class BaseMatrix:
    entries: np.ndarray

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def row_weights(self) -> list[int]:
        return self.entries.sum(axis=1).tolist()

    def col_weights(self) -> list[int]:
        return self.entries.sum(axis=0).tolist()

    def render(self) -> str:
        return "\n".join("".join("1" if e else " " for e in row).rstrip() for row in self.entries)


def base_matrix_coupled(dl: int, dr: int, L: int) -> BaseMatrix:
    """Band base matrix of size (L + dl - 1) x (dr/dl) L.

    Column ``j`` belongs to section ``j // (dr/dl)`` and has ones in the dl
    consecutive rows starting at its section index.
    """
    check_degrees(dl, dr)
    if L < 1:
        raise ParameterError(f"coupling number L must be >= 1, got {L}")
    a = dr // dl
    b = np.zeros((L + dl - 1, a * L), dtype=np.int64)
    for j in range(a * L):
        s = j // a
        b[s : s + dl, j] = 1
    b.setflags(write=False)
    return BaseMatrix(b)


def lift(base: BaseMatrix, M: int, rng: np.random.Generator) -> np.ndarray:
    """Replace every edge of the protograph by an independent M x M permutation."""
    if M < 1:
        raise ParameterError(f"lifting number M must be >= 1, got {M}")
    out = np.zeros((base.rows * M, base.cols * M), dtype=np.int64)
    for i, j in zip(*np.nonzero(base.entries)):
        for _ in range(int(base.entries[i, j])):
            out[i * M + np.arange(M), j * M + rng.permutation(M)] += 1
    return out


@dataclass(frozen=True)
class ParityCheckCode:
    """Sparse GL(m, F_q)-valued parity-check matrix.

    ``rows[i]`` lists the ``(variable, coefficient)`` pairs of check ``i`` in
    increasing variable order.
    """

    q: int
    m: int
    n_checks: int
    n_vars: int
    rows: tuple[tuple[tuple[int, Matrix], ...], ...]
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n_edges(self) -> int:
        return sum(len(r) for r in self.rows)

    def var_neighbors(self) -> list[list[int]]:
        nb: list[list[int]] = [[] for _ in range(self.n_vars)]
        for i, row in enumerate(self.rows):
            for j, _ in row:
                nb[j].append(i)
        return nb

    def skeleton(self) -> np.ndarray:
        h = np.zeros((self.n_checks, self.n_vars), dtype=np.int64)
        for i, row in enumerate(self.rows):
            for j, _ in row:
                h[i, j] += 1
        return h

    def syndrome(self, word) -> list[np.ndarray]:
        """Per-check value of sum_j h_ij x_j."""
        out = []
        for row in self.rows:
            s = np.zeros(self.m, dtype=np.int64)
            for j, h in row:
                s += h.data @ np.asarray(word[j], dtype=np.int64)
            out.append(s % self.q)
        return out

    def is_codeword(self, word) -> bool:
        return all(not s.any() for s in self.syndrome(word))


def code_from_skeleton(h: np.ndarray, m: int, q: int, rng: np.random.Generator, meta=None) -> ParityCheckCode:
    """Attach one independent uniform GL(m, F_q) coefficient to every 1 of ``h``."""
    FieldSpec(q)
    if np.any(h > 1):
        raise ConstructionError("skeleton has repeated (check, variable) incidences")
    rows = []
    for i in range(h.shape[0]):
        rows.append(tuple((int(j), random_gl(m, q, rng)) for j in np.flatnonzero(h[i])))
    return ParityCheckCode(q, m, h.shape[0], h.shape[1], tuple(rows), dict(meta or {}))


def _regular_skeleton(dl: int, dr: int, M: int, rng: np.random.Generator, max_swaps: int) -> np.ndarray:
    n_checks, n_vars = M * dl, M * dr
    var_of = np.repeat(np.arange(n_vars), dl).tolist()
    check_of = rng.permutation(np.repeat(np.arange(n_checks), dr)).tolist()
    counts = Counter(zip(check_of, var_of))

    # Repeated incidences are repaired by swapping check sockets with a random edge.
    swaps = 0
    while True:
        bad = [e for e, ce in enumerate(check_of) if counts[ce, var_of[e]] > 1]
        if not bad:
            break
        for e in bad:
            if counts[check_of[e], var_of[e]] < 2:
                continue
            swaps += 1
            if swaps > max_swaps:
                raise ConstructionError("could not remove repeated edges from the regular graph")
            f = int(rng.integers(len(check_of)))
            ce, cf, ve, vf = check_of[e], check_of[f], var_of[e], var_of[f]
            if ce == cf or counts[cf, ve] or counts[ce, vf]:
                continue
            counts[ce, ve] -= 1
            counts[cf, vf] -= 1
            counts[cf, ve] += 1
            counts[ce, vf] += 1
            check_of[e], check_of[f] = cf, ce
    h = np.zeros((n_checks, n_vars), dtype=np.int64)
    h[check_of, var_of] = 1
    return h


def build_regular(dl: int, dr: int, M: int, m: int, q: int, rng: np.random.Generator,
                  *, seed=None, max_swaps: int = 10_000) -> ParityCheckCode:
    """Regular (dl, dr) code: M dl checks and M dr variables of degree dl."""
    check_degrees(dl, dr)
    FieldSpec(q)
    if M < 1 or m < 1:
        raise ParameterError("M and m must be >= 1")
    h = _regular_skeleton(dl, dr, M, rng, max_swaps)
    meta = {"dl": dl, "dr": dr, "L": None, "M": M, "seed": seed}
    return code_from_skeleton(h, m, q, rng, meta)


def build_coupled(dl: int, dr: int, L: int, M: int, m: int, q: int, rng: np.random.Generator,
                  *, seed=None) -> ParityCheckCode:
    FieldSpec(q)
    if m < 1:
        raise ParameterError("m must be >= 1")
    h = lift(base_matrix_coupled(dl, dr, L), M, rng)
    meta = {"dl": dl, "dr": dr, "L": L, "M": M, "seed": seed}
    return code_from_skeleton(h, m, q, rng, meta)


def design_rate(dl: int, dr: int, L: int | None = None) -> float:
    """1 - (check blocks)/(variable blocks), assuming full row rank."""
    check_degrees(dl, dr)
    if L is None:
        return 1.0 - dl / dr
    return 1.0 - (dl / dr) * (L + dl - 1) / L


def code_to_dict(code: ParityCheckCode) -> dict:
    meta = {k: code.meta.get(k) for k in ("dl", "dr", "L", "M", "seed")}
    return {
        "q": code.q,
        "m": code.m,
        "n_checks": code.n_checks,
        "n_vars": code.n_vars,
        "rows": [[[j, h.tolist()] for j, h in row] for row in code.rows],
        "meta": meta,
    }


def code_from_dict(d: dict) -> ParityCheckCode:
    try:
        q, m = int(d["q"]), int(d["m"])
        n_checks, n_vars = int(d["n_checks"]), int(d["n_vars"])
        raw_rows = d["rows"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed code file: {exc}") from exc
    FieldSpec(q)
    if len(raw_rows) != n_checks:
        raise ValueError(f"code file lists {len(raw_rows)} rows, header says {n_checks}")
    rows = []
    for row in raw_rows:
        entries = []
        for j, coeff in row:
            if not 0 <= int(j) < n_vars:
                raise ValueError(f"variable index {j} out of range")
            a = np.array(coeff, dtype=np.int64)
            if a.shape != (m, m) or a.min() < 0 or a.max() >= q:
                raise ValueError(f"bad coefficient matrix for variable {j}")
            h = Matrix(a, q)
            if rank(h) != m:
                raise ValueError(f"coefficient for variable {j} is singular")
            entries.append((int(j), h))
        rows.append(tuple(entries))
    return ParityCheckCode(q, m, n_checks, n_vars, tuple(rows), dict(d.get("meta") or {}))


def dumps_code(code: ParityCheckCode) -> str:
    return json.dumps(code_to_dict(code), sort_keys=True, separators=(",", ":")) + "\n"


def write_code(code: ParityCheckCode, path) -> None:
    Path(path).write_text(dumps_code(code))


def read_code(path) -> ParityCheckCode:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    return code_from_dict(d)
