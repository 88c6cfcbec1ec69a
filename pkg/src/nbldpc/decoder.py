"""Sum-product decoding with affine-subspace messages, a peeling decoder, and
an exhaustive marginalization oracle for tiny instances."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import prod

import numpy as np

from .channel import received_affine
from .codes import ParityCheckCode
from .field import Matrix, ShapeError
from .subspace import (
    AffineSubspace,
    affine_intersect,
    affine_map,
    affine_neg,
    affine_sum,
    point,
)


class Status(str, enum.Enum):
    DECODED = "decoded"
    STALLED = "stalled"
    INCONSISTENT = "inconsistent"


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class DecoderConfig:
    max_iterations: int = 100
    schedule: str = "flooding"
    track_dimensions: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.schedule != "flooding":
            raise ValueError(f"unsupported schedule {self.schedule!r}")


@dataclass
class DecodeResult:
    status: Status
    iterations_used: int
    decoded_word: list[np.ndarray] | None
    final_dims: list[int]
    dim_trace: list[float] | None = None
    posteriors: list[AffineSubspace] | None = field(default=None, repr=False)
    truth_violations: int = 0

    @property
    def success(self) -> bool:
        return self.status is Status.DECODED

    @property
    def max_final_dim(self) -> int:
        return max(self.final_dims, default=0)


def check_update(incoming: list[tuple[AffineSubspace, Matrix]], out_coeff: Matrix) -> AffineSubspace:
    """Solve one parity check for the target symbol.

    ``incoming`` holds the messages of the other neighbours with their
    coefficients; the result is ``out_coeff^-1 (-sum coeff_k A_k)``.
    """
    if not incoming:
        raise ValueError("a check update needs at least one incoming message")
    acc = None
    for msg, h in incoming:
        term = affine_map(h, msg)
        acc = term if acc is None else affine_sum(acc, term)
    return affine_map(out_coeff.inverse, affine_neg(acc))


def var_update(channel: AffineSubspace, incoming: list[AffineSubspace]) -> AffineSubspace | None:
    """Intersect the channel coset with all incoming messages; ``None`` if empty."""
    acc = channel
    for msg in incoming:
        acc = affine_intersect(acc, msg)
        if acc is None:
            return None
    return acc


def _leave_one_out(items, op):
    """``out[k] = op`` applied to every item except ``items[k]``, via prefix/suffix folds."""
    n = len(items)
    if n == 1:
        return [None]
    prefix = [items[0]]
    for x in items[1:-1]:
        prefix.append(op(prefix[-1], x))
    suffix = [items[-1]]
    for x in reversed(items[1:-1]):
        suffix.append(op(x, suffix[-1]))
    suffix.reverse()
    out = [suffix[0]]
    for k in range(1, n - 1):
        out.append(op(prefix[k - 1], suffix[k]))
    out.append(prefix[-1])
    return out


def _validate(code: ParityCheckCode, outputs) -> list[AffineSubspace]:
    if len(outputs) != code.n_vars:
        raise ShapeError(f"{len(outputs)} channel outputs for {code.n_vars} variables")
    received = []
    for out in outputs:
        r = out if isinstance(out, AffineSubspace) else received_affine(out)
        if r.q != code.q or r.m != code.m:
            raise ShapeError(f"channel output over F_{r.q}^{r.m}, code over F_{code.q}^{code.m}")
        received.append(r)
    return received


class _Truth:
    def __init__(self, truth):
        self.truth = None if truth is None else [np.asarray(t, dtype=np.int64) for t in truth]
        self.violations = 0

    def check(self, var_of_edge, messages):
        if self.truth is None:
            return
        for e, msg in enumerate(messages):
            if msg is not None and self.truth[var_of_edge[e]] not in msg:
                self.violations += 1


def _result(status, iters, posteriors, trace, truth) -> DecodeResult:
    dims = [p.dim if p is not None else -1 for p in posteriors]
    word = None
    if status is Status.DECODED:
        word = [p.offset for p in posteriors]
    return DecodeResult(status, iters, word, dims, trace, list(posteriors), truth.violations)


def decode(code: ParityCheckCode, outputs, cfg: DecoderConfig | None = None, *, truth=None) -> DecodeResult:
    """Flooding sum-product decoding.

    ``outputs`` are :class:`ChannelOutput` values (or already-formed received
    cosets). If ``truth`` is given, every message is checked to contain the
    transmitted symbol and failures are counted in ``truth_violations``.
    """
    cfg = cfg or DecoderConfig()
    received = _validate(code, outputs)
    m = code.m
    monitor = _Truth(truth)

    edge_var: list[int] = []
    edge_coeff: list[Matrix] = []
    check_edges: list[list[int]] = []
    var_edges: list[list[int]] = [[] for _ in range(code.n_vars)]
    for row in code.rows:
        ids = []
        for j, h in row:
            e = len(edge_var)
            edge_var.append(j)
            edge_coeff.append(h)
            var_edges[j].append(e)
            ids.append(e)
        check_edges.append(ids)

    v_msg: list[AffineSubspace] = [received[j] for j in edge_var]
    u_msg: list[AffineSubspace | None] = [None] * len(edge_var)
    posteriors: list[AffineSubspace] = list(received)
    trace = [] if cfg.track_dimensions else None
    if trace is not None:
        trace.append(_mean_dim(v_msg, m))
    monitor.check(edge_var, v_msg)

    if all(p.is_point() for p in posteriors):
        return _result(Status.DECODED, 0, posteriors, trace, monitor)

    for it in range(1, cfg.max_iterations + 1):
        for ids in check_edges:
            if len(ids) == 1:
                e = ids[0]
                u_msg[e] = point(np.zeros(m, dtype=np.int64), code.q)
                continue
            terms = [affine_map(edge_coeff[e], v_msg[e]) for e in ids]
            for e, s in zip(ids, _leave_one_out(terms, affine_sum)):
                u_msg[e] = affine_map(edge_coeff[e].inverse, affine_neg(s))
        monitor.check(edge_var, u_msg)

        new_v = list(v_msg)
        for j, ids in enumerate(var_edges):
            post = var_update(received[j], [u_msg[e] for e in ids])
            if post is None:
                posteriors[j] = None
                return _result(Status.INCONSISTENT, it, posteriors, trace, monitor)
            posteriors[j] = post
            if len(ids) == 1:
                new_v[ids[0]] = received[j]
                continue
            extrinsic = _leave_one_out([u_msg[e] for e in ids], _meet)
            for e, x in zip(ids, extrinsic):
                msg = _meet(received[j], x)
                if msg is None:
                    return _result(Status.INCONSISTENT, it, posteriors, trace, monitor)
                new_v[e] = msg
        monitor.check(edge_var, new_v)
        if trace is not None:
            trace.append(_mean_dim(new_v, m))

        if all(p.is_point() for p in posteriors):
            return _result(Status.DECODED, it, posteriors, trace, monitor)
        if new_v == v_msg:
            return _result(Status.STALLED, it, posteriors, trace, monitor)
        v_msg = new_v
    return _result(Status.STALLED, cfg.max_iterations, posteriors, trace, monitor)


def _meet(a, b):
    if a is None or b is None:
        return None
    return affine_intersect(a, b)


def _mean_dim(msgs, m: int) -> float:
    return float(np.mean([x.dim for x in msgs])) / m if msgs else 0.0


def peeling_decode(code: ParityCheckCode, outputs, cfg: DecoderConfig | None = None) -> DecodeResult:
    """Resolve symbols one check at a time.

    A symbol whose coset is a single point is substituted into its checks; a
    check left with one unresolved symbol determines it through the inverse of
    that symbol's coefficient. Rounds repeat until nothing changes.
    """
    cfg = cfg or DecoderConfig()
    received = _validate(code, outputs)
    m, q = code.m, code.q
    state = list(received)
    acc = [np.zeros(m, dtype=np.int64) for _ in range(code.n_checks)]
    unknown = [{j: h for j, h in row} for row in code.rows]
    var_checks = code.var_neighbors()

    if all(s.is_point() for s in state):
        return _result(Status.DECODED, 0, state, None, _Truth(None))
    fixed = [False] * code.n_vars
    frontier = [j for j in range(code.n_vars) if state[j].is_point()]
    rounds = 0
    while frontier and rounds < cfg.max_iterations:
        nxt = []
        for j in frontier:
            if fixed[j]:
                continue
            fixed[j] = True
            x = state[j].offset
            for i in var_checks[j]:
                h = unknown[i].pop(j, None)
                if h is None:
                    continue
                acc[i] = (acc[i] + h.data @ x) % q
                if len(unknown[i]) == 1:
                    (k, hk), = unknown[i].items()
                    if fixed[k]:
                        continue
                    val = (hk.inverse.data @ (-acc[i])) % q
                    new = affine_intersect(state[k], point(val, q))
                    if new is None:
                        state[k] = None
                        return _result(Status.INCONSISTENT, rounds + 1, state, None, _Truth(None))
                    if not state[k].is_point():
                        state[k] = new
                        nxt.append(k)
                elif not unknown[i] and acc[i].any():
                    return _result(Status.INCONSISTENT, rounds + 1, state, None, _Truth(None))
        rounds += 1
        frontier = nxt
    status = Status.DECODED if all(s.is_point() for s in state) else Status.STALLED
    return _result(status, rounds, state, None, _Truth(None))


def brute_force_marginal(code: ParityCheckCode, outputs, limit: int = 1 << 20,
                         chunk: int = 1 << 14) -> list[set[tuple[int, ...]]]:
    """Exact per-symbol compatible sets by enumerating every assignment.

    Only assignments inside the received cosets that satisfy all checks
    survive; for each symbol the set of values it takes in some survivor is
    returned.
    """
    received = _validate(code, outputs)
    q, m = code.q, code.m
    points = [np.array(list(r.elements()), dtype=np.int64).reshape(-1, m) for r in received]
    sizes = [p.shape[0] for p in points]
    total = prod(sizes)
    if total > limit:
        raise InstanceTooLarge(f"{total} assignments exceed the enumeration limit {limit}")
    # images[i][j] = h_ij applied to every candidate of symbol j
    images = [{j: (points[j] @ h.data.T) % q for j, h in row} for row in code.rows]
    found = [np.zeros(s, dtype=bool) for s in sizes]
    radix = np.cumprod([1] + sizes[:-1]) if sizes else np.array([], dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = [(idx // radix[j]) % sizes[j] for j in range(len(sizes))]
        ok = np.ones(idx.size, dtype=bool)
        for row in images:
            s = np.zeros((idx.size, m), dtype=np.int64)
            for j, img in row.items():
                s += img[digits[j]]
            ok &= ~(s % q).any(axis=1)
        for j in range(len(sizes)):
            found[j][np.unique(digits[j][ok])] = True
    return [{tuple(int(e) for e in points[j][k]) for k in np.flatnonzero(found[j])} for j in range(len(sizes))]
