"""Scalar density evolution on normalized subspace dimensions.

Messages are tracked by ``dim / m`` in [0, 1]. Generic intersection and sum of
independent uniform subspaces act on these values through

    a ⊡ b = max(a + b - 1, 0)      a ⊞ b = min(a + b, 1)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import check_degrees

ZERO_CUTOFF = 1e-12
FIXED_POINT_CUTOFF = 1e-14
BISECTION_STEPS = 60


def _check_unit(*xs: float) -> None:
    for x in xs:
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"normalized dimension {x} outside [0, 1]")


def boxdot(a: float, b: float) -> float:
    _check_unit(a, b)
    return max(a - (1.0 - b), 0.0)


def boxplus(a: float, b: float) -> float:
    _check_unit(a, b)
    return min(a + b, 1.0)


def boxplus_power(x: float, k: int) -> float:
    """``x ⊞ x ⊞ ... ⊞ x`` with k terms."""
    return min(k * x, 1.0)


def boxdot_power(eps: float, x: float, k: int) -> float:
    """``eps ⊡ x ⊡ ... ⊡ x`` with k copies of x.

    Written as ``eps + k (x - 1)`` so that ``x == 1`` returns ``eps`` exactly.
    """
    return max(eps + k * (x - 1.0), 0.0)


def _check_params(dl: int, dr: int, eps: float) -> None:
    if dl < 2 or dr <= dl:
        raise ValueError(f"need dl >= 2 and dr > dl, got dl={dl}, dr={dr}")
    _check_unit(eps)


def de_regular_step(xi: float, dl: int, dr: int, eps: float) -> float:
    """One check-then-variable update of the (dl, dr) recursion."""
    _check_params(dl, dr, eps)
    _check_unit(xi)
    zeta = boxplus_power(xi, dr - 1)
    return boxdot_power(eps, zeta, dl - 1)


def de_regular_trace(dl: int, dr: int, eps: float, T: int) -> list[float]:
    xi = eps
    out = [xi]
    for _ in range(T):
        xi = de_regular_step(xi, dl, dr, eps)
        out.append(xi)
    return out


def de_closed_form(dl: int, dr: int, eps: float, t: int) -> float:
    """Explicit solution of the regular recursion, valid for eps < 1/(dr - 1)."""
    _check_params(dl, dr, eps)
    if eps >= 1.0 / (dr - 1):
        raise ValueError(f"closed form needs eps < 1/(dr-1) = {1.0 / (dr - 1)}, got {eps}")
    if t == 0:
        return eps
    a = (dl - 1) * (dr - 1)
    growth = (dl - 1) * float(a) ** t / (a - 1) * ((dr - 1) * eps - 1)
    return max(growth + (eps - (dl - 1)) / (1 - a), 0.0)


def converges_regular(dl: int, dr: int, eps: float, max_steps: int = 10_000) -> bool:
    """Whether the regular recursion started at eps is driven to 0."""
    xi = eps
    for _ in range(max_steps):
        if xi < ZERO_CUTOFF:
            return True
        nxt = de_regular_step(xi, dl, dr, eps)
        if abs(nxt - xi) < FIXED_POINT_CUTOFF:
            return nxt < ZERO_CUTOFF
        xi = nxt
    return xi < ZERO_CUTOFF


def bisect_threshold(predicate, tol: float, lo: float = 0.0, hi: float = 1.0) -> float:
    """Supremum of eps in [lo, hi] with ``predicate(eps)`` true, for a monotone predicate.

    Returns the largest point verified to satisfy the predicate, so the result
    is within ``tol`` below the supremum.
    """
    if predicate(hi):
        return hi
    for _ in range(BISECTION_STEPS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            lo = mid
        else:
            hi = mid
    return lo


def threshold_regular(dl: int, dr: int, tol: float = 1e-9) -> float:
    check_degrees(dl, dr)
    if dl < 2:
        raise ValueError("threshold needs dl >= 2")
    return bisect_threshold(lambda e: converges_regular(dl, dr, e), tol)


@dataclass
class CoupledDEState:
    """Coupled recursion state.

    ``xi[j, k]``: section j to check row j + k.  ``zeta[i, k]``: check row i to
    section i - k.  ``xi_post[j]``: a-posteriori value of section j.
    """

    L: int
    dl: int
    dr: int
    xi: np.ndarray
    zeta: np.ndarray
    xi_post: np.ndarray

    @classmethod
    def initial(cls, dl: int, dr: int, L: int, eps: float) -> "CoupledDEState":
        check_degrees(dl, dr)
        return cls(
            L, dl, dr,
            xi=np.full((L, dl), float(eps)),
            zeta=np.zeros((L + dl - 1, dl)),
            xi_post=np.full(L, float(eps)),
        )


def padded_mask(L: int, dl: int) -> np.ndarray:
    """True where check row i, edge type k points at a section outside [0, L)."""
    i = np.arange(L + dl - 1)[:, None]
    k = np.arange(dl)[None, :]
    return (i - k < 0) | (i - k >= L)


def de_coupled_step(state: CoupledDEState, eps: float) -> CoupledDEState:
    """One coupled update.

    A check row receives ``dr/dl`` edges from each of the dl sections it
    covers; the outgoing edge is excluded from its own position. Sections
    outside ``[0, L)`` are known and contribute 0.
    """
    _check_unit(eps)
    L, dl, dr = state.L, state.dl, state.dr
    a = dr // dl
    rows = L + dl - 1

    # padded[i, k] = xi of section i - k along edge type k (0 outside [0, L))
    padded = np.zeros((rows, dl))
    for k in range(dl):
        padded[k : k + L, k] = state.xi[:, k]
    total = a * padded.sum(axis=1, keepdims=True)
    zeta = np.minimum(total - padded, 1.0)
    zeta[padded_mask(L, dl)] = 0.0

    # incoming[j, k] = zeta of check row j + k along edge type k
    incoming = np.stack([zeta[k : k + L, k] for k in range(dl)], axis=1)
    s = incoming.sum(axis=1, keepdims=True)
    xi = np.maximum(eps + (s - incoming) - (dl - 1), 0.0)
    post = np.maximum(eps + s[:, 0] - dl, 0.0)
    return CoupledDEState(L, dl, dr, xi, zeta, post)


def de_coupled_run(dl: int, dr: int, L: int, eps: float, T_max: int) -> tuple[bool, int, CoupledDEState]:
    """Iterate until every section's a-posteriori value is below the cutoff."""
    state = CoupledDEState.initial(dl, dr, L, eps)
    for t in range(1, T_max + 1):
        nxt = de_coupled_step(state, eps)
        if nxt.xi_post.max() < ZERO_CUTOFF:
            return True, t, nxt
        if np.abs(nxt.xi - state.xi).max() < FIXED_POINT_CUTOFF and t > 1:
            return False, t, nxt
        state = nxt
    return False, T_max, state


def threshold_coupled(dl: int, dr: int, L: int, tol: float = 1e-6, T_max: int | None = None) -> float:
    """Bisection threshold of the coupled recursion.

    Not reaching zero within ``T_max`` steps counts as failure; the default
    cap is ``10 (L + dl)``.
    """
    check_degrees(dl, dr)
    if T_max is None:
        T_max = 10 * (L + dl)
    return bisect_threshold(lambda e: de_coupled_run(dl, dr, L, e, T_max)[0], tol)
