"""Monte Carlo checks of the dimension recursions on actual random subspaces."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import partial

import numpy as np

from .channel import noise_dimension
from .streams import master_seed, run_parallel, trial_rng
from .subspace import intersect, subspace_sum, uniform_random_subspace


def int_boxdot(d1: int, d2: int, m: int) -> int:
    return max(d1 + d2 - m, 0)


def int_boxplus(d1: int, d2: int, m: int) -> int:
    return min(d1 + d2, m)


def concentration_bound(m: int, q: int, d1: int, d2: int, k: int) -> float:
    return 1.0 - float(q) ** (-k - max(0, m - d1 - d2))


@dataclass
class ConcentrationReport:
    m: int
    q: int
    d1: int
    d2: int
    k: int
    trials: int
    intersection_frequency: float
    sum_frequency: float
    bound: float
    sigma: float
    intersection_dims: dict
    sum_dims: dict

    @property
    def margin(self) -> float:
        """Bound minus three binomial standard deviations."""
        return self.bound - 3.0 * self.sigma

    @property
    def passes(self) -> bool:
        return self.intersection_frequency >= self.margin and self.sum_frequency >= self.margin

    def to_dict(self) -> dict:
        d = asdict(self)
        d["margin"] = self.margin
        d["passes"] = self.passes
        return d


def _pair_dims(args, *, seed: int, m: int, q: int, d1: int, d2: int):
    (i,) = args
    rng = trial_rng(seed, i)
    v1 = uniform_random_subspace(m, d1, q, rng)
    v2 = uniform_random_subspace(m, d2, q, rng)
    return intersect(v1, v2).dim, subspace_sum(v1, v2).dim


def mc_concentration(m: int, q: int, d1: int, d2: int, k: int, trials: int, rng, workers: int = 1) -> ConcentrationReport:
    """Empirical frequency of the generic-dimension windows for random pairs.

    Intersection window: ``d1⊡d2 <= dim(V1∩V2) < d1⊡d2 + k``.
    Sum window: ``d1⊞d2 - k < dim(V1+V2) <= d1⊞d2``, the image of the
    intersection window under ``dim(V1+V2) = d1 + d2 - dim(V1∩V2)``.
    """
    if not (0 <= d1 <= m and 0 <= d2 <= m) or k < 0:
        raise ValueError("need 0 <= d1, d2 <= m and k >= 0")
    seed = master_seed(rng)
    fn = partial(_pair_dims, seed=seed, m=m, q=q, d1=d1, d2=d2)
    dims = run_parallel(fn, [(i,) for i in range(trials)], workers)
    lo = int_boxdot(d1, d2, m)
    hi = int_boxplus(d1, d2, m)
    inter_hits = sum(lo <= a < lo + k for a, _ in dims)
    sum_hits = sum(hi - k < b <= hi for _, b in dims)
    bound = concentration_bound(m, q, d1, d2, k)
    n = max(trials, 1)
    sigma = math.sqrt(max(bound * (1 - bound), 0.0) / n)
    return ConcentrationReport(
        m, q, d1, d2, k, trials,
        intersection_frequency=inter_hits / n,
        sum_frequency=sum_hits / n,
        bound=bound,
        sigma=sigma,
        intersection_dims=_histogram(a for a, _ in dims),
        sum_dims=_histogram(b for _, b in dims),
    )


def _histogram(values) -> dict:
    out: dict[int, int] = {}
    for v in values:
        out[int(v)] = out.get(int(v), 0) + 1
    return dict(sorted(out.items()))


def mc_subspace_de(dl: int, dr: int, m: int, q: int, eps: float, T: int, trials: int, rng) -> list[float]:
    """Population estimate of ``E[dim V^(t)] / m`` for t = 0..T on the tree ensemble.

    Each iteration builds ``trials`` fresh check messages, each the sum of
    dr - 1 independent uniform subspaces, then ``trials`` variable messages,
    each a fresh channel space intersected with dl - 1 independent check
    messages. The law of every message is GL(m, F_q)-invariant, hence uniform
    given its dimension, so an independent copy is drawn as a uniform subspace
    whose dimension is taken from the previous population.
    """
    seed = master_seed(rng)
    d0 = noise_dimension(eps, m)
    v_dims = np.full(trials, d0, dtype=np.int64)
    means = [float(v_dims.mean()) / m]
    for t in range(1, T + 1):
        u_dims = np.empty(trials, dtype=np.int64)
        for n in range(trials):
            r = trial_rng(seed, t, 0, n)
            acc = uniform_random_subspace(m, int(v_dims[r.integers(trials)]), q, r)
            for _ in range(dr - 2):
                if acc.is_full():
                    break
                acc = subspace_sum(acc, uniform_random_subspace(m, int(v_dims[r.integers(trials)]), q, r))
            u_dims[n] = acc.dim
        for n in range(trials):
            r = trial_rng(seed, t, 1, n)
            acc = uniform_random_subspace(m, d0, q, r)
            for _ in range(dl - 1):
                if acc.is_zero():
                    break
                acc = intersect(acc, uniform_random_subspace(m, int(u_dims[r.integers(trials)]), q, r))
            v_dims[n] = acc.dim
        means.append(float(v_dims.mean()) / m)
    return means
