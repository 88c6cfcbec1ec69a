"""Monte Carlo decoding campaigns over CD(m, eps) with all-zero transmission."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .channel import ChannelSpec, transmit_word
from .codes import ParityCheckCode
from .decoder import DecoderConfig, decode, peeling_decode
from .streams import trial_rng

Z95 = 1.959963984540054


@dataclass
class TrialRecord:
    trial: int
    epsilon: float
    status: str
    iterations_used: int
    max_final_dim: int
    truth_violations: int
    wall_time: float

    def primary(self) -> dict:
        """Fields that are a pure function of (seed, trial); wall time excluded."""
        d = asdict(self)
        del d["wall_time"]
        return d


def wilson_interval(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return lo, hi


def run_trial(code: ParityCheckCode, epsilon: float, seed: int, index: int,
              cfg: DecoderConfig, decoder: str = "spa") -> TrialRecord:
    """Send the all-zero word once and decode it; the stream depends on (seed, index) only."""
    start = time.perf_counter()
    rng = trial_rng(seed, index)
    spec = ChannelSpec(code.q, code.m, epsilon)
    zero = [np.zeros(code.m, dtype=np.int64)] * code.n_vars
    outputs = transmit_word(spec, zero, rng)
    if decoder == "spa":
        res = decode(code, outputs, cfg, truth=zero)
    elif decoder == "peeling":
        res = peeling_decode(code, outputs, cfg)
    else:
        raise ValueError(f"unknown decoder {decoder!r}")
    return TrialRecord(
        trial=index,
        epsilon=epsilon,
        status=res.status.value,
        iterations_used=res.iterations_used,
        max_final_dim=res.max_final_dim,
        truth_violations=res.truth_violations,
        wall_time=time.perf_counter() - start,
    )


_WORKER: dict = {}


def _init_worker(code, seed, cfg, decoder):
    _WORKER.update(code=code, seed=seed, cfg=cfg, decoder=decoder)


def _worker_trial(job):
    index, epsilon = job
    w = _WORKER
    return run_trial(w["code"], epsilon, w["seed"], index, w["cfg"], w["decoder"])


def simulate(code: ParityCheckCode, epsilons, trials: int, seed: int,
             cfg: DecoderConfig | None = None, decoder: str = "spa", workers: int = 1) -> list[TrialRecord]:
    """Run ``trials`` trials per noise rate.

    Trial ``t`` at grid position ``g`` gets global index ``g * trials + t``.
    """
    cfg = cfg or DecoderConfig()
    jobs = [(g * trials + t, float(eps)) for g, eps in enumerate(epsilons) for t in range(trials)]
    if workers <= 1 or len(jobs) <= 1:
        return [run_trial(code, eps, seed, i, cfg, decoder) for i, eps in jobs]
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                             initargs=(code, seed, cfg, decoder)) as pool:
        return list(pool.map(_worker_trial, jobs, chunksize=4))


def summarize(records: list[TrialRecord], epsilons=None) -> list[dict]:
    """Block-error rate and Wilson 95% interval per noise rate."""
    if epsilons is None:
        epsilons = sorted({r.epsilon for r in records})
    out = []
    for eps in epsilons:
        rows = [r for r in records if r.epsilon == float(eps)]
        n = len(rows)
        errors = sum(r.status != "decoded" for r in rows)
        lo, hi = wilson_interval(errors, n)
        out.append({
            "epsilon": float(eps),
            "trials": n,
            "block_errors": errors,
            "bler": errors / n if n else None,
            "wilson_low": lo,
            "wilson_high": hi,
            "inconsistent": sum(r.status == "inconsistent" for r in rows),
            "truth_violations": sum(r.truth_violations for r in rows),
        })
    return out
