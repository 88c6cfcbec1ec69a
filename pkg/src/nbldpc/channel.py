"""The CD(m, eps) subspace-noise channel."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import FieldSpec, ShapeError
from .subspace import AffineSubspace, Subspace, affine, random_element, uniform_random_subspace


def capacity(epsilon: float) -> float:
    """Normalized capacity 1 - eps of CD(m, eps)."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"noise rate {epsilon} outside [0, 1]")
    return 1.0 - epsilon


def noise_dimension(epsilon: float, m: int) -> int:
    # round half up; pick (m, eps) with eps*m integral to avoid relying on it
    return int(math.floor(epsilon * m + 0.5))


@dataclass(frozen=True)
class ChannelSpec:
    q: int
    m: int
    epsilon: float

    def __post_init__(self):
        FieldSpec(self.q)
        if self.m < 1:
            raise ValueError("symbol dimension m must be >= 1")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"noise rate {self.epsilon} outside [0, 1]")

    @property
    def noise_dim(self) -> int:
        return noise_dimension(self.epsilon, self.m)

    @property
    def integral(self) -> bool:
        return math.isclose(self.epsilon * self.m, round(self.epsilon * self.m), abs_tol=1e-9)


@dataclass(frozen=True)
class ChannelOutput:
    y: np.ndarray
    noise_space: Subspace


def transmit(spec: ChannelSpec, x, rng: np.random.Generator) -> ChannelOutput:
    x = np.asarray(x, dtype=np.int64).reshape(-1)
    if x.shape[0] != spec.m:
        raise ShapeError(f"symbol of length {x.shape[0]} on a channel with m={spec.m}")
    v = uniform_random_subspace(spec.m, spec.noise_dim, spec.q, rng)
    z = random_element(v, rng)
    y = (x + z) % spec.q
    y.setflags(write=False)
    return ChannelOutput(y, v)


def transmit_word(spec: ChannelSpec, word, rng: np.random.Generator) -> list[ChannelOutput]:
    """Independent noise space and noise vector for every symbol of ``word``."""
    return [transmit(spec, x, rng) for x in word]


def received_affine(out: ChannelOutput) -> AffineSubspace:
    """The coset ``y - V`` of inputs compatible with ``out`` (``-V = V``)."""
    return affine(out.y, out.noise_space)
