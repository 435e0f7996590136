"""Plaintext alphabet partition of the visiting interval.

The visiting interval ``[x_min, x_max)`` is cut into ``S`` half-open
epsilon-intervals. A secret permutation (the association map) assigns a
plaintext symbol to each interval; states outside the visiting interval map
to the out-of-range symbol ``BETA``, which never equals a plaintext symbol.
"""

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from baptista.chaos import MapKind

BETA = -1

DEFAULT_X_RANGE = {
    MapKind.LOGISTIC: (0.2, 0.8),
    MapKind.SKEW_TENT: (0.05, 0.95),
    MapKind.PWLCM: (0.05, 0.95),
}


def _keyed_words(seed):
    key = seed.to_bytes(16, "big")
    block = 0
    while True:
        digest = hashlib.blake2b(block.to_bytes(8, "big"), key=key, digest_size=64,
                                 person=b"baptista-assoc").digest()
        for i in range(0, 64, 8):
            yield int.from_bytes(digest[i:i + 8], "big")
        block += 1


def derive_association(seed, S):
    """Seed-keyed Fisher-Yates shuffle of ``0..S-1``.

    The word stream is BLAKE2b keyed with the 128-bit seed in counter mode;
    indices are drawn by rejection so every permutation is equally likely.
    """
    if S < 2:
        raise ValueError("alphabet size must be at least 2")
    if not (0 <= seed < 2**128):
        raise ValueError("association seed must be a 128-bit unsigned integer")
    words = _keyed_words(seed)
    perm = list(range(S))
    for i in range(S - 1, 0, -1):
        n = i + 1
        limit = 2**64 - (2**64 % n)
        r = next(words)
        while r >= limit:
            r = next(words)
        j = r % n
        perm[i], perm[j] = perm[j], perm[i]
    return perm


@dataclass(frozen=True)
class Partition:
    x_min: float
    x_max: float
    S: int
    association: tuple
    beta_symbol: int = BETA

    def __post_init__(self):
        if not (0.0 <= self.x_min < self.x_max <= 1.0):
            raise ValueError("visiting interval must satisfy 0 <= x_min < x_max <= 1")
        assoc = tuple(int(a) for a in self.association)
        object.__setattr__(self, "association", assoc)
        if len(assoc) != self.S or sorted(assoc) != list(range(self.S)):
            raise ValueError("association must be a permutation of 0..S-1")
        if 0 <= self.beta_symbol < self.S:
            raise ValueError("beta symbol collides with the plaintext alphabet")

    @classmethod
    def identity(cls, S=256, x_range=(0.0, 1.0)):
        return cls(x_range[0], x_range[1], S, tuple(range(S)))

    @classmethod
    def for_key(cls, key, S=256, x_range=None):
        """Partition derived from a key: association from ``key.assoc_seed``."""
        lo, hi = x_range or DEFAULT_X_RANGE[key.map.kind]
        part = cls(lo, hi, S, tuple(derive_association(key.assoc_seed, S)))
        if key.perturb.enabled and key.perturb.max_displacement >= part.epsilon:
            raise ValueError("perturbation displacement must stay below the interval width")
        return part

    @property
    def epsilon(self):
        return (self.x_max - self.x_min) / self.S

    def index_of(self, x):
        """Interval index of ``x``, or ``None`` outside the visiting interval."""
        if not (self.x_min <= x < self.x_max):
            return None
        eps = self.epsilon
        i = min(math.floor((x - self.x_min) / eps), self.S - 1)
        # interval i is [x_min + i*eps, x_min + (i+1)*eps) in floating point
        if i + 1 < self.S and x >= self.x_min + (i + 1) * eps:
            i += 1
        elif i > 0 and x < self.x_min + i * eps:
            i -= 1
        return i

    def kernel_args(self):
        return self.x_min, self.x_max, self.epsilon, np.array(self.association, dtype=np.int64)


def interval_of(partition, x):
    """Symbol associated with the interval containing ``x``, else beta."""
    i = partition.index_of(x)
    if i is None:
        return partition.beta_symbol
    return partition.association[i]
