"""One-dimensional chaotic maps on [0, 1] with optional orbit perturbation.

Three families are supported: the logistic map ``b*x*(1-x)``, the skew tent
map with apex ``p`` and general piecewise linear chaotic maps (PWLCM) whose
every branch maps its subinterval onto the whole of [0, 1].

Arithmetic contract (shared by encipher and decipher):

* logistic: ``b * (x * (1 - x))``
* increasing PWLCM branch on ``(lo, hi]``: ``(x - lo) / (hi - lo)``
* decreasing PWLCM branch on ``(lo, hi]``: ``(hi - x) / (hi - lo)``
* the first branch is closed on the left; a point equal to a breakpoint
  belongs to the branch on its left, so the skew tent apex ``x == p`` takes
  ``x / p``.

The skew tent is evaluated as the two-branch PWLCM ``[(p, 0), (1, 1)]`` and is
bit-identical to it.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from baptista import _kernels as K
from baptista import _prng
from baptista.errors import DomainError

LOGISTIC_B_MIN = 3.5699


class MapKind(enum.Enum):
    LOGISTIC = "logistic"
    SKEW_TENT = "skewtent"
    PWLCM = "pwlcm"


_KIND_CODE = {
    MapKind.LOGISTIC: K.KIND_LOGISTIC,
    MapKind.SKEW_TENT: K.KIND_SKEW_TENT,
    MapKind.PWLCM: K.KIND_PWLCM,
}


@dataclass(frozen=True)
class MapSpec:
    """A chaotic map on [0, 1].

    For PWLCM, ``breakpoints`` lists ``(right_end, anchor)`` per branch from
    left to right. ``anchor`` is the branch image at its left end: 0 for an
    increasing branch, 1 for a decreasing one. Any other anchor would not be
    onto and is rejected.
    """

    kind: MapKind
    b: float = 4.0
    p: float = 0.5
    breakpoints: tuple = ()

    def __post_init__(self):
        if self.kind is MapKind.LOGISTIC:
            if not (LOGISTIC_B_MIN < self.b <= 4.0):
                raise ValueError(f"logistic parameter b={self.b!r} outside (3.5699, 4]")
        elif self.kind is MapKind.SKEW_TENT:
            if not (0.0 < self.p < 1.0):
                raise ValueError(f"skew tent parameter p={self.p!r} outside (0, 1)")
        elif self.kind is MapKind.PWLCM:
            bps = tuple((float(e), int(a)) for e, a in self.breakpoints)
            object.__setattr__(self, "breakpoints", bps)
            if len(bps) < 2:
                raise ValueError("a PWLCM needs at least two branches")
            lo = 0.0
            for end, anchor in bps:
                if not end > lo:
                    raise ValueError("PWLCM breakpoints must be strictly increasing in (0, 1]")
                if anchor not in (0, 1):
                    raise ValueError(f"anchor {anchor!r} is not onto; use 0 or 1")
                lo = end
            if bps[-1][0] != 1.0:
                raise ValueError("the last PWLCM branch must end at 1.0")
        else:
            raise ValueError(f"unknown map kind {self.kind!r}")

    @classmethod
    def logistic(cls, b=4.0):
        return cls(MapKind.LOGISTIC, b=float(b))

    @classmethod
    def skew_tent(cls, p):
        return cls(MapKind.SKEW_TENT, p=float(p))

    @classmethod
    def pwlcm(cls, breakpoints):
        return cls(MapKind.PWLCM, breakpoints=tuple(breakpoints))

    @property
    def interval(self):
        return (0.0, 1.0)

    def branch_lengths(self):
        """Lengths of the linear branches (PWLCM and skew tent only)."""
        if self.kind is MapKind.SKEW_TENT:
            return [self.p, 1.0 - self.p]
        if self.kind is MapKind.PWLCM:
            lengths, lo = [], 0.0
            for end, _ in self.breakpoints:
                lengths.append(end - lo)
                lo = end
            return lengths
        raise ValueError("the logistic map is not piecewise linear")

    def kernel_args(self):
        if self.kind is MapKind.PWLCM:
            ends = np.array([e for e, _ in self.breakpoints], dtype=np.float64)
            anchors = np.array([a for _, a in self.breakpoints], dtype=np.int64)
        else:
            ends = np.empty(0, dtype=np.float64)
            anchors = np.empty(0, dtype=np.int64)
        param = self.b if self.kind is MapKind.LOGISTIC else self.p
        return _KIND_CODE[self.kind], float(param), ends, anchors

    def __call__(self, x):
        """Evaluate the map once, following the arithmetic contract."""
        if self.kind is MapKind.LOGISTIC:
            return self.b * (x * (1.0 - x))
        if self.kind is MapKind.SKEW_TENT:
            if x <= self.p:
                return x / self.p
            return (1.0 - x) / (1.0 - self.p)
        lo = 0.0
        last = len(self.breakpoints) - 1
        for i, (hi, anchor) in enumerate(self.breakpoints):
            if x <= hi or i == last:
                if anchor == 0:
                    return (x - lo) / (hi - lo)
                return (hi - x) / (hi - lo)
            lo = hi
        return x


@dataclass(frozen=True)
class PerturbConfig:
    """Periodic pseudo-random perturbation against dynamical degradation.

    Every ``delta`` iterations the next xorshift64* output ``r`` is drawn and
    ``(r mod 2**magnitude_bits) * 2**-52`` is added to the state, wrapping
    past 1.0 back into [0, 1].
    """

    enabled: bool = True
    delta: int = 16
    prng_seed: int = 0
    magnitude_bits: int = 8

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError("perturbation period delta must be >= 1")
        if not (0 <= self.magnitude_bits <= 52):
            raise ValueError("magnitude_bits must lie in [0, 52]")
        if not (0 <= self.prng_seed < 2**64):
            raise ValueError("prng_seed must be a 64-bit unsigned integer")

    @classmethod
    def off(cls):
        return cls(enabled=False)

    @property
    def max_displacement(self):
        return ((1 << self.magnitude_bits) - 1) * 2.0**-52

    def kernel_args(self):
        return (self.delta if self.enabled else 0), self.magnitude_bits


@dataclass(frozen=True)
class OrbitState:
    """Position on a perturbed orbit.

    ``prng_state`` carries the perturbation generator so that the state is a
    complete value: equal states evolve identically.
    """

    x: float
    total_iters: int = 0
    perturb_counter: int = 0
    prng_state: int = _prng.GOLDEN64

    @classmethod
    def start(cls, x0, perturb=None):
        perturb = perturb or PerturbConfig.off()
        return cls(
            x=float(x0),
            total_iters=0,
            perturb_counter=perturb.delta if perturb.enabled else 0,
            prng_state=_prng.seed_state(perturb.prng_seed),
        )

    def kernel_args(self):
        return self.x, self.perturb_counter, np.uint64(self.prng_state)

    def advanced(self, x, counter, prng, iters):
        return OrbitState(float(x), self.total_iters + int(iters), int(counter), int(prng))


def check_domain(x, mapspec):
    lo, hi = mapspec.interval
    if not (lo <= x <= hi):
        raise DomainError(f"state {x!r} outside defining interval [{lo}, {hi}]")


def iterate(state, mapspec, perturb):
    """Apply the map once, then perturb if the countdown expires."""
    check_domain(state.x, mapspec)
    x = mapspec(state.x)
    counter, prng = state.perturb_counter, state.prng_state
    if perturb.enabled:
        counter -= 1
        if counter == 0:
            prng, r = _prng.xorshift64star(prng)
            x = x + (r & ((1 << perturb.magnitude_bits) - 1)) * 2.0**-52
            if x > 1.0:
                x -= 1.0
            counter = perturb.delta
    return OrbitState(x, state.total_iters + 1, counter, prng)


def iterate_n(state, mapspec, perturb, n):
    """``n`` successive applications of :func:`iterate`, compiled."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    check_domain(state.x, mapspec)
    if n == 0:
        return state
    x, counter, prng = K.iterate_n(*state.kernel_args(), int(n), *mapspec.kernel_args(),
                                   *perturb.kernel_args())
    return state.advanced(x, counter, prng, n)


def orbit(mapspec, x0, n, perturb=None, *, state=None):
    """The next ``n`` iterates from ``x0`` (or from ``state``) as an array."""
    perturb = perturb or PerturbConfig.off()
    state = state or OrbitState.start(x0, perturb)
    check_domain(state.x, mapspec)
    out, *_ = K.orbit(*state.kernel_args(), int(n), *mapspec.kernel_args(),
                      *perturb.kernel_args())
    return out


def lyapunov_pwlcm(mapspec):
    """Closed-form Lyapunov exponent ``-sum(l * ln l)`` over branch lengths."""
    if mapspec.kind is MapKind.LOGISTIC:
        raise ValueError("closed-form Lyapunov exponent only for piecewise linear maps")
    return -math.fsum(l * math.log(l) for l in mapspec.branch_lengths())


def random_pwlcm(rng, m):
    """A random onto PWLCM with ``m`` branches (for property tests and demos)."""
    cuts = np.sort(rng.uniform(0.0, 1.0, m - 1))
    ends = [float(c) for c in cuts] + [1.0]
    anchors = rng.integers(0, 2, m)
    return MapSpec.pwlcm(zip(ends, (int(a) for a in anchors)))


__all__ = [
    "MapKind",
    "MapSpec",
    "PerturbConfig",
    "OrbitState",
    "iterate",
    "iterate_n",
    "orbit",
    "lyapunov_pwlcm",
    "random_pwlcm",
]
