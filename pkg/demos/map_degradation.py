"""
Chaotic maps in floating point
==============================

The symmetric tent map halves the mantissa every step, so any double
reaches 0 after a few dozen iterations. A tiny periodic perturbation keeps
the orbit alive. The logistic map stays chaotic but its density is not
uniform, which is what the partition would need.
"""

import math

import numpy as np

from baptista import MapSpec, PerturbConfig, lyapunov_pwlcm, orbit
from baptista.chaos import random_pwlcm
from baptista import analysis as A

tent = MapSpec.skew_tent(0.5)
bare = orbit(tent, 0.1234567, 80)
print(f"symmetric tent, no perturbation: stuck at 0 from step {np.flatnonzero(bare == 0.0)[0] + 1}")

for label, pert in [("off", PerturbConfig.off()),
                    ("every 16 steps, 8 bits", PerturbConfig(True, 16, 1, 8)),
                    ("every step, 16 bits", PerturbConfig(True, 1, 1, 16))]:
    xs = orbit(tent, 0.1234567, 10**6, pert)
    z = A.occupancy_test(xs).values["max_abs_z"]
    print(f"  perturbation {label:<24} max bin |z| = {z:9.1f}")

# a skew apex avoids the dyadic trap on its own
for p in (0.37, 0.4999):
    xs = orbit(MapSpec.skew_tent(p), 0.1234567, 10**6, PerturbConfig(True, 16, 1, 8))
    tau = A.autocorrelation(xs, 3)
    print(f"\nskew tent p={p}: max |z| {A.occupancy_test(xs).values['max_abs_z']:.2f}, "
          f"tau = {np.round(tau, 4)}, expected {[round((2 * p - 1) ** k, 4) for k in (1, 2, 3)]}")

xs = orbit(MapSpec.logistic(4.0), 0.1234567, 10**6, PerturbConfig(True, 16, 1, 8))
print(f"\nlogistic b=4: max |z| {A.occupancy_test(xs).values['max_abs_z']:.1f} (arcsine density)")

print(f"\nLyapunov exponent of the symmetric tent: {lyapunov_pwlcm(tent)!r} (ln 2 = {math.log(2)!r})")
rng = np.random.default_rng(6)
for m in (2, 4, 8):
    spec = random_pwlcm(rng, m)
    print(f"random {m}-branch PWLCM: {lyapunov_pwlcm(spec):.4f} <= ln {m} = {math.log(m):.4f}")
