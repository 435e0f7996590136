"""
Why the masked cipher loses characters
======================================

The masked cipher sends ``count XOR f_be(x)``. The receiver walks the orbit
and stops at the first count whose mask reproduces the token, which is
sometimes an earlier, wrong count. After one wrong character the receiver's
orbit is out of step and nearly everything after it is garbage.
"""

import numpy as np

from baptista import Partition, generate_key
from baptista import analysis as A
from baptista.ciphers import Variant

key = generate_key(7)
part = Partition.for_key(key)

# closed form with the textbook hit probability 1/256
pc1 = A.pc_first(256, 16, 250, 65532)
print(f"P(first character correct) = {pc1!r}")
print(f"one error every {1 / (1 - pc1):.1f} characters on average")
print(f"worse than guessing from character {A.random_guess_position(pc1, 256)} on")

# the tent map's intervals are hit slightly less often than 1/256
p = A.hit_probability(key, part, 100_000, seed=1)
print(f"\nmeasured hit probability x 256 = {p * 256:.4f}")

rep = A.masked_error_rate(key, part, 10_000, 40, seed=2, p=p)
print()
print(rep.table())

# the rectified receiver counts occurrences and never slips
rect = A.masked_error_rate(key, part, 10_000, 40, seed=2, variant=Variant.RECTIFIED, p=p)
print(f"\nrectified cipher errors over the same run: {rect.values['total_errors']}")

# coarse text plot of the decay
print()
for i in (1, 10, 20, 30, 40):
    bar = "#" * int(round(60 * rep.correct_rates[i - 1]))
    print(f"{i:>3} {bar} {rep.correct_rates[i - 1]:.3f}")
