"""
Iteration counts are geometric, so they compress
================================================

Counts of the original cipher follow ``p (1-p)**(C - n0)``. Their entropy is
far below the 16 bits a fixed-width token spends, and a Rice code gets close
to it. Masked tokens, on the other hand, are uniform and do not compress.
"""

import numpy as np

from baptista import CipherUnit, Partition, generate_key
from baptista import analysis as A
from baptista.encoding import compress_geometric, encode_varlen
from baptista.ciphers import encrypt_rectified

key = generate_key(7)
part = Partition.for_key(key)

counts = A.sample_counts(key, part, 100_000, seed=3)
rep = A.count_distribution_test(counts, 256, key.n0)
print(rep.table())

H = A.geometric_entropy_bits(rep.values["p_hat"])
data = compress_geometric([CipherUnit(int(c)) for c in counts], key)
bits = (len(data) - 9) * 8 / counts.size - 1  # minus one bit of occurrence code
print(f"\nentropy of the count law    {H:.3f} bits")
print(f"Rice code (k = {data[8]})           {bits:.3f} bits")
print(f"fixed-width token           {key.n_bits} bits")

# rectified ciphertext: variable-length stream vs compressed
msg = np.random.default_rng(4).integers(0, 256, 50_000)
units = encrypt_rectified(key, part, msg)
multi = np.mean([u.b > 1 for u in units])
print(f"\nrectified units with b > 1: {multi:.4%}")
print(f"varlen stream:     {len(encode_varlen(units, key)) * 8 / len(units):.3f} bits/char")
print(f"compressed stream: {len(compress_geometric(units, key)) * 8 / len(units):.3f} bits/char"
      "  (masked tokens are uniform)")

mask = A.mask_uniformity_test(key, part, 100_000, seed=5)
print(f"\nmasked token chi-square p = {mask.chi_square.p_value:.3f}, "
      f"raw count p = {mask.values['unmasked_p_value']:.3g}")
