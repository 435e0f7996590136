"""Small integer generators shared by the Python and compiled code paths.

Both generators are specified bit-exactly so that the pure-Python reference
in :mod:`baptista.chaos` and the numba kernels produce identical streams.
"""

import hashlib

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN64 = 0x9E3779B97F4A7C15
XORSHIFT_MULT = 0x2545F4914F6CDD1D


def splitmix64(z):
    """One SplitMix64 output for input ``z`` (stateless mixer)."""
    z = (z + GOLDEN64) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def seed_state(seed):
    """Initial xorshift64* state for a 64-bit seed. Never zero."""
    s = splitmix64(seed & MASK64)
    return s if s else GOLDEN64


def xorshift64star(state):
    """Advance a xorshift64* state; returns ``(new_state, output)``."""
    state ^= state >> 12
    state ^= (state << 25) & MASK64
    state ^= state >> 27
    return state, (state * XORSHIFT_MULT) & MASK64


def uniform01(output):
    """Map a 64-bit output to a double in [0, 1) using its top 53 bits."""
    return (output >> 11) * 2.0**-53


def derive_seed(master, label, bits=64):
    """Domain-separated child seed of ``master`` for the purpose ``label``."""
    h = hashlib.blake2b(digest_size=bits // 8, person=b"baptista-seed")
    h.update(int(master).to_bytes(32, "big", signed=False))
    h.update(label.encode())
    return int.from_bytes(h.digest(), "big")


def trial_seed(master, index):
    """Per-trial seed for Monte Carlo runs: counter-based, order independent."""
    return splitmix64((master ^ splitmix64(index)) & MASK64)
