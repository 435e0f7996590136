"""Baptista-type ciphers: original, masked and rectified.

Each plaintext symbol is encrypted by iterating the chaotic map from the
state left by the previous symbol until the state falls in the interval
associated with the symbol, at least ``n0`` iterations on. The iteration
count is the ciphertext.

``original``
    Transmits the count itself.
``masked``
    Transmits ``count XOR f_be(x)``. The receiver accepts the first count
    whose mask reproduces the token, which is sometimes an earlier, wrong
    count. Decryption errors then propagate to every later symbol. This
    variant is kept as an experimental subject; do not use it to protect data.
``rectified``
    Also counts, per symbol, how often each masked token value has occurred
    during the search and transmits ``(token, occurrence)``. The receiver
    accepts the occurrence-th match, which is always the right one.

Masked tokens are computed from the count reduced modulo ``2**n_bits``.
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from baptista import _kernels as K
from baptista import _prng
from baptista.chaos import OrbitState
from baptista.errors import (
    CorruptCiphertextError,
    CounterOverflowError,
    DesyncError,
    DomainError,
    SearchLimitError,
)

ORIGINAL_CAP_FACTOR = 64
SCAN_CAP_FACTOR = 4


class Variant(enum.Enum):
    ORIGINAL = "original"
    MASKED = "masked"
    RECTIFIED = "rectified"


_MODE = {
    Variant.ORIGINAL: K.MODE_ORIGINAL,
    Variant.MASKED: K.MODE_MASKED,
    Variant.RECTIFIED: K.MODE_RECTIFIED,
}


class CipherUnit(NamedTuple):
    """One ciphertext unit: token ``c`` and occurrence index ``b``.

    For the original cipher ``c`` is the raw iteration count (it may exceed
    ``nmax``; the codecs escape it). For the masked and rectified ciphers
    ``c`` is an ``n_bits`` masked token; ``b`` is only meaningful for the
    rectified cipher and is 1 elsewhere.
    """

    c: int
    b: int = 1


@dataclass
class Transcript:
    """Ciphertext or plaintext plus the orbit state after each symbol."""

    units: list
    symbols: np.ndarray
    states: np.ndarray
    final: OrbitState


def f_be(x, n_bits, interval=(0.0, 1.0)):
    """Keystream word of a chaotic state.

    ``x`` is scaled to [0, 1) over the defining interval, multiplied by
    2**32 and truncated; bits ``8 .. 8+n_bits-1`` (counted from the least
    significant bit) are returned.
    """
    if not 1 <= n_bits <= 24:
        raise ValueError("n_bits must lie in [1, 24]")
    lo, hi = interval
    u = (x - lo) / (hi - lo)
    w = int(u * 4294967296.0) & 0xFFFFFFFF
    return (w >> 8) & ((1 << n_bits) - 1)


def search_cap(key, variant):
    """Largest count an encryption may emit / a decryption may scan to."""
    factor = ORIGINAL_CAP_FACTOR if Variant(variant) is Variant.ORIGINAL else SCAN_CAP_FACTOR
    return factor * key.nmax


def kappa_seed_for(key):
    return _prng.derive_seed(key.assoc_seed, "kappa")


def _as_symbols(plaintext, S):
    if isinstance(plaintext, (bytes, bytearray, memoryview)):
        arr = np.frombuffer(bytes(plaintext), dtype=np.uint8).astype(np.int64)
    else:
        arr = np.asarray(plaintext, dtype=np.int64).reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() >= S):
        raise ValueError(f"plaintext symbols must lie in 0..{S - 1}")
    return arr


def _as_unit_arrays(units):
    cs = np.fromiter((u[0] for u in units), dtype=np.int64)
    bs = np.fromiter((u[1] if len(u) > 1 else 1 for u in units), dtype=np.int64, count=len(cs))
    return cs, bs


def encipher(variant, key, partition, plaintext, *, kappa_seed=None, state=None):
    """Encrypt and keep the emission states. See :class:`Transcript`."""
    variant = Variant(variant)
    symbols = _as_symbols(plaintext, partition.S)
    state = state or OrbitState.start(key.x0, key.perturb)
    kstate = _prng.seed_state(kappa_seed_for(key) if kappa_seed is None else kappa_seed)
    n = symbols.size
    out_c = np.empty(n, np.int64)
    out_b = np.empty(n, np.int64)
    out_x = np.empty(n, np.float64)
    cap = search_cap(key, variant)
    status, done, iters, x, counter, prng, _ = K.encrypt(
        _MODE[variant], symbols, *state.kernel_args(), *key.map.kernel_args(),
        *key.perturb.kernel_args(), *partition.kernel_args(),
        key.n0, cap, key.n_bits, key.mask_enabled, float(key.eta), np.uint64(kstate),
        out_c, out_b, out_x)
    if status == K.DOMAIN:
        raise DomainError(f"initial state {state.x!r} outside [0, 1]")
    if status == K.SEARCH_LIMIT:
        raise SearchLimitError(f"symbol {done}: no matching state within {cap} iterations")
    if status == K.COUNTER_OVERFLOW:
        raise CounterOverflowError(f"symbol {done}: occurrence counter exceeded 16 bits")
    units = [CipherUnit(int(c), int(b)) for c, b in zip(out_c, out_b)]
    return Transcript(units, symbols, out_x, state.advanced(x, counter, prng, iters))


def decipher(variant, key, partition, units, *, state=None):
    """Decrypt and keep the per-symbol states. See :class:`Transcript`."""
    variant = Variant(variant)
    cs, bs = _as_unit_arrays(units)
    state = state or OrbitState.start(key.x0, key.perturb)
    n = cs.size
    out_s = np.empty(n, np.int64)
    out_x = np.empty(n, np.float64)
    cap = search_cap(key, variant)
    status, done, iters, x, counter, prng = K.decrypt(
        _MODE[variant], cs, bs, *state.kernel_args(), *key.map.kernel_args(),
        *key.perturb.kernel_args(), *partition.kernel_args(),
        key.n0, cap, key.n_bits, key.mask_enabled, out_s, out_x)
    if status == K.DOMAIN:
        raise DomainError(f"initial state {state.x!r} outside [0, 1]")
    if status == K.DESYNC:
        raise DesyncError(f"unit {done}: no token match within {cap} iterations")
    if status == K.CORRUPT:
        raise CorruptCiphertextError(f"unit {done} cannot be decrypted under this key")
    if variant is Variant.MASKED and n and out_s.min() < 0:
        bad = int(np.argmax(out_s < 0))
        raise CorruptCiphertextError(f"unit {bad} decrypts to a state outside the visiting interval")
    return Transcript(list(units), out_s, out_x, state.advanced(x, counter, prng, iters))


def encrypt_original(key, partition, plaintext, *, kappa_seed=None):
    return encipher(Variant.ORIGINAL, key, partition, plaintext, kappa_seed=kappa_seed).units


def decrypt_original(key, partition, units):
    return decipher(Variant.ORIGINAL, key, partition, units).symbols


def encrypt_masked(key, partition, plaintext, *, kappa_seed=None):
    """Masked encryption. With ``key.mask_enabled`` false the mask is zero."""
    return encipher(Variant.MASKED, key, partition, plaintext, kappa_seed=kappa_seed).units


def decrypt_masked(key, partition, units):
    """First-match decryption; may silently return wrong symbols."""
    return decipher(Variant.MASKED, key, partition, units).symbols


def encrypt_rectified(key, partition, plaintext, *, kappa_seed=None):
    return encipher(Variant.RECTIFIED, key, partition, plaintext, kappa_seed=kappa_seed).units


def decrypt_rectified(key, partition, units):
    return decipher(Variant.RECTIFIED, key, partition, units).symbols
