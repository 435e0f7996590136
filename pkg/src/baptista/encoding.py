"""Ciphertext serialization.

Layout of a ciphertext file::

    header   14 bytes  b"BTC1" | scheme u8 | n_bits u8 | S u16 | 6 zero bytes
    payload            scheme specific, see below

All multi-byte integers are big-endian. Token payloads are ``n_bits`` wide,
packed MSB-first, zero padded to a byte boundary. Because ``n_bits >= 8`` the
padding can never hold a whole token.

``ORIGINAL_FIXED`` (raw counts)
    ``n0 <= C < nmax``  -> ``C``
    ``C == nmax``       -> ``nmax, 0``
    ``C > nmax``        -> ``nmax, q, r`` with ``C = nmax*q + r``, ``0 <= r < nmax``
``MASKED_FIXED``
    one token per unit.
``RECTIFIED_VARLEN`` (token ``c``, occurrence ``b``)
    ``b == 1, c != nmax`` -> ``c``
    ``b == 1, c == nmax`` -> ``nmax, 0``
    ``b > 1``             -> ``nmax, b, c``
``RECTIFIED_COMPRESSED``
    ``count u32 | base u32 | k u8`` then, per unit, the Rice code of
    ``c - base`` with parameter ``2**k`` followed by ``b - 1`` in unary.
    Unary codes are ones terminated by a zero.
"""

import enum
import math
import struct
from dataclasses import dataclass

import numpy as np

from baptista.ciphers import CipherUnit
from baptista.errors import FramingError

MAGIC = b"BTC1"
_HEADER = struct.Struct(">4sBBH6x")
HEADER_SIZE = _HEADER.size
_PREAMBLE = struct.Struct(">IIB")
_MAX_QUOTIENT = 1 << 24


class Scheme(enum.IntEnum):
    ORIGINAL_FIXED = 1
    MASKED_FIXED = 2
    RECTIFIED_VARLEN = 3
    RECTIFIED_COMPRESSED = 4


@dataclass(frozen=True)
class TokenStreamHeader:
    scheme: Scheme
    n_bits: int
    s: int
    magic: bytes = MAGIC

    def pack(self):
        if not 0 < self.s < 1 << 16:
            raise ValueError("alphabet size must fit in 16 bits")
        return _HEADER.pack(self.magic, int(self.scheme), self.n_bits, self.s)

    @classmethod
    def unpack(cls, data):
        if len(data) < HEADER_SIZE:
            raise FramingError("ciphertext shorter than its header")
        magic, scheme, n_bits, s = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise FramingError(f"bad magic {magic!r}")
        if any(data[8:HEADER_SIZE]):
            raise FramingError("reserved header bytes are not zero")
        try:
            scheme = Scheme(scheme)
        except ValueError:
            raise FramingError(f"unknown scheme byte {scheme}") from None
        return cls(scheme, n_bits, s, magic)


def pack_tokens(tokens, n_bits):
    """Pack unsigned ``n_bits``-wide tokens MSB-first into bytes."""
    arr = np.asarray(tokens, dtype=np.int64).reshape(-1)
    if arr.size == 0:
        return b""
    if arr.min() < 0 or arr.max() >= 1 << n_bits:
        raise ValueError(f"token does not fit in {n_bits} bits")
    shifts = np.arange(n_bits - 1, -1, -1, dtype=np.int64)
    bits = ((arr[:, None] >> shifts) & 1).astype(np.uint8).ravel()
    return np.packbits(bits).tobytes()


def unpack_tokens(data, n_bits):
    """Inverse of :func:`pack_tokens`; padding must be zero and < 8 bits."""
    bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
    n = bits.size // n_bits
    tail = bits[n * n_bits:]
    if tail.size >= 8 or tail.any():
        raise FramingError("invalid padding after the last token")
    weights = 1 << np.arange(n_bits - 1, -1, -1, dtype=np.int64)
    return (bits[: n * n_bits].reshape(n, n_bits).astype(np.int64) @ weights).tolist()


def encode_overflow(total_count, key):
    """Escape tuple for a count of at least ``nmax``."""
    nmax = key.nmax
    if total_count < nmax:
        raise ValueError("overflow encoding needs a count >= nmax")
    if total_count == nmax:
        return [nmax, 0]
    q, r = divmod(total_count, nmax)
    if q >= 1 << key.n_bits:
        raise ValueError(f"count {total_count} too large for {key.n_bits}-bit tuples")
    return [nmax, q, r]


def _take(tokens, i, what):
    if i >= len(tokens):
        raise FramingError(f"stream ends inside an escape sequence ({what} missing)")
    return tokens[i]


def encode_original(units, key):
    tokens = []
    for c, *_ in units:
        if c < key.n0:
            raise ValueError(f"count {c} below n0={key.n0}")
        tokens.extend([c] if c < key.nmax else encode_overflow(c, key))
    return pack_tokens(tokens, key.n_bits)


def decode_original(data, key):
    tokens = unpack_tokens(data, key.n_bits)
    nmax, units, i = key.nmax, [], 0
    while i < len(tokens):
        t = tokens[i]
        if t < key.n0:
            raise FramingError(f"token {i}: bare count {t} below n0")
        if t > nmax:
            raise FramingError(f"token {i}: bare count {t} above nmax")
        if t < nmax:
            units.append(CipherUnit(t))
            i += 1
            continue
        q = _take(tokens, i + 1, "multiplier")
        if q == 0:
            units.append(CipherUnit(nmax))
            i += 2
            continue
        r = _take(tokens, i + 2, "remainder")
        if r >= nmax or (q == 1 and r == 0):
            raise FramingError(f"token {i}: non-canonical overflow tuple")
        units.append(CipherUnit(nmax * q + r))
        i += 3
    return units


def encode_masked(units, key):
    return pack_tokens([u[0] for u in units], key.n_bits)


def decode_masked(data, key):
    return [CipherUnit(t) for t in unpack_tokens(data, key.n_bits)]


def encode_varlen(units, key):
    """Variable-length token stream for rectified units."""
    nmax, tokens = key.nmax, []
    for c, b in units:
        if b < 1:
            raise ValueError(f"invalid occurrence index {b}")
        if b > 1:
            tokens += [nmax, b, c]
        elif c == nmax:
            tokens += [nmax, 0]
        else:
            tokens.append(c)
    return pack_tokens(tokens, key.n_bits)


def decode_varlen(data, key):
    """Inverse of :func:`encode_varlen`.

    With the mask disabled tokens are raw counts, so a bare token below
    ``n0`` is rejected.
    """
    tokens = unpack_tokens(data, key.n_bits)
    nmax, units, i = key.nmax, [], 0
    while i < len(tokens):
        t = tokens[i]
        if t != nmax:
            if not key.mask_enabled and t < key.n0:
                raise FramingError(f"token {i}: bare count {t} below n0")
            units.append(CipherUnit(t, 1))
            i += 1
            continue
        b = _take(tokens, i + 1, "occurrence index")
        if b == 0:
            units.append(CipherUnit(nmax, 1))
            i += 2
        elif b == 1:
            raise FramingError(f"token {i}: escaped occurrence index 1 is not canonical")
        else:
            units.append(CipherUnit(_take(tokens, i + 2, "token"), b))
            i += 3
    return units


class _BitWriter:
    def __init__(self):
        self.out = bytearray()
        self.acc = 0
        self.nacc = 0

    def write(self, value, nbits):
        self.acc = (self.acc << nbits) | value
        self.nacc += nbits
        if self.nacc >= 64:
            nbytes = self.nacc // 8
            rest = self.nacc - 8 * nbytes
            self.out += (self.acc >> rest).to_bytes(nbytes, "big")
            self.acc &= (1 << rest) - 1
            self.nacc = rest

    def unary(self, q):
        self.write(((1 << q) - 1) << 1, q + 1)

    def getvalue(self):
        pad = -self.nacc % 8
        tail = (self.acc << pad).to_bytes((self.nacc + pad) // 8, "big")
        return bytes(self.out) + tail


def rice_parameter(mean_excess):
    """Rice exponent ``k`` whose ``2**k`` is the power of two nearest the mean."""
    m = round(mean_excess)
    if m < 1:
        return 0
    return min(31, round(math.log2(m)))


def rice_code_lengths(values, k):
    """Bit length of each value's Rice code with parameter ``2**k``."""
    v = np.asarray(values, dtype=np.int64)
    return (v >> k) + 1 + k


def compress_geometric(units, key=None, *, k=None):
    """Golomb-Rice coding of tokens plus unary occurrence indices.

    The coded value is ``c - base`` where ``base`` is ``key.n0`` when every
    token is at least ``n0`` (raw counts) and 0 otherwise.
    """
    cs = [int(u[0]) for u in units]
    bs = [int(u[1]) if len(u) > 1 else 1 for u in units]
    n0 = key.n0 if key is not None else 0
    base = n0 if cs and min(cs) >= n0 else 0
    if k is None:
        k = rice_parameter(sum(cs) / len(cs) - base) if cs else 0
    w = _BitWriter()
    low = (1 << k) - 1
    for c, b in zip(cs, bs):
        if c < 0 or b < 1:
            raise ValueError(f"invalid unit ({c}, {b})")
        v = c - base
        w.unary(v >> k)
        if k:
            w.write(v & low, k)
        w.unary(b - 1)
    return _PREAMBLE.pack(len(cs), base, k) + w.getvalue()


def decompress_geometric(data, key=None):
    data = bytes(data)
    if len(data) < _PREAMBLE.size:
        raise FramingError("compressed stream shorter than its preamble")
    count, base, k = _PREAMBLE.unpack_from(data)
    if k > 31:
        raise FramingError(f"invalid Rice parameter {k}")
    raw = np.frombuffer(data, dtype=np.uint8, offset=_PREAMBLE.size)
    bits = (np.unpackbits(raw) + 48).tobytes().decode("ascii")
    pos, units = 0, []

    def unary(pos):
        end = bits.find("0", pos)
        if end < 0:
            raise FramingError("compressed stream truncated inside a unary code")
        if end - pos > _MAX_QUOTIENT:
            raise FramingError("implausibly long unary code")
        return end - pos, end + 1

    for _ in range(count):
        q, pos = unary(pos)
        if k:
            if pos + k > len(bits):
                raise FramingError("compressed stream truncated inside a remainder")
            r = int(bits[pos:pos + k], 2)
            pos += k
        else:
            r = 0
        extra, pos = unary(pos)
        units.append(CipherUnit(base + (q << k) + r, extra + 1))
    rest = len(bits) - pos
    if rest >= 8 or "1" in bits[pos:]:
        raise FramingError("trailing data after the last compressed unit")
    return units


_ENCODERS = {
    Scheme.ORIGINAL_FIXED: encode_original,
    Scheme.MASKED_FIXED: encode_masked,
    Scheme.RECTIFIED_VARLEN: encode_varlen,
    Scheme.RECTIFIED_COMPRESSED: compress_geometric,
}
_DECODERS = {
    Scheme.ORIGINAL_FIXED: decode_original,
    Scheme.MASKED_FIXED: decode_masked,
    Scheme.RECTIFIED_VARLEN: decode_varlen,
    Scheme.RECTIFIED_COMPRESSED: decompress_geometric,
}


def write_ciphertext(units, key, scheme, S=256):
    scheme = Scheme(scheme)
    header = TokenStreamHeader(scheme, key.n_bits, S)
    return header.pack() + _ENCODERS[scheme](units, key)


def read_ciphertext(data, key):
    """Parse a ciphertext file; returns ``(header, units)``."""
    header = TokenStreamHeader.unpack(data)
    if header.n_bits != key.n_bits:
        raise FramingError(f"stream uses {header.n_bits}-bit tokens, key says {key.n_bits}")
    return header, _DECODERS[header.scheme](data[HEADER_SIZE:], key)
