"""Compiled inner loops.

Every map in this package is defined on [0, 1]. Kernels take the map as
``(kind, param, ends, anchors)`` and the perturbation as ``(pdelta, pbits)``
with ``pdelta == 0`` meaning disabled. Orbit state travels as the tuple
``(x, counter, prng)``; iteration totals are kept by the callers.

fastmath is never enabled: encipher and decipher must evaluate the maps with
identical IEEE-754 rounding or the receiver desynchronizes.
"""

import numpy as np
from numba import njit

KIND_LOGISTIC = 0
KIND_SKEW_TENT = 1
KIND_PWLCM = 2

MODE_ORIGINAL = 0
MODE_MASKED = 1
MODE_RECTIFIED = 2

OK = 0
DOMAIN = 1
SEARCH_LIMIT = 2
DESYNC = 3
CORRUPT = 4
COUNTER_OVERFLOW = 5

COUNTER_MAX = 0xFFFF

_U11 = np.uint64(11)
_U12 = np.uint64(12)
_U25 = np.uint64(25)
_U27 = np.uint64(27)
_U30 = np.uint64(30)
_U31 = np.uint64(31)
_XS_MULT = np.uint64(0x2545F4914F6CDD1D)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SM_MULT1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_MULT2 = np.uint64(0x94D049BB133111EB)
_ZERO = np.uint64(0)
_ONE = np.uint64(1)
_TWO_M52 = 2.0**-52
_TWO_M53 = 2.0**-53
_TWO_32 = 4294967296.0


@njit(cache=True, inline='always')
def splitmix64(z):
    z = z + _GOLDEN
    z = (z ^ (z >> _U30)) * _SM_MULT1
    z = (z ^ (z >> _U27)) * _SM_MULT2
    return z ^ (z >> _U31)


@njit(cache=True)
def seed_state(seed):
    s = splitmix64(seed)
    if s == _ZERO:
        return _GOLDEN
    return s


@njit(cache=True, inline='always')
def xorshift64star(s):
    s ^= s >> _U12
    s ^= s << _U25
    s ^= s >> _U27
    return s, s * _XS_MULT


@njit(cache=True, inline='always')
def uniform01(r):
    return float(r >> _U11) * _TWO_M53


@njit(cache=True, inline='always')
def map_step(x, kind, param, ends, anchors):
    if kind == KIND_LOGISTIC:
        return param * (x * (1.0 - x))
    if kind == KIND_SKEW_TENT:
        if x <= param:
            return x / param
        return (1.0 - x) / (1.0 - param)
    lo = 0.0
    last = ends.size - 1
    for i in range(ends.size):
        hi = ends[i]
        if x <= hi or i == last:
            if anchors[i] == 0:
                return (x - lo) / (hi - lo)
            return (hi - x) / (hi - lo)
        lo = hi
    return x


@njit(cache=True, inline='always')
def advance(x, counter, prng, kind, param, ends, anchors, pdelta, pbits):
    x = map_step(x, kind, param, ends, anchors)
    if pdelta > 0:
        counter -= 1
        if counter == 0:
            prng, r = xorshift64star(prng)
            d = float(r & np.uint64((1 << pbits) - 1)) * _TWO_M52
            x = x + d
            if x > 1.0:
                x -= 1.0
            counter = pdelta
    return x, counter, prng


@njit(cache=True, inline='always')
def symbol_of(x, xmin, xmax, eps, assoc):
    if x >= xmin and x < xmax:
        i = int(np.floor((x - xmin) / eps))
        if i >= assoc.size:
            i = assoc.size - 1
        # boundaries are the floats xmin + i*eps; the quotient can be off by one
        if i + 1 < assoc.size and x >= xmin + (i + 1) * eps:
            i += 1
        elif i > 0 and x < xmin + i * eps:
            i -= 1
        return assoc[i]
    return -1


@njit(cache=True, inline='always')
def fbe(x, nmask):
    w = np.int64(x * _TWO_32) & 0xFFFFFFFF
    return (w >> 8) & nmask


@njit(cache=True)
def iterate_n(x, counter, prng, n, kind, param, ends, anchors, pdelta, pbits):
    for _ in range(n):
        x, counter, prng = advance(x, counter, prng, kind, param, ends, anchors, pdelta, pbits)
    return x, counter, prng


@njit(cache=True)
def orbit(x, counter, prng, n, kind, param, ends, anchors, pdelta, pbits):
    out = np.empty(n, np.float64)
    for i in range(n):
        x, counter, prng = advance(x, counter, prng, kind, param, ends, anchors, pdelta, pbits)
        out[i] = x
    return out, x, counter, prng


@njit(cache=True)
def fbe_orbit(x, counter, prng, n, nbits, kind, param, ends, anchors, pdelta, pbits):
    nmask = (1 << nbits) - 1
    out = np.empty(n, np.int64)
    for i in range(n):
        x, counter, prng = advance(x, counter, prng, kind, param, ends, anchors, pdelta, pbits)
        out[i] = fbe(x, nmask)
    return out


@njit(cache=True)
def encrypt(mode, symbols, x, counter, prng,
            kind, param, ends, anchors, pdelta, pbits,
            xmin, xmax, eps, assoc,
            n0, cap, nbits, mask_on, eta, kstate,
            out_c, out_b, out_x):
    """Encrypt ``symbols``; returns (status, n_done, iters, x, counter, prng, kstate)."""
    nmask = (1 << nbits) - 1
    if mode == MODE_RECTIFIED:
        table = np.zeros(nmask + 1, np.int32)
        touched = np.empty(cap + 1, np.int64)
    else:
        table = np.zeros(1, np.int32)
        touched = np.empty(1, np.int64)
    iters = 0
    if not (x >= 0.0 and x <= 1.0):
        return DOMAIN, 0, iters, x, counter, prng, kstate
    for i in range(symbols.size):
        m = symbols[i]
        ntouched = 0
        k = 0
        tok = 0
        while True:
            x, counter, prng = advance(x, counter, prng, kind, param, ends, anchors, pdelta, pbits)
            k += 1
            if k < n0:
                continue
            if k > cap:
                return SEARCH_LIMIT, i, iters + k, x, counter, prng, kstate
            if mode == MODE_RECTIFIED:
                tok = k & nmask
                if mask_on:
                    tok ^= fbe(x, nmask)
                if table[tok] == 0:
                    touched[ntouched] = tok
                    ntouched += 1
                elif table[tok] == COUNTER_MAX:
                    return COUNTER_OVERFLOW, i, iters + k, x, counter, prng, kstate
                table[tok] += 1
            if symbol_of(x, xmin, xmax, eps, assoc) == m:
                if eta > 0.0:
                    kstate, r = xorshift64star(kstate)
                    if uniform01(r) < eta:
                        continue
                break
        iters += k
        if mode == MODE_ORIGINAL:
            out_c[i] = k
            out_b[i] = 1
        elif mode == MODE_MASKED:
            tok = k & nmask
            if mask_on:
                tok ^= fbe(x, nmask)
            out_c[i] = tok
            out_b[i] = 1
        else:
            out_c[i] = tok
            out_b[i] = table[tok]
            for j in range(ntouched):
                table[touched[j]] = 0
        out_x[i] = x
    return OK, symbols.size, iters, x, counter, prng, kstate


@njit(cache=True)
def decrypt(mode, cs, bs, x, counter, prng,
            kind, param, ends, anchors, pdelta, pbits,
            xmin, xmax, eps, assoc,
            n0, cap, nbits, mask_on,
            out_sym, out_x):
    """Decrypt units; returns (status, n_done, iters, x, counter, prng).

    A beta state reached by a (necessarily false) masked match is reported
    as symbol -1 and decryption continues, as a real receiver would.
    """
    nmask = (1 << nbits) - 1
    iters = 0
    if not (x >= 0.0 and x <= 1.0):
        return DOMAIN, 0, iters, x, counter, prng
    for i in range(cs.size):
        c = cs[i]
        if mode == MODE_ORIGINAL:
            if c < n0:
                return CORRUPT, i, iters, x, counter, prng
            x, counter, prng = iterate_n(x, counter, prng, c, kind, param, ends, anchors, pdelta, pbits)
            k = c
            s = symbol_of(x, xmin, xmax, eps, assoc)
            if s < 0:
                return CORRUPT, i, iters + k, x, counter, prng
        else:
            need = 1
            if mode == MODE_RECTIFIED:
                need = bs[i]
                if need < 1:
                    return CORRUPT, i, iters, x, counter, prng
            hits = 0
            k = 0
            while True:
                x, counter, prng = advance(x, counter, prng, kind, param, ends, anchors, pdelta, pbits)
                k += 1
                if k < n0:
                    continue
                if k > cap:
                    if mode == MODE_MASKED:
                        return DESYNC, i, iters + k, x, counter, prng
                    return CORRUPT, i, iters + k, x, counter, prng
                tok = k & nmask
                if mask_on:
                    tok ^= fbe(x, nmask)
                if tok == c:
                    hits += 1
                    if hits == need:
                        break
            s = symbol_of(x, xmin, xmax, eps, assoc)
            if s < 0 and mode == MODE_RECTIFIED:
                return CORRUPT, i, iters + k, x, counter, prng
        iters += k
        out_sym[i] = s
        out_x[i] = x
    return OK, cs.size, iters, x, counter, prng


@njit(cache=True)
def _trial_start(master, t, pdelta):
    seed = splitmix64(master ^ splitmix64(np.uint64(t)))
    u = 0.0
    j = np.uint64(0)
    while u == 0.0:
        u = uniform01(splitmix64(seed + j))
        j += _ONE
    prng = seed_state(splitmix64(seed ^ _XS_MULT))
    return u, pdelta, prng, splitmix64(seed + _GOLDEN + _GOLDEN)


@njit(cache=True)
def sample_counts(trials, master, kind, param, ends, anchors, pdelta, pbits,
                  xmin, xmax, eps, assoc, n0, cap):
    """Counts of single-symbol original encryptions from independent starts."""
    counts = np.full(trials, -1, np.int64)
    syms = np.empty(1, np.int64)
    oc = np.empty(1, np.int64)
    ob = np.empty(1, np.int64)
    ox = np.empty(1, np.float64)
    S = assoc.size
    for t in range(trials):
        x, counter, prng, sseed = _trial_start(master, t, pdelta)
        syms[0] = np.int64(sseed % np.uint64(S))
        status, _, _, _, _, _, _ = encrypt(
            MODE_ORIGINAL, syms, x, counter, prng, kind, param, ends, anchors,
            pdelta, pbits, xmin, xmax, eps, assoc, n0, cap, 16, False, 0.0, _ONE,
            oc, ob, ox)
        if status == OK:
            counts[t] = oc[0]
    return counts


@njit(cache=True)
def sample_tokens(trials, master, kind, param, ends, anchors, pdelta, pbits,
                  xmin, xmax, eps, assoc, n0, cap, nbits):
    """(unmasked count, masked token) pairs from independent single-symbol runs."""
    counts = np.full(trials, -1, np.int64)
    tokens = np.full(trials, -1, np.int64)
    syms = np.empty(1, np.int64)
    oc = np.empty(1, np.int64)
    ob = np.empty(1, np.int64)
    ox = np.empty(1, np.float64)
    nmask = (1 << nbits) - 1
    S = assoc.size
    for t in range(trials):
        x, counter, prng, sseed = _trial_start(master, t, pdelta)
        syms[0] = np.int64(sseed % np.uint64(S))
        status, _, _, xe, _, _, _ = encrypt(
            MODE_ORIGINAL, syms, x, counter, prng, kind, param, ends, anchors,
            pdelta, pbits, xmin, xmax, eps, assoc, n0, cap, nbits, False, 0.0, _ONE,
            oc, ob, ox)
        if status == OK:
            counts[t] = oc[0]
            tokens[t] = (oc[0] & nmask) ^ fbe(xe, nmask)
    return counts, tokens


@njit(cache=True)
def error_trials(mode, trials, length, master, kind, param, ends, anchors, pdelta, pbits,
                 xmin, xmax, eps, assoc, n0, cap, nbits, mask_on):
    """Encrypt/decrypt random messages; per-trial, per-position correctness.

    Returns (correct[trials, length] as uint8, multi[trials, length] as uint8
    flagging emitted occurrence index > 1, status per trial).
    """
    correct = np.zeros((trials, length), np.uint8)
    multi = np.zeros((trials, length), np.uint8)
    status = np.zeros(trials, np.int64)
    syms = np.empty(length, np.int64)
    oc = np.empty(length, np.int64)
    ob = np.empty(length, np.int64)
    ox = np.empty(length, np.float64)
    dsym = np.empty(length, np.int64)
    dx = np.empty(length, np.float64)
    S = assoc.size
    for t in range(trials):
        x, counter, prng, sseed = _trial_start(master, t, pdelta)
        s = sseed
        for j in range(length):
            s = splitmix64(s)
            syms[j] = np.int64(s % np.uint64(S))
        est, _, _, _, _, _, _ = encrypt(
            mode, syms, x, counter, prng, kind, param, ends, anchors, pdelta, pbits,
            xmin, xmax, eps, assoc, n0, cap, nbits, mask_on, 0.0, _ONE, oc, ob, ox)
        if est != OK:
            status[t] = est
            continue
        for j in range(length):
            if ob[j] > 1:
                multi[t, j] = 1
        dst, done, _, _, _, _ = decrypt(
            mode, oc, ob, x, counter, prng, kind, param, ends, anchors, pdelta, pbits,
            xmin, xmax, eps, assoc, n0, cap, nbits, mask_on, dsym, dx)
        status[t] = dst
        for j in range(done):
            if dsym[j] == syms[j]:
                correct[t, j] = 1
    return correct, multi, status
