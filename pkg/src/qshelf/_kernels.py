"""Hot inner loops, compiled with numba when available.

Every kernel exists in two flavours: a loop body that numba compiles, and a
pure-numpy (or pure-Python) fallback with identical results.  The flavour used
by the library is chosen once at import time:

    QSHELF_NUMBA=0   force the fallback path
    QSHELF_NUMBA=1   (default) use numba if it imports

All kernels work on int64 arrays only.  Callers are responsible for checking
magnitude bounds first (see ``SAFE_LIMIT``); anything that might overflow is
routed to the object-dtype path in :mod:`qshelf.series` instead.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

# Largest magnitude we let an int64 kernel produce.
SAFE_LIMIT = 2**62

USE_NUMBA = numba is not None and os.environ.get("QSHELF_NUMBA", "1") != "0"


def _njit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# truncated Cauchy product


def convolve_trunc_loop(a, b, length):
    out = np.zeros(length, dtype=np.int64)
    na = a.shape[0]
    nb = b.shape[0]
    for s in range(min(na, length)):
        x = a[s]
        if x == 0:
            continue
        top = min(nb, length - s)
        for t in range(top):
            out[s + t] += x * b[t]
    return out


def convolve_trunc_numpy(a, b, length):
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros(length, dtype=np.int64)
    full = np.convolve(a[:length], b[:length])
    out = np.zeros(length, dtype=np.int64)
    m = min(length, full.shape[0])
    out[:m] = full[:m]
    return out


# ---------------------------------------------------------------------------
# division by a unit power series (leading coefficient +-1)


def unit_divide_loop(a, b, length, limit):
    """Return (ok, c) with b*c = a to ``length`` terms.

    ``ok`` is False when an intermediate value could leave int64 range; the
    caller then repeats the division with Python integers.
    """
    out = np.zeros(length, dtype=np.int64)
    b0 = b[0]
    nb = b.shape[0]
    na = a.shape[0]
    sumb = 0
    for s in range(1, nb):
        sumb += abs(b[s])
    maxc = 0
    for t in range(length):
        if maxc > 0 and sumb > 0 and maxc > limit // sumb:
            return False, out
        acc = a[t] if t < na else 0
        top = min(t, nb - 1)
        for s in range(1, top + 1):
            acc -= b[s] * out[t - s]
        if acc > limit or acc < -limit:
            return False, out
        v = acc * b0
        out[t] = v
        if abs(v) > maxc:
            maxc = abs(v)
    return True, out


def unit_divide_numpy(a, b, length, limit):
    out = np.zeros(length, dtype=np.int64)
    b0 = int(b[0])
    nb = b.shape[0]
    sumb = int(np.abs(b[1:]).sum()) if nb > 1 else 0
    maxc = 0
    for t in range(length):
        if maxc and sumb and maxc > limit // sumb:
            return False, out
        acc = int(a[t]) if t < a.shape[0] else 0
        top = min(t, nb - 1)
        if top:
            acc -= int(np.dot(b[1:top + 1], out[t - top:t][::-1]))
        if abs(acc) > limit:
            return False, out
        out[t] = acc * b0
        maxc = max(maxc, abs(acc))
    return True, out


# ---------------------------------------------------------------------------
# restricted-partition search
#
# Counts partitions of every n <= n_max whose parts lie in [lo, hi] and satisfy
#   gap:     parts[t] - parts[t+k-1] >= 2 wherever the window fits
#   parity:  parts[t] - parts[t+k-2] <= 1 only if the window sum has the
#            given parity (k-1 consecutive parts)
#   lo mult: at most lo_max parts equal lo
#   hi mult: the number of parts equal hi is a member of hi_mask (bitmask);
#            hi_mask < 0 disables the clause
# Parts are placed largest first, so every window is checked the moment its
# last part is placed and a violating prefix is abandoned.


def count_restricted_loop(n_max, k, lo, hi, lo_max, hi_mask, parity, out):
    depth_cap = n_max // lo + 2
    parts = np.zeros(depth_cap, dtype=np.int64)
    nxt = np.zeros(depth_cap, dtype=np.int64)
    cnt_lo = np.zeros(depth_cap, dtype=np.int64)
    cnt_hi = np.zeros(depth_cap, dtype=np.int64)
    if hi_mask < 0 or (hi_mask & 1):
        out[0] += 1
    total = 0
    depth = 0
    nxt[0] = min(hi, n_max)
    while depth >= 0:
        p = nxt[depth]
        if p < lo:
            depth -= 1
            if depth >= 0:
                total -= parts[depth]
                nxt[depth] = parts[depth] - 1
            continue
        nxt[depth] = p - 1
        parts[depth] = p
        # gap window of k parts ending here
        if depth >= k - 1 and parts[depth - k + 1] - p < 2:
            continue
        # parity window of k-1 parts ending here
        if depth >= k - 2:
            start = depth - k + 2
            if parts[start] - p <= 1:
                s = p
                for t in range(start, depth):
                    s += parts[t]
                if (s - parity) % 2 != 0:
                    continue
        prev_lo = cnt_lo[depth - 1] if depth > 0 else 0
        c_lo = prev_lo + (1 if p == lo else 0)
        if c_lo > lo_max:
            continue
        prev_hi = cnt_hi[depth - 1] if depth > 0 else 0
        c_hi = prev_hi + (1 if p == hi else 0)
        if hi_mask >= 0 and c_hi < 63 and (hi_mask >> c_hi) == 0:
            continue
        cnt_lo[depth] = c_lo
        cnt_hi[depth] = c_hi
        total += p
        if hi_mask < 0 or (c_hi < 63 and (hi_mask >> c_hi) & 1):
            out[total] += 1
        depth += 1
        nxt[depth] = min(p, n_max - total)
    return out


_convolve_nb = _njit(convolve_trunc_loop)
_unit_divide_nb = _njit(unit_divide_loop)
_count_restricted_nb = _njit(count_restricted_loop)


def convolve_trunc(a, b, length):
    """First ``length`` coefficients of a*b for int64 arrays."""
    if length <= 0:
        return np.zeros(0, dtype=np.int64)
    if USE_NUMBA and numba is not None:
        return _convolve_nb(a, b, length)
    return convolve_trunc_numpy(a, b, length)


def unit_divide(a, b, length):
    if length <= 0:
        return True, np.zeros(0, dtype=np.int64)
    if USE_NUMBA and numba is not None:
        return _unit_divide_nb(a, b, length, SAFE_LIMIT // 2)
    return unit_divide_numpy(a, b, length, SAFE_LIMIT // 2)


def count_restricted(n_max, k, lo, hi, lo_max, hi_mask, parity):
    out = np.zeros(n_max + 1, dtype=np.int64)
    args = (n_max, k, lo, hi, lo_max, hi_mask, parity % 2, out)
    if USE_NUMBA and numba is not None:
        return _count_restricted_nb(*args)
    return count_restricted_loop(*args)
