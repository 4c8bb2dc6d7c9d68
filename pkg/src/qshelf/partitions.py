"""Restricted partitions: the combinatorial ground truth for every series.

Counting goes through the compiled pruned search in :mod:`qshelf._kernels`;
:func:`enumerate_partitions` plus :func:`satisfies` is the slow, unpruned
reference used to validate it and to stream witnesses.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels, faults
from .errors import Falsified
from .series import Series


@dataclass(frozen=True)
class Partition:
    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if any(p < 1 for p in parts):
            raise ValueError(f"parts must be positive: {parts}")
        if any(parts[t] < parts[t + 1] for t in range(len(parts) - 1)):
            raise ValueError(f"parts must be nonincreasing: {parts}")

    @property
    def n(self):
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def multiplicity(self, p):
        return self.parts.count(p)


@dataclass(frozen=True)
class ConditionProfile:
    """One set of restrictions on a partition.

    ``min_part`` bounds the smallest part from below and ``min_part_mult`` (if
    set) caps how often it may occur.  ``max_part`` with ``top_mult`` restrict
    the largest allowed value and its multiplicity.  Every window of k parts
    must drop by at least 2, and every window of k-1 parts that drops by at
    most 1 must sum to ``parity`` mod 2.
    """

    k: int
    min_part: int
    parity: int
    min_part_mult: int = None
    max_part: int = None
    top_mult: frozenset = None
    kind: str = "custom"

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.min_part < 1:
            raise ValueError("min_part must be at least 1")
        object.__setattr__(self, "parity", self.parity % 2)
        if self.top_mult is not None:
            object.__setattr__(self, "top_mult", frozenset(self.top_mult))
            if self.max_part is None:
                raise ValueError("top_mult needs max_part")


def decompose_official(k, r):
    """All (J, i) with r = (k-1)J + i; canonical form first (1 <= i <= k-1)."""
    if r < 1:
        raise ValueError("r must be positive")
    J, i = divmod(r - 1, k - 1)
    out = [(J, i + 1)]
    if i == 0 and J >= 1:
        out.append((J - 1, k))
    return out


def decompose_ghost(k, r):
    """(J, i) with 2 <= i <= k; r = 1 maps to the extension J = -1, i = k."""
    if r < 1:
        raise ValueError("r must be positive")
    J, i = divmod(r - 2, k - 1)
    return J, i + 2


def official_profile(k, J, i):
    return ConditionProfile(k=k, min_part=J + 1, parity=(k - 1) * J + i + k,
                            min_part_mult=k - i, kind="official")


def ghost_profile(k, J, i):
    if J < 0:
        # first ghost: only the parity clause and the gap clause remain
        return ConditionProfile(k=k, min_part=1, parity=(k - 1) * J + i + k + 1, kind="ghost")
    return ConditionProfile(k=k, min_part=J + 1, parity=(k - 1) * J + i + k + 1,
                            min_part_mult=k - i, kind="ghost")


def h_profile(k, J, j, l, i):
    allowed = frozenset(m for m in (l - 2, l - 1) if m >= 0)
    return ConditionProfile(k=k, min_part=J + 1, parity=(k - 1) * j + l - k,
                            min_part_mult=k - i, max_part=j, top_mult=allowed, kind="h")


def h_vanishes(k, J, j, l, i):
    if k % 2:
        return (l - i) % 2 != 0
    return (j - J + l - i) % 2 != 0


# ---------------------------------------------------------------------------
# enumeration and clause checking (reference path)


def enumerate_partitions(n):
    """Every partition of n once, in lexicographically decreasing order."""
    if n < 0:
        raise ValueError("n must be nonnegative")

    def rec(rest, cap):
        if rest == 0:
            yield ()
            return
        for p in range(min(rest, cap), 0, -1):
            for tail in rec(rest - p, p):
                yield (p,) + tail

    for parts in rec(n, n):
        yield Partition(parts)


def satisfies(pi, profile):
    parts = pi.parts if isinstance(pi, Partition) else tuple(pi)
    k = profile.k
    size = len(parts)
    if parts and parts[-1] < profile.min_part:
        return False
    if profile.max_part is not None and parts and parts[0] > profile.max_part:
        return False
    if profile.min_part_mult is not None and parts.count(profile.min_part) > profile.min_part_mult:
        return False
    if profile.top_mult is not None and parts.count(profile.max_part) not in profile.top_mult:
        return False
    for t in range(size - k + 1):
        if parts[t] - parts[t + k - 1] < 2:
            return False
    for t in range(size - k + 2):
        if parts[t] - parts[t + k - 2] <= 1 and sum(parts[t:t + k - 1]) % 2 != profile.parity:
            return False
    return True


def witnesses(profile, n):
    for pi in enumerate_partitions(n):
        if satisfies(pi, profile):
            yield pi


def counts_by_enumeration(profile, n_max):
    return np.array([sum(1 for _ in witnesses(profile, n)) for n in range(n_max + 1)], dtype=np.int64)


def partition_numbers(n_max):
    """p(0..n_max) from the pentagonal-number recurrence."""
    p = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        total = 0
        g = 1
        while True:
            for pent in (g * (3 * g - 1) // 2, g * (3 * g + 1) // 2):
                if pent > n:
                    break
                total += p[n - pent] if g % 2 else -p[n - pent]
            if g * (3 * g - 1) // 2 > n:
                break
            g += 1
        p[n] = total
    return p


# ---------------------------------------------------------------------------
# fast counting


@lru_cache(maxsize=4096)
def _profile_counts(profile, n_max):
    hi = n_max if profile.max_part is None else profile.max_part
    lo_max = n_max + 1 if profile.min_part_mult is None else profile.min_part_mult
    if profile.top_mult is None:
        mask = -1
    else:
        mask = 0
        for m in profile.top_mult:
            if m < 62:
                mask |= 1 << m
    out = _kernels.count_restricted(n_max, profile.k, profile.min_part, hi, lo_max, mask, profile.parity)
    out.setflags(write=False)
    return out


def profile_counts(profile, n_max):
    """Counts of qualifying partitions of 0..n_max (int64 array)."""
    return _profile_counts(profile, n_max)


def official_counts(k, r, n_max):
    decs = decompose_official(k, r)
    first = profile_counts(official_profile(k, *decs[0]), n_max)
    for J, i in decs[1:]:
        other = profile_counts(official_profile(k, J, i), n_max)
        bad = np.flatnonzero(first != other)
        if bad.shape[0]:
            n = int(bad[0])
            raise Falsified({
                "check": "edge-matching count", "indices": {"k": k, "r": r},
                "exponent": n, "expected": str(int(first[n])), "actual": str(int(other[n])),
            })
    return faults.tap("count_official", first)


def ghost_counts(k, r, n_max):
    J, i = decompose_ghost(k, r)
    return faults.tap("count_ghost", profile_counts(ghost_profile(k, J, i), n_max))


def h_counts(k, J, j, l, i, n_max):
    if j < J + 1:
        raise ValueError("need j >= J + 1")
    if h_vanishes(k, J, j, l, i):
        out = np.zeros(n_max + 1, dtype=np.int64)
    else:
        out = profile_counts(h_profile(k, J, j, l, i), n_max)
    return faults.tap("count_h", out)


def count_official(k, r, n):
    return int(official_counts(k, r, n)[n])


def count_ghost(k, r, n):
    return int(ghost_counts(k, r, n)[n])


def count_h(k, J, j, l, i, n):
    return int(h_counts(k, J, j, l, i, n)[n])


def as_series(counts):
    """Generating function of a count array, exact to its last index."""
    return Series(np.asarray(counts, dtype=np.int64), 0, len(counts) - 1)
