"""Goldbach-style verification over a NumberSet.

The hot path answers, for every even number in a range, whether it splits
as q1 + q2 with both parts in the set. The scan walks candidate q1
ascending (so the reported pair is canonical) and tests the complement
against the bitset; surviving evens are failures. Distance sets A_n/B_n
and their bitset-AND disjointness are materialized only for diagnostics
and small-scale equivalence tests — representability of 2n is equivalent
to A_n and B_n intersecting.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .numset import NumberSet, extract_window, bits_at
from .simsets import SetSpec

BUCKET_WIDTH = 1_000_000
SAMPLE_STRIDE = 1_000


@dataclass(frozen=True)
class DistanceSet:
    """Distances from a midpoint n to set elements, as a subset of {0..n-1}.

    Side 'A' holds n - q for elements q <= n; side 'B' holds q - n for
    elements n <= q < 2n. `packed` is the members' bitset over {0..n-1}.
    """

    n: int
    side: str
    members: np.ndarray
    packed: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.members.size)


@dataclass(frozen=True)
class BucketStats:
    lo: int
    hi: int
    sampled: int
    min_reps: int
    mean_reps: float


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a verification run over [lo, hi].

    threshold_n0 is the largest failing even number, or lo - 2 when the
    range is failure-free ("no failure >= lo").
    """

    set_spec: SetSpec | None
    lo: int
    hi: int
    failures: list[int]
    threshold_n0: int
    buckets: list[BucketStats]
    wall_ms: float


def a_set(setQ: NumberSet, n: int) -> DistanceSet:
    """Distances of n to elements at or below it: {n - q : q in Q, q <= n}."""
    if not 1 <= n <= setQ.limit:
        raise DomainError(f"midpoint {n} outside universe [1, {setQ.limit}]")
    hi = int(np.searchsorted(setQ.elements, n, side="right"))
    members = (n - setQ.elements[:hi])[::-1].copy()
    # bit d of the A-bitset is membership of n - d, i.e. the window
    # [1, n] read back-to-front; d = n is impossible (0 is never a member)
    packed = _reversed_window(setQ, 1, n)
    return DistanceSet(n=n, side="A", members=members, packed=packed)


def b_set(setQ: NumberSet, n: int) -> DistanceSet:
    """Distances of n to elements in [n, 2n): {q - n : q in Q, n <= q < 2n}."""
    if 2 * n - 1 > setQ.limit:
        raise DomainError(f"universe too small for b_set midpoint {n}")
    if n < 1:
        raise DomainError("midpoint must be >= 1")
    lo = int(np.searchsorted(setQ.elements, n, side="left"))
    hi = int(np.searchsorted(setQ.elements, 2 * n - 1, side="right"))
    members = (setQ.elements[lo:hi] - n).copy()
    packed = extract_window(setQ._words, n, 2 * n - 1)
    return DistanceSet(n=n, side="B", members=members, packed=packed)


def _reversed_window(setQ: NumberSet, a: int, b: int) -> np.ndarray:
    """Packed bits of [a, b] reversed, via the cached full-reversal buffer."""
    rev = setQ.reversed_words()
    total = setQ._words.size << 6
    start = total - 1 - b
    return extract_window(rev, start, start + (b - a))


def disjoint(a: DistanceSet, b: DistanceSet) -> bool:
    """True iff the two distance sets share no member (bitset AND)."""
    if a.side != "A" or b.side != "B":
        raise DomainError("disjoint expects an A-side and a B-side distance set")
    if a.n != b.n:
        raise DomainError(f"mismatched midpoints {a.n} != {b.n}")
    k = min(a.packed.size, b.packed.size)
    return not np.any(a.packed[:k] & b.packed[:k])


def pair_count(setQ: NumberSet, even2n: int) -> int:
    """Number of representations even2n = q1 + q2, q1 <= q2, both in the set.

    Equals |A_n ∩ B_n| for n = even2n/2: one AND+popcount over packed
    windows, the second window read through the cached bit-reversal.
    """
    _validate_even(setQ, even2n)
    n = even2n >> 1
    u_lo = max(1, even2n - setQ.limit)
    if u_lo > n:
        return 0
    A = extract_window(setQ._words, u_lo, n)
    B = _reversed_window(setQ, even2n - n, even2n - u_lo)
    return int(np.bitwise_count(A & B).sum())


def _validate_even(setQ: NumberSet, even2n: int) -> None:
    if even2n % 2:
        raise DomainError(f"{even2n} is odd")
    if not 2 <= even2n <= 2 * setQ.limit:
        raise DomainError(f"{even2n} outside addressable range [2, {2 * setQ.limit}]")


def find_representation(setQ: NumberSet, even2n: int) -> tuple[int, int] | None:
    """Canonical representation (q1, q2) with q1 minimal, or None.

    Scans candidate q1 ascending in vector chunks; deterministic.
    """
    _validate_even(setQ, even2n)
    n = even2n >> 1
    elems = setQ.elements
    k0 = int(np.searchsorted(elems, max(1, even2n - setQ.limit), side="left"))
    k1 = int(np.searchsorted(elems, n, side="right"))
    for a in range(k0, k1, 256):
        qs = elems[a : min(a + 256, k1)]
        hits = bits_at(setQ._words, even2n - qs)
        i = int(np.argmax(hits))
        if hits[i]:
            q1 = int(qs[i])
            return q1, even2n - q1
    return None


def minimal_representations(setQ: NumberSet, lo: int, hi: int) -> np.ndarray:
    """Smallest q1 for every even in [lo, hi] (0 where no representation).

    Vectorized form of find_representation over a whole range; the scan
    order makes results identical to per-even queries.
    """
    _validate_range(setQ, lo, hi)
    E = np.arange(lo, hi + 2, 2, dtype=np.int64)
    out = np.zeros(E.size, dtype=np.int64)
    boundary = int(np.searchsorted(E, setQ.limit + 1, side="right"))
    _scan_ascending(setQ, E[:boundary], out[:boundary])
    _scan_descending(setQ, E[boundary:], out[boundary:])
    return out


def _validate_range(setQ: NumberSet, lo: int, hi: int) -> None:
    if lo % 2 or hi % 2:
        raise DomainError("range endpoints must be even")
    if not 4 <= lo <= hi:
        raise DomainError(f"bad even range [{lo}, {hi}]")
    if hi > 2 * setQ.limit:
        raise DomainError(f"range end {hi} exceeds addressable 2*limit = {2 * setQ.limit}")


def _scan_ascending(setQ: NumberSet, E: np.ndarray, out: np.ndarray) -> None:
    """Fill minimal q1 for evens <= limit + 1 (complement always addressable)."""
    elems = setQ.elements
    words = setQ._words
    rem = E
    pos = np.arange(E.size)
    k = 0
    while rem.size:
        if k == elems.size:
            break
        q1 = int(elems[k])
        cut = int(np.searchsorted(rem, 2 * q1, side="left"))
        if cut:
            # evens below 2*q1 have exhausted every candidate; they fail
            rem, pos = rem[cut:], pos[cut:]
            if not rem.size:
                break
        hit = bits_at(words, rem - q1)
        if hit.any():
            out[pos[hit]] = q1
            keep = ~hit
            rem, pos = rem[keep], pos[keep]
        k += 1


def _scan_descending(setQ: NumberSet, E: np.ndarray, out: np.ndarray) -> None:
    """Fill minimal q1 for evens above limit + 1 by walking q2 downward.

    For these evens small q1 are useless (the complement would exceed the
    universe), so the scan walks the largest candidate q2 down; the first
    hit still yields the smallest q1 = even - q2.
    """
    elems = setQ.elements
    words = setQ._words
    rem = E
    pos = np.arange(E.size)
    for k in range(elems.size - 1, -1, -1):
        if not rem.size:
            return
        q2 = int(elems[k])
        cut = int(np.searchsorted(rem, 2 * q2, side="right"))
        # evens above 2*q2 can no longer be split with q1 <= q2; they fail
        rem, pos = rem[:cut], pos[:cut]
        if not rem.size:
            return
        hit = bits_at(words, rem - q2)
        if hit.any():
            out[pos[hit]] = rem[hit] - q2
            keep = ~hit
            rem, pos = rem[keep], pos[keep]


def _bucket_bounds(lo: int, hi: int, width: int) -> list[tuple[int, int]]:
    bounds = []
    b_lo = lo
    while b_lo <= hi:
        b_hi = min(hi, b_lo + width - 2)
        bounds.append((b_lo, b_hi))
        b_lo = b_hi + 2
    return bounds


def _check_bucket(
    setQ: NumberSet, b_lo: int, b_hi: int, stride: int
) -> tuple[list[int], BucketStats]:
    E = np.arange(b_lo, b_hi + 2, 2, dtype=np.int64)
    q1 = np.zeros(E.size, dtype=np.int64)
    boundary = int(np.searchsorted(E, setQ.limit + 1, side="right"))
    _scan_ascending(setQ, E[:boundary], q1[:boundary])
    _scan_descending(setQ, E[boundary:], q1[boundary:])
    failures = E[q1 == 0].tolist()
    sampled = E[:: stride]
    counts = np.fromiter(
        (pair_count(setQ, int(e)) for e in sampled), dtype=np.int64, count=sampled.size
    )
    stats = BucketStats(
        lo=b_lo,
        hi=b_hi,
        sampled=int(sampled.size),
        min_reps=int(counts.min()),
        mean_reps=float(counts.mean()),
    )
    return failures, stats


def check_range(
    setQ: NumberSet,
    lo: int,
    hi: int,
    *,
    workers: int = 1,
    slow_mode: bool = False,
    bucket_width: int = BUCKET_WIDTH,
    sample_stride: int = SAMPLE_STRIDE,
    set_spec: SetSpec | None = None,
) -> CheckReport:
    """Verify every even number in [lo, hi] and collect failure/stat buckets.

    Buckets are fixed by (lo, hi, bucket_width) and processed independently
    against the immutable set, so any worker count produces identical
    reports. Representation counts are sampled 1-in-`sample_stride` evens
    per bucket; slow_mode counts every even.
    """
    _validate_range(setQ, lo, hi)
    if workers < 1:
        raise DomainError("workers must be >= 1")
    if bucket_width < 2 or bucket_width % 2:
        raise DomainError("bucket_width must be a positive even number")
    if sample_stride < 1:
        raise DomainError("sample_stride must be >= 1")
    stride = 1 if slow_mode else sample_stride
    t0 = time.perf_counter()
    setQ.reversed_words()  # materialize once, not per worker
    bounds = _bucket_bounds(lo, hi, bucket_width)
    if workers == 1:
        results = [_check_bucket(setQ, b_lo, b_hi, stride) for b_lo, b_hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(lambda b: _check_bucket(setQ, b[0], b[1], stride), bounds)
            )
    failures: list[int] = []
    buckets: list[BucketStats] = []
    for bucket_failures, stats in results:
        failures.extend(bucket_failures)
        buckets.append(stats)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return CheckReport(
        set_spec=set_spec,
        lo=lo,
        hi=hi,
        failures=failures,
        threshold_n0=failures[-1] if failures else lo - 2,
        buckets=buckets,
        wall_ms=wall_ms,
    )
