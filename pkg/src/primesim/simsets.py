"""Construction of prime-similar sets and the similarity metric.

Three constructions: the primes themselves, the primes with every element
nudged by +1 or -1 (keyed, reproducible randomness), and translated copies
of a base set. Similarity between two sets is the largest observed gap
between their rank functions over a sampling grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._rng import mix64
from .errors import DomainError
from .numset import NumberSet, load_set, primes_up_to, window_bools

log = logging.getLogger(__name__)

SIMILARITY_GRID_TARGET = 100_000
_SCAN_CHUNK = 1 << 20


@dataclass(frozen=True)
class SetSpec:
    """Declarative recipe for constructing a NumberSet.

    kind 'primes'    — primes up to `limit`
    kind 'perturbed' — primes up to `limit`, each moved by +-1 keyed on `seed`
    kind 'shifted'   — primes up to `limit` translated by `shift_t`
    kind 'file'      — loaded from `path` in the shared set format
    """

    kind: str
    limit: int | None = None
    seed: int | None = None
    shift_t: int | None = None
    path: str | None = None

    def validate(self) -> None:
        if self.kind == "primes":
            if self.limit is None or self.limit < 2:
                raise DomainError("primes spec needs limit >= 2")
        elif self.kind == "perturbed":
            if self.limit is None or self.limit < 3:
                raise DomainError("perturbed spec needs limit >= 3")
            if self.seed is None:
                raise DomainError("perturbed spec needs a seed")
        elif self.kind == "shifted":
            if self.limit is None or self.limit < 2:
                raise DomainError("shifted spec needs limit >= 2")
            if self.shift_t is None:
                raise DomainError("shifted spec needs shift_t")
            if self.shift_t < -1:
                raise DomainError("shift below 1 is out of domain (2 is the smallest prime)")
        elif self.kind == "file":
            if not self.path:
                raise DomainError("file spec needs a path")
        else:
            raise DomainError(f"unknown set kind {self.kind!r}")

    def to_text(self) -> str:
        """Small key=value block embedded in report headers and spec files."""
        lines = [f"kind={self.kind}"]
        for key in ("limit", "seed", "shift_t", "path"):
            value = getattr(self, key)
            if value is not None:
                lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SetSpec":
        fields: dict[str, object] = {}
        for line_no, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"spec line {line_no}: expected key=value, got {line!r}")
            key = key.strip()
            value = value.strip()
            if key == "kind":
                fields["kind"] = value
            elif key in ("limit", "seed", "shift_t"):
                try:
                    fields[key] = int(value)
                except ValueError:
                    raise ValueError(f"spec line {line_no}: {key} must be an integer")
            elif key == "path":
                fields["path"] = value
            else:
                raise ValueError(f"spec line {line_no}: unknown key {key!r}")
        if "kind" not in fields:
            raise ValueError("spec block has no kind=")
        spec = cls(**fields)  # type: ignore[arg-type]
        spec.validate()
        return spec

    def to_dict(self) -> dict:
        out: dict[str, object] = {"kind": self.kind}
        for key in ("limit", "seed", "shift_t", "path"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


@dataclass(frozen=True)
class SimilarityReport:
    """Largest observed rank gap between two sets and the similarity bound."""

    max_deviation: int
    bound_c: int
    samples: int
    witness_n: int


def perturb_primes(
    limit: int, seed: int, *, _force_sign: int | None = None
) -> NumberSet:
    """Replace every prime p <= limit with p+1 or p-1, keyed on (seed, p).

    The sign is bit 0 of a counter-based hash, so generation is order- and
    segmentation-independent. Twin primes can collide (p+1 == (p+2)-1);
    collisions are resolved in ascending order by flipping the later
    element's sign, which keeps every element within 1 of its source prime.
    The result lives in the universe [1, limit+1] since the top prime may
    move up. `_force_sign` (+1 or -1) is a test hook that bypasses the
    keyed choice.
    """
    if limit < 3:
        raise DomainError("perturb_primes needs limit >= 3")
    primes = primes_up_to(limit).elements
    if _force_sign is not None:
        if _force_sign not in (1, -1):
            raise DomainError("_force_sign must be +1 or -1")
        sign = np.full(primes.size, _force_sign, dtype=np.int64)
    else:
        sign = np.where(
            mix64(seed, primes.astype(np.uint64)) & np.uint64(1), 1, -1
        ).astype(np.int64)
    cand = primes + sign
    # Fixpoint flipping is equivalent to the ascending sequential pass:
    # a stale flip would need three equal candidates, impossible for
    # distinct primes under +-1 moves.
    flipped = np.zeros(primes.size, dtype=bool)
    while True:
        coll = np.zeros(primes.size, dtype=bool)
        coll[1:] = cand[1:] == cand[:-1]
        coll &= ~flipped
        if not coll.any():
            break
        cand[coll] = primes[coll] - sign[coll]
        flipped |= coll
    dup = np.zeros(primes.size, dtype=bool)
    dup[1:] = cand[1:] == cand[:-1]
    if dup.any():
        # reachable only through the {2, 3} corner; keep the earlier element
        log.info("perturb_primes(limit=%d, seed=%d): dropped %s", limit, seed, cand[dup].tolist())
        cand = cand[~dup]
    cand = np.sort(cand)
    return NumberSet.from_elements(cand, limit + 1)


def shift_set(base: NumberSet, t: int) -> NumberSet:
    """Translate every element by t; ranks satisfy rank_out(n) = rank_base(n - t)."""
    if len(base) == 0:
        raise DomainError("cannot shift an empty set")
    if base.min() + t < 1:
        raise DomainError(f"shift {t} sends {base.min()} below 1")
    return NumberSet.from_elements(base.elements + t, base.limit + t)


def similarity(
    setQ: NumberSet, setP: NumberSet, step: int | None = None
) -> SimilarityReport:
    """Max of |rank_Q(n) - rank_P(n)| over n = step, 2*step, ... min(limits).

    step=1 scans every n exhaustively (chunked cumulative sums over the
    bitsets); the default step keeps roughly 10^5 grid points. The
    similarity bound constant is max deviation + 1.
    """
    common = min(setQ.limit, setP.limit)
    if common < 1:
        raise DomainError("sets share no evaluable range")
    if step is None:
        step = max(1, common // SIMILARITY_GRID_TARGET)
    if step < 1:
        raise DomainError("step must be >= 1")
    if step == 1:
        best = -1
        witness = 0
        base_q = base_p = 0
        for a in range(1, common + 1, _SCAN_CHUNK):
            b = min(a + _SCAN_CHUNK - 1, common)
            cq = np.cumsum(window_bools(setQ._words, a, b)) + base_q
            cp = np.cumsum(window_bools(setP._words, a, b)) + base_p
            dev = np.abs(cq - cp)
            i = int(np.argmax(dev))
            if int(dev[i]) > best:
                best = int(dev[i])
                witness = a + i
            base_q = int(cq[-1])
            base_p = int(cp[-1])
        samples = common
    else:
        grid = np.arange(step, common + 1, step, dtype=np.int64)
        if grid.size == 0:
            raise DomainError("step larger than the evaluable range")
        dev = np.abs(setQ.rank_many(grid) - setP.rank_many(grid))
        i = int(np.argmax(dev))
        best = int(dev[i])
        witness = int(grid[i])
        samples = int(grid.size)
    return SimilarityReport(
        max_deviation=best, bound_c=best + 1, samples=samples, witness_n=witness
    )


def deviation_series(
    setQ: NumberSet, setP: NumberSet, points: int = 1000
) -> tuple[np.ndarray, np.ndarray]:
    """Thinned (n, |rank_Q - rank_P|) series for plot data."""
    common = min(setQ.limit, setP.limit)
    if common < 1:
        raise DomainError("sets share no evaluable range")
    grid = np.unique(np.linspace(1, common, num=min(points, common), dtype=np.int64))
    dev = np.abs(setQ.rank_many(grid) - setP.rank_many(grid))
    return grid, dev


def build(spec: SetSpec) -> NumberSet:
    """Construct the set a SetSpec describes; deterministic for a fixed spec."""
    spec.validate()
    if spec.kind == "primes":
        return primes_up_to(spec.limit)
    if spec.kind == "perturbed":
        return perturb_primes(spec.limit, spec.seed)
    if spec.kind == "shifted":
        return shift_set(primes_up_to(spec.limit), spec.shift_t)
    return load_set(spec.path)
