import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primesim._rng import mix64
from primesim.errors import DomainError
from primesim.numset import NumberSet, primes_up_to, save_set
from primesim.simsets import (
    SetSpec,
    build,
    deviation_series,
    perturb_primes,
    shift_set,
    similarity,
)

from conftest import trial_division_primes


def sequential_perturb(limit: int, seed: int) -> list[int]:
    """Reference implementation of the perturbation: one prime at a time.

    Ascending scan; the keyed sign choice collides with the previously
    emitted element -> flip; still colliding -> drop. The production code
    vectorizes this; results must be identical.
    """
    primes = primes_up_to(limit).elements.tolist()
    signs = mix64(seed, np.array(primes, dtype=np.uint64)) & np.uint64(1)
    emitted: list[int] = []
    for p, bit in zip(primes, signs):
        sign = 1 if bit else -1
        candidate = p + sign
        if emitted and candidate == emitted[-1]:
            candidate = p - sign
        if emitted and candidate == emitted[-1]:
            continue
        emitted.append(candidate)
    return sorted(emitted)


class TestPerturbPrimes:
    def test_forced_plus_one(self):
        ns = perturb_primes(10, 0, _force_sign=1)
        assert ns.elements.tolist() == [3, 4, 6, 8]

    def test_forced_minus_one(self):
        ns = perturb_primes(10, 0, _force_sign=-1)
        assert ns.elements.tolist() == [1, 2, 4, 6]

    def test_deterministic(self):
        a = perturb_primes(100, 1)
        b = perturb_primes(100, 1)
        assert a == b

    def test_limit_too_small(self):
        with pytest.raises(DomainError):
            perturb_primes(2, 0)

    @pytest.mark.parametrize("seed", [0, 1, 42, 2**63 + 11])
    def test_matches_sequential_reference(self, seed):
        got = perturb_primes(100_000, seed).elements.tolist()
        assert got == sequential_perturb(100_000, seed)

    @pytest.mark.parametrize("seed", [0, 7, 42])
    def test_every_element_moved_by_one(self, seed):
        ns = perturb_primes(50_000, seed)
        primes = set(primes_up_to(50_001).elements.tolist())
        for q in ns.elements.tolist():
            assert (q - 1) in primes or (q + 1) in primes
        assert np.all(np.diff(ns.elements) > 0)

    def test_deviation_bound_exhaustive_1e6_seed42(self):
        # keyed perturbation keeps every rank within 2 of the prime count
        ns = perturb_primes(1_000_000, 42)
        primes = primes_up_to(1_000_000)
        report = similarity(ns, primes, step=1)
        assert report.max_deviation <= 2
        assert report.bound_c == report.max_deviation + 1


class TestShiftSet:
    def test_shift_up(self):
        base = NumberSet.from_elements([2, 3, 5, 7], 10)
        assert shift_set(base, 1).elements.tolist() == [3, 4, 6, 8]

    def test_shift_down(self):
        base = NumberSet.from_elements([2, 3, 5, 7], 10)
        assert shift_set(base, -1).elements.tolist() == [1, 2, 4, 6]

    def test_shift_below_one_rejected(self):
        base = NumberSet.from_elements([2, 3], 5)
        with pytest.raises(DomainError):
            shift_set(base, -2)

    def test_rank_identity_against_sieve(self):
        primes = primes_up_to(1000)
        shifted = shift_set(primes, 10)
        oracle = len([p for p in trial_division_primes(490)])
        assert shifted.rank(500) == oracle == 93

    @given(t=st.integers(min_value=-1, max_value=50), n=st.integers(min_value=0, max_value=900))
    @settings(max_examples=80, deadline=None)
    def test_rank_identity_property(self, t, n):
        primes = primes_up_to(1000)
        shifted = shift_set(primes, t)
        if 0 <= n - t <= primes.limit and n <= shifted.limit:
            assert shifted.rank(n) == primes.rank(n - t)


class TestSimilarity:
    def test_identity_is_zero(self, primes_10k):
        report = similarity(primes_10k, primes_10k, step=1)
        assert report.max_deviation == 0
        assert report.bound_c == 1
        assert report.samples == primes_10k.limit

    def test_shifted_set_bounded_by_t_plus_one(self, primes_10k):
        for t in (1, 2, 3):
            shifted = shift_set(primes_10k, t)
            report = similarity(shifted, primes_10k, step=1)
            assert report.max_deviation <= t
            assert report.bound_c <= t + 1

    def test_perturbed_bound_c(self):
        ns = perturb_primes(100_000, 7)
        report = similarity(ns, primes_up_to(100_000), step=1)
        assert report.bound_c <= 2

    def test_witness_attains_max(self, primes_10k):
        shifted = shift_set(primes_10k, 2)
        report = similarity(shifted, primes_10k, step=1)
        got = abs(shifted.rank(report.witness_n) - primes_10k.rank(report.witness_n))
        assert got == report.max_deviation

    def test_step_grid(self, primes_10k):
        report = similarity(primes_10k, primes_10k, step=100)
        assert report.samples == 100
        assert report.max_deviation == 0

    def test_deviation_series_thinning(self, primes_10k):
        ns, devs = deviation_series(primes_10k, primes_10k, points=50)
        assert ns.size <= 50
        assert not devs.any()


class TestSetSpec:
    def test_build_primes(self):
        assert build(SetSpec(kind="primes", limit=10)).elements.tolist() == [2, 3, 5, 7]

    def test_build_perturbed_deterministic(self):
        spec = SetSpec(kind="perturbed", limit=100, seed=1)
        assert build(spec) == build(spec)

    def test_build_file_roundtrip(self, tmp_path, primes_10k):
        path = tmp_path / "p.txt"
        save_set(primes_10k, str(path))
        spec = SetSpec(kind="file", path=str(path))
        assert build(spec) == primes_10k

    def test_build_shifted(self):
        ns = build(SetSpec(kind="shifted", limit=10, shift_t=1))
        assert ns.elements.tolist() == [3, 4, 6, 8]

    def test_text_roundtrip(self):
        spec = SetSpec(kind="perturbed", limit=1000, seed=99)
        again = SetSpec.from_text(spec.to_text())
        assert again == spec

    def test_text_rejects_garbage(self):
        with pytest.raises(ValueError, match="line 2"):
            SetSpec.from_text("kind=primes\nlimit=ten\n")
        with pytest.raises(ValueError, match="kind"):
            SetSpec.from_text("limit=10\n")

    def test_validation(self):
        with pytest.raises(DomainError):
            SetSpec(kind="perturbed", limit=100).validate()
        with pytest.raises(DomainError):
            SetSpec(kind="nonsense", limit=5).validate()
        with pytest.raises(DomainError):
            SetSpec(kind="file").validate()
        with pytest.raises(DomainError):
            SetSpec(kind="shifted", limit=100, shift_t=-2).validate()
