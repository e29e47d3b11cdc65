import numpy as np
import pytest

from chimera_ising.rng import PortableRng, splitmix64

from conftest import DATA


def test_reference_vector_seed_4711():
    # produced by the C program in tests/data/portable_rng_ref.c
    want = [int(x) for x in (DATA / "portable_rng_4711.txt").read_text().split()]
    assert len(want) == 1000
    r = PortableRng(4711)
    assert [r.next_u64() for _ in range(1000)] == want


def test_splitmix_known_value():
    # first splitmix64 output for seed 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_same_seed_same_stream():
    a, b = PortableRng(9), PortableRng(9)
    assert [a.below(7) for _ in range(50)] == [b.below(7) for _ in range(50)]
    assert PortableRng(9).next_u64() != PortableRng(10).next_u64()


def test_below_range_and_uniformity():
    r = PortableRng(1)
    draws = np.array([r.below(21) for _ in range(21000)])
    assert draws.min() == 0 and draws.max() == 20
    counts = np.bincount(draws, minlength=21)
    # chi-square with 20 degrees of freedom; 0.999 quantile is about 45.3
    chi2 = ((counts - 1000) ** 2 / 1000).sum()
    assert chi2 < 45.3


def test_integers_inclusive():
    r = PortableRng(3)
    vals = {r.integers(-2, 2) for _ in range(500)}
    assert vals == {-2, -1, 0, 1, 2}


def test_sample_distinct():
    r = PortableRng(5)
    s = r.sample(256, 52)
    assert len(set(s)) == 52 and all(0 <= x < 256 for x in s)
    with pytest.raises(ValueError):
        r.sample(3, 4)


def test_spins_and_random():
    r = PortableRng(8)
    s = r.spins(1000)
    assert set(s.tolist()) == {-1, 1} and abs(s.mean()) < 0.1
    x = [r.random() for _ in range(1000)]
    assert 0 <= min(x) and max(x) < 1


def test_bad_arguments():
    with pytest.raises(ValueError):
        PortableRng(-1)
    with pytest.raises(ValueError):
        PortableRng(0).below(0)
