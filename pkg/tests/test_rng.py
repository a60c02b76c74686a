import numpy as np

from lognnet.rng import MASK64, XorShift64Star, derive_seed, splitmix64


def reference_xorshift64star(state, n):
    out = []
    for _ in range(n):
        state ^= state >> 12
        state ^= (state << 25) % 2**64
        state ^= state >> 27
        out.append(state * 0x2545F4914F6CDD1D % 2**64)
    return out


def test_known_splitmix_value():
    # first output of splitmix64 seeded with 0 (reference value from the
    # published generator)
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_matches_reference_recurrence():
    g = XorShift64Star(42)
    start = g.state
    assert [g.next_u64() for _ in range(5)] == reference_xorshift64star(start, 5)


def test_uniform_open_interval_and_deterministic():
    a = XorShift64Star(7).uniform_array(1000)
    b = XorShift64Star(7).uniform_array(1000)
    assert np.array_equal(a, b)
    assert (a > 0).all() and (a < 1).all()


def test_seed_zero_is_usable():
    g = XorShift64Star(0)
    assert g.state != 0
    assert len({g.next_u64() for _ in range(100)}) == 100


def test_derived_seeds_differ():
    seeds = {derive_seed(1, k) for k in range(100)}
    assert len(seeds) == 100
    assert all(0 <= s <= MASK64 for s in seeds)
