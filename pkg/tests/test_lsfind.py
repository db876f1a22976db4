"""Sampled structure searches: planted structures, honest No, accounting."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bvattack.boolfn import BooleanFunction, VectorFunction, random_boolean_function
from bvattack.bv import QueryLedger
from bvattack.ciphers import random_permutation
from bvattack.experiments import example_quadratic, inner_product_function, planted_boolean, planted_vector
from bvattack.lsfind import (
    default_sample_count,
    find_boolean_structures,
    find_common_zero_structure,
    find_vector_structures,
)
from bvattack.rng import seeded_rng


def test_default_sample_count():
    assert default_sample_count(6) == 24
    assert default_sample_count(1) == 4


def test_quadratic_example_search():
    # x1 x2 + x3: the only structure is direction 001 with constant 1
    res = find_boolean_structures(example_quadratic(), seed=5)
    assert res.found
    assert res.smallest_candidate() == (0b001, 1)
    assert res.zero_set.is_trivial
    assert res.one_set.contains(0b001)
    assert len(res.samples) == res.p == 12


@given(st.integers(2, 8), st.integers(0, 2**30))
def test_planted_structure_always_survives(n, key):
    """An exact structure satisfies every sampled constraint, so it can
    never be eliminated, whatever the draw."""
    f, a, i = planted_boolean(n, seeded_rng(key, 40))
    res = find_boolean_structures(f, seed=(key, 41))
    assert res.found
    target = res.zero_set if i == 0 else res.one_set
    assert target.contains(a)


def test_structure_free_function_says_no():
    # bent function, every direction balanced; at p = 4n survival odds are 2^-23
    f = inner_product_function(6)
    for t in range(20):
        res = find_boolean_structures(f, seed=(100, t))
        assert not res.found
        assert res.zero_set.is_trivial and res.one_set.is_trivial


def test_constant_function_degenerates_to_full_space():
    # constant f samples only w=0; every direction is a structure
    f = BooleanFunction(3, np.zeros(8, dtype=np.uint8))
    res = find_boolean_structures(f, seed=7)
    assert res.found
    assert res.zero_set.size == 8
    assert res.one_set.is_empty
    assert res.smallest_candidate() == (1, 0)


def test_sample_count_validation():
    f = example_quadratic()
    with pytest.raises(ValueError):
        find_boolean_structures(f, p=0, seed=1)
    with pytest.raises(ValueError):
        find_vector_structures(VectorFunction(2, 2, np.arange(4)), p=-3, seed=1)


def test_boolean_search_query_accounting():
    led = QueryLedger()
    find_boolean_structures(example_quadratic(), p=17, seed=3, ledger=led)
    assert led.quantum == 17
    assert led.classical == 0


@given(st.integers(2, 6), st.integers(0, 2**30))
def test_planted_vector_structure_in_intersection(n, key):
    F, a, alpha = planted_vector(n, n, seeded_rng(key, 42))
    res = find_vector_structures(F, seed=(key, 43))
    assert res.found
    assert res.intersection.contains(a)
    if res.a == a:
        assert res.alpha == alpha


def test_planted_vector_recovery_pinned():
    F, a, alpha = planted_vector(5, 5, seeded_rng(12345, 42))
    res = find_vector_structures(F, p=40, seed=(12345, 43))
    assert (res.a, res.alpha) == (a, alpha)
    assert res.queries == 40 * 5  # no early halt when a structure exists


def test_vector_search_early_halt_on_random_function():
    """A structureless component empties the intersection early; later
    components are never sampled."""
    rng = seeded_rng(2024, 1)
    F = VectorFunction(8, 8, rng.integers(0, 256, size=256, dtype=np.int64))
    led = QueryLedger()
    res = find_vector_structures(F, p=64, seed=(2024, 2), ledger=led)
    assert not res.found
    assert led.quantum == res.queries
    assert res.queries < 64 * 8
    assert res.queries % 64 == 0


def test_vector_alpha_reconstruction_bit_order():
    """alpha bit for component j lands at output position j (1 = MSB)."""
    table = np.array([0b00, 0b11, 0b11, 0b00], dtype=np.int64)  # F(x) = (x1^x2, x1^x2)
    F = VectorFunction(2, 2, table)
    res = find_vector_structures(F, p=12, seed=9)
    assert res.found
    # direction 11 fixes F; direction 01 and 10 flip both output bits
    assert res.intersection.contains(0b11)
    if res.a in (0b01, 0b10):
        assert res.alpha == 0b11


def test_solve_width_truncation():
    """Joint (x || k) search restricted to the x half finds the x-direction."""
    T, a, alpha = planted_vector(4, 4, seeded_rng(777, 3))
    kb = 3
    xs = np.arange(1 << (4 + kb))
    x_part = xs >> kb
    k_part = xs & ((1 << kb) - 1)
    # G(x || k) = T(x) ^ (k << 1): exact x-direction (a || 0) survives truncation
    G = VectorFunction(4 + kb, 4, (T.table[x_part] ^ (k_part << 1)) & 0b1111)
    res = find_vector_structures(G, p=32, seed=(777, 4), solve_width=4)
    assert res.found
    assert res.width == 4
    assert res.intersection.contains(a)


def test_common_zero_structure_finds_period():
    """F(x) = P(x) ^ P(x ^ c) has period c with zero output difference."""
    for t, c in ((0, 0b1011), (1, 0b0001), (2, 0b1111)):
        perm = random_permutation(4, seeded_rng(55, t))
        xs = np.arange(16)
        F = VectorFunction(4, 4, perm[xs] ^ perm[xs ^ c])
        res = find_common_zero_structure(F, p=16, seed=(56, t))
        assert res.found
        assert res.intersection.contains(c)
        assert res.a == c  # pinned seeds: nothing smaller survives


def test_common_zero_rejects_bad_p():
    F = VectorFunction(2, 2, np.arange(4))
    with pytest.raises(ValueError):
        find_common_zero_structure(F, p=0, seed=1)
