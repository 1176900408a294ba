"""The generator must match the published splitmix64 / xoshiro256** streams.

Reference values were produced by compiling the authors' public C sources
(splitmix64.c, xoshiro256starstar.c) and printing the first outputs for
fixed seeds; they pin the implementation across platforms and refactors.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from incident_atlas.rng import Xoshiro256StarStar, splitmix64

SPLITMIX64_SEED42_FIRST5 = [
    13679457532755275413,
    2949826092126892291,
    5139283748462763858,
    6349198060258255764,
    701532786141963250,
]

XOSHIRO_SEED42_FIRST8 = [
    1546998764402558742,
    6990951692964543102,
    12544586762248559009,
    17057574109182124193,
    18295552978065317476,
    14199186830065750584,
    13267978908934200754,
    15679888225317814407,
]

XOSHIRO_SEED0_FIRST3 = [
    11091344671253066420,
    13793997310169335082,
    1900383378846508768,
]

UNIFORM_SEED42_FIRST4 = [
    0.083862971059882163,
    0.37898025066266861,
    0.68004341102813937,
    0.92469294532538759,
]


def test_splitmix64_matches_c_reference():
    assert splitmix64(42, 5) == SPLITMIX64_SEED42_FIRST5


def test_xoshiro_matches_c_reference_seed42():
    gen = Xoshiro256StarStar(42)
    assert [gen.next_uint64() for _ in range(8)] == XOSHIRO_SEED42_FIRST8


def test_xoshiro_matches_c_reference_seed0():
    gen = Xoshiro256StarStar(0)
    assert [gen.next_uint64() for _ in range(3)] == XOSHIRO_SEED0_FIRST3


def test_uniform_53bit_mapping():
    gen = Xoshiro256StarStar(42)
    got = [gen.random() for _ in range(4)]
    assert got == UNIFORM_SEED42_FIRST4


@given(st.integers(min_value=0, max_value=2**64 - 1))
def test_uniforms_stay_in_unit_interval(seed):
    gen = Xoshiro256StarStar(seed)
    for _ in range(20):
        value = gen.random()
        assert 0.0 <= value < 1.0


@given(st.integers(min_value=0, max_value=2**64 - 1))
def test_same_seed_same_stream(seed):
    a = Xoshiro256StarStar(seed)
    b = Xoshiro256StarStar(seed)
    assert [a.next_uint64() for _ in range(10)] == [b.next_uint64() for _ in range(10)]


def test_gaussians_shape_std_and_determinism():
    draws = Xoshiro256StarStar(7).gaussians((500, 2), std=2.0)
    again = Xoshiro256StarStar(7).gaussians((500, 2), std=2.0)
    assert draws.shape == (500, 2)
    assert draws.dtype == np.float64
    assert np.array_equal(draws, again)
    # crude moment checks on 1000 samples
    assert abs(float(draws.mean())) < 0.25
    assert 1.6 < float(draws.std()) < 2.4


def test_gaussians_are_finite():
    draws = Xoshiro256StarStar(123).gaussians((2000,), std=1.0)
    assert np.all(np.isfinite(draws))
    assert not math.isclose(float(draws.min()), float(draws.max()))


def test_box_muller_consumes_pairs():
    # an odd-count draw then a fresh draw must differ from a straight run,
    # while two identical call sequences agree
    gen1 = Xoshiro256StarStar(5)
    first = gen1.gaussians((3,))
    second = gen1.gaussians((3,))
    gen2 = Xoshiro256StarStar(5)
    combined = gen2.gaussians((6,))
    assert np.array_equal(np.concatenate([first, second]), combined)


@pytest.mark.parametrize("std", [1e-4, 1.0, 10.0])
def test_gaussian_std_scales_linearly(std):
    base = Xoshiro256StarStar(9).gaussians((100,), std=1.0)
    scaled = Xoshiro256StarStar(9).gaussians((100,), std=std)
    assert np.allclose(scaled, base * std, rtol=0, atol=0)
