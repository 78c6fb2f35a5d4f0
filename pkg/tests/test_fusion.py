import random

import pytest

from resplan.errors import LengthMismatchError
from resplan.fusion import EmptyInputError, fuse
from resplan.plans import BinaryPlan

from .oracles import fusion_oracle


def plan(bits, source="t"):
    return BinaryPlan(bits=tuple(bits), source=source)


def test_worked_example():
    fused = fuse([plan([1, 0, 1, 1, 0]), plan([1, 1, 0, 1, 1]), plan([0, 1, 1, 0, 0])])
    assert fused.bits == (1, 1, 1, 1, 0)
    assert fused.source == "fused(3)"


def test_single_input_idempotence():
    assert fuse([plan([1, 0, 1])]).bits == (1, 0, 1)


def test_even_tie_rounds_half_up():
    assert fuse([plan([1, 0]), plan([0, 1])]).bits == (1, 1)


def test_empty_input():
    with pytest.raises(EmptyInputError):
        fuse([])


def test_length_mismatch():
    with pytest.raises(LengthMismatchError):
        fuse([plan([1, 0]), plan([1, 0, 1])])


def test_permutation_invariance():
    rng = random.Random(3)
    plans = [plan([rng.randint(0, 1) for _ in range(8)]) for _ in range(5)]
    reference = fuse(plans).bits
    for _ in range(10):
        rng.shuffle(plans)
        assert fuse(plans).bits == reference


def test_m_copies_fuse_to_same_plan():
    rng = random.Random(5)
    for m in (1, 2, 3, 5, 8):
        bits = [rng.randint(0, 1) for _ in range(10)]
        assert fuse([plan(bits)] * m).bits == tuple(bits)


def test_odd_m_strict_majority():
    rng = random.Random(9)
    for _ in range(100):
        m = rng.choice([3, 5, 7])
        group = [[rng.randint(0, 1) for _ in range(6)] for _ in range(m)]
        fused = fuse([plan(b) for b in group]).bits
        for j, bit in enumerate(fused):
            ones = sum(b[j] for b in group)
            assert bit == (1 if ones > m / 2 else 0)


def test_matches_counting_oracle():
    rng = random.Random(17)
    for _ in range(200):
        m = rng.randint(1, 9)
        n = rng.randint(1, 12)
        group = [[rng.randint(0, 1) for _ in range(n)] for _ in range(m)]
        assert list(fuse([plan(b) for b in group]).bits) == fusion_oracle(group)
