"""LOTZ_k definitions: objectives, feasibility, dominance."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lotzkit.core import (
    Fitness,
    ProblemParams,
    dominates,
    evaluate,
    genome_from_string,
    genome_to_string,
    h_of,
    leading_ones,
    trailing_zeros,
)

genomes = st.integers(min_value=2, max_value=14).flatmap(
    lambda n: st.lists(st.integers(0, 1), min_size=n, max_size=n)
)


def g(text):
    return genome_from_string(text)


def test_leading_ones_examples():
    assert leading_ones(g("11010000")) == 2
    assert leading_ones(g("11111111")) == 8
    assert leading_ones(g("01111111")) == 0


def test_trailing_zeros_examples():
    assert trailing_zeros(g("11010000")) == 4
    assert trailing_zeros(g("00000000")) == 8
    assert trailing_zeros(g("00000001")) == 0


def test_genome_string_round_trip():
    assert genome_to_string(g("0110")) == "0110"
    with pytest.raises(ValueError):
        genome_from_string("01x0")
    with pytest.raises(ValueError):
        genome_from_string("")


def test_h_examples():
    p = ProblemParams(10, 4)
    assert h_of(5, p) == 0
    assert h_of(6, p) == 5
    assert h_of(10, p) == 1
    with pytest.raises(ValueError):
        h_of(11, p)


def test_params_domain():
    with pytest.raises(ValueError):
        ProblemParams(8, 1)
    with pytest.raises(ValueError):
        ProblemParams(8, 9)
    with pytest.raises(ValueError):
        ProblemParams(1, 2)


def test_evaluate_examples():
    p = ProblemParams(8, 2)
    fit = evaluate(g("11111111"), p)
    assert (fit.lo, fit.tz, fit.h) == (8, 0, 1)
    assert fit.is_feasible(p)
    # lo + tz = 6 sits exactly on the feasibility floor n - k = 6
    fit = evaluate(g("11010000"), p)
    assert (fit.lo, fit.tz, fit.h) == (2, 4, 3)
    assert fit.is_feasible(p)

    p4 = ProblemParams(8, 4)
    fit = evaluate(g("11010000"), p4)
    assert (fit.lo, fit.tz, fit.h) == (2, 4, 3)
    assert fit.is_feasible(p4)

    fit = evaluate(g("01100000"), p4)  # lo=0, tz=5, u=5 > floor=4
    assert (fit.lo, fit.tz, fit.h) == (0, 5, 4)
    fit = evaluate(g("01100100"), p4)  # u=2 < 4: infeasible, h=0
    assert (fit.lo, fit.tz, fit.h) == (0, 2, 0)
    assert not fit.is_feasible(p4)


def test_evaluate_length_mismatch():
    with pytest.raises(ValueError):
        evaluate(g("0101"), ProblemParams(8, 2))


def test_dominates_examples():
    assert not dominates(Fitness(3, 2, 5), Fitness(3, 2, 5))
    assert dominates(Fitness(5, 1, 0), Fitness(4, 1, 0))
    assert not dominates(Fitness(4, 1, 0), Fitness(5, 1, 0))
    assert dominates(Fitness(4, 1, 3), Fitness(4, 1, 0))


def test_fitness_identity_ignores_h_cache():
    assert Fitness(3, 2, 5) == Fitness(3, 2, 5)
    assert hash(Fitness(3, 2, 5)) == hash(Fitness(3, 2, 5))
    assert Fitness(3, 2, 5) != Fitness(2, 3, 5)


@given(genomes)
def test_lo_plus_tz_bounded_and_never_n_minus_1(bits):
    bits = np.array(bits, dtype=np.uint8)
    n = len(bits)
    lo, tz = leading_ones(bits), trailing_zeros(bits)
    assert lo + tz <= n
    assert lo + tz != n - 1


@given(genomes, st.integers(2, 14))
@settings(max_examples=200)
def test_infeasible_dominance_reduces_to_lotz(bits, k):
    bits = np.array(bits, dtype=np.uint8)
    n = len(bits)
    k = min(k, n)
    p = ProblemParams(n, k)
    fit = evaluate(bits, p)
    if not fit.is_feasible(p):
        assert fit.h == 0


def test_feasible_pairs_mutually_non_dominating_small():
    for n in range(2, 11):
        for k in range(2, n + 1):
            p = ProblemParams(n, k)
            fits = [
                Fitness(lo, tz, h_of(lo + tz, p))
                for lo in range(n + 1)
                for tz in range(n - lo + 1)
                if lo + tz >= n - k and lo + tz != n - 1
            ]
            for a in fits:
                for b in fits:
                    if a.key != b.key:
                        assert not dominates(a, b)


def test_lotz_dominance_implies_triple_dominance_when_infeasible():
    # both infeasible: the third objective is 0 for both and cannot matter
    p = ProblemParams(10, 3)
    for lo_a, tz_a, lo_b, tz_b in [(3, 2, 2, 2), (4, 1, 3, 1), (2, 3, 2, 1)]:
        a = Fitness(lo_a, tz_a, h_of(lo_a + tz_a, p))
        b = Fitness(lo_b, tz_b, h_of(lo_b + tz_b, p))
        assert a.h == 0 and b.h == 0
        assert dominates(a, b)
