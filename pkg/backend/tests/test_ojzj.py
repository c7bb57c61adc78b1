"""Tests for the m-OJZJ_k benchmark: objectives, front, classes and the brute-force oracle."""

import itertools

import pytest

from app.core.errors import RegimeError, UsageError
from app.core.evolution.bitcore import Genome
from app.core.evolution.dominance import dominates
from app.core.evolution.ojzj import (
    OjzjInstance,
    block_objectives,
    brute_force_front,
    evaluate,
    genome_class,
    pareto_front,
    r_vector,
    sorted_front,
)


def g(text: str) -> Genome:
    return Genome.from_string(text)


class TestInstance:
    @pytest.mark.parametrize(
        "n,m,k,match",
        [(8, 3, 2, "even"), (8, 0, 2, "even"), (7, 4, 2, "multiple"), (8, 2, 1, "2 <= k"), (8, 4, 5, "2 <= k")],
    )
    def test_rejects_invalid(self, n, m, k, match):
        with pytest.raises(UsageError, match=match):
            OjzjInstance(n, m, k)

    def test_derived_sizes(self, four_objective_instance):
        assert four_objective_instance.num_blocks == 2
        assert four_objective_instance.block_len == 4
        assert four_objective_instance.f_max == 6
        assert four_objective_instance.front_size() == 9


class TestObjectives:
    @pytest.mark.parametrize("o,expected", [(8, (10, 2)), (7, (1, 3)), (4, (6, 6)), (0, (2, 10)), (1, (3, 1))])
    def test_block_objectives(self, small_instance, o, expected):
        assert block_objectives(small_instance, o) == expected

    def test_block_objectives_out_of_range(self, small_instance):
        with pytest.raises(UsageError, match="outside"):
            block_objectives(small_instance, 9)

    def test_evaluate_four_objectives(self, four_objective_instance):
        assert evaluate(four_objective_instance, g("1111 0011")) == (6, 2, 4, 4)

    @pytest.mark.parametrize("text,expected", [("11110000", (6, 6)), ("00000000", (2, 10))])
    def test_evaluate_two_objectives(self, small_instance, text, expected):
        assert evaluate(small_instance, g(text)) == expected

    def test_evaluate_length_mismatch(self, small_instance):
        with pytest.raises(UsageError, match="does not match"):
            evaluate(small_instance, g("1111"))


class TestRVector:
    @pytest.mark.parametrize("v,expected", [((10, 2), (1,)), ((6, 6), (0,)), ((2, 10), (-1,))])
    def test_two_objectives(self, small_instance, v, expected):
        assert r_vector(small_instance, v) == expected

    def test_four_objectives(self, four_objective_instance):
        assert r_vector(four_objective_instance, (2, 6, 6, 2)) == (-1, 1)

    def test_rejects_off_front(self, small_instance):
        with pytest.raises(UsageError, match="not a Pareto-front vector"):
            r_vector(small_instance, (3, 3))
        with pytest.raises(UsageError, match="gap"):
            r_vector(small_instance, (3, 9))


class TestParetoFront:
    def test_two_objectives(self, small_instance):
        assert pareto_front(small_instance) == {(2, 10), (4, 8), (5, 7), (6, 6), (7, 5), (8, 4), (10, 2)}

    def test_four_objectives(self, four_objective_instance):
        pairs = [(2, 6), (4, 4), (6, 2)]
        expected = {a + b for a in pairs for b in pairs}
        assert pareto_front(four_objective_instance) == expected

    def test_cardinality(self):
        assert len(pareto_front(OjzjInstance(12, 2, 3))) == 9

    def test_refuses_outside_regime(self):
        with pytest.raises(RegimeError, match="k <= n/m"):
            pareto_front(OjzjInstance(8, 2, 5))

    def test_sorted_front_is_lexicographic(self, small_instance):
        front = sorted_front(pareto_front(small_instance))
        assert front[0] == (2, 10)
        assert front[-1] == (10, 2)


class TestBruteForceOracle:
    """Enumeration over all genomes agrees with the closed form."""

    @pytest.mark.parametrize("n,m,k", [(8, 2, 2), (8, 4, 2), (4, 2, 2), (12, 4, 3), (16, 2, 3)])
    def test_matches_closed_form(self, n, m, k):
        instance = OjzjInstance(n, m, k)
        front = brute_force_front(instance)
        assert front == pareto_front(instance)
        assert len(front) == instance.front_size()

    def test_collapsed_middle(self):
        assert brute_force_front(OjzjInstance(4, 2, 2)) == {(2, 6), (4, 4), (6, 2)}

    def test_refuses_large_n(self):
        with pytest.raises(UsageError, match="Brute force"):
            brute_force_front(OjzjInstance(26, 2, 2))


class TestGenomeClass:
    def test_all_ones(self, small_instance):
        assert genome_class(small_instance, g("11111111")) == (1,)

    def test_gap_genome_is_not_optimal(self, small_instance):
        assert genome_class(small_instance, g("11111110")) is None

    def test_four_objectives(self, four_objective_instance):
        assert genome_class(four_objective_instance, g("0000 1100")) == (-1, 0)

    def test_class_matches_r_vector(self, small_instance):
        for text in ("00000000", "11000000", "11110000", "11111100", "11111111"):
            x = g(text)
            assert genome_class(small_instance, x) == r_vector(small_instance, evaluate(small_instance, x))


def all_genomes(n: int):
    for bits in itertools.product((0, 1), repeat=n):
        yield Genome(bits)


class TestBlockSymmetry:
    @pytest.mark.parametrize("n,m,k", [(8, 2, 2), (8, 4, 2), (6, 2, 3)])
    def test_complement_swaps_each_pair(self, n, m, k):
        instance = OjzjInstance(n, m, k)
        for x in all_genomes(n):
            v, w = evaluate(instance, x), evaluate(instance, x.complement())
            for j in range(instance.num_blocks):
                assert (w[2 * j], w[2 * j + 1]) == (v[2 * j + 1], v[2 * j])


class TestObjectiveRange:
    def test_every_block_length(self):
        for length in range(2, 17):
            for k in range(2, length + 1):
                instance = OjzjInstance(length, 2, k)
                for o in range(length + 1):
                    f_odd, f_even = block_objectives(instance, o)
                    assert 0 <= f_odd <= instance.f_max
                    assert 0 <= f_even <= instance.f_max
                    if o <= length - k or o == length:
                        assert f_odd == k + o
                    else:
                        # gap: the value drops below k instead of taking the k + o form
                        assert f_odd == length - o < k


class TestGenomeClassAgainstDominance:
    @pytest.mark.parametrize("n,m,k", [(8, 2, 2), (8, 4, 2), (12, 2, 3), (12, 4, 3)])
    def test_none_exactly_when_dominated(self, n, m, k):
        instance = OjzjInstance(n, m, k)
        fitness = {x: evaluate(instance, x) for x in all_genomes(n)}
        vectors = set(fitness.values())
        for x, v in fitness.items():
            dominated = any(dominates(u, v) for u in vectors)
            assert (genome_class(instance, x) is None) == dominated
