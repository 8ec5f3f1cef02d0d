from fractions import Fraction as F

import pytest
from hypothesis import assume, given, strategies as st

import oracles
from conftest import NOISE, distributions
from guesswork.core import (
    FLOAT,
    Partition,
    brute_force_opt_question,
    guess_time_after_question,
    guessing_time,
    make_distribution,
)
from guesswork.graph import (
    brute_force_maxcut,
    c_partition_audit,
    c_partitions,
    connectivity_report,
    cut_report,
    cut_weight,
    greedy_maxcut,
    guessing_time_via_cut,
    induced_distribution,
    is_c_partition,
    is_zigzag_equivalent,
    monotonicity_additivity_audit,
    noiseless_opt,
    quadratic_cut,
    weight_matrix,
    zigzag_partition,
)


def Q(n, *members):
    return Partition(n, frozenset(members))


class TestWeights:
    def test_worked_weights(self, four_symbols):
        W = weight_matrix(four_symbols, F(1, 10))
        off = [W.weight(i, j) for i, j in ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))]
        assert off == [F(23, 100), F(14, 100), F(5, 100), F(15, 100), F(6, 100), F(7, 100)]
        assert [W.weight(i, i) for i in range(1, 5)] == [F(32, 100), F(24, 100), F(16, 100), F(8, 100)]

    def test_noiseless_is_min(self, four_symbols):
        W = weight_matrix(four_symbols, 0)
        for i in range(1, 5):
            for j in range(i + 1, 5):
                assert W.weight(i, j) == min(four_symbols.prob(i), four_symbols.prob(j))

    def test_empty_near_half(self, four_symbols):
        W = weight_matrix(four_symbols, F(9, 20))
        assert list(W.edges()) == []

    def test_out_of_range_is_zero(self, four_symbols):
        W = weight_matrix(four_symbols, F(1, 10))
        assert W.weight(0, 2) == W.weight(5, 1) == W.weight(5, 5) == 0

    @given(distributions(), NOISE)
    def test_symmetric_and_matches_formula(self, D, p):
        W = weight_matrix(D, p)
        for i in range(1, D.n + 1):
            for j in range(1, D.n + 1):
                assert W.weight(i, j) == W.weight(j, i) == oracles.edge_weight(D.probs, p, i, j)


class TestCuts:
    def test_zigzag_cut(self, four_symbols):
        assert cut_weight(weight_matrix(four_symbols, F(1, 10)), Q(4, 1, 3)) == F(1, 2)

    def test_trivial_cuts(self, four_symbols):
        W = weight_matrix(four_symbols, F(1, 10))
        assert cut_weight(W, Q(4)) == cut_weight(W, Q(4, 1, 2, 3, 4)) == 0

    def test_sparse_cut(self, sparse_four):
        assert cut_weight(weight_matrix(sparse_four, F(1, 5)), Q(4, 1, 4)) == F(1, 5)

    def test_via_cut(self, four_symbols, sparse_four):
        assert guessing_time_via_cut(four_symbols, F(1, 10), Q(4, 1, 3)) == F(3, 2)
        assert guessing_time_via_cut(sparse_four, F(1, 5), Q(4, 1, 4)) == F(165, 100)
        assert guessing_time_via_cut(four_symbols, F(1, 2), Q(4, 2)) == 2

    def test_cut_report_canonical(self, four_symbols):
        rep = cut_report(four_symbols, F(1, 10), Q(4, 2, 4))
        assert rep.partition == Q(4, 1, 3)
        assert rep.guessing_time == F(3, 2)

    def test_size_mismatch(self, four_symbols):
        with pytest.raises(ValueError):
            cut_weight(weight_matrix(four_symbols, 0), Q(3, 1))

    @given(distributions(max_n=7), NOISE, st.data())
    def test_identity_and_quadratic_form(self, D, p, data):
        A = Partition.from_mask(D.n, data.draw(st.integers(0, (1 << D.n) - 1)))
        W = weight_matrix(D, p)
        c = cut_weight(W, A)
        assert c == oracles.cut(D.probs, p, A.members) == quadratic_cut(W, A)
        assert guess_time_after_question(D, A, p) == guessing_time(D) - c


class TestZigzagAndGreedy:
    @pytest.mark.parametrize("n,members", [(4, [1, 3]), (1, [1]), (5, [1, 3, 5])])
    def test_zigzag(self, n, members):
        assert zigzag_partition(n).sorted_members() == members

    def test_greedy_worked(self, four_symbols):
        assert greedy_maxcut(weight_matrix(four_symbols, F(1, 10))) == Q(4, 1, 3)

    def test_greedy_two(self):
        assert greedy_maxcut(weight_matrix(make_distribution([2, 1]), F(1, 10))) == Q(2, 1)

    def test_greedy_empty_graph(self, four_symbols):
        assert greedy_maxcut(weight_matrix(four_symbols, F(9, 20))) == Q(4, 1, 3)
        assert greedy_maxcut(weight_matrix(four_symbols, F(1, 2))) == Q(4, 1, 3)

    @given(distributions(), NOISE)
    def test_greedy_is_zigzag(self, D, p):
        assert greedy_maxcut(weight_matrix(D, p)) == zigzag_partition(D.n)

    def test_greedy_float(self, four_symbols):
        assert greedy_maxcut(weight_matrix(four_symbols.as_float(), 0.1)) == Q(4, 1, 3)


class TestBruteForceMaxcut:
    def test_worked(self, four_symbols):
        assert brute_force_maxcut(weight_matrix(four_symbols, F(1, 10)))[1] == F(1, 2)

    def test_sparse(self, sparse_four):
        A, value = brute_force_maxcut(weight_matrix(sparse_four, F(1, 5)))
        assert value == F(22, 100)
        assert A == Q(4, 1, 3)

    def test_empty(self, four_symbols):
        assert brute_force_maxcut(weight_matrix(four_symbols, F(9, 20)))[1] == 0

    def test_limit(self, four_symbols):
        with pytest.raises(ValueError):
            brute_force_maxcut(weight_matrix(four_symbols, 0), limit=3)

    def test_float_agrees(self, sparse_four):
        A, value = brute_force_maxcut(weight_matrix(sparse_four.as_float(), 0.2))
        assert value == pytest.approx(0.22, abs=1e-15)
        assert A == Q(4, 1, 3)

    @given(distributions(max_n=6), NOISE)
    def test_matches_oracle_and_half_bound(self, D, p):
        W = weight_matrix(D, p)
        A, value = brute_force_maxcut(W)
        assert value == oracles.max_cut(D.probs, p) == cut_weight(W, A)
        assert 1 in A
        assert 2 * cut_weight(W, zigzag_partition(D.n)) >= value


class TestConnectivity:
    def test_fully_connected(self, four_symbols):
        rep = connectivity_report(four_symbols, F(1, 10))
        assert rep.fully_connected and not rep.empty
        assert rep.edge_present(4, 1)

    def test_empty(self, four_symbols):
        rep = connectivity_report(four_symbols, F(9, 20))
        assert rep.empty and not rep.fully_connected

    def test_noiseless(self, four_symbols):
        assert connectivity_report(four_symbols, 0).fully_connected

    def test_partial(self, sparse_four):
        rep = connectivity_report(sparse_four, F(1, 5))
        assert not rep.fully_connected and not rep.empty
        assert not rep.edge_present(1, 4)

    @given(distributions(), NOISE)
    def test_matches_weights(self, D, p):
        W = weight_matrix(D, p)
        rep = connectivity_report(D, p)
        for i in range(1, D.n + 1):
            for j in range(i + 1, D.n + 1):
                assert rep.edge_present(i, j) == (W.weight(i, j) > 0)


class TestAudit:
    def test_worked(self, four_symbols):
        W = weight_matrix(four_symbols, F(1, 10))
        assert monotonicity_additivity_audit(W).ok
        assert W.weight(1, 3) + W.weight(2, 4) == W.weight(1, 4) + W.weight(2, 3) == F(1, 5)

    def test_vacuous(self, four_symbols):
        rep = monotonicity_additivity_audit(weight_matrix(four_symbols, F(1, 2)))
        assert rep.ok

    def test_sparse(self, sparse_four):
        W = weight_matrix(sparse_four, F(1, 5))
        assert monotonicity_additivity_audit(W).ok
        assert W.weight(1, 3) == F(1, 50) and W.weight(1, 4) == 0

    @given(distributions(max_n=7), NOISE)
    def test_always_clean(self, D, p):
        assert monotonicity_additivity_audit(weight_matrix(D, p)).ok


class TestCPartitions:
    def test_enumeration(self):
        got = sorted(A.sorted_members() for A in c_partitions(4))
        assert got == [[1, 3], [1, 4]]
        assert len(list(c_partitions(8))) == 8
        assert all(is_c_partition(A) for A in c_partitions(7))

    def test_fully_connected(self, four_symbols):
        audit = c_partition_audit(four_symbols, F(1, 10))
        assert audit.ok
        assert all(e.cut_weight == F(1, 2) and e.zigzag_equivalent for e in audit.entries)

    def test_sparse(self, sparse_four):
        audit = c_partition_audit(sparse_four, F(1, 5))
        assert audit.zigzag_cut == F(22, 100)
        entry = next(e for e in audit.entries if e.partition == Q(4, 1, 4))
        assert entry.cut_weight == F(1, 5)
        assert not entry.zigzag_equivalent
        assert not is_zigzag_equivalent(sparse_four, F(1, 5), Q(4, 1, 4))

    def test_non_c_partition_rejected(self, four_symbols):
        with pytest.raises(ValueError):
            is_zigzag_equivalent(four_symbols, 0, Q(4, 1, 2))

    def test_odd_n_padding(self):
        D = make_distribution([5, 4, 2])
        audit = c_partition_audit(D, F(1, 10))
        assert all(e.partition.n == 3 for e in audit.entries)
        assert audit.ok

    def test_noiseless_c_partitions_optimal(self, four_symbols):
        best = brute_force_opt_question(four_symbols, 0)[1]
        for A in c_partitions(4):
            assert guess_time_after_question(four_symbols, A, 0) == best

    @given(distributions(min_n=2, max_n=9), NOISE)
    def test_dominance(self, D, p):
        audit = c_partition_audit(D, p)
        assert audit.ok
        for e in audit.entries:
            assert e.cut_weight <= audit.zigzag_cut


class TestNoiseless:
    def test_values(self, four_symbols):
        assert noiseless_opt(four_symbols).g_opt == F(13, 10)
        assert noiseless_opt(make_distribution([1] * 4)).g_opt == F(3, 2)
        assert noiseless_opt(make_distribution([1])).g_opt == 1

    @given(distributions(max_n=8))
    def test_matches_brute_force(self, D):
        r = noiseless_opt(D)
        assert r.g_opt == brute_force_opt_question(D, 0)[1]
        assert r.lower <= r.g_opt <= r.upper


def test_induced_subgraph_is_scaled(four_symbols):
    sub = induced_distribution(four_symbols, 3)
    scale = sum(four_symbols.probs[:3])
    W, Ws = weight_matrix(four_symbols, F(1, 10)), weight_matrix(sub, F(1, 10))
    for i in range(1, 4):
        for j in range(1, 4):
            assert Ws.weight(i, j) * scale == W.weight(i, j)


def test_float_weights_close(four_symbols):
    We = weight_matrix(four_symbols, F(1, 10))
    Wf = weight_matrix(four_symbols.as_float(), 0.1)
    assert Wf.mode == FLOAT
    for i in range(1, 5):
        for j in range(1, 5):
            assert Wf.weight(i, j) == pytest.approx(float(We.weight(i, j)), abs=1e-16)


@given(distributions(min_n=2, max_n=8), NOISE)
def test_general_config_strictness(D, p):
    audit = c_partition_audit(D, p)
    assume(audit.general_config)
    for e in audit.entries:
        assert (e.cut_weight < audit.zigzag_cut) == (not e.zigzag_equivalent)
